#include "fpsi/diagnostics.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace fpsi {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open output file: " + path);
    return os;
}

const char* outcome_name(Outcome o) {
    return o == Outcome::Completed ? "completed" : "partial_geometry";
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_energy_csv(std::ostream& os, const Trajectory& tr) {
    os << "step,time,e_total,e_fluid,e_biot_kin,e_plate_kin,e_plate_bend,"
          "e_elastic_d,e_elastic_div,e_pressure,e_half,e_prev,dissipation,"
          "plate_residual,biot_residual,solver_residual,drift\n";
    for (const StepRecord& r : tr.records) {
        const EnergyTerms& e = r.energy;
        os << r.n + 1 << ',' << format_double(r.time) << ',' << format_double(e.total()) << ','
           << format_double(e.fluid) << ',' << format_double(e.biot_kinetic) << ','
           << format_double(e.plate_kinetic) << ',' << format_double(e.plate_bending) << ','
           << format_double(e.elastic_d) << ',' << format_double(e.elastic_div) << ','
           << format_double(e.pressure) << ',' << format_double(r.e_half) << ','
           << format_double(r.e_prev) << ',' << format_double(r.dissipation) << ','
           << format_double(r.plate_residual) << ',' << format_double(r.biot_residual) << ','
           << format_double(r.solver_residual) << ',' << format_double(r.drift) << '\n';
    }
}

void write_energy_csv(const std::string& path, const Trajectory& tr) {
    auto os = open_out(path);
    write_energy_csv(os, tr);
}

void write_summary(std::ostream& os, const Trajectory& tr) {
    double max_pres = 0, max_bres = 0, max_sres = 0, max_drift = 0;
    double final_energy = tr.energy0;
    for (const StepRecord& r : tr.records) {
        max_pres = std::max(max_pres, r.plate_residual);
        max_bres = std::max(max_bres, r.biot_residual);
        max_sres = std::max(max_sres, r.solver_residual);
        max_drift = std::max(max_drift, r.drift);
        final_energy = r.energy.total();
    }
    os << "outcome = " << outcome_name(tr.outcome) << '\n';
    if (!tr.failure.empty()) os << "failure = " << tr.failure << '\n';
    os << "steps_done = " << tr.steps_done << '\n';
    os << "dt = " << format_double(tr.dt) << '\n';
    os << "energy_initial = " << format_double(tr.energy0) << '\n';
    os << "energy_final = " << format_double(final_energy) << '\n';
    os << "max_plate_residual = " << format_double(max_pres) << '\n';
    os << "max_biot_residual = " << format_double(max_bres) << '\n';
    os << "max_solver_residual = " << format_double(max_sres) << '\n';
    os << "max_drift = " << format_double(max_drift) << '\n';
}

void write_summary(const std::string& path, const Trajectory& tr) {
    auto os = open_out(path);
    write_summary(os, tr);
}

void write_table(const std::string& path, const std::vector<std::string>& cols,
                 const std::vector<std::vector<double>>& rows) {
    auto os = open_out(path);
    for (size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << '\n';
    for (const auto& row : rows) {
        if (row.size() != cols.size()) throw std::invalid_argument("table row width mismatch");
        for (size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
        os << '\n';
    }
}

namespace {

void write_vtk_header(std::ostream& os, const Mesh2D& mesh,
                      const std::vector<Eigen::Vector2d>& points) {
    os << "# vtk DataFile Version 3.0\nfpsi fields\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    os << "POINTS " << points.size() << " double\n";
    for (const auto& p : points)
        os << format_double(p.x()) << ' ' << format_double(p.y()) << " 0\n";
    os << "CELLS " << mesh.num_tris() << ' ' << 4 * mesh.num_tris() << '\n';
    for (const auto& t : mesh.tris) os << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    os << "CELL_TYPES " << mesh.num_tris() << '\n';
    for (int e = 0; e < mesh.num_tris(); ++e) os << "5\n";
    os << "POINT_DATA " << points.size() << '\n';
}

void write_vector_field(std::ostream& os, const std::string& name, const Eigen::VectorXd& v,
                        int n) {
    os << "VECTORS " << name << " double\n";
    for (int i = 0; i < n; ++i)
        os << format_double(v[2 * i]) << ' ' << format_double(v[2 * i + 1]) << " 0\n";
}

}  // namespace

void write_disk_fields_vtk(const std::string& path, const FESpace& disk_p1,
                           const Eigen::VectorXd& eta, const Eigen::VectorXd& xi,
                           const Eigen::VectorXd& p) {
    auto os = open_out(path);
    write_vtk_header(os, *disk_p1.mesh, disk_p1.mesh->nodes);
    const int n = disk_p1.mesh->num_nodes();
    write_vector_field(os, "eta", eta, n);
    write_vector_field(os, "xi", xi, n);
    os << "SCALARS p double 1\nLOOKUP_TABLE default\n";
    for (int i = 0; i < n; ++i) os << format_double(p[i]) << '\n';
}

void write_annulus_fields_vtk(const std::string& path, const FESpace& fluid, const ALEMap& phi,
                              const Eigen::VectorXd& u) {
    auto os = open_out(path);
    const Mesh2D& mesh = *fluid.mesh;
    std::vector<Eigen::Vector2d> mapped(mesh.num_nodes());
    for (int i = 0; i < mesh.num_nodes(); ++i) mapped[i] = phi.at_node(i);
    write_vtk_header(os, mesh, mapped);
    // vertex dofs of the P2 space coincide with the mesh nodes
    write_vector_field(os, "u", u, mesh.num_nodes());
}

}  // namespace fpsi
