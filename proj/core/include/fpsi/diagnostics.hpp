#ifndef FPSI_DIAGNOSTICS_HPP
#define FPSI_DIAGNOSTICS_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "fpsi/driver.hpp"

namespace fpsi {

/// Shortest round-trip-exact decimal form of v (printf %.17g).
std::string format_double(double v);

/// Per-step energy ledger with a fixed column schema; identical trajectories
/// produce byte-identical files.
void write_energy_csv(std::ostream& os, const Trajectory& tr);
void write_energy_csv(const std::string& path, const Trajectory& tr);

/// key=value run summary (outcome, horizon, energy bounds, worst residuals).
void write_summary(std::ostream& os, const Trajectory& tr);
void write_summary(const std::string& path, const Trajectory& tr);

/// Generic numeric table with a header row, one line per row, comma-separated.
void write_table(const std::string& path, const std::vector<std::string>& cols,
                 const std::vector<std::vector<double>>& rows);

/// Legacy-format VTK export of the Biot fields on the reference disk.
void write_disk_fields_vtk(const std::string& path, const FESpace& disk_p1,
                           const Eigen::VectorXd& eta, const Eigen::VectorXd& xi,
                           const Eigen::VectorXd& p);

/// Legacy-format VTK export of the fluid velocity at the mesh vertices of the
/// deformed (ALE-mapped) annulus.
void write_annulus_fields_vtk(const std::string& path, const FESpace& fluid, const ALEMap& phi,
                              const Eigen::VectorXd& u);

}  // namespace fpsi

#endif
