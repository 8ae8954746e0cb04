#ifndef FPSI_GEOMETRY_HPP
#define FPSI_GEOMETRY_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "fpsi/fe_space.hpp"
#include "fpsi/interface_grid.hpp"

namespace fpsi {

/// Deformation gradient grad(eta) of an interleaved P1 vector field on
/// element e, with (grad eta)_{ij} = d eta_i / d x_j (constant per element).
Eigen::Matrix2d def_gradient(const FESpace& p1, const Eigen::VectorXd& eta, int e);

/// F = I + grad(eta), the gradient of the Lagrangian map id + eta.
Eigen::Matrix2d lagrangian_grad(const FESpace& p1, const Eigen::VectorXd& eta, int e);

double biot_jacobian(const FESpace& p1, const Eigen::VectorXd& eta, int e);

/// Pullback gradient: grad^eta f = F^{-T} grad f for F = I + grad(eta).
Eigen::Vector2d transformed_grad(const Eigen::Matrix2d& F, const Eigen::Vector2d& grad);

/// Componentwise discrete-harmonic P1 extension of the interface motion into
/// the reference annulus: nodal map values Phi with Phi = x + omega(z(x)) on
/// the interface ring and Phi = x on the outer ring.
struct ALEMap {
    const FESpace* space = nullptr;  // P1 on the annulus mesh
    Eigen::VectorXd vals;            // interleaved nodal map values

    Eigen::Matrix2d grad(int e) const;
    double jac(int e) const;
    Eigen::Vector2d at_node(int n) const { return {vals[2 * n], vals[2 * n + 1]}; }
};

ALEMap solve_ale_map(const FESpace& p1_annulus, const InterfaceGrid& g, const PlateField& omega);

/// Discrete ALE velocity (Phi_now - Phi_prev)/dt as interleaved nodal values.
Eigen::VectorXd ale_velocity(const ALEMap& now, const ALEMap& prev, double dt);

/// Rescaled interface frame at the M samples: tangent tau = dPhi_Gamma/dz,
/// outward normal n = (tau_y, -tau_x), stretch S = |tau| = |n|.
struct InterfaceFrame {
    Eigen::VectorXd nx, ny, tx, ty, S;
};

InterfaceFrame interface_frame(const InterfaceGrid& g, const PlateField& omega);

struct GeomThresholds {
    double det_min = 0.25;       // lower bound for det(I + grad eta^delta)
    double ale_jac_min = 0.25;   // bounds for the ALE Jacobian
    double ale_jac_max = 4.0;
    double ale_grad_max = 4.0;   // bound for |grad Phi| (spectral norm)
    double alpha_min = 0.25;     // lower bound for min_z |(-sin z, cos z) + d_z omega|
    double clearance = 0.05;     // require max |Phi_Gamma| <= 2 - clearance
};

struct GeomCertificate {
    double min_det_biot = 0.0;
    double min_jac_ale = 0.0;
    double max_jac_ale = 0.0;
    double max_grad_ale = 0.0;
    double alpha_tilde = 0.0;
    double injectivity_ratio = 0.0;  // min over sample pairs of secant/torus-distance
    double max_interface_radius = 0.0;
    bool pass = false;
    std::string failure;  // first violated condition, empty on pass
};

GeomCertificate certify_geometry(const FESpace& disk_p1, const Eigen::VectorXd& eta_delta,
                                 const ALEMap& ale, const InterfaceGrid& g,
                                 const PlateField& omega, const GeomThresholds& thr);

/// Length of the canonical annulus path between a and b: the radial segment
/// at angle(a) from |a| to |b| followed by the arc at radius |b| through the
/// shorter angular gap (ties broken toward the positive direction).
double annulus_path_length(const Eigen::Vector2d& a, const Eigen::Vector2d& b);

/// Polyline discretization of that canonical path (arc split into segments).
std::vector<Eigen::Vector2d> annulus_path_polyline(const Eigen::Vector2d& a,
                                                   const Eigen::Vector2d& b, int arc_segments);

double polyline_length(const std::vector<Eigen::Vector2d>& pts);

/// Length of the image polyline under an interleaved P1 map on the annulus.
double mapped_polyline_length(const FESpace& p1, const Eigen::VectorXd& map_vals,
                              const std::vector<Eigen::Vector2d>& pts);

/// Max over elements of the spectral norm of the map gradient.
double max_map_gradient(const FESpace& p1, const Eigen::VectorXd& map_vals);

}  // namespace fpsi

#endif
