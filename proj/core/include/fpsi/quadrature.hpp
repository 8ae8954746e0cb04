#ifndef FPSI_QUADRATURE_HPP
#define FPSI_QUADRATURE_HPP

#include <Eigen/Dense>
#include <vector>

namespace fpsi {

/// Triangle quadrature in barycentric coordinates; weights sum to 1 and are
/// multiplied by the physical element area on use.
struct QuadRule {
    std::vector<Eigen::Vector3d> bary;
    std::vector<double> w;
    int size() const { return static_cast<int>(w.size()); }
};

const QuadRule& tri_rule_deg2();
const QuadRule& tri_rule_deg5();

/// Composite rule: uniform nsub*nsub subdivision, base rule on each cell.
/// Used as an independent quadrature oracle in tests.
QuadRule tri_rule_refined(int nsub, const QuadRule& base);

/// 1D Gauss rule on [0,1], degree 5 (3 points). Weights sum to 1.
struct EdgeRule {
    std::vector<double> t;
    std::vector<double> w;
};
const EdgeRule& edge_rule_deg5();

}  // namespace fpsi

#endif
