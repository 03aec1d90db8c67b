#pragma once

#include <optional>
#include <vector>

#include "vms/core_fem.hpp"
#include "vms/spectral_subscale.hpp"

namespace vms {

// Sub-grid blocks, first index on the p z_j side:
//   B1_lm = sum beta (phi_l, p z)(phi_m, z)     B2_lm = sum beta (phi_l', p z)(phi_m, z)
//   B3_lm = sum beta (phi_l, p z)(phi_m', z)    B4_lm = sum beta (phi_l', p z)(phi_m', z)
// rhs_s1 = -gamma sum beta (g, p z)(phi_l, z),  rhs_s2 = c sum beta (g, p z)(phi_l', z)
struct StabilizationBlocks {
    TridiagonalMatrix B1, B2, B3, B4;
    std::vector<double> rhs_s1, rhs_s2;

    // Sub-grid contribution to the system matrix with rows indexed by the test function:
    // transpose of -gamma^2 B1 - c gamma B2 + c gamma B3 + c^2 B4.
    TridiagonalMatrix system_contribution(const OperatorScaling& s) const;
    std::vector<double> rhs() const;
};

// data: element-affine right-hand side g (f for the stationary problem, k f + U^n for a time step).
StabilizationBlocks assemble_stabilization(const Mesh1D& mesh, const std::vector<ElementSpectralBasis>& bases,
                                           const std::optional<ElementField>& data = std::nullopt);

// Only the right-hand side part; cheaper when the blocks are already known.
std::vector<double> stabilization_rhs(const Mesh1D& mesh, const std::vector<ElementSpectralBasis>& bases,
                                      const ElementField& data);

// Roots of 1 + (k c/h) L - (k mu/h^2) L^2 = 0, L1 < 0 < L2.
struct BubbleRoots {
    double L1, L2;
};
BubbleRoots bubble_roots(double k, double c, double mu, double h);

// Solution of b + (k c/h) b' - (k mu/h^2) b'' = 1 on (0,1), b(0) = b(1) = 0.
double bubble_eval(double xhat, double k, double c, double mu, double h);
double tau_exact(double k, double c, double mu, double h);
// (1/h) sum_j beta_j (int p z_j)(int z_j), basis built with the evolutive scaling
double tau_truncated(const ElementSpectralBasis& basis);

// |c| h / mu
double element_peclet(double c, double mu, double h);

struct TauPair {
    double tau_exact = 0.0;
    double tau_truncated = 0.0;
    int M = 0;
    double peclet = 0.0;
};
TauPair make_tau_pair(double k, double c, double mu, double h, int M);

class GreenFunctionTruncation {
public:
    explicit GreenFunctionTruncation(const ElementSpectralBasis& basis) : basis_(basis) {}
    int M() const { return basis_.M(); }
    const ElementSpectralBasis& basis() const { return basis_; }
    // g_y(x) = sum_j beta_j (p z_j)(y) z_j(x)
    double operator()(double x, double y) const;

private:
    const ElementSpectralBasis& basis_;
};

double green_truncated(const ElementSpectralBasis& basis, double x, double y);

}  // namespace vms
