#pragma once

#include <vector>

#include "vms/core_fem.hpp"

namespace vms {

// Effective coefficients of the element operator gamma u + c u' - mu u''.
// Stationary use: (gamma, c, mu). Backward Euler step: (1, k c, k mu).
struct OperatorScaling {
    double gamma_eff = 0.0;
    double c_eff = 0.0;
    double mu_eff = 1.0;

    static OperatorScaling stationary(double gamma, double c, double mu);
    static OperatorScaling evolutive(double k, double c, double mu);

    void validate() const;
};

struct EigenMode {
    int j = 0;
    double sigma = 0.0;  // Laplace eigenvalue (j pi / h)^2
    double eta = 0.0;    // operator eigenvalue
    double beta = 0.0;   // 1 / eta
};

double laplace_eigenvalue(int j, double h);
double operator_eigenvalue(int j, const OperatorScaling& s, double h);

// i0 = int_0^1 e^{sigma t} sin(j pi t) dt, i1 = int_0^1 t e^{sigma t} sin(j pi t) dt.
struct ExpSineMoments {
    double i0 = 0.0;
    double i1 = 0.0;
};
ExpSineMoments exp_sine_moments(double sigma, int j);

enum class Side { left = 0, right = 1 };

// (phi, p z_j), (phi', p z_j), (phi, z_j), (phi', z_j) over one element,
// phi being the hat function of the given endpoint restricted to the element.
struct WeightedProducts {
    double phi_pz = 0.0;
    double dphi_pz = 0.0;
    double phi_z = 0.0;
    double dphi_z = 0.0;
};

// Eigenmodes of the element operator with homogeneous Dirichlet data:
//   z_j(x) = sqrt(2/h) C psi(x) sin(j pi (x - x_left)/h),  psi(x) = exp(c_eff (x - x_left)/(2 mu_eff)),
// orthonormal for the weight p = (C psi)^-2. C is the gauge scale (1 in production).
class ElementSpectralBasis {
public:
    ElementSpectralBasis(double x_left, double x_right, const OperatorScaling& scaling, int M,
                         int element = 0, double gauge = 1.0);
    ElementSpectralBasis(const Mesh1D& mesh, int element, const OperatorScaling& scaling, int M,
                         double gauge = 1.0);

    int element() const { return element_; }
    double x_left() const { return x_left_; }
    double x_right() const { return x_right_; }
    double h() const { return h_; }
    int M() const { return static_cast<int>(modes_.size()); }
    double gauge() const { return gauge_; }
    const OperatorScaling& scaling() const { return scaling_; }
    // c_eff h / (2 mu_eff): exponent of psi across the element
    double alpha() const { return alpha_; }
    const std::vector<EigenMode>& modes() const { return modes_; }
    const EigenMode& mode(int j) const { return modes_.at(j - 1); }

    const WeightedProducts& products(Side side, int j) const;
    // int_K z_j and int_K p z_j
    double integral_z(int j) const { return int_z_.at(j - 1); }
    double integral_pz(int j) const { return int_pz_.at(j - 1); }

    double psi(double x) const;
    double weight(double x) const;
    double z(int j, double x) const;
    double pz(int j, double x) const;
    double dz(int j, double x) const;
    double d2z(int j, double x) const;

private:
    int element_;
    double x_left_, x_right_, h_;
    OperatorScaling scaling_;
    double gauge_;
    double alpha_;
    std::vector<EigenMode> modes_;
    std::vector<WeightedProducts> left_, right_;
    std::vector<double> int_z_, int_pz_;
};

WeightedProducts weighted_inner_products(const ElementSpectralBasis& basis, Side side, int j);

// (f, p z_j) for f affine on the element with endpoint values f_left, f_right.
double source_inner_products(const ElementSpectralBasis& basis, int j, double f_left, double f_right);

// One basis per element of the mesh, all for the same scaling and mode count.
std::vector<ElementSpectralBasis> build_bases(const Mesh1D& mesh, const OperatorScaling& scaling, int M,
                                              double gauge = 1.0);

}  // namespace vms
