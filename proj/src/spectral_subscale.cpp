#include "vms/spectral_subscale.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace vms {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double taylor_switch = 1e-4;
// exp(alpha) must stay finite with room for the products formed in assembly.
constexpr double alpha_limit = 300.0;

double sign_of_mode(int j) { return (j % 2 == 0) ? 1.0 : -1.0; }  // cos(j pi)

ExpSineMoments taylor_moments(double sigma, int j) {
    // S_q = int_0^1 t^q sin(b t) dt, C_q = int_0^1 t^q cos(b t) dt, with sin(b) = 0.
    const double b = j * pi;
    const double s = sign_of_mode(j);
    std::array<double, 7> S{}, C{};
    S[0] = (1.0 - s) / b;
    C[0] = 0.0;
    for (int q = 1; q < 7; ++q) {
        S[q] = -s / b + q / b * C[q - 1];
        C[q] = -q / b * S[q - 1];
    }
    ExpSineMoments m;
    double term = 1.0;
    for (int n = 0; n < 6; ++n) {
        if (n > 0) term *= sigma / n;
        m.i0 += term * S[n];
        m.i1 += term * S[n + 1];
    }
    return m;
}

}  // namespace

OperatorScaling OperatorScaling::stationary(double gamma, double c, double mu) {
    OperatorScaling s{gamma, c, mu};
    s.validate();
    return s;
}

OperatorScaling OperatorScaling::evolutive(double k, double c, double mu) {
    if (!(k > 0.0)) throw std::invalid_argument("time step k must be positive");
    OperatorScaling s{1.0, k * c, k * mu};
    s.validate();
    return s;
}

void OperatorScaling::validate() const {
    if (!(mu_eff > 0.0)) throw std::invalid_argument("mu_eff must be positive");
    if (!(gamma_eff >= 0.0)) throw std::invalid_argument("gamma_eff must be nonnegative");
    if (!std::isfinite(c_eff)) throw std::invalid_argument("c_eff must be finite");
}

double laplace_eigenvalue(int j, double h) {
    if (j <= 0) throw std::invalid_argument("mode index must be >= 1, got " + std::to_string(j));
    if (!(h > 0.0)) throw std::invalid_argument("element length must be positive");
    const double w = j * pi / h;
    return w * w;
}

double operator_eigenvalue(int j, const OperatorScaling& s, double h) {
    const double ratio = s.c_eff / (2.0 * s.mu_eff);
    return s.gamma_eff + s.mu_eff * (laplace_eigenvalue(j, h) + ratio * ratio);
}

ExpSineMoments exp_sine_moments(double sigma, int j) {
    if (j <= 0) throw std::invalid_argument("mode index must be >= 1");
    if (std::abs(sigma) < taylor_switch) return taylor_moments(sigma, j);
    const double b = j * pi;
    const double r = sigma * sigma + b * b;
    const double e = std::exp(sigma);
    ExpSineMoments m;
    if (j % 2 == 0) {
        const double em1 = std::expm1(sigma);
        m.i0 = -b * em1 / r;
        m.i1 = b * (2.0 * sigma * em1 - e * r) / (r * r);
    } else {
        m.i0 = b * (1.0 + e) / r;
        m.i1 = b * (e * r - 2.0 * sigma * (e + 1.0)) / (r * r);
    }
    return m;
}

ElementSpectralBasis::ElementSpectralBasis(double x_left, double x_right, const OperatorScaling& scaling, int M,
                                           int element, double gauge)
    : element_(element), x_left_(x_left), x_right_(x_right), h_(x_right - x_left), scaling_(scaling),
      gauge_(gauge) {
    scaling_.validate();
    if (M < 0) throw std::invalid_argument("mode count must be nonnegative");
    if (!(h_ > 0.0)) throw std::invalid_argument("element must have positive length");
    if (!(gauge > 0.0) || !std::isfinite(gauge)) throw std::invalid_argument("gauge scale must be positive");
    alpha_ = scaling_.c_eff * h_ / (2.0 * scaling_.mu_eff);
    if (std::abs(alpha_) > alpha_limit) {
        throw std::overflow_error("element Peclet number c h/(2 mu) = " + std::to_string(alpha_) +
                                  " exceeds the representable range");
    }
    const double norm = std::sqrt(2.0 / h_);
    modes_.reserve(M);
    left_.reserve(M);
    right_.reserve(M);
    for (int j = 1; j <= M; ++j) {
        EigenMode m;
        m.j = j;
        m.sigma = laplace_eigenvalue(j, h_);
        m.eta = operator_eigenvalue(j, scaling_, h_);
        m.beta = 1.0 / m.eta;
        modes_.push_back(m);

        const ExpSineMoments zp = exp_sine_moments(alpha_, j);   // z carries e^{+alpha t}
        const ExpSineMoments pp = exp_sine_moments(-alpha_, j);  // p z carries e^{-alpha t}
        const double cz = norm * gauge_;
        const double cp = norm / gauge_;

        WeightedProducts L, R;
        R.phi_z = h_ * cz * zp.i1;
        L.phi_z = h_ * cz * (zp.i0 - zp.i1);
        R.dphi_z = cz * zp.i0;
        L.dphi_z = -R.dphi_z;
        R.phi_pz = h_ * cp * pp.i1;
        L.phi_pz = h_ * cp * (pp.i0 - pp.i1);
        R.dphi_pz = cp * pp.i0;
        L.dphi_pz = -R.dphi_pz;
        left_.push_back(L);
        right_.push_back(R);
        int_z_.push_back(h_ * cz * zp.i0);
        int_pz_.push_back(h_ * cp * pp.i0);
    }
}

ElementSpectralBasis::ElementSpectralBasis(const Mesh1D& mesh, int element, const OperatorScaling& scaling, int M,
                                           double gauge)
    : ElementSpectralBasis(mesh.x_left(element), mesh.x_right(element), scaling, M, element, gauge) {}

const WeightedProducts& ElementSpectralBasis::products(Side side, int j) const {
    return side == Side::left ? left_.at(j - 1) : right_.at(j - 1);
}

double ElementSpectralBasis::psi(double x) const { return gauge_ * std::exp(alpha_ * (x - x_left_) / h_); }

double ElementSpectralBasis::weight(double x) const {
    const double p = psi(x);
    return 1.0 / (p * p);
}

double ElementSpectralBasis::z(int j, double x) const {
    const double t = (x - x_left_) / h_;
    return std::sqrt(2.0 / h_) * psi(x) * std::sin(j * pi * t);
}

double ElementSpectralBasis::pz(int j, double x) const {
    const double t = (x - x_left_) / h_;
    return std::sqrt(2.0 / h_) / psi(x) * std::sin(j * pi * t);
}

double ElementSpectralBasis::dz(int j, double x) const {
    const double t = (x - x_left_) / h_;
    const double b = j * pi;
    return std::sqrt(2.0 / h_) * psi(x) * (alpha_ * std::sin(b * t) + b * std::cos(b * t)) / h_;
}

double ElementSpectralBasis::d2z(int j, double x) const {
    const double t = (x - x_left_) / h_;
    const double b = j * pi;
    return std::sqrt(2.0 / h_) * psi(x) *
           ((alpha_ * alpha_ - b * b) * std::sin(b * t) + 2.0 * alpha_ * b * std::cos(b * t)) / (h_ * h_);
}

WeightedProducts weighted_inner_products(const ElementSpectralBasis& basis, Side side, int j) {
    return basis.products(side, j);
}

double source_inner_products(const ElementSpectralBasis& basis, int j, double f_left, double f_right) {
    return f_left * basis.products(Side::left, j).phi_pz + f_right * basis.products(Side::right, j).phi_pz;
}

std::vector<ElementSpectralBasis> build_bases(const Mesh1D& mesh, const OperatorScaling& scaling, int M,
                                              double gauge) {
    std::vector<ElementSpectralBasis> bases;
    bases.reserve(mesh.n_elements());
    for (int e = 0; e < mesh.n_elements(); ++e) bases.emplace_back(mesh, e, scaling, M, gauge);
    return bases;
}

}  // namespace vms
