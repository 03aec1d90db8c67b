#include "vms/stabilization.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace vms {

TridiagonalMatrix StabilizationBlocks::system_contribution(const OperatorScaling& s) const {
    const double g = s.gamma_eff, c = s.c_eff;
    TridiagonalMatrix a(B1.size());
    a.axpy(-g * g, B1).axpy(-c * g, B2).axpy(c * g, B3).axpy(c * c, B4);
    return a.transposed();
}

std::vector<double> StabilizationBlocks::rhs() const {
    std::vector<double> r = rhs_s1;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += rhs_s2[i];
    return r;
}

namespace {

void check_bases(const Mesh1D& mesh, const std::vector<ElementSpectralBasis>& bases) {
    if (static_cast<int>(bases.size()) != mesh.n_elements()) {
        throw std::invalid_argument("stabilization: one spectral basis per element is required");
    }
    for (int e = 0; e < mesh.n_elements(); ++e) {
        const auto& b = bases[e];
        if (std::abs(b.x_left() - mesh.x_left(e)) > 1e-14 || std::abs(b.x_right() - mesh.x_right(e)) > 1e-14) {
            throw std::invalid_argument("stabilization: basis " + std::to_string(e) + " does not match its element");
        }
    }
}

void add_entry(TridiagonalMatrix& A, int row_node, int col_node, int n_elements, double v) {
    const int row = row_node - 1, col = col_node - 1;
    if (row < 0 || row >= n_elements - 1 || col < 0 || col >= n_elements - 1) return;
    if (col == row) A.diag[row] += v;
    else if (col == row + 1) A.super[row] += v;
    else A.sub[col] += v;
}

}  // namespace

StabilizationBlocks assemble_stabilization(const Mesh1D& mesh, const std::vector<ElementSpectralBasis>& bases,
                                           const std::optional<ElementField>& data) {
    check_bases(mesh, bases);
    const int n = mesh.n_elements();
    StabilizationBlocks s{TridiagonalMatrix(n - 1), TridiagonalMatrix(n - 1), TridiagonalMatrix(n - 1),
                          TridiagonalMatrix(n - 1), std::vector<double>(n - 1, 0.0),
                          std::vector<double>(n - 1, 0.0)};
    const Side sides[2] = {Side::left, Side::right};
    for (int e = 0; e < n; ++e) {
        const auto& basis = bases[e];
        double b1[2][2] = {}, b2[2][2] = {}, b3[2][2] = {}, b4[2][2] = {};
        for (int j = 1; j <= basis.M(); ++j) {
            const double beta = basis.mode(j).beta;
            for (int a = 0; a < 2; ++a) {
                const WeightedProducts& pa = basis.products(sides[a], j);
                for (int b = 0; b < 2; ++b) {
                    const WeightedProducts& pb = basis.products(sides[b], j);
                    b1[a][b] += beta * pa.phi_pz * pb.phi_z;
                    b2[a][b] += beta * pa.dphi_pz * pb.phi_z;
                    b3[a][b] += beta * pa.phi_pz * pb.dphi_z;
                    b4[a][b] += beta * pa.dphi_pz * pb.dphi_z;
                }
            }
        }
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                add_entry(s.B1, e + a, e + b, n, b1[a][b]);
                add_entry(s.B2, e + a, e + b, n, b2[a][b]);
                add_entry(s.B3, e + a, e + b, n, b3[a][b]);
                add_entry(s.B4, e + a, e + b, n, b4[a][b]);
            }
        }
    }
    if (data) {
        if (static_cast<int>(data->n_elements()) != n) throw std::invalid_argument("stabilization: data/mesh mismatch");
        const OperatorScaling& sc = bases.front().scaling();
        for (int e = 0; e < n; ++e) {
            const auto& basis = bases[e];
            for (int j = 1; j <= basis.M(); ++j) {
                const double w = basis.mode(j).beta * source_inner_products(basis, j, data->left[e], data->right[e]);
                for (int a = 0; a < 2; ++a) {
                    const int row = e + a - 1;
                    if (row < 0 || row >= n - 1) continue;
                    const WeightedProducts& pa = basis.products(sides[a], j);
                    s.rhs_s1[row] -= sc.gamma_eff * w * pa.phi_z;
                    s.rhs_s2[row] += sc.c_eff * w * pa.dphi_z;
                }
            }
        }
    }
    return s;
}

std::vector<double> stabilization_rhs(const Mesh1D& mesh, const std::vector<ElementSpectralBasis>& bases,
                                      const ElementField& data) {
    check_bases(mesh, bases);
    const int n = mesh.n_elements();
    if (static_cast<int>(data.n_elements()) != n) throw std::invalid_argument("stabilization: data/mesh mismatch");
    std::vector<double> s1(n - 1, 0.0), s2(n - 1, 0.0);
    const Side sides[2] = {Side::left, Side::right};
    for (int e = 0; e < n; ++e) {
        const auto& basis = bases[e];
        const OperatorScaling& sc = basis.scaling();
        for (int j = 1; j <= basis.M(); ++j) {
            const double w = basis.mode(j).beta * source_inner_products(basis, j, data.left[e], data.right[e]);
            for (int a = 0; a < 2; ++a) {
                const int row = e + a - 1;
                if (row < 0 || row >= n - 1) continue;
                const WeightedProducts& pa = basis.products(sides[a], j);
                s1[row] -= sc.gamma_eff * w * pa.phi_z;
                s2[row] += sc.c_eff * w * pa.dphi_z;
            }
        }
    }
    for (int i = 0; i < n - 1; ++i) s1[i] += s2[i];
    return s1;
}

namespace {

void check_bubble_args(double k, double mu, double h) {
    if (!(k > 0.0)) throw std::invalid_argument("bubble: k must be positive");
    if (!(mu > 0.0)) throw std::invalid_argument("bubble: mu must be positive");
    if (!(h > 0.0)) throw std::invalid_argument("bubble: h must be positive");
}

// log(sinh(x/2)/(x/2)), even in x
double log_sinhc(double x) {
    const double a = std::abs(x);
    if (a > 1.0) return 0.5 * a + std::log1p(-std::exp(-a)) - std::log(a);
    static constexpr std::array<double, 12> coef = {
        1.0 / 24.0,
        -1.0 / 2880.0,
        1.0 / 181440.0,
        -1.0 / 9676800.0,
        1.0 / 479001600.0,
        -691.0 / 15692092416000.0,
        1.0 / 1046139494400.0,
        -3617.0 / 170729965486080000.0,
        43867.0 / 91963695909076992000.0,
        -174611.0 / 16057153253965824000000.0,
        77683.0 / 310224200866619719680000.0,
        -236364091.0 / 40651779281561848066867200000.0,
    };
    const double x2 = x * x;
    double s = 0.0;
    for (std::size_t i = coef.size(); i-- > 0;) s = s * x2 + coef[i];
    return s * x2;
}

}  // namespace

BubbleRoots bubble_roots(double k, double c, double mu, double h) {
    check_bubble_args(k, mu, h);
    const double a = c * h / mu;
    const double d = h * std::sqrt(c * c * k + 4.0 * mu) / (std::sqrt(k) * mu);
    return {0.5 * (a - d), 0.5 * (a + d)};
}

double bubble_eval(double xhat, double k, double c, double mu, double h) {
    const auto [L1, L2] = bubble_roots(k, c, mu, h);
    const double den = std::expm1(L1 - L2);
    if (den == 0.0) throw std::domain_error("bubble: degenerate roots");
    // every exponent below is nonpositive for xhat in [0,1]
    const double num = -std::expm1(-L2) * std::exp(L1 * xhat) - std::expm1(L1) * std::exp(L2 * (xhat - 1.0));
    return 1.0 + num / den;
}

double tau_exact(double k, double c, double mu, double h) {
    const auto [L1, L2] = bubble_roots(k, c, mu, h);
    if (!(L2 - L1 > 0.0)) throw std::domain_error("tau: degenerate roots");
    // tau = 1 - phi(L1) phi(-L2) / phi(L1 - L2), phi(x) = (e^x - 1)/x
    return -std::expm1(log_sinhc(L1) + log_sinhc(L2) - log_sinhc(L2 - L1));
}

double tau_truncated(const ElementSpectralBasis& basis) {
    double s = 0.0;
    for (const EigenMode& m : basis.modes()) s += m.beta * basis.integral_pz(m.j) * basis.integral_z(m.j);
    return s / basis.h();
}

double element_peclet(double c, double mu, double h) { return std::abs(c) * h / mu; }

TauPair make_tau_pair(double k, double c, double mu, double h, int M) {
    TauPair t;
    t.tau_exact = tau_exact(k, c, mu, h);
    t.tau_truncated = tau_truncated(ElementSpectralBasis(0.0, h, OperatorScaling::evolutive(k, c, mu), M));
    t.M = M;
    t.peclet = element_peclet(c, mu, h);
    return t;
}

double GreenFunctionTruncation::operator()(double x, double y) const {
    double s = 0.0;
    for (const EigenMode& m : basis_.modes()) s += m.beta * basis_.pz(m.j, y) * basis_.z(m.j, x);
    return s;
}

double green_truncated(const ElementSpectralBasis& basis, double x, double y) {
    return GreenFunctionTruncation(basis)(x, y);
}

}  // namespace vms
