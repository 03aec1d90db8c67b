#include "vms/core_fem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace vms {

Mesh1D::Mesh1D(int n_elements) : n_(n_elements) {
    if (n_elements < 2) {
        throw std::invalid_argument("mesh needs at least 2 elements, got " + std::to_string(n_elements));
    }
    h_ = 1.0 / n_;
    nodes_.resize(n_ + 1);
    for (int i = 0; i <= n_; ++i) nodes_[i] = static_cast<double>(i) / n_;
}

Mesh1D build_mesh(int n_elements) { return Mesh1D(n_elements); }

TridiagonalMatrix::TridiagonalMatrix(std::size_t n)
    : sub(n > 0 ? n - 1 : 0, 0.0), diag(n, 0.0), super(n > 0 ? n - 1 : 0, 0.0) {}

bool TridiagonalMatrix::consistent() const {
    if (diag.empty()) return sub.empty() && super.empty();
    return sub.size() == diag.size() - 1 && super.size() == diag.size() - 1;
}

TridiagonalMatrix TridiagonalMatrix::transposed() const {
    TridiagonalMatrix t = *this;
    std::swap(t.sub, t.super);
    return t;
}

std::vector<double> TridiagonalMatrix::apply(const std::vector<double>& x) const {
    const std::size_t n = size();
    if (x.size() != n) throw std::invalid_argument("tridiagonal apply: size mismatch");
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = diag[i] * x[i];
        if (i > 0) s += sub[i - 1] * x[i - 1];
        if (i + 1 < n) s += super[i] * x[i + 1];
        y[i] = s;
    }
    return y;
}

double TridiagonalMatrix::norm_inf() const {
    double m = 0.0;
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) {
        double s = std::abs(diag[i]);
        if (i > 0) s += std::abs(sub[i - 1]);
        if (i + 1 < n) s += std::abs(super[i]);
        m = std::max(m, s);
    }
    return m;
}

TridiagonalMatrix& TridiagonalMatrix::axpy(double a, const TridiagonalMatrix& other) {
    if (other.size() != size()) throw std::invalid_argument("tridiagonal axpy: size mismatch");
    for (std::size_t i = 0; i < diag.size(); ++i) diag[i] += a * other.diag[i];
    for (std::size_t i = 0; i < sub.size(); ++i) {
        sub[i] += a * other.sub[i];
        super[i] += a * other.super[i];
    }
    return *this;
}

TridiagonalMatrix operator*(double a, const TridiagonalMatrix& m) {
    TridiagonalMatrix r(m.size());
    r.axpy(a, m);
    return r;
}

TridiagonalMatrix operator+(const TridiagonalMatrix& a, const TridiagonalMatrix& b) {
    TridiagonalMatrix r = a;
    r.axpy(1.0, b);
    return r;
}

namespace {

// Scatter a 2x2 element matrix (row = test, column = trial) into interior storage.
void scatter(TridiagonalMatrix& A, int e, int n_elements, const double K[2][2]) {
    const int nodes[2] = {e, e + 1};
    for (int a = 0; a < 2; ++a) {
        const int row = nodes[a] - 1;
        if (row < 0 || row >= n_elements - 1) continue;
        for (int b = 0; b < 2; ++b) {
            const int col = nodes[b] - 1;
            if (col < 0 || col >= n_elements - 1) continue;
            if (col == row) A.diag[row] += K[a][b];
            else if (col == row + 1) A.super[row] += K[a][b];
            else A.sub[col] += K[a][b];
        }
    }
}

}  // namespace

GalerkinMatrices assemble_galerkin(const Mesh1D& mesh) {
    const int n = mesh.n_elements();
    const double h = mesh.h();
    GalerkinMatrices g{TridiagonalMatrix(n - 1), TridiagonalMatrix(n - 1), TridiagonalMatrix(n - 1)};
    const double Mloc[2][2] = {{h / 3, h / 6}, {h / 6, h / 3}};
    const double Cloc[2][2] = {{-0.5, 0.5}, {-0.5, 0.5}};
    const double Dloc[2][2] = {{1 / h, -1 / h}, {-1 / h, 1 / h}};
    for (int e = 0; e < n; ++e) {
        scatter(g.mass, e, n, Mloc);
        scatter(g.convection, e, n, Cloc);
        scatter(g.stiffness, e, n, Dloc);
    }
    return g;
}

TridiagonalMatrix combine(const GalerkinMatrices& g, double gamma, double c, double mu) {
    TridiagonalMatrix a(g.mass.size());
    a.axpy(gamma, g.mass).axpy(c, g.convection).axpy(mu, g.stiffness);
    return a;
}

ElementField ElementField::zero(int n_elements) {
    return ElementField{std::vector<double>(n_elements, 0.0), std::vector<double>(n_elements, 0.0)};
}

ElementField ElementField::from_nodal(const std::vector<double>& nodal) {
    if (nodal.size() < 2) throw std::invalid_argument("nodal field needs at least 2 values");
    ElementField f;
    f.left.assign(nodal.begin(), nodal.end() - 1);
    f.right.assign(nodal.begin() + 1, nodal.end());
    return f;
}

ElementField ElementField::affine(const Mesh1D& mesh, double a0, double a1) {
    ElementField f = zero(mesh.n_elements());
    for (int e = 0; e < mesh.n_elements(); ++e) {
        f.left[e] = a0 + a1 * mesh.x_left(e);
        f.right[e] = a0 + a1 * mesh.x_right(e);
    }
    return f;
}

ElementField& ElementField::axpy(double a, const ElementField& other) {
    if (other.n_elements() != n_elements()) throw std::invalid_argument("element field size mismatch");
    for (std::size_t e = 0; e < left.size(); ++e) {
        left[e] += a * other.left[e];
        right[e] += a * other.right[e];
    }
    return *this;
}

std::vector<double> load_vector(const Mesh1D& mesh, const ElementField& g) {
    const int n = mesh.n_elements();
    if (static_cast<int>(g.n_elements()) != n) throw std::invalid_argument("load_vector: field/mesh mismatch");
    const double h = mesh.h();
    std::vector<double> b(n - 1, 0.0);
    for (int e = 0; e < n; ++e) {
        const double gl = g.left[e], gr = g.right[e];
        if (e >= 1) b[e - 1] += h * (gl / 3 + gr / 6);
        if (e + 1 <= n - 1) b[e] += h * (gl / 6 + gr / 3);
    }
    return b;
}

std::vector<double> derivative_load_vector(const Mesh1D& mesh, const ElementField& g) {
    const int n = mesh.n_elements();
    if (static_cast<int>(g.n_elements()) != n) throw std::invalid_argument("derivative_load_vector: field/mesh mismatch");
    std::vector<double> b(n - 1, 0.0);
    for (int e = 0; e < n; ++e) {
        const double mean = 0.5 * (g.left[e] + g.right[e]);
        if (e >= 1) b[e - 1] -= mean;
        if (e + 1 <= n - 1) b[e] += mean;
    }
    return b;
}

std::vector<double> galerkin_load_stationary(const Mesh1D& mesh, double gamma, double c) {
    std::vector<double> b(mesh.n_interior());
    for (int l = 0; l < mesh.n_interior(); ++l) b[l] = -mesh.h() * (gamma * mesh.node(l + 1) + c);
    return b;
}

SingularPivotError::SingularPivotError(std::size_t index, double pivot)
    : std::runtime_error([&] {
          std::ostringstream os;
          os << "singular pivot at row " << index << " (pivot = " << pivot << ")";
          return os.str();
      }()),
      index_(index) {}

TridiagonalFactorization::TridiagonalFactorization(const TridiagonalMatrix& a)
    : sub_(a.sub), diag_(a.diag), super_(a.super) {
    if (!a.consistent()) throw std::invalid_argument("tridiagonal matrix has inconsistent array lengths");
    const std::size_t n = diag_.size();
    const double scale = std::max(a.norm_inf(), 1e-300);
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) {
            sub_[i - 1] /= diag_[i - 1];
            diag_[i] -= sub_[i - 1] * super_[i - 1];
        }
        if (!std::isfinite(diag_[i]) || std::abs(diag_[i]) <= 1e-300 * scale || diag_[i] == 0.0) {
            throw SingularPivotError(i, diag_[i]);
        }
    }
}

std::vector<double> TridiagonalFactorization::solve(const std::vector<double>& rhs) const {
    const std::size_t n = diag_.size();
    if (rhs.size() != n) throw std::invalid_argument("thomas_solve: rhs size mismatch");
    std::vector<double> x = rhs;
    for (std::size_t i = 1; i < n; ++i) x[i] -= sub_[i - 1] * x[i - 1];
    for (std::size_t i = n; i-- > 0;) {
        if (i + 1 < n) x[i] -= super_[i] * x[i + 1];
        x[i] /= diag_[i];
    }
    return x;
}

std::vector<double> thomas_solve(const TridiagonalMatrix& a, const std::vector<double>& rhs) {
    return TridiagonalFactorization(a).solve(rhs);
}

}  // namespace vms
