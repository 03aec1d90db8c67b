#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace vms {

class Mesh1D {
public:
    explicit Mesh1D(int n_elements);

    int n_elements() const { return n_; }
    int n_nodes() const { return n_ + 1; }
    int n_interior() const { return n_ - 1; }
    double h() const { return h_; }
    const std::vector<double>& nodes() const { return nodes_; }
    double node(int i) const { return nodes_[i]; }
    double x_left(int e) const { return nodes_[e]; }
    double x_right(int e) const { return nodes_[e + 1]; }

private:
    int n_;
    double h_;
    std::vector<double> nodes_;
};

Mesh1D build_mesh(int n_elements);

// Tridiagonal storage for the interior-node system (dimension r-1).
// Row i couples to sub[i-1] (column i-1), diag[i], super[i] (column i+1).
struct TridiagonalMatrix {
    std::vector<double> sub, diag, super;

    TridiagonalMatrix() = default;
    explicit TridiagonalMatrix(std::size_t n);

    std::size_t size() const { return diag.size(); }
    bool consistent() const;

    TridiagonalMatrix transposed() const;
    std::vector<double> apply(const std::vector<double>& x) const;
    double norm_inf() const;

    TridiagonalMatrix& axpy(double a, const TridiagonalMatrix& other);
};

TridiagonalMatrix operator*(double a, const TridiagonalMatrix& m);
TridiagonalMatrix operator+(const TridiagonalMatrix& a, const TridiagonalMatrix& b);

struct GalerkinMatrices {
    TridiagonalMatrix mass;
    TridiagonalMatrix convection;  // row l, column m: (phi_m', phi_l)
    TridiagonalMatrix stiffness;
};

GalerkinMatrices assemble_galerkin(const Mesh1D& mesh);

// gamma*mass + c*convection + mu*stiffness
TridiagonalMatrix combine(const GalerkinMatrices& g, double gamma, double c, double mu);

// Element data that is affine on each element but may jump across nodes.
// left[e], right[e] are the one-sided values at the endpoints of element e.
struct ElementField {
    std::vector<double> left, right;

    static ElementField zero(int n_elements);
    static ElementField from_nodal(const std::vector<double>& nodal);
    // Interpolates an affine-in-x function f(x) = a0 + a1 x exactly.
    static ElementField affine(const Mesh1D& mesh, double a0, double a1);

    std::size_t n_elements() const { return left.size(); }
    ElementField& axpy(double a, const ElementField& other);
};

// Interior-node vector of (g, phi_l), exact for element-affine g.
std::vector<double> load_vector(const Mesh1D& mesh, const ElementField& g);

// Interior-node vector of (g, phi_l') for element-affine g.
std::vector<double> derivative_load_vector(const Mesh1D& mesh, const ElementField& g);

// Load for the lifted stationary problem, source f(x) = -gamma x - c.
std::vector<double> galerkin_load_stationary(const Mesh1D& mesh, double gamma, double c);

class SingularPivotError : public std::runtime_error {
public:
    SingularPivotError(std::size_t index, double pivot);
    std::size_t index() const { return index_; }

private:
    std::size_t index_;
};

// LU factors of a tridiagonal matrix without pivoting; reused across solves.
class TridiagonalFactorization {
public:
    explicit TridiagonalFactorization(const TridiagonalMatrix& a);
    std::vector<double> solve(const std::vector<double>& rhs) const;
    std::size_t size() const { return diag_.size(); }

private:
    std::vector<double> sub_, diag_, super_;  // diag_ holds the pivots
};

std::vector<double> thomas_solve(const TridiagonalMatrix& a, const std::vector<double>& rhs);

}  // namespace vms
