#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "vms/core_fem.hpp"
#include "vms/solvers.hpp"

namespace vms {

// Solution of gamma U + c U' - mu U'' = 0, U(0) = 0, U(1) = 1.
double exact_stationary(double x, double gamma, double c, double mu);

// exp(c x/(2 mu) - lambda t) sin(pi x), lambda = mu pi^2 + c^2/(4 mu): solves U_t + c U' - mu U'' = 0.
double exact_evolutive_mode(double x, double t, double c, double mu);
// Same mode advanced by n backward Euler steps of size k without spatial error.
double exact_evolutive_mode_rothe(double x, int n, double k, double c, double mu);

enum class Comparison { fine, nodal };
std::string to_string(Comparison c);

// L2 norm and H1 seminorm of the piecewise-affine function with nodal values e on uniform nodes.
struct FieldNorms {
    double l2 = 0.0;
    double h1 = 0.0;
    double max = 0.0;
};
FieldNorms p1_norms(const std::vector<double>& e);

struct StepError {
    double t = 0.0;
    double l2 = 0.0;
    double h1 = 0.0;
    double nodal_max = 0.0;
};

struct ErrorReport {
    double linf_l2 = 0.0;
    double l2_h1 = 0.0;
    double nodal_max = 0.0;
    std::vector<StepError> per_step;
};

// Reference value at position x, time level n, time t.
using ReferenceFunction = std::function<double(double x, int n, double t)>;

inline constexpr int fine_refinement = 10;

// Single-level trajectories are treated as stationary fields (unit time weight);
// otherwise levels 1..N are compared with weights t_n - t_{n-1}.
ErrorReport error_norms(const SolutionTrajectory& traj, const ReferenceFunction& reference, Comparison cmp);
// The reference trajectory lives on a mesh refined by an integer factor (1 allowed for nodal comparison).
ErrorReport error_norms(const SolutionTrajectory& traj, const SolutionTrajectory& reference, Comparison cmp);

// Max of |u_h - f| sampled densely inside each element.
double dense_max_error(const std::vector<double>& u, const std::function<double(double)>& f,
                       int samples_per_element = 50);

struct SlopeFit {
    double slope = 0.0;
    std::vector<double> pairwise;
};
SlopeFit convergence_slope(const std::vector<double>& params, const std::vector<double>& errors);

struct ConvergenceStudy {
    std::string parameter;  // h, k or M
    std::vector<double> samples;
    std::vector<std::string> norms;
    std::vector<std::vector<double>> errors;  // errors[norm][sample]
    std::vector<SlopeFit> fits;

    void fit();
    void validate() const;
    const SlopeFit& fit_for(const std::string& norm) const;
};

struct CflQuantities {
    double peclet = 0.0;  // h |c| / (2 mu)
    double cfl = 0.0;     // |c| k / h
    double cfl_bound = 0.0;
    bool bound_applicable = true;
};
CflQuantities cfl_quantities(double c, double mu, double h, double k);

double total_variation(const std::vector<double>& u);

struct OvershootBounds {
    double lo = 0.0;
    double hi = 1.0;
    double tv = std::numeric_limits<double>::infinity();  // reference total variation
    static OvershootBounds of(const std::vector<double>& u0);
};
double overshoot_metric(const std::vector<double>& u, const OvershootBounds& bounds);

}  // namespace vms
