#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "vms/core_fem.hpp"
#include "vms/spectral_subscale.hpp"
#include "vms/stabilization.hpp"

namespace vms {

// f(x) = a0 + a1 x
struct AffineSource {
    double a0 = 0.0;
    double a1 = 0.0;
};

// gamma U + c U' - mu U'' = f on (0,1), U(0) = left, U(1) = right.
// Solved for U - lift with lift(x) = left + (right - left) x.
struct StationaryProblem {
    double gamma = 0.0;
    double c = 0.0;
    double mu = 1.0;
    AffineSource source{};
    double left = 0.0;
    double right = 1.0;

    void validate() const;
    // source of the homogeneous problem after subtracting the lift
    AffineSource lifted_source() const;
};

enum class InitialKind { box, eigenmode, zero, nodal };

struct InitialData {
    InitialKind kind = InitialKind::box;
    std::vector<double> nodal;  // used when kind == nodal
};

// U_t + c U' - mu U'' = f on (0,1) x (0,T], homogeneous Dirichlet data.
struct EvolutiveProblem {
    double c = 0.0;
    double mu = 1.0;
    double k = 1e-3;
    double T = 1e-3;
    AffineSource source{};
    InitialData initial{};

    void validate() const;
    int steps() const;
};

// Element representation of the initial field. The box 1_{|x-0.45|<=0.25} enters through its
// exact element averages, the smooth mode exp(c x/(2 mu)) sin(pi x) through its nodal interpolant.
ElementField initial_element_field(const EvolutiveProblem& p, const Mesh1D& mesh);
std::vector<double> initial_nodal_field(const EvolutiveProblem& p, const Mesh1D& mesh);

struct Galerkin {};
struct SpectralVMS {
    int M = 1;
};
// nullopt M: exact tau from the bubble
struct TauVMS {
    std::optional<int> M;
};
using SolverMode = std::variant<Galerkin, SpectralVMS, TauVMS>;

std::string describe(const SolverMode& mode);
void validate(const SolverMode& mode);

struct TrajectoryMetadata {
    std::string mode;
    int n_elements = 0;
    double c = 0.0, mu = 0.0, k = 0.0, T = 0.0;
};

struct SolutionTrajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> fields;  // full nodal vectors, boundary included
    TrajectoryMetadata metadata;

    std::size_t n_levels() const { return times.size(); }
};

class StepFailure : public std::runtime_error {
public:
    StepFailure(int step, const std::string& what);
    int step() const { return step_; }

private:
    int step_;
};

std::vector<double> solve_stationary(const StationaryProblem& problem, const Mesh1D& mesh, const SolverMode& mode);

// Backward Euler stepper; the time-independent system is assembled and factored once.
class EvolutiveStepper {
public:
    EvolutiveStepper(const EvolutiveProblem& problem, const Mesh1D& mesh, const SolverMode& mode);

    std::vector<double> step(const ElementField& state) const;
    std::vector<double> step(const std::vector<double>& nodal_state) const;
    double tau() const { return tau_; }

private:
    Mesh1D mesh_;
    EvolutiveProblem problem_;
    bool tau_form_ = false;
    double tau_ = 0.0;
    std::vector<ElementSpectralBasis> bases_;
    ElementField kf_;
    std::optional<TridiagonalFactorization> lu_;
};

std::vector<double> step_evolutive(const ElementField& state, const EvolutiveProblem& problem, const Mesh1D& mesh,
                                   const SolverMode& mode);
std::vector<double> step_evolutive(const std::vector<double>& state, const EvolutiveProblem& problem,
                                   const Mesh1D& mesh, const SolverMode& mode);
std::vector<double> step_evolutive_tau(const ElementField& state, const EvolutiveProblem& problem, const Mesh1D& mesh,
                                       double tau);

SolutionTrajectory solve_evolutive(const EvolutiveProblem& problem, const Mesh1D& mesh, const SolverMode& mode);

}  // namespace vms
