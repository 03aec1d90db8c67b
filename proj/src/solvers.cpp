#include "vms/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace vms {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::vector<double> with_boundary(const std::vector<double>& interior, double left, double right) {
    std::vector<double> u(interior.size() + 2);
    u.front() = left;
    std::copy(interior.begin(), interior.end(), u.begin() + 1);
    u.back() = right;
    return u;
}

}  // namespace

void StationaryProblem::validate() const {
    if (!(mu > 0.0)) throw std::invalid_argument("mu must be positive");
    if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be nonnegative");
    if (!std::isfinite(c)) throw std::invalid_argument("c must be finite");
}

AffineSource StationaryProblem::lifted_source() const {
    const double slope = right - left;
    return {source.a0 - gamma * left - c * slope, source.a1 - gamma * slope};
}

void EvolutiveProblem::validate() const {
    if (!(mu > 0.0)) throw std::invalid_argument("mu must be positive");
    if (!std::isfinite(c)) throw std::invalid_argument("c must be finite");
    if (!(k > 0.0)) throw std::invalid_argument("k must be positive");
    if (!(T >= k)) throw std::invalid_argument("T must be at least k");
    const double n = std::round(T / k);
    if (std::abs(n * k - T) > 1e-12) throw std::invalid_argument("T is not an integer multiple of k");
}

int EvolutiveProblem::steps() const { return static_cast<int>(std::round(T / k)); }

namespace {

double box_value(double x) { return std::abs(x - 0.45) <= 0.25 ? 1.0 : 0.0; }

double smooth_mode(double x, double c, double mu) {
    return std::exp(c * x / (2.0 * mu)) * std::sin(std::numbers::pi * x);
}

}  // namespace

ElementField initial_element_field(const EvolutiveProblem& p, const Mesh1D& mesh) {
    const int n = mesh.n_elements();
    switch (p.initial.kind) {
    case InitialKind::zero:
        return ElementField::zero(n);
    case InitialKind::box: {
        ElementField f = ElementField::zero(n);
        for (int e = 0; e < n; ++e) {
            const double a = std::max(mesh.x_left(e), 0.2), b = std::min(mesh.x_right(e), 0.7);
            const double avg = std::max(0.0, b - a) / mesh.h();
            f.left[e] = f.right[e] = avg;
        }
        return f;
    }
    case InitialKind::eigenmode:
    case InitialKind::nodal:
        return ElementField::from_nodal(initial_nodal_field(p, mesh));
    }
    throw std::logic_error("unknown initial kind");
}

std::vector<double> initial_nodal_field(const EvolutiveProblem& p, const Mesh1D& mesh) {
    std::vector<double> u(mesh.n_nodes(), 0.0);
    switch (p.initial.kind) {
    case InitialKind::zero:
        break;
    case InitialKind::box:
        for (int i = 1; i < mesh.n_elements(); ++i) u[i] = box_value(mesh.node(i));
        break;
    case InitialKind::eigenmode:
        for (int i = 1; i < mesh.n_elements(); ++i) u[i] = smooth_mode(mesh.node(i), p.c, p.mu);
        break;
    case InitialKind::nodal:
        if (static_cast<int>(p.initial.nodal.size()) != mesh.n_nodes()) {
            throw std::invalid_argument("initial nodal field has wrong length");
        }
        u = p.initial.nodal;
        u.front() = 0.0;
        u.back() = 0.0;
        break;
    }
    return u;
}

std::string describe(const SolverMode& mode) {
    return std::visit(overloaded{
                          [](const Galerkin&) { return std::string("galerkin"); },
                          [](const SpectralVMS& s) { return "spectral-vms:" + std::to_string(s.M); },
                          [](const TauVMS& t) {
                              return t.M ? "tau-vms:" + std::to_string(*t.M) : std::string("tau-vms:exact");
                          },
                      },
                      mode);
}

void validate(const SolverMode& mode) {
    if (const auto* s = std::get_if<SpectralVMS>(&mode); s && s->M < 1) {
        throw std::invalid_argument("spectral-vms needs M >= 1");
    }
    if (const auto* t = std::get_if<TauVMS>(&mode); t && t->M && *t->M < 1) {
        throw std::invalid_argument("tau-vms needs M >= 1");
    }
}

StepFailure::StepFailure(int step, const std::string& what)
    : std::runtime_error("step " + std::to_string(step) + ": " + what), step_(step) {}

std::vector<double> solve_stationary(const StationaryProblem& problem, const Mesh1D& mesh, const SolverMode& mode) {
    problem.validate();
    validate(mode);
    if (std::holds_alternative<TauVMS>(mode)) {
        throw std::invalid_argument("tau-vms is only defined for the evolutive problem");
    }
    const int M = std::holds_alternative<SpectralVMS>(mode) ? std::get<SpectralVMS>(mode).M : 0;
    const OperatorScaling scaling = OperatorScaling::stationary(problem.gamma, problem.c, problem.mu);
    const AffineSource f = problem.lifted_source();
    const ElementField data = ElementField::affine(mesh, f.a0, f.a1);

    TridiagonalMatrix A = combine(assemble_galerkin(mesh), scaling.gamma_eff, scaling.c_eff, scaling.mu_eff);
    std::vector<double> b = load_vector(mesh, data);
    if (M > 0) {
        const auto bases = build_bases(mesh, scaling, M);
        const StabilizationBlocks s = assemble_stabilization(mesh, bases, data);
        A.axpy(1.0, s.system_contribution(scaling));
        const auto bs = s.rhs();
        for (std::size_t i = 0; i < b.size(); ++i) b[i] += bs[i];
    }
    std::vector<double> u = with_boundary(thomas_solve(A, b), 0.0, 0.0);
    for (int i = 0; i < mesh.n_nodes(); ++i) u[i] += problem.left + (problem.right - problem.left) * mesh.node(i);
    u.front() = problem.left;
    u.back() = problem.right;
    return u;
}

EvolutiveStepper::EvolutiveStepper(const EvolutiveProblem& problem, const Mesh1D& mesh, const SolverMode& mode)
    : mesh_(mesh), problem_(problem) {
    problem.validate();
    validate(mode);
    const double k = problem.k, c = problem.c, mu = problem.mu;
    kf_ = ElementField::affine(mesh, k * problem.source.a0, k * problem.source.a1);
    const GalerkinMatrices g = assemble_galerkin(mesh);

    if (const auto* t = std::get_if<TauVMS>(&mode)) {
        tau_form_ = true;
        tau_ = t->M ? tau_truncated(ElementSpectralBasis(0.0, mesh.h(), OperatorScaling::evolutive(k, c, mu), *t->M))
                    : tau_exact(k, c, mu, mesh.h());
        TridiagonalMatrix A(mesh.n_interior());
        A.axpy(1.0 - tau_, g.mass)
            .axpy((1.0 - tau_) * k * c, g.convection)
            .axpy(k * mu + tau_ * k * k * c * c, g.stiffness)
            .axpy(tau_ * k * c, g.convection.transposed());
        lu_.emplace(A);
        return;
    }

    const OperatorScaling scaling = OperatorScaling::evolutive(k, c, mu);
    TridiagonalMatrix A = combine(g, scaling.gamma_eff, scaling.c_eff, scaling.mu_eff);
    if (const auto* s = std::get_if<SpectralVMS>(&mode)) {
        bases_ = build_bases(mesh, scaling, s->M);
        A.axpy(1.0, assemble_stabilization(mesh, bases_).system_contribution(scaling));
    }
    lu_.emplace(A);
}

std::vector<double> EvolutiveStepper::step(const ElementField& state) const {
    ElementField data = state;
    data.axpy(1.0, kf_);
    std::vector<double> b;
    if (tau_form_) {
        b = load_vector(mesh_, data);
        const auto d = derivative_load_vector(mesh_, data);
        const double w = tau_ * problem_.k * problem_.c;
        for (std::size_t i = 0; i < b.size(); ++i) b[i] = (1.0 - tau_) * b[i] + w * d[i];
    } else {
        b = load_vector(mesh_, data);
        if (!bases_.empty()) {
            const auto bs = stabilization_rhs(mesh_, bases_, data);
            for (std::size_t i = 0; i < b.size(); ++i) b[i] += bs[i];
        }
    }
    return with_boundary(lu_->solve(b), 0.0, 0.0);
}

std::vector<double> EvolutiveStepper::step(const std::vector<double>& nodal_state) const {
    return step(ElementField::from_nodal(nodal_state));
}

std::vector<double> step_evolutive(const ElementField& state, const EvolutiveProblem& problem, const Mesh1D& mesh,
                                   const SolverMode& mode) {
    return EvolutiveStepper(problem, mesh, mode).step(state);
}

std::vector<double> step_evolutive(const std::vector<double>& state, const EvolutiveProblem& problem,
                                   const Mesh1D& mesh, const SolverMode& mode) {
    return step_evolutive(ElementField::from_nodal(state), problem, mesh, mode);
}

std::vector<double> step_evolutive_tau(const ElementField& state, const EvolutiveProblem& problem, const Mesh1D& mesh,
                                       double tau) {
    problem.validate();
    const double k = problem.k, c = problem.c, mu = problem.mu;
    const GalerkinMatrices g = assemble_galerkin(mesh);
    TridiagonalMatrix A(mesh.n_interior());
    A.axpy(1.0 - tau, g.mass)
        .axpy((1.0 - tau) * k * c, g.convection)
        .axpy(k * mu + tau * k * k * c * c, g.stiffness)
        .axpy(tau * k * c, g.convection.transposed());
    ElementField data = state;
    data.axpy(1.0, ElementField::affine(mesh, k * problem.source.a0, k * problem.source.a1));
    std::vector<double> b = load_vector(mesh, data);
    const auto d = derivative_load_vector(mesh, data);
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = (1.0 - tau) * b[i] + tau * k * c * d[i];
    return with_boundary(thomas_solve(A, b), 0.0, 0.0);
}

SolutionTrajectory solve_evolutive(const EvolutiveProblem& problem, const Mesh1D& mesh, const SolverMode& mode) {
    problem.validate();
    SolutionTrajectory traj;
    traj.metadata = {describe(mode), mesh.n_elements(), problem.c, problem.mu, problem.k, problem.T};
    const int N = problem.steps();
    traj.times.reserve(N + 1);
    traj.fields.reserve(N + 1);
    traj.times.push_back(0.0);
    traj.fields.push_back(initial_nodal_field(problem, mesh));

    std::optional<EvolutiveStepper> stepper;
    try {
        stepper.emplace(problem, mesh, mode);
    } catch (const SingularPivotError& e) {
        throw StepFailure(1, e.what());
    }
    ElementField state = initial_element_field(problem, mesh);
    for (int n = 1; n <= N; ++n) {
        std::vector<double> u;
        try {
            u = stepper->step(state);
        } catch (const std::exception& e) {
            throw StepFailure(n, e.what());
        }
        for (double v : u) {
            if (!std::isfinite(v)) throw StepFailure(n, "non-finite nodal value");
        }
        state = ElementField::from_nodal(u);
        traj.times.push_back(n * problem.k);
        traj.fields.push_back(std::move(u));
    }
    return traj;
}

}  // namespace vms
