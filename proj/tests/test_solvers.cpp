#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "vms/analysis.hpp"
#include "vms/solvers.hpp"

using namespace vms;

namespace {

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double max_abs(const std::vector<double>& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

double nodal_error(const std::vector<double>& u, double gamma, double c, double mu) {
    const double h = 1.0 / (u.size() - 1);
    double m = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) m = std::max(m, std::abs(u[i] - exact_stationary(i * h, gamma, c, mu)));
    return m;
}

EvolutiveProblem box_problem(double c, double k, int steps) {
    EvolutiveProblem p;
    p.c = c;
    p.mu = 1;
    p.k = k;
    p.T = k * steps;
    p.initial.kind = InitialKind::box;
    return p;
}

// largest overshoot over levels 1..N against the initial field
double worst_overshoot(const SolutionTrajectory& t) {
    const auto b = OvershootBounds::of(t.fields.front());
    double m = 0.0;
    for (std::size_t n = 1; n < t.fields.size(); ++n) m = std::max(m, overshoot_metric(t.fields[n], b));
    return m;
}

}  // namespace

TEST_CASE("poisson nodal exactness") {
    StationaryProblem p;
    p.gamma = 0;
    p.c = 0;
    p.mu = 1;
    p.source = {1.0, 0.0};
    p.right = 0.0;
    const Mesh1D m(17);
    const auto u = solve_stationary(p, m, Galerkin{});
    for (int i = 0; i <= 17; ++i) CHECK(std::abs(u[i] - m.node(i) * (1 - m.node(i)) / 2) <= 1e-10);
}

TEST_CASE("boundary data are reproduced exactly") {
    StationaryProblem p{2.0, 30.0, 0.5, {1.0, -3.0}, 0.3, -1.7};
    for (const SolverMode& mode : {SolverMode{Galerkin{}}, SolverMode{SpectralVMS{7}}}) {
        const auto u = solve_stationary(p, Mesh1D(20), mode);
        CHECK(u.front() == 0.3);
        CHECK(u.back() == -1.7);
    }
    const auto t = solve_evolutive(box_problem(1000, 1e-3, 5), Mesh1D(50), SpectralVMS{15});
    for (const auto& f : t.fields) {
        CHECK(f.front() == 0.0);
        CHECK(f.back() == 0.0);
    }
}

TEST_CASE("odd truncations are monotone for strong convection") {
    StationaryProblem p{1.0, 400.0, 1.0};
    const Mesh1D m(40);
    for (int M = 1; M <= 41; M += 2) {
        CAPTURE(M);
        const auto u = solve_stationary(p, m, SpectralVMS{M});
        for (std::size_t i = 1; i < u.size(); ++i) CHECK(u[i] >= u[i - 1] - 1e-12);
        CHECK(*std::min_element(u.begin(), u.end()) >= -1e-6);
        CHECK(*std::max_element(u.begin(), u.end()) <= 1 + 1e-6);
    }
    // even truncations undershoot next to the layer
    const auto u2 = solve_stationary(p, m, SpectralVMS{2});
    CHECK(*std::min_element(u2.begin(), u2.end()) < -0.1);
}

TEST_CASE("reaction dominated nodal accuracy improves with M") {
    StationaryProblem p{1000.0, 1.0, 1.0};
    const Mesh1D m(40);
    const double eg = nodal_error(solve_stationary(p, m, Galerkin{}), 1000, 1, 1);
    const double e41 = nodal_error(solve_stationary(p, m, SpectralVMS{41}), 1000, 1, 1);
    CHECK(e41 * 5 <= eg);
    double prev = eg;
    for (int M : {1, 3, 9, 21, 41}) {
        const double e = nodal_error(solve_stationary(p, m, SpectralVMS{M}), 1000, 1, 1);
        CHECK(e < prev);
        prev = e;
    }
}

TEST_CASE("empty mode set reduces to galerkin") {
    const Mesh1D m(30);
    StationaryProblem p{3.0, 50.0, 1.0, {0.5, 2.0}};
    const auto g = combine(assemble_galerkin(m), p.gamma, p.c, p.mu);
    const auto sc = OperatorScaling::stationary(p.gamma, p.c, p.mu);
    const auto f = p.lifted_source();
    const auto data = ElementField::affine(m, f.a0, f.a1);
    const auto s = assemble_stabilization(m, build_bases(m, sc, 0), data);
    auto b = load_vector(m, data);
    const auto rs = s.rhs();
    for (std::size_t i = 0; i < b.size(); ++i) b[i] += rs[i];
    const auto interior = thomas_solve(g + s.system_contribution(sc), b);
    const auto ref = solve_stationary(p, m, Galerkin{});
    for (int i = 1; i < 30; ++i) CHECK(std::abs(interior[i - 1] + m.node(i) - ref[i]) <= 1e-12);

    // evolutive step
    const auto ep = box_problem(200, 1e-3, 1);
    const auto es = OperatorScaling::evolutive(ep.k, ep.c, ep.mu);
    const auto u0 = initial_element_field(ep, m);
    const auto se = assemble_stabilization(m, build_bases(m, es, 0), u0);
    const auto ge = combine(assemble_galerkin(m), 1.0, ep.k * ep.c, ep.k * ep.mu);
    auto be = load_vector(m, u0);
    const auto rse = se.rhs();
    for (std::size_t i = 0; i < be.size(); ++i) be[i] += rse[i];
    const auto ie = thomas_solve(ge + se.system_contribution(es), be);
    const auto refe = step_evolutive(u0, ep, m, Galerkin{});
    for (int i = 1; i < 30; ++i) CHECK(std::abs(ie[i - 1] - refe[i]) <= 1e-12);
}

TEST_CASE("zero data stays zero") {
    EvolutiveProblem p = box_problem(300, 1e-3, 4);
    p.initial.kind = InitialKind::zero;
    for (const SolverMode& mode : {SolverMode{Galerkin{}}, SolverMode{SpectralVMS{6}}, SolverMode{TauVMS{}}}) {
        const auto t = solve_evolutive(p, Mesh1D(25), mode);
        CHECK(t.n_levels() == 5);
        for (const auto& f : t.fields) CHECK(max_abs(f) == 0.0);
    }
}

TEST_CASE("symmetric galerkin steps do not increase the L2 norm") {
    const auto t = solve_evolutive(box_problem(0, 1e-3, 20), Mesh1D(50), Galerkin{});
    for (std::size_t n = 1; n < t.fields.size(); ++n) CHECK(p1_norms(t.fields[n]).l2 <= p1_norms(t.fields[n - 1]).l2);
}

TEST_CASE("wiggles: odd versus even and galerkin") {
    const Mesh1D m(50);
    const auto p = box_problem(1000, 1e-3, 5);
    const double o15 = worst_overshoot(solve_evolutive(p, m, SpectralVMS{15}));
    const double o14 = worst_overshoot(solve_evolutive(p, m, SpectralVMS{14}));
    const auto g = solve_evolutive(p, m, Galerkin{});
    const double og = worst_overshoot(g);
    CHECK(overshoot_metric(g.fields[1], OvershootBounds::of(g.fields[0])) > 1e-2);
    CHECK(o15 < 1e-3);
    CHECK(o14 > o15);
    CHECK(og > 1e-2);
}

TEST_CASE("single step trajectory equals one step") {
    const Mesh1D m(40);
    const auto p = box_problem(400, 1e-4, 1);
    for (const SolverMode& mode : {SolverMode{Galerkin{}}, SolverMode{SpectralVMS{5}}, SolverMode{TauVMS{9}}}) {
        const auto t = solve_evolutive(p, m, mode);
        REQUIRE(t.n_levels() == 2);
        CHECK(t.fields[1] == step_evolutive(initial_element_field(p, m), p, m, mode));
        CHECK(t.times[1] == doctest::Approx(1e-4));
    }
}

TEST_CASE("first step nodal accuracy against a fine reference") {
    const auto p = box_problem(400, 1e-5, 1);
    const Mesh1D coarse(50), fine(500);
    const auto ref = solve_evolutive(p, fine, Galerkin{});
    const auto g = solve_evolutive(p, coarse, Galerkin{});
    const auto s = solve_evolutive(p, coarse, SpectralVMS{5});
    const double eg = error_norms(g, ref, Comparison::nodal).nodal_max;
    const double es = error_norms(s, ref, Comparison::nodal).nodal_max;
    CHECK(es <= 0.2 * eg);
}

TEST_CASE("small CFL pathology") {
    const Mesh1D m(100);
    const auto cfl = cfl_quantities(20, 1, m.h(), 1.0);
    const double k = 0.5 * cfl.cfl_bound * m.h() / 20;
    CHECK(k == doctest::Approx(9.2593e-6).epsilon(1e-4));
    const auto p = box_problem(20, k, 5);
    CHECK(worst_overshoot(solve_evolutive(p, m, Galerkin{})) > 1e-2);
    CHECK(worst_overshoot(solve_evolutive(p, m, SpectralVMS{11})) < 1e-3);
}

TEST_CASE("tau form with zero tau is galerkin") {
    const Mesh1D m(40);
    auto p = box_problem(500, 2e-3, 1);
    p.source = {1.0, -2.0};
    const auto u0 = initial_element_field(p, m);
    CHECK(max_diff(step_evolutive_tau(u0, p, m, 0.0), step_evolutive(u0, p, m, Galerkin{})) <= 1e-12);
}

TEST_CASE("truncated tau form approaches the exact tau form") {
    const Mesh1D m(50);
    const auto p = box_problem(1000, 1e-3, 5);
    const auto exact = solve_evolutive(p, m, TauVMS{});
    double prev = 1e300;
    double d41 = 0.0;
    for (int M : {41, 81, 161, 321}) {
        const auto t = solve_evolutive(p, m, TauVMS{M});
        double d = 0.0;
        for (std::size_t n = 0; n < t.fields.size(); ++n) d = std::max(d, max_diff(t.fields[n], exact.fields[n]));
        if (M == 41) d41 = d;
        CHECK(d < prev);
        prev = d;
    }
    MESSAGE("tau-form difference at M=41: " << d41);
    CHECK(prev <= 1e-6);
}

TEST_CASE("matrix and tau forms agree to first order on smooth data") {
    EvolutiveProblem p;
    p.c = 1;
    p.mu = 1;
    p.k = 1e-3;
    p.T = 1e-2;
    p.initial.kind = InitialKind::eigenmode;
    for (int n : {20, 50}) {
        const Mesh1D m(n);
        for (int M : {1, 10}) {
            const auto a = solve_evolutive(p, m, SpectralVMS{M});
            const auto b = solve_evolutive(p, m, TauVMS{M});
            for (std::size_t l = 1; l < a.fields.size(); ++l) {
                CHECK(max_diff(a.fields[l], b.fields[l]) <= 0.5 * m.h() * max_abs(a.fields[l]));
            }
        }
    }
}

TEST_CASE("discrete maximum principle for odd truncations") {
    for (auto [g, c] : {std::pair{1.0, 400.0}, {1000.0, 1.0}}) {
        for (int M : {3, 15}) {
            const auto u = solve_stationary(StationaryProblem{g, c, 1.0}, Mesh1D(40), SpectralVMS{M});
            CHECK(*std::min_element(u.begin(), u.end()) >= -1e-12);
            CHECK(*std::max_element(u.begin(), u.end()) <= 1 + 1e-6);
        }
    }
    struct Run {
        double c, k;
        int n, M;
    };
    const double k_hauke = 0.5 * cfl_quantities(20, 1, 0.01, 1).cfl_bound * 0.01 / 20;
    for (const Run& r : {Run{1000, 1e-3, 50, 15}, Run{400, 1e-5, 50, 5}, Run{20, k_hauke, 100, 11}}) {
        const auto t = solve_evolutive(box_problem(r.c, r.k, 5), Mesh1D(r.n), SpectralVMS{r.M});
        const auto& u0 = t.fields.front();
        const double lo = *std::min_element(u0.begin(), u0.end()), hi = *std::max_element(u0.begin(), u0.end());
        for (const auto& f : t.fields) {
            CHECK(*std::min_element(f.begin(), f.end()) >= lo - 1e-6);
            CHECK(*std::max_element(f.begin(), f.end()) <= hi + 1e-6);
        }
    }
}

TEST_CASE("runs are deterministic") {
    const auto p = box_problem(1000, 1e-3, 5);
    const Mesh1D m(50);
    for (const SolverMode& mode : {SolverMode{SpectralVMS{15}}, SolverMode{TauVMS{}}}) {
        const auto a = solve_evolutive(p, m, mode);
        const auto b = solve_evolutive(p, m, mode);
        CHECK(a.fields == b.fields);
        CHECK(a.times == b.times);
    }
    StationaryProblem s{1.0, 400.0, 1.0};
    CHECK(solve_stationary(s, Mesh1D(40), SpectralVMS{15}) == solve_stationary(s, Mesh1D(40), SpectralVMS{15}));
}

TEST_CASE("input validation") {
    StationaryProblem s{1.0, 1.0, 0.0};
    CHECK_THROWS_AS(solve_stationary(s, Mesh1D(10), Galerkin{}), std::invalid_argument);
    s.mu = 1;
    CHECK_THROWS_AS(solve_stationary(s, Mesh1D(10), SpectralVMS{0}), std::invalid_argument);
    CHECK_THROWS_AS(solve_stationary(s, Mesh1D(10), TauVMS{}), std::invalid_argument);

    auto p = box_problem(1, 1e-3, 5);
    p.T = 4.5e-3;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.T = 5e-4;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = box_problem(1, 1e-3, 5);
    CHECK(p.steps() == 5);
    p.k = 0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    CHECK_THROWS_AS(solve_evolutive(box_problem(1, 1e-3, 2), Mesh1D(10), TauVMS{0}), std::invalid_argument);

    CHECK(describe(Galerkin{}) == "galerkin");
    CHECK(describe(SpectralVMS{14}) == "spectral-vms:14");
    CHECK(describe(TauVMS{7}) == "tau-vms:7");
    CHECK(describe(TauVMS{}) == "tau-vms:exact");
}

TEST_CASE("step failures carry the step index") {
    const StepFailure f(3, "boom");
    CHECK(f.step() == 3);
    CHECK(std::string(f.what()).find("step 3") != std::string::npos);
}
