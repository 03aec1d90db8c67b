#include "vms/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vms {

double exact_stationary(double x, double gamma, double c, double mu) {
    if (!(mu > 0.0)) throw std::invalid_argument("mu must be positive");
    const double rho = std::sqrt(c * c + 4.0 * gamma * mu) / mu;
    if (rho < 1e-300) return x;
    // e^{(c/mu - rho)(x-1)/2} (e^{rho x} - 1)/(e^rho - 1) with e^{rho} factored out
    const double ex = std::exp(0.5 * (c / mu - rho) * (x - 1.0) + rho * (x - 1.0));
    return ex * std::expm1(-rho * x) / std::expm1(-rho);
}

double exact_evolutive_mode(double x, double t, double c, double mu) {
    const double pi = std::numbers::pi;
    const double lambda = mu * pi * pi + c * c / (4.0 * mu);
    return std::exp(c * x / (2.0 * mu) - lambda * t) * std::sin(pi * x);
}

double exact_evolutive_mode_rothe(double x, int n, double k, double c, double mu) {
    const double pi = std::numbers::pi;
    const double lambda = mu * pi * pi + c * c / (4.0 * mu);
    return std::exp(c * x / (2.0 * mu) - n * std::log1p(k * lambda)) * std::sin(pi * x);
}

std::string to_string(Comparison c) { return c == Comparison::fine ? "fine" : "nodal"; }

FieldNorms p1_norms(const std::vector<double>& e) {
    FieldNorms r;
    if (e.size() < 2) throw std::invalid_argument("p1_norms needs at least two nodal values");
    const double h = 1.0 / static_cast<double>(e.size() - 1);
    double l2 = 0.0, h1 = 0.0;
    for (std::size_t i = 0; i + 1 < e.size(); ++i) {
        const double a = e[i], b = e[i + 1];
        l2 += h * (a * a + a * b + b * b) / 3.0;
        h1 += (b - a) * (b - a) / h;
    }
    for (double v : e) r.max = std::max(r.max, std::abs(v));
    r.l2 = std::sqrt(l2);
    r.h1 = std::sqrt(h1);
    return r;
}

namespace {

std::vector<double> refine_p1(const std::vector<double>& u, int factor) {
    const std::size_t n = u.size() - 1;
    std::vector<double> r(n * factor + 1);
    for (std::size_t e = 0; e < n; ++e) {
        for (int s = 0; s < factor; ++s) {
            const double t = static_cast<double>(s) / factor;
            r[e * factor + s] = (1.0 - t) * u[e] + t * u[e + 1];
        }
    }
    r.back() = u.back();
    return r;
}

ErrorReport accumulate(const SolutionTrajectory& traj,
                       const std::function<std::vector<double>(std::size_t level)>& difference) {
    ErrorReport rep;
    const std::size_t L = traj.n_levels();
    if (L == 0) throw std::invalid_argument("empty trajectory");
    const std::size_t first = (L == 1) ? 0 : 1;
    double acc = 0.0;
    for (std::size_t n = first; n < L; ++n) {
        const FieldNorms f = p1_norms(difference(n));
        const double w = (L == 1) ? 1.0 : traj.times[n] - traj.times[n - 1];
        rep.per_step.push_back({traj.times[n], f.l2, f.h1, f.max});
        rep.linf_l2 = std::max(rep.linf_l2, f.l2);
        rep.nodal_max = std::max(rep.nodal_max, f.max);
        acc += w * f.h1 * f.h1;
    }
    rep.l2_h1 = std::sqrt(acc);
    return rep;
}

}  // namespace

ErrorReport error_norms(const SolutionTrajectory& traj, const ReferenceFunction& reference, Comparison cmp) {
    return accumulate(traj, [&](std::size_t n) {
        const std::vector<double>& u = traj.fields[n];
        const std::vector<double> v = cmp == Comparison::fine ? refine_p1(u, fine_refinement) : u;
        const double m = static_cast<double>(v.size() - 1);
        std::vector<double> e(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) e[i] = v[i] - reference(i / m, static_cast<int>(n), traj.times[n]);
        return e;
    });
}

ErrorReport error_norms(const SolutionTrajectory& traj, const SolutionTrajectory& reference, Comparison cmp) {
    if (traj.n_levels() != reference.n_levels()) throw std::invalid_argument("error_norms: time grid mismatch");
    for (std::size_t n = 0; n < traj.n_levels(); ++n) {
        if (std::abs(traj.times[n] - reference.times[n]) > 1e-12) {
            throw std::invalid_argument("error_norms: time grid mismatch");
        }
    }
    const std::size_t nc = traj.fields.front().size() - 1;
    const std::size_t nf = reference.fields.front().size() - 1;
    if (nf % nc != 0) throw std::invalid_argument("error_norms: reference mesh is not a refinement");
    const int factor = static_cast<int>(nf / nc);
    if (cmp == Comparison::fine && factor != fine_refinement) {
        throw std::invalid_argument("error_norms: fine comparison needs a reference refined by 10");
    }
    return accumulate(traj, [&](std::size_t n) {
        const std::vector<double>& u = traj.fields[n];
        const std::vector<double>& r = reference.fields[n];
        std::vector<double> e;
        if (cmp == Comparison::fine) {
            e = refine_p1(u, factor);
            for (std::size_t i = 0; i < e.size(); ++i) e[i] -= r[i];
        } else {
            e.resize(u.size());
            for (std::size_t i = 0; i < u.size(); ++i) e[i] = u[i] - r[i * factor];
        }
        return e;
    });
}

double dense_max_error(const std::vector<double>& u, const std::function<double(double)>& f, int samples_per_element) {
    const std::size_t n = u.size() - 1;
    double m = 0.0;
    for (std::size_t e = 0; e < n; ++e) {
        for (int s = 0; s <= samples_per_element; ++s) {
            const double t = static_cast<double>(s) / samples_per_element;
            const double x = (static_cast<double>(e) + t) / static_cast<double>(n);
            m = std::max(m, std::abs((1.0 - t) * u[e] + t * u[e + 1] - f(x)));
        }
    }
    return m;
}

SlopeFit convergence_slope(const std::vector<double>& params, const std::vector<double>& errors) {
    if (params.size() != errors.size()) throw std::invalid_argument("convergence_slope: size mismatch");
    if (params.size() < 3) throw std::invalid_argument("convergence_slope: at least 3 samples required");
    const std::size_t n = params.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(params[i] > 0.0)) throw std::invalid_argument("convergence_slope: parameters must be positive");
        if (!(errors[i] > 0.0)) throw std::invalid_argument("convergence_slope: errors must be positive");
        lx[i] = std::log(params[i]);
        ly[i] = std::log(errors[i]);
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    SlopeFit fit;
    fit.slope = sxy / sxx;
    for (std::size_t i = 0; i + 1 < n; ++i) fit.pairwise.push_back((ly[i + 1] - ly[i]) / (lx[i + 1] - lx[i]));
    return fit;
}

void ConvergenceStudy::validate() const {
    if (samples.size() < 3) throw std::invalid_argument("convergence study needs at least 3 samples");
    bool inc = true, dec = true;
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
        inc = inc && samples[i + 1] > samples[i];
        dec = dec && samples[i + 1] < samples[i];
    }
    if (!inc && !dec) throw std::invalid_argument("convergence study samples must be strictly monotone");
    if (errors.size() != norms.size()) throw std::invalid_argument("convergence study: norms/errors mismatch");
}

void ConvergenceStudy::fit() {
    validate();
    fits.clear();
    for (const auto& e : errors) fits.push_back(convergence_slope(samples, e));
}

const SlopeFit& ConvergenceStudy::fit_for(const std::string& norm) const {
    for (std::size_t i = 0; i < norms.size(); ++i) {
        if (norms[i] == norm) return fits.at(i);
    }
    throw std::out_of_range("no such norm: " + norm);
}

CflQuantities cfl_quantities(double c, double mu, double h, double k) {
    if (!(mu > 0.0) || !(h > 0.0) || !(k > 0.0)) throw std::invalid_argument("cfl_quantities: mu, h, k must be positive");
    CflQuantities q;
    q.peclet = h * std::abs(c) / (2.0 * mu);
    q.cfl = std::abs(c) * k / h;
    q.bound_applicable = q.peclet < 1.0;
    q.cfl_bound = q.bound_applicable ? q.peclet / (3.0 * (1.0 - q.peclet)) : std::numeric_limits<double>::quiet_NaN();
    return q;
}

double total_variation(const std::vector<double>& u) {
    double tv = 0.0;
    for (std::size_t i = 0; i + 1 < u.size(); ++i) tv += std::abs(u[i + 1] - u[i]);
    return tv;
}

OvershootBounds OvershootBounds::of(const std::vector<double>& u0) {
    const auto [lo, hi] = std::minmax_element(u0.begin(), u0.end());
    return {*lo, *hi, total_variation(u0)};
}

double overshoot_metric(const std::vector<double>& u, const OvershootBounds& b) {
    if (u.empty()) return 0.0;
    const auto [lo, hi] = std::minmax_element(u.begin(), u.end());
    double m = std::max(0.0, *hi - b.hi) + std::max(0.0, b.lo - *lo);
    if (std::isfinite(b.tv)) m += std::max(0.0, total_variation(u) - b.tv);
    return m;
}

}  // namespace vms
