#pragma once

// Exact starting solutions at kappa = 0: T-periodic solutions of
//     (phi(u'))' + lambda u' = e(t)
// with prescribed mean xi.

#include "phicont/error.hpp"
#include "phicont/ivp.hpp"
#include "phicont/model.hpp"
#include "phicont/periodic_function.hpp"

#include <cmath>
#include <functional>
#include <string>

namespace phicont {

struct BaseSolutionReport {
    enum class Case { lambda_zero, lambda_positive };

    PeriodicFunction u;
    PeriodicFunction uprime;
    Case case_tag = Case::lambda_zero;
    /// C0 of the integrated equation (lambda = 0) or the Poincare fixed point p0 (lambda > 0).
    double constant = 0.0;
    double residual = 0.0;        ///< sup |(phi(u'))' + lambda u' - e| on nodes
    double fixed_point_defect = 0.0; ///< |p(T, p0) - p0|, lambda > 0 only
    double mean_error = 0.0;      ///< |mean(u) - xi|
    double uprime_mean = 0.0;
    double apriori_bound = 0.0;   ///< alpha = psi(int |e - lambda u'|) >= sup |u'|
};

struct BaseSolverOptions {
    IvpOptions ivp{1e-12, 1e-14};
    double bisection_width = 1e-12;
};

namespace detail {

inline PeriodicFunction sample_forcing(const ProblemSpec& spec) {
    return PeriodicFunction::sample(PeriodicGrid(spec.T, spec.grid_size), [&](double t) { return spec.e(t); });
}

/// Finds the root of an increasing function by bisection on [lo, hi] followed
/// by two secant steps.
inline double increasing_root(const std::function<double(double)>& fn, double lo, double hi, double width) {
    double flo = fn(lo), fhi = fn(hi);
    while (hi - lo > width) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = fn(mid);
        if (fm == 0.0) return mid;
        if (fm < 0.0) lo = mid, flo = fm;
        else hi = mid, fhi = fm;
    }
    double x0 = lo, f0 = flo, x1 = hi, f1 = fhi;
    double best = std::abs(flo) < std::abs(fhi) ? lo : hi;
    for (int i = 0; i < 2 && f1 != f0; ++i) {
        const double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if (!(x2 >= lo - width && x2 <= hi + width)) break;
        x0 = x1, f0 = f1;
        x1 = x2, f1 = fn(x2);
        if (std::abs(f1) <= std::abs(fn(best))) best = x1;
    }
    return best;
}

inline void finish_report(BaseSolutionReport& r, const ProblemSpec& spec, const PeriodicFunction& e,
                          double xi) {
    r.u = antiderivative(r.uprime) + xi;
    r.mean_error = std::abs(mean(r.u) - xi);
    r.uprime_mean = mean(r.uprime);

    const auto w = r.uprime.map([&](double z) { return spec.phi.phi(z); });
    const auto lhs = derivative(w, 1) + spec.lambda * r.uprime;
    r.residual = (lhs - e).sup_on_nodes();

    const auto drive = e - spec.lambda * r.uprime;
    r.apriori_bound = spec.phi.psi(integral(drive.map([](double v) { return std::abs(v); })));
}

} // namespace detail

/// lambda = 0: u' = psi(E(t) + C0) with E the primitive of e vanishing at 0 and
/// C0 the unique constant making u' zero-mean.
inline BaseSolutionReport base_solution_lambda0(const ProblemSpec& spec, double xi,
                                                const BaseSolverOptions& opts = {}) {
    if (spec.lambda != 0.0) throw ConfigError("base_solution_lambda0 requires lambda = 0");
    const auto e = detail::sample_forcing(spec);
    const auto prim = antiderivative(e);
    const auto E = prim + (-prim[0]);
    const double supE = E.sup_on_nodes();

    auto mean_slope = [&](double c) {
        return mean(E.map([&](double v) { return spec.phi.psi(v + c); }));
    };

    double reach = supE + 1.0;
    while (!(mean_slope(-reach) < 0.0 && mean_slope(reach) > 0.0)) {
        reach *= 2.0;
        if (reach > supE + 1e3) throw Error("internal error: no bracket for C0; psi is not a valid inverse");
    }
    BaseSolutionReport r;
    r.case_tag = BaseSolutionReport::Case::lambda_zero;
    r.constant = detail::increasing_root(mean_slope, -reach, reach, opts.bisection_width);
    r.uprime = E.map([&](double v) { return spec.phi.psi(v + r.constant); });
    detail::finish_report(r, spec, e, xi);
    return r;
}

namespace detail {

inline IvpSolution<1> flow_p(const ProblemSpec& spec, double p0, const IvpOptions& opts,
                             std::vector<double> samples = {}) {
    IvpProblem<1> ivp;
    ivp.field = [&spec](double t, const State<1>& p) {
        return State<1>{spec.e(t) - spec.lambda * spec.phi.psi(p[0])};
    };
    ivp.t1 = spec.T;
    ivp.y0 = {p0};
    ivp.options = opts;
    ivp.sample_times = std::move(samples);
    return integrate(ivp);
}

} // namespace detail

/// lambda > 0: the unique T-periodic orbit of p' + lambda psi(p) = e(t), found as
/// the root of the decreasing map h(p0) = p(T, p0) - p0; then u' = psi(p).
inline BaseSolutionReport base_solution_lambda_pos(const ProblemSpec& spec, double xi,
                                                   const BaseSolverOptions& opts = {}) {
    if (!(spec.lambda > 0.0)) throw ConfigError("base_solution_lambda_pos requires lambda > 0");
    const auto e = detail::sample_forcing(spec);
    auto h = [&](double p0) { return detail::flow_p(spec, p0, opts.ivp).final_state[0] - p0; };

    double reach = integral(e.map([](double v) { return std::abs(v); })) +
                   spec.lambda * spec.phi.half_width * spec.T + 1.0;
    if (!(h(-reach) > 0.0 && h(reach) < 0.0)) {
        reach *= 10.0;
        if (!(h(-reach) > 0.0 && h(reach) < 0.0))
            throw Error("Poincare map sign conditions fail on [-P, P]; psi is not a valid inverse");
    }

    BaseSolutionReport r;
    r.case_tag = BaseSolutionReport::Case::lambda_positive;
    r.constant = detail::increasing_root([&](double p0) { return -h(p0); }, -reach, reach,
                                         opts.bisection_width * 1e-2);

    const PeriodicGrid grid(spec.T, spec.grid_size);
    std::vector<double> times(grid.N);
    for (int j = 0; j < grid.N; ++j) times[j] = grid.node(j);
    const auto flow = detail::flow_p(spec, r.constant, opts.ivp, times);
    r.fixed_point_defect = std::abs(flow.final_state[0] - r.constant);
    std::vector<double> z(grid.N);
    for (int j = 0; j < grid.N; ++j) z[j] = spec.phi.psi(flow.samples[j][0]);
    r.uprime = PeriodicFunction(grid, std::move(z));
    detail::finish_report(r, spec, e, xi);
    return r;
}

inline BaseSolutionReport base_solution(const ProblemSpec& spec, double xi, const BaseSolverOptions& opts = {}) {
    return spec.lambda > 0.0 ? base_solution_lambda_pos(spec, xi, opts) : base_solution_lambda0(spec, xi, opts);
}

} // namespace phicont
