#pragma once

// Newton iteration for the zero-mean part U of u = xi + U, continuation in
// kappa from the exact kappa = 0 solution, and the sweep in the mean xi.
//
// For fixed (xi, kappa) the mean-free equation is
//     F(U) = (phi(U'))' + lambda U' + kappa g(xi + U) - kappa <g(xi + U)> = e(t)
// and mu follows from mu = kappa <g(xi + U)>, <.> the period average.

#include "phicont/error.hpp"
#include "phicont/linear_periodic.hpp"
#include "phicont/model.hpp"
#include "phicont/periodic_function.hpp"
#include "phicont/phi_linear.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace phicont {

/// The Newton iterate reached the edge of the domain of phi.
class IterateOutOfDomain : public ConvergenceError {
public:
    using ConvergenceError::ConvergenceError;
};

struct NewtonStepReport {
    int iterate = 0;
    PeriodicFunction U_next;
    double mu_star = 0.0;
    double residual = 0.0;          ///< sup |F(U_n) - e|
    double correction = 0.0;        ///< sup |U_{n+1} - U_n|
    double identity_defect = 0.0;   ///< |mu* - kappa <g + g'(U_{n+1} - U_n)>|
    double mean = 0.0;              ///< mean of U_{n+1}
    double condition_number = 0.0;
    double xi = 0.0;
    double kappa = 0.0;
};

struct SolverOptions {
    double newton_tol = 1e-10;
    int max_newton_iters = 12;
    int n_kappa_steps = 10;
    double min_kappa_step_fraction = 1e-4;
    double domain_margin = 1e-6;
    int max_xi_halvings = 10;
    /// Two Newton iterations per point regardless of the correction size.
    bool two_step_mode = false;
    IvpOptions ivp{};
    BaseSolverOptions base{};
    std::function<void(const NewtonStepReport&)> observer;
};

struct PeriodicSolution {
    double xi = 0.0;
    double mu = 0.0;
    double kappa = 0.0;
    PeriodicFunction U;      ///< zero mean
    PeriodicFunction uprime; ///< spectral derivative of U
    double u0 = 0.0;
    double uprime0 = 0.0;
    double sup_uprime = 0.0;
    double variation = 0.0; ///< max u - min u
    double residual = 0.0;  ///< sup |(phi(u'))' + lambda u' + k g(u) - mu - e| on nodes
    double apriori_bound = 0.0; ///< alpha = psi(int |k g(u) - mu - e + lambda u'|)
    int newton_iterations = 0;  ///< at the final kappa
    int total_newton_iterations = 0;
    double last_correction = 0.0;
    double max_identity_defect = 0.0;
};

namespace detail {

inline PeriodicFunction forcing_on(const PeriodicGrid& grid, const ProblemSpec& spec) {
    return PeriodicFunction::sample(grid, [&](double t) { return spec.e(t); });
}

} // namespace detail

/// One Newton step for the mean-free equation at (xi, kappa), linearized at U_n.
inline NewtonStepReport newton_step(const ProblemSpec& spec, double xi, double kappa,
                                    const PeriodicFunction& U_n, const SolverOptions& opts = {}) {
    const auto& grid = U_n.grid();
    const auto& phi = spec.phi;
    const auto Up = derivative(U_n, 1);
    const auto Upp = derivative(U_n, 2);
    if (!(Up.sup_on_nodes() < phi.half_width - opts.domain_margin))
        throw IterateOutOfDomain("Newton iterate has sup|U'| = " + std::to_string(Up.sup_on_nodes()) +
                                 " at the edge of the phi domain");

    const auto e = detail::forcing_on(grid, spec);
    const auto u = U_n + xi;
    const auto gU = u.map(spec.g.g);
    const auto dgU = u.map(spec.g.dg);
    const auto d2phi = Up.map(phi.d2phi);

    const auto a = Up.map(phi.dphi);
    const auto a_prime = d2phi * Upp;
    const auto b = kappa * dgU;
    // d/dt(phi'(U')U' - phi(U')) = phi''(U') U' U''
    const auto f = d2phi * Up * Upp + kappa * (dgU * U_n) - kappa * gU + e;

    const LinearPeriodicProblem lp{a, a_prime, spec.lambda, b, f};
    const auto lin = solve_zero_average(lp, opts.ivp);

    NewtonStepReport r;
    r.xi = xi;
    r.kappa = kappa;
    r.U_next = lin.y;
    r.mu_star = *lin.mu_star;
    r.condition_number = lin.condition_number;
    r.mean = mean(r.U_next);
    r.correction = (r.U_next - U_n).sup_on_nodes();
    const double g_mean = mean(gU);
    r.residual = (a * Upp + spec.lambda * Up + kappa * gU + (-kappa * g_mean) - e).sup_on_nodes();
    r.identity_defect = std::abs(r.mu_star - kappa * mean(gU + dgU * (r.U_next - U_n)));
    return r;
}

struct NewtonOutcome {
    bool converged = false;
    PeriodicFunction U;
    int iterations = 0;
    double last_correction = std::numeric_limits<double>::infinity();
    double max_identity_defect = 0.0;
    std::string failure;
};

/// Newton iteration at fixed (xi, kappa). Never throws for numerical trouble;
/// failures are reported in the outcome.
inline NewtonOutcome newton_solve(const ProblemSpec& spec, double xi, double kappa, PeriodicFunction U,
                                  const SolverOptions& opts = {}) {
    NewtonOutcome out;
    out.U = std::move(U);
    const int max_iters = opts.two_step_mode ? 2 : opts.max_newton_iters;
    try {
        for (int n = 0; n < max_iters; ++n) {
            auto step = newton_step(spec, xi, kappa, out.U, opts);
            step.iterate = n;
            if (opts.observer) opts.observer(step);
            out.iterations = n + 1;
            out.last_correction = step.correction;
            out.max_identity_defect = std::max(out.max_identity_defect, step.identity_defect);
            out.U = std::move(step.U_next);
            if (!opts.two_step_mode && out.last_correction < opts.newton_tol) {
                out.converged = true;
                break;
            }
        }
        if (opts.two_step_mode) out.converged = true;
        if (out.converged && !(derivative(out.U, 1).sup_on_nodes() < spec.phi.half_width - opts.domain_margin)) {
            out.converged = false;
            out.failure = "converged iterate violates the phi domain";
        }
        if (!out.converged && out.failure.empty())
            out.failure = "no convergence after " + std::to_string(out.iterations) +
                          " iterations (last correction " + std::to_string(out.last_correction) + ")";
    } catch (const Error& ex) {
        out.converged = false;
        out.failure = ex.what();
    }
    return out;
}

/// Assembles the solution record for a converged U at kappa = k.
inline PeriodicSolution finalize_solution(const ProblemSpec& spec, double xi, const NewtonOutcome& nw) {
    PeriodicSolution s;
    s.xi = xi;
    s.kappa = spec.k;
    s.U = nw.U;
    s.uprime = derivative(nw.U, 1);
    const auto Upp = derivative(nw.U, 2);
    const auto u = nw.U + xi;
    const auto gU = u.map(spec.g.g);
    s.mu = spec.k * mean(gU);
    s.u0 = u[0];
    s.uprime0 = s.uprime[0];
    s.sup_uprime = norms(s.uprime).sup_norm;
    const auto [lo, hi] = range(u);
    s.variation = hi - lo;

    const auto e = detail::forcing_on(nw.U.grid(), spec);
    const auto a = s.uprime.map(spec.phi.dphi);
    const auto drive = spec.k * gU + (-s.mu) - e;
    s.residual = (a * Upp + spec.lambda * s.uprime + drive).sup_on_nodes();
    const auto bound_integrand = (drive + spec.lambda * s.uprime).map([](double v) { return std::abs(v); });
    s.apriori_bound = spec.phi.psi(integral(bound_integrand));

    s.newton_iterations = nw.iterations;
    s.last_correction = nw.last_correction;
    s.max_identity_defect = nw.max_identity_defect;
    return s;
}

/// Solves at mean xi. With a warm start Newton runs directly at kappa = k;
/// otherwise the kappa = 0 base solution is continued to kappa = k.
/// Throws ConvergenceError when the point cannot be reached.
inline PeriodicSolution solve_at_xi(const ProblemSpec& spec, double xi,
                                    const PeriodicSolution* warm_start = nullptr,
                                    const SolverOptions& opts = {}) {
    const PeriodicGrid grid(spec.T, spec.grid_size);
    if (warm_start) {
        if (!(warm_start->U.grid() == grid)) throw ConfigError("warm start lives on a different grid");
        auto nw = newton_solve(spec, xi, spec.k, warm_start->U, opts);
        if (!nw.converged)
            throw ConvergenceError("Newton failed at xi = " + std::to_string(xi) + ": " + nw.failure);
        auto s = finalize_solution(spec, xi, nw);
        s.total_newton_iterations = nw.iterations;
        return s;
    }

    const auto base = base_solution(spec, xi, opts.base);
    PeriodicFunction U = base.u + (-xi);
    double kappa = 0.0;
    double step = spec.k / std::max(1, opts.n_kappa_steps);
    const double min_step = opts.min_kappa_step_fraction * spec.k;
    int total = 0;
    NewtonOutcome last;
    double max_defect = 0.0;
    while (kappa < spec.k) {
        const double next = kappa + step >= spec.k * (1.0 - 1e-12) ? spec.k : kappa + step;
        auto nw = newton_solve(spec, xi, next, U, opts);
        total += nw.iterations;
        if (nw.converged) {
            kappa = next;
            U = nw.U;
            max_defect = std::max(max_defect, nw.max_identity_defect);
            last = std::move(nw);
        } else {
            step *= 0.5;
            if (step < min_step)
                throw ConvergenceError("kappa continuation stalled at kappa = " + std::to_string(kappa) +
                                       " for xi = " + std::to_string(xi) + ": " + nw.failure);
        }
    }
    last.max_identity_defect = max_defect;
    auto s = finalize_solution(spec, xi, last);
    s.total_newton_iterations = total;
    return s;
}

struct BranchPoint {
    double xi = 0.0;
    std::optional<PeriodicSolution> solution;
    std::string failure;
    bool cold_started = false;
    /// Filled by shooting verification; NaN until verified.
    double shooting_defect = std::numeric_limits<double>::quiet_NaN();
    bool verified = false;

    bool solved() const { return solution.has_value(); }
    double mu() const { return solution ? solution->mu : std::numeric_limits<double>::quiet_NaN(); }
};

struct BranchCurve {
    double xi0 = 0.0;
    double dxi = 0.0;
    int nsteps = 0;
    std::vector<BranchPoint> points;

    std::size_t solved_count() const {
        std::size_t n = 0;
        for (const auto& p : points) n += p.solved();
        return n;
    }
};

/// Solutions at xi_i = xi0 + i*dxi, i = 0..nsteps. The first point is reached by
/// kappa continuation, later points by Newton warm-started from the previous
/// one; the xi step is halved on failure and restored after two successes.
inline BranchCurve sweep_xi(const ProblemSpec& spec, double xi0, double dxi, int nsteps,
                            const SolverOptions& opts = {}) {
    if (dxi == 0.0 && nsteps > 0) throw ConfigError("sweep step dxi must be nonzero");
    if (nsteps < 0) throw ConfigError("sweep nsteps must be nonnegative");

    BranchCurve curve{xi0, dxi, nsteps, {}};
    curve.points.reserve(nsteps + 1);

    BranchPoint first;
    first.xi = xi0;
    try {
        first.solution = solve_at_xi(spec, xi0, nullptr, opts);
        first.cold_started = true;
    } catch (const ConvergenceError& ex) {
        throw ConvergenceError(std::string("first sweep point unsolvable: ") + ex.what());
    }
    curve.points.push_back(std::move(first));

    const double full = std::abs(dxi);
    const double dir = dxi > 0.0 ? 1.0 : -1.0;
    const double min_step = full / std::pow(2.0, opts.max_xi_halvings);
    double h = full;
    int successes = 0;
    const PeriodicSolution* anchor = &*curve.points.front().solution;

    for (int i = 1; i <= nsteps; ++i) {
        BranchPoint pt;
        pt.xi = xi0 + i * dxi;
        PeriodicSolution cur = *anchor;
        bool reached = false;
        std::string failure;
        while (true) {
            const double remaining = std::abs(pt.xi - cur.xi);
            const bool last_leg = remaining <= h * (1.0 + 1e-12);
            const double next = last_leg ? pt.xi : cur.xi + dir * h;
            try {
                cur = solve_at_xi(spec, next, &cur, opts);
                if (++successes >= 2 && h < full) {
                    h = std::min(full, 2.0 * h);
                    successes = 0;
                }
                if (last_leg) {
                    reached = true;
                    break;
                }
            } catch (const ConvergenceError& ex) {
                successes = 0;
                h *= 0.5;
                failure = ex.what();
                if (h < min_step) break;
            }
        }
        if (!reached) {
            h = full;
            try {
                cur = solve_at_xi(spec, pt.xi, nullptr, opts);
                pt.cold_started = true;
                reached = true;
            } catch (const ConvergenceError& ex) {
                failure += std::string("; cold start: ") + ex.what();
            }
        }
        if (reached) pt.solution = std::move(cur);
        else pt.failure = failure;
        curve.points.push_back(std::move(pt));
        if (curve.points.back().solved()) anchor = &*curve.points.back().solution;
    }
    return curve;
}

} // namespace phicont
