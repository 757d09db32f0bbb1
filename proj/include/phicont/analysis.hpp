#pragma once

// Re-integration checks for computed orbits, features of the curve mu(xi),
// and the functional inequalities satisfied by the zero-mean part U.

#include "phicont/continuation.hpp"
#include "phicont/ivp.hpp"
#include "phicont/model.hpp"
#include "phicont/periodic_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace phicont {

inline constexpr double kShootingTolerance = 1e-6;

struct VerificationReport {
    double defect = std::numeric_limits<double>::infinity(); ///< |u(T)-u(0)| + |u'(T)-u'(0)|
    double max_deviation = std::numeric_limits<double>::infinity(); ///< against xi + U on the nodes
    bool passed = false;
    std::string failure;
    std::optional<double> blowup_time;
};

struct ShootingOptions {
    IvpOptions ivp{1e-12, 1e-14};
    double tolerance = kShootingTolerance;
};

/// Integrates u' = psi(w), w' = -lambda psi(w) - k g(u) + mu + e(t) over one
/// period from (u0, phi(u'0)). Samples at the given times are (u, w).
inline IvpSolution<2> shoot(const ProblemSpec& spec, double u0, double uprime0, double mu,
                            std::vector<double> sample_times = {}, const IvpOptions& opts = {1e-12, 1e-14}) {
    if (!(std::abs(uprime0) < spec.phi.half_width))
        throw DomainEscape("initial slope outside the domain of phi", 0.0);
    IvpProblem<2> p;
    p.t0 = 0.0;
    p.t1 = spec.T;
    p.y0 = {u0, spec.phi.phi(uprime0)};
    p.sample_times = std::move(sample_times);
    p.options = opts;
    p.field = [&spec, mu](double t, const State<2>& y) {
        const double v = spec.phi.psi(y[1]);
        return State<2>{v, -spec.lambda * v - spec.k * spec.g.g(y[0]) + mu + spec.e(t)};
    };
    return integrate(p);
}

/// Periodicity check from initial data alone; max_deviation stays unset.
inline VerificationReport verify_initial_data(const ProblemSpec& spec, double u0, double uprime0, double mu,
                                              const ShootingOptions& opts = {}) {
    VerificationReport r;
    try {
        const auto run = shoot(spec, u0, uprime0, mu, {}, opts.ivp);
        const auto& end = run.final_state;
        r.defect = std::abs(end[0] - u0) + std::abs(spec.phi.psi(end[1]) - uprime0);
        r.passed = r.defect < opts.tolerance;
        if (!r.passed) r.failure = "periodicity defect " + std::to_string(r.defect);
    } catch (const IntegrationFailure& ex) {
        r.failure = ex.what();
        r.blowup_time = ex.blowup_time();
    }
    return r;
}

inline VerificationReport verify_by_shooting(const ProblemSpec& spec, const PeriodicSolution& sol,
                                             const ShootingOptions& opts = {}) {
    VerificationReport r;
    const auto& grid = sol.U.grid();
    std::vector<double> times(grid.N);
    for (int j = 0; j < grid.N; ++j) times[j] = grid.node(j);
    try {
        const auto run = shoot(spec, sol.u0, sol.uprime0, sol.mu, times, opts.ivp);
        const auto& end = run.final_state;
        r.defect = std::abs(end[0] - sol.u0) + std::abs(spec.phi.psi(end[1]) - sol.uprime0);
        r.max_deviation = 0.0;
        for (int j = 0; j < grid.N; ++j)
            r.max_deviation = std::max(r.max_deviation, std::abs(run.samples[j][0] - (sol.xi + sol.U[j])));
        r.passed = r.defect < opts.tolerance;
        if (!r.passed) r.failure = "periodicity defect " + std::to_string(r.defect);
    } catch (const IntegrationFailure& ex) {
        r.failure = ex.what();
        r.blowup_time = ex.blowup_time();
    }
    return r;
}

/// Shooting check of every solved point; returns the number of points that fail.
inline std::size_t verify_branch(const ProblemSpec& spec, BranchCurve& curve, const ShootingOptions& opts = {}) {
    std::size_t failed = 0;
    for (auto& p : curve.points) {
        if (!p.solved()) continue;
        const auto rep = verify_by_shooting(spec, *p.solution, opts);
        p.shooting_defect = rep.defect;
        p.verified = rep.passed;
        if (!rep.passed) {
            ++failed;
            if (p.failure.empty()) p.failure = "shooting: " + rep.failure;
        }
    }
    return failed;
}

namespace detail {

struct Node {
    double xi, mu;
};

inline std::vector<Node> solved_nodes(const BranchCurve& curve) {
    std::vector<Node> v;
    for (const auto& p : curve.points)
        if (p.solved()) v.push_back({p.xi, p.mu()});
    std::sort(v.begin(), v.end(), [](const Node& a, const Node& b) { return a.xi < b.xi; });
    return v;
}

// Sign changes of mu - level between consecutive nodes, located by linear
// interpolation; a node sitting exactly on the level counts once.
inline std::vector<double> crossings(const std::vector<Node>& v, double level) {
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double s = v[i].mu - level;
        if (s == 0.0) {
            out.push_back(v[i].xi);
            continue;
        }
        if (i + 1 < v.size()) {
            const double s1 = v[i + 1].mu - level;
            if (s * s1 < 0.0) out.push_back(v[i].xi + (v[i + 1].xi - v[i].xi) * s / (s - s1));
        }
    }
    return out;
}

} // namespace detail

struct BranchFeatures {
    std::size_t points = 0;
    std::size_t solved = 0;
    std::string shape;

    double limit_left = std::numeric_limits<double>::quiet_NaN();  ///< mean mu over the 5 smallest xi
    double limit_right = std::numeric_limits<double>::quiet_NaN(); ///< mean mu over the 5 largest xi
    double mu_minus = std::numeric_limits<double>::quiet_NaN();
    double mu_plus = std::numeric_limits<double>::quiet_NaN();
    double xi_at_mu_minus = std::numeric_limits<double>::quiet_NaN();
    double xi_at_mu_plus = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> zero_crossings;

    /// max |mu(xi + p) - mu(xi)| over the overlap; empty when g is not periodic
    /// or the sweep is shorter than one period.
    std::optional<double> shift_defect;
    double shift_period = 0.0;

    // Shape-dependent statements; empty when the shape does not apply.
    std::optional<double> expected_limit_left;  ///< k g(-inf)
    std::optional<double> expected_limit_right; ///< k g(+inf)
    std::optional<bool> strictly_inside_limits;
    std::optional<bool> sign_pattern_at_ends;   ///< mu < 0 far left, mu > 0 far right
    std::optional<bool> has_zero_crossing;
};

inline constexpr std::size_t kLimitWindow = 5;

/// Interpolated mu at x from sorted nodes: node value when x hits a node,
/// otherwise a four-point Lagrange cubic, the stencil shifted inward at the ends.
inline std::optional<double> interpolate_mu(const std::vector<detail::Node>& v, double x, double snap) {
    if (v.empty() || x < v.front().xi - snap || x > v.back().xi + snap) return std::nullopt;
    auto it = std::lower_bound(v.begin(), v.end(), x - snap, [](const detail::Node& n, double t) { return n.xi < t; });
    if (it != v.end() && std::abs(it->xi - x) <= snap) return it->mu;
    const std::ptrdiff_t j = (it - v.begin()) - 1; // v[j].xi < x < v[j+1].xi
    if (j < 0 || j + 1 >= static_cast<std::ptrdiff_t>(v.size())) return std::nullopt;
    const auto n = static_cast<std::ptrdiff_t>(v.size());
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, std::min(j - 1, n - 4));
    const std::ptrdiff_t hi = std::min(n - 1, lo + 3);
    double sum = 0.0;
    for (auto a = lo; a <= hi; ++a) {
        double w = 1.0;
        for (auto b = lo; b <= hi; ++b)
            if (b != a) w *= (x - v[b].xi) / (v[a].xi - v[b].xi);
        sum += w * v[a].mu;
    }
    return sum;
}

inline BranchFeatures branch_features(const BranchCurve& curve, const ProblemSpec& spec) {
    if (curve.points.empty()) throw ConfigError("branch features need a non-empty curve");
    BranchFeatures f;
    f.points = curve.points.size();
    f.shape = to_string(spec.g.shape.kind);
    const auto v = detail::solved_nodes(curve);
    f.solved = v.size();
    if (v.empty()) return f;

    const std::size_t w = std::min(kLimitWindow, v.size());
    double left = 0.0, right = 0.0;
    for (std::size_t i = 0; i < w; ++i) {
        left += v[i].mu;
        right += v[v.size() - 1 - i].mu;
    }
    f.limit_left = left / w;
    f.limit_right = right / w;

    const auto [lo, hi] = std::minmax_element(v.begin(), v.end(), [](auto& a, auto& b) { return a.mu < b.mu; });
    f.mu_minus = lo->mu;
    f.xi_at_mu_minus = lo->xi;
    f.mu_plus = hi->mu;
    f.xi_at_mu_plus = hi->xi;
    f.zero_crossings = detail::crossings(v, 0.0);

    const auto& shape = spec.g.shape;
    switch (shape.kind) {
    case ShapeTag::Kind::periodic: {
        f.shift_period = shape.period;
        const double snap = 1e-9 * std::max(std::abs(curve.dxi), 1e-300);
        double worst = -1.0;
        for (const auto& n : v) {
            const auto shifted = interpolate_mu(v, n.xi + shape.period, snap);
            if (shifted) worst = std::max(worst, std::abs(*shifted - n.mu));
        }
        if (worst >= 0.0) f.shift_defect = worst;
        break;
    }
    case ShapeTag::Kind::saturating: {
        f.expected_limit_left = spec.k * shape.limit_minus;
        f.expected_limit_right = spec.k * shape.limit_plus;
        f.strictly_inside_limits = f.mu_minus > *f.expected_limit_left && f.mu_plus < *f.expected_limit_right;
        break;
    }
    case ShapeTag::Kind::vanishing_sign:
        f.expected_limit_left = 0.0;
        f.expected_limit_right = 0.0;
        f.sign_pattern_at_ends = v.front().mu < 0.0 && v.back().mu > 0.0;
        break;
    case ShapeTag::Kind::strict_sign:
        f.has_zero_crossing = !f.zero_crossings.empty();
        break;
    case ShapeTag::Kind::other:
        break;
    }
    return f;
}

struct Multiplicity {
    std::size_t count = 0;
    bool per_period = false; ///< counted over one period window rather than the whole sweep
    double window_start = 0.0;
    double window_end = 0.0;
    std::vector<double> xis;
};

/// Number of xi with mu(xi) = level. For periodic g the count covers the
/// first full period [xi_min, xi_min + p) of the sweep, otherwise the whole sweep.
inline Multiplicity multiplicity(const BranchCurve& curve, const ProblemSpec& spec, double level) {
    auto v = detail::solved_nodes(curve);
    Multiplicity m;
    if (v.empty()) return m;
    m.window_start = v.front().xi;
    m.window_end = v.back().xi;
    const auto& shape = spec.g.shape;
    if (shape.kind == ShapeTag::Kind::periodic && v.back().xi - v.front().xi >= shape.period) {
        m.per_period = true;
        m.window_end = m.window_start + shape.period;
        // keep one node past the window so a crossing in the last interval is seen
        auto cut = std::upper_bound(v.begin(), v.end(), m.window_end,
                                    [](double x, const detail::Node& n) { return x < n.xi; });
        if (cut != v.end()) ++cut;
        v.erase(cut, v.end());
    }
    const auto all = detail::crossings(v, level);
    const double dedupe = 0.5 * std::abs(curve.dxi);
    for (double x : all) {
        if (m.per_period) {
            if (x >= m.window_end) continue;
            // the same solution one period earlier is already counted
            const bool repeat = std::any_of(all.begin(), all.end(), [&](double y) {
                return y < x && std::abs(x - shape.period - y) <= dedupe;
            });
            if (repeat) continue;
        }
        m.xis.push_back(x);
    }
    m.count = m.xis.size();
    return m;
}

struct AuditReport {
    double sup_U = 0.0;
    double l2_sq = 0.0; ///< integral of U^2
    double h1_sq = 0.0; ///< integral of U'^2

    double sobolev_margin = 0.0;   ///< (T/12) h1_sq - sup_U^2
    double wirtinger_margin = 0.0; ///< h1_sq - omega^2 l2_sq
    double energy_margin = 0.0;    ///< a^2 T - h1_sq
    bool chain_applicable = false; ///< aT < pi sqrt 3
    double chain_margin = 0.0;     ///< aT/(2 sqrt 3) - sup_U, when applicable
    double identity_defect = 0.0;  ///< largest mu*-averaging defect along the Newton path

    bool sobolev = false, wirtinger = false, energy = false, chain = false, identity = false;
    bool all_hold() const { return sobolev && wirtinger && energy && chain && identity; }
};

inline constexpr double kIdentityTolerance = 1e-8;

inline AuditReport inequality_audit(const PeriodicSolution& sol, const ProblemSpec& spec) {
    AuditReport r;
    const auto n = norms(sol.U);
    const double T = spec.T, a = spec.phi.half_width, omega = spec.omega();
    r.sup_U = n.sup_norm;
    r.l2_sq = n.l2_norm * n.l2_norm;
    r.h1_sq = n.h1_seminorm * n.h1_seminorm;

    // Rounding slack relative to the size of the compared quantities.
    auto slack = [](double x, double y) { return 1e-12 + 1e-9 * std::max(std::abs(x), std::abs(y)); };

    r.sobolev_margin = T / 12.0 * r.h1_sq - r.sup_U * r.sup_U;
    r.sobolev = r.sobolev_margin >= -slack(T / 12.0 * r.h1_sq, r.sup_U * r.sup_U);
    r.wirtinger_margin = r.h1_sq - omega * omega * r.l2_sq;
    r.wirtinger = r.wirtinger_margin >= -slack(r.h1_sq, omega * omega * r.l2_sq);
    r.energy_margin = a * a * T - r.h1_sq;
    r.energy = r.energy_margin >= -slack(a * a * T, r.h1_sq);

    const double aT = a * T;
    r.chain_applicable = aT < std::numbers::pi * std::sqrt(3.0);
    if (r.chain_applicable) {
        r.chain_margin = aT / (2.0 * std::sqrt(3.0)) - r.sup_U;
        r.chain = r.chain_margin >= 0.0;
    } else {
        r.chain = true;
    }
    r.identity_defect = sol.max_identity_defect;
    r.identity = r.identity_defect < kIdentityTolerance;
    return r;
}

} // namespace phicont
