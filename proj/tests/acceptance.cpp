// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "phicont/analysis.hpp"
#include "phicont/continuation.hpp"
#include "phicont/linear_periodic.hpp"

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

using namespace phicont;

namespace {

constexpr double pi = std::numbers::pi;

ProblemSpec pendulum(int n = 256) {
    return {make_phi("relativistic"), make_g("sin"), 0.1, 0.1, 1.0, Forcing::trig(1.0, {{1, 0.0, 0.15}}), n};
}
ProblemSpec saturating() {
    return {make_phi("relativistic"), make_g("atan"), 0.0, 0.25, 0.3, Forcing::trig(0.3, {{1, 0.3, 0.0}}), 256};
}
ProblemSpec vanishing() {
    return {make_phi("relativistic"), make_g("rational3"), 0.05, 0.1, 0.2, Forcing::trig(0.2, {{1, 0.45, 0.0}}), 256};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int failures = 0;

void report(int id, bool ok, const std::string& what) {
    std::printf("[%s] %2d  %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string f(const char* format, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, format, a, b, c, d);
    return buf;
}

// Inequalities on every Newton iterate, collected across all solves.
struct StepAudit {
    std::size_t steps = 0;
    std::size_t violations = 0;
    double worst_identity = 0.0;

    SolverOptions options_for(const ProblemSpec& spec) {
        SolverOptions o;
        o.observer = [this, &spec](const NewtonStepReport& r) {
            PeriodicSolution probe;
            probe.U = r.U_next;
            probe.max_identity_defect = r.identity_defect;
            const auto a = inequality_audit(probe, spec);
            ++steps;
            worst_identity = std::max(worst_identity, r.identity_defect);
            if (!(a.sobolev && a.wirtinger && a.energy && a.identity) || std::abs(r.mean) > 1e-12) ++violations;
        };
        return o;
    }
};

struct PointAudit {
    std::size_t points = 0;
    std::size_t violations = 0;
    void add(const PeriodicSolution& s, const ProblemSpec& spec) {
        ++points;
        if (!inequality_audit(s, spec).all_hold()) ++violations;
    }
    void add(const BranchCurve& c, const ProblemSpec& spec) {
        for (const auto& p : c.points)
            if (p.solved()) add(*p.solution, spec);
    }
};

struct ShootingTally {
    std::size_t accepted = 0;
    std::size_t passed = 0;
    double worst = 0.0;
    void add(double defect) {
        ++accepted;
        if (defect < kShootingTolerance) ++passed;
        worst = std::max(worst, defect);
    }
    void add(const BranchCurve& c) {
        for (const auto& p : c.points)
            if (p.solved()) add(p.shooting_defect);
    }
};

double max_node_error(const PeriodicFunction& y, const std::function<double(double)>& exact) {
    double e = 0.0;
    for (int j = 0; j < y.size(); ++j) e = std::max(e, std::abs(y[j] - exact(y.grid().node(j))));
    return e;
}

} // namespace

int main() {
    StepAudit steps;
    PointAudit points;
    ShootingTally shooting;

    // 1
    const auto fig3 = pendulum();
    {
        auto opts = steps.options_for(fig3);
        const auto t0 = std::chrono::steady_clock::now();
        const auto sol = solve_at_xi(fig3, 5.0, nullptr, opts);
        const double dt = seconds_since(t0);
        const bool ok = sol.mu >= -0.09687 && sol.mu <= -0.09587 && dt < 10.0 && sol.variation >= 0.002 &&
                        sol.variation <= 0.008;
        report(1, ok,
               f("pendulum point xi=5: mu=%.6f in [-0.09687,-0.09587], variation=%.5f in [0.002,0.008], %.2fs < 10s",
                 sol.mu, sol.variation, dt));
        shooting.add(verify_by_shooting(fig3, sol).defect);
        points.add(sol, fig3);
    }

    // 2
    {
        const auto spec = saturating();
        auto opts = steps.options_for(spec);
        const auto t0 = std::chrono::steady_clock::now();
        auto curve = sweep_xi(spec, -60.0, 0.1, 1200, opts);
        const double dt = seconds_since(t0);
        verify_branch(spec, curve);
        const auto feat = branch_features(curve, spec);
        const double target = pi / 8.0;
        const bool ok = curve.solved_count() == curve.points.size() && std::abs(feat.limit_left + target) < 0.01 &&
                        std::abs(feat.limit_right - target) < 0.01 && dt < 300.0;
        report(2, ok,
               f("saturating limits: left=%.5f right=%.5f, |.|-pi/8 < 0.01, sweep %.1fs < 300s (%g points)",
                 feat.limit_left, feat.limit_right, dt, static_cast<double>(curve.points.size())));
        shooting.add(curve);
        points.add(curve, spec);
    }

    // 3
    {
        const auto spec = vanishing();
        auto opts = steps.options_for(spec);
        auto curve = sweep_xi(spec, -40.0, 0.1, 800, opts);
        verify_branch(spec, curve);
        const auto feat = branch_features(curve, spec);
        const bool ok = curve.solved_count() == curve.points.size() && std::abs(feat.mu_plus - 0.15) < 0.01 &&
                        std::abs(feat.mu_minus + 0.15) < 0.01;
        report(3, ok,
               f("vanishing-sign window: mu_minus=%.6f mu_plus=%.6f, within 0.01 of -/+0.15 (at xi=%.2f, %.2f)",
                 feat.mu_minus, feat.mu_plus, feat.xi_at_mu_minus, feat.xi_at_mu_plus));
        shooting.add(curve);
        points.add(curve, spec);
    }

    // 4 and 5
    BranchCurve fig3_curve;
    {
        auto opts = steps.options_for(fig3);
        fig3_curve = sweep_xi(fig3, 0.0, 0.05, 252, opts);
        verify_branch(fig3, fig3_curve);
        const auto feat = branch_features(fig3_curve, fig3);
        const bool ok4 = fig3_curve.solved_count() == fig3_curve.points.size() && feat.shift_defect &&
                         *feat.shift_defect < 1e-6;
        report(4, ok4,
               f("periodicity in xi over [0, 4pi]: max |mu(xi+2pi)-mu(xi)| = %.3e < 1e-6",
                 feat.shift_defect.value_or(INFINITY)));

        const auto v = validate_spec(fig3);
        const auto m = multiplicity(fig3_curve, fig3, 0.05);
        const bool ok5 = v.two_solution_hypothesis && 0.05 < v.mu_window_half_width && m.per_period && m.count >= 2;
        report(5, ok5,
               f("multiplicity at mu=0.05: %g solutions per period (>= 2); window half width %.4f > 0.05",
                 static_cast<double>(m.count), v.mu_window_half_width));
        shooting.add(fig3_curve);
        points.add(fig3_curve, fig3);
    }

    // 6
    {
        auto spec = pendulum();
        spec.e = Forcing::trig(spec.T, {{1, 0.0, 0.0}});
        auto opts = steps.options_for(spec);
        const auto curve = sweep_xi(spec, -2.0 * pi, 0.1, 126, opts);
        double worst = curve.solved_count() == curve.points.size() ? 0.0 : INFINITY;
        for (const auto& p : curve.points)
            if (p.solved()) worst = std::max(worst, std::abs(p.mu() - spec.k * std::sin(p.xi)));
        report(6, worst <= 1e-10,
               f("zero forcing: max |mu - k sin xi| = %.3e <= 1e-10 over %g points", worst,
                 static_cast<double>(curve.points.size())));
        points.add(curve, spec);
    }

    // 7
    {
        const PeriodicGrid g(1.0, 64);
        const double w = g.omega();
        auto c = [&](double v) { return PeriodicFunction::constant(g, v); };
        auto s = [&](std::function<double(double)> fn) { return PeriodicFunction::sample(g, fn); };

        const auto r1 = solve_periodic(LinearPeriodicProblem::with_spectral_slope(
            c(1.0), 0.0, c(2.0), s([&](double t) { return std::cos(w * t); })));
        const double e1 = max_node_error(r1.y, [&](double t) { return std::cos(w * t) / (2.0 - w * w); });

        const double beta = 0.7, cc = 1.3;
        const auto r2 = solve_periodic(LinearPeriodicProblem::with_spectral_slope(c(1.0), 0.0, c(beta), c(cc)));
        const double e2 = max_node_error(r2.y, [&](double) { return cc / beta; });

        const auto r3 = solve_periodic(LinearPeriodicProblem::with_spectral_slope(
            c(1.0), 1.0, c(1.0), s([&](double t) { return std::sin(w * t); })));
        const std::complex<double> denom(1.0 - w * w, w);
        const double e3 = max_node_error(
            r3.y, [&](double t) { return (std::exp(std::complex<double>(0.0, w * t)) / denom).imag(); });

        report(7, e1 < 1e-7 && e2 < 1e-7 && e3 < 1e-7,
               f("linear solver vs harmonic balance: errors %.2e, %.2e, %.2e < 1e-7", e1, e2, e3));
    }

    // 8
    report(8, shooting.accepted > 0 && shooting.passed == shooting.accepted,
           f("shooting: %g of %g accepted points from 1-5 have defect < 1e-6 (worst %.2e)",
             static_cast<double>(shooting.passed), static_cast<double>(shooting.accepted), shooting.worst));

    // 9: random admissible problems on top of everything audited so far
    {
        std::mt19937 rng(0x5eed);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        const char* gs[] = {"sin", "atan", "rational3"};
        std::size_t random_specs = 0, unsolved = 0;
        for (int trial = 0; trial < 24; ++trial) {
            const double T = 0.2 + 1.3 * u01(rng);
            ProblemSpec spec{make_phi("relativistic"), make_g(gs[trial % 3]), 0.3 * u01(rng), 0.0, T,
                             Forcing::zero(), 64};
            const double amp = 0.5 * u01(rng);
            const double phase = 2.0 * pi * u01(rng);
            spec.e = Forcing::trig(T, {{1, amp * std::cos(phase), amp * std::sin(phase)}});
            // random k inside the global-parameter regime
            spec.k = (0.05 + 0.9 * u01(rng)) * spec.phi.min_slope * spec.omega() / spec.g.slope_bound;
            if (!validate_spec(spec).uniqueness_regime) continue;
            ++random_specs;
            auto opts = steps.options_for(spec);
            const auto curve = sweep_xi(spec, -4.0 + 8.0 * u01(rng), 0.5, 6, opts);
            unsolved += curve.points.size() - curve.solved_count();
            points.add(curve, spec);
        }
        const bool ok = steps.violations == 0 && points.violations == 0 && unsolved == 0 && random_specs > 0;
        report(9, ok,
               f("inequalities: %g/%g Newton steps and %g/%g accepted points clean",
                 static_cast<double>(steps.steps - steps.violations), static_cast<double>(steps.steps),
                 static_cast<double>(points.points - points.violations), static_cast<double>(points.points)) +
                   f(" (worst identity defect %.1e, %g random specs)", steps.worst_identity,
                     static_cast<double>(random_specs)));
    }

    // 10
    {
        const auto fine = pendulum(512);
        const auto coarse_curve = sweep_xi(fig3, 0.0, 0.25, 50);
        const auto fine_curve = sweep_xi(fine, 0.0, 0.25, 50);
        double worst = 0.0;
        for (std::size_t i = 0; i < coarse_curve.points.size(); ++i) {
            const auto& a = coarse_curve.points[i];
            const auto& b = fine_curve.points[i];
            worst = (a.solved() && b.solved()) ? std::max(worst, std::abs(a.mu() - b.mu())) : INFINITY;
        }
        report(10, worst < 1e-9, f("N 256 -> 512 on the pendulum sweep: max |dmu| = %.2e < 1e-9", worst));
    }

    std::printf("%s: %d criteria failed\n", failures ? "FAILED" : "ALL PASSED", failures);
    return failures ? 1 : 0;
}
