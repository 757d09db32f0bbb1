#pragma once

// T-periodic solutions of L[y] = (a(t) y')' + lambda y' + b(t) y = f(t) by
// fundamental solutions and a small matching system, plus the zero-average
// variant L[y] = mu* + f with a free constant mu*.

#include "phicont/error.hpp"
#include "phicont/ivp.hpp"
#include "phicont/periodic_function.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace phicont {

struct LinearPeriodicProblem {
    PeriodicFunction a;
    PeriodicFunction a_prime;
    double lambda = 0.0;
    PeriodicFunction b;
    PeriodicFunction f;

    /// Builds a problem whose a' is obtained by spectral differentiation of a.
    static LinearPeriodicProblem with_spectral_slope(PeriodicFunction a, double lambda,
                                                     PeriodicFunction b, PeriodicFunction f) {
        auto ap = derivative(a, 1);
        return {std::move(a), std::move(ap), lambda, std::move(b), std::move(f)};
    }

    const PeriodicGrid& grid() const { return a.grid(); }
    double a_min() const {
        double m = a[0];
        for (double v : a.samples()) m = std::min(m, v);
        return m;
    }
};

struct LinearPeriodicSolution {
    PeriodicFunction y;
    PeriodicFunction yprime; ///< from the IVP, not spectral
    std::optional<double> mu_star;
    double condition_number = 0.0;
    double periodicity_defect = 0.0; ///< |y(T)-y(0)| + |y'(T)-y'(0)| before resampling
    double residual = 0.0;           ///< sup over nodes of |L[y] - mu* - f|, spectral
    double averaging_defect = 0.0;   ///< |int b y - T mu* - int f|
    double a_min = 0.0;
    PeriodicFunction particular; ///< Y for f (zero initial data)
    PeriodicFunction y1;         ///< homogeneous, y1(0) = 0, y1'(0) = 1
    PeriodicFunction y2;         ///< homogeneous, y2(0) = 1, y2'(0) = 0
    std::size_t ivp_steps = 0;
};

inline constexpr double kConditionCap = 1e12;

namespace detail {

template <std::size_t Pairs>
struct FundamentalSet {
    // Per pair: samples of (y, y') at grid nodes plus the state at T.
    std::vector<State<2 * Pairs>> samples;
    State<2 * Pairs> at_T{};
    State<2 * Pairs> at_0{};
    std::size_t steps = 0;
};

/// Integrates Pairs second-order equations a y'' + (a' + lambda) y' + b y = rhs_m(t)
/// simultaneously; rhs_m is f, 1 or 0 as given by the weights (w_f, w_1) per pair.
template <std::size_t Pairs>
FundamentalSet<Pairs> integrate_fundamental(const LinearPeriodicProblem& p,
                                            const std::array<std::array<double, 2>, Pairs>& rhs_weights,
                                            const State<2 * Pairs>& y0, const IvpOptions& opts) {
    const auto& grid = p.grid();
    SpectrumBundle coeffs({Spectrum(p.a), Spectrum(p.a_prime), Spectrum(p.b), Spectrum(p.f)});
    const double lambda = p.lambda;

    IvpProblem<2 * Pairs> ivp;
    ivp.t0 = 0.0;
    ivp.t1 = grid.T;
    ivp.y0 = y0;
    ivp.options = opts;
    ivp.sample_times.resize(grid.N);
    for (int j = 0; j < grid.N; ++j) ivp.sample_times[j] = grid.node(j);
    ivp.field = [&coeffs, &rhs_weights, lambda](double t, const State<2 * Pairs>& s) {
        std::array<double, 4> c{};
        coeffs.eval(t, c);
        const double a = c[0], ap = c[1], b = c[2], f = c[3];
        State<2 * Pairs> ds{};
        for (std::size_t m = 0; m < Pairs; ++m) {
            const double y = s[2 * m], yp = s[2 * m + 1];
            const double rhs = rhs_weights[m][0] * f + rhs_weights[m][1];
            ds[2 * m] = yp;
            ds[2 * m + 1] = (rhs - (ap + lambda) * yp - b * y) / a;
        }
        return ds;
    };
    auto sol = integrate(ivp);
    return {std::move(sol.samples), sol.final_state, y0, sol.steps};
}

/// Condition of the matching matrix relative to the scale of the data it was
/// formed from: reference / sigma_min. A plain sigma_max / sigma_min misses
/// resonance when every entry is at integration-noise level.
inline double condition_of(const Eigen::MatrixXd& m, double reference) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& s = svd.singularValues();
    const double smin = s(s.size() - 1);
    if (!(smin > 0.0)) return std::numeric_limits<double>::infinity();
    return std::max(reference, s(0)) / smin;
}

/// 2-norm of the monodromy matrix built from the (y, y') states of two
/// homogeneous solutions at T, plus the norm of the identity it is compared to.
inline double monodromy_scale(double y1, double y1p, double y2, double y2p) {
    Eigen::Matrix2d phi;
    phi << y1, y2, y1p, y2p;
    return phi.jacobiSvd().singularValues()(0) + 1.0;
}

/// Resonance threshold. Matching entries carry integration error of order rtol,
/// so the cap can never usefully exceed about 1/rtol.
inline double condition_cap(const IvpOptions& opts) { return std::min(kConditionCap, 1e-2 / opts.rtol); }

inline void check_coefficients(const LinearPeriodicProblem& p) {
    const auto& g = p.a.grid();
    if (!(p.a_prime.grid() == g) || !(p.b.grid() == g) || !(p.f.grid() == g))
        throw ConfigError("linear problem coefficients live on different grids");
    if (!(p.a_min() > 0.0))
        throw ConfigError("leading coefficient a(t) must be positive; a_min = " +
                          std::to_string(p.a_min()));
}

inline double spectral_residual(const LinearPeriodicProblem& p, const PeriodicFunction& y, double mu) {
    const auto dy = derivative(y, 1);
    const auto d2y = derivative(y, 2);
    double r = 0.0;
    for (int j = 0; j < y.size(); ++j) {
        const double lhs = p.a[j] * d2y[j] + (p.a_prime[j] + p.lambda) * dy[j] + p.b[j] * y[j];
        r = std::max(r, std::abs(lhs - mu - p.f[j]));
    }
    return r;
}

} // namespace detail

/// Periodic solution of L[y] = f. Throws ResonanceError when the homogeneous
/// problem admits a nontrivial periodic solution.
inline LinearPeriodicSolution solve_periodic(const LinearPeriodicProblem& p,
                                             const IvpOptions& opts = {}) {
    detail::check_coefficients(p);
    const auto& grid = p.grid();

    // Pairs: particular Y (rhs f), y1, y2.
    const std::array<std::array<double, 2>, 3> w{{{1.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}}};
    const State<6> y0{0.0, 0.0, 0.0, 1.0, 1.0, 0.0};
    const auto fs = detail::integrate_fundamental<3>(p, w, y0, opts);

    auto jump = [&](int i) { return fs.at_T[i] - fs.at_0[i]; };
    Eigen::Matrix2d m;
    m << jump(2), jump(4), jump(3), jump(5);
    const Eigen::Vector2d rhs(-jump(0), -jump(1));
    const double cond =
        detail::condition_of(m, detail::monodromy_scale(fs.at_T[2], fs.at_T[3], fs.at_T[4], fs.at_T[5]));
    if (!(cond < detail::condition_cap(opts)))
        throw ResonanceError("resonant linear problem: the homogeneous equation has a "
                             "nontrivial T-periodic solution (condition " + std::to_string(cond) + ")",
                             cond);
    const Eigen::Vector2d c = m.fullPivLu().solve(rhs);

    LinearPeriodicSolution out;
    std::vector<double> y(grid.N), yp(grid.N), pY(grid.N), v1(grid.N), v2(grid.N);
    for (int j = 0; j < grid.N; ++j) {
        const auto& s = fs.samples[j];
        y[j] = s[0] + c(0) * s[2] + c(1) * s[4];
        yp[j] = s[1] + c(0) * s[3] + c(1) * s[5];
        pY[j] = s[0];
        v1[j] = s[2];
        v2[j] = s[4];
    }
    out.periodicity_defect = std::abs(jump(0) + c(0) * jump(2) + c(1) * jump(4)) +
                             std::abs(jump(1) + c(0) * jump(3) + c(1) * jump(5));
    out.y = PeriodicFunction(grid, std::move(y));
    out.yprime = PeriodicFunction(grid, std::move(yp));
    out.particular = PeriodicFunction(grid, std::move(pY));
    out.y1 = PeriodicFunction(grid, std::move(v1));
    out.y2 = PeriodicFunction(grid, std::move(v2));
    out.condition_number = cond;
    out.a_min = p.a_min();
    out.residual = detail::spectral_residual(p, out.y, 0.0);
    out.averaging_defect = std::abs(integral(p.b * out.y) - integral(p.f));
    out.ivp_steps = fs.steps;
    return out;
}

/// Finds (y, mu*) with L[y] = mu* + f, y T-periodic and of zero mean, through
/// the bordered system in (mu*, c1, c2) built from
///     y = Y_f + mu* Y_1 + c1 y1 + c2 y2.
/// Valid also for b = 0, where L is singular on constants.
inline LinearPeriodicSolution solve_zero_average(const LinearPeriodicProblem& p,
                                                 const IvpOptions& opts = {}) {
    detail::check_coefficients(p);
    const auto& grid = p.grid();

    // Pairs: Y_f (rhs f), Y_1 (rhs 1), y1, y2.
    const std::array<std::array<double, 2>, 4> w{{{1.0, 0.0}, {0.0, 1.0}, {0.0, 0.0}, {0.0, 0.0}}};
    const State<8> y0{0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0};
    const auto fs = detail::integrate_fundamental<4>(p, w, y0, opts);

    auto jump = [&](int i) { return fs.at_T[i] - fs.at_0[i]; };
    std::array<double, 4> means{};
    for (const auto& s : fs.samples)
        for (int m = 0; m < 4; ++m) means[m] += s[2 * m];
    for (double& v : means) v /= grid.N;

    Eigen::Matrix3d m;
    m << jump(2), jump(4), jump(6),
         jump(3), jump(5), jump(7),
         means[1], means[2], means[3];
    const Eigen::Vector3d rhs(-jump(0), -jump(1), -means[0]);
    const double cond =
        detail::condition_of(m, detail::monodromy_scale(fs.at_T[4], fs.at_T[5], fs.at_T[6], fs.at_T[7]));
    if (!(cond < detail::condition_cap(opts)))
        throw ResonanceError("bordered periodic system is singular (condition " + std::to_string(cond) +
                                 "): the zero-mean homogeneous problem has a nontrivial solution, "
                                 "expected only outside the k*G < a0*omega regime",
                             cond);
    const Eigen::Vector3d c = m.fullPivLu().solve(rhs);
    const double mu = c(0);

    LinearPeriodicSolution out;
    std::vector<double> y(grid.N), yp(grid.N), pY(grid.N), v1(grid.N), v2(grid.N);
    for (int j = 0; j < grid.N; ++j) {
        const auto& s = fs.samples[j];
        y[j] = s[0] + mu * s[2] + c(1) * s[4] + c(2) * s[6];
        yp[j] = s[1] + mu * s[3] + c(1) * s[5] + c(2) * s[7];
        pY[j] = s[0];
        v1[j] = s[4];
        v2[j] = s[6];
    }
    out.periodicity_defect = std::abs(jump(0) + mu * jump(2) + c(1) * jump(4) + c(2) * jump(6)) +
                             std::abs(jump(1) + mu * jump(3) + c(1) * jump(5) + c(2) * jump(7));
    out.y = PeriodicFunction(grid, std::move(y));
    out.yprime = PeriodicFunction(grid, std::move(yp));
    out.particular = PeriodicFunction(grid, std::move(pY));
    out.y1 = PeriodicFunction(grid, std::move(v1));
    out.y2 = PeriodicFunction(grid, std::move(v2));
    out.mu_star = mu;
    out.condition_number = cond;
    out.a_min = p.a_min();
    out.residual = detail::spectral_residual(p, out.y, mu);
    out.averaging_defect = std::abs(integral(p.b * out.y) - grid.T * mu - integral(p.f));
    out.ivp_steps = fs.steps;
    return out;
}

} // namespace phicont
