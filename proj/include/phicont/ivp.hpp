#pragma once

// Adaptive Dormand-Prince 5(4) integrator with the pair's continuous extension
// for dense output at requested sample times.

#include "phicont/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

namespace phicont {

template <std::size_t Dim>
using State = std::array<double, Dim>;

struct IvpOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    std::size_t max_steps = 1'000'000;
    double max_step = 0.0; ///< 0 means unbounded
};

template <std::size_t Dim>
struct IvpProblem {
    std::function<State<Dim>(double, const State<Dim>&)> field;
    double t0 = 0.0;
    double t1 = 1.0;
    State<Dim> y0{};
    std::vector<double> sample_times; ///< ascending, inside [t0, t1]
    IvpOptions options{};
};

template <std::size_t Dim>
struct IvpSolution {
    std::vector<State<Dim>> samples;
    State<Dim> final_state{};
    std::size_t steps = 0;
    std::size_t rejected = 0;
    std::size_t evaluations = 0;
};

namespace detail::dopri {

inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                        d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                        d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

} // namespace detail::dopri

template <std::size_t Dim>
bool all_finite(const State<Dim>& y) {
    return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

/// Integrates y' = F(t, y) from t0 to t1. Deterministic for identical inputs.
template <std::size_t Dim>
IvpSolution<Dim> integrate(const IvpProblem<Dim>& p) {
    using namespace detail::dopri;
    using S = State<Dim>;

    if (!(p.t1 > p.t0)) throw ConfigError("IVP requires t1 > t0");
    if (!(p.options.rtol > 0.0) || !(p.options.atol > 0.0))
        throw ConfigError("IVP tolerances must be positive");
    if (!std::is_sorted(p.sample_times.begin(), p.sample_times.end()) ||
        (!p.sample_times.empty() &&
         (p.sample_times.front() < p.t0 || p.sample_times.back() > p.t1)))
        throw ConfigError("IVP sample times must be ascending inside [t0, t1]");

    const auto& F = p.field;
    const double rtol = p.options.rtol;
    const double atol = p.options.atol;
    const double span = p.t1 - p.t0;
    const double h_floor = 1e-14 * span;
    const double h_cap = p.options.max_step > 0.0 ? p.options.max_step : span;

    IvpSolution<Dim> sol;
    sol.samples.reserve(p.sample_times.size());
    std::size_t next_sample = 0;

    auto axpy = [](const S& y, double h, std::initializer_list<std::pair<double, const S*>> terms) {
        S out = y;
        for (std::size_t i = 0; i < Dim; ++i) {
            double acc = 0.0;
            for (const auto& [c, k] : terms) acc += c * (*k)[i];
            out[i] += h * acc;
        }
        return out;
    };
    auto eval = [&](double t, const S& y) {
        ++sol.evaluations;
        return F(t, y);
    };
    auto scaled_norm = [&](const S& v, const S& ya, const S& yb) {
        double sum = 0.0;
        for (std::size_t i = 0; i < Dim; ++i) {
            const double sc = atol + rtol * std::max(std::abs(ya[i]), std::abs(yb[i]));
            sum += (v[i] / sc) * (v[i] / sc);
        }
        return std::sqrt(sum / Dim);
    };

    double t = p.t0;
    S y = p.y0;
    S k1 = eval(t, y);
    if (!all_finite<Dim>(y) || !all_finite<Dim>(k1))
        throw DomainEscape("right-hand side is not finite at the initial point", t);

    while (next_sample < p.sample_times.size() && p.sample_times[next_sample] <= t)
        sol.samples.push_back(y), ++next_sample;

    // Initial step (Hairer, Norsett & Wanner heuristic).
    double h;
    {
        const double d0 = scaled_norm(y, y, y);
        const double d1n = scaled_norm(k1, y, y);
        double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 * span : 0.01 * d0 / d1n;
        h0 = std::min(h0, h_cap);
        const S y1 = axpy(y, h0, {{1.0, &k1}});
        const S f1 = eval(t + h0, y1);
        S diff{};
        for (std::size_t i = 0; i < Dim; ++i) diff[i] = f1[i] - k1[i];
        const double d2 = all_finite<Dim>(f1) ? scaled_norm(diff, y, y) / h0 : 1e300;
        const double dm = std::max(d1n, d2);
        const double h1 = dm <= 1e-15 ? std::max(1e-6 * span, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
        h = std::min({100.0 * h0, h1, h_cap});
    }

    bool last_rejected = false;
    bool last_nonfinite = false;
    while (t < p.t1) {
        if (sol.steps + sol.rejected >= p.options.max_steps)
            throw IntegrationFailure("IVP exceeded the maximum number of steps", t);
        if (h < h_floor) {
            const std::string what = "IVP step size underflow at t = " + std::to_string(t);
            if (last_nonfinite) throw DomainEscape(what + " (non-finite right-hand side)", t);
            throw IntegrationFailure(what, t);
        }
        bool final_step = false;
        if (t + h >= p.t1) {
            h = p.t1 - t;
            final_step = true;
        }

        const S k2 = eval(t + c2 * h, axpy(y, h, {{a21, &k1}}));
        const S k3 = eval(t + c3 * h, axpy(y, h, {{a31, &k1}, {a32, &k2}}));
        const S k4 = eval(t + c4 * h, axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        const S k5 = eval(t + c5 * h, axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        const S k6 = eval(t + h, axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
        const S y_new = axpy(y, h, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
        const S k7 = eval(t + h, y_new);

        const bool finite = all_finite<Dim>(k2) && all_finite<Dim>(k3) && all_finite<Dim>(k4) &&
                            all_finite<Dim>(k5) && all_finite<Dim>(k6) && all_finite<Dim>(k7) &&
                            all_finite<Dim>(y_new);
        if (!finite) {
            ++sol.rejected;
            last_rejected = true;
            last_nonfinite = true;
            h *= 0.25;
            continue;
        }
        last_nonfinite = false;

        S err{};
        for (std::size_t i = 0; i < Dim; ++i)
            err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double en = scaled_norm(err, y, y_new);

        if (en > 1.0) {
            ++sol.rejected;
            h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
            last_rejected = true;
            continue;
        }

        // Accepted: emit dense output for samples inside (t, t + h].
        const double t_new = final_step ? p.t1 : t + h;
        if (next_sample < p.sample_times.size() && p.sample_times[next_sample] <= t_new) {
            S ydiff{}, bspl{}, r4{}, r5{};
            for (std::size_t i = 0; i < Dim; ++i) {
                ydiff[i] = y_new[i] - y[i];
                bspl[i] = h * k1[i] - ydiff[i];
                r4[i] = ydiff[i] - h * k7[i] - bspl[i];
                r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
            }
            while (next_sample < p.sample_times.size() && p.sample_times[next_sample] <= t_new) {
                const double ts = p.sample_times[next_sample];
                if (ts == t_new) {
                    sol.samples.push_back(y_new);
                } else {
                    const double th = (ts - t) / h;
                    const double th1 = 1.0 - th;
                    S ys{};
                    for (std::size_t i = 0; i < Dim; ++i)
                        ys[i] = y[i] + th * (ydiff[i] + th1 * (bspl[i] + th * (r4[i] + th1 * r5[i])));
                    sol.samples.push_back(ys);
                }
                ++next_sample;
            }
        }

        t = t_new;
        y = y_new;
        k1 = k7;
        ++sol.steps;
        if (final_step) break;

        double fac = 0.9 * std::pow(std::max(en, 1e-10), -0.2);
        fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 10.0);
        h = std::min(h * fac, h_cap);
        last_rejected = false;
    }

    sol.final_state = y;
    return sol;
}

} // namespace phicont
