#pragma once

// Problem definition for T-periodic solutions of
//     (phi(u'))' + lambda*u' + k*g(u) = mu + e(t)
// together with the built-in catalogs of phi and g.

#include "phicont/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace phicont {

using ScalarFn = std::function<double(double)>;

/// Increasing homeomorphism phi: (-a, a) -> R with phi(0) = 0.
struct PhiFunction {
    std::string name;
    double half_width = 1.0; ///< a
    double min_slope = 1.0;  ///< a0 = inf phi' over (-a, a)
    ScalarFn phi;
    ScalarFn dphi;
    ScalarFn d2phi;
    ScalarFn psi; ///< inverse of phi, maps R onto (-a, a)
};

struct ShapeTag {
    enum class Kind { periodic, saturating, vanishing_sign, strict_sign, other };

    Kind kind = Kind::other;
    double period = 0.0;       // periodic only
    double limit_minus = 0.0;  // saturating only
    double limit_plus = 0.0;

    static ShapeTag periodic_with(double p) { return {Kind::periodic, p, 0.0, 0.0}; }
    static ShapeTag saturating_between(double lo, double hi) { return {Kind::saturating, 0.0, lo, hi}; }
};

inline const char* to_string(ShapeTag::Kind kind) {
    switch (kind) {
    case ShapeTag::Kind::periodic: return "periodic";
    case ShapeTag::Kind::saturating: return "saturating";
    case ShapeTag::Kind::vanishing_sign: return "vanishing_sign";
    case ShapeTag::Kind::strict_sign: return "strict_sign";
    case ShapeTag::Kind::other: return "other";
    }
    return "other";
}

/// Restoring nonlinearity g with a finite bound on |g'|.
struct Nonlinearity {
    std::string name;
    ScalarFn g;
    ScalarFn dg;
    double slope_bound = 1.0; ///< G >= sup |g'|
    ShapeTag shape;
};

/// One Fourier term n*omega of the forcing.
struct Harmonic {
    int n = 1;
    double sin_amp = 0.0;
    double cos_amp = 0.0;
};

/// Zero-mean T-periodic forcing e(t).
struct Forcing {
    ScalarFn e_fn;
    std::string description;

    double operator()(double t) const { return e_fn(t); }

    /// Trigonometric polynomial without constant term; zero mean holds by construction.
    static Forcing trig(double period, std::vector<Harmonic> terms) {
        const double omega = 2.0 * std::numbers::pi / period;
        std::string desc;
        for (const auto& h : terms) {
            if (h.n < 1) throw ConfigError("forcing harmonic index must be >= 1");
            if (!desc.empty()) desc += " + ";
            desc += std::to_string(h.sin_amp) + "*sin(" + std::to_string(h.n) + "wt) + " +
                    std::to_string(h.cos_amp) + "*cos(" + std::to_string(h.n) + "wt)";
        }
        if (desc.empty()) desc = "0";
        return Forcing{[terms = std::move(terms), omega](double t) {
                           double sum = 0.0;
                           for (const auto& h : terms) {
                               const double arg = h.n * omega * t;
                               sum += h.sin_amp * std::sin(arg) + h.cos_amp * std::cos(arg);
                           }
                           return sum;
                       },
                       desc};
    }

    static Forcing zero() { return Forcing{[](double) { return 0.0; }, "0"}; }
};

struct ProblemSpec {
    PhiFunction phi;
    Nonlinearity g;
    double lambda = 0.0; ///< constant friction, >= 0
    double k = 1.0;      ///< > 0
    double T = 1.0;      ///< period
    Forcing e = Forcing::zero();
    int grid_size = 256; ///< even

    double omega() const { return 2.0 * std::numbers::pi / T; }

    /// Generalized global-parameter condition k*G < a0*omega.
    bool uniqueness_condition_holds() const { return k * g.slope_bound < phi.min_slope * omega(); }
};

inline PhiFunction make_phi(const std::string& name) {
    if (name == "relativistic") {
        auto outside = [](double z) { return !(std::abs(z) < 1.0); };
        constexpr double nan = std::numeric_limits<double>::quiet_NaN();
        return PhiFunction{
            name,
            1.0,
            1.0,
            [=](double z) { return outside(z) ? nan : z / std::sqrt((1.0 - z) * (1.0 + z)); },
            [=](double z) { return outside(z) ? nan : std::pow((1.0 - z) * (1.0 + z), -1.5); },
            [=](double z) { return outside(z) ? nan : 3.0 * z * std::pow((1.0 - z) * (1.0 + z), -2.5); },
            [](double w) { return w / std::sqrt(1.0 + w * w); },
        };
    }
    throw ConfigError("unknown phi catalog key: '" + name + "'");
}

inline Nonlinearity make_g(const std::string& name) {
    constexpr double pi = std::numbers::pi;
    if (name == "sin") {
        return Nonlinearity{name, [](double u) { return std::sin(u); },
                            [](double u) { return std::cos(u); }, 1.0,
                            ShapeTag::periodic_with(2.0 * pi)};
    }
    if (name == "atan") {
        return Nonlinearity{name, [](double u) { return std::atan(u); },
                            [](double u) { return 1.0 / (1.0 + u * u); }, 1.0,
                            ShapeTag::saturating_between(-pi / 2.0, pi / 2.0)};
    }
    if (name == "rational3") {
        return Nonlinearity{name, [](double u) { return 3.0 * u / (1.0 + u * u); },
                            [](double u) {
                                const double s = 1.0 + u * u;
                                return 3.0 * (1.0 - u * u) / (s * s);
                            },
                            3.0, ShapeTag{ShapeTag::Kind::vanishing_sign}};
    }
    throw ConfigError("unknown g catalog key: '" + name + "'");
}

struct ValidationReport {
    double forcing_mean = 0.0;
    bool forcing_zero_mean = true;

    double k_times_G = 0.0;
    double a0_times_omega = 0.0;
    bool uniqueness_regime = false; ///< k*G < a0*omega
    bool literal_slope_bound = false; ///< G <= 1, the unscaled hypothesis
    bool literal_uniqueness = false;  ///< G <= 1 and k < a0*omega

    double aT = 0.0;
    bool two_solution_hypothesis = false; ///< aT < pi*sqrt(3)
    double mu_window_half_width = 0.0;    ///< k*cos(aT/(2 sqrt 3)), meaningful when the above holds

    std::vector<std::string> warnings;

    bool operator==(const ValidationReport&) const = default;
};

inline constexpr double kForcingMeanTolerance = 1e-10;

/// Checks the structural hypotheses. Throws ValidationError when the forcing
/// has nonzero mean or a parameter is out of range; an unmet uniqueness
/// condition is reported as a warning only.
inline ValidationReport validate_spec(const ProblemSpec& spec) {
    if (!(spec.T > 0.0)) throw ValidationError("period T must be positive");
    if (!(spec.k > 0.0)) throw ValidationError("k must be positive");
    if (!(spec.lambda >= 0.0)) throw ValidationError("lambda must be nonnegative");
    if (spec.grid_size <= 0 || spec.grid_size % 2 != 0)
        throw ValidationError("grid size N must be a positive even integer");
    if (!(spec.phi.half_width > 0.0) || !(spec.phi.min_slope > 0.0))
        throw ValidationError("phi must have positive half width and slope floor");
    if (!spec.e.e_fn) throw ValidationError("forcing function is empty");

    ValidationReport r;

    // Trapezoid on a fine uniform mesh is exact for trigonometric polynomials
    // of degree below the mesh size.
    const int m = std::max(4096, 16 * spec.grid_size);
    double sum = 0.0;
    for (int j = 0; j < m; ++j) sum += spec.e(spec.T * j / m);
    r.forcing_mean = sum / m;
    r.forcing_zero_mean = std::abs(r.forcing_mean) <= kForcingMeanTolerance;
    if (!r.forcing_zero_mean)
        throw ValidationError("forcing e(t) has nonzero mean " + std::to_string(r.forcing_mean));

    const double G = spec.g.slope_bound;
    r.k_times_G = spec.k * G;
    r.a0_times_omega = spec.phi.min_slope * spec.omega();
    r.uniqueness_regime = r.k_times_G < r.a0_times_omega;
    r.literal_slope_bound = G <= 1.0;
    r.literal_uniqueness = r.literal_slope_bound && spec.k < r.a0_times_omega;

    r.aT = spec.phi.half_width * spec.T;
    r.two_solution_hypothesis = r.aT < std::numbers::pi * std::sqrt(3.0);
    r.mu_window_half_width =
        r.two_solution_hypothesis ? spec.k * std::cos(r.aT / (2.0 * std::sqrt(3.0))) : 0.0;

    if (!r.uniqueness_regime)
        r.warnings.push_back("k*G >= a0*omega: xi is not guaranteed to be a global parameter; "
                             "uniqueness and continuation guarantees are void");
    if (!r.literal_slope_bound)
        r.warnings.push_back("sup|g'| exceeds 1; uniqueness test applied with k scaled by G");
    return r;
}

} // namespace phicont
