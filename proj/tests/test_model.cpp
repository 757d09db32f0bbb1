#include <catch2/catch_amalgamated.hpp>

#include "phicont/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>

using namespace phicont;
using Catch::Approx;

namespace {

ProblemSpec fig3_spec() {
    ProblemSpec s;
    s.phi = make_phi("relativistic");
    s.g = make_g("sin");
    s.k = 0.1;
    s.lambda = 0.1;
    s.T = 1.0;
    s.e = Forcing::trig(1.0, {{1, 0.0, 0.15}});
    return s;
}

} // namespace

TEST_CASE("relativistic phi catalog entry", "[model]") {
    const auto phi = make_phi("relativistic");
    CHECK(phi.phi(0.0) == 0.0);
    CHECK(phi.dphi(0.0) == 1.0);
    CHECK(phi.min_slope == 1.0);
    CHECK(phi.half_width == 1.0);
    CHECK(std::abs(phi.psi(phi.phi(0.5)) - 0.5) < 1e-12);
    // 1/sqrt(2e-6) ~ 707 at a - 1e-6; the 1e3 level is passed at a - 1e-7.
    CHECK(std::abs(phi.phi(1.0 - 1e-6)) > 700.0);
    CHECK(std::abs(phi.phi(1.0 - 1e-7)) > 1e3);
    CHECK(std::abs(phi.phi(-(1.0 - 1e-7))) > 1e3);
    CHECK(std::isnan(phi.phi(1.0)));
}

TEST_CASE("phi inverse identities and slope floor on meshes", "[model][property]") {
    const auto phi = make_phi("relativistic");
    const double a = phi.half_width;
    const double delta = 1e-3;
    for (int i = 0; i <= 2000; ++i) {
        const double z = -a + delta + (2.0 * (a - delta)) * i / 2000.0;
        INFO("z = " << z);
        CHECK(std::abs(phi.psi(phi.phi(z)) - z) < 1e-12);
        CHECK(phi.dphi(z) >= phi.min_slope);
        CHECK(phi.dphi(z) > 0.0);
    }
    for (int i = 0; i <= 2000; ++i) {
        const double w = -1e3 + 2e3 * i / 2000.0;
        INFO("w = " << w);
        // phi has condition number 1 + w^2 at psi(w); the round trip is exact up to that.
        const double tol = 1e-12 + 8.0 * std::numeric_limits<double>::epsilon() * std::abs(w) * (1.0 + w * w);
        CHECK(std::abs(phi.phi(phi.psi(w)) - w) <= tol);
        if (std::abs(w) <= 1.0) CHECK(std::abs(phi.phi(phi.psi(w)) - w) <= 1e-12);
    }
}

TEST_CASE("catalog derivatives agree with centered differences", "[model][property]") {
    auto rel_fd = [](const ScalarFn& f, const ScalarFn& df, double x) {
        const double h = 1e-5 * std::max(1.0, std::abs(x));
        const double fd = (f(x + h) - f(x - h)) / (2.0 * h);
        return std::abs(fd - df(x)) / std::max(1.0, std::abs(df(x)));
    };
    const auto phi = make_phi("relativistic");
    for (double z = -0.9; z <= 0.9; z += 0.05) {
        CHECK(rel_fd(phi.phi, phi.dphi, z) < 1e-6);
        CHECK(rel_fd(phi.dphi, phi.d2phi, z) < 1e-6);
    }
    for (const char* key : {"sin", "atan", "rational3"}) {
        const auto g = make_g(key);
        for (double u = -20.0; u <= 20.0; u += 0.37) {
            INFO(key << " u = " << u);
            CHECK(rel_fd(g.g, g.dg, u) < 1e-6);
        }
    }
}

TEST_CASE("nonlinearity catalog shapes and slope bounds", "[model]") {
    const auto s = make_g("sin");
    CHECK(s.shape.kind == ShapeTag::Kind::periodic);
    CHECK(s.shape.period == Approx(2.0 * std::numbers::pi));
    CHECK(std::abs(s.g(1.3 + 2.0 * std::numbers::pi) - s.g(1.3)) < 1e-12);

    const auto at = make_g("atan");
    CHECK(at.shape.kind == ShapeTag::Kind::saturating);
    CHECK(at.shape.limit_minus == Approx(-std::numbers::pi / 2));
    CHECK(at.shape.limit_plus == Approx(std::numbers::pi / 2));

    const auto r3 = make_g("rational3");
    CHECK(r3.shape.kind == ShapeTag::Kind::vanishing_sign);
    CHECK(r3.dg(0.0) == 3.0);
    CHECK(r3.slope_bound == 3.0);

    for (const auto& g : {s, at, r3}) {
        for (int i = 0; i <= 20000; ++i) {
            const double u = -100.0 + 200.0 * i / 20000.0;
            REQUIRE(std::abs(g.dg(u)) <= g.slope_bound);
            if (g.shape.kind == ShapeTag::Kind::periodic)
                REQUIRE(std::abs(g.g(u + g.shape.period) - g.g(u)) < 1e-12);
            if (g.shape.kind == ShapeTag::Kind::saturating) {
                REQUIRE(g.g(u) > g.shape.limit_minus);
                REQUIRE(g.g(u) < g.shape.limit_plus);
            }
        }
    }
}

TEST_CASE("unknown catalog keys are configuration errors", "[model]") {
    CHECK_THROWS_AS(make_phi("classical"), ConfigError);
    CHECK_THROWS_AS(make_g("cos"), ConfigError);
}

TEST_CASE("validate_spec on the shipped configurations", "[model]") {
    SECTION("relativistic pendulum") {
        const auto r = validate_spec(fig3_spec());
        CHECK(r.forcing_zero_mean);
        CHECK(r.k_times_G == Approx(0.1));
        CHECK(r.a0_times_omega == Approx(2.0 * std::numbers::pi));
        CHECK(r.uniqueness_regime);
        CHECK(r.literal_uniqueness);
        CHECK(r.two_solution_hypothesis);
        CHECK(r.aT == 1.0);
        CHECK(r.mu_window_half_width == Approx(0.1 * std::cos(1.0 / (2.0 * std::sqrt(3.0)))));
        CHECK(r.mu_window_half_width / 0.1 == Approx(0.9586).margin(1e-4));
        CHECK(r.warnings.empty());
    }
    SECTION("rational nonlinearity with slope bound 3") {
        auto s = fig3_spec();
        s.g = make_g("rational3");
        s.T = 0.2;
        s.lambda = 0.05;
        s.e = Forcing::trig(0.2, {{1, 0.45, 0.0}});
        const auto r = validate_spec(s);
        CHECK(r.k_times_G == Approx(0.3));
        CHECK(r.a0_times_omega == Approx(2.0 * std::numbers::pi / 0.2));
        CHECK(r.uniqueness_regime);
        CHECK_FALSE(r.literal_slope_bound);
        CHECK_FALSE(r.literal_uniqueness);
        CHECK(r.warnings.size() == 1);
    }
    SECTION("outside the uniqueness regime is only a warning") {
        auto s = fig3_spec();
        s.k = 10.0;
        const auto r = validate_spec(s);
        CHECK_FALSE(r.uniqueness_regime);
        CHECK_FALSE(s.uniqueness_condition_holds());
        CHECK_FALSE(r.warnings.empty());
    }
    SECTION("forcing with nonzero mean is rejected") {
        auto s = fig3_spec();
        s.e = Forcing{[](double t) { return 0.01 + std::sin(2.0 * std::numbers::pi * t); }, "biased"};
        CHECK_THROWS_AS(validate_spec(s), ValidationError);
    }
    SECTION("odd grid size is rejected") {
        auto s = fig3_spec();
        s.grid_size = 255;
        CHECK_THROWS_AS(validate_spec(s), ValidationError);
    }
    SECTION("pure: identical inputs give identical reports") {
        CHECK(validate_spec(fig3_spec()) == validate_spec(fig3_spec()));
    }
}
