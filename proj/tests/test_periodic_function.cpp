#include <catch2/catch_amalgamated.hpp>

#include "phicont/periodic_function.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace phicont;

namespace {

constexpr double pi = std::numbers::pi;

double max_node_error(const PeriodicFunction& f, const std::function<double(double)>& exact) {
    double e = 0.0;
    for (int j = 0; j < f.size(); ++j) e = std::max(e, std::abs(f[j] - exact(f.grid().node(j))));
    return e;
}

struct RandomHarmonics {
    std::vector<double> a, b; // cos and sin amplitudes for n = 1..size
    double omega;
    double operator()(double t) const {
        double s = 0.0;
        for (std::size_t n = 1; n <= a.size(); ++n)
            s += a[n - 1] * std::cos(n * omega * t) + b[n - 1] * std::sin(n * omega * t);
        return s;
    }
};

RandomHarmonics random_zero_mean(std::mt19937& rng, double T, int max_harmonic) {
    std::uniform_int_distribution<int> count(1, max_harmonic);
    std::normal_distribution<double> amp(0.0, 1.0);
    RandomHarmonics h{{}, {}, 2.0 * pi / T};
    const int m = count(rng);
    for (int n = 0; n < m; ++n) {
        h.a.push_back(amp(rng) / (n + 1));
        h.b.push_back(amp(rng) / (n + 1));
    }
    return h;
}

} // namespace

TEST_CASE("grid nodes and spacing", "[periodic_fn]") {
    const PeriodicGrid g(0.3, 64);
    CHECK(g.spacing() == 0.3 / 64);
    for (int j = 1; j < g.N; ++j) CHECK(g.node(j) > g.node(j - 1));
    CHECK_THROWS_AS(PeriodicGrid(1.0, 63), ConfigError);
    CHECK_THROWS_AS(PeriodicGrid(0.0, 64), ConfigError);
}

TEST_CASE("trapezoidal mean", "[periodic_fn]") {
    const PeriodicGrid g(1.0, 64);
    const double w = g.omega();
    CHECK(std::abs(mean(PeriodicFunction::sample(g, [&](double t) { return std::sin(w * t); }))) < 1e-14);
    CHECK(mean(PeriodicFunction::constant(g, 3.7)) == 3.7);
    const auto s2 = PeriodicFunction::sample(g, [&](double t) { return std::pow(std::sin(w * t), 2); });
    CHECK(std::abs(mean(s2) - 0.5) < 1e-12);
}

TEST_CASE("spectral derivative", "[periodic_fn]") {
    const PeriodicGrid g(1.0, 64);
    const double w = g.omega();
    const auto s = PeriodicFunction::sample(g, [&](double t) { return std::sin(w * t); });
    CHECK(max_node_error(derivative(s, 1), [&](double t) { return w * std::cos(w * t); }) < 1e-10);

    const auto c = PeriodicFunction::sample(g, [&](double t) { return std::cos(w * t); });
    CHECK(max_node_error(derivative(c, 2), [&](double t) { return -w * w * std::cos(w * t); }) < 1e-9);

    CHECK(derivative(PeriodicFunction::constant(g, 2.5), 1).sup_on_nodes() < 1e-14);

    SECTION("non-unit period and higher harmonics") {
        const PeriodicGrid g2(0.2, 128);
        const double w2 = g2.omega();
        const auto f = PeriodicFunction::sample(g2, [&](double t) { return std::sin(3 * w2 * t) + 0.5 * std::cos(7 * w2 * t); });
        const auto df = derivative(f, 1);
        CHECK(max_node_error(df, [&](double t) { return 3 * w2 * std::cos(3 * w2 * t) - 3.5 * w2 * std::sin(7 * w2 * t); }) <
              1e-9 * w2 * 7);
    }
    SECTION("Nyquist mode is dropped for odd orders") {
        const PeriodicGrid g8(1.0, 8);
        const auto nyq = PeriodicFunction::sample(g8, [&](double t) { return std::cos(4 * g8.omega() * t); });
        CHECK(derivative(nyq, 1).sup_on_nodes() < 1e-12);
        const auto d2 = derivative(nyq, 2);
        const double k = 4 * g8.omega();
        CHECK(max_node_error(d2, [&](double t) { return -k * k * std::cos(k * t); }) < 1e-9);
    }
}

TEST_CASE("interpolant reproduces samples and is periodic", "[periodic_fn]") {
    std::mt19937 rng(7);
    const PeriodicGrid g(0.7, 32);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(g.N);
    for (auto& x : v) x = u(rng);
    const PeriodicFunction f(g, v);
    const Spectrum s(f);
    for (int j = 0; j < g.N; ++j) CHECK(std::abs(s.eval(g.node(j)) - v[j]) < 1e-13);
    for (double t : {0.013, 0.31, 0.55}) CHECK(std::abs(s.eval(t + g.T) - s.eval(t)) < 1e-12);

    std::vector<Spectrum> members{s, Spectrum(derivative(f, 1))};
    SpectrumBundle bundle(members);
    std::array<double, 2> out{};
    bundle.eval(0.123, out);
    CHECK(std::abs(out[0] - s.eval(0.123)) < 1e-13);
    CHECK(std::abs(out[1] - members[1].eval(0.123)) < 1e-10);
}

TEST_CASE("norms of a single harmonic", "[periodic_fn]") {
    const PeriodicGrid g(1.0, 64);
    const double w = g.omega();
    const auto n = norms(PeriodicFunction::sample(g, [&](double t) { return std::sin(w * t); }));
    CHECK(std::abs(n.sup_norm - 1.0) < 1e-8);
    CHECK(std::abs(n.l2_norm * n.l2_norm - 0.5) < 1e-8);
    CHECK(std::abs(n.h1_seminorm * n.h1_seminorm - w * w / 2) < 1e-8);
    CHECK(n.sup_norm * n.sup_norm <= g.T / 12.0 * n.h1_seminorm * n.h1_seminorm);

    const auto z = norms(PeriodicFunction::constant(g, 0.0));
    CHECK(z.sup_norm == 0.0);
    CHECK(z.l2_norm == 0.0);
    CHECK(z.h1_seminorm == 0.0);
}

TEST_CASE("Wirtinger and Sobolev inequalities on random band-limited functions", "[periodic_fn][property]") {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> period(0.1, 5.0);
    for (int trial = 0; trial < 200; ++trial) {
        const PeriodicGrid g(period(rng), 64);
        const auto h = random_zero_mean(rng, g.T, 20);
        const auto f = PeriodicFunction::sample(g, h);
        const auto n = norms(f);
        const double w = g.omega();
        const double h1sq = n.h1_seminorm * n.h1_seminorm;
        const double l2sq = n.l2_norm * n.l2_norm;
        INFO("trial " << trial << " T = " << g.T << " harmonics " << h.a.size());
        CHECK(h1sq >= w * w * l2sq * (1.0 - 1e-12));
        if (h.a.size() == 1) CHECK(std::abs(h1sq - w * w * l2sq) <= 1e-10 * std::max(1.0, h1sq));
        else CHECK(h1sq - w * w * l2sq > 1e-10 * h1sq);
        CHECK(n.sup_norm * n.sup_norm <= g.T / 12.0 * h1sq * (1.0 + 1e-12));
        CHECK(std::abs(mean(derivative(f, 1))) < 1e-12 * std::max(1.0, n.h1_seminorm));
    }
}

TEST_CASE("antiderivative round trip", "[periodic_fn][property]") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const PeriodicGrid g(1.0 + trial * 0.05, 64);
        const auto f = PeriodicFunction::sample(g, random_zero_mean(rng, g.T, 25));
        const auto F = antiderivative(f);
        CHECK(std::abs(mean(F)) < 1e-14);
        CHECK((derivative(F, 1) - f).sup_on_nodes() < 1e-10);
    }
}
