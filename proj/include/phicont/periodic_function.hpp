#pragma once

// Uniform-grid T-periodic functions with trigonometric interpolation,
// spectral differentiation and trapezoidal quadrature.

#include "phicont/error.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace phicont {

struct PeriodicGrid {
    double T = 1.0;
    int N = 256;

    PeriodicGrid() = default;
    PeriodicGrid(double period, int n) : T(period), N(n) {
        if (!(period > 0.0)) throw ConfigError("grid period must be positive");
        if (n <= 0 || n % 2 != 0) throw ConfigError("grid size must be a positive even integer");
    }

    double spacing() const { return T / N; }
    double node(int j) const { return T * j / N; }
    double omega() const { return 2.0 * std::numbers::pi / T; }

    bool operator==(const PeriodicGrid&) const = default;
};

class PeriodicFunction {
public:
    PeriodicFunction() = default;
    PeriodicFunction(PeriodicGrid grid, std::vector<double> samples)
        : grid_(grid), samples_(std::move(samples)) {
        if (samples_.size() != static_cast<std::size_t>(grid_.N))
            throw ConfigError("sample count does not match grid size");
    }

    template <class Fn>
    static PeriodicFunction sample(PeriodicGrid grid, Fn&& fn) {
        std::vector<double> v(grid.N);
        for (int j = 0; j < grid.N; ++j) v[j] = fn(grid.node(j));
        return {grid, std::move(v)};
    }

    static PeriodicFunction constant(PeriodicGrid grid, double c) {
        return {grid, std::vector<double>(grid.N, c)};
    }

    const PeriodicGrid& grid() const { return grid_; }
    std::span<const double> samples() const { return samples_; }
    double operator[](int j) const { return samples_[j]; }
    int size() const { return grid_.N; }
    bool empty() const { return samples_.empty(); }

    /// Pointwise application of fn to the samples.
    template <class Fn>
    PeriodicFunction map(Fn&& fn) const {
        std::vector<double> v(samples_.size());
        std::transform(samples_.begin(), samples_.end(), v.begin(), fn);
        return {grid_, std::move(v)};
    }

    double sup_on_nodes() const {
        double m = 0.0;
        for (double s : samples_) m = std::max(m, std::abs(s));
        return m;
    }

    /// Evaluates the trigonometric interpolant; O(N) per call.
    double eval(double t) const;

    friend PeriodicFunction operator+(const PeriodicFunction& a, const PeriodicFunction& b) {
        return combine(a, b, [](double x, double y) { return x + y; });
    }
    friend PeriodicFunction operator-(const PeriodicFunction& a, const PeriodicFunction& b) {
        return combine(a, b, [](double x, double y) { return x - y; });
    }
    friend PeriodicFunction operator*(const PeriodicFunction& a, const PeriodicFunction& b) {
        return combine(a, b, [](double x, double y) { return x * y; });
    }
    friend PeriodicFunction operator*(double s, const PeriodicFunction& a) {
        return a.map([s](double x) { return s * x; });
    }
    friend PeriodicFunction operator+(const PeriodicFunction& a, double c) {
        return a.map([c](double x) { return x + c; });
    }

private:
    template <class Op>
    static PeriodicFunction combine(const PeriodicFunction& a, const PeriodicFunction& b, Op op) {
        if (!(a.grid_ == b.grid_)) throw ConfigError("periodic functions live on different grids");
        std::vector<double> v(a.samples_.size());
        for (std::size_t j = 0; j < v.size(); ++j) v[j] = op(a.samples_[j], b.samples_[j]);
        return {a.grid_, std::move(v)};
    }

    PeriodicGrid grid_;
    std::vector<double> samples_;
};

/// Discrete Fourier coefficients c_k = (1/N) sum_j f_j exp(-i k omega t_j), k = 0..N/2.
/// The interpolant is c_0 + 2 Re sum_{0<k<N/2} c_k e^{ik omega t} + c_{N/2} cos(N omega t / 2).
class Spectrum {
public:
    explicit Spectrum(const PeriodicFunction& f) : grid_(f.grid()), coeffs_(f.size() / 2 + 1) {
        const int n = f.size();
        const auto tw = twiddles(n);
        for (int k = 0; k <= n / 2; ++k) {
            std::complex<double> acc = 0.0;
            for (int j = 0; j < n; ++j) acc += f[j] * std::conj(tw[(static_cast<long>(j) * k) % n]);
            coeffs_[k] = acc / static_cast<double>(n);
        }
        coeffs_[0] = coeffs_[0].real();
        coeffs_[n / 2] = coeffs_[n / 2].real();
    }

    const PeriodicGrid& grid() const { return grid_; }
    std::span<const std::complex<double>> coefficients() const { return coeffs_; }
    std::span<std::complex<double>> coefficients() { return coeffs_; }

    double eval(double t) const {
        const std::complex<double> z = std::polar(1.0, grid_.omega() * t);
        std::complex<double> zk = z;
        const int half = grid_.N / 2;
        double sum = 0.0;
        for (int k = 1; k < half; ++k) {
            sum += (coeffs_[k] * zk).real();
            zk *= z;
        }
        return coeffs_[0].real() + 2.0 * sum +
               coeffs_[half].real() * std::cos(half * grid_.omega() * t);
    }

    /// Values of the interpolant at M uniformly spaced points, M a multiple of N.
    std::vector<double> synthesize(int m) const {
        const int n = grid_.N;
        const auto tw = twiddles(m);
        std::vector<double> out(m);
        for (int j = 0; j < m; ++j) {
            double sum = 0.0;
            for (int k = 1; k < n / 2; ++k) sum += (coeffs_[k] * tw[(static_cast<long>(j) * k) % m]).real();
            const double nyq = coeffs_[n / 2].real() * tw[(static_cast<long>(j) * (n / 2)) % m].real();
            out[j] = coeffs_[0].real() + 2.0 * sum + nyq;
        }
        return out;
    }

    PeriodicFunction to_function() const {
        return {grid_, synthesize(grid_.N)};
    }

    /// exp(2 pi i m / n), m = 0..n-1
    static std::vector<std::complex<double>> twiddles(int n) {
        std::vector<std::complex<double>> tw(n);
        for (int m = 0; m < n; ++m) tw[m] = std::polar(1.0, 2.0 * std::numbers::pi * m / n);
        return tw;
    }

private:
    PeriodicGrid grid_;
    std::vector<std::complex<double>> coeffs_;
};

inline double PeriodicFunction::eval(double t) const { return Spectrum(*this).eval(t); }

/// Evaluates several interpolants on the same grid at one time, sharing the
/// powers of exp(i omega t).
class SpectrumBundle {
public:
    explicit SpectrumBundle(std::vector<Spectrum> members) : members_(std::move(members)) {
        if (members_.empty()) throw ConfigError("empty spectrum bundle");
        for (const auto& s : members_)
            if (!(s.grid() == members_.front().grid())) throw ConfigError("bundle grids differ");
        powers_.resize(members_.front().grid().N / 2);
    }

    std::size_t size() const { return members_.size(); }

    void eval(double t, std::span<double> out) {
        const auto& grid = members_.front().grid();
        const int half = grid.N / 2;
        const std::complex<double> z = std::polar(1.0, grid.omega() * t);
        std::complex<double> zk = z;
        for (int k = 1; k < half; ++k) {
            powers_[k] = zk;
            zk *= z;
        }
        const double nyq = std::cos(half * grid.omega() * t);
        for (std::size_t m = 0; m < members_.size(); ++m) {
            const auto c = members_[m].coefficients();
            double sum = 0.0;
            for (int k = 1; k < half; ++k)
                sum += c[k].real() * powers_[k].real() - c[k].imag() * powers_[k].imag();
            out[m] = c[0].real() + 2.0 * sum + c[half].real() * nyq;
        }
    }

private:
    std::vector<Spectrum> members_;
    std::vector<std::complex<double>> powers_;
};

/// Trapezoidal mean (1/T) * integral over one period. Compensated summation
/// about the first sample, so constants come back exactly.
inline double mean(const PeriodicFunction& f) {
    if (f.empty()) return 0.0;
    const double shift = f[0];
    double sum = 0.0, carry = 0.0;
    for (double s : f.samples()) {
        const double x = s - shift;
        const double t = sum + x;
        carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    return shift + (sum + carry) / f.size();
}

/// Trapezoidal integral over one period.
inline double integral(const PeriodicFunction& f) { return mean(f) * f.grid().T; }

/// Spectral derivative of the given order. The Nyquist mode is dropped for odd orders.
inline PeriodicFunction derivative(const PeriodicFunction& f, int order = 1) {
    if (order < 0) throw ConfigError("derivative order must be nonnegative");
    if (order == 0) return f;
    Spectrum s(f + (-mean(f)));
    auto c = s.coefficients();
    const int half = f.size() / 2;
    const double omega = f.grid().omega();
    c[0] = 0.0;
    for (int k = 1; k <= half; ++k) {
        const std::complex<double> ik(0.0, k * omega);
        std::complex<double> factor = 1.0;
        for (int m = 0; m < order; ++m) factor *= ik;
        c[k] *= factor;
    }
    if (order % 2 == 1) c[half] = 0.0;
    c[half] = c[half].real();
    return s.to_function();
}

/// Zero-mean spectral antiderivative of f - mean(f).
inline PeriodicFunction antiderivative(const PeriodicFunction& f) {
    Spectrum s(f + (-mean(f)));
    auto c = s.coefficients();
    const int half = f.size() / 2;
    const double omega = f.grid().omega();
    c[0] = 0.0;
    for (int k = 1; k < half; ++k) c[k] /= std::complex<double>(0.0, k * omega);
    c[half] = 0.0;
    return s.to_function();
}

struct Norms {
    double sup_norm = 0.0;
    double l2_norm = 0.0;     ///< (integral of f^2 over a period)^(1/2)
    double h1_seminorm = 0.0; ///< (integral of f'^2 over a period)^(1/2)
};

inline constexpr int kSupRefinement = 8;

inline Norms norms(const PeriodicFunction& f) {
    Norms n;
    const auto fine = Spectrum(f).synthesize(kSupRefinement * f.size());
    for (double v : fine) n.sup_norm = std::max(n.sup_norm, std::abs(v));
    for (double v : f.samples()) n.sup_norm = std::max(n.sup_norm, std::abs(v));
    n.l2_norm = std::sqrt(integral(f * f));
    const auto df = derivative(f, 1);
    n.h1_seminorm = std::sqrt(integral(df * df));
    return n;
}

/// Max and min of the interpolant over the refined mesh.
inline std::pair<double, double> range(const PeriodicFunction& f) {
    auto fine = Spectrum(f).synthesize(kSupRefinement * f.size());
    const auto [lo, hi] = std::minmax_element(fine.begin(), fine.end());
    return {*lo, *hi};
}

} // namespace phicont
