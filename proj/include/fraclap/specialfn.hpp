#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "errors.hpp"
#include "quadrature.hpp"

namespace fraclap {

/// Fractional order s in (0,2], split as s = m + sigma.
///
/// For non-integer s, m = floor(s) and sigma in (0,1). Integer orders follow the
/// C^{m,sigma} convention with sigma = 1: s = 1 gives (m, sigma) = (0, 1) and is
/// the local case of the Laplacian; s = 2 gives (1, 1), the bilaplacian.
class FracOrder {
public:
    explicit FracOrder(double s) : s_(s) {
        if (!(s > 0.0 && s <= 2.0) || !std::isfinite(s)) {
            std::ostringstream os;
            os << "fractional order s = " << s << " must lie in (0,2]";
            throw DomainError(os.str());
        }
        if (s == std::floor(s)) {
            m_ = static_cast<int>(s) - 1;
            sigma_ = 1.0;
        } else {
            m_ = static_cast<int>(std::floor(s));
            sigma_ = s - m_;
        }
    }

    double s() const noexcept { return s_; }
    int m() const noexcept { return m_; }
    double sigma() const noexcept { return sigma_; }
    bool is_local() const noexcept { return sigma_ == 1.0; }
    bool is_higher_order() const noexcept { return s_ > 1.0 && s_ < 2.0; }

    /// The order s - 1 (needed for the Gamma_{s-1} kernel and the composed operator).
    FracOrder lowered() const { return FracOrder(s_ - 1.0); }

private:
    double s_;
    int m_ = 0;
    double sigma_ = 0.0;
};

namespace detail {

inline double lanczos_gamma(double x) {
    // g = 7, 9 coefficients; valid for x >= 0.5.
    static constexpr std::array<double, 9> p = {
        0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
        771.32342877765313,   -176.61502916214059,   12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    x -= 1.0;
    double a = p[0];
    const double t = x + 7.5;
    for (int i = 1; i < 9; ++i) a += p[i] / (x + i);
    return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, x + 0.5) * std::exp(-t) * a;
}

inline bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

} // namespace detail

/// Gamma function via the Lanczos approximation, reflection for x < 1/2.
inline double gamma_fn(double x) {
    if (detail::is_nonpositive_integer(x)) {
        std::ostringstream os;
        os << "gamma_fn: pole at x = " << x;
        throw DomainError(os.str());
    }
    if (x < 0.5) {
        const double s = std::sin(std::numbers::pi * x);
        return std::numbers::pi / (s * detail::lanczos_gamma(1.0 - x));
    }
    return detail::lanczos_gamma(x);
}

/// 1/Gamma(x), an entire function: exactly 0 at the poles of Gamma.
inline double rgamma(double x) {
    if (detail::is_nonpositive_integer(x)) return 0.0;
    return 1.0 / gamma_fn(x);
}

struct NormalizationSet {
    double omega_N = 0.0;      ///< surface measure of S^{N-1}
    double k_Ns = 0.0;         ///< Green function constant
    double gamma_Nsigma = 0.0; ///< nonlocal Poisson kernel constant, sigma = frac. part of s
    double c_Ns = 0.0;         ///< fourth-difference constant (as printed; symbol 2|xi|^{2s})
    double e_Ns = 0.0;         ///< second-difference constant for order s-1 (NaN for s <= 1)
};

/// Surface measure omega_N = 2 pi^{N/2} / Gamma(N/2).
inline double omega(int N) { return 2.0 * std::pow(std::numbers::pi, 0.5 * N) / gamma_fn(0.5 * N); }

inline NormalizationSet constants(const FracOrder& order, int N) {
    if (N < 1) throw DomainError("constants: dimension N must be >= 1");
    const double s = order.s();
    const double sigma = order.sigma();
    const double piN2 = std::pow(std::numbers::pi, 0.5 * N);
    NormalizationSet c;
    c.omega_N = omega(N);
    const double gs = gamma_fn(s);
    c.k_Ns = std::pow(2.0, 1.0 - 2.0 * s) / (c.omega_N * gs * gs);
    c.gamma_Nsigma = 2.0 * rgamma(sigma) * rgamma(1.0 - sigma) / c.omega_N;
    if (s == 1.0) {
        // Gamma(-s)(1 - 4^{1-s}) -> ln 4 as s -> 1.
        c.c_Ns = gamma_fn(0.5 * N + 1.0) / (piN2 * std::log(4.0));
    } else if (s == 2.0) {
        c.c_Ns = 0.0;
    } else {
        c.c_Ns = gamma_fn(0.5 * N + s) / (piN2 * gamma_fn(-s) * (1.0 - std::pow(4.0, 1.0 - s)));
    }
    if (s > 1.0)
        c.e_Ns = -std::pow(4.0, s - 1.0) * gamma_fn(0.5 * N + s - 1.0) * rgamma(1.0 - s) / piN2;
    else
        c.e_Ns = std::numeric_limits<double>::quiet_NaN();
    return c;
}

namespace detail {

// rho^s/s (1+rho)^{-N/2} 2F1(N/2, 1; s+1; rho/(1+rho)); fast for rho <= 1.
inline double boggio_series(double rho, double s, int N) {
    if (rho == 0.0) return 0.0;
    const double x = rho / (1.0 + rho);
    const double a = 0.5 * N;
    double term = 1.0, sum = 1.0;
    for (int k = 0; k < 200; ++k) {
        term *= (a + k) / (s + 1.0 + k) * x;
        sum += term;
        if (std::abs(term) < 1e-17 * sum) break;
    }
    return std::pow(rho, s) / s * std::pow(1.0 + rho, -a) * sum;
}

// Elementary antiderivatives, accurate for rho >= 1. Returns NaN when none applies.
inline double boggio_closed(double rho, double s, int N) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (N == 1 && 2.0 * s == std::floor(2.0 * s) && s <= 4.0) {
        const double sq = std::sqrt(1.0 + rho);
        double prev = 0.0, cur = 0.0, order = 0.0;
        if (2.0 * s == std::floor(2.0 * s) && std::floor(s) != s) {
            cur = 2.0 * std::asinh(std::sqrt(rho));
            order = 0.5;
        } else {
            cur = 2.0 * (sq - 1.0);
            order = 1.0;
        }
        while (order < s) {
            prev = cur;
            order += 1.0;
            cur = (std::pow(rho, order - 1.0) * sq - (order - 1.0) * prev) / (order - 0.5);
        }
        return cur;
    }
    if (N == 2 && s == 1.0) return std::log1p(rho);
    if (N == 2 && s == 2.0) return rho - std::log1p(rho);
    if (N == 3 && s == 1.0) return 2.0 * (1.0 - 1.0 / std::sqrt(1.0 + rho));
    if (N == 3 && s == 2.0) {
        const double sq = std::sqrt(1.0 + rho);
        return 2.0 * sq + 2.0 / sq - 4.0;
    }
    if (N == 4 && s == 1.0) return rho / (1.0 + rho);
    if (N == 4 && s == 2.0) return std::log1p(rho) + 1.0 / (1.0 + rho) - 1.0;
    return nan;
}

} // namespace detail

/// int_0^rho t^{s-1} (1+t)^{-N/2} dt.
inline double boggio_integral(double rho, const FracOrder& order, int N) {
    if (!(rho >= 0.0)) {
        std::ostringstream os;
        os << "boggio_integral: rho = " << rho << " must be >= 0";
        throw DomainError(os.str());
    }
    const double s = order.s();
    if (rho <= 1.0) return detail::boggio_series(rho, s, N);
    if (const double c = detail::boggio_closed(rho, s, N); !std::isnan(c)) return c;
    // log-variable quadrature on [1, rho]; the integrand is smooth and monotone there.
    QuadratureConfig cfg;
    cfg.rel_tol = 1e-13;
    cfg.abs_tol = 1e-300;
    const double half_n = 0.5 * N;
    auto g = [&](double tau) {
        const double e = std::exp(tau);
        return std::exp(s * tau) * std::pow(1.0 + e, -half_n);
    };
    const auto r = integrate_adaptive(g, 0.0, std::log(rho), cfg);
    return detail::boggio_series(1.0, s, N) + r.value;
}

} // namespace fraclap
