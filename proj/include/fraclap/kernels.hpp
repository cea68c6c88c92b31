#pragma once

#include <cmath>
#include <sstream>

#include "errors.hpp"
#include "geometry.hpp"
#include "specialfn.hpp"

namespace fraclap {

enum class Regularity { regular, diagonal_singular, boundary_degenerate };

struct KernelValue {
    double value = 0.0;
    Regularity regularity = Regularity::regular;
};

/// Which boundary Poisson kernel: E_{s-2} or E_{s-1}.
enum class TraceOrder { s_minus_2, s_minus_1 };

/// Pairs closer than this are refused by green_G instead of being regularized.
inline constexpr double kDiagonalGuard = 1e-8;

/// rho(x,y) = delta(x) delta(y) / |x-y|^2, with delta clipped at 0 outside B.
template <int N>
double ball_rho(const Vec<N>& x, const Vec<N>& y) {
    const double dx = std::max(one_minus_sq<N>(x), 0.0);
    const double dy = std::max(one_minus_sq<N>(y), 0.0);
    if (dx == 0.0 || dy == 0.0) return 0.0;
    const double r = distance<N>(x, y);
    return dx / r * (dy / r);
}

/// Closed-form kernels of (-Delta)^s on the unit ball B in R^N.
/// The normalization constants are computed once per instance.
template <int N>
class BallKernels {
public:
    explicit BallKernels(FracOrder order) : order_(order), c_(constants(order, N)) {}

    const FracOrder& order() const noexcept { return order_; }
    const NormalizationSet& normalization() const noexcept { return c_; }

    /// Boggio's Green function.
    KernelValue green(const Vec<N>& x, const Vec<N>& y) const {
        const double r = distance<N>(x, y);
        if (r < kDiagonalGuard) {
            std::ostringstream os;
            os << "green_G: |x-y| = " << r << " is below the diagonal guard " << kDiagonalGuard;
            throw DomainError(os.str());
        }
        const double rho = ball_rho<N>(x, y);
        if (rho == 0.0) return {0.0, Regularity::boundary_degenerate};
        const double v = c_.k_Ns * std::pow(r, 2.0 * order_.s() - N) * boggio_integral(rho, order_, N);
        return {v, Regularity::regular};
    }

    /// Boundary Poisson kernels E_{s-2}(x,z) and E_{s-1}(x,z), |z| = 1.
    double eden(TraceOrder k, const Vec<N>& x, const Vec<N>& z) const {
        if (std::abs(norm<N>(z) - 1.0) > 1e-12) {
            std::ostringstream os;
            os << "eden_E: boundary point has |z| = " << norm<N>(z) << ", expected 1";
            throw DomainError(os.str());
        }
        const double d = one_minus_sq<N>(x);
        if (d <= 0.0) return 0.0;
        const double r = distance<N>(x, z);
        if (r == 0.0) throw DomainError("eden_E: x coincides with z");
        const double ds = std::pow(d, order_.s());
        if (k == TraceOrder::s_minus_1) return ds / (2.0 * c_.omega_N * std::pow(r, N));
        return ds * (N * d - (N - 4.0) * r * r) / (4.0 * c_.omega_N * std::pow(r, N + 2));
    }

    /// Nonlocal Poisson kernel Gamma_s(x,y) for exterior y.
    double gamma(const Vec<N>& x, const Vec<N>& y) const {
        const double ry = norm<N>(y);
        if (!(ry > 1.0)) {
            std::ostringstream os;
            os << "nonlocal_Gamma: |y| = " << ry << " must exceed 1";
            throw DomainError(os.str());
        }
        return gamma(x, y, (ry - 1.0) * (ry + 1.0));
    }

    /// Same kernel with |y|^2 - 1 supplied by the caller; quadratures that parametrize
    /// y by its offset from the sphere keep this factor accurate as |y| -> 1.
    double gamma(const Vec<N>& x, const Vec<N>& y, double ext) const {
        if (!(ext > 0.0)) throw DomainError("nonlocal_Gamma: need |y|^2 - 1 > 0");
        const double d = one_minus_sq<N>(x);
        if (d <= 0.0) return 0.0;
        const double sign = (order_.m() % 2 == 0) ? 1.0 : -1.0;
        return sign * c_.gamma_Nsigma * std::pow(distance<N>(x, y), -N) * std::pow(d / ext, order_.s());
    }

private:
    FracOrder order_;
    NormalizationSet c_;
};

template <int N>
KernelValue green_G(const FracOrder& order, const Vec<N>& x, const Vec<N>& y) {
    return BallKernels<N>(order).green(x, y);
}

template <int N>
double eden_E(const FracOrder& order, TraceOrder k, const Vec<N>& x, const Vec<N>& z) {
    return BallKernels<N>(order).eden(k, x, z);
}

template <int N>
double nonlocal_Gamma(const FracOrder& order, const Vec<N>& x, const Vec<N>& y) {
    return BallKernels<N>(order).gamma(x, y);
}

/// E_{s-2}(x,-1) + E_{s-2}(x,1) in one dimension; equals (1-x^2)^{s-2}.
inline double harmonic_sum_1d(const FracOrder& order, double x) {
    if (!(std::abs(x) < 1.0)) {
        std::ostringstream os;
        os << "harmonic_sum_1d: |x| = " << std::abs(x) << " must be < 1";
        throw DomainError(os.str());
    }
    const BallKernels<1> k(order);
    return k.eden(TraceOrder::s_minus_2, Vec<1>{x}, Vec<1>{-1.0}) +
           k.eden(TraceOrder::s_minus_2, Vec<1>{x}, Vec<1>{1.0});
}

} // namespace fraclap
