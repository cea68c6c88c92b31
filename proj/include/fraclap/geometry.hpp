#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace fraclap {

template <int N>
using Vec = std::array<double, N>;

template <std::size_t N>
constexpr std::array<double, N> operator+(const std::array<double, N>& a, const std::array<double, N>& b) {
    std::array<double, N> r{};
    for (std::size_t i = 0; i < N; ++i) r[i] = a[i] + b[i];
    return r;
}

template <std::size_t N>
constexpr std::array<double, N> operator-(const std::array<double, N>& a, const std::array<double, N>& b) {
    std::array<double, N> r{};
    for (std::size_t i = 0; i < N; ++i) r[i] = a[i] - b[i];
    return r;
}

template <std::size_t N>
constexpr std::array<double, N> operator*(double c, const std::array<double, N>& a) {
    std::array<double, N> r{};
    for (std::size_t i = 0; i < N; ++i) r[i] = c * a[i];
    return r;
}

template <int N>
constexpr double dot(const Vec<N>& a, const Vec<N>& b) {
    double r = 0.0;
    for (int i = 0; i < N; ++i) r += a[i] * b[i];
    return r;
}

template <int N>
inline double norm(const Vec<N>& a) {
    if constexpr (N == 1) return std::abs(a[0]);
    return std::sqrt(dot<N>(a, a));
}

template <int N>
inline double distance(const Vec<N>& a, const Vec<N>& b) {
    return norm<N>(a - b);
}

/// Point on the first coordinate axis, used for radial probes.
template <int N>
constexpr Vec<N> axis_point(double r) {
    Vec<N> v{};
    v[0] = r;
    return v;
}

/// 1 - |x|^2 computed as (1-|x|)(1+|x|); stays accurate when |x| is within 1e-8 of 1.
template <int N>
inline double one_minus_sq(const Vec<N>& x) {
    const double r = norm<N>(x);
    return (1.0 - r) * (1.0 + r);
}

/// delta(x)^beta = (1-|x|^2)^beta inside the unit ball, 0 outside.
/// For beta < 0 the value diverges as |x| -> 1 from inside; callers guard that.
template <int N>
inline double delta_pow(const Vec<N>& x, double beta) {
    const double d = one_minus_sq<N>(x);
    if (d <= 0.0) return 0.0;
    if (beta == 1.0) return d;
    return std::pow(d, beta);
}

inline double delta_pow(double x, double beta) { return delta_pow<1>(Vec<1>{x}, beta); }

} // namespace fraclap
