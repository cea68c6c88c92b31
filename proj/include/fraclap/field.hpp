#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"

namespace fraclap {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// A place where the field is not smooth. In one dimension `location` is a point;
/// for N >= 2 it is a radius and the kink is the sphere |y| = location.
/// Near the kink the field behaves like |dist|^exponent (exponent 0 for a jump,
/// 2 for a C^1 junction, negative for a blow-up).
struct Kink {
    double location;
    double exponent;
};

/// Declared growth of |u(y)| as |y| -> infinity.
struct Decay {
    enum class Kind { compact, algebraic, none };
    Kind kind = Kind::none;
    double p = 0.0; ///< |u(y)| <= C |y|^{-p}; p may be negative for growing fields

    static Decay compact() { return {Kind::compact, kInf}; }
    static Decay algebraic(double p) { return {Kind::algebraic, p}; }
    static Decay none() { return {Kind::none, 0.0}; }
};

/// Closed-form unitary Fourier transform of a field radial about `center`:
/// u^(xi) = exp(-i center.xi) profile(|xi|).
template <int N>
struct RadialTransform {
    Vec<N> center{};
    std::function<double(double)> profile;
    /// profile vanishes (or is below working precision) beyond this radius.
    double cutoff = kInf;
    /// |profile(rho)| <= C rho^{-decay} for rho >= cutoff; only used when cutoff is finite
    /// but the profile is not negligible there.
    double decay = kInf;
};

/// A real function on R^N with the metadata the operators need.
template <int N>
struct ScalarField {
    std::function<double(const Vec<N>&)> fn;
    std::vector<Kink> kinks;
    /// u = 0 for |y| > support_radius.
    double support_radius = kInf;
    Decay decay = Decay::none();
    /// Blows up at the unit sphere (e.g. delta^{s-2}); evaluators refuse points near it.
    bool boundary_singular = false;
    /// Depends on |y| only (N >= 2); lets evaluators reduce sphere integrals to one angle.
    bool radial = false;
    /// Length over which the field is analytic-looking; bounds the inner Taylor zone.
    double scale = 1.0;
    /// Optional position-dependent refinement of `scale` for fields that steepen locally.
    std::function<double(const Vec<N>&)> local_scale;
    /// Limit of u at a boundary point z taken from outside B; unset means "compute it".
    std::function<double(const Vec<N>&)> exterior_limit;
    std::optional<RadialTransform<N>> transform;
    std::string name;

    double operator()(const Vec<N>& x) const { return fn(x); }

    /// u in L^1_t, i.e. int |u| (1+|y|)^{-N-2t} < infinity.
    bool in_L1(double t) const {
        switch (decay.kind) {
        case Decay::Kind::compact: return true;
        case Decay::Kind::algebraic: return -decay.p < 2.0 * t;
        case Decay::Kind::none: return false;
        }
        return false;
    }

    double scale_at(const Vec<N>& x) const { return local_scale ? std::min(scale, local_scale(x)) : scale; }

    /// Distance from x to the nearest kink.
    double kink_distance(const Vec<N>& x) const {
        double d = kInf;
        const double rx = norm<N>(x);
        for (const auto& k : kinks) d = std::min(d, std::abs((N == 1 ? x[0] : rx) - k.location));
        return d;
    }
};

namespace field {

namespace detail {
inline Decay worse(const Decay& a, const Decay& b) {
    using K = Decay::Kind;
    if (a.kind == K::none || b.kind == K::none) return Decay::none();
    if (a.kind == K::compact) return b;
    if (b.kind == K::compact) return a;
    return Decay::algebraic(std::min(a.p, b.p));
}
} // namespace detail

template <int N>
ScalarField<N> constant(double c) {
    ScalarField<N> u;
    u.fn = [c](const Vec<N>&) { return c; };
    u.decay = c == 0.0 ? Decay::compact() : Decay::algebraic(0.0);
    u.support_radius = c == 0.0 ? 0.0 : kInf;
    u.exterior_limit = [c](const Vec<N>&) { return c; };
    u.radial = true;
    u.name = "const";
    return u;
}

/// a + b.x
template <int N>
ScalarField<N> affine(double a, Vec<N> b) {
    ScalarField<N> u;
    u.fn = [a, b](const Vec<N>& x) { return a + dot<N>(b, x); };
    u.decay = Decay::algebraic(-1.0);
    u.exterior_limit = u.fn;
    u.name = "affine";
    return u;
}

/// amp * exp(-|x-c|^2 / (2 w^2)) with its closed-form transform.
template <int N>
ScalarField<N> gaussian(Vec<N> c = {}, double w = 1.0, double amp = 1.0) {
    ScalarField<N> u;
    u.fn = [=](const Vec<N>& x) {
        const auto d = x - c;
        return amp * std::exp(-dot<N>(d, d) / (2.0 * w * w));
    };
    u.decay = Decay::algebraic(kInf);
    u.exterior_limit = u.fn;
    RadialTransform<N> t;
    t.center = c;
    t.profile = [=](double rho) { return amp * std::pow(w, N) * std::exp(-0.5 * rho * rho * w * w); };
    t.cutoff = 40.0 / w;
    u.transform = t;
    u.scale = w;
    u.radial = norm<N>(c) == 0.0;
    u.name = "gaussian";
    return u;
}

/// exp(1 - 1/(1-t^2)) with t = |x-c|/r: a C-infinity bump of unit height.
template <int N>
ScalarField<N> smooth_bump(Vec<N> c, double r) {
    ScalarField<N> u;
    u.fn = [=](const Vec<N>& x) {
        const double t = distance<N>(x, c) / r;
        if (t >= 1.0) return 0.0;
        return std::exp(1.0 - 1.0 / ((1.0 - t) * (1.0 + t)));
    };
    u.support_radius = norm<N>(c) + r;
    u.decay = Decay::compact();
    u.exterior_limit = u.fn;
    u.scale = 0.5 * r;
    // smooth but not analytic at the rim: within 1-t of it the profile varies on a length
    // of order (1-t)^2 r, and outside it is flat up to the distance to the rim
    u.local_scale = [=](const Vec<N>& x) {
        const double t = distance<N>(x, c) / r;
        if (t >= 1.0) return std::max(0.5 * (t - 1.0) * r, 1e-12);
        return std::max(2.0 * (1.0 - t) * (1.0 - t) * r, 1e-12);
    };
    u.radial = norm<N>(c) == 0.0;
    u.name = "smooth_bump";
    return u;
}

/// amp * (1 - |x-c|^2/r^2)^2_+ : the quartic (C^1) bump.
template <int N>
ScalarField<N> quartic_bump(Vec<N> c, double r, double amp = 1.0) {
    ScalarField<N> u;
    u.fn = [=](const Vec<N>& x) {
        const auto d = x - c;
        const double t2 = dot<N>(d, d) / (r * r);
        if (t2 >= 1.0) return 0.0;
        return amp * (1.0 - t2) * (1.0 - t2);
    };
    if constexpr (N == 1) u.kinks = {{c[0] - r, 2.0}, {c[0] + r, 2.0}};
    else if (norm<N>(c) == 0.0) u.kinks = {{r, 2.0}};
    u.support_radius = norm<N>(c) + r;
    u.decay = Decay::compact();
    u.exterior_limit = u.fn;
    u.scale = r;
    u.radial = norm<N>(c) == 0.0;
    u.name = "quartic_bump";
    return u;
}

/// (1 - |x-c|^2/r^2)^m_+ : C^{m-1} bump, with its transform in one dimension.
template <int N>
ScalarField<N> power_bump(Vec<N> c, double r, int m) {
    if (!(r > 0.0) || m < 1) throw DomainError("power_bump: need r > 0 and m >= 1");
    ScalarField<N> u;
    u.fn = [=](const Vec<N>& x) {
        const auto d = x - c;
        const double t2 = dot<N>(d, d) / (r * r);
        return t2 >= 1.0 ? 0.0 : std::pow(1.0 - t2, m);
    };
    if constexpr (N == 1) u.kinks = {{c[0] - r, double(m)}, {c[0] + r, double(m)}};
    else if (norm<N>(c) == 0.0) u.kinks = {{r, double(m)}};
    u.support_radius = norm<N>(c) + r;
    u.decay = Decay::compact();
    u.exterior_limit = u.fn;
    u.scale = r / std::sqrt(double(m));
    u.radial = norm<N>(c) == 0.0;
    if constexpr (N == 1) {
        // int (1-x^2)^m e^{-i eta x} dx = m! 2^{m+1} eta^{-m} j_m(eta)
        double mf = 1.0;
        for (int k = 2; k <= m; ++k) mf *= k;
        const double pre = mf * std::pow(2.0, m + 1) * r / std::sqrt(2.0 * std::numbers::pi);
        RadialTransform<N> t;
        t.center = c;
        t.profile = [=](double rho) {
            const double eta = rho * r;
            if (eta < 2.0) {
                // eta^{-m} j_m(eta) = sum_k (-eta^2/2)^k / (k! (2m+2k+1)!!)
                double df = 1.0;
                for (int k = 3; k <= 2 * m + 1; k += 2) df *= k;
                double term = 1.0 / df, sum = term;
                for (int k = 1; k < 40; ++k) {
                    term *= -0.5 * eta * eta / (k * (2.0 * m + 2.0 * k + 1.0));
                    sum += term;
                    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
                }
                return pre * sum;
            }
            return pre * std::sph_bessel(unsigned(m), eta) / std::pow(eta, m);
        };
        t.decay = m + 1.0;
        t.cutoff = 2000.0 / r;
        u.transform = t;
    }
    u.name = "power_bump";
    return u;
}

/// amp * p(x) * delta(x)^beta inside B, 0 outside. p is given by coefficients of a
/// polynomial in x_1 (enough for the one-dimensional identities); empty means 1.
template <int N>
ScalarField<N> delta_power(double beta, double amp = 1.0, std::vector<double> poly = {}) {
    ScalarField<N> u;
    u.fn = [=](const Vec<N>& x) {
        const double d = one_minus_sq<N>(x);
        if (d <= 0.0) return 0.0;
        double p = 0.0;
        if (poly.empty()) p = 1.0;
        for (std::size_t k = poly.size(); k-- > 0;) p = p * x[0] + poly[k];
        return amp * p * std::pow(d, beta);
    };
    if constexpr (N == 1) u.kinks = {{-1.0, beta}, {1.0, beta}};
    else u.kinks = {{1.0, beta}};
    u.support_radius = 1.0;
    u.decay = Decay::compact();
    u.boundary_singular = beta < 0.0;
    u.exterior_limit = [](const Vec<N>&) { return 0.0; };
    u.radial = poly.size() <= 1;
    u.name = "delta_power";
    return u;
}

/// amp * indicator of {a < x < b} (N = 1) or of the shell {a < |x| < b}.
template <int N>
ScalarField<N> indicator(double a, double b, double amp = 1.0) {
    if (!(a < b)) throw DomainError("indicator: need a < b");
    ScalarField<N> u;
    u.fn = [=](const Vec<N>& x) {
        const double t = N == 1 ? x[0] : norm<N>(x);
        return (t > a && t < b) ? amp : 0.0;
    };
    u.kinks = {{a, 0.0}, {b, 0.0}};
    u.support_radius = std::max(std::abs(a), std::abs(b));
    u.decay = Decay::compact();
    // one-sided limit from outside B at |z| = 1
    u.exterior_limit = [=](const Vec<N>& z) {
        if (N == 1 && z[0] < 0.0) return (a < -1.0 && -1.0 <= b) ? amp : 0.0;
        return (a <= 1.0 && 1.0 < b) ? amp : 0.0;
    };
    u.radial = true;
    u.name = "indicator";
    return u;
}

/// Polynomial in x_1 restricted to B (zero outside): sum c_k x^k.
template <int N>
ScalarField<N> poly_in_ball(std::vector<double> coef) {
    ScalarField<N> u;
    u.fn = [=](const Vec<N>& x) {
        if (one_minus_sq<N>(x) <= 0.0) return 0.0;
        double p = 0.0;
        for (std::size_t k = coef.size(); k-- > 0;) p = p * x[0] + coef[k];
        return p;
    };
    if constexpr (N == 1) u.kinks = {{-1.0, 0.0}, {1.0, 0.0}};
    else u.kinks = {{1.0, 0.0}};
    u.support_radius = 1.0;
    u.decay = Decay::compact();
    u.exterior_limit = [](const Vec<N>&) { return 0.0; };
    u.name = "poly";
    return u;
}

/// alpha u + beta v with merged metadata.
template <int N>
ScalarField<N> combine(double alpha, const ScalarField<N>& u, double beta, const ScalarField<N>& v) {
    ScalarField<N> w;
    w.fn = [alpha, beta, f = u.fn, g = v.fn](const Vec<N>& x) { return alpha * f(x) + beta * g(x); };
    w.kinks = u.kinks;
    w.kinks.insert(w.kinks.end(), v.kinks.begin(), v.kinks.end());
    w.support_radius = std::max(u.support_radius, v.support_radius);
    w.decay = detail::worse(u.decay, v.decay);
    w.boundary_singular = u.boundary_singular || v.boundary_singular;
    w.radial = u.radial && v.radial;
    w.scale = std::min(u.scale, v.scale);
    if (u.local_scale || v.local_scale)
        w.local_scale = [uu = u, vv = v](const Vec<N>& x) { return std::min(uu.scale_at(x), vv.scale_at(x)); };
    if (u.exterior_limit && v.exterior_limit)
        w.exterior_limit = [=, f = u.exterior_limit, g = v.exterior_limit](const Vec<N>& z) {
            return alpha * f(z) + beta * g(z);
        };
    w.name = u.name + "+" + v.name;
    return w;
}

/// x -> u(x - shift).
template <int N>
ScalarField<N> translate(const ScalarField<N>& u, Vec<N> shift) {
    ScalarField<N> w = u;
    w.fn = [f = u.fn, shift](const Vec<N>& x) { return f(x - shift); };
    if (u.local_scale) w.local_scale = [g = u.local_scale, shift](const Vec<N>& x) { return g(x - shift); };
    if constexpr (N == 1)
        for (auto& k : w.kinks) k.location += shift[0];
    else if (norm<N>(shift) != 0.0)
        w.kinks.clear(); // radial kinks no longer centred at the origin
    w.support_radius = u.support_radius + norm<N>(shift);
    w.exterior_limit = nullptr;
    w.boundary_singular = u.boundary_singular && norm<N>(shift) == 0.0;
    w.radial = u.radial && norm<N>(shift) == 0.0;
    if (u.transform) {
        auto t = *u.transform;
        t.center = t.center + shift;
        w.transform = t;
    }
    return w;
}

/// x -> u(lambda x), lambda > 0.
template <int N>
ScalarField<N> dilate(const ScalarField<N>& u, double lambda) {
    if (!(lambda > 0.0)) throw DomainError("dilate: need lambda > 0");
    ScalarField<N> w = u;
    w.fn = [f = u.fn, lambda](const Vec<N>& x) { return f(lambda * x); };
    for (auto& k : w.kinks) k.location /= lambda;
    w.support_radius = u.support_radius / lambda;
    w.scale = u.scale / lambda;
    if (u.local_scale)
        w.local_scale = [g = u.local_scale, lambda](const Vec<N>& x) { return g(lambda * x) / lambda; };
    w.exterior_limit = nullptr;
    if (u.transform) {
        auto t = *u.transform;
        t.center = (1.0 / lambda) * t.center;
        t.profile = [p = u.transform->profile, lambda](double rho) {
            return std::pow(lambda, -N) * p(rho / lambda);
        };
        t.cutoff *= lambda;
        w.transform = t;
    }
    return w;
}

/// Wrap an arbitrary function; the caller states the metadata.
template <int N>
ScalarField<N> from_function(std::function<double(const Vec<N>&)> f, std::vector<Kink> kinks, double support_radius,
                             Decay decay, std::string name = "custom") {
    ScalarField<N> u;
    u.fn = std::move(f);
    u.kinks = std::move(kinks);
    u.support_radius = support_radius;
    u.decay = decay;
    u.name = std::move(name);
    return u;
}

} // namespace field

} // namespace fraclap
