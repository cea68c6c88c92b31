#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>
#include <span>
#include <sstream>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"

namespace fraclap {

/// Budgets and cut radii shared by every singular integral in the library.
struct QuadratureConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-13;
    int max_subdivisions = 4000;
    /// Inner cut for hypersingular splits, relative to the local smoothness distance.
    double inner_cut = 0.2;
    /// Radius beyond which non-compact integrands are handled by the tail map.
    double outer_cut = 8.0;
    /// Richardson levels used by finite-difference based evaluators.
    int extrap_depth = 2;
    /// Angular resolution for sphere rules when N >= 2.
    int sphere_resolution = 24;

    void validate() const {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
            throw DomainError("QuadratureConfig: tolerances must be positive");
        if (max_subdivisions < 16) throw DomainError("QuadratureConfig: max_subdivisions must be >= 16");
        if (!(inner_cut > 0.0) || !(inner_cut < outer_cut))
            throw DomainError("QuadratureConfig: need 0 < inner_cut < outer_cut");
        if (extrap_depth < 0) throw DomainError("QuadratureConfig: extrap_depth must be >= 0");
    }

    QuadratureConfig with_rel_tol(double t) const {
        auto c = *this;
        c.rel_tol = t;
        return c;
    }
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    bool converged = true;
    int intervals = 0;

    Estimate estimate() const { return {value, error}; }

    QuadResult& operator+=(const QuadResult& o) {
        value += o.value;
        error += o.error;
        converged = converged && o.converged;
        intervals += o.intervals;
        return *this;
    }
};

/// Throws AccuracyFailure if the result is flagged as under-converged.
inline const QuadResult& require_converged(const QuadResult& r, const char* what) {
    if (!r.converged) {
        std::ostringstream os;
        os << what << ": quadrature did not converge (estimate " << r.value << ", error bound " << r.error
           << ")";
        throw AccuracyFailure(os.str(), r.value, r.error);
    }
    return r;
}

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15 abscissae).
inline constexpr std::array<double, 8> kGkNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kGkWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

enum class Map { linear, left_power, right_power, tail };

/// A parametrisation t in [0,1] -> x used by the adaptive engine.
struct Segment {
    Map map = Map::linear;
    double a = 0.0;
    double b = 1.0;
    double q = 1.0; // grading exponent (power maps) or decay exponent (tail map)

    // x(t) and dx/dt.
    std::pair<double, double> operator()(double t) const {
        switch (map) {
        case Map::linear: return {t < 0.5 ? a + (b - a) * t : b - (b - a) * (1.0 - t), b - a};
        case Map::left_power: {
            const double tq = std::pow(t, q);
            return {a + (b - a) * tq, (b - a) * q * tq / t};
        }
        case Map::right_power: {
            const double u = 1.0 - t;
            const double uq = std::pow(u, q);
            return {b - (b - a) * uq, (b - a) * q * uq / u};
        }
        case Map::tail: {
            // x = a t^{-1/(q-1)}, a > 0, q > 1
            const double e = 1.0 / (q - 1.0);
            const double x = a * std::pow(t, -e);
            return {x, e * x / t};
        }
        }
        return {0.0, 0.0};
    }
};

struct Panel {
    int seg;
    double t0, t1;
    double value, error;
    bool splittable;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk15(F& f, const Segment& s, int seg, double t0, double t1) {
    const double c = 0.5 * (t0 + t1);
    const double h = 0.5 * (t1 - t0);
    auto g = [&](double t) {
        auto [x, jac] = s(t);
        if (jac == 0.0 || !std::isfinite(x) || !std::isfinite(jac)) return 0.0;
        // a node that rounds onto an endpoint is dropped: endpoints may be singular
        if (t <= 0.0 || t >= 1.0 || x == s.a || x == s.b) return 0.0;
        const double v = f(x);
        if (!std::isfinite(v)) {
            std::ostringstream os;
            os << "non-finite integrand value at x = " << x;
            throw DomainError(os.str());
        }
        return v * jac;
    };
    const double fc = g(c);
    double resk = fc * kGkWeights[7];
    double resg = fc * kGaussWeights[3];
    double resabs = std::abs(resk);
    std::array<double, 7> f1{}, f2{};
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kGkNodes[j];
        f1[j] = g(c - dx);
        f2[j] = g(c + dx);
        resk += kGkWeights[j] * (f1[j] + f2[j]);
        resabs += kGkWeights[j] * (std::abs(f1[j]) + std::abs(f2[j]));
        if (j % 2 == 1) resg += kGaussWeights[j / 2] * (f1[j] + f2[j]);
    }
    const double mean = 0.5 * resk;
    double resasc = kGkWeights[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j) resasc += kGkWeights[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
    resk *= h;
    resg *= h;
    resabs *= std::abs(h);
    resasc *= std::abs(h);
    double err = std::abs(resk - resg);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(err, 50.0 * eps * resabs);
    const bool splittable = (t1 - t0) > 1e-14 * std::max(1.0, std::abs(c));
    return {seg, t0, t1, resk, err, splittable};
}

/// Global adaptive Gauss-Kronrod over a list of parametrised segments.
/// Panels are refined largest-error-first; the final sum runs in a fixed order.
template <class F>
QuadResult integrate_segments(F&& f, std::span<const Segment> segs, const QuadratureConfig& cfg) {
    QuadResult out;
    if (segs.empty()) return out;
    std::priority_queue<Panel> heap;
    std::vector<Panel> frozen;
    double total = 0.0, total_err = 0.0;
    for (int i = 0; i < static_cast<int>(segs.size()); ++i) {
        auto p = gk15(f, segs[i], i, 0.0, 1.0);
        total += p.value;
        total_err += p.error;
        if (p.splittable) heap.push(p);
        else frozen.push_back(p);
    }
    int count = static_cast<int>(segs.size());
    auto done = [&] { return total_err <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total)); };
    while (!done() && !heap.empty() && count < cfg.max_subdivisions) {
        Panel p = heap.top();
        heap.pop();
        const double m = 0.5 * (p.t0 + p.t1);
        auto l = gk15(f, segs[p.seg], p.seg, p.t0, m);
        auto r = gk15(f, segs[p.seg], p.seg, m, p.t1);
        total += l.value + r.value - p.value;
        total_err += l.error + r.error - p.error;
        ++count;
        for (auto* c : {&l, &r}) {
            if (c->splittable) heap.push(*c);
            else frozen.push_back(*c);
        }
    }
    // Deterministic re-summation ordered by (segment, t0).
    while (!heap.empty()) {
        frozen.push_back(heap.top());
        heap.pop();
    }
    std::sort(frozen.begin(), frozen.end(),
              [](const Panel& a, const Panel& b) { return a.seg != b.seg ? a.seg < b.seg : a.t0 < b.t0; });
    double v = 0.0, e = 0.0;
    for (const auto& p : frozen) {
        v += p.value;
        e += p.error;
    }
    out.value = v;
    out.error = e;
    out.intervals = count;
    out.converged = e <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(v));
    return out;
}

} // namespace detail

/// One piece [a,b] of a piecewise-smooth integrand. A grade exponent q > 1 at an end
/// applies the substitution x = a + (b-a) t^q there, which absorbs algebraic endpoint
/// behaviour (x-a)^beta for beta > -1.
struct Piece {
    double a;
    double b;
    double grade_left = 1.0;
    double grade_right = 1.0;
};

/// Grading exponent that makes (x-a)^beta bounded (beta < 0) or smooth enough (beta > 0).
inline double grade_for_exponent(double beta) {
    if (beta == 0.0 || (beta > 0.0 && beta == std::floor(beta))) return 1.0;
    if (beta < 0.0) return std::max(2.0, 2.0 / (1.0 + beta));
    return 2.0;
}

template <class F>
QuadResult integrate_pieces(F&& f, std::span<const Piece> pieces, const QuadratureConfig& cfg) {
    using detail::Map;
    std::vector<detail::Segment> segs;
    segs.reserve(2 * pieces.size());
    for (const auto& p : pieces) {
        if (!(p.b > p.a)) continue;
        const bool gl = p.grade_left != 1.0, gr = p.grade_right != 1.0;
        if (!gl && !gr) {
            segs.push_back({Map::linear, p.a, p.b, 1.0});
        } else if (gl && gr) {
            const double m = 0.5 * (p.a + p.b);
            segs.push_back({Map::left_power, p.a, m, p.grade_left});
            segs.push_back({Map::right_power, m, p.b, p.grade_right});
        } else if (gl) {
            segs.push_back({Map::left_power, p.a, p.b, p.grade_left});
        } else {
            segs.push_back({Map::right_power, p.a, p.b, p.grade_right});
        }
    }
    return detail::integrate_segments(f, segs, cfg);
}

/// Adaptive 15-point Gauss-Kronrod on [a,b].
template <class F>
QuadResult integrate_adaptive(F&& f, double a, double b, const QuadratureConfig& cfg) {
    if (!(a < b)) {
        if (a == b) return {};
        throw DomainError("integrate_adaptive: need a < b");
    }
    const Piece p{a, b};
    return integrate_pieces(f, std::span<const Piece>(&p, 1), cfg);
}

/// Integrate over [breaks[0], breaks.back()] splitting at every interior break.
template <class F>
QuadResult integrate_breaks(F&& f, std::span<const double> breaks, const QuadratureConfig& cfg) {
    std::vector<Piece> pieces;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
        if (breaks[i + 1] > breaks[i]) pieces.push_back({breaks[i], breaks[i + 1]});
    return integrate_pieces(f, pieces, cfg);
}

enum class Endpoint { left, right };

/// Integrand with an integrable endpoint singularity |x - end|^{-alpha}, alpha < 1,
/// handled by the substitution x = end -+ (b-a) t^{1/(1-alpha)}.
template <class F>
QuadResult integrate_endpoint_singular(F&& f, double a, double b, double alpha, Endpoint end,
                                       const QuadratureConfig& cfg) {
    if (!(alpha < 1.0)) throw DivergenceError("integrate_endpoint_singular: need alpha < 1");
    const double q = alpha > 0.0 ? 1.0 / (1.0 - alpha) : 1.0;
    Piece p{a, b};
    (end == Endpoint::left ? p.grade_left : p.grade_right) = q;
    return integrate_pieces(f, std::span<const Piece>(&p, 1), cfg);
}

/// Integral over [R, inf) of f with declared decay |f(y)| <= C y^{-p}, p > 1.
template <class F>
QuadResult integrate_tail(F&& f, double R, double p, const QuadratureConfig& cfg) {
    if (!(p > 1.0)) {
        std::ostringstream os;
        os << "integrate_tail: decay exponent p = " << p << " <= 1, tail integral diverges";
        throw DivergenceError(os.str());
    }
    if (!(R > 0.0)) throw DomainError("integrate_tail: need R > 0");
    const detail::Segment s{detail::Map::tail, R, 0.0, p};
    return detail::integrate_segments(f, std::span<const detail::Segment>(&s, 1), cfg);
}

struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1,1] (Newton on the three-term recurrence, cached).
inline const GaussRule& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard lock(mu);
    if (auto it = cache.find(n); it != cache.end()) return it->second;
    GaussRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        r.weights[i] = r.weights[n - 1 - i] = w;
    }
    return cache.emplace(n, std::move(r)).first->second;
}

/// Fixed Gauss-Legendre sum on [a,b].
template <class F>
double gauss_sum(F&& f, double a, double b, int n) {
    const auto& g = gauss_legendre(n);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += g.weights[i] * f(c + h * g.nodes[i]);
    return s * h;
}

/// Quadrature rule on the unit sphere S^{N-1}; weights sum to omega_N.
template <int N>
struct SphereRule {
    std::vector<Vec<N>> nodes;
    std::vector<double> weights;

    template <class F>
    double integrate(F&& g) const {
        double s = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * g(nodes[i]);
        return s;
    }
};

/// N=1: the two-point "sphere" {-1,+1}; N=2: trapezoid on the circle;
/// N=3: Gauss-Legendre in cos(theta) x trapezoid in phi.
template <int N>
SphereRule<N> sphere_rule(int resolution) {
    SphereRule<N> r;
    if constexpr (N == 1) {
        r.nodes = {Vec<1>{-1.0}, Vec<1>{1.0}};
        r.weights = {1.0, 1.0};
    } else if constexpr (N == 2) {
        const int m = std::max(resolution, 4);
        for (int k = 0; k < m; ++k) {
            const double t = 2.0 * std::numbers::pi * (k + 0.5) / m;
            r.nodes.push_back({std::cos(t), std::sin(t)});
            r.weights.push_back(2.0 * std::numbers::pi / m);
        }
    } else if constexpr (N == 3) {
        const int n = std::max(resolution / 2, 2);
        const int m = 2 * n;
        const auto& g = gauss_legendre(n);
        for (int i = 0; i < n; ++i) {
            const double ct = g.nodes[i], st = std::sqrt(1.0 - ct * ct);
            for (int k = 0; k < m; ++k) {
                const double p = 2.0 * std::numbers::pi * (k + 0.5) / m;
                r.nodes.push_back({st * std::cos(p), st * std::sin(p), ct});
                r.weights.push_back(g.weights[i] * 2.0 * std::numbers::pi / m);
            }
        }
    } else {
        throw CapabilityError("sphere_rule: only N in {1,2,3} is supported");
    }
    return r;
}

} // namespace fraclap
