#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "field.hpp"
#include "geometry.hpp"
#include "hyperop.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "specialfn.hpp"

namespace fraclap {

struct Interval {
    double a;
    double b;
};

/// Finite union of disjoint open intervals, sorted left to right.
class IntervalUnionDomain {
public:
    explicit IntervalUnionDomain(std::vector<Interval> iv) : iv_(std::move(iv)) {
        if (iv_.empty()) throw DomainError("IntervalUnionDomain: need at least one interval");
        std::sort(iv_.begin(), iv_.end(), [](const Interval& p, const Interval& q) { return p.a < q.a; });
        for (std::size_t k = 0; k < iv_.size(); ++k) {
            if (!(iv_[k].a < iv_[k].b) || !std::isfinite(iv_[k].a) || !std::isfinite(iv_[k].b))
                throw DomainError("IntervalUnionDomain: each interval needs finite a < b");
            if (k > 0 && !(iv_[k - 1].b < iv_[k].a)) {
                std::ostringstream os;
                os << "IntervalUnionDomain: intervals (" << iv_[k - 1].a << "," << iv_[k - 1].b << ") and ("
                   << iv_[k].a << "," << iv_[k].b << ") overlap or touch";
                throw DomainError(os.str());
            }
        }
    }

    const std::vector<Interval>& intervals() const noexcept { return iv_; }
    std::size_t size() const noexcept { return iv_.size(); }

    /// Index of the interval containing x, or -1.
    int locate(double x) const {
        for (std::size_t k = 0; k < iv_.size(); ++k)
            if (x > iv_[k].a && x < iv_[k].b) return static_cast<int>(k);
        return -1;
    }

private:
    std::vector<Interval> iv_;
};

/// Cardinal cubic B-spline on [0, 4], unit integral.
inline double bspline3(double t) {
    if (t <= 0.0 || t >= 4.0) return 0.0;
    if (t < 1.0) return t * t * t / 6.0;
    if (t < 2.0) return (((-3.0 * t + 12.0) * t - 12.0) * t + 4.0) / 6.0;
    if (t < 3.0) return (((3.0 * t - 24.0) * t + 60.0) * t - 44.0) / 6.0;
    const double u = 4.0 - t;
    return u * u * u / 6.0;
}

/// Cubic B-spline with knots t[0] <= ... <= t[4] (Cox-de Boor, right-continuous).
inline double bspline3_knots(const std::array<double, 5>& t, double x) {
    if (x < t[0] || x >= t[4]) return 0.0;
    double N[4];
    for (int i = 0; i < 4; ++i) N[i] = (x >= t[i] && x < t[i + 1]) ? 1.0 : 0.0;
    for (int p = 1; p <= 3; ++p)
        for (int i = 0; i < 4 - p; ++i) {
            double v = 0.0;
            if (t[i + p] > t[i]) v += (x - t[i]) / (t[i + p] - t[i]) * N[i];
            if (t[i + p + 1] > t[i + 1]) v += (t[i + p + 1] - x) / (t[i + p + 1] - t[i + 1]) * N[i + 1];
            N[i] = v;
        }
    return N[0];
}

/// Splines on per-interval uniform grids a + j h: the cardinal cubic B-splines with support
/// in [a, b] and, at each endpoint, the B-spline with a doubled boundary knot. The latter
/// leave the boundary with C^1 contact (value and slope zero), which is what lets the space
/// resolve the delta^s boundary layer; they lie in H^s for every s <= 2.
class GalerkinBasis {
public:
    struct Function {
        int interval;
        int local;     ///< j in the knot index a + j h (cardinal) or -1 / +1 for the boundary pair
        bool cardinal; ///< uniform knots left + m h
        std::array<double, 5> knots;
    };

    GalerkinBasis(IntervalUnionDomain domain, double h, bool boundary_functions = true)
        : domain_(std::move(domain)), h_(h) {
        if (!(h > 0.0)) throw DomainError("GalerkinBasis: spacing h must be positive");
        for (std::size_t k = 0; k < domain_.size(); ++k) {
            const auto [a, b] = domain_.intervals()[k];
            const int iv = static_cast<int>(k);
            if (a + 4.0 * h > b + 1e-12 * (b - a)) throw DomainError("GalerkinBasis: h too coarse for an interval");
            if (boundary_functions) fns_.push_back({iv, -1, false, {a, a, a + h, a + 2 * h, a + 3 * h}});
            const double slack = 1e-12 * (b - a);
            for (int j = 0; a + (j + 4) * h <= b + slack; ++j)
                fns_.push_back({iv, j, true, {a + j * h, a + (j + 1) * h, a + (j + 2) * h, a + (j + 3) * h, a + (j + 4) * h}});
            if (boundary_functions) {
                // mirror image of the left one, anchored on the last grid point
                const double e = fns_.back().knots[4];
                fns_.push_back({iv, 1, false, {e - 3 * h, e - 2 * h, e - h, e, e}});
            }
        }
    }

    const IntervalUnionDomain& domain() const noexcept { return domain_; }
    double h() const noexcept { return h_; }
    std::size_t size() const noexcept { return fns_.size(); }
    const Function& operator[](std::size_t i) const { return fns_.at(i); }

    double center(std::size_t i) const { return 0.5 * (fns_.at(i).knots[0] + fns_.at(i).knots[4]); }
    double operator()(std::size_t i, double x) const {
        const auto& f = fns_[i];
        if (f.cardinal) return bspline3((x - f.knots[0]) / h_);
        if (f.local > 0 && x == f.knots[4]) return 0.0;
        return bspline3_knots(f.knots, x);
    }

    const std::array<double, 5>& knots(std::size_t i) const { return fns_.at(i).knots; }

    /// Indices of the functions whose support contains x.
    std::vector<std::size_t> active(double x) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < fns_.size(); ++i)
            if (x > fns_[i].knots[0] && x < fns_[i].knots[4]) out.push_back(i);
        return out;
    }

private:
    IntervalUnionDomain domain_;
    double h_;
    std::vector<Function> fns_;
};

namespace detail {

inline double sinc(double t) { return std::abs(t) < 1e-4 ? 1.0 - t * t / 6.0 + t * t * t * t / 120.0 : std::sin(t) / t; }

/// int_T^inf t^a cos(w t) dt for w != 0 by repeated integration by parts (T w >> 1).
inline double oscillatory_tail(double a, double w, double T) {
    // I(a) = -T^a e^{iwT}/(iw) - (a/(iw)) I(a-1), truncated after a few levels
    const std::complex<double> iw(0.0, w);
    const std::complex<double> e = std::exp(iw * T);
    std::complex<double> sum = 0.0, coef = 1.0;
    double p = a;
    for (int n = 0; n < 6; ++n) {
        sum += coef * (-std::pow(T, p) * e / iw);
        coef *= -p / iw;
        p -= 1.0;
    }
    return sum.real();
}

/// J(k) = int_0^inf t^{2s-8} sin^8 t cos(2 k t) dt.
inline Estimate spline_offset_integral(double s, double k, const QuadratureConfig& cfg) {
    k = std::abs(k);
    const double a = 2.0 * s - 8.0;
    if (k >= 4.0) {
        // local orders: disjoint supports do not interact
        if (s == std::floor(s)) return {0.0, 0.0};
        // every frequency of sin^8 t e^{2ikt} is >= 0: rotate onto t = i u
        const double lam = 2.0 * k - 8.0;
        auto g = [=](double u) {
            if (u <= 0.0) return 0.0;
            const double q = -std::expm1(-2.0 * u) / u;
            const double q2 = q * q, q4 = q2 * q2;
            return std::pow(u, 2.0 * s) * q4 * q4 * std::exp(-lam * u) / 256.0;
        };
        const double a0 = lam > 1.0 ? 1.0 / lam : 1.0;
        std::vector<Piece> pieces{{0.0, a0, grade_for_exponent(2.0 * s), 1.0}};
        double hi = a0;
        const double stop = lam > 0.0 ? std::min(64.0, 45.0 / lam + a0) : 64.0;
        while (hi < stop) {
            pieces.push_back({hi, 2.0 * hi, 1.0, 1.0});
            hi *= 2.0;
        }
        auto cfg2 = cfg;
        cfg2.abs_tol = 1e-300;
        auto body = integrate_pieces(g, pieces, cfg2);
        // beyond hi the integrand is at most u^{2s-8}/256 e^{-lam u}
        auto tail = integrate_tail(g, hi, 8.0 - 2.0 * s, cfg2);
        body += tail;
        require_converged(body, "spline_offset_integral (rotated)");
        return (-std::sin(std::numbers::pi * s)) * body.estimate();
    }
    // overlapping supports: real axis up to T, closed-form tail
    constexpr double T = 100.0 * std::numbers::pi;
    auto f = [=](double t) {
        const double q = sinc(t);
        const double q2 = q * q, q4 = q2 * q2;
        return std::pow(t, 2.0 * s) * q4 * q4 * std::cos(2.0 * k * t);
    };
    std::vector<Piece> pieces;
    const double w = 0.5 * std::numbers::pi;
    pieces.push_back({0.0, w, grade_for_exponent(2.0 * s), 1.0});
    for (int m = 1; m < 200; ++m) pieces.push_back({m * w, (m + 1) * w, 1.0, 1.0});
    auto cfg2 = cfg;
    cfg2.abs_tol = std::min(cfg.abs_tol, 1e-14); // J(0) is O(1/4); J(2) = 0 at s = 2
    auto body = integrate_pieces(f, pieces, cfg2);
    require_converged(body, "spline_offset_integral");
    // sin^8 t = (70 - 112 cos 2t + 56 cos 4t - 16 cos 6t + 2 cos 8t)/256
    static constexpr double c8[5] = {70.0, -112.0, 56.0, -16.0, 2.0};
    double tail = 0.0;
    for (int m = 0; m <= 4; ++m) {
        const double cm = c8[m] / 256.0 * (m == 0 ? 1.0 : 0.5);
        for (int sg : {-1, 1}) {
            if (m == 0 && sg == 1) continue;
            const double om = 2.0 * k + sg * 2.0 * m;
            if (std::abs(om) < 1e-12) tail += cm * std::pow(T, a + 1.0) / (-(a + 1.0));
            else tail += cm * oscillatory_tail(a, om, T);
        }
    }
    return {body.value + tail, body.error + 1e-3 * std::abs(tail) + std::pow(T, a - 5.0)};
}

} // namespace detail

/// E_s(b_i, b_j) = int |xi|^{2s} b_i^ conj(b_j^) d xi, reduced to a one-dimensional
/// cosine integral of sinc^8. Depends on i, j only through the centre offset.
inline Estimate form_entry_fourier_estimate(const FracOrder& order, std::size_t i, std::size_t j,
                                            const GalerkinBasis& basis, const QuadratureConfig& cfg = {}) {
    const double s = order.s();
    if (s > 2.0) throw CapabilityError("form_entry_fourier: cubic splines only lie in H^s for s <= 2");
    if (!basis[i].cardinal || !basis[j].cardinal)
        throw CapabilityError("form_entry_fourier: boundary splines have no sinc-power transform");
    const double h = basis.h();
    const double k = (basis.center(i) - basis.center(j)) / h;
    const double pre = std::pow(2.0, 2.0 * s + 1.0) * std::pow(h, 1.0 - 2.0 * s) / std::numbers::pi;
    return pre * detail::spline_offset_integral(s, k, cfg);
}

inline double form_entry_fourier(const FracOrder& order, std::size_t i, std::size_t j, const GalerkinBasis& basis,
                                 const QuadratureConfig& cfg = {}) {
    return form_entry_fourier_estimate(order, i, j, basis, cfg).value;
}

namespace detail {

/// int D_y b_i(x) D_y b_j(x) dx with D_y b = 2b(x) - b(x+y) - b(x-y); exact (piecewise degree 6).
inline double fd_overlap(const GalerkinBasis& B, std::size_t i, std::size_t j, double y) {
    std::vector<double> br;
    for (auto idx : {i, j})
        for (double kn : B.knots(idx))
            for (double sh : {0.0, y, -y}) br.push_back(kn + sh);
    std::sort(br.begin(), br.end());
    auto D = [&](std::size_t idx, double x) { return 2.0 * B(idx, x) - B(idx, x + y) - B(idx, x - y); };
    const auto& g = gauss_legendre(4);
    double sum = 0.0;
    for (std::size_t m = 0; m + 1 < br.size(); ++m) {
        const double a = br[m], b = br[m + 1];
        if (!(b > a)) continue;
        const double c = 0.5 * (a + b), r = 0.5 * (b - a);
        for (int q = 0; q < 4; ++q) {
            const double x = c + r * g.nodes[q];
            sum += r * g.weights[q] * D(i, x) * D(j, x);
        }
    }
    return sum;
}

/// int b_i'' b_j'': the s = 2 limit, where the difference constant vanishes.
inline double bilaplace_entry(const GalerkinBasis& B, std::size_t i, std::size_t j) {
    std::vector<double> br;
    for (auto idx : {i, j})
        for (double kn : B.knots(idx)) br.push_back(kn);
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
    // b is a cubic on each span: recover b'' from four samples
    auto second = [&](std::size_t idx, double p, double q, double x) {
        const double c = 0.5 * (p + q), r = 0.5 * (q - p);
        const double t[4] = {-0.75, -0.25, 0.25, 0.75};
        Eigen::Matrix4d V;
        Eigen::Vector4d y;
        for (int k = 0; k < 4; ++k) {
            for (int m = 0; m < 4; ++m) V(k, m) = std::pow(t[k], m);
            y(k) = B(idx, c + r * t[k]);
        }
        const Eigen::Vector4d a = V.partialPivLu().solve(y);
        const double u = (x - c) / r;
        return (2.0 * a(2) + 6.0 * a(3) * u) / (r * r);
    };
    const auto& g = gauss_legendre(2);
    double sum = 0.0;
    for (std::size_t m = 0; m + 1 < br.size(); ++m) {
        const double p = br[m], q = br[m + 1], c = 0.5 * (p + q), r = 0.5 * (q - p);
        for (int k = 0; k < 2; ++k) {
            const double x = c + r * g.nodes[k];
            sum += r * g.weights[k] * second(i, p, q, x) * second(j, p, q, x);
        }
    }
    return sum;
}

} // namespace detail

/// E_s(b_i, b_j) from the finite-difference double integral. Independent oracle for the
/// Fourier entries: the inner x-integral is exact, the y-integral follows the breakpoints of
/// the piecewise polynomial P(y), and the constant tail beyond full separation is closed form.
inline Estimate form_entry_fd_estimate(const FracOrder& order, std::size_t i, std::size_t j,
                                       const GalerkinBasis& basis, const QuadratureConfig& cfg = {}) {
    const double s = order.s();
    if (s == 2.0) return {detail::bilaplace_entry(basis, i, j), 0.0};
    const double c = constants(order, 1).c_Ns;
    std::vector<double> all;
    for (auto idx : {i, j})
        for (double kn : basis.knots(idx)) all.push_back(kn);
    std::vector<double> ys;
    for (std::size_t p = 0; p < all.size(); ++p)
        for (std::size_t q = p + 1; q < all.size(); ++q) {
            const double d = std::abs(all[p] - all[q]);
            if (d > 0.0) {
                ys.push_back(d);
                ys.push_back(0.5 * d);
            }
        }
    std::sort(ys.begin(), ys.end());
    std::vector<double> brk;
    for (double y : ys)
        if (brk.empty() || y > brk.back() * (1.0 + 1e-12)) brk.push_back(y);
    auto P = [&](double y) { return detail::fd_overlap(basis, i, j, y); };

    // [0, y1]: P = sum_{k=4..7} a_k (y/y1)^k exactly
    const double y1 = brk.front();
    constexpr int M = 10;
    Eigen::MatrixXd V(M, 4);
    Eigen::VectorXd rhs(M);
    for (int q = 0; q < M; ++q) {
        const double tau = 0.5 * (1.0 - std::cos(std::numbers::pi * (q + 0.5) / M));
        for (int k = 0; k < 4; ++k) V(q, k) = std::pow(tau, k + 4);
        rhs(q) = P(tau * y1);
    }
    const Eigen::VectorXd coef = V.colPivHouseholderQr().solve(rhs);
    const double resid = (V * coef - rhs).cwiseAbs().maxCoeff();
    double first = 0.0, first_abs = 0.0;
    for (int k = 0; k < 4; ++k) {
        first += coef(k) / (k + 4 - 2.0 * s);
        first_abs += std::abs(coef(k)) / std::abs(k + 4 - 2.0 * s);
    }
    const double scale = std::pow(y1, -2.0 * s);
    Estimate out{scale * first, scale * (resid / std::abs(4.0 - 2.0 * s) + 1e-14 * first_abs)};

    auto w = [&](double y) { return std::pow(y, -1.0 - 2.0 * s) * P(y); };
    // positive and negative lobes of P can cancel, so the tolerance follows int |w|
    double mass = 0.0;
    for (std::size_t m = 0; m + 1 < brk.size(); ++m)
        mass += gauss_sum([&](double y) { return std::abs(w(y)); }, brk[m], brk[m + 1], 8);
    auto cfg2 = cfg;
    cfg2.abs_tol = std::max(1e-300, 1e-13 * mass);
    auto mid = integrate_breaks(w, brk, cfg2);
    require_converged(mid, "form_entry_fd");
    out += mid.estimate();

    // beyond the last breakpoint P(y) = 6 <b_i, b_j>
    const double Y = brk.back();
    double G = 0.0;
    {
        const auto ki = basis.knots(i);
        const auto& g = gauss_legendre(4);
        for (int m = 0; m < 4; ++m) {
            const double a = ki[m], b = ki[m + 1], cc = 0.5 * (a + b), r = 0.5 * (b - a);
            for (int q = 0; q < 4; ++q) {
                const double x = cc + r * g.nodes[q];
                G += r * g.weights[q] * basis(i, x) * basis(j, x);
            }
        }
    }
    out += Estimate{6.0 * G * std::pow(Y, -2.0 * s) / (2.0 * s), 0.0};
    return c * out;
}

inline double form_entry_fd(const FracOrder& order, std::size_t i, std::size_t j, const GalerkinBasis& basis,
                            const QuadratureConfig& cfg = {}) {
    return form_entry_fd_estimate(order, i, j, basis, cfg).value;
}

/// Stiffness matrix of E_s on the basis. Cardinal pairs use the Fourier entry, computed once
/// per distinct offset; pairs involving a boundary spline use the difference form.
inline Eigen::MatrixXd assemble_stiffness(const FracOrder& order, const GalerkinBasis& basis,
                                          const QuadratureConfig& cfg = {}, int threads = default_threads()) {
    const std::size_t n = basis.size();
    using Key = std::tuple<int, int, int>;
    auto key = [&](std::size_t i, std::size_t j) {
        const auto& p = basis[i];
        const auto& q = basis[j];
        if (p.interval == q.interval) return Key{p.interval, p.interval, std::abs(p.local - q.local)};
        if (p.interval < q.interval) return Key{p.interval, q.interval, p.local - q.local};
        return Key{q.interval, p.interval, q.local - p.local};
    };
    std::map<Key, std::pair<std::size_t, std::size_t>> reps;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            if (basis[i].cardinal && basis[j].cardinal) reps.emplace(key(i, j), std::pair{i, j});
            else pairs.emplace_back(i, j);
        }
    const std::size_t direct = pairs.size();
    std::vector<Key> keys;
    for (const auto& [k, v] : reps) {
        keys.push_back(k);
        pairs.push_back(v);
    }
    const auto vals = parallel_map<double>(
        pairs.size(),
        [&](std::size_t m) {
            const auto [i, j] = pairs[m];
            return m < direct ? form_entry_fd(order, i, j, basis, cfg) : form_entry_fourier(order, i, j, basis, cfg);
        },
        threads);
    std::map<Key, double> table;
    for (std::size_t m = 0; m < keys.size(); ++m) table.emplace(keys[m], vals[direct + m]);
    Eigen::MatrixXd K(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j)
            if (basis[i].cardinal && basis[j].cardinal) K(i, j) = K(j, i) = table.at(key(i, j));
    for (std::size_t m = 0; m < direct; ++m) {
        const auto [i, j] = pairs[m];
        K(i, j) = K(j, i) = vals[m];
    }
    return K;
}

/// Load vector int f b_j.
inline Eigen::VectorXd assemble_load(const ScalarField<1>& f, const GalerkinBasis& basis,
                                     const QuadratureConfig& cfg = {}, int threads = default_threads()) {
    const auto vals = parallel_map<double>(
        basis.size(),
        [&](std::size_t j) {
            const auto kn = basis.knots(j);
            std::vector<double> br(kn.begin(), kn.end());
            for (const auto& k : f.kinks)
                if (k.location > kn.front() && k.location < kn.back()) br.push_back(k.location);
            std::sort(br.begin(), br.end());
            br.erase(std::unique(br.begin(), br.end()), br.end());
            auto r = integrate_breaks([&](double x) { return f(Vec<1>{x}) * basis(j, x); }, br, cfg);
            require_converged(r, "assemble_load");
            return r.value;
        },
        threads);
    return Eigen::Map<const Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

struct GalerkinSystem {
    GalerkinBasis basis;
    Eigen::MatrixXd stiffness;
    Eigen::VectorXd load;
    Eigen::VectorXd coefficients;
};

/// Smallest eigenvalue of a symmetric matrix.
inline double min_eigenvalue(const Eigen::MatrixXd& K) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

/// Galerkin approximation u_h = sum c_j b_j of the weak solution.
struct WeakSolution {
    FracOrder order;
    GalerkinSystem system;
    /// E_s(u_h, u_h) = c^T K c.
    double energy = 0.0;
    /// max_j |E_s(u_h, b_j) - int f b_j| (discrete Galerkin orthogonality).
    double residual = 0.0;

    double operator()(double x) const {
        double v = 0.0;
        for (std::size_t i : system.basis.active(x)) v += system.coefficients(static_cast<Eigen::Index>(i)) * system.basis(i, x);
        return v;
    }

    ScalarField<1> as_field() const {
        ScalarField<1> u;
        auto self = std::make_shared<WeakSolution>(*this);
        u.fn = [self](const Vec<1>& x) { return (*self)(x[0]); };
        const auto& iv = system.basis.domain().intervals();
        u.support_radius = std::max(std::abs(iv.front().a), std::abs(iv.back().b));
        u.decay = Decay::compact();
        u.exterior_limit = u.fn;
        u.scale = system.basis.h();
        u.name = "weak_solution";
        return u;
    }
};

inline GalerkinSystem assemble(const FracOrder& order, const IntervalUnionDomain& domain, const ScalarField<1>& f,
                               double h, const QuadratureConfig& cfg = {}, int threads = default_threads()) {
    cfg.validate();
    GalerkinBasis basis(domain, h);
    auto K = assemble_stiffness(order, basis, cfg, threads);
    auto F = assemble_load(f, basis, cfg, threads);
    return {std::move(basis), std::move(K), std::move(F), {}};
}

/// Weak solution of (-Delta)^s u = f in the domain, u = 0 outside, on splines of spacing h.
inline WeakSolution solve_weak(const FracOrder& order, const IntervalUnionDomain& domain, const ScalarField<1>& f,
                               double h, const QuadratureConfig& cfg = {}, int threads = default_threads()) {
    auto sys = assemble(order, domain, f, h, cfg, threads);
    Eigen::LLT<Eigen::MatrixXd> llt(sys.stiffness);
    if (llt.info() != Eigen::Success) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sys.stiffness, Eigen::EigenvaluesOnly);
        std::ostringstream os;
        os << "solve_weak: stiffness is not positive definite (eigenvalues in [" << es.eigenvalues().minCoeff()
           << ", " << es.eigenvalues().maxCoeff() << "], n = " << sys.stiffness.rows() << ")";
        throw AccuracyFailure(os.str(), es.eigenvalues().minCoeff(), 0.0);
    }
    sys.coefficients = llt.solve(sys.load);
    WeakSolution u{order, std::move(sys)};
    const auto& S = u.system;
    u.energy = S.coefficients.dot(S.stiffness * S.coefficients);
    u.residual = (S.stiffness * S.coefficients - S.load).cwiseAbs().maxCoeff();
    return u;
}

/// Extremes of u_h on one interval, sampled at a + k (b-a)/64, k = 1..63.
struct IntervalExtremes {
    Interval interval;
    double min = 0.0;
    double argmin = 0.0;
    double max = 0.0;
    double argmax = 0.0;
    /// min and max after halving h, and the larger of the two changes.
    double min_refined = 0.0;
    double max_refined = 0.0;
    double change = 0.0;
};

struct MaxPrincipleReport {
    double s = 0.0;
    double h = 0.0;
    std::vector<IntervalExtremes> intervals;
    /// Sign of the minimum over the first interval: -1 or +1 when certified
    /// (|min| > 10 x change under h -> h/2), 0 otherwise.
    int left_sign = 0;
    double solver_residual = 0.0;
};

/// The unit-mass quartic bump centred at 3 with radius 1/2.
inline ScalarField<1> mp_default_bump() { return field::quartic_bump<1>(Vec<1>{3.0}, 0.5, 15.0 / 8.0); }

inline IntervalUnionDomain mp_default_domain() { return IntervalUnionDomain({{-1.0, 1.0}, {2.0, 4.0}}); }

/// Solve with a nonnegative load supported away from the first interval and report the sign
/// of u_h there; the run is repeated at h/2 to attach a discretization scale to every extreme.
inline MaxPrincipleReport max_principle_experiment(const FracOrder& order, const IntervalUnionDomain& domain,
                                                   const ScalarField<1>& f, double h,
                                                   const QuadratureConfig& cfg = {}, int threads = default_threads()) {
    if (domain.size() < 2) throw DomainError("max_principle_experiment: need at least two intervals");
    const auto first = domain.intervals().front();
    for (int k = 0; k <= 256; ++k) {
        const double x = first.a + (first.b - first.a) * k / 256.0;
        if (f(Vec<1>{x}) != 0.0) throw DomainError("max_principle_experiment: load must vanish on the first interval");
    }
    for (const auto& iv : domain.intervals())
        for (int k = 0; k <= 256; ++k)
            if (f(Vec<1>{iv.a + (iv.b - iv.a) * k / 256.0}) < 0.0)
                throw DomainError("max_principle_experiment: load must be nonnegative");
    const auto coarse = solve_weak(order, domain, f, h, cfg, threads);
    const auto fine = solve_weak(order, domain, f, 0.5 * h, cfg, threads);
    MaxPrincipleReport rep;
    rep.s = order.s();
    rep.h = h;
    rep.solver_residual = std::max(coarse.residual, fine.residual);
    for (const auto& iv : domain.intervals()) {
        IntervalExtremes e;
        e.interval = iv;
        e.min = e.min_refined = kInf;
        e.max = e.max_refined = -kInf;
        for (int k = 1; k < 64; ++k) {
            const double x = iv.a + (iv.b - iv.a) * k / 64.0;
            const double uc = coarse(x), uf = fine(x);
            if (uc < e.min) e.min = uc, e.argmin = x;
            if (uc > e.max) e.max = uc, e.argmax = x;
            e.min_refined = std::min(e.min_refined, uf);
            e.max_refined = std::max(e.max_refined, uf);
        }
        e.change = std::max(std::abs(e.min - e.min_refined), std::abs(e.max - e.max_refined));
        rep.intervals.push_back(e);
    }
    const auto& L = rep.intervals.front();
    const double dmin = std::abs(L.min - L.min_refined);
    if (std::abs(L.min) > 10.0 * dmin) rep.left_sign = L.min < 0.0 ? -1 : 1;
    return rep;
}

struct IbpReport {
    /// E_s(u, phi) from the Fourier form and with the roles of u and phi exchanged.
    Estimate energy;
    double energy_swapped = 0.0;
    /// int phi (-Delta)^s u dx with the fourth-difference operator.
    Estimate pointwise;
    double discrepancy = 0.0;
    double relative = 0.0;
};

namespace detail {

/// int |xi|^{2s} a^(xi) conj(b^(xi)) d xi for a field with a transform and a basis spline.
inline Estimate fourier_pairing(const FracOrder& order, const ScalarField<1>& u, std::size_t i,
                                const GalerkinBasis& basis, bool swap, const QuadratureConfig& cfg) {
    const auto& tr = *u.transform;
    const double s = order.s();
    const double h = basis.h();
    const double dc = swap ? basis.center(i) - tr.center[0] : tr.center[0] - basis.center(i);
    // u^ conj(b^) + conj: 2 Re over xi > 0; b^ = (2 pi)^{-1/2} h sinc^4(xi h/2) e^{-i xi c}
    auto g = [&](double xi) {
        const double q = sinc(0.5 * xi * h);
        const double q2 = q * q;
        return 2.0 * std::pow(xi, 2.0 * s) * tr.profile(xi) * h * q2 * q2 * std::cos(xi * dc) /
               std::sqrt(2.0 * std::numbers::pi);
    };
    const double top = std::isfinite(tr.cutoff) ? tr.cutoff : 2000.0 / h;
    const double width = std::numbers::pi / (std::abs(dc) + 1.0 / std::max(top, 1.0) + 0.5 * h + 1.0);
    const int n = std::min(200000, std::max(8, static_cast<int>(std::ceil(top / width))));
    std::vector<double> br;
    for (int k = 0; k <= n; ++k) br.push_back(top * k / n);
    auto cfg2 = cfg;
    cfg2.abs_tol = std::min(cfg.abs_tol, 1e-14);
    auto r = integrate_breaks(g, br, cfg2);
    require_converged(r, "ibp_check (Fourier pairing)");
    return r.estimate();
}

} // namespace detail

/// Integration by parts: E_s(u, b_i) against int b_i (-Delta)^s u for u smooth with compact
/// support in the domain and a closed-form transform.
inline IbpReport ibp_check(const FracOrder& order, const ScalarField<1>& u, std::size_t i, const GalerkinBasis& basis,
                           const QuadratureConfig& cfg = {}) {
    IbpReport rep;
    if (u.decay.kind == Decay::Kind::compact && u.support_radius == 0.0) return rep;
    if (!u.transform) throw CapabilityError("ibp_check: field '" + u.name + "' has no closed-form transform");
    if (!basis[i].cardinal) throw CapabilityError("ibp_check: test function must be a cardinal spline");
    rep.energy = detail::fourier_pairing(order, u, i, basis, false, cfg);
    rep.energy_swapped = detail::fourier_pairing(order, u, i, basis, true, cfg).value;
    const auto kn = basis.knots(i);
    std::vector<double> br(kn.begin(), kn.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
    auto cfg2 = cfg;
    cfg2.rel_tol = std::max(cfg.rel_tol, 1e-8);
    double err = 0.0; // worst pointwise error, weighted by int b_i = h
    auto r = integrate_breaks(
        [&](double x) {
            const auto e = frac_lap_4th_estimate<1>(order, u, Vec<1>{x}, cfg);
            err = std::max(err, e.error);
            return basis(i, x) * e.value;
        },
        br, cfg2);
    rep.pointwise = {r.value, r.error + err * basis.h()};
    rep.discrepancy = std::abs(rep.energy.value - rep.pointwise.value);
    rep.relative = rep.discrepancy / std::max(std::abs(rep.energy.value), 1e-300);
    return rep;
}

} // namespace fraclap
