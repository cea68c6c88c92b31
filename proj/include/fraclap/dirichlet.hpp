#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "field.hpp"
#include "geometry.hpp"
#include "hyperop.hpp"
#include "kernels.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "specialfn.hpp"

namespace fraclap {

template <int N>
using BoundaryFunction = std::function<double(const Vec<N>&)>;

/// A field assembled from kernel integrals, with a record of how it was built.
template <int N>
struct SolutionField {
    ScalarField<N> field;
    /// Value with quadrature error; field.fn returns its value part.
    std::function<Estimate(const Vec<N>&)> estimate;
    std::vector<std::string> provenance;
    /// u = 0 on B_r minus the closed ball for this r (kInf: u = 0 outside B; 1: no such r).
    double exterior_gap = kInf;

    double operator()(const Vec<N>& x) const { return field(x); }
};

/// Data of the full Dirichlet problem. Empty members are zero.
template <int N>
struct ProblemData {
    std::optional<ScalarField<N>> f;
    BoundaryFunction<N> g0;
    BoundaryFunction<N> g1;
    std::optional<ScalarField<N>> psi;
    /// psi = 0 on B_r minus the closed ball; r = 1 means psi reaches the sphere.
    double r = kInf;
    /// Caller asserts psi in C^{s-1+alpha}(B_r) and the continuity hypothesis on the correction.
    bool regularity_asserted = false;
    bool continuity_asserted = false;
};

struct TraceResult {
    double z = 0.0; // boundary point (first coordinate; the direction is the caller's)
    double d_sm2 = 0.0;
    double d_sm1 = 0.0;
    double err_sm2 = 0.0;
    double err_sm1 = 0.0;
    double extrapolation_error = 0.0;
};

namespace detail {

struct Break {
    double r;
    double exponent; // NaN: plain split
};

/// Pieces on [a,b] split at the given breaks; coincident breaks keep the roughest exponent.
inline std::vector<Piece> graded_pieces(double a, double b, std::vector<Break> br, double exp_a, double exp_b) {
    br.push_back({a, exp_a});
    br.push_back({b, exp_b});
    std::sort(br.begin(), br.end(), [](const Break& p, const Break& q) { return p.r < q.r; });
    std::vector<Break> m;
    for (const auto& x : br) {
        if (x.r < a || x.r > b) continue;
        if (!m.empty() && x.r == m.back().r) {
            if (std::isnan(m.back().exponent) || (!std::isnan(x.exponent) && x.exponent < m.back().exponent))
                m.back().exponent = x.exponent;
        } else {
            m.push_back(x);
        }
    }
    std::vector<Piece> out;
    for (std::size_t i = 0; i + 1 < m.size(); ++i) {
        Piece p{m[i].r, m[i + 1].r};
        if (!std::isnan(m[i].exponent)) p.grade_left = grade_for_exponent(m[i].exponent);
        if (!std::isnan(m[i + 1].exponent)) p.grade_right = grade_for_exponent(m[i + 1].exponent);
        out.push_back(p);
    }
    return out;
}

/// Distance from x to the unit sphere along the unit direction theta.
template <int N>
double ray_to_sphere(const Vec<N>& x, const Vec<N>& theta) {
    const double b = dot<N>(x, theta);
    const double d = one_minus_sq<N>(x);
    const double q = std::sqrt(b * b + d);
    return b >= 0.0 ? d / (b + q) : q - b;
}

/// int_B G_s(x,y) f(y) dy in polar coordinates about x.
template <int N>
Estimate green_potential(const BallKernels<N>& K, const ScalarField<N>& f, const Vec<N>& x,
                         const QuadratureConfig& cfg) {
    if (one_minus_sq<N>(x) <= 0.0) return {};
    const double s = K.order().s();
    // rho^{N-1} G ~ rho^{2s-1} at the diagonal (a logarithm when 2s = N); G ~ delta(y)^s at the sphere
    double diag = 2.0 * s - 1.0;
    if (2.0 * s == N) diag = -0.25;
    const auto rule = sphere_rule<N>(cfg.sphere_resolution);
    Estimate total;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const auto& th = rule.nodes[i];
        const double R = ray_to_sphere<N>(x, th);
        std::vector<Break> br;
        if constexpr (N == 1) {
            for (const auto& k : f.kinks) {
                const double rho = th[0] * (k.location - x[0]);
                if (rho > 0.0 && rho < R) br.push_back({rho, k.exponent});
            }
        }
        const auto pieces = graded_pieces(0.0, R, br, diag, s);
        auto g = [&](double rho) {
            const double rr = std::max(rho, 2.0 * kDiagonalGuard);
            const Vec<N> y = x + rr * th;
            const double fy = f(y);
            if (fy == 0.0) return 0.0;
            return std::pow(rho, N - 1) * K.green(x, y).value * fy;
        };
        const auto q = integrate_pieces(g, pieces, cfg);
        require_converged(q, "green potential");
        total += rule.weights[i] * q.estimate();
    }
    return total;
}

/// sum over the sphere rule of E_k(x,theta) g(theta).
template <int N>
double boundary_potential(const BallKernels<N>& K, TraceOrder k, const BoundaryFunction<N>& g, const Vec<N>& x,
                          const QuadratureConfig& cfg) {
    if (one_minus_sq<N>(x) <= 0.0) return 0.0;
    const auto rule = sphere_rule<N>(cfg.sphere_resolution);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * K.eden(k, x, rule.nodes[i]) * g(rule.nodes[i]);
    return s;
}

/// int over h_lo < |y| - 1 < h_hi of g(y) (|y|^2 - 1)^{-t} |x - y|^{-N} dy, y = (1+h) theta.
/// The offset h keeps |y|^2 - 1 = h (2 + h) exact near the sphere. `lead` is the exponent
/// of the integrand at h = 0 (used only when h_lo = 0); decay_p bounds |g| ~ |y|^{-p}.
template <int N, class G>
Estimate exterior_shell(const Vec<N>& x, double t, G&& g, const std::vector<Kink>& kinks, double h_lo, double h_hi,
                        double support, double decay_p, double lead, const QuadratureConfig& cfg) {
    const auto rule = sphere_rule<N>(cfg.sphere_resolution);
    const double hmax_support = std::isfinite(support) ? support - 1.0 : kInf;
    double H = std::min(h_hi, hmax_support);
    bool tail = false;
    if (!std::isfinite(H)) {
        double kmax = 0.0;
        for (const auto& k : kinks) kmax = std::max(kmax, std::abs(k.location) - 1.0);
        H = std::max({8.0, 2.0 * kmax + 2.0, h_lo + 8.0});
        tail = true;
    }
    Estimate total;
    if (!(H > h_lo)) return total;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const auto& th = rule.nodes[i];
        auto F = [&](double h) {
            const Vec<N> y = (1.0 + h) * th;
            const double gy = g(y);
            if (gy == 0.0) return 0.0;
            double dist;
            if constexpr (N == 1) dist = (1.0 - th[0] * x[0]) + h;
            else dist = distance<N>(x, y);
            return std::pow(1.0 + h, N - 1) * gy * std::pow(h * (2.0 + h), -t) * std::pow(dist, -N);
        };
        std::vector<Break> br;
        for (const auto& k : kinks) {
            const double h = (N == 1 ? th[0] * k.location : k.location) - 1.0;
            if (h > h_lo && h < H) br.push_back({h, k.exponent});
        }
        const double nan = std::numeric_limits<double>::quiet_NaN();
        const auto pieces = graded_pieces(h_lo, H, br, h_lo == 0.0 ? lead : nan, nan);
        auto q = integrate_pieces(F, pieces, cfg);
        require_converged(q, "exterior kernel integral");
        total += rule.weights[i] * q.estimate();
        if (tail) {
            const double p = 1.0 + 2.0 * t + std::min(decay_p, 4.0);
            auto Ft = [&](double y) { return F(y); };
            auto qt = integrate_tail(Ft, H, p, cfg);
            require_converged(qt, "exterior kernel integral (tail)");
            total += rule.weights[i] * qt.estimate();
        }
    }
    return total;
}

/// Limit of psi at |z| = 1 from outside: analytic if the field carries it, else extrapolated.
template <int N>
double exterior_limit_at(const ScalarField<N>& psi, const Vec<N>& z) {
    if (psi.exterior_limit) return psi.exterior_limit(z);
    // polynomial extrapolation of psi((1+h) z) at h = 1e-3 2^{-k}
    constexpr int n = 5;
    double h[n], v[n];
    for (int k = 0; k < n; ++k) {
        h[k] = 1e-3 * std::ldexp(1.0, -k);
        v[k] = psi((1.0 + h[k]) * z);
    }
    for (int j = 1; j < n; ++j)
        for (int k = n - 1; k >= j; --k) v[k] = (h[k - j] * v[k] - h[k] * v[k - 1]) / (h[k - j] - h[k]);
    return v[n - 1];
}

template <int N>
std::vector<Kink> sphere_kinks(double exponent) {
    if constexpr (N == 1) return {{-1.0, exponent}, {1.0, exponent}};
    else return {{1.0, exponent}};
}

/// Coefficients a0, a1 of the polynomial through (t_k, w_k) and the same from all but the first point.
struct PolyFit {
    double a0, a1, a0_drop, a1_drop;
};

inline PolyFit poly_fit(const std::vector<double>& t, const std::vector<double>& w) {
    auto fit = [&](std::size_t from) {
        const auto n = static_cast<Eigen::Index>(t.size() - from);
        Eigen::MatrixXd V(n, n);
        Eigen::VectorXd b(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            double p = 1.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                V(i, j) = p;
                p *= t[from + i];
            }
            b(i) = w[from + i];
        }
        const Eigen::VectorXd c = V.fullPivLu().solve(b);
        return std::pair{c(0), n > 1 ? c(1) : 0.0};
    };
    const auto [a0, a1] = fit(0);
    const auto [b0, b1] = fit(1);
    return {a0, a1, b0, b1};
}

} // namespace detail

/// int_B G_s(.,y) f(y) dy, zero outside B.
template <int N>
SolutionField<N> solve_green(const FracOrder& order, const ScalarField<N>& f, const QuadratureConfig& cfg = {}) {
    cfg.validate();
    auto K = std::make_shared<const BallKernels<N>>(order);
    SolutionField<N> u;
    u.estimate = [K, f, cfg](const Vec<N>& x) { return detail::green_potential<N>(*K, f, x, cfg); };
    u.field.fn = [e = u.estimate](const Vec<N>& x) { return e(x).value; };
    u.field.kinks = detail::sphere_kinks<N>(order.s());
    u.field.support_radius = 1.0;
    u.field.decay = Decay::compact();
    u.field.exterior_limit = [](const Vec<N>&) { return 0.0; };
    u.field.radial = f.radial;
    u.field.scale = std::min(f.scale_at(Vec<N>{}), 1.0);
    u.field.name = "green[" + f.name + "]";
    u.provenance = {"G_s * f (" + f.name + ")"};
    return u;
}

/// int over the sphere of E_k(.,theta) g(theta) dtheta, zero outside B.
template <int N>
SolutionField<N> harmonic_from_boundary(const FracOrder& order, TraceOrder k, BoundaryFunction<N> g,
                                        const QuadratureConfig& cfg = {}) {
    cfg.validate();
    if (!g) throw DomainError("harmonic_from_boundary: boundary function is empty");
    auto K = std::make_shared<const BallKernels<N>>(order);
    SolutionField<N> u;
    u.estimate = [K, k, g, cfg](const Vec<N>& x) {
        return Estimate{detail::boundary_potential<N>(*K, k, g, x, cfg), 0.0};
    };
    u.field.fn = [K, k, g, cfg](const Vec<N>& x) { return detail::boundary_potential<N>(*K, k, g, x, cfg); };
    const double beta = k == TraceOrder::s_minus_2 ? order.s() - 2.0 : order.s() - 1.0;
    u.field.kinks = detail::sphere_kinks<N>(beta);
    u.field.boundary_singular = beta < 0.0;
    u.field.support_radius = 1.0;
    u.field.decay = Decay::compact();
    u.field.exterior_limit = [](const Vec<N>&) { return 0.0; };
    u.field.name = k == TraceOrder::s_minus_2 ? "E_{s-2}[g]" : "E_{s-1}[g]";
    u.provenance = {u.field.name};
    return u;
}

namespace detail {

/// sign * gamma * delta(x)^t * int_{|y|-1 > h_lo} psi(y) (|y|^2-1)^{-t} |x-y|^{-N} dy: the
/// Gamma_t-extension of psi restricted to |y| > 1 + h_lo.
template <int N>
Estimate gamma_extension(const BallKernels<N>& K, const ScalarField<N>& psi, const Vec<N>& x, double h_lo,
                         const QuadratureConfig& cfg) {
    const double d = one_minus_sq<N>(x);
    if (d <= 0.0) return {};
    const double t = K.order().s();
    const double sign = K.order().m() % 2 == 0 ? 1.0 : -1.0;
    const double c = sign * K.normalization().gamma_Nsigma * std::pow(d, t);
    if (c == 0.0) return {};
    const double p = psi.decay.kind == Decay::Kind::algebraic ? psi.decay.p : 4.0;
    const auto I = exterior_shell<N>(x, t, psi, psi.kinks, h_lo, kInf, psi.support_radius, p, -t, cfg);
    return c * I;
}

template <int N>
void check_vanishes_near_sphere(const ScalarField<N>& psi, double r) {
    const double top = std::isfinite(r) ? r : 2.0;
    for (int k = 0; k < 16; ++k) {
        const double rho = 1.0 + (top - 1.0) * (k + 0.5) / 16.0;
        for (double sg : {1.0, -1.0}) {
            const double v = psi(axis_point<N>(sg * rho));
            if (v != 0.0) {
                std::ostringstream os;
                os << "extend_exterior: psi(" << sg * rho << ") = " << v << " but psi must vanish on B_" << r
                   << " outside B; use extend_exterior_general";
                throw DomainError(os.str());
            }
        }
    }
}

} // namespace detail

/// The s-harmonic extension of exterior data psi vanishing on B_r minus B, r > 1.
template <int N>
SolutionField<N> extend_exterior(const FracOrder& order, const ScalarField<N>& psi, double r,
                                 const QuadratureConfig& cfg = {}) {
    cfg.validate();
    if (!(r > 1.0)) {
        std::ostringstream os;
        os << "extend_exterior: inner radius r = " << r << " <= 1; data reaching the sphere needs extend_exterior_general";
        throw DomainError(os.str());
    }
    if (!psi.in_L1(order.s())) throw IntegrabilityError("extend_exterior: psi is not declared in L1_s");
    detail::check_vanishes_near_sphere<N>(psi, r);
    auto K = std::make_shared<const BallKernels<N>>(order);
    SolutionField<N> u;
    u.estimate = [K, psi, r, cfg](const Vec<N>& x) -> Estimate {
        if (one_minus_sq<N>(x) <= 0.0) return {psi(x), 0.0};
        return detail::gamma_extension<N>(*K, psi, x, r - 1.0, cfg);
    };
    u.field.fn = [e = u.estimate](const Vec<N>& x) { return e(x).value; };
    u.field.kinks = psi.kinks;
    for (const auto& k : detail::sphere_kinks<N>(order.s())) u.field.kinks.push_back(k);
    u.field.support_radius = psi.support_radius;
    u.field.decay = psi.decay;
    u.field.exterior_limit = [](const Vec<N>&) { return 0.0; };
    u.field.radial = psi.radial;
    u.field.scale = std::min(psi.scale, r - 1.0);
    u.field.name = "Gamma_s[" + psi.name + "]";
    u.provenance = {"Gamma_s * psi (" + psi.name + ", r = " + std::to_string(r) + ") + psi outside B"};
    u.exterior_gap = r;
    return u;
}

/// Extension of exterior data that may reach the sphere: the Gamma_s-extension of the far part,
/// the lower-order Gamma_{s-1}-extension of the near part and an E_{s-1} correction that removes
/// the D^{s-1} trace the lower-order kernel leaves behind. One-dimensional only.
template <int N>
SolutionField<N> extend_exterior_general(const FracOrder& order, const ScalarField<N>& psi, double r,
                                         bool continuity_asserted, const QuadratureConfig& cfg = {}) {
    cfg.validate();
    if constexpr (N != 1) {
        throw CapabilityError("extend_exterior_general: only N = 1 is supported");
    } else {
        if (!order.is_higher_order()) throw DomainError("extend_exterior_general: needs s in (1,2)");
        if (!(r > 1.0)) throw DomainError("extend_exterior_general: need r > 1 for the split of psi");
        if (!continuity_asserted)
            throw DomainError("extend_exterior_general: the continuity hypothesis on the correction must be asserted");
        if (!psi.in_L1(order.s())) throw IntegrabilityError("extend_exterior_general: psi is not declared in L1_s");

        const FracOrder low = order.lowered();
        auto Ks = std::make_shared<const BallKernels<1>>(order);
        auto Kl = std::make_shared<const BallKernels<1>>(low);
        const double sig = low.s();
        const double gam = Kl->normalization().gamma_Nsigma;

        // psi_1 = psi on |y| < r, psi_2 = psi on |y| >= r
        auto psi1 = psi;
        psi1.fn = [f = psi.fn, r](const Vec<1>& y) { return std::abs(y[0]) < r ? f(y) : 0.0; };
        psi1.kinks.push_back({r, 0.0});
        psi1.kinks.push_back({-r, 0.0});
        psi1.support_radius = std::min(psi.support_radius, r);
        psi1.decay = Decay::compact();

        const double c_plus = detail::exterior_limit_at<1>(psi, Vec<1>{1.0});
        const double c_minus = detail::exterior_limit_at<1>(psi, Vec<1>{-1.0});

        // phi(z) = gamma int (psi_1(y) - psi_1(z)) (y^2-1)^{1-s} |z-y|^{-1} dy at z = +-1
        auto phi_at = [&](double z, double cz) {
            auto g = [&](const Vec<1>& y) { return psi1(y) - cz; };
            const auto I = detail::exterior_shell<1>(Vec<1>{z}, sig, g, psi1.kinks, 0.0, kInf, kInf, 0.0, -sig, cfg);
            if (!std::isfinite(I.value))
                throw AccuracyFailure("extend_exterior_general: correction density is not finite", I.value, I.error);
            return gam * I;
        };
        const Estimate phi_p = phi_at(1.0, c_plus), phi_m = phi_at(-1.0, c_minus);

        SolutionField<1> u;
        u.estimate = [=](const Vec<1>& x) -> Estimate {
            const double d = one_minus_sq<1>(x);
            if (d <= 0.0) return {psi(x), 0.0};
            // far part with the order-s kernel
            Estimate v = detail::gamma_extension<1>(*Ks, psi, x, r - 1.0, cfg);
            // near part with the lower-order kernel, written against its limit at the closer
            // pole so the kernel's unit mass is exact
            const double cz = x[0] >= 0.0 ? c_plus : c_minus;
            auto g = [&](const Vec<1>& y) { return psi1(y) - cz; };
            const auto I = detail::exterior_shell<1>(x, sig, g, psi1.kinks, 0.0, kInf, kInf, 0.0, -sig, cfg);
            v += Estimate{cz, 0.0};
            v += (gam * std::pow(d, sig)) * I;
            // correction -2 sum_z E_{s-1}(x,z) phi(z)
            const double ep = Ks->eden(TraceOrder::s_minus_1, x, Vec<1>{1.0});
            const double em = Ks->eden(TraceOrder::s_minus_1, x, Vec<1>{-1.0});
            v += (-2.0 * ep) * phi_p;
            v += (-2.0 * em) * phi_m;
            return v;
        };
        u.field.fn = [e = u.estimate](const Vec<1>& x) { return e(x).value; };
        u.field.kinks = psi.kinks;
        for (const auto& k : detail::sphere_kinks<1>(order.s() - 1.0)) u.field.kinks.push_back(k);
        u.field.support_radius = psi.support_radius;
        u.field.decay = psi.decay;
        u.field.exterior_limit = [=](const Vec<1>& z) { return z[0] < 0.0 ? c_minus : c_plus; };
        u.field.scale = std::min(psi.scale, r - 1.0);
        u.field.name = "Gamma_general[" + psi.name + "]";
        std::ostringstream os;
        os << "Gamma_s * psi on |y| >= " << r << " + Gamma_{s-1} * psi on |y| < " << r
           << " - 2 E_{s-1}[phi], phi(+-1) = (" << phi_p.value << ", " << phi_m.value << ") + psi outside B";
        u.provenance = {os.str()};
        u.exterior_gap = 1.0;
        return u;
    }
}

/// Sum of two solution fields (provenance concatenated).
template <int N>
SolutionField<N> operator+(const SolutionField<N>& a, const SolutionField<N>& b) {
    SolutionField<N> u;
    u.field = field::combine(1.0, a.field, 1.0, b.field);
    u.estimate = [ea = a.estimate, eb = b.estimate](const Vec<N>& x) { return ea(x) + eb(x); };
    u.field.fn = [e = u.estimate](const Vec<N>& x) { return e(x).value; };
    u.provenance = a.provenance;
    u.provenance.insert(u.provenance.end(), b.provenance.begin(), b.provenance.end());
    u.exterior_gap = std::min(a.exterior_gap, b.exterior_gap);
    return u;
}

template <int N>
SolutionField<N> zero_solution() {
    SolutionField<N> u;
    u.field = field::constant<N>(0.0);
    u.estimate = [](const Vec<N>&) { return Estimate{}; };
    u.provenance = {"0"};
    return u;
}

/// Solution of the full problem: Green potential of f, both boundary potentials and the
/// extension of the exterior datum, added term by term.
template <int N>
SolutionField<N> solve_full(const FracOrder& order, const ProblemData<N>& data, const QuadratureConfig& cfg = {}) {
    std::optional<SolutionField<N>> u;
    auto add = [&](SolutionField<N> v) { u = u ? *u + v : std::move(v); };
    if (data.f) add(solve_green<N>(order, *data.f, cfg));
    if (data.g0) add(harmonic_from_boundary<N>(order, TraceOrder::s_minus_2, data.g0, cfg));
    if (data.g1) add(harmonic_from_boundary<N>(order, TraceOrder::s_minus_1, data.g1, cfg));
    if (data.psi) {
        if (data.r > 1.0) {
            add(extend_exterior<N>(order, *data.psi, data.r, cfg));
        } else {
            if (!data.regularity_asserted)
                throw DomainError("solve_full: psi reaches the sphere; its regularity on B_r must be asserted");
            // split radius: anywhere in (1, 2) works for the formula; 1.5 keeps both parts well sized
            add(extend_exterior_general<N>(order, *data.psi, 1.5, data.continuity_asserted, cfg));
        }
    }
    return u ? *u : zero_solution<N>();
}

/// Weighted traces at the boundary point z by extrapolation from x = (1 - t) z, t = 2^{-k}.
template <int N>
TraceResult extract_traces(const SolutionField<N>& u, const Vec<N>& z, const FracOrder& order,
                           const QuadratureConfig& cfg = {}) {
    cfg.validate();
    if (std::abs(norm<N>(z) - 1.0) > 1e-12) throw DomainError("extract_traces: z must lie on the unit sphere");
    const double s = order.s();
    double ext;
    if (u.field.exterior_limit) {
        ext = u.field.exterior_limit(z);
    } else {
        ext = detail::exterior_limit_at<N>(u.field, z);
    }
    const int n = cfg.extrap_depth + 3;
    std::vector<double> t(n), w(n), v(n);
    for (int k = 0; k < n; ++k) {
        t[k] = std::ldexp(1.0, -(4 + k));
        const Vec<N> x = (1.0 - t[k]) * z;
        const double d = t[k] * (2.0 - t[k]);
        const double diff = u(x) - ext;
        w[k] = std::pow(d, 2.0 - s) * diff;
        v[k] = 2.0 * diff / std::pow(d, s - 1.0);
    }
    const auto F = detail::poly_fit(t, w);
    TraceResult out;
    out.z = z[0];
    out.d_sm2 = F.a0;
    out.err_sm2 = std::abs(F.a0 - F.a0_drop);
    out.d_sm1 = F.a1;
    out.err_sm1 = std::abs(F.a1 - F.a1_drop);
    // with D^{s-2} u = 0 established, D^{s-1} u = 2 lim (u - ext) / delta^{s-1} is a value limit
    if (std::abs(out.d_sm2) <= std::max(10.0 * out.err_sm2, 1e-12)) {
        const auto G = detail::poly_fit(t, v);
        out.d_sm1 = G.a0;
        out.err_sm1 = std::abs(G.a0 - G.a0_drop);
    }
    out.extrapolation_error = std::max(out.err_sm2, out.err_sm1);
    if (!std::isfinite(out.d_sm2) || !std::isfinite(out.d_sm1) || !std::isfinite(out.extrapolation_error)) {
        std::ostringstream os;
        os << "extract_traces: extrapolation did not converge (last iterates " << w[n - 2] << ", " << w[n - 1] << ")";
        throw AccuracyFailure(os.str(), out.d_sm2, out.extrapolation_error);
    }
    return out;
}

/// int over |y| > 1 of Gamma_t(x,y) dy; equals 1 in B for t in (0,1).
template <int N>
Estimate nonlocal_poisson_mass(const FracOrder& order, const Vec<N>& x, const QuadratureConfig& cfg = {}) {
    const BallKernels<N> K(order);
    const auto one = field::constant<N>(1.0);
    if (one_minus_sq<N>(x) <= 0.0) throw DomainError("nonlocal_poisson_mass: x must lie in B");
    return detail::gamma_extension<N>(K, one, x, 0.0, cfg);
}

struct RepresentationReport {
    std::vector<double> x;
    std::vector<double> u;
    std::vector<double> reconstructed;
    double sup_discrepancy = 0.0;
    TraceResult trace_left, trace_right;
};

/// Rebuild u from its measured (-Delta)^s u, exterior values and traces, and compare.
/// (-Delta)^s u is sampled at Chebyshev nodes on {delta >= 0.1}, interpolated, and held
/// constant in the boundary layer.
template <int N>
RepresentationReport verify_representation(const SolutionField<N>& u, const FracOrder& order,
                                           const QuadratureConfig& cfg = {}, int probes = 9) {
    if constexpr (N != 1) {
        throw CapabilityError("verify_representation: only N = 1 is supported");
    } else {
        if (!(u.exterior_gap > 1.0))
            throw CapabilityError("verify_representation: u must vanish on B_r minus B for some r > 1");
        const double a = std::sqrt(0.9);
        constexpr int m = 17;
        std::vector<double> nodes(m), vals(m), bw(m);
        for (int j = 0; j < m; ++j) {
            nodes[j] = a * std::cos(std::numbers::pi * j / (m - 1));
            bw[j] = ((j % 2) ? -1.0 : 1.0) * ((j == 0 || j == m - 1) ? 0.5 : 1.0);
        }
        vals = parallel_map<double>(m, [&](std::size_t j) {
            return frac_lap_4th<1>(order, u.field, Vec<1>{nodes[j]}, cfg);
        });
        auto interp = [=](const Vec<1>& y) {
            const double x = std::clamp(y[0], -a, a);
            double num = 0.0, den = 0.0;
            for (int j = 0; j < m; ++j) {
                if (x == nodes[j]) return vals[j];
                const double c = bw[j] / (x - nodes[j]);
                num += c * vals[j];
                den += c;
            }
            return num / den;
        };
        auto fmeas = field::from_function<1>(interp, {}, 1.0, Decay::compact(), "measured");

        RepresentationReport rep;
        rep.trace_left = extract_traces<1>(u, Vec<1>{-1.0}, order, cfg);
        rep.trace_right = extract_traces<1>(u, Vec<1>{1.0}, order, cfg);
        const double l2 = rep.trace_left.d_sm2, r2 = rep.trace_right.d_sm2;
        const double l1 = rep.trace_left.d_sm1, r1 = rep.trace_right.d_sm1;
        BoundaryFunction<1> g0 = [=](const Vec<1>& z) { return z[0] < 0.0 ? l2 : r2; };
        BoundaryFunction<1> g1 = [=](const Vec<1>& z) { return z[0] < 0.0 ? l1 : r1; };

        auto rebuilt = solve_green<1>(order, fmeas, cfg) +
                       harmonic_from_boundary<1>(order, TraceOrder::s_minus_2, g0, cfg) +
                       harmonic_from_boundary<1>(order, TraceOrder::s_minus_1, g1, cfg);
        if (std::isfinite(u.exterior_gap)) {
            auto outside = u.field;
            outside.fn = [f = u.field.fn](const Vec<1>& y) { return one_minus_sq<1>(y) < 0.0 ? f(y) : 0.0; };
            rebuilt = rebuilt + extend_exterior<1>(order, outside, u.exterior_gap, cfg);
        }
        for (int k = 0; k < probes; ++k) rep.x.push_back(-0.8 + 1.6 * k / (probes - 1));
        rep.u = parallel_map<double>(rep.x.size(), [&](std::size_t k) { return u(Vec<1>{rep.x[k]}); });
        rep.reconstructed = parallel_map<double>(rep.x.size(), [&](std::size_t k) { return rebuilt(Vec<1>{rep.x[k]}); });
        for (std::size_t k = 0; k < rep.x.size(); ++k)
            rep.sup_discrepancy = std::max(rep.sup_discrepancy, std::abs(rep.u[k] - rep.reconstructed[k]));
        return rep;
    }
}

/// Green function of d^4/dx^4 on (-1,1) with u = u' = 0 at both ends (clamped beam).
inline double beam_green(double x, double y) {
    if (!(std::abs(x) <= 1.0 && std::abs(y) < 1.0)) throw DomainError("beam_green: need x, y in [-1,1]");
    // u = a (x+1)^2 + b (x+1)^3 + (x-y)_+^3 / 6; the clamped conditions at x = 1 fix a, b
    const double q = 1.0 - y;
    const double b = (q * q * q / 6.0 - q * q / 2.0) / 4.0;
    const double a = (-q * q * q / 6.0 - 8.0 * b) / 4.0;
    const double p = x + 1.0, e = std::max(x - y, 0.0);
    return a * p * p + b * p * p * p + e * e * e / 6.0;
}

enum class LimitPath { to_two, to_one };
enum class LimitFamily { green, harmonic_sum, gamma_extension };

struct LimitRow {
    double s = 0.0;
    double value = 0.0;
    double reference = 0.0;
    double gap = 0.0; // |value - reference|
};

struct LimitTable {
    LimitPath path;
    LimitFamily family;
    std::vector<LimitRow> rows;
    /// gap strictly decreasing along the grid (green, gamma_extension) or value strictly
    /// increasing toward the reference (harmonic_sum on the path to one)
    bool monotone = true;
};

struct LimitFamilySpec {
    LimitFamily family = LimitFamily::green;
    double x = 0.0, y = 0.5;                                // green
    double at = 0.9;                                        // harmonic_sum
    std::optional<ScalarField<1>> psi;                      // gamma_extension (defaults to chi_(2,3))
    double r = 2.0;
    int grid = 21;
};

/// Tabulate a family over an s-grid on the way to s = 2 or s = 1.
inline LimitTable limit_study(LimitPath path, const LimitFamilySpec& fam, const std::vector<double>& s_grid,
                              const QuadratureConfig& cfg = {}) {
    LimitTable T{path, fam.family, {}, true};
    for (double s : s_grid) {
        const FracOrder o(s);
        LimitRow row;
        row.s = s;
        switch (fam.family) {
        case LimitFamily::green:
            row.value = green_G<1>(o, Vec<1>{fam.x}, Vec<1>{fam.y}).value;
            row.reference = path == LimitPath::to_two ? beam_green(fam.x, fam.y)
                                                      : green_G<1>(FracOrder(1.0), Vec<1>{fam.x}, Vec<1>{fam.y}).value;
            break;
        case LimitFamily::harmonic_sum:
            row.value = harmonic_sum_1d(o, fam.at);
            row.reference = path == LimitPath::to_two ? 1.0 : 1.0 / (1.0 - fam.at * fam.at);
            break;
        case LimitFamily::gamma_extension: {
            const auto psi = fam.psi ? *fam.psi : field::indicator<1>(2.0, 3.0);
            const auto u = extend_exterior<1>(o, psi, fam.r, cfg);
            double sup = 0.0;
            for (int k = 0; k < fam.grid; ++k) {
                const double x = -1.0 + 2.0 * (k + 0.5) / fam.grid;
                sup = std::max(sup, std::abs(u(Vec<1>{x})));
            }
            row.value = sup;
            row.reference = 0.0;
            break;
        }
        }
        row.gap = std::abs(row.value - row.reference);
        if (!T.rows.empty()) {
            const auto& prev = T.rows.back();
            if (fam.family == LimitFamily::harmonic_sum && path == LimitPath::to_one)
                T.monotone = T.monotone && row.value > prev.value;
            else
                T.monotone = T.monotone && row.gap < prev.gap;
        }
        T.rows.push_back(row);
    }
    return T;
}

} // namespace fraclap
