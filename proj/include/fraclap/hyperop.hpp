#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "field.hpp"
#include "geometry.hpp"
#include "quadrature.hpp"
#include "specialfn.hpp"

namespace fraclap {

enum class Difference { second, fourth };

namespace detail {

/// M(a) = int_{S^{N-1}} u(x + a theta) d theta. For N = 1 this is u(x+a) + u(x-a).
template <int N>
class SphereMean {
public:
    SphereMean(const ScalarField<N>& u, const Vec<N>& x, const QuadratureConfig& cfg)
        : u_(u), x_(x), rx_(norm<N>(x)), cfg_(cfg) {
        if constexpr (N > 1) {
            if (!u.radial) rule_ = sphere_rule<N>(cfg.sphere_resolution);
            inner_cfg_ = cfg;
            inner_cfg_.rel_tol = std::min(cfg.rel_tol, 1e-12);
            inner_cfg_.abs_tol = 1e-300;
        }
    }

    double operator()(double a) const {
        if constexpr (N == 1) {
            return u_(Vec<1>{x_[0] + a}) + u_(Vec<1>{x_[0] - a});
        } else {
            if (!u_.radial) return rule_.integrate([&](const Vec<N>& th) { return u_(x_ + a * th); });
            const double om = N == 2 ? 2.0 : 2.0 * std::numbers::pi; // omega_{N-1}
            auto g = [&](double rho) { return u_(axis_point<N>(rho)); };
            if (rx_ == 0.0) return omega(N) * g(a);
            // |x + a theta|^2 = |x|^2 + a^2 + 2 a |x| cos(phi)
            auto f = [&](double phi) {
                const double r2 = rx_ * rx_ + a * a + 2.0 * a * rx_ * std::cos(phi);
                const double w = N == 2 ? 1.0 : std::sin(phi);
                return w * g(std::sqrt(std::max(r2, 0.0)));
            };
            std::vector<double> br = {0.0, std::numbers::pi};
            for (const auto& k : u_.kinks) {
                const double c = (k.location * k.location - rx_ * rx_ - a * a) / (2.0 * a * rx_);
                if (c > -1.0 && c < 1.0) br.push_back(std::acos(c));
            }
            std::sort(br.begin(), br.end());
            const auto r = integrate_breaks(f, br, inner_cfg_);
            return om * r.value;
        }
    }

private:
    const ScalarField<N>& u_;
    Vec<N> x_;
    double rx_;
    QuadratureConfig cfg_;
    QuadratureConfig inner_cfg_;
    SphereRule<N> rule_;
};

/// int_0^eps r^{-1-2t} D(r) dr for D even and analytic with D = sum_{k >= k0} a_k r^{2k}.
/// Four samples give a four-term fit; the three-term fit supplies the error estimate.
template <class F>
Estimate taylor_zone(F&& D, double eps, double t, int k0) {
    constexpr int K = 4;
    const std::array<double, K> xs = {1.0, 5.0 / 6.0, 2.0 / 3.0, 0.5};
    std::array<double, K> b{};
    for (int j = 0; j < K; ++j) b[j] = D(eps * xs[j]);
    auto fit = [&](int n) {
        Eigen::MatrixXd A(n, n);
        Eigen::VectorXd rhs(n);
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) A(j, k) = std::pow(xs[j], 2 * (k0 + k));
            rhs(j) = b[j];
        }
        const Eigen::VectorXd c = A.fullPivLu().solve(rhs);
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += c(k) / (2.0 * (k0 + k) - 2.0 * t);
        return s * std::pow(eps, -2.0 * t);
    };
    const double i4 = fit(K), i3 = fit(K - 1);
    return {i4, std::abs(i4 - i3)};
}

struct Breakpoint {
    double r;
    double exponent; // NaN for a plain split
};

/// int_0^inf r^{-1-2t} D(r) dr with D(r) the sphere-integrated second or fourth difference.
template <int N>
Estimate hypersingular_radial(const ScalarField<N>& u, const Vec<N>& x, double t, Difference kind,
                              const QuadratureConfig& cfg, std::optional<double> eps_override = {}) {
    cfg.validate();
    const double kd = u.kink_distance(x);
    if (!(kd > 0.0)) {
        std::ostringstream os;
        os << "hypersingular evaluation at a point where the field is not smooth (distance to kink " << kd << ")";
        throw DomainError(os.str());
    }
    if (u.boundary_singular && one_minus_sq<N>(x) < 0.1)
        throw CapabilityError("field blows up at the unit sphere; evaluation requires delta(x) >= 0.1");

    const bool fourth = kind == Difference::fourth;
    const double om = omega(N);
    const double ux = u(x);
    const double rx = norm<N>(x);
    const bool compact = u.decay.kind == Decay::Kind::compact && std::isfinite(u.support_radius);
    const double Rc = compact ? rx + u.support_radius : kInf;
    const double c0 = (fourth ? 6.0 : 2.0) * om * ux;

    SphereMean<N> M(u, x, cfg);
    auto D = [&](double r) {
        if (fourth) return 2.0 * M(2.0 * r) - 8.0 * M(r) + c0;
        return c0 - 2.0 * M(r);
    };

    const double d_eff = fourth ? 0.5 * kd : kd;
    double eps = eps_override ? *eps_override
                              : cfg.inner_cut * std::min({d_eff, u.scale_at(x), 1.0, compact ? 0.5 * Rc : kInf});
    if (compact && Rc > 0.0) eps = std::min(eps, 0.5 * Rc);
    Estimate total = taylor_zone(D, eps, t, fourth ? 2 : 1);

    std::vector<Breakpoint> br;
    auto add = [&](double r, double beta) {
        if (r > eps) br.push_back({r, beta});
        if (fourth && 0.5 * r > eps) br.push_back({0.5 * r, beta});
    };
    double kmax = 0.0;
    for (const auto& k : u.kinks) {
        kmax = std::max(kmax, std::abs(k.location));
        if constexpr (N == 1) {
            add(std::abs(k.location - x[0]), k.exponent);
        } else {
            const double be = rx == 0.0 ? k.exponent : k.exponent + 0.5 * (N - 1);
            add(std::abs(k.location - rx), be);
            if (rx > 0.0) add(k.location + rx, be);
        }
    }
    const double R = compact ? Rc : std::max({cfg.outer_cut, 2.0 * (rx + kmax), 4.0 * eps});
    if (compact) add(Rc, std::numeric_limits<double>::quiet_NaN());
    br.push_back({R, std::numeric_limits<double>::quiet_NaN()});
    br.push_back({eps, std::numeric_limits<double>::quiet_NaN()});
    std::sort(br.begin(), br.end(), [](const Breakpoint& a, const Breakpoint& b) { return a.r < b.r; });
    // coincident breakpoints keep the roughest exponent
    std::vector<Breakpoint> merged;
    for (const auto& b : br) {
        if (!merged.empty() && b.r == merged.back().r) {
            auto& m = merged.back();
            if (std::isnan(m.exponent) || (!std::isnan(b.exponent) && b.exponent < m.exponent)) m.exponent = b.exponent;
        } else {
            merged.push_back(b);
        }
    }
    br.swap(merged);

    std::vector<Piece> pieces;
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
        const double a = br[i].r, b = br[i + 1].r;
        if (!(b > a) || b > R || a < eps) continue;
        Piece p{a, b};
        if (!std::isnan(br[i].exponent)) p.grade_left = grade_for_exponent(br[i].exponent);
        if (!std::isnan(br[i + 1].exponent)) p.grade_right = grade_for_exponent(br[i + 1].exponent);
        pieces.push_back(p);
    }
    auto integrand = [&](double r) { return std::pow(r, -1.0 - 2.0 * t) * D(r); };
    // Noise floor: D is a cancelling combination of O(U) samples, amplified by eps^{-2t};
    // near a blow-up kink of exponent beta the sample point itself carries rounding that
    // limits any quadrature to about macheps^{1+beta} relative accuracy.
    constexpr double meps = std::numeric_limits<double>::epsilon();
    const double U = std::abs(c0) + 8.0 * std::abs(M(eps)) + 2.0 * std::abs(M(2.0 * eps));
    double floor = 64.0 * meps * U * std::pow(eps, -2.0 * t) / (2.0 * t);
    // Mass lost where a blow-up kink sits within rounding distance of the sample point:
    // about A (meps |loc|)^{1+beta} / (1+beta) per kink, A the local amplitude, weighted
    // by the difference coefficient and r^{-1-2t} at the tangent radius.
    double kink_floor = 0.0;
    for (const auto& k : u.kinks) {
        if (!(k.exponent < 0.0)) continue;
        const double d = N == 1 ? std::abs(k.location - x[0]) : std::abs(k.location - rx);
        if (!(d > 0.0)) continue;
        const double h0 = 1e-3 * d;
        const double amp = std::max(std::abs(u(axis_point<N>(k.location - h0))),
                                    std::abs(u(axis_point<N>(k.location + h0)))) *
                           std::pow(h0, -k.exponent);
        const double w = fourth ? 8.0 * std::pow(d, -1.0 - 2.0 * t) + std::pow(0.5 * d, -1.0 - 2.0 * t)
                                : 2.0 * std::pow(d, -1.0 - 2.0 * t);
        const double z = meps * std::max(1.0, std::abs(k.location));
        kink_floor += 2.0 * amp * std::pow(z, 1.0 + k.exponent) / (1.0 + k.exponent) * w;
    }
    QuadratureConfig mid_cfg = cfg;
    mid_cfg.abs_tol = std::max({cfg.abs_tol, floor, kink_floor});
    auto mid = integrate_pieces(integrand, pieces, mid_cfg);
    if (!mid.converged && mid.error <= kink_floor) mid.converged = true;
    mid.error = std::max(mid.error, kink_floor);
    require_converged(mid, "hypersingular integral (middle zone)");
    total += mid.estimate();

    // Beyond R only u(x) survives in the compact case; otherwise the remainder decays with u.
    total.value += c0 * std::pow(R, -2.0 * t) / (2.0 * t);
    if (!compact) {
        const double p = std::min(u.decay.p, 4.0);
        auto rem = [&](double r) { return std::pow(r, -1.0 - 2.0 * t) * (D(r) - c0); };
        QuadratureConfig tail_cfg = cfg;
        tail_cfg.abs_tol = std::max(cfg.abs_tol, floor);
        const auto tail = integrate_tail(rem, R, 1.0 + 2.0 * t + p, tail_cfg);
        require_converged(tail, "hypersingular integral (tail)");
        total += tail.estimate();
    }
    return total;
}

} // namespace detail

/// (-Delta)^sigma u(x) for sigma in (0,1) by the second-difference hypersingular integral.
template <int N>
Estimate frac_lap_2nd_estimate(double sigma, const ScalarField<N>& u, const Vec<N>& x,
                               const QuadratureConfig& cfg = {}, std::optional<double> eps_override = {}) {
    if (!(sigma > 0.0 && sigma < 1.0)) {
        std::ostringstream os;
        os << "frac_lap_2nd: sigma = " << sigma << " must lie in (0,1)";
        throw DomainError(os.str());
    }
    if (!u.in_L1(sigma)) {
        std::ostringstream os;
        os << "frac_lap_2nd: field '" << u.name << "' is not declared in L1_" << sigma;
        throw IntegrabilityError(os.str());
    }
    const double e = constants(FracOrder(sigma + 1.0), N).e_Ns;
    return (0.5 * e) * detail::hypersingular_radial<N>(u, x, sigma, Difference::second, cfg, eps_override);
}

template <int N>
double frac_lap_2nd(double sigma, const ScalarField<N>& u, const Vec<N>& x, const QuadratureConfig& cfg = {}) {
    return frac_lap_2nd_estimate<N>(sigma, u, x, cfg).value;
}

/// (-Delta)^s u(x) for s in (1,2) by the fourth-difference hypersingular integral.
template <int N>
Estimate frac_lap_4th_estimate(const FracOrder& order, const ScalarField<N>& u, const Vec<N>& x,
                               const QuadratureConfig& cfg = {}) {
    if (!order.is_higher_order()) {
        std::ostringstream os;
        os << "frac_lap_4th: s = " << order.s() << " must lie in (1,2)";
        throw DomainError(os.str());
    }
    if (!u.in_L1(order.s())) {
        std::ostringstream os;
        os << "frac_lap_4th: field '" << u.name << "' is not declared in L1_" << order.s();
        throw IntegrabilityError(os.str());
    }
    const double c = constants(order, N).c_Ns;
    return (0.5 * c) * detail::hypersingular_radial<N>(u, x, order.s(), Difference::fourth, cfg);
}

template <int N>
double frac_lap_4th(const FracOrder& order, const ScalarField<N>& u, const Vec<N>& x,
                    const QuadratureConfig& cfg = {}) {
    return frac_lap_4th_estimate<N>(order, u, x, cfg).value;
}

/// (-Delta)^s u = (-Delta) (-Delta)^{s-1} u: centred second differences of the lower-order
/// operator, Richardson-extrapolated over cfg.extrap_depth halvings of the step.
template <int N>
Estimate frac_lap_composed_estimate(const FracOrder& order, const ScalarField<N>& u, const Vec<N>& x,
                                    const QuadratureConfig& cfg = {}) {
    if (!order.is_higher_order()) {
        std::ostringstream os;
        os << "frac_lap_composed: s = " << order.s() << " must lie in (1,2)";
        throw DomainError(os.str());
    }
    const double sigma = order.s() - 1.0;
    if (!u.in_L1(sigma)) {
        std::ostringstream os;
        os << "frac_lap_composed: field '" << u.name << "' is not declared in L1_" << sigma;
        throw IntegrabilityError(os.str());
    }
    const double kd = u.kink_distance(x);
    if (!(kd > 0.0)) throw DomainError("frac_lap_composed: point lies on a kink of the field");
    const double ls = u.scale_at(x);
    const double h0 = std::min({kd / 8.0, ls / 8.0, 1e-2});
    // one inner cut for every stencil point keeps the lower-order values a smooth function of x
    const double eps = cfg.inner_cut * std::min({kd - h0, ls - h0, 1.0});
    auto inner = cfg;
    inner.rel_tol = std::min(cfg.rel_tol, 1e-12);
    auto F = [&](const Vec<N>& p) { return frac_lap_2nd_estimate<N>(sigma, u, p, inner, eps).value; };
    const double fx = F(x);
    auto lap = [&](double h) {
        double s = 0.0;
        for (int i = 0; i < N; ++i) {
            Vec<N> e{};
            e[i] = h;
            s += F(x + e) - 2.0 * fx + F(x - e);
        }
        return -s / (h * h);
    };
    const int levels = std::max(cfg.extrap_depth, 1) + 1;
    std::vector<std::vector<double>> T(levels);
    for (int j = 0; j < levels; ++j) {
        T[j].push_back(lap(h0 / std::pow(2.0, j)));
        for (int k = 1; k <= j; ++k) {
            const double f = std::pow(4.0, k);
            T[j].push_back(T[j][k - 1] + (T[j][k - 1] - T[j - 1][k - 1]) / (f - 1.0));
        }
    }
    const double best = T[levels - 1][levels - 1];
    const double prev = T[levels - 2][levels - 2];
    return {best, std::abs(best - prev)};
}

template <int N>
double frac_lap_composed(const FracOrder& order, const ScalarField<N>& u, const Vec<N>& x,
                         const QuadratureConfig& cfg = {}) {
    return frac_lap_composed_estimate<N>(order, u, x, cfg).value;
}

/// (2 pi)^{-N/2} int |xi|^{2s} u^(xi) e^{i x.xi} d xi from the field's closed-form transform.
template <int N>
Estimate fourier_reference_estimate(const FracOrder& order, const ScalarField<N>& u, const Vec<N>& x,
                                    const QuadratureConfig& cfg = {}) {
    if (!u.transform) throw CapabilityError("fourier_reference: field '" + u.name + "' has no closed-form transform");
    const auto& tr = *u.transform;
    const double s = order.s();
    if (!std::isfinite(tr.cutoff) && !std::isfinite(tr.decay))
        throw DivergenceError("fourier_reference: transform declares neither a cutoff nor a decay rate");
    const double r = distance<N>(x, tr.center);
    auto radial = [&](double rho) {
        double k = 0.0;
        if constexpr (N == 1) k = 2.0 * std::cos(rho * r) / std::sqrt(2.0 * std::numbers::pi);
        else if constexpr (N == 2) k = rho * std::cyl_bessel_j(0.0, rho * r);
        else {
            const double z = rho * r;
            const double sinc = z < 1e-8 ? 1.0 - z * z / 6.0 : std::sin(z) / z;
            k = 4.0 * std::numbers::pi * rho * rho * sinc / std::pow(2.0 * std::numbers::pi, 1.5);
        }
        return std::pow(rho, 2.0 * s) * tr.profile(rho) * k;
    };
    const double top = std::isfinite(tr.cutoff) ? tr.cutoff : 1.0;
    // split so that each piece spans at most a few oscillations
    const int n = std::max(1, static_cast<int>(std::ceil(top * r / (2.0 * std::numbers::pi))) + 1);
    std::vector<double> br;
    for (int i = 0; i <= 4 * n; ++i) br.push_back(top * i / (4.0 * n));
    auto res = integrate_breaks(radial, br, cfg);
    require_converged(res, "fourier_reference");
    Estimate out = res.estimate();
    if (std::isfinite(tr.decay)) {
        const double q = tr.decay - 2.0 * s - (N - 1);
        if (!(q > 1.0)) {
            std::ostringstream os;
            os << "fourier_reference: declared decay " << tr.decay << " is too slow for |xi|^{2s}, s = " << s;
            throw DivergenceError(os.str());
        }
        auto tail = integrate_tail(radial, top, q, cfg);
        out += tail.estimate();
    }
    return out;
}

template <int N>
double fourier_reference(const FracOrder& order, const ScalarField<N>& u, const Vec<N>& x,
                         const QuadratureConfig& cfg = {}) {
    return fourier_reference_estimate<N>(order, u, x, cfg).value;
}

} // namespace fraclap
