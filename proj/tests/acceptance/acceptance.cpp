// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "fraclap/fraclap.hpp"

using namespace fraclap;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

int threads() {
    const int env = default_threads();
    if (env > 1) return env;
    return static_cast<int>(std::clamp(std::thread::hardware_concurrency(), 1u, 8u));
}

Outcome dyda() {
    const auto w = field::delta_power<1>(0.5);
    const auto xw = field::delta_power<1>(0.5, 1.0, {0.0, 1.0});
    double worst = 0.0;
    for (int k = 0; k < 9; ++k) {
        const double x = -0.9 + 0.225 * k;
        worst = std::max(worst, rel(frac_lap_2nd<1>(0.5, w, Vec<1>{x}), 1.0));
        if (x != 0.0) worst = std::max(worst, rel(frac_lap_2nd<1>(0.5, xw, Vec<1>{x}), 2.0 * x));
        else worst = std::max(worst, std::abs(frac_lap_2nd<1>(0.5, xw, Vec<1>{x})));
    }
    return {worst <= 1e-4, fmt("max relative error %.2e", worst)};
}

Outcome torsion() {
    const auto u = solve_green<1>(FracOrder(1.5), field::constant<1>(1.0));
    double worst = 0.0;
    int used = 0;
    for (int i = 0; i <= 100; ++i) {
        const double x = -1.0 + 0.02 * i;
        const double d = (1 - x) * (1 + x);
        if (d < 0.05) continue;
        ++used;
        worst = std::max(worst, rel(u(Vec<1>{x}), std::pow(d, 1.5) / 6.0));
    }
    return {worst <= 1e-5, fmt("max relative error %.2e over %d points", worst, used)};
}

Outcome harmonic_sum() {
    double worst = 0.0;
    for (double s : {1.1, 1.5, 1.9})
        for (int k = 0; k <= 20; ++k) {
            const double x = -0.95 + 0.095 * k;
            worst = std::max(worst, rel(harmonic_sum_1d(FracOrder(s), x), std::pow(1.0 - x * x, s - 2.0)));
        }
    return {worst <= 1e-10, fmt("max relative error %.2e", worst)};
}

Outcome equivalence() {
    double worst_def = 0.0, worst_fourier = 0.0;
    const double xs[] = {-0.7, -0.2, 0.0, 0.35, 0.8};
    for (double s : {1.25, 1.5, 1.75}) {
        const FracOrder o(s);
        const auto g = field::gaussian<1>(Vec<1>{0.1}, 0.6, 1.3);
        const auto b = field::smooth_bump<1>(Vec<1>{-0.1}, 1.2);
        for (double x0 : xs) {
            const Vec<1> x{x0};
            for (const auto* u : {&g, &b}) {
                const double v4 = frac_lap_4th<1>(o, *u, x);
                worst_def = std::max(worst_def, std::abs(v4 - frac_lap_composed<1>(o, *u, x)) / (1.0 + std::abs(v4)));
            }
            worst_fourier = std::max(worst_fourier, rel(frac_lap_4th<1>(o, g, x), fourier_reference<1>(o, g, x)));
        }
    }
    return {worst_def <= 1e-3 && worst_fourier <= 1e-4,
            fmt("4th vs composed %.2e (scaled), 4th vs Fourier %.2e (relative)", worst_def, worst_fourier)};
}

Outcome green_identity() {
    const FracOrder s(1.5);
    const BallKernels<1> K(s);
    double worst = 0.0;
    for (double x : {0.0, 0.4}) {
        const auto G = field::from_function<1>(
            [&](const Vec<1>& y) { return std::abs(y[0] - x) < kDiagonalGuard ? 0.0 : K.green(Vec<1>{x}, y).value; },
            {{-1.0, s.s()}, {1.0, s.s()}, {x, 2.0 * s.s() - 1.0}}, 1.0, Decay::compact(), "G(x,.)");
        for (double y : {1.3, 2.0})
            worst = std::max(worst, rel(frac_lap_4th<1>(s, G, Vec<1>{y}), -K.gamma(Vec<1>{x}, Vec<1>{y})));
    }
    return {worst <= 1e-2, fmt("max relative error %.2e", worst)};
}

Outcome poisson_mass() {
    double worst = 0.0;
    for (double sg : {0.25, 0.5, 0.75})
        for (double x : {-0.9, -0.5, 0.0, 0.3, 0.8})
            worst = std::max(worst, std::abs(nonlocal_poisson_mass<1>(FracOrder(sg), Vec<1>{x}).value - 1.0));
    return {worst <= 1e-6, fmt("max |mass - 1| %.2e", worst)};
}

Outcome max_principle() {
    bool ok = true;
    std::string detail;
    for (double s : {1.5, 0.5}) {
        const auto rep = max_principle_experiment(FracOrder(s), mp_default_domain(), mp_default_bump(), 1.0 / 64, {},
                                                  threads());
        const auto& left = rep.intervals.front();
        const double change = std::abs(left.min - left.min_refined);
        const bool sign_ok = s > 1.0 ? left.min < 0.0 : left.min > 0.0;
        ok = ok && sign_ok && std::abs(left.min) >= 10.0 * change;
        detail += fmt("s=%.1f: min %.3e, change %.1e; ", s, left.min, change);
    }
    return {ok, detail};
}

Outcome theorem_exterior() {
    const FracOrder o(1.5);
    const auto u = extend_exterior_general<1>(o, field::indicator<1>(1.0, 2.0), 1.5, true);
    double residual = 0.0;
    for (int k = 0; k <= 8; ++k) {
        const double x = -0.89 + 0.2225 * k; // delta >= 0.2
        residual = std::max(residual, std::abs(frac_lap_4th_estimate<1>(o, u.field, Vec<1>{x}).value));
    }
    bool traces_ok = true;
    double worst_ratio = 0.0;
    for (double z : {-1.0, 1.0}) {
        const auto t = extract_traces<1>(u, Vec<1>{z}, o);
        traces_ok = traces_ok && std::abs(t.d_sm2) <= 10.0 * t.extrapolation_error &&
                    std::abs(t.d_sm1) <= 10.0 * t.extrapolation_error;
        worst_ratio = std::max({worst_ratio, std::abs(t.d_sm2) / t.extrapolation_error,
                                std::abs(t.d_sm1) / t.extrapolation_error});
    }
    const auto psi = field::indicator<1>(2.0, 3.0);
    const auto a = extend_exterior<1>(o, psi, 2.0);
    const auto b = extend_exterior_general<1>(o, psi, 1.5, true);
    double agree = 0.0;
    for (double x : {-0.9, -0.4, 0.0, 0.7}) agree = std::max(agree, std::abs(a(Vec<1>{x}) - b(Vec<1>{x})));
    return {residual <= 1e-3 && traces_ok && agree <= 1e-8,
            fmt("residual %.2e, trace/extrapolation ratio %.2f, general vs plain %.1e", residual, worst_ratio, agree)};
}

Outcome appendix_suite() {
    const auto r = appendix::compare_uvw({}, appendix::default_probes(), threads());
    double dev = 0.0;
    for (const auto* item : {&r.item1, &r.item2})
        for (const auto& row : *item) dev = std::max(dev, std::abs(row.value.value - 1.0));
    int separated = 0;
    for (const auto& row : r.item3) separated += std::abs(row.value.value - 1.0) > 10.0 * row.value.error;
    const auto z = appendix::zeta_derivative_check({}, threads());
    const bool zeta_ok = z.derivative_nonzero && z.nonconstant;
    return {dev <= 1e-3 && separated >= 3 && zeta_ok,
            fmt("(i),(ii) max |value-1| %.2e; (iii) separated at %d/5; zeta max|dZ| %.2f +- %.2f", dev, separated,
                z.max_dZ, z.max_dZ_error)};
}

Outcome limits() {
    LimitFamilySpec g;
    const auto G = limit_study(LimitPath::to_two, g, {1.9, 1.99, 1.999});
    LimitFamilySpec h;
    h.family = LimitFamily::harmonic_sum;
    h.at = 0.9;
    const auto H = limit_study(LimitPath::to_one, h, {1.1, 1.01});
    const bool toward = H.rows.back().gap < H.rows.front().gap && H.rows.back().value < 1.0 / 0.19;
    LimitFamilySpec e;
    e.family = LimitFamily::gamma_extension;
    const auto E = limit_study(LimitPath::to_one, e, {1.5, 1.1, 1.01});
    return {G.monotone && H.monotone && toward && E.monotone,
            fmt("beam gap %.1e -> %.1e; u_s(0.9) %.4f -> %.4f (limit %.4f); extension sup %.2e -> %.2e",
                G.rows.front().gap, G.rows.back().gap, H.rows.front().value, H.rows.back().value, 1.0 / 0.19,
                E.rows.front().value, E.rows.back().value)};
}

Outcome galerkin() {
    const GalerkinBasis B(mp_default_domain(), 1.0 / 64);
    std::mt19937 rng(2024);
    std::uniform_int_distribution<std::size_t> pick(0, B.size() - 1);
    const FracOrder o(1.5);
    double worst = 0.0;
    for (int n = 0; n < 10;) {
        const std::size_t i = pick(rng), j = pick(rng);
        if (!B[i].cardinal || !B[j].cardinal) continue;
        ++n;
        worst = std::max(worst, rel(form_entry_fourier(o, i, j, B), form_entry_fd(o, i, j, B)));
    }
    const IntervalUnionDomain ball({{-1.0, 1.0}});
    std::vector<double> errs;
    for (double hh : {1.0 / 32, 1.0 / 64, 1.0 / 128})
        errs.push_back(std::abs(solve_weak(o, ball, field::constant<1>(1.0), hh, {}, threads())(0.0) - 1.0 / 6.0));
    const bool converging = errs[1] < errs[0] && errs[2] < errs[1];
    return {worst <= 1e-6 && converging && errs.back() <= 1e-3,
            fmt("entries max relative %.1e; |u_h(0) - 1/6| = %.1e, %.1e, %.1e at h = 1/32, 1/64, 1/128", worst,
                errs[0], errs[1], errs[2])};
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"half-Laplacian identities", dyda},
        {"torsion closed form", torsion},
        {"boundary-kernel sum", harmonic_sum},
        {"definition equivalence", equivalence},
        {"Green kernel identity", green_identity},
        {"nonlocal Poisson mass", poisson_mass},
        {"maximum-principle dichotomy", max_principle},
        {"exterior data reaching the sphere", theorem_exterior},
        {"appendix suite", appendix_suite},
        {"limits in s", limits},
        {"Galerkin equivalence and convergence", galerkin},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = criteria[k].second();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failed += !out.pass;
        std::printf("%s %2zu %s: %s [%.1fs]\n", out.pass ? "PASS" : "FAIL", k + 1, criteria[k].first,
                    out.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
