#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "fraclap/variational.hpp"

using namespace fraclap;
using Catch::Approx;

namespace {

IntervalUnionDomain unit() { return IntervalUnionDomain({{-1.0, 1.0}}); }

} // namespace

TEST_CASE("interval unions are validated", "[variational]") {
    CHECK_THROWS_AS(IntervalUnionDomain({}), DomainError);
    CHECK_THROWS_AS(IntervalUnionDomain({{0.0, 1.0}, {0.5, 2.0}}), DomainError);
    CHECK_THROWS_AS(IntervalUnionDomain({{0.0, 1.0}, {1.0, 2.0}}), DomainError);
    CHECK_THROWS_AS(IntervalUnionDomain({{1.0, 0.0}}), DomainError);
    const IntervalUnionDomain d({{2.0, 4.0}, {-1.0, 1.0}});
    CHECK(d.intervals().front().a == -1.0);
    CHECK(d.locate(3.0) == 1);
    CHECK(d.locate(1.5) == -1);
    CHECK(d.locate(1.0) == -1);
}

TEST_CASE("basis functions vanish outside the domain and are C2 inside", "[variational]") {
    const GalerkinBasis B(mp_default_domain(), 1.0 / 16);
    CHECK(B.size() == 2 * (32 - 3 + 2));
    CHECK_THROWS_AS(GalerkinBasis(unit(), 0.75), DomainError);
    for (std::size_t i = 0; i < B.size(); ++i) {
        const auto& kn = B.knots(i);
        const auto iv = B.domain().intervals()[B[i].interval];
        CHECK(kn.front() >= iv.a - 1e-14);
        CHECK(kn.back() <= iv.b + 1e-14);
        CHECK(B(i, kn.front() - 1e-3) == 0.0);
        CHECK(B(i, kn.back() + 1e-3) == 0.0);
        // value and slope vanish at both ends of the support
        const double e = 1e-6;
        CHECK(std::abs(B(i, kn.front() + e)) < 1e-9);
        CHECK(std::abs(B(i, kn.back() - e)) < 1e-9);
    }
    // cardinal splines: continuous second difference quotient across an interior knot
    const std::size_t c = 5;
    REQUIRE(B[c].cardinal);
    const double k = B.knots(c)[2], d = 1e-4;
    auto second = [&](double x) { return (B(c, x + d) - 2 * B(c, x) + B(c, x - d)) / (d * d); };
    CHECK(second(k - 3 * d) == Approx(second(k + 3 * d)).margin(1e-2 * 16 * 16));
    // boundary splines leave the endpoint with zero value and slope but nonzero curvature
    REQUIRE_FALSE(B[0].cardinal);
    const double a = B.knots(0)[0];
    CHECK(B(0, a + 1e-4) / (1e-4 * 1e-4) > 1.0);
}

TEST_CASE("Fourier stiffness entries", "[variational]") {
    const GalerkinBasis B(mp_default_domain(), 1.0 / 32);
    const FracOrder o(1.5);
    for (std::size_t i = 1; i + 1 < B.size(); i += 17)
        if (B[i].cardinal) CHECK(form_entry_fourier(o, i, i, B) > 0.0);
    // translation invariance within one interval
    CHECK(form_entry_fourier(o, 3, 5, B) == Approx(form_entry_fourier(o, 20, 22, B)).epsilon(1e-13));
    CHECK(form_entry_fourier(o, 5, 3, B) == form_entry_fourier(o, 3, 5, B));
    // boundary splines are outside the sinc-power class
    CHECK_THROWS_AS(form_entry_fourier(o, 0, 3, B), CapabilityError);
}

TEST_CASE("Fourier and finite-difference forms agree", "[variational]") {
    const GalerkinBasis B(mp_default_domain(), 1.0 / 64);
    std::mt19937 rng(7);
    std::uniform_int_distribution<std::size_t> pick(0, B.size() - 1);
    for (double s : {0.5, 1.25, 1.5, 1.9}) {
        const FracOrder o(s);
        int n = 0;
        while (n < 10) {
            const std::size_t i = pick(rng), j = pick(rng);
            if (!B[i].cardinal || !B[j].cardinal) continue;
            ++n;
            const double f = form_entry_fourier(o, i, j, B);
            const double g = form_entry_fd(o, i, j, B);
            CHECK(std::abs(f - g) <= 1e-9 * std::abs(g));
        }
        // near offsets, diagonal included
        for (std::size_t j = 10; j < 15; ++j)
            CHECK(form_entry_fourier(o, 10, j, B) == Approx(form_entry_fd(o, 10, j, B)).epsilon(1e-9));
    }
}

TEST_CASE("far-separated splines still interact", "[variational]") {
    const GalerkinBasis B(mp_default_domain(), 1.0 / 32);
    const std::size_t i = 10, j = B.size() - 10;
    REQUIRE(B[i].interval != B[j].interval);
    // for s in (1,2) the off-support operator is positive, for s in (0,1) negative, local orders decouple
    const double hi = form_entry_fd(FracOrder(1.5), i, j, B);
    const double lo = form_entry_fd(FracOrder(0.5), i, j, B);
    CHECK(hi > 0.0);
    CHECK(lo < 0.0);
    CHECK(hi == Approx(form_entry_fourier(FracOrder(1.5), i, j, B)).epsilon(1e-9));
    CHECK(form_entry_fourier(FracOrder(1.0), i, j, B) == 0.0);
    CHECK(std::abs(form_entry_fd(FracOrder(1.0), i, j, B)) < 1e-12 * form_entry_fd(FracOrder(1.0), i, i, B));
}

TEST_CASE("the form is continuous in s across 1", "[variational]") {
    const GalerkinBasis B(unit(), 1.0 / 16);
    std::vector<double> vals;
    for (double s : {0.98, 0.99, 0.999, 1.0, 1.001, 1.01, 1.02}) vals.push_back(form_entry_fd(FracOrder(s), 6, 6, B));
    for (std::size_t k = 1; k < vals.size(); ++k) CHECK(vals[k] > vals[k - 1]);
    CHECK(vals[3] == Approx(16.0 * 2.0 / 3.0).epsilon(1e-10)); // int (b')^2 at s = 1
    CHECK(std::abs(vals[4] - vals[2]) < 0.05 * vals[3]);
    // boundary splines at s = 1 against the direct H^1 integral
    const double direct = integrate_breaks(
                              [&](double x) {
                                  const double d = 1e-6;
                                  const double g = (B(0, x + d) - B(0, x - d)) / (2 * d);
                                  return g * g;
                              },
                              std::vector<double>{-1.0, -1.0 + 1.0 / 16, -1.0 + 2.0 / 16, -1.0 + 3.0 / 16}, {})
                              .value;
    CHECK(form_entry_fd(FracOrder(1.0), 0, 0, B) == Approx(direct).epsilon(1e-6));
    // s = 2 is the bilaplacian
    CHECK(form_entry_fd(FracOrder(2.0), 6, 7, B) == Approx(form_entry_fourier(FracOrder(2.0), 6, 7, B)).epsilon(1e-10));
    CHECK(form_entry_fd(FracOrder(1.999), 0, 1, B) == Approx(form_entry_fd(FracOrder(2.0), 0, 1, B)).epsilon(1e-2));
}

TEST_CASE("stiffness is symmetric positive definite", "[variational]") {
    const GalerkinBasis B(mp_default_domain(), 1.0 / 16);
    for (double s : {0.5, 1.0, 1.5, 1.9, 2.0}) {
        const auto K = assemble_stiffness(FracOrder(s), B);
        CHECK((K - K.transpose()).norm() == 0.0);
        CHECK(min_eigenvalue(K) > 0.0);
    }
}

TEST_CASE("weak solutions", "[variational]") {
    SECTION("zero load gives zero") {
        const auto u = solve_weak(FracOrder(1.5), unit(), field::constant<1>(0.0), 1.0 / 16);
        CHECK(u.system.coefficients.norm() == 0.0);
        CHECK(u(0.3) == 0.0);
    }
    SECTION("torsion converges to delta^{3/2}/6") {
        double prev_err = 1.0, prev_energy = 0.0;
        for (double h : {1.0 / 32, 1.0 / 64, 1.0 / 128}) {
            const auto u = solve_weak(FracOrder(1.5), unit(), field::constant<1>(1.0), h);
            const double err = std::abs(u(0.0) - 1.0 / 6.0);
            CHECK(err < prev_err);
            CHECK(u.energy > prev_energy);
            CHECK(u.residual < 1e-10);
            prev_err = err;
            prev_energy = u.energy;
        }
        CHECK(prev_err < 1e-3);
        // energy of the exact solution: int delta^{3/2}/6 = pi/16
        CHECK(prev_energy < std::numbers::pi / 16.0);
        CHECK(prev_energy > 0.99 * std::numbers::pi / 16.0);
    }
    SECTION("s = 1 is the classical torsion problem") {
        const auto a = solve_weak(FracOrder(1.0), unit(), field::constant<1>(1.0), 1.0 / 32);
        const auto b = solve_weak(FracOrder(1.0), unit(), field::constant<1>(1.0), 1.0 / 64);
        CHECK(std::abs(b(0.0) - 0.5) < std::abs(a(0.0) - 0.5));
        CHECK(b(0.0) == Approx(0.5).margin(5e-3));
        CHECK(b(0.5) == Approx(0.375).margin(5e-3));
    }
    SECTION("solution field") {
        const auto u = solve_weak(FracOrder(1.5), unit(), field::constant<1>(1.0), 1.0 / 32);
        const auto f = u.as_field();
        CHECK(f(Vec<1>{0.2}) == u(0.2));
        CHECK(f(Vec<1>{1.5}) == 0.0);
    }
}

TEST_CASE("maximum principle fails for s in (1,2) only", "[variational][slow]") {
    const auto f = mp_default_bump();
    CHECK(integrate_breaks([&](double x) { return f(Vec<1>{x}); }, std::vector<double>{2.5, 3.0, 3.5}, {}).value ==
          Approx(1.0).epsilon(1e-12));
    const auto hi = max_principle_experiment(FracOrder(1.5), mp_default_domain(), f, 1.0 / 32);
    const auto lo = max_principle_experiment(FracOrder(0.5), mp_default_domain(), f, 1.0 / 32);
    CHECK(hi.left_sign == -1);
    CHECK(lo.left_sign == 1);
    CHECK(hi.intervals[0].min < 0.0);
    CHECK(lo.intervals[0].min > 0.0);
    CHECK(hi.intervals[1].min > 0.0);
    CHECK(lo.intervals[1].min > 0.0);
    CHECK(hi.solver_residual < 1e-10);
    CHECK_THROWS_AS(max_principle_experiment(FracOrder(1.5), mp_default_domain(), field::constant<1>(1.0), 1.0 / 32),
                    DomainError);
}

TEST_CASE("integration by parts", "[variational]") {
    const GalerkinBasis B(unit(), 1.0 / 32);
    const auto u = field::power_bump<1>(Vec<1>{0.1}, 0.8, 6);
    for (std::size_t i : {std::size_t(8), std::size_t(30)}) {
        const auto r = ibp_check(FracOrder(1.5), u, i, B);
        CHECK(r.relative < 1e-6);
        CHECK(std::abs(r.energy.value - r.energy_swapped) <= 1e-12 * std::abs(r.energy.value));
    }
    const auto z = ibp_check(FracOrder(1.5), field::constant<1>(0.0), 8, B);
    CHECK(z.energy.value == 0.0);
    CHECK(z.pointwise.value == 0.0);
    CHECK_THROWS_AS(ibp_check(FracOrder(1.5), u, 0, B), CapabilityError);
    CHECK_THROWS_AS(ibp_check(FracOrder(1.5), field::quartic_bump<1>(Vec<1>{0.0}, 0.5), 8, B), CapabilityError);
}

TEST_CASE("power bump transform", "[variational]") {
    const auto u = field::power_bump<1>(Vec<1>{0.0}, 0.7, 4);
    const auto& tr = *u.transform;
    for (double xi : {0.0, 0.5, 2.0, 2.9, 3.0, 12.0}) {
        const double q = integrate_breaks([&](double x) { return u(Vec<1>{x}) * std::cos(xi * x); },
                                          std::vector<double>{-0.7, 0.0, 0.7}, {})
                             .value /
                         std::sqrt(2.0 * std::numbers::pi);
        CHECK(tr.profile(xi) == Approx(q).epsilon(1e-10).margin(1e-14));
    }
}
