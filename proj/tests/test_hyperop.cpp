#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "fraclap/hyperop.hpp"
#include "fraclap/kernels.hpp"

using namespace fraclap;
using Catch::Approx;

namespace {

// (-Delta)^t delta^t = 4^t Gamma(1+t) Gamma(N/2+t) / Gamma(N/2)
double torsion_constant(double t, int N) {
    return std::pow(4.0, t) * std::tgamma(1.0 + t) * std::tgamma(0.5 * N + t) / std::tgamma(0.5 * N);
}

// (2 pi)^{-N/2} omega_N 2^{s+N/2-1} Gamma(s+N/2): the symbol integral of a unit Gaussian at its centre
double gaussian_at_centre(double s, int N) {
    const double om = 2.0 * std::pow(std::numbers::pi, 0.5 * N) / std::tgamma(0.5 * N);
    return std::pow(2.0 * std::numbers::pi, -0.5 * N) * om * std::pow(2.0, s + 0.5 * N - 1.0) *
           std::tgamma(s + 0.5 * N);
}

} // namespace

TEST_CASE("constants are annihilated", "[hyperop]") {
    const auto c1 = field::constant<1>(3.0);
    const auto c2 = field::constant<2>(3.0);
    const auto c3 = field::constant<3>(3.0);
    for (double sig : {0.2, 0.5, 0.8}) {
        CHECK(std::abs(frac_lap_2nd<1>(sig, c1, Vec<1>{0.4})) < 1e-9);
        CHECK(std::abs(frac_lap_2nd<2>(sig, c2, Vec<2>{0.4, 0.1})) < 1e-9);
        CHECK(std::abs(frac_lap_2nd<3>(sig, c3, Vec<3>{0.4, 0.1, 0.0})) < 1e-9);
    }
    CHECK(std::abs(frac_lap_4th<1>(FracOrder(1.5), c1, Vec<1>{-2.0})) < 1e-9);
}

TEST_CASE("affine fields are annihilated by the fourth difference", "[hyperop]") {
    const auto a = field::affine<1>(1.0, Vec<1>{2.0});
    for (double s : {1.2, 1.5, 1.8})
        for (double x : {-3.0, 0.0, 0.3, 5.0}) CHECK(std::abs(frac_lap_4th<1>(FracOrder(s), a, Vec<1>{x})) < 1e-8);
    const auto a2 = field::affine<2>(-1.0, Vec<2>{0.5, 1.5});
    CHECK(std::abs(frac_lap_4th<2>(FracOrder(1.5), a2, Vec<2>{0.3, -0.2})) < 1e-8);
}

TEST_CASE("Dyda identities for the half Laplacian", "[hyperop]") {
    const auto w = field::delta_power<1>(0.5);
    const auto xw = field::delta_power<1>(0.5, 1.0, {0.0, 1.0});
    CHECK(frac_lap_2nd<1>(0.5, w, Vec<1>{0.3}) == Approx(1.0).epsilon(1e-8));
    CHECK(frac_lap_2nd<1>(0.5, xw, Vec<1>{0.2}) == Approx(0.4).epsilon(1e-8));
    for (double x = -0.9; x <= 0.9; x += 0.225) {
        CHECK(frac_lap_2nd<1>(0.5, w, Vec<1>{x}) == Approx(1.0).epsilon(1e-8));
        CHECK(frac_lap_2nd<1>(0.5, xw, Vec<1>{x}) == Approx(2.0 * x).epsilon(1e-8).margin(1e-9));
    }
}

TEST_CASE("torsion identity (-Delta)^t delta^t", "[hyperop]") {
    CHECK(torsion_constant(1.5, 1) == Approx(6.0).epsilon(1e-14));
    for (double s : {1.25, 1.5, 1.75}) {
        const auto u = field::delta_power<1>(s);
        for (double x : {0.0, 0.4, -0.8})
            CHECK(frac_lap_4th<1>(FracOrder(s), u, Vec<1>{x}) == Approx(torsion_constant(s, 1)).epsilon(1e-7));
    }
    for (double sig : {0.3, 0.7}) {
        const auto u = field::delta_power<1>(sig);
        CHECK(frac_lap_2nd<1>(sig, u, Vec<1>{0.5}) == Approx(torsion_constant(sig, 1)).epsilon(1e-7));
    }
    const auto u2 = field::delta_power<2>(1.5);
    CHECK(frac_lap_4th<2>(FracOrder(1.5), u2, Vec<2>{0.3, 0.0}) == Approx(torsion_constant(1.5, 2)).epsilon(1e-6));
    CHECK(frac_lap_4th<2>(FracOrder(1.5), u2, Vec<2>{0.0, 0.0}) == Approx(torsion_constant(1.5, 2)).epsilon(1e-6));
    const auto u3 = field::delta_power<3>(1.3);
    CHECK(frac_lap_4th<3>(FracOrder(1.3), u3, Vec<3>{0.2, 0.3, 0.0}) ==
          Approx(torsion_constant(1.3, 3)).epsilon(1e-6));
    const auto v3 = field::delta_power<3>(0.5);
    CHECK(frac_lap_2nd<3>(0.5, v3, Vec<3>{0.0, -0.5, 0.0}) == Approx(torsion_constant(0.5, 3)).epsilon(1e-6));
}

TEST_CASE("the explicit family (1-x^2)^{s-2} is s-harmonic", "[hyperop]") {
    for (double s : {1.3, 1.5, 1.7}) {
        const auto u = field::delta_power<1>(s - 2.0);
        for (double x : {0.0, 0.5, -0.9}) {
            // the blow-up at the sphere limits accuracy to about macheps^{s-1}; the bound says so
            const auto e = frac_lap_4th_estimate<1>(FracOrder(s), u, Vec<1>{x});
            CHECK(std::abs(e.value) <= e.error);
            if (s >= 1.5 && x == 0.0) CHECK(std::abs(e.value) < 1e-6);
        }
        CHECK_THROWS_AS(frac_lap_4th<1>(FracOrder(s), u, Vec<1>{0.96}), CapabilityError);
    }
}

TEST_CASE("Gaussian against the Fourier symbol", "[hyperop]") {
    for (double s : {1.25, 1.5, 1.75}) {
        const FracOrder o(s);
        const auto g1 = field::gaussian<1>();
        CHECK(fourier_reference<1>(o, g1, Vec<1>{0.0}) == Approx(gaussian_at_centre(s, 1)).epsilon(1e-10));
        CHECK(frac_lap_4th<1>(o, g1, Vec<1>{0.0}) == Approx(gaussian_at_centre(s, 1)).epsilon(1e-8));
        for (double x : {0.3, 1.1, 2.5})
            CHECK(frac_lap_4th<1>(o, g1, Vec<1>{x}) == Approx(fourier_reference<1>(o, g1, Vec<1>{x})).epsilon(1e-7));
        const auto g2 = field::gaussian<2>(Vec<2>{0.2, 0.0}, 0.7);
        CHECK(frac_lap_4th<2>(o, g2, Vec<2>{0.5, 0.1}) ==
              Approx(fourier_reference<2>(o, g2, Vec<2>{0.5, 0.1})).epsilon(1e-6));
        const auto g3 = field::gaussian<3>();
        CHECK(frac_lap_4th<3>(o, g3, Vec<3>{0.0, 0.0, 0.0}) == Approx(gaussian_at_centre(s, 3)).epsilon(1e-6));
    }
    CHECK(gaussian_at_centre(1.5, 1) == Approx(4.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-14));
}

TEST_CASE("fourth-difference and composed definitions agree", "[hyperop][property]") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> C(-0.5, 0.5), W(0.4, 1.5), P(-0.8, 0.8);
    for (int trial = 0; trial < 4; ++trial) {
        const auto g = field::gaussian<1>(Vec<1>{C(rng)}, W(rng), 1.0 + C(rng));
        const auto b = field::smooth_bump<1>(Vec<1>{C(rng)}, 1.0 + C(rng));
        for (double s : {1.25, 1.5, 1.75}) {
            const FracOrder o(s);
            for (int k = 0; k < 2; ++k) {
                const Vec<1> x{P(rng)};
                const double v4 = frac_lap_4th<1>(o, g, x);
                CHECK(std::abs(v4 - frac_lap_composed<1>(o, g, x)) <= 1e-5 * (1 + std::abs(v4)));
                const double b4 = frac_lap_4th<1>(o, b, x);
                CHECK(std::abs(b4 - frac_lap_composed<1>(o, b, x)) <= 1e-4 * (1 + std::abs(b4)));
            }
        }
    }
}

TEST_CASE("composed definition needs only L1_{s-1}; the contract differs", "[hyperop]") {
    const auto a = field::affine<1>(0.0, Vec<1>{1.0});
    // affine grows like |y|: in L1_s for 2s > 1, but not in L1_{s-1} when s - 1 < 1/2
    CHECK_NOTHROW(frac_lap_4th<1>(FracOrder(1.25), a, Vec<1>{0.0}));
    CHECK_THROWS_AS(frac_lap_composed<1>(FracOrder(1.25), a, Vec<1>{0.0}), IntegrabilityError);
    CHECK(std::abs(frac_lap_composed<1>(FracOrder(1.75), a, Vec<1>{0.0})) < 1e-6);
    auto grow = field::from_function<1>([](const Vec<1>& y) { return y[0] * y[0] * y[0] * y[0]; }, {},
                                        kInf, Decay::algebraic(-4.0), "quartic");
    CHECK_THROWS_AS(frac_lap_4th<1>(FracOrder(1.5), grow, Vec<1>{0.0}), IntegrabilityError);
    auto unknown = field::from_function<1>([](const Vec<1>&) { return 1.0; }, {}, kInf, Decay::none());
    CHECK_THROWS_AS(frac_lap_2nd<1>(0.5, unknown, Vec<1>{0.0}), IntegrabilityError);
}

TEST_CASE("domain checks", "[hyperop]") {
    const auto w = field::delta_power<1>(0.5);
    CHECK_THROWS_AS(frac_lap_2nd<1>(1.0, w, Vec<1>{0.0}), DomainError);
    CHECK_THROWS_AS(frac_lap_4th<1>(FracOrder(0.5), w, Vec<1>{0.0}), DomainError);
    CHECK_THROWS_AS(frac_lap_4th<1>(FracOrder(2.0), w, Vec<1>{0.0}), DomainError);
    CHECK_THROWS_AS(frac_lap_2nd<1>(0.5, w, Vec<1>{1.0}), DomainError);
    const auto g = field::smooth_bump<1>(Vec<1>{0.0}, 1.0);
    CHECK_THROWS_AS(fourier_reference<1>(FracOrder(1.5), g, Vec<1>{0.0}), CapabilityError);
    auto slow = field::gaussian<1>();
    slow.transform->cutoff = kInf;
    slow.transform->decay = 3.0;
    CHECK_THROWS_AS(fourier_reference<1>(FracOrder(1.5), slow, Vec<1>{0.0}), DivergenceError);
}

TEST_CASE("band-limited transform integrates exactly", "[hyperop]") {
    // u^ = indicator of |xi| <= 1, so u(x) = sqrt(2/pi) sin(x)/x
    auto u = field::from_function<1>(
        [](const Vec<1>& x) { return std::abs(x[0]) < 1e-12 ? std::sqrt(2 / std::numbers::pi)
                                                            : std::sqrt(2 / std::numbers::pi) * std::sin(x[0]) / x[0]; },
        {}, kInf, Decay::algebraic(1.0));
    u.transform = RadialTransform<1>{Vec<1>{0.0}, [](double) { return 1.0; }, 1.0, kInf};
    for (double s : {0.5, 1.5})
        CHECK(fourier_reference<1>(FracOrder(s), u, Vec<1>{0.0}) ==
              Approx(2.0 / std::sqrt(2 * std::numbers::pi) / (2 * s + 1)).epsilon(1e-12));
}

TEST_CASE("operator properties: linearity, translation, scaling", "[hyperop][property]") {
    const FracOrder o(1.5);
    const auto u = field::gaussian<1>(Vec<1>{0.1}, 0.8);
    const auto v = field::smooth_bump<1>(Vec<1>{-0.2}, 1.2);
    const Vec<1> x{0.35};
    const auto lin = field::combine<1>(2.0, u, -3.0, v);
    CHECK(frac_lap_4th<1>(o, lin, x) ==
          Approx(2.0 * frac_lap_4th<1>(o, u, x) - 3.0 * frac_lap_4th<1>(o, v, x)).epsilon(1e-9));

    const Vec<1> shift{0.7};
    const auto ut = field::translate<1>(u, shift);
    CHECK(frac_lap_4th<1>(o, ut, x + shift) == Approx(frac_lap_4th<1>(o, u, x)).epsilon(1e-10));
    const auto w = field::delta_power<1>(1.5);
    const auto wt = field::translate<1>(w, shift);
    CHECK(frac_lap_4th<1>(o, wt, Vec<1>{0.2} + shift) == Approx(frac_lap_4th<1>(o, w, Vec<1>{0.2})).epsilon(1e-10));

    const double lambda = 1.7;
    const auto ud = field::dilate<1>(u, lambda);
    const double expect = std::pow(lambda, 2 * o.s()) * fourier_reference<1>(o, u, lambda * x);
    CHECK(fourier_reference<1>(o, ud, x) == Approx(expect).epsilon(1e-10));
    CHECK(frac_lap_4th<1>(o, ud, x) == Approx(expect).epsilon(1e-7));
}

TEST_CASE("Green function kernel identity in the y-variable", "[hyperop][kernels]") {
    const FracOrder s(1.5);
    const BallKernels<1> K(s);
    for (double x : {0.0, 0.4}) {
        auto G = field::from_function<1>(
            [&](const Vec<1>& y) { return std::abs(y[0] - x) < kDiagonalGuard ? 0.0 : K.green(Vec<1>{x}, y).value; },
            {{-1.0, s.s()}, {1.0, s.s()}, {x, 2.0 * s.s() - 1.0}}, 1.0, Decay::compact(), "G(x,.)");
        for (double y : {1.3, 2.0, -1.6}) {
            const double lhs = frac_lap_4th<1>(s, G, Vec<1>{y});
            CHECK(lhs == Approx(-K.gamma(Vec<1>{x}, Vec<1>{y})).epsilon(1e-6));
        }
    }
}
