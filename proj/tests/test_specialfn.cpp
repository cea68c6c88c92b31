#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "fraclap/specialfn.hpp"

using namespace fraclap;
using Catch::Approx;

TEST_CASE("FracOrder splits s and validates the range", "[specialfn]") {
    FracOrder a(1.5);
    CHECK(a.m() == 1);
    CHECK(a.sigma() == Approx(0.5));
    CHECK_FALSE(a.is_local());

    FracOrder b(0.3);
    CHECK(b.m() == 0);
    CHECK(b.sigma() == Approx(0.3));

    CHECK(FracOrder(1.0).is_local());
    CHECK(FracOrder(2.0).m() == 1);
    CHECK(FracOrder(2.0).sigma() == 1.0);

    CHECK_THROWS_AS(FracOrder(2.5), DomainError);
    CHECK_THROWS_AS(FracOrder(0.0), DomainError);
    CHECK_THROWS_AS(FracOrder(-1.0), DomainError);
    CHECK_THROWS_AS(FracOrder(std::nan("")), DomainError);
}

TEST_CASE("gamma_fn classical values", "[specialfn]") {
    const double sqrt_pi = std::sqrt(std::numbers::pi);
    CHECK(gamma_fn(1.0) == Approx(1.0).epsilon(1e-14));
    CHECK(gamma_fn(0.5) == Approx(sqrt_pi).epsilon(1e-13));
    // recurrence oracle: Gamma(x) = Gamma(x+2) / (x (x+1)) with Gamma(1/2) = sqrt(pi)
    CHECK(gamma_fn(-1.5) == Approx(4.0 * sqrt_pi / 3.0).epsilon(1e-12));
    CHECK(gamma_fn(5.0) == Approx(24.0).epsilon(1e-13));
    CHECK(gamma_fn(30.0) == Approx(std::tgamma(30.0)).epsilon(1e-12));
    for (double x = -4.75; x < 30.0; x += 0.37)
        CHECK(gamma_fn(x) == Approx(std::tgamma(x)).epsilon(1e-12));
}

TEST_CASE("gamma_fn rejects poles", "[specialfn]") {
    CHECK_THROWS_AS(gamma_fn(0.0), DomainError);
    CHECK_THROWS_AS(gamma_fn(-3.0), DomainError);
    try {
        gamma_fn(-2.0);
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("-2") != std::string::npos);
    }
    CHECK(rgamma(-2.0) == 0.0);
    CHECK(rgamma(2.0) == Approx(1.0));
}

TEST_CASE("gamma_fn satisfies the functional equation", "[specialfn][property]") {
    for (int i = 0; i < 100; ++i) {
        const double x = 0.5 + 19.5 * (i + 0.5) / 100.0;
        CHECK(gamma_fn(x + 1.0) == Approx(x * gamma_fn(x)).epsilon(1e-12));
    }
}

TEST_CASE("normalization constants", "[specialfn]") {
    const auto c1 = constants(FracOrder(1.0), 1);
    CHECK(c1.omega_N == Approx(2.0).epsilon(1e-14));
    CHECK(c1.k_Ns == Approx(0.25).epsilon(1e-14));
    CHECK(c1.gamma_Nsigma == 0.0);

    CHECK(constants(FracOrder(1.5), 2).omega_N == Approx(2.0 * std::numbers::pi));
    CHECK(constants(FracOrder(1.5), 3).omega_N == Approx(4.0 * std::numbers::pi));

    const auto c = constants(FracOrder(1.5), 1);
    CHECK(c.c_Ns > 0.0);
    CHECK(c.e_Ns > 0.0);
    // N = 1, s = 3/2: c = Gamma(2) / (sqrt(pi) Gamma(-3/2) (1 - 1/2)) = 3 / (2 pi)
    CHECK(c.c_Ns == Approx(3.0 / (2.0 * std::numbers::pi)).epsilon(1e-12));
    // e_{1,3/2} = -2 Gamma(1) / (sqrt(pi) Gamma(-1/2)) = 1/pi
    CHECK(c.e_Ns == Approx(1.0 / std::numbers::pi).epsilon(1e-12));
    // gamma_{1,1/2} = 2 / (Gamma(1/2)^2 * 2) = 1/pi
    CHECK(c.gamma_Nsigma == Approx(1.0 / std::numbers::pi).epsilon(1e-12));

    CHECK(constants(FracOrder(2.0), 1).c_Ns == 0.0);
    CHECK(constants(FracOrder(0.5), 1).c_Ns > 0.0);
}

TEST_CASE("constants stay finite across (1,2) and are continuous at s = 1", "[specialfn][property]") {
    for (int N = 1; N <= 3; ++N) {
        for (double s = 1.01; s <= 1.99 + 1e-12; s += 0.01) {
            const auto c = constants(FracOrder(s), N);
            CHECK(std::isfinite(c.c_Ns));
            CHECK(std::isfinite(c.e_Ns));
            CHECK(c.c_Ns > 0.0);
            CHECK(c.e_Ns > 0.0);
            CHECK(c.k_Ns > 0.0);
            CHECK(c.gamma_Nsigma > 0.0);
        }
        const double at1 = constants(FracOrder(1.0), N).c_Ns;
        CHECK(constants(FracOrder(1.0 + 1e-7), N).c_Ns == Approx(at1).epsilon(1e-5));
        CHECK(constants(FracOrder(1.0 - 1e-7), N).c_Ns == Approx(at1).epsilon(1e-5));
    }
}

TEST_CASE("boggio_integral closed-form checks", "[specialfn]") {
    CHECK(boggio_integral(0.0, FracOrder(1.5), 1) == 0.0);
    // antiderivative 2 sqrt(1+t): 2 (2 - 1) = 2
    CHECK(boggio_integral(3.0, FracOrder(1.0), 1) == Approx(2.0).epsilon(1e-14));
    // N=2, s=3/2, rho=1: t = u^2 turns it into int_0^1 2u^2/(1+u^2) du = 2 - pi/2
    CHECK(boggio_integral(1.0, FracOrder(1.5), 2) == Approx(2.0 - std::numbers::pi / 2.0).epsilon(1e-12));
    // N=1, s=3/2: sqrt(rho(1+rho)) - asinh(sqrt(rho))
    for (double rho : {0.01, 0.5, 1.0, 2.0, 40.0, 1e6}) {
        const double exact = std::sqrt(rho * (1.0 + rho)) - std::asinh(std::sqrt(rho));
        CHECK(boggio_integral(rho, FracOrder(1.5), 1) == Approx(exact).epsilon(1e-11));
    }
    CHECK_THROWS_AS(boggio_integral(-0.1, FracOrder(1.5), 1), DomainError);
}

TEST_CASE("boggio_integral agrees with direct quadrature", "[specialfn]") {
    QuadratureConfig cfg;
    cfg.rel_tol = 1e-13;
    cfg.abs_tol = 1e-300;
    for (int N = 1; N <= 4; ++N) {
        for (double s : {0.3, 0.5, 1.0, 1.25, 1.5, 1.9, 2.0}) {
            for (double rho : {0.2, 0.99, 1.01, 7.0, 300.0}) {
                // t = rho * v^{1/s} removes the t^{s-1} endpoint factor
                auto g = [&](double v) { return std::pow(1.0 + rho * std::pow(v, 1.0 / s), -0.5 * N); };
                const double oracle = std::pow(rho, s) / s * integrate_adaptive(g, 0.0, 1.0, cfg).value;
                CHECK(boggio_integral(rho, FracOrder(s), N) == Approx(oracle).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("boggio_integral is monotone, and concave for large rho when 2s < N", "[specialfn][property]") {
    for (int N = 1; N <= 3; ++N) {
        for (double s : {0.4, 1.2, 1.5, 1.8}) {
            double prev = -1.0;
            for (double rho = 0.0; rho < 50.0; rho += 0.37) {
                const double v = boggio_integral(rho, FracOrder(s), N);
                CHECK(v > prev);
                prev = v;
            }
            if (2.0 * s < N) {
                for (double rho = 5.0; rho < 50.0; rho += 1.3) {
                    const double h = 0.5;
                    const double d2 = boggio_integral(rho + h, FracOrder(s), N) -
                                      2.0 * boggio_integral(rho, FracOrder(s), N) +
                                      boggio_integral(rho - h, FracOrder(s), N);
                    CHECK(d2 < 0.0);
                }
            }
        }
    }
}
