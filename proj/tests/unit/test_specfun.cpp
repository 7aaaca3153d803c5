#include "fibre_emit/errors.hpp"
#include "fibre_emit/specfun.hpp"

#include "oracles.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

using namespace fibre_emit::specfun;

namespace {

constexpr double kPi = 3.14159265358979323846;

double rel(double got, double want)
{
    return std::abs(got - want) / std::abs(want);
}

// Relative error with an absolute floor for values near a zero.
bool close(double got, double want, double rtol, double atol)
{
    return std::abs(got - want) <= rtol * std::abs(want) + atol;
}

} // namespace

TEST_SUITE("specfun")
{
    TEST_CASE("values at the origin and first zeros")
    {
        CHECK(bessel_j(0, 0.0) == 1.0);
        CHECK(bessel_j(1, 0.0) == 0.0);
        CHECK(bessel_j(5, 0.0) == 0.0);
        CHECK(std::abs(bessel_j(0, 2.404825557695773)) < 1e-10);
        CHECK(std::abs(bessel_y(0, 0.8935769662791675)) < 1e-10);
        CHECK(bessel_j_prime(0, 0.0) == 0.0);
    }

    TEST_CASE("Y_0 decreases without bound towards the origin")
    {
        double prev = bessel_y(0, 0.5);
        for (double x = 0.1; x > 1e-300; x *= 1e-3) {
            const double y = bessel_y(0, x);
            CHECK(y < prev);
            prev = y;
        }
        CHECK(prev < -100.0);
    }

    TEST_CASE("K_0(1) against its integral representation")
    {
        boost::math::quadrature::exp_sinh<double> integrator;
        const double ref = integrator.integrate([](double t) { return std::exp(-std::cosh(t)); });
        CHECK(rel(bessel_k(0, 1.0), ref) < 1e-12);
        CHECK(rel(bessel_k(0, 1.0), 0.42102443824070833334) < 1e-13);
    }

    TEST_CASE("K is positive, decreasing and even in the order")
    {
        CHECK(bessel_k(0, 1.0) > bessel_k(0, 2.0));
        CHECK(bessel_k(0, 2.0) > bessel_k(0, 3.0));
        for (int m = 0; m <= 12; ++m)
            for (double x : {1e-3, 0.1, 1.0, 2.0, 2.1, 7.5, 40.0, 300.0}) {
                CHECK(bessel_k(m, x) > 0.0);
                CHECK(bessel_k_prime(m, x) < 0.0);
                CHECK(bessel_k(-m, x) == bessel_k(m, x));
            }
        CHECK(bessel_k_prime(0, 1.0) == doctest::Approx(-bessel_k(1, 1.0)).epsilon(1e-15));
    }

    TEST_CASE("negative orders follow the reflection rules")
    {
        for (int m = 1; m <= 6; ++m)
            for (double x : {0.3, 4.0, 25.0}) {
                const double s = (m % 2) ? -1.0 : 1.0;
                CHECK(bessel_j(-m, x) == s * bessel_j(m, x));
                CHECK(bessel_y(-m, x) == s * bessel_y(m, x));
            }
    }

    TEST_CASE("derivatives match central differences")
    {
        const double h = 1e-6;
        auto fd = [h](auto f, int m, double x) { return (f(m, x + h) - f(m, x - h)) / (2 * h); };
        CHECK(std::abs(bessel_j_prime(1, 2.0) - fd(bessel_j, 1, 2.0)) < 1e-8);
        for (int m = 0; m <= 5; ++m)
            for (double x : {0.7, 2.0, 9.3}) {
                CHECK(std::abs(bessel_j_prime(m, x) - fd(bessel_j, m, x)) < 1e-8);
                CHECK(std::abs(bessel_y_prime(m, x) - fd(bessel_y, m, x)) <
                      1e-8 * std::max(1.0, std::abs(bessel_y_prime(m, x))));
                CHECK(std::abs(bessel_k_prime(m, x) - fd(bessel_k, m, x)) <
                      1e-8 * std::max(1.0, std::abs(bessel_k_prime(m, x))));
            }
    }

    TEST_CASE("Wronskian identity on the order and argument grid")
    {
        for (int m = 0; m <= 10; ++m)
            for (double x = 0.1; x <= 50.0; x *= 1.37) {
                const double w = bessel_j(m, x) * bessel_y_prime(m, x) -
                                 bessel_j_prime(m, x) * bessel_y(m, x);
                INFO("m = " << m << ", x = " << x);
                CHECK(rel(w, 2.0 / (kPi * x)) < 1e-10);
            }
    }

    TEST_CASE("three-term recurrences")
    {
        for (int m = 1; m <= 10; ++m)
            for (double x = 0.1; x <= 50.0; x *= 1.37) {
                INFO("m = " << m << ", x = " << x);
                const double j = bessel_j(m, x);
                const double jsum = bessel_j(m - 1, x) + bessel_j(m + 1, x);
                const double jscale = std::abs(bessel_j(m - 1, x)) + std::abs(bessel_j(m + 1, x));
                CHECK(std::abs(jsum - 2.0 * m / x * j) <= 1e-10 * jscale);
                const double ysum = bessel_y(m - 1, x) + bessel_y(m + 1, x);
                const double yscale = std::abs(bessel_y(m - 1, x)) + std::abs(bessel_y(m + 1, x));
                CHECK(std::abs(ysum - 2.0 * m / x * bessel_y(m, x)) <= 1e-10 * yscale);
                const double kdiff = bessel_k(m + 1, x) - bessel_k(m - 1, x);
                CHECK(rel(kdiff, 2.0 * m / x * bessel_k(m, x)) < 1e-10);
            }
    }

    TEST_CASE("sequence and triplet entry points agree with single evaluations")
    {
        std::vector<double> j(15), y(15), k(15), ks(15);
        const double x = 3.7;
        bessel_j_seq(x, j);
        bessel_y_seq(x, y);
        bessel_k_seq(x, k);
        bessel_k_seq(x, ks, true);
        for (int m = 0; m < 15; ++m) {
            CHECK(close(j[m], bessel_j(m, x), 1e-14, 1e-300));
            CHECK(close(y[m], bessel_y(m, x), 1e-14, 0.0));
            CHECK(close(k[m], bessel_k(m, x), 1e-14, 0.0));
            CHECK(close(ks[m], std::exp(x) * bessel_k(m, x), 1e-13, 0.0));
        }
        const auto t = bessel_j_triplet(-3, x);
        CHECK(close(t.value, bessel_j(-3, x), 1e-14, 0.0));
        CHECK(close(t.prime(), bessel_j_prime(-3, x), 1e-13, 1e-16));
        const auto kt = bessel_k_triplet(4, x);
        CHECK(close(k_prime(kt), bessel_k_prime(4, x), 1e-14, 0.0));
    }

    TEST_CASE("scaled K stays finite where K underflows")
    {
        const double ks = bessel_k_scaled(2, 1000.0);
        CHECK(std::isfinite(ks));
        CHECK(bessel_k(2, 1000.0) == doctest::Approx(0.0));
        const double ref = static_cast<double>(oracle::k_asymptotic(2, oracle::big(1000)) *
                                               exp(oracle::big(1000)));
        CHECK(rel(ks, ref) < 1e-12);
    }

    TEST_CASE("1000 random samples against the series oracle")
    {
        std::mt19937_64 rng(20240611);
        std::uniform_int_distribution<int> order(0, 30);
        std::uniform_real_distribution<double> logx(std::log(0.1), std::log(50.0));
        double worst_j = 0.0, worst_y = 0.0, worst_k = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const int m = order(rng);
            const double x = std::exp(logx(rng));
            const oracle::big bx(x);
            const double j = static_cast<double>(oracle::j_series(m, bx));
            const double y = static_cast<double>(oracle::y_series(m, bx));
            const double k = static_cast<double>(oracle::k_series(m, bx));
            INFO("m = " << m << ", x = " << x);
            CHECK(close(bessel_j(m, x), j, 1e-10, 1e-14));
            CHECK(close(bessel_y(m, x), y, 1e-10, 1e-14));
            CHECK(rel(bessel_k(m, x), k) < 1e-10);
            if (std::abs(j) > 1e-3)
                worst_j = std::max(worst_j, rel(bessel_j(m, x), j));
            if (std::abs(y) > 1e-3)
                worst_y = std::max(worst_y, rel(bessel_y(m, x), y));
            worst_k = std::max(worst_k, rel(bessel_k(m, x), k));
        }
        MESSAGE("worst relative error J " << worst_j << ", Y " << worst_y << ", K " << worst_k);
    }

    TEST_CASE("large arguments against the Hankel expansion")
    {
        std::mt19937_64 rng(7);
        std::uniform_int_distribution<int> order(0, 10);
        std::uniform_real_distribution<double> logx(std::log(60.0), std::log(1000.0));
        for (int i = 0; i < 200; ++i) {
            const int m = order(rng);
            const double x = std::exp(logx(rng));
            const auto jy = oracle::jy_asymptotic(m, oracle::big(x));
            const oracle::big bx(x);
            const double ks = static_cast<double>(oracle::k_asymptotic(m, bx) * exp(bx));
            INFO("m = " << m << ", x = " << x);
            CHECK(close(bessel_j(m, x), static_cast<double>(jy.j), 1e-10, 1e-14));
            CHECK(close(bessel_y(m, x), static_cast<double>(jy.y), 1e-10, 1e-14));
            // K itself underflows past x ~ 700.
            CHECK(rel(bessel_k_scaled(m, x), ks) < 1e-10);
            if (x < 700.0)
                CHECK(rel(bessel_k(m, x), static_cast<double>(oracle::k_asymptotic(m, bx))) < 1e-10);
        }
    }

    TEST_CASE("invalid arguments raise domain errors")
    {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        const double inf = std::numeric_limits<double>::infinity();
        CHECK_THROWS_AS(bessel_j(0, nan), fibre_emit::DomainError);
        CHECK_THROWS_AS(bessel_j(1, inf), fibre_emit::DomainError);
        CHECK_THROWS_AS(bessel_y(0, 0.0), fibre_emit::DomainError);
        CHECK_THROWS_AS(bessel_y(2, -1.0), fibre_emit::DomainError);
        CHECK_THROWS_AS(bessel_k(0, 0.0), fibre_emit::DomainError);
        CHECK_THROWS_AS(bessel_k(1, -3.0), fibre_emit::DomainError);
        CHECK_THROWS_AS(bessel_k_prime(1, nan), fibre_emit::DomainError);
    }
}
