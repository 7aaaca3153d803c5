#include "fibre_emit/constants.hpp"
#include "fibre_emit/errors.hpp"
#include "fibre_emit/quadrature.hpp"
#include "fibre_emit/radiative.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

using namespace fibre_emit;
using namespace fibre_emit::radiative;

namespace {

constexpr double kPi = constants::pi;
const double kOmega = 2.0 * kPi * constants::c / 589e-9;
const FibreSpec kFibre{100e-9, 1.45, 1.0};

double kn2(const FibreSpec& f) { return kOmega / constants::c * f.n2; }

double mag(const Vec3& e) { return std::sqrt(std::norm(e[0]) + std::norm(e[1]) + std::norm(e[2])); }

const std::vector<double> kBetaGrid = {0.0, 0.25, -0.25, 0.5, -0.5, 0.75, -0.75, 0.95, -0.95};

// sum over m, p of int dbeta |e(r)|^2, truncated once shells stop mattering.
double mode_density(double r, const FibreSpec& f)
{
    const double k = kn2(f);
    double total = 0.0;
    int quiet = 0;
    for (int m = 0; m < 200 && quiet < 3; ++m) {
        quadrature::Options opt;
        opt.rel_tol = 1e-9;
        opt.abs_tol = 1e-12 * total;
        const double shell =
            quadrature::integrate(
                [&](double theta) {
                    const double beta = k * std::sin(theta);
                    double acc = 0.0;
                    for (int p : {1, -1}) {
                        const auto e = profile(build_mode(kOmega, beta, m, p, f), r, f);
                        acc += std::norm(e[0]) + std::norm(e[1]) + std::norm(e[2]);
                    }
                    return k * std::cos(theta) * acc;
                },
                -kPi / 2 + 1e-9, kPi / 2 - 1e-9, opt)
                .value *
            (m == 0 ? 1.0 : 2.0);
        total += shell;
        quiet = shell < 1e-9 * total ? quiet + 1 : 0;
    }
    return total;
}

} // namespace

TEST_SUITE("radiative")
{
    TEST_CASE("coefficient chain special cases")
    {
        const double beta = 0.3 * kn2(kFibre);
        const auto m0 = coeff_chain(kOmega, beta, 0, kFibre);
        CHECK(m0.V[0] == 0.0);
        CHECK(m0.V[1] == 0.0);

        const FibreSpec matched{100e-9, 1.0, 1.0};
        const auto fm = coeff_chain(kOmega, beta, 2, matched);
        CHECK(fm.V[0] == 0.0);
        CHECK(fm.V[1] == 0.0);
        // Index-matched: M_1 = 0 and M_2 reduces to the Wronskian -2/(pi sigma^2 a).
        const double sigma = std::sqrt(std::pow(kn2(matched), 2) - beta * beta);
        CHECK(std::abs(fm.M[0]) < 1e-14 * std::abs(fm.M[1]));
        CHECK(fm.M[1] == doctest::Approx(-2.0 / (kPi * sigma * sigma * matched.a)).epsilon(1e-10));

        const auto plus = coeff_chain(kOmega, beta, 3, kFibre);
        const auto minus = coeff_chain(kOmega, -beta, 3, kFibre);
        for (int j = 0; j < 2; ++j) {
            CHECK(minus.V[j] == doctest::Approx(-plus.V[j]).epsilon(1e-14));
            CHECK(minus.M[j] == doctest::Approx(plus.M[j]).epsilon(1e-14));
            CHECK(minus.L[j] == doctest::Approx(plus.L[j]).epsilon(1e-14));
        }
        CHECK_THROWS_AS(coeff_chain(kOmega, kn2(kFibre), 1, kFibre), DomainError);
    }

    TEST_CASE("normalisation sum rule and p-orthogonality on the grid")
    {
        for (double b : kBetaGrid)
            for (int m = 0; m <= 5; ++m) {
                const double beta = b * kn2(kFibre);
                const auto up = build_mode(kOmega, beta, m, 1, kFibre);
                const auto dn = build_mode(kOmega, beta, m, -1, kFibre);
                INFO("beta/kn2 = " << b << ", m = " << m);
                REQUIRE_FALSE(up.negligible);
                CHECK(std::abs(delta_weight(up, up, kFibre) - 1.0) < 1e-10);
                CHECK(std::abs(delta_weight(dn, dn, kFibre) - 1.0) < 1e-10);
                CHECK(std::abs(delta_weight(up, dn, kFibre)) < 1e-6);
                CHECK(up.A.imag() == 0.0);
                CHECK(up.A.real() > 0.0);
                CHECK(std::abs(up.B - std::complex<double>(0.0, up.eta) * up.A) < 1e-12 * std::abs(up.B));
                CHECK(std::abs(dn.B + std::complex<double>(0.0, dn.eta) * dn.A) < 1e-12 * std::abs(dn.B));
            }
        const auto spot = build_mode(kOmega, 0.3 * kn2(kFibre), 1, -1, kFibre);
        CHECK(std::abs(delta_weight(spot, spot, kFibre) - 1.0) < 1e-10);
        CHECK_THROWS_AS(build_mode(kOmega, 0.0, 1, 0, kFibre), DomainError);
    }

    TEST_CASE("tangential continuity at the surface on the grid")
    {
        const double in = std::nextafter(kFibre.a, 0.0);
        const double out = std::nextafter(kFibre.a, 1.0);
        for (double b : kBetaGrid)
            for (int m = 0; m <= 5; ++m)
                for (int p : {1, -1}) {
                    const auto md = build_mode(kOmega, b * kn2(kFibre), m, p, kFibre);
                    const Vec3 ei = profile(md, in, kFibre);
                    const Vec3 eo = profile(md, out, kFibre);
                    const double scale = mag(ei);
                    INFO("beta/kn2 = " << b << ", m = " << m << ", p = " << p);
                    CHECK(std::abs(ei[1] - eo[1]) <= 1e-9 * scale);
                    CHECK(std::abs(ei[2] - eo[2]) <= 1e-9 * scale);
                    const double n1s = kFibre.n1 * kFibre.n1;
                    CHECK(std::abs(n1s * ei[0] - eo[0]) <= 1e-9 * n1s * scale);
                }
    }

    TEST_CASE("index-matched fibre gives free cylindrical waves")
    {
        const FibreSpec matched{100e-9, 1.0, 1.0};
        for (double b : {0.0, 0.4, -0.8})
            for (int m : {0, 1, 4}) {
                const auto md = build_mode(kOmega, b * kn2(matched), m, 1, matched);
                CHECK(std::abs(md.E) <= 1e-10 * std::abs(md.C));
                CHECK(std::abs(md.F) <= 1e-10 * std::abs(md.D));
                // Outside field continues the inside J_m form.
                for (double r : {1.5e-7, 4e-7}) {
                    const auto e = profile(md, r, matched);
                    const double jz = std::abs(md.A * std::cyl_bessel_j(m, md.sigma * r));
                    CHECK(std::abs(e[2]) == doctest::Approx(jz).epsilon(1e-9));
                }
            }
    }

    TEST_CASE("index-matched mode density is independent of position")
    {
        const FibreSpec matched{100e-9, 1.0, 1.0};
        const double ref = mode_density(matched.a, matched);
        for (double r : {2 * matched.a, 5 * matched.a}) {
            INFO("r / a = " << r / matched.a);
            const double ratio = mode_density(r, matched) / ref;
            CHECK(std::abs(ratio - 1.0) < 1e-4);
        }
    }

    TEST_CASE("m -> -m maps onto (m, -p) with e_phi reversed")
    {
        for (double b : {0.1, -0.6})
            for (int m : {1, 3})
                for (int p : {1, -1}) {
                    const double beta = b * kn2(kFibre);
                    const auto neg = build_mode(kOmega, beta, -m, p, kFibre);
                    const auto pos = build_mode(kOmega, beta, m, -p, kFibre);
                    for (double r : {0.5 * kFibre.a, 1.7 * kFibre.a}) {
                        const auto en = profile(neg, r, kFibre);
                        const auto ep = profile(pos, r, kFibre);
                        INFO("m = " << m << ", p = " << p << ", r/a = " << r / kFibre.a);
                        CHECK(std::abs(en[0]) == doctest::Approx(std::abs(ep[0])).epsilon(1e-10));
                        CHECK(std::abs(en[1]) == doctest::Approx(std::abs(ep[1])).epsilon(1e-10));
                        CHECK(std::abs(en[2]) == doctest::Approx(std::abs(ep[2])).epsilon(1e-10));
                        // Relative phases agree after reversing e_phi.
                        const auto rot = ep[2] / en[2];
                        CHECK(std::abs(en[0] * rot - ep[0]) < 1e-9 * mag(ep));
                        CHECK(std::abs(-en[1] * rot - ep[1]) < 1e-9 * mag(ep));
                    }
                }
    }

    TEST_CASE("far field stays bounded with a 1/r envelope")
    {
        const auto md = build_mode(kOmega, 0.2 * kn2(kFibre), 2, 1, kFibre);
        double peak_near = 0.0, peak_far = 0.0;
        const double lambda = 589e-9;
        for (int i = 0; i < 400; ++i) {
            peak_near = std::max(peak_near, mag(profile(md, 50 * lambda + i * lambda / 200, kFibre)));
            peak_far = std::max(peak_far, mag(profile(md, 200 * lambda + i * lambda / 200, kFibre)));
        }
        CHECK(peak_far > 0.0);
        CHECK(peak_far * peak_far / (peak_near * peak_near) == doctest::Approx(0.25).epsilon(0.05));
        CHECK_THROWS_AS(profile(md, 0.0, kFibre), DomainError);
    }

    TEST_CASE("very high orders are flagged negligible")
    {
        const auto md = build_mode(kOmega, 0.0, 400, 1, kFibre);
        CHECK(md.negligible);
        const auto e = profile(md, kFibre.a, kFibre);
        CHECK(mag(e) == 0.0);
    }
}
