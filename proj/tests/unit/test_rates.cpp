#include "fibre_emit/constants.hpp"
#include "fibre_emit/errors.hpp"
#include "fibre_emit/rates.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <string>
#include <vector>

using namespace fibre_emit;
using namespace fibre_emit::rates;

namespace {

const AtomData& na() { return AtomData::sodium(); }

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

const TransitionChannel& channel(const std::vector<TransitionChannel>& chans, const std::string& label)
{
    for (const auto& ch : chans)
        if (ch.label() == label)
            return ch;
    FAIL("channel " << label << " not found");
    throw std::logic_error("unreachable");
}

ModeCache& shared_cache()
{
    static ModeCache cache;
    return cache;
}

RateBreakdown at(const std::string& state, double r_over_a, double phi = 0.0, double z = 0.0)
{
    const Medium medium;
    return total_rates(na(), na().parse_state(state), medium, {r_over_a * medium.a, phi, z}, {},
                       &shared_cache());
}

} // namespace

TEST_SUITE("rates")
{
    const double a = 100e-9;

    TEST_CASE("guided coupling symmetries")
    {
        const auto chans = list_lower_channels(na(), na().parse_state("10s1/2:+1/2"));
        const auto& ch = channel(chans, "10s1/2->3p3/2");
        const FibreSpec fib{a, 1.467, 1.0};
        const auto modes = guided::solve_branches(ch.omega, fib);
        REQUIRE(!modes.empty());
        const auto& he = modes[0];
        for (std::size_t c = 0; c < ch.components.size(); ++c)
            for (int p : {1, -1}) {
                const double ref = std::abs(coupling_guided(ch, c, he, 1, p, fib, {a, 0.0, 0.0}));
                CHECK(ref > 0.0);
                for (double phi : {0.4, 2.0})
                    for (double z : {0.0, 3e-7})
                        CHECK(std::abs(coupling_guided(ch, c, he, 1, p, fib, {a, phi, z})) ==
                              doctest::Approx(ref).epsilon(1e-12));
            }
        // Summed over lower sublevels, forward and backward emission agree.
        for (int p : {1, -1}) {
            double fwd = 0.0, bwd = 0.0;
            for (std::size_t c = 0; c < ch.components.size(); ++c) {
                fwd += std::norm(coupling_guided(ch, c, he, 1, p, fib, {1.3 * a, 0.0, 0.0}));
                bwd += std::norm(coupling_guided(ch, c, he, -1, p, fib, {1.3 * a, 0.0, 0.0}));
            }
            CHECK(fwd == doctest::Approx(bwd).epsilon(1e-12));
        }
        // Far from the fibre the evanescent tail vanishes.
        CHECK(std::abs(coupling_guided(ch, 0, he, 1, 1, fib, {200 * a, 0.0, 0.0})) <
              1e-8 * std::abs(coupling_guided(ch, 0, he, 1, 1, fib, {a, 0.0, 0.0})));
    }

    TEST_CASE("a z-polarised dipole sees only e_z")
    {
        const auto chans = list_lower_channels(na(), na().parse_state("10s1/2:+1/2"));
        const auto& ch = channel(chans, "10s1/2->3p1/2");
        std::size_t iz = ch.components.size();
        for (std::size_t c = 0; c < ch.components.size(); ++c)
            if (ch.components[c].q == 0)
                iz = c;
        REQUIRE(iz < ch.components.size());
        const FibreSpec fib{a, 1.467, 1.0};
        const auto he = guided::solve_branches(ch.omega, fib)[0];
        const auto e = guided::profile(he, a, fib, 1, 1);
        const double d = ch.components[iz].spherical;
        const double pref = std::sqrt(ch.omega * he.beta_prime / (4 * constants::pi * constants::epsilon0 * constants::hbar));
        CHECK(std::abs(coupling_guided(ch, iz, he, 1, 1, fib, {a, 0.0, 0.0})) ==
              doctest::Approx(pref * std::abs(d * e[2])).epsilon(1e-12));
    }

    TEST_CASE("coupling preconditions")
    {
        const auto chans = list_lower_channels(na(), na().parse_state("10s1/2:+1/2"));
        const auto& c1 = channel(chans, "10s1/2->3p3/2");
        const auto& c2 = channel(chans, "10s1/2->4p3/2");
        const FibreSpec fib{a, 1.45, 1.0};
        const auto he = guided::solve_branches(c1.omega, fib)[0];
        CHECK_THROWS_AS(coupling_guided(c2, 0, he, 1, 1, fib, {a, 0, 0}), DomainError);
        CHECK_THROWS_AS(coupling_guided(c1, 99, he, 1, 1, fib, {a, 0, 0}), DomainError);
        const auto rm = radiative::build_mode(c1.omega, 0.0, 1, 1, fib);
        CHECK_THROWS_AS(coupling_radiative(c2, 0, rm, fib, {a, 0, 0}), DomainError);
    }

    TEST_CASE("radiative coupling symmetries")
    {
        const auto chans = list_lower_channels(na(), na().parse_state("10p3/2:+3/2"));
        auto ch = channel(chans, "10p3/2->3s1/2");
        const FibreSpec fib{a, 1.467, 1.0};
        const double kn2 = ch.omega / constants::c;
        const auto md = radiative::build_mode(ch.omega, 0.37 * kn2, 2, -1, fib);
        const double ref = std::abs(coupling_radiative(ch, 0, md, fib, {1.2 * a, 0, 0}));
        CHECK(ref > 0.0);
        CHECK(std::abs(coupling_radiative(ch, 0, md, fib, {1.2 * a, 1.1, 7e-7})) ==
              doctest::Approx(ref).epsilon(1e-12));
        for (auto& dc : ch.components)
            dc.d_mn = {0.0, 0.0, 0.0};
        CHECK(std::abs(coupling_radiative(ch, 0, md, fib, {1.2 * a, 0, 0})) == 0.0);
    }

    TEST_CASE("atom inside the fibre is rejected")
    {
        const Medium medium;
        CHECK_THROWS_AS(total_rates(na(), na().parse_state("10s1/2"), medium, {0.5 * medium.a, 0, 0}),
                        DomainError);
        CHECK_THROWS_AS(total_rates(na(), na().parse_state("10s1/2"), medium, {NAN, 0, 0}),
                        DomainError);
    }

    TEST_CASE("dispersion lookup per channel")
    {
        const Medium medium;
        const auto chans = list_lower_channels(na(), na().parse_state("10p1/2:+1/2"));
        const auto r3 = medium.fibre_for(channel(chans, "10p1/2->3s1/2"));
        CHECK(r3.fibre.n1 == 1.467);
        CHECK_FALSE(r3.fallback);
        const auto r10 = medium.fibre_for(channel(chans, "10p1/2->10s1/2"));
        CHECK(r10.fibre.n1 == 1.45);
        CHECK(r10.fallback);
        Medium fixed;
        fixed.n1_fixed = 1.6;
        CHECK(fixed.fibre_for(channel(chans, "10p1/2->3s1/2")).fibre.n1 == 1.6);
    }

    TEST_CASE("breakdown bookkeeping")
    {
        const auto rb = at("10s1/2:+1/2", 1.0);
        double g = 0.0, r = 0.0, g0 = 0.0;
        for (const auto& cr : rb.per_channel) {
            double branches = 0.0;
            for (const auto& b : cr.guided.branches) {
                CHECK(b.rate >= 0.0);
                branches += b.rate;
            }
            CHECK(branches == doctest::Approx(cr.guided.rate).epsilon(1e-12));
            CHECK(cr.radiative.rate > 0.0);
            CHECK(cr.radiative.achieved_rel < 1e-5);
            g += cr.guided.rate;
            r += cr.radiative.rate;
            g0 += cr.gamma0;
        }
        CHECK(rb.per_channel.size() == 14);
        CHECK(rb.Gamma_g == doctest::Approx(g).epsilon(1e-12));
        CHECK(rb.Gamma_r == doctest::Approx(r).epsilon(1e-12));
        CHECK(rb.Gamma_0 == doctest::Approx(g0).epsilon(1e-12));
        CHECK(rb.guided_fraction == doctest::Approx(g / (g + r)).epsilon(1e-12));
        CHECK(rb.total() == doctest::Approx(g + r).epsilon(1e-12));
    }

    TEST_CASE("rates do not depend on phi or z")
    {
        const auto ref = at("10p3/2:+1/2", 1.0);
        for (double phi : {0.0, 1.0471975511965976, 1.7})
            for (double z : {0.0, 5.0 * a}) {
                const auto rb = at("10p3/2:+1/2", 1.0, phi, z);
                INFO("phi = " << phi << ", z = " << z);
                CHECK(rel(rb.Gamma_g, ref.Gamma_g) < 1e-10);
                CHECK(rel(rb.Gamma_r, ref.Gamma_r) < 1e-10);
            }
    }

    TEST_CASE("m_j reflection symmetry")
    {
        for (const char* s : {"10s1/2", "10p1/2", "10p3/2:1/2", "10p3/2:3/2"}) {
            const auto st = na().parse_state(s);
            const std::string plus = st.label();
            const std::string minus = na().state(st.n, st.l, st.j, -st.mj).label();
            const auto rp = at(plus, 1.0);
            const auto rm = at(minus, 1.0);
            INFO(plus << " vs " << minus);
            CHECK(rel(rm.Gamma_g, rp.Gamma_g) < 1e-10);
            CHECK(rel(rm.Gamma_r, rp.Gamma_r) < 1e-10);
            CHECK(rel(rm.Gamma_0, rp.Gamma_0) < 1e-12);
        }
    }

    TEST_CASE("state ordering at the surface")
    {
        const double g_low = at("10p3/2:+1/2", 1.0).Gamma_g;
        const double g_mid = at("10p1/2:+1/2", 1.0).Gamma_g;
        const double g_high = at("10p3/2:+3/2", 1.0).Gamma_g;
        const auto s = at("10s1/2:+1/2", 1.0);
        const double n_low = g_low / at("10p3/2:+1/2", 1.0).Gamma_0;
        CHECK(g_low < g_mid);
        CHECK(g_mid < g_high);
        CHECK(g_high / at("10p3/2:+3/2", 1.0).Gamma_0 < 0.5 * s.Gamma_g / s.Gamma_0);
        CHECK(n_low < 0.5 * s.Gamma_g / s.Gamma_0);
    }

    TEST_CASE("rates fall off away from the fibre")
    {
        double prev = at("10s1/2", 1.0).Gamma_g;
        for (double r : {1.5, 2.0, 3.0, 5.0}) {
            const double g = at("10s1/2", r).Gamma_g;
            CHECK(g < prev);
            prev = g;
        }
    }

    TEST_CASE("index-matched fibre reproduces free space")
    {
        Medium medium;
        medium.n1_fixed = 1.0;
        const auto rb = total_rates(na(), na().parse_state("10s1/2"), medium, {medium.a, 0, 0});
        CHECK(rb.Gamma_g == 0.0);
        CHECK(rel(rb.Gamma_r, rb.Gamma_0) < 1e-3);
    }

    TEST_CASE("tighter tolerances move the radiative rate by less than reported")
    {
        const auto chans = list_lower_channels(na(), na().parse_state("10s1/2"));
        const auto& ch = channel(chans, "10s1/2->3p3/2");
        const FibreSpec fib{a, 1.467, 1.0};
        const Geometry where{1.2 * a, 0, 0};
        const auto loose = gamma_radiative(ch, fib, where);
        Tolerances tight;
        tight.quad_rel = 1e-9;
        tight.shell_rel = 1e-11;
        const auto fine = gamma_radiative(ch, fib, where, tight);
        CHECK(fine.m_max >= loose.m_max);
        CHECK(rel(loose.rate, fine.rate) <= loose.achieved_rel);
    }

    TEST_CASE("m-sum cap raises a numerical error with the achieved tolerance")
    {
        const auto chans = list_lower_channels(na(), na().parse_state("10s1/2"));
        const auto& ch = channel(chans, "10s1/2->3p3/2");
        Tolerances tol;
        tol.m_limit = 2;
        try {
            (void)gamma_radiative(ch, FibreSpec{a, 1.467, 1.0}, {a, 0, 0}, tol);
            FAIL("expected NumericalError");
        } catch (const NumericalError& e) {
            CHECK(e.achieved_tolerance() > 0.0);
        }
    }

    TEST_CASE("decoherence rate")
    {
        const Medium medium;
        const Geometry where{medium.a, 0, 0};
        const auto s = na().parse_state("10s1/2");
        const auto p = na().parse_state("10p1/2");
        const auto g = na().parse_state("3s1/2");
        const double gs = total_rates(na(), s, medium, where, {}, &shared_cache()).total();
        const double gp = total_rates(na(), p, medium, where, {}, &shared_cache()).total();
        const double sp = decoherence_rate(na(), s, p, medium, where);
        CHECK(sp == doctest::Approx(0.5 * (gs + gp)).epsilon(1e-12));
        CHECK(decoherence_rate(na(), p, s, medium, where) == doctest::Approx(sp).epsilon(1e-14));
        CHECK(decoherence_rate(na(), s, s, medium, where) == doctest::Approx(gs).epsilon(1e-12));
        CHECK(decoherence_rate(na(), s, g, medium, where) == doctest::Approx(0.5 * gs).epsilon(1e-12));
    }

    TEST_CASE("mode cache returns the same entry")
    {
        ModeCache cache;
        const FibreSpec fib{a, 1.45, 1.0};
        const double w = 3.2e15;
        const auto e1 = cache.get(w, fib);
        const auto e2 = cache.get(w, fib);
        CHECK(e1.get() == e2.get());
        CHECK(cache.get(w, FibreSpec{2 * a, 1.45, 1.0}).get() != e1.get());
    }
}
