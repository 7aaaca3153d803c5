#include "fibre_emit/rates.hpp"

#include "fibre_emit/constants.hpp"
#include "fibre_emit/errors.hpp"
#include "fibre_emit/quadrature.hpp"

#include <cmath>
#include <sstream>

namespace fibre_emit::rates {

namespace {

using cvec = std::array<std::complex<double>, 3>;

void check_geometry(const Geometry& g, const FibreSpec& fibre)
{
    if (!std::isfinite(g.r) || !std::isfinite(g.phi) || !std::isfinite(g.z))
        throw DomainError("atom position must be finite");
    if (g.r < fibre.a)
        throw DomainError("atom inside the fibre (r < a) is not supported");
}

// Cylindrical field components at azimuth phi to Cartesian.
cvec to_cartesian(const guided::Vec3& e, double phi)
{
    const double cs = std::cos(phi);
    const double sn = std::sin(phi);
    return {e[0] * cs - e[1] * sn, e[0] * sn + e[1] * cs, e[2]};
}

std::complex<double> dot(const cvec& d, const cvec& e)
{
    return d[0] * e[0] + d[1] * e[1] + d[2] * e[2];
}

void check_frequency(double channel_omega, double mode_omega)
{
    if (std::abs(channel_omega - mode_omega) > 1e-12 * channel_omega)
        throw DomainError("mode frequency does not match the transition frequency");
}

const DipoleComponent& component_at(const TransitionChannel& ch, std::size_t k)
{
    if (k >= ch.components.size())
        throw DomainError("dipole component index out of range for " + ch.label());
    return ch.components[k];
}

int polarisations(const guided::GuidedMode& mode)
{
    return mode.m == 0 ? 1 : 2;
}

} // namespace

Medium::Resolved Medium::fibre_for(const TransitionChannel& channel) const
{
    Resolved out;
    out.fibre.a = a;
    out.fibre.n2 = n2;
    if (n1_fixed) {
        out.fibre.n1 = *n1_fixed;
    } else {
        const auto lk = dispersion.lookup(channel);
        out.fibre.n1 = lk.n1;
        out.fallback = lk.fallback;
    }
    out.fibre.validate();
    return out;
}

std::complex<double> coupling_guided(const TransitionChannel& channel, std::size_t component,
                                     const guided::GuidedMode& mode, int f, int p,
                                     const FibreSpec& fibre, const Geometry& where)
{
    check_frequency(channel.omega, mode.omega);
    const auto& dc = component_at(channel, component);
    const cvec e = to_cartesian(guided::profile(mode, where.r, fibre, f, p), where.phi);
    const double amp = std::sqrt(mode.omega * mode.beta_prime /
                                 (4.0 * constants::pi * constants::epsilon0 * constants::hbar));
    const double phase = f * mode.beta * where.z + p * mode.m * where.phi;
    return -amp * dot(dc.d_mn, e) * std::polar(1.0, phase);
}

std::complex<double> coupling_radiative(const TransitionChannel& channel, std::size_t component,
                                        const radiative::RadiativeMode& mode,
                                        const FibreSpec& fibre, const Geometry& where)
{
    check_frequency(channel.omega, mode.omega);
    const auto& dc = component_at(channel, component);
    const cvec e = to_cartesian(radiative::profile(mode, where.r, fibre), where.phi);
    const double amp =
        std::sqrt(mode.omega / (4.0 * constants::pi * constants::epsilon0 * constants::hbar));
    const double phase = mode.beta * where.z + mode.m * where.phi;
    return -amp * dot(dc.d_mn, e) * std::polar(1.0, phase);
}

GuidedRate gamma_guided(const TransitionChannel& channel, const FibreSpec& fibre,
                        const Geometry& where, const std::vector<guided::GuidedMode>* modes)
{
    check_geometry(where, fibre);
    GuidedRate out;
    std::vector<guided::GuidedMode> local;
    if (!modes) {
        guided::SolveDiagnostics diag;
        local = guided::solve_branches(channel.omega, fibre, -1, &diag);
        out.fundamental_unresolved = diag.fundamental_unresolved;
        modes = &local;
    }
    for (const auto& mode : *modes) {
        check_frequency(channel.omega, mode.omega);
        double sum = 0.0;
        for (std::size_t k = 0; k < channel.components.size(); ++k)
            for (int f : {1, -1})
                for (int ip = 0; ip < polarisations(mode); ++ip)
                    sum += std::norm(
                        coupling_guided(channel, k, mode, f, ip == 0 ? 1 : -1, fibre, where));
        BranchRate br;
        br.name = mode.name();
        br.branch = mode.branch;
        br.m = mode.m;
        br.radial_index = mode.radial_index;
        br.rate = 2.0 * constants::pi * sum;
        out.rate += br.rate;
        out.branches.push_back(br);
    }
    return out;
}

RadiativeRate gamma_radiative(const TransitionChannel& channel, const FibreSpec& fibre,
                              const Geometry& where, const Tolerances& tol)
{
    check_geometry(where, fibre);
    RadiativeRate out;
    if (channel.components.empty())
        return out;

    const double omega = channel.omega;
    const double k = omega / constants::c;
    const double kn2 = k * fibre.n2;
    const double pref = omega / (2.0 * constants::epsilon0 * constants::hbar);
    const double scale = vacuum_rate(channel) / pref;

    std::vector<cvec> dipoles;
    for (const auto& dc : channel.components)
        dipoles.push_back(dc.d_mn);

    // Fields of (-m, p) equal those of (m, -p) with e_phi reversed, up to a
    // sign, so one shell needs only the two modes of order +m.
    auto shell = [&](int m, double theta) {
        const double beta = kn2 * std::sin(theta);
        const double sigma = kn2 * std::cos(theta);
        if (!(sigma > 0.0))
            return 0.0;
        double acc = 0.0;
        for (int p : {1, -1}) {
            const auto mode = radiative::build_mode(omega, beta, m, p, fibre);
            if (mode.negligible)
                continue;
            const auto e = radiative::profile(mode, where.r, fibre);
            const cvec plus = to_cartesian(e, where.phi);
            for (const auto& d : dipoles)
                acc += std::norm(dot(d, plus));
            if (m != 0) {
                const cvec minus = to_cartesian({e[0], -e[1], e[2]}, where.phi);
                for (const auto& d : dipoles)
                    acc += std::norm(dot(d, minus));
            }
        }
        return sigma * acc;
    };

    quadrature::Options opt;
    opt.rel_tol = tol.quad_rel;
    opt.abs_tol = 0.1 * tol.quad_rel * scale;
    const double half_pi = 0.5 * constants::pi;

    std::vector<double> shells;
    double total = 0.0;
    double err = 0.0;
    int quiet = 0;
    int m = 0;
    for (;; ++m) {
        if (m > tol.m_limit) {
            std::ostringstream msg;
            msg << "radiative m-sum did not converge by |m| = " << tol.m_limit << " for "
                << channel.label();
            throw NumericalError(msg.str(), shells.empty() ? 1.0 : shells.back() / total);
        }
        const auto res = quadrature::integrate([&](double t) { return shell(m, t); }, -half_pi,
                                               half_pi, opt);
        if (!res.converged) {
            std::ostringstream msg;
            msg << "radiative beta integral did not converge at m = " << m << " for "
                << channel.label();
            throw NumericalError(msg.str(), res.error / std::max(std::abs(res.value), scale));
        }
        shells.push_back(res.value);
        err += res.error;
        total += res.value;
        if (res.value < tol.shell_rel * total)
            ++quiet;
        else
            quiet = 0;
        if (quiet >= tol.shells_below)
            break;
    }
    const double sum = quadrature::pairwise_sum(shells);
    out.rate = pref * sum;
    out.m_max = m;
    out.achieved_rel = sum > 0.0 ? (err + shells.back()) / sum : 0.0;
    return out;
}

std::shared_ptr<const ModeCache::Entry> ModeCache::get(double omega, const FibreSpec& fibre)
{
    const std::array<double, 4> key{omega, fibre.a, fibre.n1, fibre.n2};
    {
        std::lock_guard lock(mutex_);
        if (auto it = entries_.find(key); it != entries_.end())
            return it->second;
    }
    auto entry = std::make_shared<Entry>();
    entry->modes = guided::solve_branches(omega, fibre, -1, &entry->diag);
    std::lock_guard lock(mutex_);
    return entries_.emplace(key, std::move(entry)).first->second;
}

RateBreakdown total_rates(const AtomData& data, const AtomicState& state, const Medium& medium,
                          const Geometry& where, const Tolerances& tol, ModeCache* cache)
{
    RateBreakdown out;
    out.upper = state;
    FibreSpec base{medium.a, medium.n1_fixed.value_or(medium.n2), medium.n2};
    if (!(base.a > 0.0))
        throw DomainError("fibre radius must be positive");
    check_geometry(where, base);

    for (auto& ch : list_lower_channels(data, state)) {
        ChannelRate cr;
        const auto resolved = medium.fibre_for(ch);
        cr.fibre = resolved.fibre;
        cr.n1_fallback = resolved.fallback;
        cr.gamma0 = vacuum_rate(ch);
        if (cache) {
            const auto entry = cache->get(ch.omega, cr.fibre);
            cr.guided = gamma_guided(ch, cr.fibre, where, &entry->modes);
            cr.guided.fundamental_unresolved = entry->diag.fundamental_unresolved;
        } else {
            cr.guided = gamma_guided(ch, cr.fibre, where);
        }
        cr.radiative = gamma_radiative(ch, cr.fibre, where, tol);
        cr.channel = std::move(ch);
        out.Gamma_0 += cr.gamma0;
        out.Gamma_g += cr.guided.rate;
        out.Gamma_r += cr.radiative.rate;
        out.per_channel.push_back(std::move(cr));
    }
    double err = 0.0;
    for (const auto& cr : out.per_channel)
        err += cr.radiative.achieved_rel * cr.radiative.rate;
    out.achieved_rel = out.Gamma_r > 0.0 ? err / out.Gamma_r : 0.0;
    const double tot = out.total();
    out.guided_fraction = tot > 0.0 ? out.Gamma_g / tot : 0.0;
    return out;
}

double decoherence_rate(const AtomData& data, const AtomicState& m_state,
                        const AtomicState& n_state, const Medium& medium, const Geometry& where,
                        const Tolerances& tol)
{
    const double gm = total_rates(data, m_state, medium, where, tol).total();
    if (m_state.n == n_state.n && m_state.l == n_state.l && m_state.j == n_state.j &&
        m_state.mj == n_state.mj)
        return gm;
    const double gn = total_rates(data, n_state, medium, where, tol).total();
    return 0.5 * (gm + gn);
}

} // namespace fibre_emit::rates
