#include "fibre_emit/guided.hpp"

#include "fibre_emit/constants.hpp"
#include "fibre_emit/errors.hpp"
#include "fibre_emit/quadrature.hpp"
#include "fibre_emit/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

namespace fibre_emit::guided {

namespace {

using specfun::bessel_j_triplet;
using specfun::bessel_k_triplet;
using specfun::Triplet;

// Below this w the fundamental mode is treated as unresolved.
constexpr double kMinW = 1e-60;
// For m >= 2 the equation degenerates as w -> 0 (both sides ~ m^2/w^4), so
// near-zero roots there are cutoff artefacts rather than bound branches.
constexpr double kMinWHigher = 1e-8;
constexpr int kLinearScan = 12000;
constexpr int kLogPerDecade = 8;
constexpr double kLogTop = 1e-3;
constexpr double kRelStep = 1e-6;
constexpr int kDefaultMaxOrder = 60;
constexpr double kQuadTol = 1e-12;

enum class Family { Hybrid, TE, TM };

struct Params {
    double v;
    double ka;
    double n1;
    double n2;
    int m;
    Family family;
};

struct UW {
    double u;
    double w;
};

UW from_t(double t, double v)
{
    return {v * std::sqrt((1.0 - t) * (1.0 + t)), v * t};
}

double hybrid_residual(double u, double w, int m, double n1, double n2, double ka)
{
    const Triplet J = bessel_j_triplet(m, u);
    const Triplet K = bessel_k_triplet(m, w, true);
    const double kh = K.lower / (w * K.value);
    const double p = u * J.value;
    const double px = J.lower - p * kh;
    const double w2s = 1.0 + (w / u) * (w / u);
    const double w2 = w * w;
    const double delta = n1 * n1 - n2 * n2;
    const double md = static_cast<double>(m);
    return n2 * n2 * px * (w2 * px - 2.0 * md * w2s * p) +
           delta * (w2 * px - md * w2s * p) * J.prime() -
           md * md * w2s * w2s * p * p / (ka * ka);
}

double te_factor(double u, double w)
{
    const Triplet J = bessel_j_triplet(0, u);
    const Triplet K = bessel_k_triplet(0, w, true);
    return w * J.upper * K.value + u * J.value * K.upper;
}

double tm_factor(double u, double w, double n1, double n2)
{
    const Triplet J = bessel_j_triplet(0, u);
    const Triplet K = bessel_k_triplet(0, w, true);
    return n1 * n1 * w * J.upper * K.value + n2 * n2 * u * J.value * K.upper;
}

double residual_t(double t, const Params& p)
{
    const UW x = from_t(t, p.v);
    switch (p.family) {
    case Family::TE: return te_factor(x.u, x.w);
    case Family::TM: return tm_factor(x.u, x.w, p.n1, p.n2);
    case Family::Hybrid: break;
    }
    return hybrid_residual(x.u, x.w, p.m, p.n1, p.n2, p.ka);
}

double bisect(double lo, double hi, double flo, const Params& p)
{
    double fhi = residual_t(hi, p);
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        const double fm = residual_t(mid, p);
        if (fm == 0.0)
            return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    return std::abs(flo) <= std::abs(fhi) ? lo : hi;
}

const std::vector<double>& scan_grid(double t_lo)
{
    // Cached per lower limit; the limit depends only on V through kMinW.
    thread_local double cached_lo = -1.0;
    thread_local std::vector<double> grid;
    if (cached_lo == t_lo)
        return grid;
    grid.clear();
    if (t_lo < kLogTop) {
        const double decades = std::log10(kLogTop / t_lo);
        const int n = std::max(2, static_cast<int>(decades * kLogPerDecade));
        for (int i = 0; i < n; ++i)
            grid.push_back(t_lo * std::pow(10.0, decades * i / n));
    }
    const double lin_lo = std::max(t_lo, kLogTop);
    const double lin_hi = 1.0 - 1e-12;
    for (int i = 0; i <= kLinearScan; ++i)
        grid.push_back(lin_lo + (lin_hi - lin_lo) * i / kLinearScan);
    cached_lo = t_lo;
    return grid;
}

std::vector<double> find_roots(const Params& p, int* scanned)
{
    const double t_lo = std::min(0.5 * kLogTop, kMinW / p.v);
    const auto& grid = scan_grid(t_lo);
    if (scanned)
        *scanned += static_cast<int>(grid.size());
    std::vector<double> roots;
    double prev_t = grid.front();
    double prev_f = residual_t(prev_t, p);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double t = grid[i];
        const double f = residual_t(t, p);
        if (prev_f == 0.0) {
            roots.push_back(prev_t);
        } else if ((f < 0.0) != (prev_f < 0.0) && f != 0.0) {
            roots.push_back(bisect(prev_t, t, prev_f, p));
        }
        prev_t = t;
        prev_f = f;
    }
    return roots;
}

Family family_of(const GuidedMode& mode)
{
    if (mode.branch == Branch::TE)
        return Family::TE;
    if (mode.branch == Branch::TM)
        return Family::TM;
    return Family::Hybrid;
}

Params params_for(double omega, const FibreSpec& fibre, int m, Family fam)
{
    const double ka = omega / constants::c * fibre.a;
    return {ka * std::sqrt(fibre.n1 * fibre.n1 - fibre.n2 * fibre.n2), ka, fibre.n1, fibre.n2, m,
            fam};
}

// beta - n2 k computed without cancellation.
double beta_excess(double omega, double w, const FibreSpec& fibre)
{
    const double k = omega / constants::c;
    const double g = w / fibre.a;
    const double beta = std::sqrt(fibre.n2 * fibre.n2 * k * k + g * g);
    return g * g / (beta + fibre.n2 * k);
}

void fill_mode(GuidedMode& mode, const FibreSpec& fibre)
{
    const double k = mode.omega / constants::c;
    mode.beta = std::sqrt(fibre.n2 * fibre.n2 * k * k + (mode.w / fibre.a) * (mode.w / fibre.a));
    if (mode.m == 0) {
        mode.s = 0.0;
        mode.one_minus_ms = 1.0;
        mode.one_plus_ms = 1.0;
        return;
    }
    const double u = mode.u;
    const double w = mode.w;
    const int m = mode.m;
    const Triplet J = bessel_j_triplet(m, u);
    const Triplet K = bessel_k_triplet(m, w, true);
    const double kh = K.lower / (w * K.value);
    const double p = u * J.value;
    const double px = J.lower - p * kh;
    const double w2s = 1.0 + (w / u) * (w / u);
    const double num = w * w * px;
    const double den = num - m * w2s * p;
    mode.one_plus_ms = num / den;
    mode.one_minus_ms = (num - 2.0 * m * w2s * p) / den;
    mode.s = (mode.one_plus_ms - 1.0) / m;
}

// Radial profile for C = 1.
Vec3 raw_profile(const GuidedMode& mode, double r, const FibreSpec& fibre, int f, int p)
{
    const std::complex<double> i(0.0, 1.0);
    const double a = fibre.a;
    const double kappa = mode.u / a;
    const double gam = mode.w / a;
    const double beta = mode.beta;
    const int m = mode.m;
    const double sf = static_cast<double>(f);
    const double sp = static_cast<double>(p);

    if (mode.branch == Branch::TE) {
        const double k1w = specfun::bessel_k(1, mode.w);
        if (r < a) {
            const double ratio = k1w / specfun::bessel_j(1, mode.u);
            return {0.0, ratio * specfun::bessel_j(1, kappa * r), 0.0};
        }
        return {0.0, specfun::bessel_k(1, gam * r), 0.0};
    }

    const double am = mode.one_minus_ms;
    const double ap = mode.one_plus_ms;
    if (r < a) {
        const double pre = specfun::bessel_k(m, mode.w) / specfun::bessel_j(m, mode.u);
        const Triplet J = bessel_j_triplet(m, kappa * r);
        const double c = beta / (2.0 * kappa) * pre;
        const std::complex<double> er = sf * c / i * (J.lower * am - J.upper * ap);
        const double ep = sf * sp * c * (J.lower * am + J.upper * ap);
        return {er, ep, pre * J.value};
    }
    const Triplet K = bessel_k_triplet(m, gam * r);
    const double c = beta / (2.0 * gam);
    const std::complex<double> er = sf * c / i * (K.lower * am + K.upper * ap);
    const double ep = sf * sp * c * (K.lower * am - K.upper * ap);
    return {er, ep, K.value};
}

double norm2(const Vec3& e)
{
    return std::norm(e[0]) + std::norm(e[1]) + std::norm(e[2]);
}

std::optional<double> resolve_w(const GuidedMode& mode, double omega, const FibreSpec& fibre)
{
    const Params p = params_for(omega, fibre, mode.m, family_of(mode));
    const double t0 = mode.w / params_for(mode.omega, fibre, mode.m, family_of(mode)).v;
    for (double h = 1e-7; h < 0.5; h *= 4.0) {
        const double lo = t0 * (1.0 - h);
        const double hi = std::min(t0 * (1.0 + h), 1.0 - 1e-15);
        const double flo = residual_t(lo, p);
        const double fhi = residual_t(hi, p);
        if ((flo < 0.0) != (fhi < 0.0)) {
            const double t = bisect(lo, hi, flo, p);
            if (t * p.v < (mode.m >= 2 ? kMinWHigher : kMinW))
                return std::nullopt;
            return t * p.v;
        }
    }
    return std::nullopt;
}

// |lhs - rhs| / (|lhs| + |rhs|) in terms of (u, w); m = 0 reports the
// better-satisfied of the TE and TM factors.
double relative_residual(double u_in, double w_in, int m, double n1, double n2, double ka)
{
    const long double u = u_in;
    const long double w = w_in;
    const Triplet J = bessel_j_triplet(m, u_in);
    const Triplet K = bessel_k_triplet(m, w_in, true);
    const long double jr = J.prime() / (u * J.value);
    const long double kr = specfun::k_prime(K) / (w * K.value);
    const long double n1s = static_cast<long double>(n1) * n1;
    const long double n2s = static_cast<long double>(n2) * n2;
    if (m == 0) {
        const long double te = std::abs(jr + kr) / (std::abs(jr) + std::abs(kr));
        const long double tm =
            std::abs(n1s * jr + n2s * kr) / (n1s * std::abs(jr) + n2s * std::abs(kr));
        return static_cast<double>(std::min(te, tm));
    }
    // (beta / k)^2 = n2^2 + (w / ka)^2
    const long double bk2 = n2s + (w / ka) * (w / ka);
    const long double S = 1.0L / (u * u) + 1.0L / (w * w);
    const long double lhs = (n1s * jr + n2s * kr) * (jr + kr);
    const long double rhs = static_cast<long double>(m) * m * bk2 * S * S;
    return static_cast<double>(std::abs(lhs - rhs) / (std::abs(lhs) + std::abs(rhs)));
}

} // namespace

std::string branch_name(Branch b)
{
    switch (b) {
    case Branch::HE: return "HE";
    case Branch::EH: return "EH";
    case Branch::TE: return "TE";
    case Branch::TM: return "TM";
    }
    return "?";
}

std::string GuidedMode::name() const
{
    return branch_name(branch) + std::to_string(m) + std::to_string(radial_index);
}

double char_residual(double omega, double beta, int m, const FibreSpec& fibre)
{
    const double k = omega / constants::c;
    if (!(beta > fibre.n2 * k && beta < fibre.n1 * k))
        throw DomainError("beta outside the bound-mode interval (k n2, k n1)");
    const double a = fibre.a;
    const double u = a * std::sqrt(fibre.n1 * fibre.n1 * k * k - beta * beta);
    const double w = a * std::sqrt(beta * beta - fibre.n2 * fibre.n2 * k * k);
    if (m == 0)
        return te_factor(u, w) * tm_factor(u, w, fibre.n1, fibre.n2);
    return hybrid_residual(u, w, std::abs(m), fibre.n1, fibre.n2, k * a);
}

double char_residual_relative(double omega, double beta, int m, const FibreSpec& fibre)
{
    const double k = omega / constants::c;
    if (!(beta > fibre.n2 * k && beta < fibre.n1 * k))
        throw DomainError("beta outside the bound-mode interval (k n2, k n1)");
    const double a = fibre.a;
    const double u = a * std::sqrt(fibre.n1 * fibre.n1 * k * k - beta * beta);
    const double w = a * std::sqrt(beta * beta - fibre.n2 * fibre.n2 * k * k);
    return relative_residual(u, w, m, fibre.n1, fibre.n2, k * a);
}

double mode_residual(const GuidedMode& mode, const FibreSpec& fibre)
{
    const double ka = mode.omega / constants::c * fibre.a;
    return relative_residual(mode.u, mode.w, mode.m, fibre.n1, fibre.n2, ka);
}

std::vector<GuidedMode> solve_branches(double omega, const FibreSpec& fibre, int m_max,
                                       SolveDiagnostics* diag)
{
    fibre.validate();
    if (!(omega > 0.0))
        throw DomainError("frequency must be positive");
    SolveDiagnostics local;
    SolveDiagnostics& d = diag ? *diag : local;
    d = {};
    std::vector<GuidedMode> modes;
    if (fibre.n1 == fibre.n2)
        return modes;

    const int limit = m_max < 0 ? kDefaultMaxOrder : m_max;
    for (int m = 0; m <= limit; ++m) {
        int found = 0;
        const std::vector<Family> fams =
            m == 0 ? std::vector<Family>{Family::TE, Family::TM} : std::vector<Family>{Family::Hybrid};
        for (Family fam : fams) {
            const Params p = params_for(omega, fibre, m, fam);
            auto roots = find_roots(p, &d.scan_points);
            std::vector<GuidedMode> fam_modes;
            for (double t : roots) {
                GuidedMode gm;
                gm.omega = omega;
                gm.m = m;
                const UW x = from_t(t, p.v);
                gm.u = x.u;
                gm.w = x.w;
                if (gm.w < (m >= 2 ? kMinWHigher : kMinW)) {
                    ++d.rejected_roots;
                    continue;
                }
                fill_mode(gm, fibre);
                if (relative_residual(gm.u, gm.w, m, fibre.n1, fibre.n2, p.ka) > 1e-8) {
                    ++d.rejected_roots;
                    continue;
                }
                if (fam == Family::TE) {
                    gm.branch = Branch::TE;
                } else if (fam == Family::TM) {
                    gm.branch = Branch::TM;
                } else {
                    const Triplet J = bessel_j_triplet(m, gm.u);
                    const Triplet K = bessel_k_triplet(m, gm.w, true);
                    const double c = (fibre.n1 * fibre.n1 + fibre.n2 * fibre.n2) /
                                     (2.0 * fibre.n1 * fibre.n1);
                    const double pj = gm.u * J.value;
                    // (u J_m)^2 (Jr + c Kr), sign-preserving and pole-free.
                    const double zeta =
                        pj * J.prime() + c * pj * pj * specfun::k_prime(K) / (gm.w * K.value);
                    gm.branch = zeta < 0.0 ? Branch::HE : Branch::EH;
                }
                fam_modes.push_back(gm);
            }
            std::sort(fam_modes.begin(), fam_modes.end(),
                      [](const GuidedMode& l, const GuidedMode& r) { return l.u < r.u; });
            int he = 0;
            int eh = 0;
            int single = 0;
            for (auto& gm : fam_modes) {
                if (gm.branch == Branch::HE)
                    gm.radial_index = ++he;
                else if (gm.branch == Branch::EH)
                    gm.radial_index = ++eh;
                else
                    gm.radial_index = ++single;
                modes.push_back(gm);
                ++found;
            }
        }
        if (m == 1 && found == 0)
            d.fundamental_unresolved = true;
        if (found == 0 && m >= 2 && m_max < 0)
            break;
    }

    for (auto& gm : modes) {
        normalize(gm, fibre);
        beta_prime(gm, fibre);
    }
    return modes;
}

double s_param(const GuidedMode& mode) { return mode.s; }

Vec3 profile(const GuidedMode& mode, double r, const FibreSpec& fibre, int f, int p)
{
    if (r < 0.0)
        throw DomainError("radius must be nonnegative");
    Vec3 e = raw_profile(mode, r, fibre, f, p);
    for (auto& c : e)
        c *= mode.norm_c;
    return e;
}

double normalization_integral(const GuidedMode& mode, const FibreSpec& fibre)
{
    const double a = fibre.a;
    const double w = mode.w;
    const double gam = w / a;
    quadrature::Options opt;
    opt.rel_tol = kQuadTol;

    const auto inner = quadrature::integrate_or_throw(
        [&](double rho) { return norm2(raw_profile(mode, a * rho, fibre, 1, 1)) * rho; }, 0.0,
        1.0, opt);

    double outer = 0.0;
    const double x_mid = std::max(w, 1.0);
    if (w < 1.0) {
        outer += quadrature::integrate_or_throw(
                     [&](double s) {
                         const double x = std::exp(s);
                         return norm2(raw_profile(mode, x / gam, fibre, 1, 1)) * x * x;
                     },
                     std::log(w), 0.0, opt)
                     .value;
    }
    outer += quadrature::integrate_or_throw(
                 [&](double x) { return norm2(raw_profile(mode, x / gam, fibre, 1, 1)) * x; },
                 x_mid, x_mid + 50.0, opt)
                 .value;
    outer /= w * w;

    return 2.0 * constants::pi * a * a *
           (fibre.n1 * fibre.n1 * inner.value + fibre.n2 * fibre.n2 * outer);
}

double normalize(GuidedMode& mode, const FibreSpec& fibre)
{
    const double integral = normalization_integral(mode, fibre);
    if (!(integral > 0.0) || !std::isfinite(integral))
        throw NumericalError("guided normalisation integral not finite for " + mode.name());
    mode.norm_c = 1.0 / std::sqrt(integral);
    return mode.norm_c;
}

double normalization_closed_form(const GuidedMode& mode, const FibreSpec& fibre)
{
    const double a = fibre.a;
    const double u = mode.u;
    const double w = mode.w;
    const double n1s = fibre.n1 * fibre.n1;
    const double n2s = fibre.n2 * fibre.n2;
    // a^2/2 (f_v^2 - f_{v-1} f_{v+1}) for J and a^2/2 (K_{v-1} K_{v+1} - K_v^2).
    auto jint = [&](int v) {
        const Triplet J = bessel_j_triplet(v, u);
        return J.value * J.value - J.lower * J.upper;
    };
    auto kint = [&](int v) {
        const Triplet K = bessel_k_triplet(v, w);
        return K.lower * K.upper - K.value * K.value;
    };
    if (mode.branch == Branch::TE) {
        const double ratio = specfun::bessel_k(1, w) / specfun::bessel_j(1, u);
        const double integral =
            2.0 * constants::pi * 0.5 * a * a * (n1s * ratio * ratio * jint(1) + n2s * kint(1));
        return 1.0 / std::sqrt(integral);
    }
    const int m = mode.m;
    const double kappa = u / a;
    const double gam = w / a;
    const double beta = mode.beta;
    const double am = mode.one_minus_ms;
    const double ap = mode.one_plus_ms;
    const double jm = specfun::bessel_j(m, u);
    const double km = specfun::bessel_k(m, w);
    const double a1 = 1.0 / (kappa * jm * kappa * jm) *
                      (am * am * jint(m - 1) + ap * ap * jint(m + 1) +
                       2.0 * (kappa * kappa) / (beta * beta) * jint(m));
    const double a2 = 1.0 / (gam * km * gam * km) *
                      (am * am * kint(m - 1) + ap * ap * kint(m + 1) +
                       2.0 * (gam * gam) / (beta * beta) * kint(m));
    return 2.0 / (a * beta * km * std::sqrt(2.0 * constants::pi * (n1s * a1 + n2s * a2)));
}

double beta_prime(GuidedMode& mode, const FibreSpec& fibre)
{
    const double dw = kRelStep * mode.omega;
    const auto wp = resolve_w(mode, mode.omega + dw, fibre);
    const auto wm = resolve_w(mode, mode.omega - dw, fibre);
    const double n2c = fibre.n2 / constants::c;
    if (wp && wm) {
        const double ex = beta_excess(mode.omega + dw, *wp, fibre) -
                          beta_excess(mode.omega - dw, *wm, fibre);
        mode.beta_prime = n2c + ex / (2.0 * dw);
        mode.beta_prime_one_sided = false;
    } else if (wp) {
        const double ex =
            beta_excess(mode.omega + dw, *wp, fibre) - beta_excess(mode.omega, mode.w, fibre);
        mode.beta_prime = n2c + ex / dw;
        mode.beta_prime_one_sided = true;
    } else if (wm) {
        const double ex =
            beta_excess(mode.omega, mode.w, fibre) - beta_excess(mode.omega - dw, *wm, fibre);
        mode.beta_prime = n2c + ex / dw;
        mode.beta_prime_one_sided = true;
    } else {
        std::ostringstream msg;
        msg << "branch " << mode.name() << " lost on both sides of omega=" << mode.omega;
        throw NumericalError(msg.str());
    }
    return mode.beta_prime;
}

} // namespace fibre_emit::guided
