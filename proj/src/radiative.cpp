#include "fibre_emit/radiative.hpp"

#include "fibre_emit/constants.hpp"
#include "fibre_emit/errors.hpp"
#include "fibre_emit/specfun.hpp"

#include <cmath>

namespace fibre_emit::radiative {

namespace {

using constants::c;
using constants::epsilon0;
using constants::mu0;
using constants::pi;
using specfun::Triplet;

constexpr double kHuge = 1e120;

struct Wavenumbers {
    double kappa;
    double sigma;
};

Wavenumbers wavenumbers(double omega, double beta, const FibreSpec& fibre)
{
    const double k = omega / c;
    if (!(std::abs(beta) < fibre.n2 * k))
        throw DomainError("radiative beta must satisfy |beta| < k n2");
    const double b = beta / k;
    return {k * std::sqrt((fibre.n1 - b) * (fibre.n1 + b)),
            k * std::sqrt((fibre.n2 - b) * (fibre.n2 + b))};
}

} // namespace

CoeffChain coeff_chain(double omega, double beta, int m, const FibreSpec& fibre)
{
    const auto [kappa, sigma] = wavenumbers(omega, beta, fibre);
    const double a = fibre.a;
    const Triplet jk = specfun::bessel_j_triplet(m, kappa * a);
    const std::array<Triplet, 2> z = {specfun::bessel_j_triplet(m, sigma * a),
                                      specfun::bessel_y_triplet(m, sigma * a)};
    const double n1s = fibre.n1 * fibre.n1;
    const double n2s = fibre.n2 * fibre.n2;
    CoeffChain out;
    for (int j = 0; j < 2; ++j) {
        out.V[j] = omega * epsilon0 * m * beta * (n2s - n1s) * jk.value * z[j].value /
                   (a * kappa * kappa * sigma * sigma);
        out.M[j] = z[j].value * jk.prime() / kappa - z[j].prime() * jk.value / sigma;
        out.L[j] = epsilon0 * n1s * z[j].value * jk.prime() / kappa -
                   epsilon0 * n2s * z[j].prime() * jk.value / sigma;
    }
    return out;
}

RadiativeMode build_mode(double omega, double beta, int m, int p, const FibreSpec& fibre)
{
    if (p != 1 && p != -1)
        throw DomainError("polarisation index p must be +1 or -1");
    RadiativeMode mode;
    mode.omega = omega;
    mode.beta = beta;
    mode.m = m;
    mode.p = p;
    const auto [kappa, sigma] = wavenumbers(omega, beta, fibre);
    mode.kappa = kappa;
    mode.sigma = sigma;

    const Triplet y = specfun::bessel_y_triplet(m, sigma * fibre.a);
    if (!(std::abs(y.value) < kHuge) || !(std::abs(y.prime()) < kHuge)) {
        mode.negligible = true;
        return mode;
    }

    const CoeffChain ch = coeff_chain(omega, beta, m, fibre);
    const double n2s = fibre.n2 * fibre.n2;
    const double e2n = epsilon0 * epsilon0 * n2s;
    const double sl = ch.L[0] * ch.L[0] + ch.L[1] * ch.L[1];
    const double sv = ch.V[0] * ch.V[0] + ch.V[1] * ch.V[1];
    const double sm = ch.M[0] * ch.M[0] + ch.M[1] * ch.M[1];
    mode.eta = std::sqrt((sl / e2n + c * c * mu0 * mu0 * sv) / (sv / e2n + c * c * sm));

    const std::complex<double> i(0.0, 1.0);
    const std::complex<double> A = 1.0;
    const std::complex<double> B = i * static_cast<double>(p) * mode.eta * A;
    const double k1 = pi * fibre.a * sigma * sigma / (2.0 * epsilon0 * n2s);
    const double k2 = pi * fibre.a * sigma * sigma / 2.0;
    mode.A = A;
    mode.B = B;
    mode.C = -k1 * (A * ch.L[1] + i * B * ch.V[1]);
    mode.D = i * k2 * (A * mu0 * ch.V[1] + i * B * ch.M[1]);
    mode.E = k1 * (A * ch.L[0] + i * B * ch.V[0]);
    mode.F = -i * k2 * (A * mu0 * ch.V[0] + i * B * ch.M[0]);

    const double norm = delta_weight(mode, mode, fibre).real();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        mode.negligible = true;
        mode.A = mode.B = mode.C = mode.D = mode.E = mode.F = 0.0;
        return mode;
    }
    const double s = 1.0 / std::sqrt(norm);
    for (auto* x : {&mode.A, &mode.B, &mode.C, &mode.D, &mode.E, &mode.F})
        *x *= s;
    return mode;
}

std::complex<double> delta_weight(const RadiativeMode& x, const RadiativeMode& y,
                                  const FibreSpec& fibre)
{
    const double n2s = fibre.n2 * fibre.n2;
    const auto cj = [](std::complex<double> v) { return std::conj(v); };
    return 2.0 * pi * x.omega / (x.sigma * x.sigma) *
           (n2s * (x.C * cj(y.C) + x.E * cj(y.E)) + c * c * (x.D * cj(y.D) + x.F * cj(y.F)));
}

Vec3 profile(const RadiativeMode& mode, double r, const FibreSpec& fibre)
{
    if (!(r > 0.0))
        throw DomainError("radiative profile needs r > 0");
    if (mode.negligible)
        return {};
    const std::complex<double> i(0.0, 1.0);
    const double md = mode.m;
    const double beta = mode.beta;
    const double omega = mode.omega;
    if (r < fibre.a) {
        const double kappa = mode.kappa;
        const Triplet J = specfun::bessel_j_triplet(mode.m, kappa * r);
        const std::complex<double> er =
            (beta * mode.A * J.prime() + i * mode.B * omega * md / (r * kappa) * J.value) /
            (i * kappa);
        const std::complex<double> ep =
            (i * mode.A * md * beta / (kappa * r) * J.value - omega * mode.B * J.prime()) /
            (i * kappa);
        return {er, ep, mode.A * J.value};
    }
    const double sigma = mode.sigma;
    const Triplet J = specfun::bessel_j_triplet(mode.m, sigma * r);
    const Triplet Y = specfun::bessel_y_triplet(mode.m, sigma * r);
    const std::complex<double> ez = mode.C * J.value + mode.E * Y.value;
    const std::complex<double> bz = mode.D * J.value + mode.F * Y.value;
    const std::complex<double> ezp = mode.C * J.prime() + mode.E * Y.prime();
    const std::complex<double> bzp = mode.D * J.prime() + mode.F * Y.prime();
    const std::complex<double> er = (beta * ezp + i * omega * md / (r * sigma) * bz) / (i * sigma);
    const std::complex<double> ep = (i * md * beta / (sigma * r) * ez - omega * bzp) / (i * sigma);
    return {er, ep, ez};
}

} // namespace fibre_emit::radiative
