#pragma once

#include "fibre_emit/fibre.hpp"
#include "fibre_emit/guided.hpp"

#include <array>
#include <complex>

namespace fibre_emit::radiative {

using Vec3 = guided::Vec3;

// Index 0 pairs with J_m(sigma a), index 1 with Y_m(sigma a).
struct CoeffChain {
    std::array<double, 2> V{};
    std::array<double, 2> M{};
    std::array<double, 2> L{};
};

struct RadiativeMode {
    double omega = 0.0;
    double beta = 0.0;
    int m = 0;
    int p = 1;
    double kappa = 0.0;
    double sigma = 0.0;
    double eta = 0.0;
    std::complex<double> A, B, C, D, E, F;
    // Y_m(sigma a) beyond double range: the mode carries no field near the
    // fibre and all amplitudes are zero.
    bool negligible = false;
};

CoeffChain coeff_chain(double omega, double beta, int m, const FibreSpec& fibre);

// Normalised mode with A real positive and B = i p eta A.
RadiativeMode build_mode(double omega, double beta, int m, int p, const FibreSpec& fibre);

Vec3 profile(const RadiativeMode& mode, double r, const FibreSpec& fibre);

// (2 pi omega / sigma^2) [n2^2 (C1 C2* + E1 E2*) + c^2 (D1 D2* + F1 F2*)]:
// the delta-function weight of the inner product of two modes at equal
// (omega, beta, m). Equals 1 for a mode with itself, 0 across p.
std::complex<double> delta_weight(const RadiativeMode& x, const RadiativeMode& y,
                                  const FibreSpec& fibre);

} // namespace fibre_emit::radiative
