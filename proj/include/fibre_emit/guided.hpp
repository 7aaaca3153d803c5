#pragma once

#include "fibre_emit/fibre.hpp"

#include <array>
#include <complex>
#include <string>
#include <vector>

namespace fibre_emit::guided {

using Vec3 = std::array<std::complex<double>, 3>;  // (e_r, e_phi, e_z)

enum class Branch { HE, EH, TE, TM };

std::string branch_name(Branch b);

struct GuidedMode {
    double omega = 0.0;
    int m = 0;
    Branch branch = Branch::HE;
    int radial_index = 1;  // counts roots of one family by ascending u
    double beta = 0.0;
    double u = 0.0;  // kappa a
    double w = 0.0;  // gamma a
    double s = 0.0;
    double one_minus_ms = 1.0;  // 1 - m s, evaluated without cancellation
    double one_plus_ms = 1.0;
    double norm_c = 0.0;  // |C|, 1/m
    double beta_prime = 0.0;
    bool beta_prime_one_sided = false;

    std::string name() const;  // "HE11", "TM01"
    double kappa(const FibreSpec& f) const { return u / f.a; }
    double gamma(const FibreSpec& f) const { return w / f.a; }
};

struct SolveDiagnostics {
    int scan_points = 0;
    int rejected_roots = 0;
    // HE11 sits closer to the light line than double precision resolves;
    // its coupling (of order w^2 ln^2 w) is dropped.
    bool fundamental_unresolved = false;
};

// Pole-free residual of the characteristic equation for hybrid orders, and
// the TE * TM factor product for m = 0. Zero exactly on a guided branch.
double char_residual(double omega, double beta, int m, const FibreSpec& fibre);

// |lhs - rhs| / (|lhs| + |rhs|) of the unscaled equation
// (n1^2 Jr + n2^2 Kr)(Jr + Kr) = (m beta / k)^2 (1/u^2 + 1/w^2)^2.
double char_residual_relative(double omega, double beta, int m, const FibreSpec& fibre);

// Relative residual of a solved mode, from its own (u, w); usable where
// beta rounds onto the light line.
double mode_residual(const GuidedMode& mode, const FibreSpec& fibre);

// Every bound branch for orders 0..m_max, normalised, with beta'.
// m_max < 0 scans orders until one has no root.
std::vector<GuidedMode> solve_branches(double omega, const FibreSpec& fibre, int m_max = -1,
                                       SolveDiagnostics* diag = nullptr);

double s_param(const GuidedMode& mode);

// Normalised profile at radius r for direction f and polarisation p.
Vec3 profile(const GuidedMode& mode, double r, const FibreSpec& fibre, int f, int p);

// 2 pi int n^2 |e|^2 r dr for amplitude C = 1, by adaptive quadrature.
double normalization_integral(const GuidedMode& mode, const FibreSpec& fibre);

// Sets and returns |C| from quadrature.
double normalize(GuidedMode& mode, const FibreSpec& fibre);

// |C| from the closed-form Bessel integrals, for comparison.
double normalization_closed_form(const GuidedMode& mode, const FibreSpec& fibre);

// d beta / d omega by central difference, relative step 1e-6, re-solving the
// branch at both offsets. Near cutoff falls back to a one-sided difference.
double beta_prime(GuidedMode& mode, const FibreSpec& fibre);

} // namespace fibre_emit::guided
