#pragma once

// CODATA 2018, SI units.
namespace fibre_emit::constants {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double c = 299792458.0;
inline constexpr double hbar = 1.054571817e-34;
inline constexpr double epsilon0 = 8.8541878128e-12;
inline constexpr double mu0 = 1.25663706212e-6;
inline constexpr double e = 1.602176634e-19;
inline constexpr double a0 = 5.29177210903e-11;
inline constexpr double euler_gamma = 0.57721566490153286061;

// Wavenumber in cm^-1 to angular frequency in rad/s.
inline constexpr double wavenumber_to_omega = 2.0 * pi * c * 100.0;

} // namespace fibre_emit::constants
