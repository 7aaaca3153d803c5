#pragma once

#include <span>

// Bessel functions of integer order and real argument.
//
// J_m  Miller backward recurrence normalised by J_0 + 2 sum J_2k = 1.
// Y_m  Neumann series (x <= 25) or Hankel asymptotics for Y_0, Y_1,
//      then upward recurrence.
// K_m  ascending series (x <= 2) or Steed's continued fraction for
//      K_0, K_1, then upward recurrence.
//
// Negative orders use J_-m = (-1)^m J_m, Y_-m = (-1)^m Y_m, K_-m = K_m.

namespace fibre_emit::specfun {

double bessel_j(int m, double x);
double bessel_y(int m, double x);
double bessel_k(int m, double x);

// exp(x) K_m(x); stays finite where K_m underflows.
double bessel_k_scaled(int m, double x);

double bessel_j_prime(int m, double x);
double bessel_y_prime(int m, double x);
double bessel_k_prime(int m, double x);

// Orders 0..out.size()-1 in one pass.
void bessel_j_seq(double x, std::span<double> out);
void bessel_y_seq(double x, std::span<double> out);
void bessel_k_seq(double x, std::span<double> out, bool scaled = false);

// f_{m-1}, f_m, f_{m+1} for one order, negative m allowed.
struct Triplet {
    double lower;
    double value;
    double upper;

    // Derivative for J and Y; use k_prime for K.
    double prime() const { return 0.5 * (lower - upper); }
};

Triplet bessel_j_triplet(int m, double x);
Triplet bessel_y_triplet(int m, double x);
Triplet bessel_k_triplet(int m, double x, bool scaled = false);

inline double k_prime(const Triplet& k) { return -0.5 * (k.lower + k.upper); }

} // namespace fibre_emit::specfun
