#include "fibre_emit/specfun.hpp"

#include "fibre_emit/constants.hpp"
#include "fibre_emit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

namespace fibre_emit::specfun {

namespace {

using constants::euler_gamma;
using constants::pi;

constexpr double kMaxArgument = 1e7;
constexpr double kRescale = 1e250;
constexpr double kNeumannLimit = 25.0;
constexpr double kKSeriesLimit = 2.0;

void require_finite(double x, const char* who)
{
    if (!std::isfinite(x))
        throw DomainError(std::string(who) + ": non-finite argument");
    if (std::abs(x) > kMaxArgument)
        throw DomainError(std::string(who) + ": argument too large");
}

void require_positive(double x, const char* who)
{
    require_finite(x, who);
    if (x <= 0.0)
        throw DomainError(std::string(who) + ": argument must be positive");
}

// J_0..J_N (N >= nmax) by backward recurrence. The start index sits far
// enough past the turning point that the minimal solution dominates.
std::vector<double> miller(double x, int nmax)
{
    if (x < 1e-5) {
        // Two series terms; the recurrence multiplier 2k/x would overflow.
        std::vector<double> f(static_cast<std::size_t>(nmax) + 2, 0.0);
        const double h = 0.5 * x;
        double lead = 1.0;
        for (int n = 0; n <= nmax + 1 && lead != 0.0; ++n) {
            f[n] = lead * (1.0 - h * h / (n + 1));
            lead *= h / (n + 1);
        }
        return f;
    }
    const double big = std::max<double>(nmax, x);
    int n_start = static_cast<int>(big + 40.0 + 12.0 * std::cbrt(big));
    if (n_start % 2 != 0)
        ++n_start;

    std::vector<double> f(static_cast<std::size_t>(n_start) + 2, 0.0);
    f[n_start] = 1.0;
    double even_sum = 0.0;
    const double two_over_x = 2.0 / x;
    for (int k = n_start; k >= 1; --k) {
        f[k - 1] = k * two_over_x * f[k] - f[k + 1];
        if (k % 2 == 0)
            even_sum += f[k];
        if (std::abs(f[k - 1]) > kRescale) {
            for (int i = k - 1; i <= n_start; ++i)
                f[i] /= kRescale;
            even_sum /= kRescale;
        }
    }
    const double norm = f[0] + 2.0 * even_sum;
    for (double& v : f)
        v /= norm;
    f.pop_back();
    return f;
}

void j_orders(double x, std::span<double> out)
{
    if (out.empty())
        return;
    if (x == 0.0) {
        std::fill(out.begin(), out.end(), 0.0);
        out[0] = 1.0;
        return;
    }
    const double ax = std::abs(x);
    const auto f = miller(ax, static_cast<int>(out.size()) - 1);
    for (std::size_t k = 0; k < out.size(); ++k) {
        const double sign = (x < 0.0 && k % 2 == 1) ? -1.0 : 1.0;
        out[k] = sign * f[k];
    }
}

// Hankel asymptotic P and Q for order nu.
void hankel_pq(int nu, double x, double& p, double& q)
{
    const double mu = 4.0 * nu * nu;
    p = 1.0;
    q = 0.0;
    double term = 1.0;
    double last = 1.0;
    for (int k = 1; k < 60; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= (mu - odd * odd) / (k * 8.0 * x);
        if (std::abs(term) > last)
            break;
        last = std::abs(term);
        const int phase = k % 4;
        if (phase == 1)
            q += term;
        else if (phase == 2)
            p -= term;
        else if (phase == 3)
            q -= term;
        else
            p += term;
        if (last < 1e-17)
            break;
    }
}

void y01(double x, double& y0, double& y1)
{
    if (x <= kNeumannLimit) {
        const auto j = miller(x, 2);
        const double lg = std::log(0.5 * x) + euler_gamma;
        double s0 = 0.0;
        double s1 = 0.0;
        const int kmax = static_cast<int>(j.size() - 2) / 2;
        for (int k = kmax; k >= 1; --k) {
            const double sign = (k % 2 == 0) ? 1.0 : -1.0;
            s0 += sign * j[2 * k] / k;
            s1 += sign * (j[2 * k - 1] - j[2 * k + 1]) / k;
        }
        y0 = (2.0 / pi) * lg * j[0] - (4.0 / pi) * s0;
        y1 = (2.0 / pi) * lg * j[1] - (2.0 / pi) * j[0] / x + (2.0 / pi) * s1;
        return;
    }
    const double amp = std::sqrt(2.0 / (pi * x));
    double p = 0.0;
    double q = 0.0;
    hankel_pq(0, x, p, q);
    double chi = x - 0.25 * pi;
    y0 = amp * (p * std::sin(chi) + q * std::cos(chi));
    hankel_pq(1, x, p, q);
    chi = x - 0.75 * pi;
    y1 = amp * (p * std::sin(chi) + q * std::cos(chi));
}

// K_0, K_1 times exp(x) when scaled.
void k01(double x, bool scaled, double& k0, double& k1)
{
    if (x <= kKSeriesLimit) {
        const double q = 0.25 * x * x;
        const double lg = std::log(0.5 * x);
        double i0 = 0.0;
        double i1 = 0.0;
        double s0 = 0.0;
        double s1 = 0.0;
        double t0 = 1.0;  // q^k / (k!)^2
        double t1 = 1.0;  // q^k / (k! (k+1)!)
        double harmonic = 0.0;
        for (int k = 0; k < 60; ++k) {
            if (k > 0) {
                t0 *= q / (static_cast<double>(k) * k);
                t1 *= q / (static_cast<double>(k) * (k + 1));
                harmonic += 1.0 / k;
            }
            const double psi1 = -euler_gamma + harmonic;
            const double psi2 = psi1 + 1.0 / (k + 1);
            i0 += t0;
            i1 += t1;
            s0 += harmonic * t0;
            s1 += (psi1 + psi2) * t1;
            if (t0 < 1e-18 * i0 && k > 2)
                break;
        }
        i1 *= 0.5 * x;
        k0 = -(lg + euler_gamma) * i0 + s0;
        k1 = 1.0 / x + lg * i1 - 0.25 * x * s1;
        if (scaled) {
            const double ex = std::exp(x);
            k0 *= ex;
            k1 *= ex;
        }
        return;
    }
    // Steed's method on the continued fraction for K_1/K_0.
    constexpr double eps = 1e-16;
    const double a1 = 0.25;
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d;
    double delh = d;
    double q1 = 0.0;
    double q2 = 1.0;
    double qsum = a1;
    double c = a1;
    double a = -a1;
    double s = 1.0 + qsum * delh;
    for (int i = 2; i < 100000; ++i) {
        a -= 2.0 * (i - 1);
        c = -a * c / i;
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        qsum += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = qsum * delh;
        s += dels;
        if (std::abs(dels / s) < eps)
            break;
    }
    h *= a1;
    k0 = std::sqrt(pi / (2.0 * x)) / s;
    if (!scaled)
        k0 *= std::exp(-x);
    k1 = k0 * (x + 0.5 - h) / x;
}

double reflect_sign(int m) { return (std::abs(m) % 2 == 0) ? 1.0 : -1.0; }

} // namespace

void bessel_j_seq(double x, std::span<double> out)
{
    require_finite(x, "bessel_j");
    j_orders(x, out);
}

void bessel_y_seq(double x, std::span<double> out)
{
    require_positive(x, "bessel_y");
    if (out.empty())
        return;
    double y0 = 0.0;
    double y1 = 0.0;
    y01(x, y0, y1);
    out[0] = y0;
    if (out.size() > 1)
        out[1] = y1;
    const double two_over_x = 2.0 / x;
    for (std::size_t k = 1; k + 1 < out.size(); ++k)
        out[k + 1] = k * two_over_x * out[k] - out[k - 1];
}

void bessel_k_seq(double x, std::span<double> out, bool scaled)
{
    require_positive(x, "bessel_k");
    if (out.empty())
        return;
    double k0 = 0.0;
    double k1 = 0.0;
    k01(x, scaled, k0, k1);
    out[0] = k0;
    if (out.size() > 1)
        out[1] = k1;
    const double two_over_x = 2.0 / x;
    for (std::size_t k = 1; k + 1 < out.size(); ++k)
        out[k + 1] = out[k - 1] + k * two_over_x * out[k];
}

namespace {

// f_{m-1}, f_m, f_{m+1} from orders 0..|m|+1, reflecting negative orders
// with f_-n = (-1)^n f_n when odd_reflection is set (J, Y), f_-n = f_n (K).
template <class Seq>
Triplet triplet(int m, double x, bool odd_reflection, Seq seq)
{
    std::vector<double> v(static_cast<std::size_t>(std::abs(m)) + 2);
    seq(x, std::span<double>(v));
    auto order = [&](int n) {
        const double f = v[static_cast<std::size_t>(std::abs(n))];
        return (n < 0 && odd_reflection && (-n) % 2 == 1) ? -f : f;
    };
    return {order(m - 1), order(m), order(m + 1)};
}

} // namespace

Triplet bessel_j_triplet(int m, double x)
{
    return triplet(m, x, true, [](double xx, std::span<double> o) { bessel_j_seq(xx, o); });
}

Triplet bessel_y_triplet(int m, double x)
{
    return triplet(m, x, true, [](double xx, std::span<double> o) { bessel_y_seq(xx, o); });
}

Triplet bessel_k_triplet(int m, double x, bool scaled)
{
    return triplet(m, x, false,
                   [scaled](double xx, std::span<double> o) { bessel_k_seq(xx, o, scaled); });
}

double bessel_j(int m, double x)
{
    const int am = std::abs(m);
    std::vector<double> v(static_cast<std::size_t>(am) + 1);
    bessel_j_seq(x, v);
    return m < 0 ? reflect_sign(m) * v[am] : v[am];
}

double bessel_y(int m, double x)
{
    const int am = std::abs(m);
    std::vector<double> v(static_cast<std::size_t>(am) + 1);
    bessel_y_seq(x, v);
    return m < 0 ? reflect_sign(m) * v[am] : v[am];
}

double bessel_k(int m, double x)
{
    const int am = std::abs(m);
    std::vector<double> v(static_cast<std::size_t>(am) + 1);
    bessel_k_seq(x, v, false);
    return v[am];
}

double bessel_k_scaled(int m, double x)
{
    const int am = std::abs(m);
    std::vector<double> v(static_cast<std::size_t>(am) + 1);
    bessel_k_seq(x, v, true);
    return v[am];
}

double bessel_j_prime(int m, double x) { return bessel_j_triplet(m, x).prime(); }
double bessel_y_prime(int m, double x) { return bessel_y_triplet(m, x).prime(); }
double bessel_k_prime(int m, double x) { return k_prime(bessel_k_triplet(m, x)); }

} // namespace fibre_emit::specfun
