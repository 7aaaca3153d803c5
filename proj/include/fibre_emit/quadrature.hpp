#pragma once

#include <functional>
#include <span>

namespace fibre_emit::quadrature {

struct Options {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
    int max_panels = 4000;
};

struct Result {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
    int panels = 0;
    bool converged = false;
};

// Globally adaptive 7-point Gauss / 15-point Kronrod rule on [a, b].
// Panels are bisected by largest error estimate; the final value is a
// pairwise sum over panels in positional order, so the result does not
// depend on refinement history beyond the panel set itself.
Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& options = {});

// Same, but throws NumericalError when the tolerance is not reached.
Result integrate_or_throw(const std::function<double(double)>& f, double a, double b,
                          const Options& options = {});

// Pairwise (cascade) summation in index order.
double pairwise_sum(std::span<const double> values);

} // namespace fibre_emit::quadrature
