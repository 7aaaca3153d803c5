#include "fibre_emit/quadrature.hpp"

#include "fibre_emit/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

namespace fibre_emit::quadrature {

namespace {

// QUADPACK qk15 abscissae and weights.
constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a;
    double b;
    double value;
    double error;
};

struct ByError {
    bool operator()(const Panel& l, const Panel& r) const
    {
        if (l.error != r.error)
            return l.error < r.error;
        return l.a > r.a;
    }
};

Panel kronrod15(const std::function<double(double)>& f, double a, double b)
{
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(centre);
    double result_k = fc * wgk[7];
    double result_g = fc * wg[3];
    double result_abs = std::abs(result_k);
    std::array<double, 7> f1{};
    std::array<double, 7> f2{};
    for (int j = 0; j < 7; ++j) {
        const double dx = half * xgk[j];
        f1[j] = f(centre - dx);
        f2[j] = f(centre + dx);
        const double pair = f1[j] + f2[j];
        result_k += wgk[j] * pair;
        result_abs += wgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
        if (j % 2 == 1)
            result_g += wg[j / 2] * pair;
    }
    const double mean = 0.5 * result_k;
    double result_asc = wgk[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j)
        result_asc += wgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

    const double value = result_k * half;
    result_abs *= std::abs(half);
    result_asc *= std::abs(half);
    double error = std::abs((result_k - result_g) * half);
    if (result_asc != 0.0 && error != 0.0)
        error = result_asc * std::min(1.0, std::pow(200.0 * error / result_asc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (result_abs > std::numeric_limits<double>::min() / (50.0 * eps))
        error = std::max(error, 50.0 * eps * result_abs);
    if (!std::isfinite(value))
        error = std::numeric_limits<double>::infinity();
    return {a, b, value, error};
}

} // namespace

double pairwise_sum(std::span<const double> values)
{
    if (values.empty())
        return 0.0;
    if (values.size() <= 8) {
        double s = 0.0;
        for (double v : values)
            s += v;
        return s;
    }
    const std::size_t mid = values.size() / 2;
    return pairwise_sum(values.first(mid)) + pairwise_sum(values.subspan(mid));
}

Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& options)
{
    Result out;
    if (a == b)
        return {0.0, 0.0, 0, 0, true};

    std::priority_queue<Panel, std::vector<Panel>, ByError> queue;
    queue.push(kronrod15(f, a, b));
    out.evaluations = 15;
    double total = queue.top().value;
    double total_error = queue.top().error;

    auto done = [&] {
        return total_error <= std::max(options.abs_tol, options.rel_tol * std::abs(total));
    };

    while (!done() && static_cast<int>(queue.size()) < options.max_panels) {
        const Panel worst = queue.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= std::min(worst.a, worst.b) || mid >= std::max(worst.a, worst.b))
            break;
        queue.pop();
        const Panel left = kronrod15(f, worst.a, mid);
        const Panel right = kronrod15(f, mid, worst.b);
        out.evaluations += 30;
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        queue.push(left);
        queue.push(right);
    }

    std::vector<Panel> panels;
    panels.reserve(queue.size());
    while (!queue.empty()) {
        panels.push_back(queue.top());
        queue.pop();
    }
    std::sort(panels.begin(), panels.end(),
              [](const Panel& l, const Panel& r) { return l.a < r.a; });
    std::vector<double> values(panels.size());
    std::vector<double> errors(panels.size());
    for (std::size_t i = 0; i < panels.size(); ++i) {
        values[i] = panels[i].value;
        errors[i] = panels[i].error;
    }
    out.value = pairwise_sum(values);
    out.error = pairwise_sum(errors);
    out.panels = static_cast<int>(panels.size());
    out.converged =
        std::isfinite(out.value) &&
        out.error <= std::max(options.abs_tol, options.rel_tol * std::abs(out.value));
    return out;
}

Result integrate_or_throw(const std::function<double(double)>& f, double a, double b,
                          const Options& options)
{
    Result r = integrate(f, a, b, options);
    if (!r.converged) {
        const double achieved = r.value != 0.0 ? r.error / std::abs(r.value) : r.error;
        std::ostringstream msg;
        msg << "quadrature on [" << a << ", " << b << "] did not converge: relative error "
            << achieved << " after " << r.panels << " panels";
        throw NumericalError(msg.str(), achieved);
    }
    return r;
}

} // namespace fibre_emit::quadrature
