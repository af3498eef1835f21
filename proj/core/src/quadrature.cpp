#include "bflab/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "bflab/errors.hpp"

namespace bflab::quadrature {
namespace {

// Kronrod abscissae on [-1, 1] (positive half) and weights; odd entries are
// the embedded 7-point Gauss nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a;
    double b;
    double value;
    double error;

    bool operator<(const Panel& other) const { return error < other.error; }
};

Panel gk15(const std::function<double(double)>& f, double a, double b, std::size_t& evals) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double pair = f(center - dx) + f(center + dx);
        kronrod += kWgk[j] * pair;
        if (j % 2 == 1) gauss += kWg[j / 2] * pair;
    }
    evals += 15;
    kronrod *= half;
    gauss *= half;
    if (!std::isfinite(kronrod)) {
        throw NumericFailure("non-finite integrand value on panel [" + std::to_string(a) + ", " +
                                 std::to_string(b) + "]",
                             std::numeric_limits<double>::infinity());
    }
    return {a, b, kronrod, std::abs(kronrod - gauss)};
}

double to_halfline(double u) { return u / (1.0 - u); }
double to_unit(double g) { return g / (1.0 + g); }

// Locates the peak of the mass density in v = log g, where the integrand
// reads exp(log_f(e^v) + v). Returns (v*, log density at v*).
std::pair<double, double> locate_mass(const std::function<double(double)>& log_f,
                                      std::size_t& evals) {
    auto density = [&](double v) {
        const double lf = log_f(std::exp(v));
        ++evals;
        return std::isnan(lf) ? -std::numeric_limits<double>::infinity() : lf + v;
    };
    constexpr double lo = -30.0;
    constexpr double hi = 30.0;
    constexpr double step = 1.5;
    double best_v = 0.0;
    double best = -std::numeric_limits<double>::infinity();
    for (double v = lo; v <= hi + 1e-12; v += step) {
        const double d = density(v);
        if (d > best) {
            best = d;
            best_v = v;
        }
    }
    if (!std::isfinite(best)) return {0.0, best};

    // golden-section refinement inside the bracketing grid cells
    constexpr double inv_phi = 0.6180339887498949;
    double a = best_v - step;
    double b = best_v + step;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = density(c);
    double fd = density(d);
    for (int it = 0; it < 24; ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = density(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = density(d);
        }
    }
    const double v_star = fc > fd ? c : d;
    const double peak = std::max({fc, fd, best});
    return {peak == best ? best_v : v_star, peak};
}

Estimate integrate_log_halfline(const std::function<double(double)>& log_f, const Options& options) {
    if (!(options.rel_tol > 0.0 && options.rel_tol <= 1e-2)) {
        throw InvalidArgument("rel_tol must lie in (0, 1e-2]");
    }
    std::size_t evals = 0;
    const auto [v_star, peak] = locate_mass(log_f, evals);
    if (!std::isfinite(peak)) {
        if (peak > 0) {
            throw NumericFailure("integrand is unbounded", std::numeric_limits<double>::infinity());
        }
        return {-std::numeric_limits<double>::infinity(), 0.0, evals, 0};
    }

    // Panel edges at the peak and at e-fold multiples around it.
    std::vector<double> cuts;
    for (double k : {-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0}) {
        const double u = to_unit(std::exp(v_star + k));
        if (u > 1e-300 && u < 1.0 - 1e-15) cuts.push_back(u);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double x, double y) { return std::abs(x - y) < 1e-14; }),
               cuts.end());

    auto integrand = [&](double u) {
        if (u <= 0.0 || u >= 1.0) return 0.0;
        const double g = to_halfline(u);
        const double lf = log_f(g);
        if (std::isnan(lf)) return std::numeric_limits<double>::quiet_NaN();
        // dg/du = 1/(1-u)^2
        return std::exp(lf - 2.0 * std::log1p(-u) - peak);
    };
    Estimate est = adaptive_gk15(integrand, 0.0, 1.0, cuts, options);
    est.evaluations += evals;
    est.value = est.value > 0.0 ? std::log(est.value) + peak : -std::numeric_limits<double>::infinity();
    return est;
}

}  // namespace

Estimate adaptive_gk15(const std::function<double(double)>& f, double a, double b,
                       std::span<const double> breakpoints, const Options& options) {
    if (!(options.rel_tol > 0.0)) throw InvalidArgument("rel_tol must be positive");
    if (!(b > a)) throw InvalidArgument("integration interval is empty");
    std::size_t evals = 0;
    std::priority_queue<Panel> heap;
    double value = 0.0;
    double error = 0.0;
    auto add = [&](const Panel& p) {
        heap.push(p);
        value += p.value;
        error += p.error;
    };
    double lo = a;
    for (double cut : breakpoints) {
        if (cut <= lo || cut >= b) continue;
        add(gk15(f, lo, cut, evals));
        lo = cut;
    }
    add(gk15(f, lo, b, evals));

    while (error > options.rel_tol * std::abs(value)) {
        if (heap.size() >= options.max_panels) {
            const double rel = value != 0.0 ? error / std::abs(value) : std::numeric_limits<double>::infinity();
            throw NumericFailure("quadrature refinement budget exhausted", rel);
        }
        const Panel worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            throw NumericFailure("quadrature panel cannot be bisected further", error / std::abs(value));
        }
        heap.pop();
        const Panel left = gk15(f, worst.a, mid, evals);
        const Panel right = gk15(f, mid, worst.b, evals);
        heap.push(left);
        heap.push(right);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        if (error < 0.0) error = 0.0;
    }

    // Re-sum in a canonical order so the result does not depend on the
    // accumulation history of the running totals.
    const std::size_t panels = heap.size();
    std::vector<Panel> all;
    all.reserve(panels);
    while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
    }
    std::sort(all.begin(), all.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
    double v = 0.0;
    double e = 0.0;
    for (const auto& p : all) {
        v += p.value;
        e += p.error;
    }
    return {v, v != 0.0 ? e / std::abs(v) : 0.0, evals, panels};
}

double integrate_positive_halfline(const std::function<double(double)>& f, double rel_tol) {
    return integrate_positive_halfline_estimate(f, Options{rel_tol}).value;
}

Estimate integrate_positive_halfline_estimate(const std::function<double(double)>& f,
                                              const Options& options) {
    auto log_f = [&f](double g) {
        const double v = f(g);
        if (v < 0.0 || std::isnan(v)) throw InvalidArgument("integrand must be nonnegative");
        return std::log(v);
    };
    Estimate est = integrate_log_halfline(log_f, options);
    est.value = std::exp(est.value);
    return est;
}

double log_integrate_positive_halfline(const std::function<double(double)>& log_f, double rel_tol) {
    return integrate_log_halfline(log_f, Options{rel_tol}).value;
}

Estimate log_integrate_positive_halfline_estimate(const std::function<double(double)>& log_f,
                                                  const Options& options) {
    return integrate_log_halfline(log_f, options);
}

}  // namespace bflab::quadrature
