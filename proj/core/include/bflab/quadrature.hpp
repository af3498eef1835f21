#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace bflab::quadrature {

struct Options {
    double rel_tol = 1e-8;
    std::size_t max_panels = 4000;
};

struct Estimate {
    double value = 0.0;      // integral, or log-integral for the log_* entry points
    double rel_error = 0.0;  // achieved relative error of the (linear-scale) integral
    std::size_t evaluations = 0;
    std::size_t panels = 0;
};

/// Adaptive Gauss-Kronrod (7/15) on [a, b] with initial breakpoints.
/// `breakpoints` must be sorted and lie strictly inside (a, b).
/// Throws NumericFailure when the panel budget runs out before rel_tol.
Estimate adaptive_gk15(const std::function<double(double)>& f, double a, double b,
                       std::span<const double> breakpoints, const Options& options);

/// Integral of a nonnegative f over (0, inf). The half-line is compactified
/// with u = g/(1+g); the bulk of the mass is located first so that sharply
/// peaked integrands get their own panels before refinement starts. The
/// search scans log g over [-30, 30] in steps of 1.5, so it assumes f does
/// not vanish (in double precision) across a whole step around its mass.
double integrate_positive_halfline(const std::function<double(double)>& f,
                                   double rel_tol = 1e-8);

Estimate integrate_positive_halfline_estimate(const std::function<double(double)>& f,
                                              const Options& options = {});

/// log of the integral of exp(log_f(g)) over (0, inf). Same scheme as above,
/// evaluated with the integrand rescaled by its peak so the result may lie far
/// outside the range of a double on the linear scale.
double log_integrate_positive_halfline(const std::function<double(double)>& log_f,
                                       double rel_tol = 1e-8);

Estimate log_integrate_positive_halfline_estimate(const std::function<double(double)>& log_f,
                                                  const Options& options = {});

}  // namespace bflab::quadrature
