#pragma once

// Data generation under H0/H1 with parameters either drawn from the prior or
// fixed by the experimenter, plus prior densities and tail masses.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bflab/bayes_core.hpp"
#include "bflab/rng.hpp"
#include "bflab/step.hpp"

namespace bflab {

enum class Family { NormalKnownVar, NormalJeffreysVar, TTestJzs, RegressionGPrior, Bernoulli, Contingency };
enum class Hypothesis { H0, H1 };
enum class Provenance { FromPrior, Fixed };

// Type 0: group-invariant nuisance prior; I: proper, design independent;
// II: proper but depends on the design; III: depends on the stopping rule or
// improper without a group structure.
enum class TypeClass { Type0, TypeI, TypeII, TypeIII };

// Which design fixes the g-prior covariance while data accrue.
enum class RegressionPriorDesign { Current, Maximum };

std::string_view to_string(Family f);
std::string_view to_string(Hypothesis h);
std::string_view to_string(Provenance p);
std::string_view to_string(TypeClass t);
std::string_view to_string(ContingencyScheme s);
std::string_view to_string(RegressionPriorDesign d);
Family parse_family(std::string_view s);
Hypothesis parse_hypothesis(std::string_view s);
Provenance parse_provenance(std::string_view s);
TypeClass parse_type_class(std::string_view s);
ContingencyScheme parse_scheme(std::string_view s);
RegressionPriorDesign parse_regression_prior_design(std::string_view s);

using ParameterValues = std::map<std::string, double, std::less<>>;

struct ParameterDraw {
    Family family = Family::NormalKnownVar;
    Hypothesis hypothesis = Hypothesis::H0;
    Provenance provenance = Provenance::FromPrior;
    ParameterValues values;

    double at(std::string_view name) const;
    /// "name=value;name=value" in key order, shortest round-trip formatting.
    std::string flatten() const;
};

struct DesignMatrix {
    std::vector<double> x_values;

    void validate() const;
    std::size_t size() const { return x_values.size(); }
    /// Covariate of row `row` when the design is repeated cyclically.
    double x_at(std::size_t row) const { return x_values[row % x_values.size()]; }
    /// First n rows of the cyclic design.
    DesignMatrix prefix(std::size_t n) const;
    double sum_squares() const;
    double centered_sum_squares() const;

    /// Doses 0.1, 0.2, ..., 2.0.
    static DesignMatrix fertilizer_doses();

    bool operator==(const DesignMatrix&) const = default;
};

struct PriorSpec {
    Family family = Family::NormalKnownVar;
    TypeClass type_class = TypeClass::TypeI;
    double cauchy_scale = 1.0;         // JZS effect-size scale r
    double null_mean = 0.0;            // t-test mu0
    GPrior gprior{};                   // g ~ IG(shape, scale)
    RegressionPriorDesign regression_design = RegressionPriorDesign::Current;
    double bernoulli_null = 0.5;       // theta0
    double beta_a = 0.5;               // Jeffreys Beta(1/2, 1/2)
    double beta_b = 0.5;
    ContingencyScheme scheme = ContingencyScheme::Poisson;
    double dirichlet_a = 1.0;
    double poisson_rate = 1.0;

    bool operator==(const PriorSpec&) const = default;

    static PriorSpec defaults_for(Family family);
    static TypeClass default_type_class(Family family);
    void validate() const;
};

/// Which parameters are fixed. Under FromPrior only improper components
/// (scale, intercept) come from `nuisance`; under Fixed, `h0`/`h1` give the
/// parameters of each generating hypothesis.
struct GenerationMode {
    Provenance provenance = Provenance::FromPrior;
    ParameterValues nuisance;
    ParameterValues h0;
    ParameterValues h1;

    bool operator==(const GenerationMode&) const = default;
};

/// `prior_design` is the design whose g-prior is sampled (regression only).
ParameterDraw sample_parameters(const PriorSpec& prior, Hypothesis hypothesis, const GenerationMode& mode,
                                Rng& rng, const DesignMatrix* prior_design = nullptr);

/// Step `index` (0-based) of the data stream at the drawn parameters.
StepUnit sample_step(const ParameterDraw& draw, const DesignMatrix* design, std::size_t index, Rng& rng);

/// n consecutive steps.
std::vector<StepUnit> sample_data(const ParameterDraw& draw, const DesignMatrix* design, std::size_t n,
                                  Rng& rng);

struct Interval {
    double lo;
    double hi;
};

struct UnivariatePrior {
    enum class Kind { Cauchy, Gaussian, Beta };
    Kind kind = Kind::Gaussian;
    double location = 0.0;
    double scale = 1.0;
    double a = 0.5;  // Beta shapes
    double b = 0.5;

    static UnivariatePrior cauchy(double scale = 1.0, double location = 0.0);
    static UnivariatePrior gaussian(double sd = 1.0, double mean = 0.0);
    static UnivariatePrior beta(double a, double b);
    double cdf(double x) const;
    double survival(double x) const;
};

/// Prior on the parameter of interest of a family (effect size, mean, theta).
UnivariatePrior parameter_of_interest_prior(const PriorSpec& prior);

/// Probability of a union of intervals; overlapping pieces count once.
double prior_tail_mass(const UnivariatePrior& prior, std::span<const Interval> region);

/// Density of beta ~ N(0, g sigma^2 n / sum x_i^2) for a single covariate.
double gprior_beta_density(double beta, double g, double sigma, const DesignMatrix& design);
double gprior_beta_variance(double g, double sigma, const DesignMatrix& design);

}  // namespace bflab
