#include "bflab/genmodel.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <numbers>

#include "bflab/errors.hpp"
#include "bflab/format.hpp"

namespace bflab {
namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view s, const std::pair<Enum, std::string_view> (&table)[N], std::string_view what) {
    for (const auto& [value, name] : table) {
        if (name == s) return value;
    }
    throw InvalidArgument("unknown " + std::string(what) + " '" + std::string(s) + "'");
}

template <typename Enum, std::size_t N>
std::string_view enum_name(Enum e, const std::pair<Enum, std::string_view> (&table)[N]) {
    for (const auto& [value, name] : table) {
        if (value == e) return name;
    }
    return "?";
}

constexpr std::pair<Family, std::string_view> kFamilies[] = {
    {Family::NormalKnownVar, "normal_known_var"}, {Family::NormalJeffreysVar, "normal_jeffreys_var"},
    {Family::TTestJzs, "ttest_jzs"},              {Family::RegressionGPrior, "regression_gprior"},
    {Family::Bernoulli, "bernoulli"},             {Family::Contingency, "contingency"}};
constexpr std::pair<Hypothesis, std::string_view> kHypotheses[] = {{Hypothesis::H0, "H0"}, {Hypothesis::H1, "H1"}};
constexpr std::pair<Provenance, std::string_view> kProvenances[] = {{Provenance::FromPrior, "from_prior"},
                                                                    {Provenance::Fixed, "fixed"}};
constexpr std::pair<TypeClass, std::string_view> kTypeClasses[] = {
    {TypeClass::Type0, "type0"}, {TypeClass::TypeI, "type1"}, {TypeClass::TypeII, "type2"}, {TypeClass::TypeIII, "type3"}};
constexpr std::pair<ContingencyScheme, std::string_view> kSchemes[] = {
    {ContingencyScheme::Poisson, "poisson"}, {ContingencyScheme::JointMultinomial, "joint_multinomial"}};
constexpr std::pair<RegressionPriorDesign, std::string_view> kRegDesigns[] = {
    {RegressionPriorDesign::Current, "current"}, {RegressionPriorDesign::Maximum, "maximum"}};

double require(const ParameterValues& values, std::string_view name, std::string_view context) {
    if (auto it = values.find(name); it != values.end()) return it->second;
    throw InvalidArgument(std::string(context) + ": missing fixed value for '" + std::string(name) + "'");
}

double lookup_or(const ParameterValues& values, std::string_view name, double fallback) {
    if (auto it = values.find(name); it != values.end()) return it->second;
    return fallback;
}

// Nuisance scale: never sampled, its Jeffreys prior is improper.
double fixed_sigma(const GenerationMode& mode, const ParameterValues& hyp_values) {
    double sigma = 0.0;
    if (auto it = hyp_values.find("sigma"); it != hyp_values.end()) {
        sigma = it->second;
    } else if (auto jt = mode.nuisance.find("sigma"); jt != mode.nuisance.end()) {
        sigma = jt->second;
    } else {
        throw ImproperPrior("sigma");
    }
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("sigma must be positive");
    return sigma;
}

void check_probability(double p, std::string_view name) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument(std::string(name) + " must lie in [0, 1]");
}

}  // namespace

std::string_view to_string(Family f) { return enum_name(f, kFamilies); }
std::string_view to_string(Hypothesis h) { return enum_name(h, kHypotheses); }
std::string_view to_string(Provenance p) { return enum_name(p, kProvenances); }
std::string_view to_string(TypeClass t) { return enum_name(t, kTypeClasses); }
std::string_view to_string(ContingencyScheme s) { return enum_name(s, kSchemes); }
std::string_view to_string(RegressionPriorDesign d) { return enum_name(d, kRegDesigns); }
Family parse_family(std::string_view s) { return parse_enum(s, kFamilies, "family"); }
Hypothesis parse_hypothesis(std::string_view s) { return parse_enum(s, kHypotheses, "hypothesis"); }
Provenance parse_provenance(std::string_view s) { return parse_enum(s, kProvenances, "provenance"); }
TypeClass parse_type_class(std::string_view s) { return parse_enum(s, kTypeClasses, "type class"); }
ContingencyScheme parse_scheme(std::string_view s) { return parse_enum(s, kSchemes, "contingency scheme"); }
RegressionPriorDesign parse_regression_prior_design(std::string_view s) {
    return parse_enum(s, kRegDesigns, "regression prior design");
}

double ParameterDraw::at(std::string_view name) const {
    if (auto it = values.find(name); it != values.end()) return it->second;
    throw InvalidArgument("parameter draw has no '" + std::string(name) + "'");
}

std::string ParameterDraw::flatten() const {
    std::string out;
    for (const auto& [name, value] : values) {
        if (!out.empty()) out += ';';
        out += name;
        out += '=';
        out += format_double(value);
    }
    return out;
}

void DesignMatrix::validate() const {
    if (x_values.empty()) throw InvalidArgument("design has no covariate values");
    for (double x : x_values) {
        if (!std::isfinite(x)) throw InvalidArgument("design values must be finite");
    }
    const auto [lo, hi] = std::minmax_element(x_values.begin(), x_values.end());
    if (*lo == *hi) throw InvalidArgument("design values are all equal; X'X is singular after centering");
}

DesignMatrix DesignMatrix::prefix(std::size_t n) const {
    DesignMatrix out;
    out.x_values.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.x_values.push_back(x_at(i));
    return out;
}

double DesignMatrix::sum_squares() const {
    double s = 0.0;
    for (double x : x_values) s += x * x;
    return s;
}

double DesignMatrix::centered_sum_squares() const {
    double mean = 0.0;
    for (double x : x_values) mean += x;
    mean /= static_cast<double>(x_values.size());
    double s = 0.0;
    for (double x : x_values) s += (x - mean) * (x - mean);
    return s;
}

DesignMatrix DesignMatrix::fertilizer_doses() {
    DesignMatrix d;
    for (int i = 1; i <= 20; ++i) d.x_values.push_back(i / 10.0);
    return d;
}

TypeClass PriorSpec::default_type_class(Family family) {
    switch (family) {
        case Family::NormalKnownVar: return TypeClass::TypeI;
        case Family::NormalJeffreysVar: return TypeClass::Type0;
        case Family::TTestJzs: return TypeClass::TypeI;
        case Family::RegressionGPrior: return TypeClass::TypeII;
        case Family::Bernoulli: return TypeClass::TypeII;
        case Family::Contingency: return TypeClass::TypeII;
    }
    return TypeClass::TypeI;
}

PriorSpec PriorSpec::defaults_for(Family family) {
    PriorSpec p;
    p.family = family;
    p.type_class = default_type_class(family);
    return p;
}

void PriorSpec::validate() const {
    const TypeClass expected = default_type_class(family);
    // Jeffreys' Bernoulli prior turns Type III once the stopping rule is data dependent.
    const bool type3_bernoulli = family == Family::Bernoulli && type_class == TypeClass::TypeIII;
    if (type_class != expected && !type3_bernoulli) {
        throw InvalidArgument("type class " + std::string(to_string(type_class)) + " is inconsistent with family " +
                              std::string(to_string(family)));
    }
    if (!(cauchy_scale > 0.0)) throw InvalidArgument("cauchy_scale must be positive");
    if (!(gprior.shape > 0.0 && gprior.scale > 0.0)) throw InvalidArgument("g-prior shape and scale must be positive");
    if (!(bernoulli_null > 0.0 && bernoulli_null < 1.0)) throw InvalidArgument("bernoulli_null must lie in (0, 1)");
    if (!(beta_a > 0.0 && beta_b > 0.0)) throw InvalidArgument("beta shapes must be positive");
    if (!(dirichlet_a > 0.5)) throw InvalidArgument("dirichlet_a must exceed 1/2");
    if (!(poisson_rate > 0.0)) throw InvalidArgument("poisson_rate must be positive");
    if (!std::isfinite(null_mean)) throw InvalidArgument("null_mean must be finite");
}

ParameterDraw sample_parameters(const PriorSpec& prior, Hypothesis hypothesis, const GenerationMode& mode, Rng& rng,
                                const DesignMatrix* prior_design) {
    prior.validate();
    ParameterDraw draw{prior.family, hypothesis, mode.provenance, {}};
    auto& v = draw.values;
    const bool alt = hypothesis == Hypothesis::H1;
    const ParameterValues& fixed = alt ? mode.h1 : mode.h0;
    const bool from_prior = mode.provenance == Provenance::FromPrior;
    const std::string_view ctx = alt ? "H1" : "H0";

    switch (prior.family) {
        case Family::NormalKnownVar: {
            v["sigma"] = 1.0;
            if (!alt) {
                v["mu"] = from_prior ? 0.0 : lookup_or(fixed, "mu", 0.0);
            } else {
                v["mu"] = from_prior ? rng.normal(0.0, 1.0) : require(fixed, "mu", ctx);
            }
            break;
        }
        case Family::NormalJeffreysVar: {
            const double sigma = fixed_sigma(mode, fixed);
            v["sigma"] = sigma;
            if (!alt) {
                v["mu"] = from_prior ? 0.0 : lookup_or(fixed, "mu", 0.0);
            } else {
                v["mu"] = from_prior ? rng.normal(0.0, sigma) : require(fixed, "mu", ctx);
            }
            break;
        }
        case Family::TTestJzs: {
            const double sigma = fixed_sigma(mode, fixed);
            const double mu0 = prior.null_mean;
            double delta = 0.0;
            if (!alt) {
                delta = from_prior ? 0.0 : (lookup_or(fixed, "mu", mu0) - mu0) / sigma;
            } else if (from_prior) {
                delta = rng.cauchy(prior.cauchy_scale);
            } else if (fixed.contains("mu")) {
                delta = (fixed.find("mu")->second - mu0) / sigma;
            } else {
                delta = require(fixed, "delta", ctx);
            }
            v["sigma"] = sigma;
            v["delta"] = delta;
            v["mu"] = alt && !from_prior && fixed.contains("mu") ? fixed.find("mu")->second : mu0 + delta * sigma;
            break;
        }
        case Family::RegressionGPrior: {
            const double sigma = fixed_sigma(mode, fixed);
            v["sigma"] = sigma;
            v["intercept"] = lookup_or(fixed, "intercept", lookup_or(mode.nuisance, "intercept", 0.0));
            if (!alt) {
                v["beta"] = from_prior ? 0.0 : lookup_or(fixed, "beta", 0.0);
            } else if (from_prior) {
                if (prior_design == nullptr) throw InvalidArgument("regression prior sampling needs a design");
                prior_design->validate();
                const double g = rng.inverse_gamma(prior.gprior.shape, prior.gprior.scale);
                // beta ~ N(0, g sigma^2 n (X'X)^{-1}) on the centered covariate
                const double n = static_cast<double>(prior_design->size());
                const double var = g * sigma * sigma * n / prior_design->centered_sum_squares();
                v["g"] = g;
                v["beta"] = rng.normal(0.0, std::sqrt(var));
            } else {
                v["beta"] = require(fixed, "beta", ctx);
            }
            break;
        }
        case Family::Bernoulli: {
            double theta = 0.0;
            if (!alt) {
                theta = from_prior ? prior.bernoulli_null : lookup_or(fixed, "theta", prior.bernoulli_null);
            } else if (from_prior) {
                if (prior.type_class == TypeClass::TypeIII) {
                    throw ImproperPrior("theta (Jeffreys prior under a data-dependent stopping rule)");
                }
                theta = rng.beta(prior.beta_a, prior.beta_b);
            } else {
                theta = require(fixed, "theta", ctx);
            }
            check_probability(theta, "theta");
            v["theta"] = theta;
            break;
        }
        case Family::Contingency: {
            if (from_prior) {
                if (prior.scheme != ContingencyScheme::JointMultinomial) {
                    throw InvalidArgument(
                        "prior sampling for contingency tables is defined for the joint multinomial scheme only");
                }
                const double a = prior.dirichlet_a;
                std::array<double, 4> cells{};
                if (alt) {
                    double total = 0.0;
                    for (auto& c : cells) total += (c = rng.gamma(a));
                    for (auto& c : cells) c /= total;
                } else {
                    const double margin = 2.0 * a - 1.0;
                    const double row0 = rng.beta(margin, margin);
                    const double col1 = rng.beta(margin, margin);
                    cells = {row0 * col1, row0 * (1.0 - col1), (1.0 - row0) * col1, (1.0 - row0) * (1.0 - col1)};
                }
                v["cell1"] = cells[0];
                v["cell2"] = cells[1];
                v["cell3"] = cells[2];
                v["cell4"] = cells[3];
            } else {
                double t1 = 0.0;
                double t2 = 0.0;
                if (!alt && fixed.contains("theta")) {
                    t1 = t2 = fixed.find("theta")->second;
                } else {
                    t1 = require(fixed, "theta1", ctx);
                    t2 = require(fixed, "theta2", ctx);
                }
                check_probability(t1, "theta1");
                check_probability(t2, "theta2");
                v["theta1"] = t1;
                v["theta2"] = t2;
            }
            break;
        }
    }
    return draw;
}

StepUnit sample_step(const ParameterDraw& draw, const DesignMatrix* design, std::size_t index, Rng& rng) {
    switch (draw.family) {
        case Family::NormalKnownVar:
        case Family::NormalJeffreysVar:
        case Family::TTestJzs:
            return ScalarObservation{rng.normal(draw.at("mu"), draw.at("sigma"))};
        case Family::RegressionGPrior: {
            if (design == nullptr) throw InvalidArgument("regression data need a design");
            const double x = design->x_at(index);
            const double mean = draw.at("intercept") + draw.at("beta") * x;
            return RegressionRow{x, rng.normal(mean, draw.at("sigma"))};
        }
        case Family::Bernoulli:
            return BinaryObservation{rng.bernoulli(draw.at("theta"))};
        case Family::Contingency: {
            CellObservation obs;
            if (draw.provenance == Provenance::FromPrior) {
                const std::array<double, 4> cells = {draw.at("cell1"), draw.at("cell2"), draw.at("cell3"),
                                                     draw.at("cell4")};
                obs.increments[rng.categorical(cells)] = 1;
            } else {
                // one member of each group; outcome 1 lands in the bottom row
                const bool one1 = rng.bernoulli(draw.at("theta1"));
                const bool one2 = rng.bernoulli(draw.at("theta2"));
                obs.increments[one1 ? 2 : 0] += 1;
                obs.increments[one2 ? 3 : 1] += 1;
            }
            return obs;
        }
    }
    throw InvalidArgument("unknown family");
}

std::vector<StepUnit> sample_data(const ParameterDraw& draw, const DesignMatrix* design, std::size_t n, Rng& rng) {
    if (n == 0) throw InvalidArgument("sample_data needs n >= 1");
    if ((draw.family == Family::RegressionGPrior) != (design != nullptr)) {
        throw InvalidArgument("a design is required for regression and only for regression");
    }
    std::vector<StepUnit> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(sample_step(draw, design, i, rng));
    return out;
}

UnivariatePrior UnivariatePrior::cauchy(double scale, double location) {
    return {Kind::Cauchy, location, scale, 0.5, 0.5};
}

UnivariatePrior UnivariatePrior::gaussian(double sd, double mean) { return {Kind::Gaussian, mean, sd, 0.5, 0.5}; }

UnivariatePrior UnivariatePrior::beta(double a, double b) { return {Kind::Beta, 0.0, 1.0, a, b}; }

double UnivariatePrior::cdf(double x) const {
    switch (kind) {
        case Kind::Cauchy: {
            if (x == -INFINITY) return 0.0;
            if (x == INFINITY) return 1.0;
            const double z = (x - location) / scale;
            // keep precision in the lower tail
            return z < -1.0 ? std::atan(-1.0 / z) / std::numbers::pi : 0.5 + std::atan(z) / std::numbers::pi;
        }
        case Kind::Gaussian: {
            if (x == -INFINITY) return 0.0;
            if (x == INFINITY) return 1.0;
            return 0.5 * std::erfc(-(x - location) / (scale * std::numbers::sqrt2));
        }
        case Kind::Beta: {
            if (x <= 0.0) return 0.0;
            if (x >= 1.0) return 1.0;
            return boost::math::ibeta(a, b, x);
        }
    }
    return 0.0;
}

double UnivariatePrior::survival(double x) const {
    switch (kind) {
        case Kind::Cauchy: {
            if (x == -INFINITY) return 1.0;
            if (x == INFINITY) return 0.0;
            const double z = (x - location) / scale;
            return z > 1.0 ? std::atan(1.0 / z) / std::numbers::pi : 0.5 - std::atan(z) / std::numbers::pi;
        }
        case Kind::Gaussian: {
            if (x == -INFINITY) return 1.0;
            if (x == INFINITY) return 0.0;
            return 0.5 * std::erfc((x - location) / (scale * std::numbers::sqrt2));
        }
        case Kind::Beta: {
            if (x <= 0.0) return 1.0;
            if (x >= 1.0) return 0.0;
            return boost::math::ibetac(a, b, x);
        }
    }
    return 0.0;
}

UnivariatePrior parameter_of_interest_prior(const PriorSpec& prior) {
    switch (prior.family) {
        case Family::NormalKnownVar:
        case Family::NormalJeffreysVar:
            return UnivariatePrior::gaussian(1.0);
        case Family::TTestJzs:
            return UnivariatePrior::cauchy(prior.cauchy_scale);
        case Family::Bernoulli:
            return UnivariatePrior::beta(prior.beta_a, prior.beta_b);
        case Family::RegressionGPrior:
        case Family::Contingency:
            break;
    }
    throw InvalidArgument("family " + std::string(to_string(prior.family)) +
                          " has no design-free univariate prior on its parameter of interest");
}

double prior_tail_mass(const UnivariatePrior& prior, std::span<const Interval> region) {
    std::vector<Interval> pieces(region.begin(), region.end());
    for (const auto& iv : pieces) {
        if (std::isnan(iv.lo) || std::isnan(iv.hi) || iv.lo > iv.hi) throw InvalidArgument("malformed interval");
    }
    std::sort(pieces.begin(), pieces.end(), [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
    std::vector<Interval> merged;
    for (const auto& iv : pieces) {
        if (!merged.empty() && iv.lo <= merged.back().hi) {
            merged.back().hi = std::max(merged.back().hi, iv.hi);
        } else {
            merged.push_back(iv);
        }
    }
    double mass = 0.0;
    for (const auto& iv : merged) {
        // difference of whichever tail function is small, to avoid cancellation
        const double upper = prior.survival(iv.lo) - prior.survival(iv.hi);
        const double lower = prior.cdf(iv.hi) - prior.cdf(iv.lo);
        mass += prior.survival(iv.lo) < prior.cdf(iv.hi) ? upper : lower;
    }
    return mass;
}

double gprior_beta_variance(double g, double sigma, const DesignMatrix& design) {
    if (design.x_values.empty()) throw InvalidArgument("empty design");
    const double ss = design.sum_squares();
    if (!(ss > 0.0)) throw InvalidArgument("singular design: sum of squared covariates is zero");
    if (!(g >= 0.0) || !(sigma > 0.0)) throw InvalidArgument("g must be nonnegative and sigma positive");
    return g * sigma * sigma * static_cast<double>(design.size()) / ss;
}

double gprior_beta_density(double beta, double g, double sigma, const DesignMatrix& design) {
    const double var = gprior_beta_variance(g, sigma, design);
    if (var == 0.0) return beta == 0.0 ? INFINITY : 0.0;
    return std::exp(-0.5 * beta * beta / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

}  // namespace bflab
