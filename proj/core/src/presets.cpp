#include "bflab/presets.hpp"

#include <cmath>

#include "bflab/errors.hpp"

namespace bflab {

namespace {

ExperimentConfig base(std::string name, Family family, StoppingRule rule) {
    ExperimentConfig c;
    c.name = std::move(name);
    c.prior = PriorSpec::defaults_for(family);
    c.rule = rule;
    return c;
}

const StoppingRule kOptionalStopping = StoppingRule::symmetric(10.0, 25);

ExperimentConfig jeffreys_sigma(std::string name, double sigma, StoppingRule rule) {
    auto c = base(std::move(name), Family::NormalJeffreysVar, rule);
    c.mode.nuisance = {{"sigma", sigma}};
    return c;
}

ExperimentConfig jzs_from_prior(std::string name, StoppingRule rule) {
    auto c = base(std::move(name), Family::TTestJzs, rule);
    c.prior.null_mean = 1.0;
    c.mode.nuisance = {{"sigma", 1.0}};
    return c;
}

ExperimentConfig jzs_fixed(std::string name, StoppingRule rule) {
    auto c = base(std::move(name), Family::TTestJzs, rule);
    c.prior.null_mean = 1.0;
    c.mode.provenance = Provenance::Fixed;
    c.mode.h0 = {{"mu", 1.0}, {"sigma", 1.0}};
    c.mode.h1 = {{"mu", 1.3}, {"sigma", 1.0}};
    return c;
}

ExperimentConfig regression(std::string name, StoppingRule rule, RegressionPriorDesign prior_design) {
    auto c = base(std::move(name), Family::RegressionGPrior, rule);
    c.prior.regression_design = prior_design;
    c.mode.nuisance = {{"intercept", 0.0}, {"sigma", 1.0}};
    c.design = DesignMatrix::fertilizer_doses();
    return c;
}

ExperimentConfig poisson_fixed(std::string name, StoppingRule rule) {
    auto c = base(std::move(name), Family::Contingency, rule);
    c.prior.scheme = ContingencyScheme::Poisson;
    c.mode.provenance = Provenance::Fixed;
    c.mode.h0 = {{"theta", 0.5}};
    c.mode.h1 = {{"theta1", 0.45}, {"theta2", 0.55}};
    return c;
}

ExperimentConfig multinomial_fixed(std::string name, StoppingRule rule) {
    auto c = base(std::move(name), Family::Contingency, rule);
    c.prior.scheme = ContingencyScheme::JointMultinomial;
    c.mode.provenance = Provenance::Fixed;
    c.mode.h0 = {{"theta", 0.7}};
    c.mode.h1 = {{"theta1", 0.65}, {"theta2", 0.75}};
    return c;
}

ExperimentConfig multinomial_prior(std::string name, StoppingRule rule) {
    auto c = base(std::move(name), Family::Contingency, rule);
    c.prior.scheme = ContingencyScheme::JointMultinomial;
    return c;
}

std::vector<ExperimentPreset> build() {
    std::vector<ExperimentPreset> out;
    auto add = [&](std::string description, ExperimentConfig c) {
        c.validate();
        out.push_back({c.name, std::move(description), std::move(c)});
    };

    add("Known-variance normal, mu ~ N(0, 1) under H1, n = 10",
        base("fig1", Family::NormalKnownVar, StoppingRule::fixed_n(10)));
    add("fig1 with stopping at odds 10:1 either way, at most 25 observations",
        base("fig1-optional-stopping", Family::NormalKnownVar, kOptionalStopping));

    add("Jeffreys 1/sigma prior, data at sigma = 1, n = 10",
        jeffreys_sigma("fig2a-sigma1", 1.0, StoppingRule::fixed_n(10)));
    add("Jeffreys 1/sigma prior, data at sigma = 2, n = 10",
        jeffreys_sigma("fig2a-sigma2", 2.0, StoppingRule::fixed_n(10)));
    add("Jeffreys 1/sigma prior, sigma = 1, stop at odds 10:1 for H1, at most 25",
        jeffreys_sigma("fig2b-sigma1", 1.0, StoppingRule::one_sided(10.0, 25)));
    add("Jeffreys 1/sigma prior, sigma = 2, stop at odds 10:1 for H1, at most 25",
        jeffreys_sigma("fig2b-sigma2", 2.0, StoppingRule::one_sided(10.0, 25)));

    add("JZS t-test, effect size from the Cauchy prior, mu0 = 1, sigma = 1, n = 10",
        jzs_from_prior("fig3a", StoppingRule::fixed_n(10)));
    add("fig3a with optional stopping at odds 10:1, at most 25",
        jzs_from_prior("fig3b", kOptionalStopping));
    add("JZS t-test, fixed mu = 1.3 under H1, mu0 = 1, sigma = 1, n = 10",
        jzs_fixed("fig4a", StoppingRule::fixed_n(10)));
    add("fig4a with optional stopping at odds 10:1, at most 25",
        jzs_fixed("fig4b", kOptionalStopping));

    {
        auto c = regression("fig6a", StoppingRule::fixed_n(20), RegressionPriorDesign::Current);
        c.gprior_curve_sizes = {20, 23, 34};
        add("g-prior regression on fertilizer doses 0.1..2.0, n = 20; also g-prior curves for n = 20, 23, 34",
            std::move(c));
    }
    add("g-prior regression, optional stopping between 3 and 40 pots, prior from the current design",
        regression("regression-os-current", StoppingRule::symmetric(10.0, 40, 3), RegressionPriorDesign::Current));
    add("g-prior regression, optional stopping between 3 and 40 pots, prior from the planned 40-pot design",
        regression("regression-os-maximum", StoppingRule::symmetric(10.0, 40, 3), RegressionPriorDesign::Maximum));

    add("Poisson-scheme contingency table, 100 + 100, theta 0.5 vs 0.45/0.55",
        poisson_fixed("appendix-poisson-fixed", StoppingRule::fixed_n(100)));
    add("appendix-poisson-fixed with optional stopping at odds 10:1, at most 100 + 100",
        poisson_fixed("appendix-poisson-os", StoppingRule::symmetric(10.0, 100)));
    add("Joint-multinomial contingency table, 25 + 25, theta 0.70 vs 0.65/0.75",
        multinomial_fixed("appendix-multinomial-fixed", StoppingRule::fixed_n(25)));
    add("appendix-multinomial-fixed with optional stopping at odds 10:1, at most 25 + 25",
        multinomial_fixed("appendix-multinomial-os", StoppingRule::symmetric(10.0, 25)));
    add("Joint-multinomial contingency table, cell probabilities from the prior, 50 observations",
        multinomial_prior("appendix-multinomial-prior-fixed", StoppingRule::fixed_n(50)));
    add("appendix-multinomial-prior-fixed with optional stopping at odds 10:1, at most 50",
        multinomial_prior("appendix-multinomial-prior-os", StoppingRule::symmetric(10.0, 50)));

    {
        auto c = base("type1-bernoulli", Family::Bernoulli, StoppingRule::one_sided(20.0, 25));
        c.hypotheses = {Hypothesis::H0};
        c.alpha = 0.05;
        add("Bernoulli theta = 1/2 null, reject when odds(H0) <= 0.05, at most 25", std::move(c));
    }
    {
        auto c = base("type1-ttest", Family::TTestJzs, StoppingRule::one_sided(20.0, 25));
        c.mode.nuisance = {{"sigma", 1.0}};
        c.hypotheses = {Hypothesis::H0};
        c.alpha = 0.05;
        add("JZS t-test null with sigma = 1, reject when odds(H0) <= 0.05, at most 25", std::move(c));
    }
    {
        auto c = base("schoenbrodt", Family::TTestJzs, StoppingRule::symmetric(7.0, 5000, 20));
        c.prior.cauchy_scale = std::sqrt(2.0) / 2.0;
        c.mode.provenance = Provenance::Fixed;
        c.mode.h0 = {{"delta", 0.0}, {"sigma", 1.0}};
        c.mode.h1 = {{"delta", 0.3}, {"sigma", 1.0}};
        c.replicates = 10000;
        c.hypotheses = {Hypothesis::H1};
        c.type2_B = 7.0;
        add("JZS t-test (r = sqrt(2)/2) at delta = 0.3, at least 20 observations, stop at odds 7:1 either way",
            std::move(c));
    }
    return out;
}

}  // namespace

const std::vector<ExperimentPreset>& presets() {
    static const std::vector<ExperimentPreset> all = build();
    return all;
}

const ExperimentPreset& find_preset(std::string_view name) {
    for (const auto& p : presets()) {
        if (p.name == name) return p;
    }
    throw ValidationError("preset", "unknown preset '" + std::string(name) + "'");
}

}  // namespace bflab
