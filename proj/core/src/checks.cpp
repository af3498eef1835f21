#include "bflab/checks.hpp"

#include <algorithm>
#include <cmath>

#include "bflab/bayes_core.hpp"
#include "bflab/calibration.hpp"
#include "bflab/errors.hpp"
#include "bflab/presets.hpp"
#include "bflab/rng.hpp"
#include "bflab/runner.hpp"

namespace bflab {

double jeffreys_scale_invariance_deviation(std::uint64_t trials, std::uint64_t seed) {
    Rng rng(seed);
    double worst = 0.0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        const std::uint64_t n = 2 + static_cast<std::uint64_t>(rng.uniform() * 49.0);
        const double c = std::pow(10.0, rng.uniform() * 6.0 - 3.0);
        const double mu = rng.normal(0.0, 1.0);
        SufficientStatsNormal d;
        SufficientStatsNormal scaled;
        for (std::uint64_t i = 0; i < n; ++i) {
            const double x = rng.normal(mu, 1.0);
            d.add(x);
            scaled.add(c * x);
        }
        const double diff = log_bf_normal_jeffreys_var(scaled).value - log_bf_normal_jeffreys_var(d).value;
        worst = std::max(worst, std::abs(diff));
    }
    return worst;
}

namespace {

CheckResult bounded(std::string name, double value, double bound, std::string detail = {}) {
    return {std::move(name), value, bound, value <= bound, std::move(detail)};
}

CheckResult type1_check(const char* preset, const CheckOptions& options) {
    ExperimentConfig c = find_preset(preset).config;
    c.replicates = options.replicates;
    c.master_seed = options.seed;
    const auto r = run_experiment(c, options.workers);
    const auto& e = *r.type1;
    const double bound = e.threshold + 3.0 * e.mc_standard_error;
    return bounded(std::string(preset) + " Type-I rate", e.rate, bound,
                   "alpha=" + std::to_string(e.threshold) + " se=" + std::to_string(e.mc_standard_error) +
                       " reps=" + std::to_string(e.n_replicates));
}

}  // namespace

std::vector<CheckResult> run_check_suite(std::string_view suite, const CheckOptions& options) {
    if (suite == "martingale") {
        return {bounded("bernoulli martingale depth 10", martingale_check_bernoulli(10), 1e-12),
                bounded("normal one-step martingale", martingale_check_normal(10), 1e-6)};
    }
    if (suite == "invariance") {
        return {bounded("jeffreys scale invariance", jeffreys_scale_invariance_deviation(1000, options.seed), 1e-12,
                        "1000 random (D, c)")};
    }
    if (suite == "type1") {
        return {type1_check("type1-bernoulli", options), type1_check("type1-ttest", options)};
    }
    throw ValidationError("suite", "unknown suite '" + std::string(suite) + "' (martingale, invariance, type1)");
}

}  // namespace bflab
