#pragma once

// Self-checks shared by `bflab check` and the test suites.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace bflab {

struct CheckResult {
    std::string name;
    double value = 0.0;
    double bound = 0.0;
    bool passed = false;
    std::string detail;
};

/// Largest |log BF(cD) - log BF(D)| of the Jeffreys-sigma Bayes factor over
/// `trials` random data sets D (n in 2..50) and scales c in [1e-3, 1e3].
double jeffreys_scale_invariance_deviation(std::uint64_t trials, std::uint64_t seed);

struct CheckOptions {
    std::uint64_t replicates = 20000;  // type1 suite
    unsigned workers = 0;
    std::uint64_t seed = 2019;
};

/// suite is "martingale", "invariance" or "type1"; throws ValidationError otherwise.
std::vector<CheckResult> run_check_suite(std::string_view suite, const CheckOptions& options = {});

}  // namespace bflab
