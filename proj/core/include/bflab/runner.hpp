#pragma once

// Runs replicate batches over a worker pool. Every replicate draws from its
// own stream seeded by derive_seed(master, hypothesis, index) and results are
// stored by index, so the worker count never changes the output.

#include <cstdint>
#include <optional>
#include <vector>

#include "bflab/calibration.hpp"
#include "bflab/config.hpp"

namespace bflab {

/// Fraction of failed replicates above which a run aborts.
inline constexpr double kMaxFailureFraction = 0.01;

std::uint64_t hypothesis_seed_tag(Hypothesis h);

/// workers == 0 means std::thread::hardware_concurrency().
std::vector<TrialOutcome> run_batch(const TrialSpec& spec, Hypothesis hypothesis, std::uint64_t replicates,
                                    std::uint64_t master_seed, unsigned workers, const TrialOptions& options = {});

struct CalibrationSummary {
    CalibrationTable table;
    std::vector<CalibrationPoint> points;           // empty when no bin qualifies
    std::optional<CalibrationDeviation> deviation;  // needs three points
    double band_fraction = 0.0;
    std::optional<double> spearman;
};

CalibrationSummary summarize_calibration(std::span<const TrialOutcome> h0, std::span<const TrialOutcome> h1,
                                         double bin_width, std::uint64_t min_count);

struct ExperimentResults {
    ExperimentConfig config;
    std::vector<TrialOutcome> h0;
    std::vector<TrialOutcome> h1;
    std::optional<CalibrationSummary> calibration;  // both hypotheses run
    std::optional<ErrorRateEstimate> type1;
    std::optional<ErrorRateEstimate> type2;
    std::uint64_t failed_h0 = 0;
    std::uint64_t failed_h1 = 0;
};

/// Throws FailureThresholdExceeded when more than 1% of a batch failed.
ExperimentResults run_experiment(const ExperimentConfig& config, unsigned workers = 0);

}  // namespace bflab
