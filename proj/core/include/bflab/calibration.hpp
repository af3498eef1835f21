#pragma once

// Calibration of posterior odds: binned H0/H1 outcome counts, observed versus
// nominal odds, and frequentist error rates under optional stopping.

#include <cstdint>
#include <span>
#include <vector>

#include "bflab/sequential.hpp"

namespace bflab {

inline constexpr double kDefaultBinWidth = 0.1;
inline constexpr std::uint64_t kDefaultMinCount = 20;

struct CalibrationBin {
    std::int64_t index = 0;  // bin covers [index * width, (index + 1) * width)
    double center = 0.0;
    std::uint64_t count_h0 = 0;
    std::uint64_t count_h1 = 0;
};

struct CalibrationTable {
    double bin_width = kDefaultBinWidth;
    std::uint64_t min_count = kDefaultMinCount;
    std::vector<CalibrationBin> bins;  // ordered by index
    std::uint64_t total_h0 = 0;
    std::uint64_t total_h1 = 0;
    std::uint64_t failed_h0 = 0;
    std::uint64_t failed_h1 = 0;

    void add(double log_odds, Hypothesis h);
    void validate() const;
};

std::int64_t bin_index(double log_odds, double bin_width);

/// Bins final log odds; failed replicates are counted separately and kept out
/// of the histogram. Requires matched, nonempty replicate lists.
CalibrationTable bin_outcomes(std::span<const TrialOutcome> h0_outcomes, std::span<const TrialOutcome> h1_outcomes,
                              double bin_width = kDefaultBinWidth, std::uint64_t min_count = kDefaultMinCount);

/// Same on raw log-odds values.
CalibrationTable bin_log_odds(std::span<const double> h0_log_odds, std::span<const double> h1_log_odds,
                              double bin_width = kDefaultBinWidth, std::uint64_t min_count = kDefaultMinCount);

/// Order-insensitive merge of partial tables built with the same bin width.
CalibrationTable merge(const CalibrationTable& a, const CalibrationTable& b);

struct CalibrationPoint {
    double nominal_log_odds = 0.0;
    double observed_log_odds = 0.0;
    std::uint64_t count_h0 = 0;
    std::uint64_t count_h1 = 0;

    /// Binomial z-score of count_h1 out of count_h0 + count_h1 against the
    /// H1 share e^c / (1 + e^c) implied by the nominal log odds c, after
    /// rescaling for unequal totals.
    double standardized_residual(double total_ratio = 1.0) const;
};

/// One point per bin with at least min_count outcomes in both histograms.
/// Throws EmptyResult when no bin qualifies.
std::vector<CalibrationPoint> observed_vs_nominal(const CalibrationTable& table);

struct CalibrationDeviation {
    double slope = 0.0;
    double max_abs_dev = 0.0;
};

/// Least-squares slope of observed on nominal and the maximum |observed - nominal|.
CalibrationDeviation calibration_deviation(std::span<const CalibrationPoint> points);

/// Fraction of points whose standardized residual is within `z` of the identity line.
double identity_band_fraction(std::span<const CalibrationPoint> points, double z = 3.0);

/// Spearman rank correlation (average ranks for ties) of observed on nominal.
double spearman_correlation(std::span<const CalibrationPoint> points);

struct ErrorRateEstimate {
    double rate = 0.0;
    double mc_standard_error = 0.0;
    std::uint64_t n_replicates = 0;
    double threshold = 0.0;  // alpha for Type I, B for Type II
};

ErrorRateEstimate make_error_rate(std::uint64_t hits, std::uint64_t n, double threshold);

/// Fraction of H0 replicates that end with odds(H0 : H1) <= alpha, i.e.
/// final log odds(H1) >= -ln alpha. Failed replicates are excluded.
ErrorRateEstimate type1_error_optional_stopping(std::span<const TrialOutcome> h0_outcomes, double alpha);

/// Fraction of H1 replicates that end accepting H0: final odds <= 1/B.
ErrorRateEstimate type2_error_schoenbrodt(std::span<const TrialOutcome> h1_outcomes, double B);

/// Exhaustive check of the test-martingale identity
///   BF(n1, n0) = 1/2 BF(n1 + 1, n0) + 1/2 BF(n1, n0 + 1)
/// for the Jeffreys Bernoulli Bayes factor against theta0 = 1/2, over all
/// count pairs with n1 + n0 < max_depth (max_depth <= 20). Returns the
/// largest absolute deviation.
double martingale_check_bernoulli(std::uint64_t max_depth);

/// One-step martingale check of the known-variance normal Bayes factor:
/// E_H0[BF_{n+1} | prefix] against BF_n, by quadrature over the next
/// observation, for every prefix (n, x-bar) on a small grid with n < max_depth.
/// Returns the largest relative deviation.
double martingale_check_normal(std::uint64_t max_depth, double rel_tol = 1e-10);

}  // namespace bflab
