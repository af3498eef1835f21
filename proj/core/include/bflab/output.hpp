#pragma once

// Result files. Every writer goes through a temporary sibling and a rename,
// so a failed write never leaves a partial file behind.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "bflab/runner.hpp"

namespace bflab {

inline constexpr const char* kOutcomeCsvHeader =
    "replicate_index,hypothesis,n_stop,stopped_by,log_bf,log_posterior_odds,param_provenance,"
    "fixed_or_drawn_parameter_values";
inline constexpr const char* kCalibrationCsvHeader = "bin_center_log_odds,count_h0,count_h1,observed_log_odds";

/// Writes `contents` to `path` atomically; throws Error naming the path on I/O failure.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// H0 rows by replicate index, then H1 rows.
std::string outcomes_csv(std::span<const TrialOutcome> h0, std::span<const TrialOutcome> h1);
std::string calibration_csv(std::span<const CalibrationPoint> points);
std::string histogram_csv(const CalibrationTable& table);
std::string summary_json(const ExperimentResults& results);
/// Throws EmptyResult for an empty point set.
std::string calibration_svg(std::span<const CalibrationPoint> points, const std::string& title);
/// beta grid against the g-prior density (g = 1, sigma = 1) for each design size.
std::string gprior_curves_csv(const DesignMatrix& base, std::span<const std::uint64_t> sizes);

/// Outcome rows read back from outcomes_csv.
struct OutcomeRecord {
    std::uint64_t replicate_index = 0;
    Hypothesis hypothesis = Hypothesis::H0;
    std::uint64_t n_stop = 0;
    StopReason stopped_by = StopReason::FixedN;
    double log_bf = 0.0;
    double log_posterior_odds = 0.0;
};
std::vector<OutcomeRecord> read_outcomes_csv(const std::filesystem::path& path);

enum class PlotFormat { Csv, Svg };

/// Writes calibration.csv or calibration.svg into `dir`; returns the path.
/// Throws EmptyResult, creating nothing, when there are no points.
std::filesystem::path emit_plot_data(const ExperimentResults& results, PlotFormat format,
                                     const std::filesystem::path& dir);

/// All result files of a run: outcomes.csv, histogram.csv, summary.json,
/// config.json and, when points exist, calibration.csv and calibration.svg.
std::vector<std::filesystem::path> write_results(const ExperimentResults& results, const std::filesystem::path& dir);

}  // namespace bflab
