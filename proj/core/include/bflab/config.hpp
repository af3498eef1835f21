#pragma once

// Experiment configuration: everything that determines a simulation run, and
// its JSON form. JSON stays behind this interface so consumers of the
// installed library do not need a JSON dependency.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bflab/sequential.hpp"

namespace bflab {

inline constexpr std::uint64_t kDefaultReplicates = 20000;
inline constexpr std::uint64_t kDefaultMasterSeed = 2019;
inline constexpr const char* kOutputDirEnv = "BFLAB_OUTPUT_DIR";

struct ExperimentConfig {
    std::string name = "experiment";
    PriorSpec prior{};
    GenerationMode mode{};
    StoppingRule rule{};
    double prior_odds = 1.0;
    std::uint64_t replicates = kDefaultReplicates;  // per hypothesis
    std::uint64_t master_seed = kDefaultMasterSeed;
    double bin_width = 0.1;
    std::uint64_t min_count = 20;
    std::optional<DesignMatrix> design;
    std::vector<Hypothesis> hypotheses{Hypothesis::H0, Hypothesis::H1};
    std::optional<double> alpha;     // report Type-I error at this level
    std::optional<double> type2_B;   // report Type-II error for threshold B
    std::vector<std::uint64_t> gprior_curve_sizes;  // emit g-prior densities for these design sizes
    std::string output_dir;          // empty: environment or default

    bool operator==(const ExperimentConfig&) const = default;

    Family family() const { return prior.family; }
    bool runs(Hypothesis h) const;
    TrialSpec trial_spec() const;
    /// Throws ValidationError naming the offending field.
    void validate() const;
};

/// Parses a JSON document. A "preset" key starts from that preset; every
/// other key overrides it. Unknown keys are rejected.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Full JSON form (no "preset" key); parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

/// --out flag, then config.output_dir, then $BFLAB_OUTPUT_DIR, then ./bflab-out/<name>.
std::filesystem::path resolve_output_dir(const ExperimentConfig& config, const std::string& cli_override = {});

}  // namespace bflab
