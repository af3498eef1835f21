#pragma once

// One sequential trial: data arrive one StepUnit at a time, sufficient
// statistics are updated in O(1), the log Bayes factor is recomputed and the
// stopping rule is consulted after every step.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bflab/bayes_core.hpp"
#include "bflab/genmodel.hpp"
#include "bflab/step.hpp"

namespace bflab {

struct RegressionSums {
    std::uint64_t n = 0;
    double sum_x = 0.0;
    double sum_xx = 0.0;
    double sum_y = 0.0;
    double sum_yy = 0.0;
    double sum_xy = 0.0;

    double centered_sxx() const;
    /// nullopt while R^2 is undefined (n < 3, constant x or constant y).
    std::optional<double> r_squared() const;
};

struct BernoulliTally {
    std::uint64_t n1 = 0;
    std::uint64_t n0 = 0;
};

struct CellCounts {
    std::array<std::uint64_t, 4> counts{};
};

using SufficientStats = std::variant<SufficientStatsNormal, RegressionSums, BernoulliTally, CellCounts>;

SufficientStats empty_stats(Family family);

/// Folds one step into the statistics; throws InvalidArgument on a family mismatch.
SufficientStats update_stats(SufficientStats stats, const StepUnit& step);

/// Left fold of `steps` over empty statistics.
SufficientStats batch_stats(Family family, std::span<const StepUnit> steps);

struct StoppingRule {
    enum class Kind { FixedN, SymmetricThreshold, OneSidedThreshold };
    Kind kind = Kind::FixedN;
    std::uint64_t n_fixed = 0;
    double B = 10.0;
    std::uint64_t min_n = 1;
    std::uint64_t max_n = 0;

    static StoppingRule fixed_n(std::uint64_t n);
    static StoppingRule symmetric(double B, std::uint64_t max_n, std::uint64_t min_n = 1);
    static StoppingRule one_sided(double B, std::uint64_t max_n, std::uint64_t min_n = 1);

    bool operator==(const StoppingRule&) const = default;

    void validate() const;
    /// Largest step count the rule can reach.
    std::uint64_t horizon() const { return kind == Kind::FixedN ? n_fixed : max_n; }
    /// False while no evidence value can end the trial at step n.
    bool can_stop_at(std::uint64_t n) const;
};

std::string_view to_string(StoppingRule::Kind k);
StoppingRule::Kind parse_stopping_kind(std::string_view s);

enum class StopReason { Threshold, MaxN, FixedN, Failed };
enum class Decision { AcceptH0, RejectH0, Undecided };

std::string_view to_string(StopReason r);
std::string_view to_string(Decision d);
StopReason parse_stop_reason(std::string_view s);

/// nullopt means continue sampling.
std::optional<StopReason> should_stop(const StoppingRule& rule, LogOdds odds, std::uint64_t n);

/// Everything that determines a trial besides the hypothesis and the RNG.
struct TrialSpec {
    PriorSpec prior{};
    GenerationMode mode{};
    StoppingRule rule{};
    double prior_odds = 1.0;
    std::optional<DesignMatrix> design;  // regression only

    void validate() const;
};

struct TrialOptions {
    bool keep_steps = false;  // record the generated data stream
    bool keep_path = false;   // record log odds after every evaluated step
};

struct TrialOutcome {
    std::uint64_t replicate_index = 0;
    Hypothesis generating_hypothesis = Hypothesis::H0;
    ParameterDraw parameter_draw{};
    std::uint64_t n_stop = 0;
    StopReason stopped_by = StopReason::FixedN;
    LogBayesFactor final_log_bf{};
    LogOdds final_log_odds{};
    std::optional<Decision> decision;
    std::string failure;  // non-empty iff stopped_by == Failed

    std::vector<StepUnit> steps;
    std::vector<std::pair<std::uint64_t, double>> log_odds_path;

    bool failed() const { return stopped_by == StopReason::Failed; }
};

/// Evaluates the family's log BF from running statistics. Holds the prior and,
/// for regression, the design that pins the g-prior covariance.
class BayesFactorEvaluator {
public:
    explicit BayesFactorEvaluator(const TrialSpec& spec);

    /// nullopt while the Bayes factor is undefined (t-test with n < 2,
    /// regression before R^2 exists).
    std::optional<LogBayesFactor> operator()(const SufficientStats& stats) const;

private:
    PriorSpec prior_;
    // regression with a max-design prior: n * Sxx normalizer of that design
    double max_design_n_ = 0.0;
    double max_design_sxx_ = 0.0;
};

TrialOutcome run_trial(const TrialSpec& spec, Hypothesis hypothesis, Rng& rng, std::uint64_t replicate_index = 0,
                       const TrialOptions& options = {});

}  // namespace bflab
