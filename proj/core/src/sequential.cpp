#include "bflab/sequential.hpp"

#include <cmath>

#include "bflab/errors.hpp"

namespace bflab {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

[[noreturn]] void mismatch() { throw InvalidArgument("step does not match the statistics' family"); }

}  // namespace

double RegressionSums::centered_sxx() const {
    if (n == 0) return 0.0;
    return std::max(0.0, sum_xx - sum_x * sum_x / static_cast<double>(n));
}

std::optional<double> RegressionSums::r_squared() const {
    if (n < 3) return std::nullopt;
    const double nd = static_cast<double>(n);
    const double sxx = sum_xx - sum_x * sum_x / nd;
    const double syy = sum_yy - sum_y * sum_y / nd;
    const double sxy = sum_xy - sum_x * sum_y / nd;
    if (!(sxx > 0.0) || !(syy > 0.0)) return std::nullopt;
    return std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
}

SufficientStats empty_stats(Family family) {
    switch (family) {
        case Family::NormalKnownVar:
        case Family::NormalJeffreysVar:
        case Family::TTestJzs:
            return SufficientStatsNormal{};
        case Family::RegressionGPrior:
            return RegressionSums{};
        case Family::Bernoulli:
            return BernoulliTally{};
        case Family::Contingency:
            return CellCounts{};
    }
    throw InvalidArgument("unknown family");
}

SufficientStats update_stats(SufficientStats stats, const StepUnit& step) {
    std::visit(Overloaded{
                   [](SufficientStatsNormal& s, const ScalarObservation& o) { s.add(o.x); },
                   [](RegressionSums& s, const RegressionRow& r) {
                       ++s.n;
                       s.sum_x += r.x;
                       s.sum_xx += r.x * r.x;
                       s.sum_y += r.y;
                       s.sum_yy += r.y * r.y;
                       s.sum_xy += r.x * r.y;
                   },
                   [](BernoulliTally& s, const BinaryObservation& o) { ++(o.one ? s.n1 : s.n0); },
                   [](CellCounts& s, const CellObservation& o) {
                       for (std::size_t i = 0; i < 4; ++i) s.counts[i] += o.increments[i];
                   },
                   [](auto&, const auto&) { mismatch(); },
               },
               stats, step);
    return stats;
}

SufficientStats batch_stats(Family family, std::span<const StepUnit> steps) {
    SufficientStats s = empty_stats(family);
    for (const auto& step : steps) s = update_stats(std::move(s), step);
    return s;
}

StoppingRule StoppingRule::fixed_n(std::uint64_t n) {
    StoppingRule r;
    r.kind = Kind::FixedN;
    r.n_fixed = n;
    r.min_n = n;
    r.max_n = n;
    return r;
}

StoppingRule StoppingRule::symmetric(double B, std::uint64_t max_n, std::uint64_t min_n) {
    StoppingRule r;
    r.kind = Kind::SymmetricThreshold;
    r.B = B;
    r.min_n = min_n;
    r.max_n = max_n;
    return r;
}

StoppingRule StoppingRule::one_sided(double B, std::uint64_t max_n, std::uint64_t min_n) {
    StoppingRule r = symmetric(B, max_n, min_n);
    r.kind = Kind::OneSidedThreshold;
    return r;
}

void StoppingRule::validate() const {
    if (kind == Kind::FixedN) {
        if (n_fixed < 1) throw InvalidArgument("fixed-n rule needs n >= 1");
        return;
    }
    if (!(B > 1.0) || !std::isfinite(B)) throw InvalidArgument("odds threshold B must exceed 1");
    if (min_n < 1) throw InvalidArgument("min_n must be >= 1");
    if (max_n < min_n) throw InvalidArgument("max_n must be >= min_n");
}

bool StoppingRule::can_stop_at(std::uint64_t n) const {
    if (kind == Kind::FixedN) return n >= n_fixed;
    return n >= min_n || n >= max_n;
}

std::string_view to_string(StoppingRule::Kind k) {
    switch (k) {
        case StoppingRule::Kind::FixedN: return "fixed_n";
        case StoppingRule::Kind::SymmetricThreshold: return "symmetric";
        case StoppingRule::Kind::OneSidedThreshold: return "one_sided";
    }
    return "?";
}

StoppingRule::Kind parse_stopping_kind(std::string_view s) {
    if (s == "fixed_n") return StoppingRule::Kind::FixedN;
    if (s == "symmetric") return StoppingRule::Kind::SymmetricThreshold;
    if (s == "one_sided") return StoppingRule::Kind::OneSidedThreshold;
    throw InvalidArgument("unknown stopping rule kind '" + std::string(s) + "'");
}

std::string_view to_string(StopReason r) {
    switch (r) {
        case StopReason::Threshold: return "threshold";
        case StopReason::MaxN: return "max_n";
        case StopReason::FixedN: return "fixed_n";
        case StopReason::Failed: return "failed";
    }
    return "?";
}

StopReason parse_stop_reason(std::string_view s) {
    if (s == "threshold") return StopReason::Threshold;
    if (s == "max_n") return StopReason::MaxN;
    if (s == "fixed_n") return StopReason::FixedN;
    if (s == "failed") return StopReason::Failed;
    throw InvalidArgument("unknown stop reason '" + std::string(s) + "'");
}

std::string_view to_string(Decision d) {
    switch (d) {
        case Decision::AcceptH0: return "accept_h0";
        case Decision::RejectH0: return "reject_h0";
        case Decision::Undecided: return "undecided";
    }
    return "?";
}

std::optional<StopReason> should_stop(const StoppingRule& rule, LogOdds odds, std::uint64_t n) {
    using Kind = StoppingRule::Kind;
    if (rule.kind == Kind::FixedN) {
        if (n >= rule.n_fixed) return StopReason::FixedN;
        return std::nullopt;
    }
    const double log_b = std::log(rule.B);
    if (n >= rule.min_n) {
        if (odds.value >= log_b) return StopReason::Threshold;
        if (rule.kind == Kind::SymmetricThreshold && odds.value <= -log_b) return StopReason::Threshold;
    }
    if (n >= rule.max_n) return StopReason::MaxN;
    return std::nullopt;
}

void TrialSpec::validate() const {
    prior.validate();
    rule.validate();
    if (!(prior_odds > 0.0) || !std::isfinite(prior_odds)) throw InvalidArgument("prior odds must be positive");
    const bool regression = prior.family == Family::RegressionGPrior;
    if (regression != design.has_value()) {
        throw InvalidArgument("a design is required for regression and only for regression");
    }
    if (design) design->validate();
    if (prior.family == Family::TTestJzs && rule.horizon() < 2) {
        throw InvalidArgument("t-test trials need at least two observations");
    }
    if (regression && rule.horizon() < 3) throw InvalidArgument("regression trials need at least three rows");
}

BayesFactorEvaluator::BayesFactorEvaluator(const TrialSpec& spec) : prior_(spec.prior) {
    if (prior_.family == Family::RegressionGPrior && prior_.regression_design == RegressionPriorDesign::Maximum) {
        const DesignMatrix full = spec.design->prefix(spec.rule.horizon());
        max_design_n_ = static_cast<double>(full.size());
        max_design_sxx_ = full.centered_sum_squares();
    }
}

std::optional<LogBayesFactor> BayesFactorEvaluator::operator()(const SufficientStats& stats) const {
    switch (prior_.family) {
        case Family::NormalKnownVar:
            return log_bf_normal_known_var(std::get<SufficientStatsNormal>(stats));
        case Family::NormalJeffreysVar:
            return log_bf_normal_jeffreys_var(std::get<SufficientStatsNormal>(stats));
        case Family::TTestJzs: {
            const auto& s = std::get<SufficientStatsNormal>(stats);
            if (s.n < 2) return std::nullopt;
            return log_bf_ttest_jzs(TTestStat::from_stats(s, prior_.null_mean, prior_.cauchy_scale));
        }
        case Family::RegressionGPrior: {
            const auto& s = std::get<RegressionSums>(stats);
            const auto r2 = s.r_squared();
            if (!r2) return std::nullopt;
            RegressionStat rs{s.n, 1, *r2, 0.0};
            if (max_design_n_ > 0.0) {
                // prior variance g sigma^2 N/Sxx of the full design, in units of
                // the current (X'X)^{-1}
                rs.g_scale = max_design_n_ * s.centered_sxx() / max_design_sxx_;
            }
            return log_bf_regression_gprior(rs, prior_.gprior);
        }
        case Family::Bernoulli: {
            const auto& s = std::get<BernoulliTally>(stats);
            return log_bf_bernoulli_jeffreys({s.n1, s.n0, prior_.bernoulli_null});
        }
        case Family::Contingency: {
            const auto& s = std::get<CellCounts>(stats);
            return log_bf_contingency_gd({s.counts, prior_.scheme, prior_.dirichlet_a, prior_.poisson_rate});
        }
    }
    throw InvalidArgument("unknown family");
}

namespace {

// Per-replicate numerical trouble is recorded on the outcome, not thrown.
TrialOutcome mark_failed(TrialOutcome out, std::uint64_t n, const Error& e) {
    out.n_stop = n;
    out.stopped_by = StopReason::Failed;
    out.failure = e.what();
    out.final_log_bf = {std::nan("")};
    out.final_log_odds = {std::nan("")};
    return out;
}

}  // namespace

TrialOutcome run_trial(const TrialSpec& spec, Hypothesis hypothesis, Rng& rng, std::uint64_t replicate_index,
                       const TrialOptions& options) {
    spec.validate();
    TrialOutcome out;
    out.replicate_index = replicate_index;
    out.generating_hypothesis = hypothesis;

    const DesignMatrix* design = spec.design ? &*spec.design : nullptr;
    std::optional<DesignMatrix> prior_design;
    if (design) prior_design = design->prefix(spec.rule.horizon());
    out.parameter_draw =
        sample_parameters(spec.prior, hypothesis, spec.mode, rng, prior_design ? &*prior_design : nullptr);

    const BayesFactorEvaluator evaluate(spec);
    SufficientStats stats = empty_stats(spec.prior.family);
    const std::uint64_t horizon = spec.rule.horizon();
    std::uint64_t n = 0;
    try {
        for (n = 1; n <= horizon; ++n) {
            const StepUnit step = sample_step(out.parameter_draw, design, n - 1, rng);
            if (options.keep_steps) out.steps.push_back(step);
            stats = update_stats(std::move(stats), step);
            if (!spec.rule.can_stop_at(n)) continue;

            const auto bf = evaluate(stats);
            if (!bf) {
                if (n == horizon) throw InvalidArgument("Bayes factor undefined at the final step");
                continue;
            }
            const LogOdds odds = posterior_odds(*bf, spec.prior_odds);
            if (options.keep_path) out.log_odds_path.emplace_back(n, odds.value);
            if (const auto reason = should_stop(spec.rule, odds, n)) {
                out.n_stop = n;
                out.stopped_by = *reason;
                out.final_log_bf = *bf;
                out.final_log_odds = odds;
                if (spec.rule.kind != StoppingRule::Kind::FixedN) {
                    if (*reason == StopReason::Threshold) {
                        out.decision = odds.value > 0.0 ? Decision::RejectH0 : Decision::AcceptH0;
                    } else {
                        out.decision = Decision::Undecided;
                    }
                }
                return out;
            }
        }
    } catch (const NumericFailure& e) {
        return mark_failed(std::move(out), n, e);
    } catch (const DivergentEvidence& e) {
        return mark_failed(std::move(out), n, e);
    } catch (const DegenerateData& e) {
        return mark_failed(std::move(out), n, e);
    }
    throw InvalidArgument("stopping rule never fired");
}

}  // namespace bflab
