#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "bflab/errors.hpp"
#include "bflab/presets.hpp"
#include "bflab/sequential.hpp"

using namespace bflab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

TrialSpec spec_of(const char* preset) { return find_preset(preset).config.trial_spec(); }

const char* kAllPresets[] = {"fig1",         "fig1-optional-stopping", "fig2a-sigma2", "fig3b",
                             "fig4b",        "fig6a",                  "regression-os-maximum",
                             "appendix-poisson-os", "appendix-multinomial-prior-os", "type1-bernoulli"};

}  // namespace

TEST_CASE("boundaries are inclusive", "[sequential]") {
    const auto rule = StoppingRule::symmetric(10.0, 25, 3);
    const double lb = std::log(10.0);
    CHECK(should_stop(rule, {lb}, 5) == StopReason::Threshold);
    CHECK(should_stop(rule, {-lb}, 5) == StopReason::Threshold);
    CHECK_FALSE(should_stop(rule, {std::nextafter(lb, 0.0)}, 5).has_value());
    CHECK_FALSE(should_stop(rule, {lb}, 2).has_value());  // before min_n
    CHECK(should_stop(rule, {0.0}, 25) == StopReason::MaxN);
    CHECK(should_stop(rule, {lb}, 25) == StopReason::Threshold);

    const auto one = StoppingRule::one_sided(20.0, 25);
    CHECK_FALSE(should_stop(one, {-10.0}, 5).has_value());
    CHECK(should_stop(one, {std::log(20.0)}, 5) == StopReason::Threshold);

    const auto fixed = StoppingRule::fixed_n(10);
    CHECK_FALSE(should_stop(fixed, {100.0}, 9).has_value());
    CHECK(should_stop(fixed, {0.0}, 10) == StopReason::FixedN);
}

TEST_CASE("rule validation", "[sequential]") {
    CHECK_THROWS_AS(StoppingRule::fixed_n(0).validate(), InvalidArgument);
    CHECK_THROWS_AS(StoppingRule::symmetric(1.0, 10).validate(), InvalidArgument);
    CHECK_THROWS_AS(StoppingRule::symmetric(10.0, 5, 6).validate(), InvalidArgument);
    CHECK_NOTHROW(StoppingRule::symmetric(10.0, 5, 5).validate());
}

TEST_CASE("incremental statistics equal batch statistics", "[sequential][property]") {
    Rng rng(11);
    for (const char* name : kAllPresets) {
        const auto spec = spec_of(name);
        const DesignMatrix* design = spec.design ? &*spec.design : nullptr;
        for (auto h : {Hypothesis::H0, Hypothesis::H1}) {
            for (int rep = 0; rep < 20; ++rep) {
                const auto draw = sample_parameters(spec.prior, h, spec.mode, rng, design);
                const auto steps = sample_data(draw, design, 1 + rng.engine()() % 60, rng);
                auto inc = empty_stats(spec.prior.family);
                for (const auto& s : steps) inc = update_stats(inc, s);
                const auto batch = batch_stats(spec.prior.family, steps);
                REQUIRE(inc.index() == batch.index());
                if (auto* a = std::get_if<SufficientStatsNormal>(&inc)) {
                    const auto& b = std::get<SufficientStatsNormal>(batch);
                    CHECK(a->n == b.n);
                    CHECK(a->sum_x == b.sum_x);
                    CHECK(a->sum_x2 == b.sum_x2);
                } else if (auto* r = std::get_if<RegressionSums>(&inc)) {
                    const auto& b = std::get<RegressionSums>(batch);
                    CHECK(r->n == b.n);
                    CHECK(r->sum_xy == b.sum_xy);
                } else if (auto* t = std::get_if<BernoulliTally>(&inc)) {
                    CHECK(t->n1 + t->n0 == steps.size());
                    CHECK(t->n1 == std::get<BernoulliTally>(batch).n1);
                } else {
                    CHECK(std::get<CellCounts>(inc).counts == std::get<CellCounts>(batch).counts);
                }
            }
        }
    }
}

TEST_CASE("statistics reject a family mismatch", "[sequential]") {
    CHECK_THROWS_AS(update_stats(empty_stats(Family::Bernoulli), StepUnit{ScalarObservation{1.0}}), InvalidArgument);
}

TEST_CASE("final Bayes factor matches a direct evaluation of the kept data", "[sequential][property]") {
    Rng rng(12);
    for (const char* name : kAllPresets) {
        const auto spec = spec_of(name);
        const BayesFactorEvaluator eval(spec);
        for (auto h : {Hypothesis::H0, Hypothesis::H1}) {
            for (int rep = 0; rep < 10; ++rep) {
                const auto out = run_trial(spec, h, rng, rep, {.keep_steps = true, .keep_path = true});
                REQUIRE_FALSE(out.failed());
                REQUIRE(out.steps.size() == out.n_stop);
                const auto direct = eval(batch_stats(spec.prior.family, out.steps));
                REQUIRE(direct.has_value());
                CHECK_THAT(out.final_log_bf.value, WithinAbs(direct->value, 1e-9 * (1 + std::abs(direct->value))));
                REQUIRE_FALSE(out.log_odds_path.empty());
                CHECK(out.log_odds_path.back().first == out.n_stop);
                CHECK(out.log_odds_path.back().second == out.final_log_odds.value);
                // no earlier evaluated step crossed the boundary
                if (spec.rule.kind != StoppingRule::Kind::FixedN) {
                    for (std::size_t i = 0; i + 1 < out.log_odds_path.size(); ++i) {
                        const auto [n, lo] = out.log_odds_path[i];
                        CHECK_FALSE(should_stop(spec.rule, {lo}, n).has_value());
                    }
                }
                CHECK(out.n_stop <= spec.rule.horizon());
            }
        }
    }
}

TEST_CASE("fixed-n trials stop at n", "[sequential]") {
    Rng rng(13);
    const auto spec = spec_of("fig1");
    for (int i = 0; i < 50; ++i) {
        const auto out = run_trial(spec, Hypothesis::H1, rng);
        CHECK(out.n_stop == 10);
        CHECK(out.stopped_by == StopReason::FixedN);
        CHECK_FALSE(out.decision.has_value());
    }
}

TEST_CASE("threshold trials report a decision", "[sequential]") {
    Rng rng(14);
    const auto spec = spec_of("fig1-optional-stopping");
    int threshold = 0;
    for (int i = 0; i < 200; ++i) {
        const auto out = run_trial(spec, Hypothesis::H0, rng);
        REQUIRE(out.decision.has_value());
        if (out.stopped_by == StopReason::Threshold) {
            ++threshold;
            CHECK(std::abs(out.final_log_odds.value) >= std::log(10.0));
            CHECK(*out.decision == (out.final_log_odds.value > 0 ? Decision::RejectH0 : Decision::AcceptH0));
        } else {
            CHECK(out.stopped_by == StopReason::MaxN);
            CHECK(out.n_stop == 25);
            CHECK(*out.decision == Decision::Undecided);
        }
    }
    CHECK(threshold > 0);
}

TEST_CASE("trials are reproducible from the seed", "[sequential]") {
    const auto spec = spec_of("fig3b");
    Rng a(99);
    Rng b(99);
    for (int i = 0; i < 20; ++i) {
        const auto x = run_trial(spec, Hypothesis::H1, a, i);
        const auto y = run_trial(spec, Hypothesis::H1, b, i);
        CHECK(x.final_log_bf.value == y.final_log_bf.value);
        CHECK(x.n_stop == y.n_stop);
        CHECK(x.parameter_draw.values == y.parameter_draw.values);
    }
}

TEST_CASE("t-test Bayes factor waits for two observations", "[sequential]") {
    const BayesFactorEvaluator eval(spec_of("fig3a"));
    auto s = empty_stats(Family::TTestJzs);
    s = update_stats(s, ScalarObservation{1.2});
    CHECK_FALSE(eval(s).has_value());
    s = update_stats(s, ScalarObservation{0.7});
    CHECK(eval(s).has_value());
}

TEST_CASE("regression Bayes factor waits for R squared", "[sequential]") {
    const BayesFactorEvaluator eval(spec_of("fig6a"));
    auto s = empty_stats(Family::RegressionGPrior);
    s = update_stats(s, RegressionRow{0.1, 1.0});
    s = update_stats(s, RegressionRow{0.2, 1.5});
    CHECK_FALSE(eval(s).has_value());
    s = update_stats(s, RegressionRow{0.3, 1.1});
    CHECK(eval(s).has_value());
}

TEST_CASE("trial spec validation", "[sequential]") {
    auto spec = spec_of("fig6a");
    spec.design.reset();
    CHECK_THROWS_AS(spec.validate(), InvalidArgument);
    spec = spec_of("fig1");
    spec.prior_odds = 0.0;
    CHECK_THROWS_AS(spec.validate(), InvalidArgument);
}
