#include "bflab/runner.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "bflab/errors.hpp"
#include "bflab/rng.hpp"

namespace bflab {

std::uint64_t hypothesis_seed_tag(Hypothesis h) { return h == Hypothesis::H0 ? 0 : 1; }

std::vector<TrialOutcome> run_batch(const TrialSpec& spec, Hypothesis hypothesis, std::uint64_t replicates,
                                    std::uint64_t master_seed, unsigned workers, const TrialOptions& options) {
    spec.validate();
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(replicates, 1)));

    std::vector<TrialOutcome> results(replicates);
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    const std::uint64_t tag = hypothesis_seed_tag(hypothesis);

    auto work = [&] {
        for (;;) {
            const std::uint64_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= replicates) return;
            try {
                Rng rng(derive_seed(master_seed, tag, i));
                results[i] = run_trial(spec, hypothesis, rng, i, options);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                next.store(replicates);
                return;
            }
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (first_error) std::rethrow_exception(first_error);
    return results;
}

CalibrationSummary summarize_calibration(std::span<const TrialOutcome> h0, std::span<const TrialOutcome> h1,
                                         double bin_width, std::uint64_t min_count) {
    CalibrationSummary s;
    s.table = bin_outcomes(h0, h1, bin_width, min_count);
    try {
        s.points = observed_vs_nominal(s.table);
    } catch (const EmptyResult&) {
        return s;
    }
    s.band_fraction = identity_band_fraction(s.points);
    if (s.points.size() >= 3) {
        try {
            s.deviation = calibration_deviation(s.points);
        } catch (const InvalidArgument&) {
        }
        s.spearman = spearman_correlation(s.points);
    }
    return s;
}

namespace {

std::uint64_t count_failed(const std::vector<TrialOutcome>& v) {
    return static_cast<std::uint64_t>(std::count_if(v.begin(), v.end(), [](const auto& o) { return o.failed(); }));
}

void check_failures(std::uint64_t failed, std::uint64_t total, Hypothesis h) {
    if (total == 0) return;
    if (static_cast<double>(failed) > kMaxFailureFraction * static_cast<double>(total)) {
        throw FailureThresholdExceeded(std::to_string(failed) + " of " + std::to_string(total) + " " +
                                       std::string(to_string(h)) + " replicates failed (limit 1%)");
    }
}

}  // namespace

ExperimentResults run_experiment(const ExperimentConfig& config, unsigned workers) {
    config.validate();
    ExperimentResults r;
    r.config = config;
    const TrialSpec spec = config.trial_spec();
    if (config.runs(Hypothesis::H0)) {
        r.h0 = run_batch(spec, Hypothesis::H0, config.replicates, config.master_seed, workers);
        r.failed_h0 = count_failed(r.h0);
        check_failures(r.failed_h0, r.h0.size(), Hypothesis::H0);
    }
    if (config.runs(Hypothesis::H1)) {
        r.h1 = run_batch(spec, Hypothesis::H1, config.replicates, config.master_seed, workers);
        r.failed_h1 = count_failed(r.h1);
        check_failures(r.failed_h1, r.h1.size(), Hypothesis::H1);
    }
    if (!r.h0.empty() && !r.h1.empty()) {
        r.calibration = summarize_calibration(r.h0, r.h1, config.bin_width, config.min_count);
    }
    if (config.alpha) r.type1 = type1_error_optional_stopping(r.h0, *config.alpha);
    if (config.type2_B) r.type2 = type2_error_schoenbrodt(r.h1, *config.type2_B);
    return r;
}

}  // namespace bflab
