// bflab command line: simulate, bf, calibrate, check.
//
// Exit codes: 0 success, 1 other failure (I/O, failed checks), 2 validation
// error, 3 too many failed replicates.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bflab/bayes_core.hpp"
#include "bflab/checks.hpp"
#include "bflab/errors.hpp"
#include "bflab/format.hpp"
#include "bflab/output.hpp"
#include "bflab/presets.hpp"
#include "bflab/runner.hpp"

namespace {

using namespace bflab;

constexpr int kExitFailure = 1;
constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("--config", "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct SimulateArgs {
    std::string config;
    std::string preset;
    unsigned workers = 0;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> replicates;
    std::string out;
};

int simulate(const SimulateArgs& a) {
    if (a.config.empty() && a.preset.empty()) throw ValidationError("--config", "give --config or --preset");
    nlohmann::json j = nlohmann::json::object();
    if (!a.config.empty()) {
        try {
            j = nlohmann::json::parse(read_text(a.config));
        } catch (const nlohmann::json::parse_error& e) {
            throw ValidationError(a.config, e.what());
        }
    }
    if (!a.preset.empty()) j["preset"] = a.preset;
    if (a.seed) j["master_seed"] = *a.seed;
    if (a.replicates) j["replicates"] = *a.replicates;
    const ExperimentConfig config = parse_config(j.dump());
    const auto dir = resolve_output_dir(config, a.out);

    const auto t0 = std::chrono::steady_clock::now();
    const ExperimentResults r = run_experiment(config, a.workers);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto files = write_results(r, dir);

    std::printf("%s: %llu replicates per hypothesis in %.1f s\n", config.name.c_str(),
                static_cast<unsigned long long>(config.replicates), secs);
    if (r.calibration) {
        const auto& c = *r.calibration;
        std::printf("  calibration points %zu", c.points.size());
        if (c.deviation) std::printf(", slope %.4f, max |obs - nom| %.4f", c.deviation->slope, c.deviation->max_abs_dev);
        if (!c.points.empty()) std::printf(", inside 3-SE band %.1f%%", 100.0 * c.band_fraction);
        std::printf("\n");
    }
    if (r.type1) std::printf("  Type-I rate %.4f (se %.4f)\n", r.type1->rate, r.type1->mc_standard_error);
    if (r.type2) std::printf("  Type-II rate %.4f (se %.4f)\n", r.type2->rate, r.type2->mc_standard_error);
    if (r.failed_h0 + r.failed_h1 > 0) {
        std::printf("  failed replicates: H0 %llu, H1 %llu\n", static_cast<unsigned long long>(r.failed_h0),
                    static_cast<unsigned long long>(r.failed_h1));
    }
    for (const auto& f : files) std::printf("  wrote %s\n", f.string().c_str());
    return 0;
}

struct BfArgs {
    std::string family;
    std::vector<double> stats;
    std::string scheme = "poisson";
    double a = 1.0;
};

std::uint64_t as_count(double v, const char* what) {
    if (!(v >= 0.0) || v != std::floor(v)) throw ValidationError("--stats", std::string(what) + " must be a count");
    return static_cast<std::uint64_t>(v);
}

void need(const BfArgs& a, std::size_t lo, std::size_t hi, const char* usage) {
    if (a.stats.size() < lo || a.stats.size() > hi) {
        throw ValidationError("--stats", a.family + " expects " + usage);
    }
}

int bayes_factor(const BfArgs& a) {
    const Family f = parse_family(a.family);
    const auto& s = a.stats;
    LogBayesFactor bf;
    switch (f) {
        case Family::NormalKnownVar:
            need(a, 2, 2, "n sum_x");
            bf = log_bf_normal_known_var({as_count(s[0], "n"), s[1], 0.0});
            break;
        case Family::NormalJeffreysVar:
            need(a, 3, 3, "n sum_x sum_x2");
            bf = log_bf_normal_jeffreys_var({as_count(s[0], "n"), s[1], s[2]});
            break;
        case Family::TTestJzs: {
            need(a, 2, 3, "t n [r]");
            TTestStat t;
            t.t = s[0];
            t.n = as_count(s[1], "n");
            if (s.size() == 3) t.r = s[2];
            bf = log_bf_ttest_jzs(t);
            break;
        }
        case Family::RegressionGPrior: {
            need(a, 3, 3, "r_squared n p");
            RegressionStat r;
            r.r_squared = s[0];
            r.n = as_count(s[1], "n");
            r.p = as_count(s[2], "p");
            bf = log_bf_regression_gprior(r);
            break;
        }
        case Family::Bernoulli:
            need(a, 2, 3, "n1 n0 [theta0]");
            bf = log_bf_bernoulli_jeffreys({as_count(s[0], "n1"), as_count(s[1], "n0"), s.size() == 3 ? s[2] : 0.5});
            break;
        case Family::Contingency: {
            need(a, 4, 4, "N1 N2 N3 N4");
            ContingencyTable2x2 t;
            for (int i = 0; i < 4; ++i) t.counts[i] = as_count(s[i], "cell count");
            t.scheme = parse_scheme(a.scheme);
            t.a = a.a;
            bf = log_bf_contingency_gd(t);
            break;
        }
    }
    std::printf("{\"family\": \"%s\", \"log_bf10\": %s, \"bf10\": %s, \"log10_bf10\": %s}\n", a.family.c_str(),
                format_double(bf.value).c_str(), format_double(std::exp(bf.value)).c_str(),
                format_double(to_log10(bf.value)).c_str());
    return 0;
}

struct CalibrateArgs {
    std::string outcomes;
    double bin_width = 0.1;
    std::uint64_t min_count = 20;
    std::string out;
};

int calibrate(const CalibrateArgs& a) {
    const auto records = read_outcomes_csv(a.outcomes);
    std::vector<TrialOutcome> h0;
    std::vector<TrialOutcome> h1;
    for (const auto& r : records) {
        TrialOutcome o;
        o.replicate_index = r.replicate_index;
        o.generating_hypothesis = r.hypothesis;
        o.n_stop = r.n_stop;
        o.stopped_by = r.stopped_by;
        o.final_log_bf = {r.log_bf};
        o.final_log_odds = {r.log_posterior_odds};
        (r.hypothesis == Hypothesis::H0 ? h0 : h1).push_back(std::move(o));
    }
    const auto s = summarize_calibration(h0, h1, a.bin_width, a.min_count);
    if (s.points.empty()) throw EmptyResult("no bin has " + std::to_string(a.min_count) + " outcomes under both hypotheses");
    if (a.out.empty()) {
        std::fputs(calibration_csv(s.points).c_str(), stdout);
    } else {
        write_file_atomic(std::filesystem::path(a.out) / "calibration.csv", calibration_csv(s.points));
        write_file_atomic(std::filesystem::path(a.out) / "histogram.csv", histogram_csv(s.table));
    }
    std::fprintf(stderr, "points %zu", s.points.size());
    if (s.deviation) std::fprintf(stderr, ", slope %.4f", s.deviation->slope);
    std::fprintf(stderr, ", inside 3-SE band %.1f%%\n", 100.0 * s.band_fraction);
    return 0;
}

int check(const std::string& suite, const CheckOptions& options) {
    bool ok = true;
    for (const auto& r : run_check_suite(suite, options)) {
        std::printf("%s %s: %.3g (bound %.3g)%s%s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.value, r.bound,
                    r.detail.empty() ? "" : " ", r.detail.c_str());
        ok = ok && r.passed;
    }
    return ok ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayes factor calibration lab"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "run an experiment and write its results");
    sim_cmd->add_option("--config", sim.config, "experiment JSON");
    sim_cmd->add_option("--preset", sim.preset, "start from a named preset");
    sim_cmd->add_option("--workers", sim.workers, "worker threads (0 = all cores)");
    sim_cmd->add_option("--seed", sim.seed, "master seed");
    sim_cmd->add_option("--replicates", sim.replicates, "replicates per hypothesis");
    sim_cmd->add_option("--out", sim.out, "output directory");

    bool list = false;
    auto* presets_cmd = app.add_subcommand("presets", "list presets");
    presets_cmd->add_flag("--json", list, "print each preset's full configuration");

    BfArgs bf;
    auto* bf_cmd = app.add_subcommand("bf", "evaluate one Bayes factor");
    bf_cmd->add_option("family", bf.family, "normal_known_var | normal_jeffreys_var | ttest_jzs | regression_gprior | bernoulli | contingency")
        ->required();
    bf_cmd->add_option("--stats", bf.stats,
                       "normal_known_var: n sum_x; normal_jeffreys_var: n sum_x sum_x2; ttest_jzs: t n [r]; "
                       "regression_gprior: r2 n p; bernoulli: n1 n0 [theta0]; contingency: N1 N2 N3 N4")
        ->required();
    bf_cmd->add_option("--scheme", bf.scheme, "contingency sampling scheme: poisson | joint_multinomial");
    bf_cmd->add_option("--a", bf.a, "contingency prior concentration");

    CalibrateArgs cal;
    auto* cal_cmd = app.add_subcommand("calibrate", "re-bin an outcomes CSV");
    cal_cmd->add_option("--outcomes", cal.outcomes, "outcomes.csv from simulate")->required();
    cal_cmd->add_option("--bin-width", cal.bin_width, "bin width in natural-log odds");
    cal_cmd->add_option("--min-count", cal.min_count, "minimum count per hypothesis for a point");
    cal_cmd->add_option("--out", cal.out, "write calibration.csv and histogram.csv here instead of stdout");

    std::string suite;
    CheckOptions check_opts;
    auto* check_cmd = app.add_subcommand("check", "run a self-check suite");
    check_cmd->add_option("--suite", suite, "martingale | invariance | type1")
        ->required()
        ->check(CLI::IsMember({"martingale", "invariance", "type1"}));
    check_cmd->add_option("--replicates", check_opts.replicates, "replicates for the type1 suite");
    check_cmd->add_option("--workers", check_opts.workers, "worker threads");
    check_cmd->add_option("--seed", check_opts.seed, "master seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (*sim_cmd) return simulate(sim);
        if (*presets_cmd) {
            for (const auto& p : presets()) {
                if (list) {
                    std::printf("%s", serialize_config(p.config).c_str());
                } else {
                    std::printf("%-34s %s\n", p.name.c_str(), p.description.c_str());
                }
            }
            return 0;
        }
        if (*bf_cmd) return bayes_factor(bf);
        if (*cal_cmd) return calibrate(cal);
        if (*check_cmd) return check(suite, check_opts);
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const FailureThresholdExceeded& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumeric;
    } catch (const InvalidArgument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const ImproperPrior& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitFailure;
    }
    return 0;
}
