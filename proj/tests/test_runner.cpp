#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bflab/config.hpp"
#include "bflab/errors.hpp"
#include "bflab/format.hpp"
#include "bflab/output.hpp"
#include "bflab/presets.hpp"
#include "bflab/runner.hpp"

using namespace bflab;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small(const char* preset, std::uint64_t reps) {
    auto c = find_preset(preset).config;
    c.replicates = reps;
    return c;
}

fs::path scratch_dir(const std::string& name) {
    auto p = fs::temp_directory_path() / ("bflab-test-" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

template <class F>
std::string validation_path(F&& f) {
    try {
        f();
    } catch (const ValidationError& e) {
        return e.path();
    }
    return "<no error>";
}

}  // namespace

TEST_CASE("every preset survives a JSON round trip", "[config]") {
    for (const auto& p : presets()) {
        INFO(p.name);
        CHECK_NOTHROW(p.config.validate());
        CHECK(parse_config(serialize_config(p.config)) == p.config);
    }
}

TEST_CASE("presets encode the reference experiments", "[config]") {
    const auto fig1 = find_preset("fig1").config;
    CHECK(fig1.family() == Family::NormalKnownVar);
    CHECK(fig1.rule == StoppingRule::fixed_n(10));
    CHECK(fig1.replicates == 20000);
    CHECK(fig1.prior_odds == 1.0);

    CHECK(find_preset("fig1-optional-stopping").config.rule == StoppingRule::symmetric(10.0, 25));
    CHECK(find_preset("fig2a-sigma2").config.mode.nuisance.at("sigma") == 2.0);
    CHECK(find_preset("fig2b-sigma1").config.rule == StoppingRule::one_sided(10.0, 25));

    const auto fig3a = find_preset("fig3a").config;
    CHECK(fig3a.family() == Family::TTestJzs);
    CHECK(fig3a.prior.null_mean == 1.0);
    CHECK(fig3a.mode.provenance == Provenance::FromPrior);

    const auto fig4b = find_preset("fig4b").config;
    CHECK(fig4b.mode.provenance == Provenance::Fixed);
    CHECK(fig4b.mode.h0.at("mu") == 1.0);
    CHECK(fig4b.mode.h1.at("mu") == 1.3);

    const auto fig6a = find_preset("fig6a").config;
    CHECK(fig6a.design == DesignMatrix::fertilizer_doses());
    CHECK(fig6a.gprior_curve_sizes == std::vector<std::uint64_t>{20, 23, 34});
    CHECK(find_preset("regression-os-maximum").config.prior.regression_design == RegressionPriorDesign::Maximum);

    const auto pois = find_preset("appendix-poisson-fixed").config;
    CHECK(pois.prior.scheme == ContingencyScheme::Poisson);
    CHECK(pois.rule == StoppingRule::fixed_n(100));
    CHECK(pois.mode.h1.at("theta1") == 0.45);
    CHECK(pois.mode.h1.at("theta2") == 0.55);

    const auto mult = find_preset("appendix-multinomial-fixed").config;
    CHECK(mult.prior.scheme == ContingencyScheme::JointMultinomial);
    CHECK(mult.mode.h0.at("theta") == 0.7);

    const auto t1 = find_preset("type1-ttest").config;
    CHECK(t1.hypotheses == std::vector<Hypothesis>{Hypothesis::H0});
    CHECK(t1.alpha == 0.05);

    const auto sb = find_preset("schoenbrodt").config;
    CHECK(sb.replicates == 10000);
    CHECK(sb.rule == StoppingRule::symmetric(7.0, 5000, 20));
    CHECK(sb.type2_B == 7.0);
    CHECK(sb.hypotheses == std::vector<Hypothesis>{Hypothesis::H1});

    CHECK_THROWS_AS(find_preset("fig99"), ValidationError);
}

TEST_CASE("configuration parsing", "[config]") {
    const auto c = parse_config(R"({"preset": "fig1", "replicates": 500, "master_seed": 7})");
    CHECK(c.replicates == 500);
    CHECK(c.master_seed == 7);
    CHECK(c.rule == StoppingRule::fixed_n(10));

    const auto fam = parse_config(R"({"family": "bernoulli", "stopping": {"kind": "fixed_n", "n": 30}})");
    CHECK(fam.prior == PriorSpec::defaults_for(Family::Bernoulli));

    CHECK(validation_path([] { parse_config(R"({"preset": "fig1", "replicates": 0})"); }) == "replicates");
    CHECK(validation_path([] { parse_config(R"({"preset": "fig1", "prior": {"cauchy_scal": 1}})"); }) ==
          "prior.cauchy_scal");
    CHECK(validation_path([] { parse_config(R"({"preset": "fig1", "stopping": {"kind": "symmetric", "n": 5}})"); })
              .starts_with("stopping"));
    CHECK(validation_path([] { parse_config("{not json"); }) != "<no error>");
    CHECK(validation_path([] {
              parse_config(R"({"family": "normal_jeffreys_var", "stopping": {"kind": "fixed_n", "n": 5}})");
          }) == "mode");
    CHECK(validation_path([] {
              parse_config(R"({"family": "contingency", "stopping": {"kind": "fixed_n", "n": 5}})");
          }) == "prior.scheme");
}

TEST_CASE("output directory resolution", "[config]") {
    auto c = find_preset("fig1").config;
    CHECK(resolve_output_dir(c, "cli") == fs::path("cli"));
    ::unsetenv(kOutputDirEnv);
    CHECK(resolve_output_dir(c) == fs::path("bflab-out") / "fig1");
    ::setenv(kOutputDirEnv, "/tmp/envdir", 1);
    CHECK(resolve_output_dir(c) == fs::path("/tmp/envdir") / "fig1");
    c.output_dir = "cfg";
    CHECK(resolve_output_dir(c) == fs::path("cfg"));
    ::unsetenv(kOutputDirEnv);
}

TEST_CASE("seeds are derived per hypothesis and replicate", "[runner]") {
    CHECK(hypothesis_seed_tag(Hypothesis::H0) != hypothesis_seed_tag(Hypothesis::H1));
    const auto spec = find_preset("fig1").config.trial_spec();
    const auto a = run_batch(spec, Hypothesis::H0, 50, 1, 1);
    const auto b = run_batch(spec, Hypothesis::H1, 50, 1, 1);
    const auto c = run_batch(spec, Hypothesis::H0, 50, 2, 1);
    CHECK(a[0].final_log_bf.value != b[0].final_log_bf.value);
    CHECK(a[0].final_log_bf.value != c[0].final_log_bf.value);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].replicate_index == i);
}

TEST_CASE("results do not depend on the worker count", "[runner][property]") {
    for (const char* name : {"fig1-optional-stopping", "fig3b", "regression-os-current", "appendix-poisson-os"}) {
        INFO(name);
        const auto spec = find_preset(name).config.trial_spec();
        const auto one = run_batch(spec, Hypothesis::H1, 300, 5, 1);
        for (unsigned w : {2u, 3u, 8u}) {
            const auto many = run_batch(spec, Hypothesis::H1, 300, 5, w);
            REQUIRE(many.size() == one.size());
            bool same = true;
            for (std::size_t i = 0; i < one.size(); ++i) {
                same = same && one[i].final_log_bf.value == many[i].final_log_bf.value &&
                       one[i].n_stop == many[i].n_stop && one[i].parameter_draw.values == many[i].parameter_draw.values;
            }
            CHECK(same);
        }
    }
}

TEST_CASE("an experiment produces calibration and error rates", "[runner]") {
    const auto r = run_experiment(small("fig1", 2000), 2);
    CHECK(r.h0.size() == 2000);
    CHECK(r.h1.size() == 2000);
    REQUIRE(r.calibration.has_value());
    CHECK(r.calibration->points.size() >= 3);
    CHECK(r.calibration->deviation.has_value());
    CHECK(r.failed_h0 == 0);

    const auto t = run_experiment(small("type1-bernoulli", 500), 1);
    CHECK(t.h1.empty());
    CHECK_FALSE(t.calibration.has_value());
    REQUIRE(t.type1.has_value());
    CHECK(t.type1->n_replicates == 500);
}

TEST_CASE("result files", "[output]") {
    const auto r = run_experiment(small("fig6a", 1000), 1);
    const auto dir = scratch_dir("results");
    const auto files = write_results(r, dir);
    for (const char* f : {"config.json", "outcomes.csv", "histogram.csv", "calibration.csv", "calibration.svg",
                          "gprior_curves.csv", "summary.json"}) {
        CHECK(fs::exists(dir / f));
    }
    for (const auto& f : fs::directory_iterator(dir)) CHECK(f.path().extension() != ".tmp");

    const auto cal = slurp(dir / "calibration.csv");
    CHECK(cal.starts_with(kCalibrationCsvHeader));
    CHECK(line_count(cal) == r.calibration->points.size() + 1);

    const auto svg = slurp(dir / "calibration.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    std::size_t circles = 0;
    for (auto pos = svg.find("class=\"point\""); pos != std::string::npos; pos = svg.find("class=\"point\"", pos + 1))
        ++circles;
    CHECK(circles == r.calibration->points.size());
    CHECK(svg.find("class=\"identity\"") != std::string::npos);

    const auto records = read_outcomes_csv(dir / "outcomes.csv");
    REQUIRE(records.size() == 2000);
    CHECK(records[0].hypothesis == Hypothesis::H0);
    CHECK(records[1000].hypothesis == Hypothesis::H1);
    CHECK(records[1000].replicate_index == 0);
    CHECK(records[17].log_bf == r.h0[17].final_log_bf.value);  // shortest round-trip formatting
    CHECK(records[1500].log_posterior_odds == r.h1[500].final_log_odds.value);

    CHECK(load_config(dir / "config.json") == r.config);

    const auto curves = slurp(dir / "gprior_curves.csv");
    CHECK(line_count(curves) == 1 + 601);
    CHECK(curves.starts_with("beta,density_n20,density_n23,density_n34\n"));
    fs::remove_all(dir);
}

TEST_CASE("empty calibration writes nothing", "[output]") {
    auto r = run_experiment(small("fig1", 30), 1);
    r.calibration->points.clear();
    const auto dir = scratch_dir("empty");
    fs::create_directories(dir);
    CHECK_THROWS_AS(emit_plot_data(r, PlotFormat::Csv, dir), EmptyResult);
    CHECK_THROWS_AS(emit_plot_data(r, PlotFormat::Svg, dir), EmptyResult);
    CHECK(fs::is_empty(dir));
    CHECK_THROWS_AS(calibration_svg({}, "x"), EmptyResult);
    fs::remove_all(dir);
}

TEST_CASE("number formatting round-trips", "[output]") {
    for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.125}) {
        CHECK(std::stod(format_double(x)) == x);
    }
    CHECK(format_double(NAN) == "nan");
    CHECK(format_double(-INFINITY) == "-inf");
}
