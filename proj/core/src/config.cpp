#include "bflab/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "bflab/errors.hpp"
#include "bflab/presets.hpp"

namespace bflab {

using nlohmann::json;

bool ExperimentConfig::runs(Hypothesis h) const {
    return std::find(hypotheses.begin(), hypotheses.end(), h) != hypotheses.end();
}

TrialSpec ExperimentConfig::trial_spec() const {
    TrialSpec spec;
    spec.prior = prior;
    spec.mode = mode;
    spec.rule = rule;
    spec.prior_odds = prior_odds;
    spec.design = design;
    return spec;
}

namespace {

template <class F>
void rethrow_as_validation(const std::string& path, F&& f) {
    try {
        f();
    } catch (const ValidationError&) {
        throw;
    } catch (const Error& e) {
        throw ValidationError(path, e.what());
    }
}

}  // namespace

void ExperimentConfig::validate() const {
    if (name.empty()) throw ValidationError("name", "must be nonempty");
    if (replicates < 1) throw ValidationError("replicates", "must be at least 1");
    if (!(prior_odds > 0.0) || !std::isfinite(prior_odds)) {
        throw ValidationError("prior_odds", "must be positive and finite");
    }
    if (!(bin_width > 0.0) || !std::isfinite(bin_width)) throw ValidationError("bin_width", "must be positive");
    if (hypotheses.empty()) throw ValidationError("hypotheses", "must name at least one hypothesis");
    if (hypotheses.size() == 2 && hypotheses[0] == hypotheses[1]) {
        throw ValidationError("hypotheses", "duplicate hypothesis");
    }
    if (hypotheses.size() > 2) throw ValidationError("hypotheses", "at most H0 and H1");
    if (alpha && !(*alpha > 0.0 && *alpha < 1.0)) throw ValidationError("error_rates.alpha", "must lie in (0, 1)");
    if (alpha && !runs(Hypothesis::H0)) throw ValidationError("error_rates.alpha", "Type-I error needs H0 replicates");
    if (type2_B && !(*type2_B > 1.0)) throw ValidationError("error_rates.B", "must exceed 1");
    if (type2_B && !runs(Hypothesis::H1)) throw ValidationError("error_rates.B", "Type-II error needs H1 replicates");
    rethrow_as_validation("prior", [&] { prior.validate(); });
    rethrow_as_validation("stopping", [&] { rule.validate(); });
    if (prior.family == Family::RegressionGPrior && !design) {
        throw ValidationError("design", "regression needs a design");
    }
    if (design) rethrow_as_validation("design", [&] { design->validate(); });
    if (!gprior_curve_sizes.empty()) {
        if (!design) throw ValidationError("gprior_curves", "needs a design");
        for (auto n : gprior_curve_sizes) {
            if (n < 2) throw ValidationError("gprior_curves", "design sizes must be at least 2");
        }
    }
    // Dry-run parameter sampling: catches improper priors under FromPrior and
    // missing fixed values before any replicate runs.
    for (Hypothesis h : hypotheses) {
        const std::string path = prior.family == Family::Contingency && mode.provenance == Provenance::FromPrior
                                     ? "prior.scheme"
                                     : "mode";
        rethrow_as_validation(path, [&] {
            Rng rng(master_seed);
            DesignMatrix prior_design;
            if (design) prior_design = design->prefix(std::max<std::uint64_t>(rule.horizon(), 2));
            (void)sample_parameters(prior, h, mode, rng, design ? &prior_design : nullptr);
        });
    }
}

namespace {

const std::string& key_path(const std::string& prefix, const std::string& key, std::string& buf) {
    buf = prefix.empty() ? key : prefix + "." + key;
    return buf;
}

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw ValidationError(path.empty() ? "<root>" : path, "must be a JSON object");
}

void reject_unknown(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    for (const auto& [k, v] : j.items()) {
        const bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; });
        if (!ok) throw ValidationError(path.empty() ? k : path + "." + k, "unknown key");
    }
}

double as_double(const json& j, const std::string& path) {
    if (!j.is_number()) throw ValidationError(path, "must be a number");
    return j.get<double>();
}

std::uint64_t as_count(const json& j, const std::string& path) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer()) throw ValidationError(path, "must be nonnegative");
    throw ValidationError(path, "must be a nonnegative integer");
}

std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string()) throw ValidationError(path, "must be a string");
    return j.get<std::string>();
}

template <class Parse>
auto as_enum(const json& j, const std::string& path, Parse parse) {
    const std::string s = as_string(j, path);
    try {
        return parse(s);
    } catch (const Error& e) {
        throw ValidationError(path, e.what());
    }
}

ParameterValues as_values(const json& j, const std::string& path) {
    require_object(j, path);
    ParameterValues out;
    for (const auto& [k, v] : j.items()) out[k] = as_double(v, path + "." + k);
    return out;
}

void apply_prior(PriorSpec& p, const json& j) {
    const std::string base = "prior";
    require_object(j, base);
    reject_unknown(j, base,
                   {"type_class", "cauchy_scale", "null_mean", "gprior", "regression_design", "bernoulli_null",
                    "beta_a", "beta_b", "scheme", "dirichlet_a", "poisson_rate"});
    std::string buf;
    if (j.contains("type_class")) p.type_class = as_enum(j["type_class"], key_path(base, "type_class", buf), parse_type_class);
    if (j.contains("cauchy_scale")) p.cauchy_scale = as_double(j["cauchy_scale"], key_path(base, "cauchy_scale", buf));
    if (j.contains("null_mean")) p.null_mean = as_double(j["null_mean"], key_path(base, "null_mean", buf));
    if (j.contains("gprior")) {
        const json& g = j["gprior"];
        require_object(g, "prior.gprior");
        reject_unknown(g, "prior.gprior", {"shape", "scale"});
        if (g.contains("shape")) p.gprior.shape = as_double(g["shape"], "prior.gprior.shape");
        if (g.contains("scale")) p.gprior.scale = as_double(g["scale"], "prior.gprior.scale");
    }
    if (j.contains("regression_design")) {
        p.regression_design =
            as_enum(j["regression_design"], key_path(base, "regression_design", buf), parse_regression_prior_design);
    }
    if (j.contains("bernoulli_null")) p.bernoulli_null = as_double(j["bernoulli_null"], key_path(base, "bernoulli_null", buf));
    if (j.contains("beta_a")) p.beta_a = as_double(j["beta_a"], key_path(base, "beta_a", buf));
    if (j.contains("beta_b")) p.beta_b = as_double(j["beta_b"], key_path(base, "beta_b", buf));
    if (j.contains("scheme")) p.scheme = as_enum(j["scheme"], key_path(base, "scheme", buf), parse_scheme);
    if (j.contains("dirichlet_a")) p.dirichlet_a = as_double(j["dirichlet_a"], key_path(base, "dirichlet_a", buf));
    if (j.contains("poisson_rate")) p.poisson_rate = as_double(j["poisson_rate"], key_path(base, "poisson_rate", buf));
}

void apply_mode(GenerationMode& m, const json& j) {
    require_object(j, "mode");
    reject_unknown(j, "mode", {"provenance", "nuisance", "h0", "h1"});
    if (j.contains("provenance")) m.provenance = as_enum(j["provenance"], "mode.provenance", parse_provenance);
    if (j.contains("nuisance")) m.nuisance = as_values(j["nuisance"], "mode.nuisance");
    if (j.contains("h0")) m.h0 = as_values(j["h0"], "mode.h0");
    if (j.contains("h1")) m.h1 = as_values(j["h1"], "mode.h1");
}

void apply_stopping(StoppingRule& r, const json& j) {
    require_object(j, "stopping");
    reject_unknown(j, "stopping", {"kind", "n", "B", "min_n", "max_n"});
    if (j.contains("kind")) {
        const auto kind = as_enum(j["kind"], "stopping.kind", parse_stopping_kind);
        if (kind != r.kind) {
            r = StoppingRule{};
            r.kind = kind;
        }
    }
    if (r.kind == StoppingRule::Kind::FixedN) {
        for (const char* k : {"B", "min_n", "max_n"}) {
            if (j.contains(k)) throw ValidationError(std::string("stopping.") + k, "not used by fixed_n");
        }
        if (j.contains("n")) r = StoppingRule::fixed_n(as_count(j["n"], "stopping.n"));
    } else {
        if (j.contains("n")) throw ValidationError("stopping.n", "only used by fixed_n");
        if (j.contains("B")) r.B = as_double(j["B"], "stopping.B");
        if (j.contains("min_n")) r.min_n = as_count(j["min_n"], "stopping.min_n");
        if (j.contains("max_n")) r.max_n = as_count(j["max_n"], "stopping.max_n");
    }
}

json values_json(const ParameterValues& v) {
    json out = json::object();
    for (const auto& [k, x] : v) out[k] = x;
    return out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError("<root>", std::string("invalid JSON: ") + e.what());
    }
    require_object(j, "");
    reject_unknown(j, "",
                   {"preset", "name", "family", "prior", "mode", "stopping", "prior_odds", "replicates",
                    "master_seed", "bin_width", "min_count", "design", "hypotheses", "error_rates", "gprior_curves",
                    "output"});

    ExperimentConfig c;
    if (j.contains("preset")) c = find_preset(as_string(j["preset"], "preset")).config;
    if (j.contains("name")) c.name = as_string(j["name"], "name");
    if (j.contains("family")) {
        const Family f = as_enum(j["family"], "family", parse_family);
        if (f != c.prior.family) c.prior = PriorSpec::defaults_for(f);
    }
    if (j.contains("prior")) apply_prior(c.prior, j["prior"]);
    if (j.contains("mode")) apply_mode(c.mode, j["mode"]);
    if (j.contains("stopping")) apply_stopping(c.rule, j["stopping"]);
    if (j.contains("prior_odds")) c.prior_odds = as_double(j["prior_odds"], "prior_odds");
    if (j.contains("replicates")) c.replicates = as_count(j["replicates"], "replicates");
    if (j.contains("master_seed")) c.master_seed = as_count(j["master_seed"], "master_seed");
    if (j.contains("bin_width")) c.bin_width = as_double(j["bin_width"], "bin_width");
    if (j.contains("min_count")) c.min_count = as_count(j["min_count"], "min_count");
    if (j.contains("design")) {
        const json& d = j["design"];
        if (d.is_null()) {
            c.design.reset();
        } else {
            require_object(d, "design");
            reject_unknown(d, "design", {"x_values"});
            if (!d.contains("x_values") || !d["x_values"].is_array()) {
                throw ValidationError("design.x_values", "must be an array of numbers");
            }
            DesignMatrix m;
            for (std::size_t i = 0; i < d["x_values"].size(); ++i) {
                m.x_values.push_back(as_double(d["x_values"][i], "design.x_values[" + std::to_string(i) + "]"));
            }
            c.design = m;
        }
    }
    if (j.contains("hypotheses")) {
        const json& h = j["hypotheses"];
        if (!h.is_array()) throw ValidationError("hypotheses", "must be an array");
        c.hypotheses.clear();
        for (std::size_t i = 0; i < h.size(); ++i) {
            c.hypotheses.push_back(as_enum(h[i], "hypotheses[" + std::to_string(i) + "]", parse_hypothesis));
        }
    }
    if (j.contains("error_rates")) {
        const json& e = j["error_rates"];
        require_object(e, "error_rates");
        reject_unknown(e, "error_rates", {"alpha", "B"});
        c.alpha.reset();
        c.type2_B.reset();
        if (e.contains("alpha") && !e["alpha"].is_null()) c.alpha = as_double(e["alpha"], "error_rates.alpha");
        if (e.contains("B") && !e["B"].is_null()) c.type2_B = as_double(e["B"], "error_rates.B");
    }
    if (j.contains("gprior_curves")) {
        const json& g = j["gprior_curves"];
        if (!g.is_array()) throw ValidationError("gprior_curves", "must be an array");
        c.gprior_curve_sizes.clear();
        for (std::size_t i = 0; i < g.size(); ++i) {
            c.gprior_curve_sizes.push_back(as_count(g[i], "gprior_curves[" + std::to_string(i) + "]"));
        }
    }
    if (j.contains("output")) {
        const json& o = j["output"];
        require_object(o, "output");
        reject_unknown(o, "output", {"dir"});
        if (o.contains("dir")) c.output_dir = as_string(o["dir"], "output.dir");
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("<file>", "cannot read config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
    json j;
    j["name"] = c.name;
    j["family"] = std::string(to_string(c.prior.family));
    const PriorSpec& p = c.prior;
    j["prior"] = {{"type_class", std::string(to_string(p.type_class))},
                  {"cauchy_scale", p.cauchy_scale},
                  {"null_mean", p.null_mean},
                  {"gprior", {{"shape", p.gprior.shape}, {"scale", p.gprior.scale}}},
                  {"regression_design", std::string(to_string(p.regression_design))},
                  {"bernoulli_null", p.bernoulli_null},
                  {"beta_a", p.beta_a},
                  {"beta_b", p.beta_b},
                  {"scheme", std::string(to_string(p.scheme))},
                  {"dirichlet_a", p.dirichlet_a},
                  {"poisson_rate", p.poisson_rate}};
    j["mode"] = {{"provenance", std::string(to_string(c.mode.provenance))},
                 {"nuisance", values_json(c.mode.nuisance)},
                 {"h0", values_json(c.mode.h0)},
                 {"h1", values_json(c.mode.h1)}};
    if (c.rule.kind == StoppingRule::Kind::FixedN) {
        j["stopping"] = {{"kind", std::string(to_string(c.rule.kind))}, {"n", c.rule.n_fixed}};
    } else {
        j["stopping"] = {{"kind", std::string(to_string(c.rule.kind))},
                         {"B", c.rule.B},
                         {"min_n", c.rule.min_n},
                         {"max_n", c.rule.max_n}};
    }
    j["prior_odds"] = c.prior_odds;
    j["replicates"] = c.replicates;
    j["master_seed"] = c.master_seed;
    j["bin_width"] = c.bin_width;
    j["min_count"] = c.min_count;
    j["design"] = c.design ? json{{"x_values", c.design->x_values}} : json(nullptr);
    json hyps = json::array();
    for (Hypothesis h : c.hypotheses) hyps.push_back(std::string(to_string(h)));
    j["hypotheses"] = hyps;
    json rates = json::object();
    if (c.alpha) rates["alpha"] = *c.alpha;
    if (c.type2_B) rates["B"] = *c.type2_B;
    j["error_rates"] = rates;
    j["gprior_curves"] = c.gprior_curve_sizes;
    j["output"] = {{"dir", c.output_dir}};
    return j.dump(2) + "\n";
}

std::filesystem::path resolve_output_dir(const ExperimentConfig& config, const std::string& cli_override) {
    if (!cli_override.empty()) return cli_override;
    if (!config.output_dir.empty()) return config.output_dir;
    if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') {
        return std::filesystem::path(env) / config.name;
    }
    return std::filesystem::path("bflab-out") / config.name;
}

}  // namespace bflab
