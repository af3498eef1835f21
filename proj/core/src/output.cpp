#include "bflab/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "bflab/errors.hpp"
#include "bflab/format.hpp"

namespace bflab {

namespace fs = std::filesystem;

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_file_atomic(const fs::path& path, const std::string& contents) {
    std::error_code ec;
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw Error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp.string() + " for writing");
        out << contents;
        out.flush();
        if (!out) {
            out.close();
            fs::remove(tmp, ec);
            throw Error("write failed for " + tmp.string());
        }
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error("cannot move " + tmp.string() + " to " + path.string());
    }
}

std::string outcomes_csv(std::span<const TrialOutcome> h0, std::span<const TrialOutcome> h1) {
    std::string out = kOutcomeCsvHeader;
    out += '\n';
    for (auto batch : {h0, h1}) {
        for (const auto& o : batch) {
            out += std::to_string(o.replicate_index);
            out += ',';
            out += to_string(o.generating_hypothesis);
            out += ',';
            out += std::to_string(o.n_stop);
            out += ',';
            out += to_string(o.stopped_by);
            out += ',';
            out += format_double(o.final_log_bf.value);
            out += ',';
            out += format_double(o.final_log_odds.value);
            out += ',';
            out += to_string(o.parameter_draw.provenance);
            out += ',';
            out += o.parameter_draw.flatten();
            out += '\n';
        }
    }
    return out;
}

std::string calibration_csv(std::span<const CalibrationPoint> points) {
    std::string out = kCalibrationCsvHeader;
    out += '\n';
    for (const auto& p : points) {
        out += format_double(p.nominal_log_odds) + ',' + std::to_string(p.count_h0) + ',' +
               std::to_string(p.count_h1) + ',' + format_double(p.observed_log_odds) + '\n';
    }
    return out;
}

std::string histogram_csv(const CalibrationTable& table) {
    std::string out = "bin_index,bin_lo,bin_hi,bin_center_log_odds,count_h0,count_h1\n";
    for (const auto& b : table.bins) {
        const double lo = static_cast<double>(b.index) * table.bin_width;
        const double hi = static_cast<double>(b.index + 1) * table.bin_width;
        out += std::to_string(b.index) + ',' + format_double(lo) + ',' + format_double(hi) + ',' +
               format_double(b.center) + ',' + std::to_string(b.count_h0) + ',' + std::to_string(b.count_h1) + '\n';
    }
    return out;
}

namespace {

using nlohmann::json;

json batch_json(const std::vector<TrialOutcome>& batch) {
    json j;
    j["replicates"] = batch.size();
    std::map<std::string, std::uint64_t> reasons;
    double n_sum = 0.0;
    std::uint64_t ok = 0;
    json failures = json::array();
    for (const auto& o : batch) {
        ++reasons[std::string(to_string(o.stopped_by))];
        if (o.failed()) {
            if (failures.size() < 20) failures.push_back(std::to_string(o.replicate_index) + ": " + o.failure);
            continue;
        }
        n_sum += static_cast<double>(o.n_stop);
        ++ok;
    }
    j["stopped_by"] = reasons;
    j["mean_n_stop"] = ok ? n_sum / static_cast<double>(ok) : 0.0;
    j["failed"] = reasons.count("failed") ? reasons["failed"] : 0;
    j["failures"] = failures;
    return j;
}

json rate_json(const ErrorRateEstimate& e) {
    return {{"threshold", e.threshold},
            {"rate", e.rate},
            {"mc_standard_error", e.mc_standard_error},
            {"n_replicates", e.n_replicates}};
}

}  // namespace

std::string summary_json(const ExperimentResults& r) {
    json j;
    j["name"] = r.config.name;
    j["family"] = std::string(to_string(r.config.family()));
    j["master_seed"] = r.config.master_seed;
    j["replicates_per_hypothesis"] = r.config.replicates;
    json batches = json::object();
    if (r.config.runs(Hypothesis::H0)) batches["H0"] = batch_json(r.h0);
    if (r.config.runs(Hypothesis::H1)) batches["H1"] = batch_json(r.h1);
    j["batches"] = batches;
    if (r.calibration) {
        const auto& c = *r.calibration;
        json cal;
        cal["bin_width"] = c.table.bin_width;
        cal["min_count"] = c.table.min_count;
        cal["bins"] = c.table.bins.size();
        cal["points"] = c.points.size();
        cal["slope"] = c.deviation ? json(c.deviation->slope) : json(nullptr);
        cal["max_abs_dev"] = c.deviation ? json(c.deviation->max_abs_dev) : json(nullptr);
        cal["band_fraction_3se"] = c.points.empty() ? json(nullptr) : json(c.band_fraction);
        cal["spearman"] = c.spearman ? json(*c.spearman) : json(nullptr);
        j["calibration"] = cal;
    } else {
        j["calibration"] = nullptr;
    }
    j["type1_error"] = r.type1 ? rate_json(*r.type1) : json(nullptr);
    j["type2_error"] = r.type2 ? rate_json(*r.type2) : json(nullptr);
    return j.dump(2) + "\n";
}

namespace {

std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

std::string calibration_svg(std::span<const CalibrationPoint> points, const std::string& title) {
    if (points.empty()) throw EmptyResult("no calibration points to plot");
    const double ln10 = std::log(10.0);
    double lo = -ln10;
    double hi = ln10;
    for (const auto& p : points) {
        lo = std::min({lo, p.nominal_log_odds, p.observed_log_odds});
        hi = std::max({hi, p.nominal_log_odds, p.observed_log_odds});
    }
    lo -= 0.5;
    hi += 0.5;
    constexpr double size = 480.0;
    constexpr double margin = 64.0;
    const double span = size - 2.0 * margin;
    auto px = [&](double v) { return margin + (v - lo) / (hi - lo) * span; };
    auto py = [&](double v) { return size - margin - (v - lo) / (hi - lo) * span; };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"480\" viewBox=\"0 0 480 480\">\n";
    s << "<rect width=\"480\" height=\"480\" fill=\"white\"/>\n";
    std::string escaped;
    for (char ch : title) {
        if (ch == '<') escaped += "&lt;";
        else if (ch == '>') escaped += "&gt;";
        else if (ch == '&') escaped += "&amp;";
        else escaped += ch;
    }
    s << "<text x=\"240\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" << escaped
      << "</text>\n";
    s << "<rect x=\"" << fixed2(margin) << "\" y=\"" << fixed2(margin) << "\" width=\"" << fixed2(span)
      << "\" height=\"" << fixed2(span) << "\" fill=\"none\" stroke=\"black\"/>\n";
    s << "<line class=\"identity\" x1=\"" << fixed2(px(lo)) << "\" y1=\"" << fixed2(py(lo)) << "\" x2=\""
      << fixed2(px(hi)) << "\" y2=\"" << fixed2(py(hi)) << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";

    // Axes are natural-log posterior odds; ticks carry odds values.
    const std::pair<double, const char*> ticks[] = {{-2.0 * ln10, "1/100"}, {-ln10, "1/10"}, {0.0, "1"},
                                                    {ln10, "10"}, {2.0 * ln10, "100"}};
    for (const auto& [v, label] : ticks) {
        if (v < lo || v > hi) continue;
        s << "<line x1=\"" << fixed2(px(v)) << "\" y1=\"" << fixed2(size - margin) << "\" x2=\"" << fixed2(px(v))
          << "\" y2=\"" << fixed2(size - margin + 5) << "\" stroke=\"black\"/>\n";
        s << "<text x=\"" << fixed2(px(v)) << "\" y=\"" << fixed2(size - margin + 18)
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << label << "</text>\n";
        s << "<line x1=\"" << fixed2(margin - 5) << "\" y1=\"" << fixed2(py(v)) << "\" x2=\"" << fixed2(margin)
          << "\" y2=\"" << fixed2(py(v)) << "\" stroke=\"black\"/>\n";
        s << "<text x=\"" << fixed2(margin - 8) << "\" y=\"" << fixed2(py(v) + 4)
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << label << "</text>\n";
    }
    s << "<text x=\"240\" y=\"" << fixed2(size - 20)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">nominal posterior odds (log "
         "scale)</text>\n";
    s << "<text x=\"18\" y=\"240\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
         "transform=\"rotate(-90 18 240)\">observed posterior odds (log scale)</text>\n";
    for (const auto& p : points) {
        s << "<circle class=\"point\" cx=\"" << fixed2(px(p.nominal_log_odds)) << "\" cy=\""
          << fixed2(py(p.observed_log_odds)) << "\" r=\"3\" fill=\"#c0306a\"/>\n";
    }
    s << "</svg>\n";
    return s.str();
}

std::string gprior_curves_csv(const DesignMatrix& base, std::span<const std::uint64_t> sizes) {
    if (sizes.empty()) throw InvalidArgument("no design sizes");
    std::string out = "beta";
    std::vector<DesignMatrix> designs;
    for (auto n : sizes) {
        out += ",density_n" + std::to_string(n);
        designs.push_back(base.prefix(n));
    }
    out += '\n';
    for (int i = -300; i <= 300; ++i) {
        const double beta = i / 100.0;
        out += format_double(beta);
        for (const auto& d : designs) out += ',' + format_double(gprior_beta_density(beta, 1.0, 1.0, d));
        out += '\n';
    }
    return out;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos - start));
        if (pos == std::string::npos) return out;
        start = pos + 1;
    }
}

double parse_double(const std::string& s, const std::string& where) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) throw ValidationError(where, "not a number: '" + s + "'");
    return v;
}

std::uint64_t parse_count(const std::string& s, const std::string& where) {
    std::uint64_t v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw ValidationError(where, "not a count: '" + s + "'");
    }
    return v;
}

}  // namespace

std::vector<OutcomeRecord> read_outcomes_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("outcomes", "cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != kOutcomeCsvHeader) {
        throw ValidationError(path.string() + ":1", "unexpected header");
    }
    std::vector<OutcomeRecord> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(lineno);
        const auto f = split(line, ',');
        if (f.size() != 8) throw ValidationError(where, "expected 8 columns");
        OutcomeRecord r;
        r.replicate_index = parse_count(f[0], where);
        try {
            r.hypothesis = parse_hypothesis(f[1]);
            r.stopped_by = parse_stop_reason(f[3]);
        } catch (const Error& e) {
            throw ValidationError(where, e.what());
        }
        r.n_stop = parse_count(f[2], where);
        r.log_bf = parse_double(f[4], where);
        r.log_posterior_odds = parse_double(f[5], where);
        out.push_back(r);
    }
    return out;
}

fs::path emit_plot_data(const ExperimentResults& results, PlotFormat format, const fs::path& dir) {
    if (!results.calibration || results.calibration->points.empty()) {
        throw EmptyResult("no calibration points; no bin has " + std::to_string(results.config.min_count) +
                          " outcomes under both hypotheses");
    }
    const auto& points = results.calibration->points;
    if (format == PlotFormat::Csv) {
        const fs::path p = dir / "calibration.csv";
        write_file_atomic(p, calibration_csv(points));
        return p;
    }
    const fs::path p = dir / "calibration.svg";
    write_file_atomic(p, calibration_svg(points, results.config.name));
    return p;
}

std::vector<fs::path> write_results(const ExperimentResults& results, const fs::path& dir) {
    std::vector<fs::path> written;
    auto put = [&](const char* name, const std::string& contents) {
        write_file_atomic(dir / name, contents);
        written.push_back(dir / name);
    };
    put("config.json", serialize_config(results.config));
    put("outcomes.csv", outcomes_csv(results.h0, results.h1));
    if (results.calibration) {
        put("histogram.csv", histogram_csv(results.calibration->table));
        if (!results.calibration->points.empty()) {
            written.push_back(emit_plot_data(results, PlotFormat::Csv, dir));
            written.push_back(emit_plot_data(results, PlotFormat::Svg, dir));
        }
    }
    if (!results.config.gprior_curve_sizes.empty() && results.config.design) {
        put("gprior_curves.csv", gprior_curves_csv(*results.config.design, results.config.gprior_curve_sizes));
    }
    put("summary.json", summary_json(results));
    return written;
}

}  // namespace bflab
