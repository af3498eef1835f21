#include "bflab/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "bflab/errors.hpp"
#include "bflab/quadrature.hpp"

namespace bflab {

std::int64_t bin_index(double log_odds, double bin_width) {
    return static_cast<std::int64_t>(std::floor(log_odds / bin_width));
}

void CalibrationTable::add(double log_odds, Hypothesis h) {
    if (!std::isfinite(log_odds)) throw InvalidArgument("cannot bin a non-finite log odds value");
    const std::int64_t idx = bin_index(log_odds, bin_width);
    auto it = std::lower_bound(bins.begin(), bins.end(), idx,
                               [](const CalibrationBin& b, std::int64_t i) { return b.index < i; });
    if (it == bins.end() || it->index != idx) {
        it = bins.insert(it, CalibrationBin{idx, (static_cast<double>(idx) + 0.5) * bin_width, 0, 0});
    }
    if (h == Hypothesis::H0) {
        ++it->count_h0;
        ++total_h0;
    } else {
        ++it->count_h1;
        ++total_h1;
    }
}

void CalibrationTable::validate() const {
    if (!(bin_width > 0.0)) throw InvalidArgument("bin width must be positive");
    std::uint64_t c0 = 0;
    std::uint64_t c1 = 0;
    for (std::size_t i = 0; i < bins.size(); ++i) {
        if (i > 0 && bins[i - 1].index >= bins[i].index) throw InvalidArgument("bins out of order");
        c0 += bins[i].count_h0;
        c1 += bins[i].count_h1;
    }
    if (c0 != total_h0 || c1 != total_h1) throw InvalidArgument("bin counts do not sum to totals");
}

CalibrationTable bin_log_odds(std::span<const double> h0_log_odds, std::span<const double> h1_log_odds,
                              double bin_width, std::uint64_t min_count) {
    if (!(bin_width > 0.0)) throw InvalidArgument("bin width must be positive");
    if (h0_log_odds.empty() || h1_log_odds.empty()) throw InvalidArgument("both outcome lists must be nonempty");
    if (h0_log_odds.size() != h1_log_odds.size()) {
        throw InvalidArgument("H0 and H1 replicate counts differ; count ratios would not estimate odds");
    }
    // std::map keeps insertion O(log n) for large runs
    std::map<std::int64_t, std::pair<std::uint64_t, std::uint64_t>> counts;
    for (double v : h0_log_odds) {
        if (!std::isfinite(v)) throw InvalidArgument("cannot bin a non-finite log odds value");
        ++counts[bin_index(v, bin_width)].first;
    }
    for (double v : h1_log_odds) {
        if (!std::isfinite(v)) throw InvalidArgument("cannot bin a non-finite log odds value");
        ++counts[bin_index(v, bin_width)].second;
    }
    CalibrationTable t;
    t.bin_width = bin_width;
    t.min_count = min_count;
    for (const auto& [idx, c] : counts) {
        t.bins.push_back({idx, (static_cast<double>(idx) + 0.5) * bin_width, c.first, c.second});
    }
    t.total_h0 = h0_log_odds.size();
    t.total_h1 = h1_log_odds.size();
    return t;
}

CalibrationTable bin_outcomes(std::span<const TrialOutcome> h0_outcomes, std::span<const TrialOutcome> h1_outcomes,
                              double bin_width, std::uint64_t min_count) {
    if (h0_outcomes.empty() || h1_outcomes.empty()) throw InvalidArgument("both outcome lists must be nonempty");
    if (h0_outcomes.size() != h1_outcomes.size()) {
        throw InvalidArgument("H0 and H1 replicate counts differ; count ratios would not estimate odds");
    }
    std::vector<double> v0;
    std::vector<double> v1;
    std::uint64_t failed0 = 0;
    std::uint64_t failed1 = 0;
    for (const auto& o : h0_outcomes) {
        if (o.failed()) {
            ++failed0;
        } else {
            v0.push_back(o.final_log_odds.value);
        }
    }
    for (const auto& o : h1_outcomes) {
        if (o.failed()) {
            ++failed1;
        } else {
            v1.push_back(o.final_log_odds.value);
        }
    }
    CalibrationTable t;
    t.bin_width = bin_width;
    t.min_count = min_count;
    for (double v : v0) t.add(v, Hypothesis::H0);
    for (double v : v1) t.add(v, Hypothesis::H1);
    t.failed_h0 = failed0;
    t.failed_h1 = failed1;
    return t;
}

CalibrationTable merge(const CalibrationTable& a, const CalibrationTable& b) {
    if (a.bin_width != b.bin_width) throw InvalidArgument("cannot merge tables with different bin widths");
    CalibrationTable out;
    out.bin_width = a.bin_width;
    out.min_count = std::max(a.min_count, b.min_count);
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.bins.size() || j < b.bins.size()) {
        if (j == b.bins.size() || (i < a.bins.size() && a.bins[i].index < b.bins[j].index)) {
            out.bins.push_back(a.bins[i++]);
        } else if (i == a.bins.size() || b.bins[j].index < a.bins[i].index) {
            out.bins.push_back(b.bins[j++]);
        } else {
            CalibrationBin m = a.bins[i++];
            m.count_h0 += b.bins[j].count_h0;
            m.count_h1 += b.bins[j++].count_h1;
            out.bins.push_back(m);
        }
    }
    out.total_h0 = a.total_h0 + b.total_h0;
    out.total_h1 = a.total_h1 + b.total_h1;
    out.failed_h0 = a.failed_h0 + b.failed_h0;
    out.failed_h1 = a.failed_h1 + b.failed_h1;
    return out;
}

double CalibrationPoint::standardized_residual(double total_ratio) const {
    const double m = static_cast<double>(count_h0 + count_h1);
    const double q = std::exp(nominal_log_odds) * total_ratio;
    const double p = q / (1.0 + q);
    return (static_cast<double>(count_h1) - m * p) / std::sqrt(m * p * (1.0 - p));
}

std::vector<CalibrationPoint> observed_vs_nominal(const CalibrationTable& table) {
    table.validate();
    std::vector<CalibrationPoint> points;
    for (const auto& b : table.bins) {
        if (b.count_h0 < table.min_count || b.count_h1 < table.min_count || b.count_h0 == 0 || b.count_h1 == 0) {
            continue;
        }
        points.push_back({b.center,
                          std::log(static_cast<double>(b.count_h1)) - std::log(static_cast<double>(b.count_h0)),
                          b.count_h0, b.count_h1});
    }
    if (points.empty()) throw EmptyResult("no bin has at least min_count outcomes under both hypotheses");
    return points;
}

CalibrationDeviation calibration_deviation(std::span<const CalibrationPoint> points) {
    if (points.size() < 3) throw InvalidArgument("calibration deviation needs at least three points");
    const double n = static_cast<double>(points.size());
    double mx = 0.0;
    double my = 0.0;
    for (const auto& p : points) {
        mx += p.nominal_log_odds;
        my += p.observed_log_odds;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double max_dev = 0.0;
    for (const auto& p : points) {
        sxx += (p.nominal_log_odds - mx) * (p.nominal_log_odds - mx);
        sxy += (p.nominal_log_odds - mx) * (p.observed_log_odds - my);
        max_dev = std::max(max_dev, std::abs(p.observed_log_odds - p.nominal_log_odds));
    }
    if (!(sxx > 1e-300)) throw InvalidArgument("nominal log odds have no spread");
    return {sxy / sxx, max_dev};
}

double identity_band_fraction(std::span<const CalibrationPoint> points, double z) {
    if (points.empty()) throw InvalidArgument("no points");
    std::size_t inside = 0;
    for (const auto& p : points) {
        if (std::abs(p.standardized_residual()) <= z) ++inside;
    }
    return static_cast<double>(inside) / static_cast<double>(points.size());
}

namespace {

std::vector<double> average_ranks(std::vector<double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double spearman_correlation(std::span<const CalibrationPoint> points) {
    if (points.size() < 3) throw InvalidArgument("Spearman correlation needs at least three points");
    std::vector<double> x;
    std::vector<double> y;
    for (const auto& p : points) {
        x.push_back(p.nominal_log_odds);
        y.push_back(p.observed_log_odds);
    }
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const double n = static_cast<double>(points.size());
    const double mean = (n + 1.0) / 2.0;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mean) * (ry[i] - mean);
        sxx += (rx[i] - mean) * (rx[i] - mean);
        syy += (ry[i] - mean) * (ry[i] - mean);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

ErrorRateEstimate make_error_rate(std::uint64_t hits, std::uint64_t n, double threshold) {
    ErrorRateEstimate e;
    e.n_replicates = n;
    e.threshold = threshold;
    if (n == 0) return e;
    e.rate = static_cast<double>(hits) / static_cast<double>(n);
    e.mc_standard_error = std::sqrt(e.rate * (1.0 - e.rate) / static_cast<double>(n));
    return e;
}

ErrorRateEstimate type1_error_optional_stopping(std::span<const TrialOutcome> h0_outcomes, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
    const double cut = -std::log(alpha);
    std::uint64_t n = 0;
    std::uint64_t rejected = 0;
    for (const auto& o : h0_outcomes) {
        if (o.failed()) continue;
        ++n;
        if (o.final_log_odds.value >= cut) ++rejected;
    }
    return make_error_rate(rejected, n, alpha);
}

ErrorRateEstimate type2_error_schoenbrodt(std::span<const TrialOutcome> h1_outcomes, double B) {
    if (!(B > 1.0)) throw InvalidArgument("B must exceed 1");
    const double cut = -std::log(B);
    std::uint64_t n = 0;
    std::uint64_t accepted = 0;
    for (const auto& o : h1_outcomes) {
        if (o.failed()) continue;
        ++n;
        if (o.final_log_odds.value <= cut) ++accepted;
    }
    return make_error_rate(accepted, n, B);
}

double martingale_check_bernoulli(std::uint64_t max_depth) {
    if (max_depth > 20) throw InvalidArgument("max_depth must be <= 20");
    auto bf = [](std::uint64_t n1, std::uint64_t n0) {
        return std::exp(log_bf_bernoulli_jeffreys({n1, n0, 0.5}).value);
    };
    double worst = 0.0;
    for (std::uint64_t total = 0; total < max_depth; ++total) {
        for (std::uint64_t n1 = 0; n1 <= total; ++n1) {
            const std::uint64_t n0 = total - n1;
            const double next = 0.5 * bf(n1 + 1, n0) + 0.5 * bf(n1, n0 + 1);
            worst = std::max(worst, std::abs(next - bf(n1, n0)));
        }
    }
    return worst;
}

double martingale_check_normal(std::uint64_t max_depth, double rel_tol) {
    double worst = 0.0;
    constexpr double inv_sqrt_2pi = 0.3989422804014327;
    for (std::uint64_t n = 1; n < max_depth; ++n) {
        for (double xbar : {-1.5, -0.4, 0.0, 0.3, 1.0, 2.0}) {
            SufficientStatsNormal prefix{n, xbar * static_cast<double>(n), 0.0};
            prefix.sum_x2 = prefix.sum_x * prefix.sum_x / static_cast<double>(n) + 1.0;
            const double current = log_bf_normal_known_var(prefix).value;
            // E_H0[BF_{n+1} / BF_n]; the next observation is N(0, 1) under H0
            auto ratio = [&](double x) {
                SufficientStatsNormal s = prefix;
                s.add(x);
                return std::exp(log_bf_normal_known_var(s).value - current - 0.5 * x * x) * inv_sqrt_2pi;
            };
            const double upper = quadrature::integrate_positive_halfline(ratio, rel_tol);
            const double lower = quadrature::integrate_positive_halfline([&](double x) { return ratio(-x); }, rel_tol);
            worst = std::max(worst, std::abs(upper + lower - 1.0));
        }
    }
    return worst;
}

}  // namespace bflab
