#include "bflab/bayes_core.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "bflab/errors.hpp"
#include "bflab/quadrature.hpp"
#include "special.hpp"

namespace bflab {

LogOdds posterior_odds(LogBayesFactor bf, double prior_odds) {
    if (!std::isfinite(prior_odds) || !(prior_odds > 0.0)) {
        throw InvalidArgument("prior odds must be positive and finite");
    }
    return {bf.value + std::log(prior_odds)};
}

double to_log10(double natural_log) { return natural_log / std::numbers::ln10; }

SufficientStatsNormal SufficientStatsNormal::from_data(std::span<const double> xs) {
    SufficientStatsNormal s;
    for (double x : xs) s.add(x);
    return s;
}

void SufficientStatsNormal::add(double x) {
    ++n;
    sum_x += x;
    sum_x2 += x * x;
}

double SufficientStatsNormal::mean() const {
    if (n == 0) throw EmptyData("mean of an empty sample");
    return sum_x / static_cast<double>(n);
}

void SufficientStatsNormal::validate() const {
    if (!std::isfinite(sum_x) || !std::isfinite(sum_x2)) {
        throw InvalidArgument("sufficient statistics must be finite");
    }
    if (sum_x2 < 0.0) throw InvalidArgument("sum of squares must be nonnegative");
    const double nd = static_cast<double>(n);
    // allow rounding slack in the Cauchy-Schwarz bound
    if (sum_x * sum_x > nd * sum_x2 * (1.0 + 1e-12) + 1e-300) {
        throw InvalidArgument("sum_x^2 exceeds n * sum_x2");
    }
    if (n == 0 && (sum_x != 0.0 || sum_x2 != 0.0)) {
        throw InvalidArgument("nonzero sums with n == 0");
    }
}

TTestStat TTestStat::from_stats(const SufficientStatsNormal& stats, double mu0, double r) {
    if (stats.n < 2) throw InvalidArgument("t statistic needs at least two observations");
    const double nd = static_cast<double>(stats.n);
    const double mean = stats.sum_x / nd;
    const double sxx = std::max(0.0, stats.sum_x2 - stats.sum_x * mean);
    if (sxx <= 0.0) throw DegenerateData("zero sample variance; t statistic undefined");
    const double sd = std::sqrt(sxx / (nd - 1.0));
    return {stats.n, (mean - mu0) / (sd / std::sqrt(nd)), mu0, r};
}

TTestStat TTestStat::from_data(std::span<const double> xs, double mu0, double r) {
    if (xs.size() < 2) throw InvalidArgument("t statistic needs at least two observations");
    // two-pass for accuracy; the incremental path in `sequential` uses sums
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double sxx = 0.0;
    for (double x : xs) sxx += (x - mean) * (x - mean);
    if (sxx <= 0.0) throw DegenerateData("zero sample variance; t statistic undefined");
    const double nd = static_cast<double>(xs.size());
    const double sd = std::sqrt(sxx / (nd - 1.0));
    return {xs.size(), (mean - mu0) / (sd / std::sqrt(nd)), mu0, r};
}

LogBayesFactor log_bf_normal_known_var(const SufficientStatsNormal& stats) {
    stats.validate();
    if (stats.n == 0) throw EmptyData("known-variance Bayes factor needs n >= 1");
    const double np1 = static_cast<double>(stats.n) + 1.0;
    // n^2 xbar^2 = sum_x^2
    return {stats.sum_x * stats.sum_x / (2.0 * np1) - 0.5 * std::log(np1)};
}

LogBayesFactor log_bf_normal_jeffreys_var(const SufficientStatsNormal& stats) {
    stats.validate();
    if (stats.n == 0) throw EmptyData("Jeffreys-variance Bayes factor needs n >= 1");
    if (stats.sum_x2 == 0.0) throw DegenerateData("all-zero data: Bayes factor is 0/0");
    const double nd = static_cast<double>(stats.n);
    const double ratio = (stats.sum_x * stats.sum_x) / ((nd + 1.0) * stats.sum_x2);
    return {-0.5 * std::log1p(nd) - 0.5 * nd * std::log1p(-ratio)};
}

LogBayesFactor log_bf_ttest_jzs(const TTestStat& stat, double rel_tol) {
    if (stat.n < 2) throw InvalidArgument("JZS t-test needs n >= 2");
    if (!(stat.r > 0.0) || !std::isfinite(stat.r)) throw InvalidArgument("Cauchy scale r must be positive");
    if (!std::isfinite(stat.t)) throw InvalidArgument("t statistic must be finite");

    const double n = static_cast<double>(stat.n);
    const double nu = n - 1.0;
    const double t2 = stat.t * stat.t;
    const double nr2 = n * stat.r * stat.r;
    const double half_nu1 = 0.5 * (nu + 1.0);
    constexpr double log_norm = -0.5 * 1.8378770664093453;  // -1/2 log(2 pi)

    // g ~ InvGamma(1/2, 1/2) mixes the normal prior on the effect size into a Cauchy.
    auto log_integrand = [&](double g) {
        const double a = std::log1p(nr2 * g);
        return -0.5 * a - half_nu1 * std::log1p(t2 / (std::exp(a) * nu)) + log_norm -
               1.5 * std::log(g) - 0.5 / g;
    };
    quadrature::Options opts;
    opts.rel_tol = rel_tol;
    const auto est = quadrature::log_integrate_positive_halfline_estimate(log_integrand, opts);
    return {est.value + half_nu1 * std::log1p(t2 / nu)};
}

LogBayesFactor log_bf_regression_gprior(const RegressionStat& stat, const GPrior& prior, double rel_tol) {
    if (stat.n <= stat.p + 1) throw InvalidArgument("regression Bayes factor needs n > p + 1");
    if (!(stat.r_squared >= 0.0 && stat.r_squared <= 1.0)) {
        throw InvalidArgument("R^2 must lie in [0, 1]");
    }
    if (stat.r_squared == 1.0) throw DivergentEvidence("R^2 == 1: evidence integral diverges");
    if (!(prior.shape > 0.0 && prior.scale > 0.0)) throw InvalidArgument("g-prior shape and scale must be positive");

    const double n = static_cast<double>(stat.n);
    const double p = static_cast<double>(stat.p);
    const double kappa = stat.effective_g_scale();
    const double resid = 1.0 - stat.r_squared;
    const double up = 0.5 * (n - 1.0 - p);
    const double down = 0.5 * (n - 1.0);
    const double log_ig_norm = prior.shape * std::log(prior.scale) - detail::log_gamma(prior.shape);

    auto log_integrand = [&](double g) {
        return up * std::log1p(kappa * g) - down * std::log1p(kappa * g * resid) + log_ig_norm -
               (prior.shape + 1.0) * std::log(g) - prior.scale / g;
    };
    quadrature::Options opts;
    opts.rel_tol = rel_tol;
    return {quadrature::log_integrate_positive_halfline_estimate(log_integrand, opts).value};
}

LogBayesFactor log_bf_bernoulli_jeffreys(const BernoulliCounts& counts) {
    if (!(counts.theta0 > 0.0 && counts.theta0 < 1.0)) throw InvalidArgument("theta0 must lie in (0, 1)");
    const double n1 = static_cast<double>(counts.n1);
    const double n0 = static_cast<double>(counts.n0);
    // B(1/2, 1/2) = pi
    return {log_beta(n1 + 0.5, n0 + 0.5) - std::log(std::numbers::pi) - n1 * std::log(counts.theta0) -
            n0 * std::log1p(-counts.theta0)};
}

LogBayesFactor log_bf_contingency_gd(const ContingencyTable2x2& table) {
    if (!(table.a > 0.0) || !std::isfinite(table.a)) throw InvalidArgument("prior concentration a must be positive");
    // Under H0 the row and column margins get Dirichlet(a_i. - (J-1)) priors.
    const double margin_alpha = 2.0 * table.a - 1.0;
    if (!(margin_alpha > 0.0)) throw InvalidArgument("prior concentration a must exceed 1/2 for a 2x2 table");

    const auto& y = table.counts;
    const std::array<double, 4> cells = {y[0] + table.a, y[1] + table.a, y[2] + table.a, y[3] + table.a};
    const std::array<double, 4> cell_prior = {table.a, table.a, table.a, table.a};
    const std::array<double, 2> alpha = {margin_alpha, margin_alpha};
    const std::array<double, 2> rows = {static_cast<double>(y[0] + y[1]) + margin_alpha,
                                        static_cast<double>(y[2] + y[3]) + margin_alpha};
    const std::array<double, 2> cols = {static_cast<double>(y[0] + y[2]) + margin_alpha,
                                        static_cast<double>(y[1] + y[3]) + margin_alpha};

    const double log_alt = log_multivariate_beta(cells) - log_multivariate_beta(cell_prior);
    const double log_null = log_multivariate_beta(rows) + log_multivariate_beta(cols) -
                            2.0 * log_multivariate_beta(alpha);
    double value = log_alt - log_null;

    switch (table.scheme) {
        case ContingencyScheme::JointMultinomial:
            break;
        case ContingencyScheme::Poisson: {
            if (!(table.b > 0.0) || !std::isfinite(table.b)) throw InvalidArgument("gamma rate b must be positive");
            // Grand total N is negative binomial under both hypotheses: shape
            // sum(a) under H1 and sum(a) - (I-1)(J-1) under H0.
            const double shape_alt = 4.0 * table.a;
            const double shape_null = shape_alt - 1.0;
            const double n = static_cast<double>(table.total());
            value += detail::log_gamma(n + shape_alt) - detail::log_gamma(shape_alt) -
                     detail::log_gamma(n + shape_null) + detail::log_gamma(shape_null) -
                     std::log1p(1.0 / table.b);
            break;
        }
        default:
            throw InvalidArgument("unsupported contingency sampling scheme");
    }
    return {value};
}

double log_beta(double a, double b) {
    return detail::log_gamma(a) + detail::log_gamma(b) - detail::log_gamma(a + b);
}

double log_multivariate_beta(std::span<const double> alphas) {
    double sum = 0.0;
    double acc = 0.0;
    for (double a : alphas) {
        if (!(a > 0.0)) throw InvalidArgument("Dirichlet parameters must be positive");
        acc += detail::log_gamma(a);
        sum += a;
    }
    return acc - detail::log_gamma(sum);
}

}  // namespace bflab
