#pragma once

// Log Bayes factors for the five model families. Every value is the natural
// log of BF10 = P(D | H1) / P(D | H0); positive values favour H1.

#include <array>
#include <cstdint>
#include <span>

namespace bflab {

struct LogBayesFactor {
    double value = 0.0;
};

struct LogOdds {
    double value = 0.0;
};

inline constexpr double kDefaultRelTol = 1e-8;

/// ln posterior odds = ln BF10 + ln prior odds.
LogOdds posterior_odds(LogBayesFactor bf, double prior_odds);

double to_log10(double natural_log);

struct SufficientStatsNormal {
    std::uint64_t n = 0;
    double sum_x = 0.0;
    double sum_x2 = 0.0;

    static SufficientStatsNormal from_data(std::span<const double> xs);
    void add(double x);
    double mean() const;
    // Throws InvalidArgument when the invariants (finite, sum_x2 >= 0,
    // Cauchy-Schwarz) are violated.
    void validate() const;
};

struct TTestStat {
    std::uint64_t n = 0;
    double t = 0.0;
    double mu0 = 0.0;
    double r = 1.0;  // Cauchy scale on the effect size

    /// One-sample t statistic of `xs` against `mu0`.
    static TTestStat from_data(std::span<const double> xs, double mu0, double r = 1.0);
    static TTestStat from_stats(const SufficientStatsNormal& stats, double mu0, double r = 1.0);
};

struct GPrior {
    double shape = 0.5;
    double scale = 0.17677669529663687;  // sqrt(2)/8

    bool operator==(const GPrior&) const = default;
};

struct RegressionStat {
    std::uint64_t n = 0;
    std::uint64_t p = 0;
    double r_squared = 0.0;
    // Multiplier on g in the Zellner factor (1 + g_scale * g). Zero means
    // "use n", i.e. the prior covariance g sigma^2 n (X'X)^{-1} of the design
    // at hand; other values express a prior fixed by a different design.
    double g_scale = 0.0;

    double effective_g_scale() const { return g_scale > 0.0 ? g_scale : static_cast<double>(n); }
};

struct BernoulliCounts {
    std::uint64_t n1 = 0;
    std::uint64_t n0 = 0;
    double theta0 = 0.5;
};

enum class ContingencyScheme { Poisson, JointMultinomial };

/// Cells laid out row-major: rows are outcome 0/1, columns group 1/2, so
/// counts = {N1, N2, N3, N4} = {n1-k1, n2-k2, k1, k2}.
struct ContingencyTable2x2 {
    std::array<std::uint64_t, 4> counts{};
    ContingencyScheme scheme = ContingencyScheme::Poisson;
    double a = 1.0;  // Dirichlet / gamma shape per cell
    double b = 1.0;  // gamma rate on cell intensities (Poisson scheme only)

    std::uint64_t total() const { return counts[0] + counts[1] + counts[2] + counts[3]; }
};

/// Known unit variance, mu ~ N(0, 1) under H1: closed form.
LogBayesFactor log_bf_normal_known_var(const SufficientStatsNormal& stats);

/// Jeffreys 1/sigma on the shared scale, mu/sigma ~ N(0, 1) under H1.
/// Throws DegenerateData when every observation is zero.
LogBayesFactor log_bf_normal_jeffreys_var(const SufficientStatsNormal& stats);

/// JZS one-sample t-test: Jeffreys prior on sigma, Cauchy(0, r) on the effect
/// size, evaluated through the t-statistic reduction as a one-dimensional
/// integral over the Zellner-Siow mixing variable.
LogBayesFactor log_bf_ttest_jzs(const TTestStat& stat, double rel_tol = kDefaultRelTol);

/// Zellner g-prior regression with g ~ InvGamma(shape, scale).
/// Throws DivergentEvidence when R^2 == 1.
LogBayesFactor log_bf_regression_gprior(const RegressionStat& stat, const GPrior& prior = {},
                                        double rel_tol = kDefaultRelTol);

/// Point null Bernoulli(theta0) against Jeffreys Beta(1/2, 1/2).
LogBayesFactor log_bf_bernoulli_jeffreys(const BernoulliCounts& counts);

/// Gunel-Dickey default Bayes factor for independence in a 2x2 table.
LogBayesFactor log_bf_contingency_gd(const ContingencyTable2x2& table);

// log B(a, b) and log of the multivariate beta function.
double log_beta(double a, double b);
double log_multivariate_beta(std::span<const double> alphas);

}  // namespace bflab
