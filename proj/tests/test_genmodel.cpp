#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <variant>

#include "bflab/errors.hpp"
#include "bflab/genmodel.hpp"

using namespace bflab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

GenerationMode sigma_one() {
    GenerationMode m;
    m.nuisance = {{"sigma", 1.0}};
    return m;
}

}  // namespace

TEST_CASE("names round-trip", "[genmodel]") {
    for (auto f : {Family::NormalKnownVar, Family::NormalJeffreysVar, Family::TTestJzs, Family::RegressionGPrior,
                   Family::Bernoulli, Family::Contingency}) {
        CHECK(parse_family(to_string(f)) == f);
    }
    for (auto t : {TypeClass::Type0, TypeClass::TypeI, TypeClass::TypeII, TypeClass::TypeIII}) {
        CHECK(parse_type_class(to_string(t)) == t);
    }
    CHECK(parse_scheme("joint_multinomial") == ContingencyScheme::JointMultinomial);
    CHECK_THROWS_AS(parse_family("anova"), InvalidArgument);
}

TEST_CASE("default type classes follow the taxonomy", "[genmodel]") {
    CHECK(PriorSpec::default_type_class(Family::NormalJeffreysVar) == TypeClass::Type0);
    CHECK(PriorSpec::default_type_class(Family::TTestJzs) == TypeClass::TypeI);
    CHECK(PriorSpec::default_type_class(Family::RegressionGPrior) == TypeClass::TypeII);
    auto p = PriorSpec::defaults_for(Family::Bernoulli);
    p.type_class = TypeClass::TypeIII;
    CHECK_NOTHROW(p.validate());
    p = PriorSpec::defaults_for(Family::TTestJzs);
    p.type_class = TypeClass::Type0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
}

TEST_CASE("improper components cannot be sampled", "[genmodel]") {
    Rng rng(1);
    const auto prior = PriorSpec::defaults_for(Family::NormalJeffreysVar);
    CHECK_THROWS_AS(sample_parameters(prior, Hypothesis::H1, {}, rng), ImproperPrior);
    CHECK_NOTHROW(sample_parameters(prior, Hypothesis::H1, sigma_one(), rng));

    auto bern = PriorSpec::defaults_for(Family::Bernoulli);
    bern.type_class = TypeClass::TypeIII;
    CHECK_THROWS_AS(sample_parameters(bern, Hypothesis::H1, {}, rng), ImproperPrior);

    auto ct = PriorSpec::defaults_for(Family::Contingency);  // Poisson scheme
    CHECK_THROWS_AS(sample_parameters(ct, Hypothesis::H1, {}, rng), InvalidArgument);
}

TEST_CASE("fixed mode needs the fixed values", "[genmodel]") {
    Rng rng(1);
    GenerationMode m;
    m.provenance = Provenance::Fixed;
    m.h0 = {{"sigma", 1.0}};
    m.h1 = {{"sigma", 1.0}};
    const auto jzs = PriorSpec::defaults_for(Family::TTestJzs);
    CHECK_THROWS_AS(sample_parameters(jzs, Hypothesis::H1, m, rng), InvalidArgument);
    m.h1["mu"] = 1.3;
    auto d = sample_parameters(jzs, Hypothesis::H1, m, rng);
    CHECK(d.at("mu") == 1.3);
    CHECK(d.provenance == Provenance::Fixed);
    CHECK(d.flatten() == "delta=1.3;mu=1.3;sigma=1");
}

TEST_CASE("H0 draws sit on the null", "[genmodel]") {
    Rng rng(2);
    auto jzs = PriorSpec::defaults_for(Family::TTestJzs);
    jzs.null_mean = 1.0;
    for (int i = 0; i < 10; ++i) {
        auto d = sample_parameters(jzs, Hypothesis::H0, sigma_one(), rng);
        CHECK(d.at("mu") == 1.0);
        CHECK(d.at("delta") == 0.0);
    }
    auto bern = sample_parameters(PriorSpec::defaults_for(Family::Bernoulli), Hypothesis::H0, {}, rng);
    CHECK(bern.at("theta") == 0.5);
}

TEST_CASE("prior draws have the prior's moments", "[genmodel][property]") {
    Rng rng(3);
    const int n = 100000;
    double s = 0.0;
    double s2 = 0.0;
    const auto known = PriorSpec::defaults_for(Family::NormalKnownVar);
    for (int i = 0; i < n; ++i) {
        const double mu = sample_parameters(known, Hypothesis::H1, {}, rng).at("mu");
        s += mu;
        s2 += mu * mu;
    }
    CHECK(std::abs(s / n) < 4.0 / std::sqrt(n));
    CHECK(std::abs(s2 / n - 1.0) < 0.02);

    // Beta(1/2, 1/2): mean 1/2, variance 1/8
    s = s2 = 0.0;
    const auto bern = PriorSpec::defaults_for(Family::Bernoulli);
    for (int i = 0; i < n; ++i) {
        const double th = sample_parameters(bern, Hypothesis::H1, {}, rng).at("theta");
        s += th;
        s2 += th * th;
    }
    CHECK(std::abs(s / n - 0.5) < 0.005);
    CHECK(std::abs(s2 / n - 0.25 - 0.125) < 0.005);

    // Dirichlet(1,1,1,1) cells: each has mean 1/4; H0 cells factor into margins
    auto ct = PriorSpec::defaults_for(Family::Contingency);
    ct.scheme = ContingencyScheme::JointMultinomial;
    double c1 = 0.0;
    for (int i = 0; i < n; ++i) {
        auto d = sample_parameters(ct, Hypothesis::H1, {}, rng);
        c1 += d.at("cell1");
        CHECK_THAT(d.at("cell1") + d.at("cell2") + d.at("cell3") + d.at("cell4"), WithinAbs(1.0, 1e-12));
    }
    CHECK(std::abs(c1 / n - 0.25) < 0.005);
    auto d0 = sample_parameters(ct, Hypothesis::H0, {}, rng);
    CHECK_THAT(d0.at("cell1") * d0.at("cell4"), WithinRel(d0.at("cell2") * d0.at("cell3"), 1e-12));
}

TEST_CASE("JZS effect sizes are heavy tailed", "[genmodel][property]") {
    Rng rng(4);
    auto jzs = PriorSpec::defaults_for(Family::TTestJzs);
    int beyond = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        if (sample_parameters(jzs, Hypothesis::H1, sigma_one(), rng).at("delta") >= 6.0) ++beyond;
    }
    const double p = 0.5 - std::atan(6.0) / std::numbers::pi;
    CHECK(std::abs(beyond / double(n) - p) < 4.0 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("regression prior draws use the prior design", "[genmodel]") {
    Rng rng(5);
    auto reg = PriorSpec::defaults_for(Family::RegressionGPrior);
    GenerationMode m = sigma_one();
    const auto design = DesignMatrix::fertilizer_doses();
    CHECK_THROWS_AS(sample_parameters(reg, Hypothesis::H1, m, rng), InvalidArgument);
    auto d = sample_parameters(reg, Hypothesis::H1, m, rng, &design);
    CHECK(d.at("g") > 0.0);
    CHECK(d.values.contains("beta"));
    CHECK(d.at("intercept") == 0.0);
}

TEST_CASE("data streams", "[genmodel]") {
    Rng rng(6);
    auto ct = PriorSpec::defaults_for(Family::Contingency);
    GenerationMode m;
    m.provenance = Provenance::Fixed;
    m.h0 = {{"theta", 0.5}};
    auto d = sample_parameters(ct, Hypothesis::H0, m, rng);
    auto steps = sample_data(d, nullptr, 50, rng);
    REQUIRE(steps.size() == 50);
    for (const auto& s : steps) {
        const auto& c = std::get<CellObservation>(s).increments;
        // one member of each group per step
        CHECK(c[0] + c[2] == 1);
        CHECK(c[1] + c[3] == 1);
    }
    const auto design = DesignMatrix::fertilizer_doses();
    auto reg = PriorSpec::defaults_for(Family::RegressionGPrior);
    auto rd = sample_parameters(reg, Hypothesis::H0, sigma_one(), rng, &design);
    auto rows = sample_data(rd, &design, 23, rng);
    CHECK(std::get<RegressionRow>(rows[20]).x == design.x_values[0]);
    CHECK(std::get<RegressionRow>(rows[22]).x == design.x_values[2]);
    CHECK_THROWS_AS(sample_data(rd, nullptr, 3, rng), InvalidArgument);
    CHECK_THROWS_AS(sample_data(rd, &design, 0, rng), InvalidArgument);
}

TEST_CASE("tail masses in closed form", "[genmodel]") {
    const auto cauchy = UnivariatePrior::cauchy();
    const auto gauss = UnivariatePrior::gaussian();
    const Interval six[] = {{6.0, INFINITY}};
    CHECK_THAT(prior_tail_mass(cauchy, six), WithinRel(0.05256845671125343, 1e-13));
    CHECK(prior_tail_mass(cauchy, six) > 1.0 / 20.0);
    CHECK_THAT(prior_tail_mass(gauss, six), WithinRel(9.86587645037698e-10, 1e-12));
    // overlapping pieces count once
    const Interval overlap[] = {{6.0, 10.0}, {8.0, INFINITY}};
    CHECK_THAT(prior_tail_mass(cauchy, overlap), WithinRel(prior_tail_mass(cauchy, six), 1e-13));
    const Interval all[] = {{-INFINITY, INFINITY}};
    CHECK_THAT(prior_tail_mass(gauss, all), WithinAbs(1.0, 1e-15));
    const Interval bad[] = {{2.0, 1.0}};
    CHECK_THROWS_AS(prior_tail_mass(gauss, bad), InvalidArgument);
}

TEST_CASE("Jeffreys Beta(1/2, 1/2) puts ten times more mass at the edges", "[genmodel]") {
    const auto j = UnivariatePrior::beta(0.5, 0.5);
    const Interval edges[] = {{0.0, 0.01}, {0.99, 1.0}};
    const Interval center[] = {{0.49, 0.51}};
    const double ratio = prior_tail_mass(j, edges) / prior_tail_mass(j, center);
    CHECK_THAT(ratio, WithinRel(10.016074257650612, 1e-10));
    // arcsine law
    CHECK_THAT(j.cdf(0.25), WithinAbs(2.0 / std::numbers::pi * std::asin(0.5), 1e-14));
}

TEST_CASE("cdf and survival are complementary", "[genmodel][property]") {
    for (const auto& p : {UnivariatePrior::cauchy(0.7), UnivariatePrior::gaussian(2.0), UnivariatePrior::beta(0.5, 0.5),
                          UnivariatePrior::beta(2.0, 5.0)}) {
        for (double x : {0.01, 0.2, 0.5, 0.9}) CHECK_THAT(p.cdf(x) + p.survival(x), WithinAbs(1.0, 1e-14));
    }
}

TEST_CASE("g-prior on beta widens as pots are added", "[genmodel]") {
    const auto doses = DesignMatrix::fertilizer_doses();
    REQUIRE(doses.size() == 20);
    CHECK_THAT(doses.sum_squares(), WithinRel(28.7, 1e-12));
    CHECK_THAT(gprior_beta_variance(1.0, 1.0, doses), WithinRel(20.0 / 28.7, 1e-12));
    const double d20 = gprior_beta_density(0.0, 1.0, 1.0, doses.prefix(20));
    const double d23 = gprior_beta_density(0.0, 1.0, 1.0, doses.prefix(23));
    const double d34 = gprior_beta_density(0.0, 1.0, 1.0, doses.prefix(34));
    CHECK(d20 > d23);
    CHECK(d23 > d34);
    CHECK(gprior_beta_density(0.0, 0.0, 1.0, doses) == INFINITY);
}

TEST_CASE("designs", "[genmodel]") {
    DesignMatrix flat{{1.0, 1.0, 1.0}};
    CHECK_THROWS_AS(flat.validate(), InvalidArgument);
    DesignMatrix empty;
    CHECK_THROWS_AS(empty.validate(), InvalidArgument);
    const auto d = DesignMatrix::fertilizer_doses();
    CHECK_THAT(d.centered_sum_squares(), WithinRel(d.sum_squares() - 20.0 * 1.05 * 1.05, 1e-12));
}
