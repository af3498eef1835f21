#include "bflab/rng.hpp"

#include <boost/random/beta_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <cmath>
#include <numbers>

#include "bflab/errors.hpp"

namespace bflab {

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag, std::uint64_t index) noexcept {
    const std::uint64_t stream = mix64(master ^ mix64(tag + 0x9e3779b97f4a7c15ULL));
    return mix64(stream ^ mix64(index + 0xbf58476d1ce4e5b9ULL));
}

double Rng::uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal(double mean, double sd) {
    boost::random::normal_distribution<double> dist(mean, sd);
    return dist(engine_);
}

double Rng::cauchy(double scale) {
    return scale * std::tan(std::numbers::pi * (uniform() - 0.5));
}

double Rng::gamma(double shape, double scale) {
    if (!(shape > 0.0 && scale > 0.0)) throw InvalidArgument("gamma shape and scale must be positive");
    boost::random::gamma_distribution<double> dist(shape, scale);
    return dist(engine_);
}

double Rng::inverse_gamma(double shape, double scale) {
    // X ~ Gamma(shape, rate = scale)  =>  1/X ~ InvGamma(shape, scale)
    return 1.0 / gamma(shape, 1.0 / scale);
}

double Rng::beta(double a, double b) {
    if (!(a > 0.0 && b > 0.0)) throw InvalidArgument("beta parameters must be positive");
    boost::random::beta_distribution<double> dist(a, b);
    return dist(engine_);
}

bool Rng::bernoulli(double p) { return uniform() < p; }

std::size_t Rng::categorical(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) throw InvalidArgument("categorical weights must have positive sum");
    double u = uniform() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (u < weights[i]) return i;
        u -= weights[i];
    }
    return weights.size() - 1;
}

}  // namespace bflab
