#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace bflab {

/// splitmix64 finalizer: a bijective 64-bit mixing function.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Per-replicate stream seed from (master seed, stream tag, replicate index).
///   seed = mix64(mix64(master ^ mix64(tag + 0x9e37...)) ^ mix64(index + 0xbf58...))
/// Replicates never share state, so results do not depend on how replicates
/// are distributed over workers.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag, std::uint64_t index) noexcept;

/// Random source owned by exactly one generator/worker. Draws go through
/// Boost.Random distributions, whose algorithms are fixed across platforms,
/// on top of the standardized mt19937_64 engine.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on the open interval (0, 1), 53 bits.
    double uniform();
    double normal(double mean = 0.0, double sd = 1.0);
    /// Cauchy(0, scale) via the inverse CDF scale * tan(pi (u - 1/2)).
    double cauchy(double scale = 1.0);
    double gamma(double shape, double scale = 1.0);
    double inverse_gamma(double shape, double scale);
    double beta(double a, double b);
    bool bernoulli(double p);
    /// Index drawn with probabilities proportional to `weights`.
    std::size_t categorical(std::span<const double> weights);

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace bflab
