#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace cac {

/// Continuous distributions for drawing decomposition parameters.
enum class Distribution {
    normal,            ///< standard normal
    uniform,           ///< uniform on (-1, 1)
    uniform_positive,  ///< uniform on (0, 1); non-negative weights for log-space evaluation
};

[[nodiscard]] Distribution parse_distribution(std::string_view name);
[[nodiscard]] std::string_view to_string(Distribution d);

/// SplitMix64 finalizer.
[[nodiscard]] std::uint64_t mix64(std::uint64_t x);

/// Seed of trial `index` under `master`. Depends only on the pair, so any
/// trial can be replayed in isolation.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// i.i.d. draws from one Distribution, deterministic given the seed.
class Sampler {
public:
    Sampler(std::uint64_t seed, Distribution dist);

    double operator()();

    [[nodiscard]] Distribution distribution() const { return dist_; }
    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    Distribution dist_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

}  // namespace cac
