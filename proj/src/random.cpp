#include "cac/random.hpp"

#include <stdexcept>

namespace cac {

Distribution parse_distribution(std::string_view name) {
    if (name == "normal") return Distribution::normal;
    if (name == "uniform") return Distribution::uniform;
    if (name == "uniform_positive") return Distribution::uniform_positive;
    throw std::invalid_argument("unknown distribution '" + std::string(name) +
                                "' (expected normal, uniform or uniform_positive)");
}

std::string_view to_string(Distribution d) {
    switch (d) {
        case Distribution::normal: return "normal";
        case Distribution::uniform: return "uniform";
        case Distribution::uniform_positive: return "uniform_positive";
    }
    return "normal";
}

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(mix64(master) ^ (index * 0xD1B54A32D192ED03ULL + 1));
}

Sampler::Sampler(std::uint64_t seed, Distribution dist) : engine_(seed), dist_(dist) {}

double Sampler::operator()() {
    switch (dist_) {
        case Distribution::normal: return normal_(engine_);
        case Distribution::uniform: {
            // Open interval: reject the endpoint -1 (unit_ may return exactly 0).
            double u;
            do {
                u = unit_(engine_);
            } while (u == 0.0);
            return 2.0 * u - 1.0;
        }
        case Distribution::uniform_positive: {
            double u;
            do {
                u = unit_(engine_);
            } while (u == 0.0);
            return u;
        }
    }
    return 0.0;
}

}  // namespace cac
