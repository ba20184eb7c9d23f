#include "cac/logspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace cac {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string describe(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void require_non_negative(std::span<const double> w, const std::string& name) {
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (!(w[k] >= 0.0)) {
            throw LogDomainError("log-space evaluation requires non-negative weights: " + name + "[" +
                                 std::to_string(k) + "] = " + describe(w[k]));
        }
    }
}

std::vector<double> log_grid(const RepGrid& grid) {
    std::vector<double> out(grid.values().size());
    for (std::size_t d = 0; d < grid.channels(); ++d) {
        for (std::size_t i = 0; i < grid.positions(); ++i) {
            const double v = grid(d, i);
            if (!(v > 0.0)) {
                throw LogDomainError("log-space evaluation requires positive activations: grid(channel " +
                                     std::to_string(d) + ", position " + std::to_string(i) + ") = " + describe(v));
            }
            out[d * grid.positions() + i] = std::log(v);
        }
    }
    return out;
}

double safe_log(double w) { return w == 0.0 ? kNegInf : std::log(w); }

// log sum_d w_d * f_d(x_position), from log-activations.
double log_conv(std::span<const double> weights, const std::vector<double>& log_f, std::size_t positions,
                std::size_t position, std::vector<double>& scratch) {
    scratch.resize(weights.size());
    for (std::size_t d = 0; d < weights.size(); ++d) {
        scratch[d] = safe_log(weights[d]) + log_f[d * positions + position];
    }
    return log_sum_exp(scratch);
}

}  // namespace

double mex(double beta, std::span<const double> x, std::span<const double> b) {
    if (x.empty()) throw std::invalid_argument("mex: empty input");
    if (x.size() != b.size()) {
        throw std::invalid_argument("mex: offsets have length " + std::to_string(b.size()) + ", inputs have " +
                                    std::to_string(x.size()));
    }
    const double n = static_cast<double>(x.size());
    if (beta == 0.0) {
        double sum = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) sum += x[j] + b[j];
        return sum / n;
    }
    double shift = kNegInf;
    for (std::size_t j = 0; j < x.size(); ++j) shift = std::max(shift, beta * (x[j] + b[j]));
    if (shift == kNegInf) return beta > 0.0 ? kNegInf : std::numeric_limits<double>::infinity();
    double acc = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) acc += std::exp(beta * (x[j] + b[j]) - shift);
    return (shift + std::log(acc) - std::log(n)) / beta;
}

double log_sum_exp(std::span<const double> v) {
    std::vector<double> present;
    present.reserve(v.size());
    for (double x : v) {
        if (x != kNegInf) present.push_back(x);
    }
    if (present.empty()) return kNegInf;
    const std::vector<double> zeros(present.size(), 0.0);
    return mex(1.0, present, zeros) + std::log(static_cast<double>(present.size()));
}

double log_product_pool(std::span<const double> v) {
    if (v.empty()) return 0.0;
    const std::vector<double> zeros(v.size(), 0.0);
    return static_cast<double>(v.size()) * mex(0.0, v, zeros);
}

std::vector<double> logspace_forward(const CpDecomposition& cp, const RepGrid& grid) {
    if (grid.positions() != cp.n_modes() || grid.channels() != cp.mode_dim()) {
        throw std::invalid_argument("logspace_forward: grid shape does not match the CP decomposition");
    }
    for (std::size_t z = 0; z < cp.n_terms(); ++z) {
        for (std::size_t i = 0; i < (cp.shared() ? 1 : cp.n_modes()); ++i) {
            require_non_negative(cp.factor(z, i), "cp factor(z=" + std::to_string(z) + ", i=" + std::to_string(i) + ")");
        }
    }
    for (std::size_t y = 0; y < cp.n_classes(); ++y) {
        require_non_negative(cp.class_weights(y), "cp class_weights(y=" + std::to_string(y) + ")");
    }
    const auto log_f = log_grid(grid);
    std::vector<double> scratch, per_position(cp.n_modes()), pooled(cp.n_terms());
    for (std::size_t z = 0; z < cp.n_terms(); ++z) {
        for (std::size_t i = 0; i < cp.n_modes(); ++i) {
            per_position[i] = log_conv(cp.factor(z, i), log_f, grid.positions(), i, scratch);
        }
        pooled[z] = log_product_pool(per_position);
    }
    std::vector<double> out(cp.n_classes());
    std::vector<double> terms(cp.n_terms());
    for (std::size_t y = 0; y < cp.n_classes(); ++y) {
        const auto w = cp.class_weights(y);
        for (std::size_t z = 0; z < cp.n_terms(); ++z) terms[z] = safe_log(w[z]) + pooled[z];
        out[y] = log_sum_exp(terms);
    }
    return out;
}

std::vector<double> logspace_forward(const HtDecomposition& ht, const RepGrid& grid) {
    if (grid.positions() != ht.n_modes() || grid.channels() != ht.mode_dim()) {
        throw std::invalid_argument("logspace_forward: grid shape does not match the HT decomposition");
    }
    const std::size_t leaf_positions = ht.shared() ? 1 : ht.n_modes();
    for (std::size_t j = 0; j < leaf_positions; ++j)
        for (std::size_t g = 0; g < ht.rank(0); ++g)
            require_non_negative(ht.leaf(j, g), "ht leaf(j=" + std::to_string(j) + ", gamma=" + std::to_string(g) + ")");
    for (std::size_t l = 1; l < ht.levels_built(); ++l) {
        const std::size_t width = ht.shared() ? 1 : ht.locations(l);
        for (std::size_t j = 0; j < width; ++j)
            for (std::size_t g = 0; g < ht.rank(l); ++g)
                require_non_negative(ht.level_weight(l, j, g), "ht level_weight(l=" + std::to_string(l) + ", j=" +
                                                                   std::to_string(j) + ", gamma=" + std::to_string(g) + ")");
    }
    for (std::size_t y = 0; y < ht.n_classes(); ++y) {
        require_non_negative(ht.top_weight(y), "ht top_weight(y=" + std::to_string(y) + ")");
    }

    const auto log_f = log_grid(grid);
    std::vector<double> scratch;
    std::vector<std::vector<double>> act(ht.n_modes(), std::vector<double>(ht.rank(0)));
    for (std::size_t j = 0; j < ht.n_modes(); ++j)
        for (std::size_t g = 0; g < ht.rank(0); ++g) act[j][g] = log_conv(ht.leaf(j, g), log_f, grid.positions(), j, scratch);

    for (std::size_t l = 1; l < ht.levels_built(); ++l) {
        const std::size_t width = ht.locations(l);
        std::vector<std::vector<double>> next(width, std::vector<double>(ht.rank(l)));
        std::vector<double> pooled(ht.rank(l - 1));
        std::vector<double> terms(ht.rank(l - 1));
        for (std::size_t j = 0; j < width; ++j) {
            for (std::size_t a = 0; a < pooled.size(); ++a) {
                const double pair[2] = {act[2 * j][a], act[2 * j + 1][a]};
                pooled[a] = log_product_pool(pair);
            }
            for (std::size_t g = 0; g < ht.rank(l); ++g) {
                const auto w = ht.level_weight(l, j, g);
                for (std::size_t a = 0; a < pooled.size(); ++a) terms[a] = safe_log(w[a]) + pooled[a];
                next[j][g] = log_sum_exp(terms);
            }
        }
        act = std::move(next);
    }

    const std::size_t r_top = ht.ranks().back();
    std::vector<double> pooled(r_top);
    std::vector<double> column(act.size());
    for (std::size_t a = 0; a < r_top; ++a) {
        for (std::size_t j = 0; j < act.size(); ++j) column[j] = act[j][a];
        pooled[a] = log_product_pool(column);
    }
    std::vector<double> out(ht.n_classes());
    std::vector<double> terms(r_top);
    for (std::size_t y = 0; y < ht.n_classes(); ++y) {
        const auto w = ht.top_weight(y);
        for (std::size_t a = 0; a < r_top; ++a) terms[a] = safe_log(w[a]) + pooled[a];
        out[y] = log_sum_exp(terms);
    }
    return out;
}

std::vector<double> logspace_forward(const Decomposition& d, const RepGrid& grid) {
    if (const auto* cp = std::get_if<CpDecomposition>(&d)) return logspace_forward(*cp, grid);
    return logspace_forward(std::get<HtDecomposition>(d), grid);
}

}  // namespace cac
