#include "cac/circuits.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cac {

// ---------------------------------------------------------------- representation

RepresentationFamily RepresentationFamily::gaussian(std::vector<GaussianChannel> channels) {
    if (channels.empty()) throw std::invalid_argument("representation family needs at least one channel");
    const std::size_t s = channels.front().mean.size();
    if (s == 0) throw std::invalid_argument("gaussian channel: input dimension must be at least 1");
    for (std::size_t d = 0; d < channels.size(); ++d) {
        const auto& c = channels[d];
        if (c.mean.size() != s || c.variance.size() != s) {
            throw std::invalid_argument("gaussian channel " + std::to_string(d) +
                                        ": mean and variance must both have dimension " + std::to_string(s));
        }
        for (double v : c.variance) {
            if (!(v > 0.0)) {
                throw std::invalid_argument("gaussian channel " + std::to_string(d) +
                                            ": variances must be strictly positive");
            }
        }
    }
    RepresentationFamily f;
    f.kind_ = Kind::gaussian;
    f.input_dim_ = s;
    f.gaussians_ = std::move(channels);
    return f;
}

RepresentationFamily RepresentationFamily::neuron(std::vector<NeuronChannel> channels, Activation activation) {
    if (channels.empty()) throw std::invalid_argument("representation family needs at least one channel");
    const std::size_t s = channels.front().weights.size();
    if (s == 0) throw std::invalid_argument("neuron channel: input dimension must be at least 1");
    for (std::size_t d = 0; d < channels.size(); ++d) {
        if (channels[d].weights.size() != s) {
            throw std::invalid_argument("neuron channel " + std::to_string(d) + ": weights must have dimension " +
                                        std::to_string(s));
        }
    }
    RepresentationFamily f;
    f.kind_ = Kind::neuron;
    f.activation_ = activation;
    f.input_dim_ = s;
    f.neurons_ = std::move(channels);
    return f;
}

std::size_t RepresentationFamily::channels() const {
    return kind_ == Kind::gaussian ? gaussians_.size() : neurons_.size();
}

double activate(Activation a, double z) {
    switch (a) {
        case Activation::threshold: return z > 0.0 ? 1.0 : 0.0;
        case Activation::relu: return z > 0.0 ? z : 0.0;
        case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-z));
    }
    return 0.0;
}

double RepresentationFamily::evaluate(std::size_t d, std::span<const double> x) const {
    if (x.size() != input_dim_) {
        throw std::invalid_argument("representation: input vector has dimension " + std::to_string(x.size()) +
                                    ", family expects " + std::to_string(input_dim_));
    }
    if (kind_ == Kind::gaussian) {
        const auto& c = gaussians_.at(d);
        double log_density = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            const double diff = x[k] - c.mean[k];
            log_density -= 0.5 * (std::log(2.0 * std::numbers::pi * c.variance[k]) + diff * diff / c.variance[k]);
        }
        return std::exp(log_density);
    }
    const auto& c = neurons_.at(d);
    double z = c.bias;
    for (std::size_t k = 0; k < x.size(); ++k) z += c.weights[k] * x[k];
    return activate(activation_, z);
}

Instance::Instance(std::vector<std::vector<double>> vectors) : vectors_(std::move(vectors)) {
    if (vectors_.empty()) throw std::invalid_argument("instance must contain at least one vector");
    const std::size_t s = vectors_.front().size();
    if (s == 0) throw std::invalid_argument("instance vectors must have dimension at least 1");
    for (const auto& v : vectors_) {
        if (v.size() != s) throw std::invalid_argument("instance vectors must all have the same dimension");
    }
}

RepGrid::RepGrid(std::size_t channels, std::size_t positions)
    : channels_(channels), positions_(positions), values_(channels * positions, 0.0) {
    if (channels == 0 || positions == 0) throw std::invalid_argument("RepGrid: empty grid");
}

RepGrid::RepGrid(std::size_t channels, std::size_t positions, std::vector<double> values)
    : channels_(channels), positions_(positions), values_(std::move(values)) {
    if (channels == 0 || positions == 0) throw std::invalid_argument("RepGrid: empty grid");
    if (values_.size() != channels * positions) {
        throw std::invalid_argument("RepGrid: expected " + std::to_string(channels * positions) + " values, got " +
                                    std::to_string(values_.size()));
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw std::invalid_argument("RepGrid: entries must be finite");
    }
}

RepGrid RepGrid::permuted(std::span<const std::size_t> order) const {
    if (order.size() != positions_) throw std::invalid_argument("RepGrid::permuted: wrong permutation length");
    RepGrid out(channels_, positions_);
    for (std::size_t d = 0; d < channels_; ++d)
        for (std::size_t i = 0; i < positions_; ++i) out(d, i) = (*this)(d, order[i]);
    return out;
}

RepGrid representation_layer(const Instance& x, const RepresentationFamily& family) {
    if (x.dim() != family.input_dim()) {
        throw std::invalid_argument("representation_layer: instance vectors have dimension " +
                                    std::to_string(x.dim()) + ", family expects " +
                                    std::to_string(family.input_dim()));
    }
    RepGrid grid(family.channels(), x.size());
    for (std::size_t d = 0; d < family.channels(); ++d)
        for (std::size_t i = 0; i < x.size(); ++i) grid(d, i) = family.evaluate(d, x[i]);
    return grid;
}

// ---------------------------------------------------------------- scores

double score_via_tensor(const DenseTensor& a, const RepGrid& grid, std::size_t cap) {
    const std::size_t n = a.order();
    const std::size_t m = grid.channels();
    if (n != grid.positions()) {
        throw std::invalid_argument("score_via_tensor: tensor order " + std::to_string(n) + " but grid has " +
                                    std::to_string(grid.positions()) + " positions");
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (a.shape()[k] != m) {
            throw std::invalid_argument("score_via_tensor: tensor mode dimension " + std::to_string(a.shape()[k]) +
                                        " does not match " + std::to_string(m) + " grid channels");
        }
    }
    if (a.size() > cap) {
        throw std::length_error("score_via_tensor: " + std::to_string(a.size()) +
                                " terms exceed the enumeration cap of " + std::to_string(cap));
    }
    std::vector<std::size_t> index(n);
    double total = 0.0;
    const auto data = a.data();
    for (std::size_t flat = 0; flat < data.size(); ++flat) {
        a.shape().unravel(flat, index);
        double term = data[flat];
        for (std::size_t i = 0; i < n; ++i) term *= grid(index[i], i);
        total += term;
    }
    return total;
}

namespace {

void check_grid(std::size_t n_modes, std::size_t mode_dim, const RepGrid& grid, const char* who) {
    if (grid.positions() != n_modes || grid.channels() != mode_dim) {
        throw std::invalid_argument(std::string(who) + ": decomposition expects " + std::to_string(mode_dim) +
                                    " channels x " + std::to_string(n_modes) + " positions, grid has " +
                                    std::to_string(grid.channels()) + " x " + std::to_string(grid.positions()));
    }
}

double conv(std::span<const double> weights, const RepGrid& grid, std::size_t position, ForwardStats& st) {
    double s = 0.0;
    for (std::size_t d = 0; d < weights.size(); ++d) s += weights[d] * grid(d, position);
    st.multiply_adds += weights.size();
    return s;
}

}  // namespace

std::vector<double> cp_forward(const CpDecomposition& cp, const RepGrid& grid, ForwardStats* stats) {
    check_grid(cp.n_modes(), cp.mode_dim(), grid, "cp_forward");
    ForwardStats st;
    // conv + global product pooling: one value per hidden channel z.
    std::vector<double> pooled(cp.n_terms(), 1.0);
    for (std::size_t z = 0; z < cp.n_terms(); ++z) {
        for (std::size_t i = 0; i < cp.n_modes(); ++i) {
            pooled[z] *= conv(cp.factor(z, i), grid, i, st);
            ++st.products;
        }
    }
    std::vector<double> scores(cp.n_classes(), 0.0);
    for (std::size_t y = 0; y < cp.n_classes(); ++y) {
        const auto w = cp.class_weights(y);
        for (std::size_t z = 0; z < cp.n_terms(); ++z) scores[y] += w[z] * pooled[z];
        st.multiply_adds += cp.n_terms();
    }
    if (stats) *stats = st;
    return scores;
}

std::vector<double> ht_forward(const HtDecomposition& ht, const RepGrid& grid, ForwardStats* stats) {
    check_grid(ht.n_modes(), ht.mode_dim(), grid, "ht_forward");
    ForwardStats st;
    // act[j][g]: conv output of channel g at position j of the current layer.
    std::vector<std::vector<double>> act(ht.n_modes(), std::vector<double>(ht.rank(0)));
    for (std::size_t j = 0; j < ht.n_modes(); ++j)
        for (std::size_t g = 0; g < ht.rank(0); ++g) act[j][g] = conv(ht.leaf(j, g), grid, j, st);

    for (std::size_t l = 1; l < ht.levels_built(); ++l) {
        const std::size_t width = ht.locations(l);
        std::vector<std::vector<double>> next(width, std::vector<double>(ht.rank(l)));
        std::vector<double> pooled(ht.rank(l - 1));
        for (std::size_t j = 0; j < width; ++j) {
            for (std::size_t a = 0; a < pooled.size(); ++a) pooled[a] = act[2 * j][a] * act[2 * j + 1][a];
            st.products += pooled.size();
            for (std::size_t g = 0; g < ht.rank(l); ++g) {
                const auto w = ht.level_weight(l, j, g);
                double s = 0.0;
                for (std::size_t a = 0; a < pooled.size(); ++a) s += w[a] * pooled[a];
                st.multiply_adds += pooled.size();
                next[j][g] = s;
            }
        }
        act = std::move(next);
    }

    const std::size_t r_top = ht.ranks().back();
    std::vector<double> pooled(r_top, 1.0);
    for (std::size_t a = 0; a < r_top; ++a) {
        for (const auto& column : act) pooled[a] *= column[a];
        st.products += act.size();
    }
    std::vector<double> scores(ht.n_classes(), 0.0);
    for (std::size_t y = 0; y < ht.n_classes(); ++y) {
        const auto w = ht.top_weight(y);
        for (std::size_t a = 0; a < r_top; ++a) scores[y] += w[a] * pooled[a];
        st.multiply_adds += r_top;
    }
    if (stats) *stats = st;
    return scores;
}

std::vector<double> forward(const Decomposition& d, const RepGrid& grid, ForwardStats* stats) {
    if (const auto* cp = std::get_if<CpDecomposition>(&d)) return cp_forward(*cp, grid, stats);
    return ht_forward(std::get<HtDecomposition>(d), grid, stats);
}

std::size_t classify(std::span<const double> scores) {
    if (scores.empty()) throw std::invalid_argument("classify: empty score vector");
    std::size_t best = 0;
    for (std::size_t y = 1; y < scores.size(); ++y) {
        if (scores[y] > scores[best]) best = y;
    }
    return best;
}

}  // namespace cac
