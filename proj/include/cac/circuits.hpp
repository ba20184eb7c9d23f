#pragma once

#include "cac/decompositions.hpp"
#include "cac/tensor.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace cac {

enum class Activation { threshold, relu, sigmoid };

/// Diagonal-covariance Gaussian density N(x; mean, diag(variance)).
struct GaussianChannel {
    std::vector<double> mean;
    std::vector<double> variance;
};

/// sigma(<w, x> + b).
struct NeuronChannel {
    std::vector<double> weights;
    double bias = 0.0;
};

/// The M functions f_theta_1..f_theta_M of the representation layer.
class RepresentationFamily {
public:
    enum class Kind { gaussian, neuron };

    static RepresentationFamily gaussian(std::vector<GaussianChannel> channels);
    static RepresentationFamily neuron(std::vector<NeuronChannel> channels, Activation activation);

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] Activation activation() const { return activation_; }
    [[nodiscard]] std::size_t channels() const;
    [[nodiscard]] std::size_t input_dim() const { return input_dim_; }
    [[nodiscard]] const std::vector<GaussianChannel>& gaussians() const { return gaussians_; }
    [[nodiscard]] const std::vector<NeuronChannel>& neurons() const { return neurons_; }

    /// f_theta_d(x).
    [[nodiscard]] double evaluate(std::size_t d, std::span<const double> x) const;

private:
    Kind kind_ = Kind::gaussian;
    Activation activation_ = Activation::relu;
    std::size_t input_dim_ = 0;
    std::vector<GaussianChannel> gaussians_;
    std::vector<NeuronChannel> neurons_;
};

[[nodiscard]] double activate(Activation a, double z);

/// X = (x_1..x_N), every x_i of the same dimension s >= 1.
class Instance {
public:
    explicit Instance(std::vector<std::vector<double>> vectors);

    [[nodiscard]] std::size_t size() const { return vectors_.size(); }
    [[nodiscard]] std::size_t dim() const { return vectors_.front().size(); }
    [[nodiscard]] std::span<const double> operator[](std::size_t i) const { return vectors_[i]; }
    [[nodiscard]] const std::vector<std::vector<double>>& vectors() const { return vectors_; }

private:
    std::vector<std::vector<double>> vectors_;
};

/// M x N activations of the representation layer; (d, i) = f_theta_d(x_i).
class RepGrid {
public:
    RepGrid(std::size_t channels, std::size_t positions);
    RepGrid(std::size_t channels, std::size_t positions, std::vector<double> values);

    [[nodiscard]] std::size_t channels() const { return channels_; }
    [[nodiscard]] std::size_t positions() const { return positions_; }
    [[nodiscard]] double operator()(std::size_t d, std::size_t i) const { return values_[d * positions_ + i]; }
    double& operator()(std::size_t d, std::size_t i) { return values_[d * positions_ + i]; }
    [[nodiscard]] const std::vector<double>& values() const { return values_; }

    /// Same grid with positions reordered: result(d, i) = this(d, order[i]).
    [[nodiscard]] RepGrid permuted(std::span<const std::size_t> order) const;

private:
    std::size_t channels_;
    std::size_t positions_;
    std::vector<double> values_;
};

/// Multiply-add and multiply counts of one forward pass.
struct ForwardStats {
    std::size_t multiply_adds = 0;
    std::size_t products = 0;
};

/// Default cap on M^N for the enumerating score.
inline constexpr std::size_t kDefaultEnumerationCap = 10'000'000;

[[nodiscard]] RepGrid representation_layer(const Instance& x, const RepresentationFamily& family);

/// Reference score: sum over all M^N index tuples of
/// A_{d_1..d_N} * prod_i f_{d_i}(x_i). Throws std::length_error above `cap`.
[[nodiscard]] double score_via_tensor(const DenseTensor& a, const RepGrid& grid,
                                      std::size_t cap = kDefaultEnumerationCap);

/// Shallow network: 1x1 conv with Z channels (weights may differ per
/// position), global product pooling, dense output layer.
[[nodiscard]] std::vector<double> cp_forward(const CpDecomposition& cp, const RepGrid& grid,
                                             ForwardStats* stats = nullptr);

/// Deep network: L_c rounds of 1x1 conv followed by size-2 product pooling,
/// then global product pooling over the remaining positions and a dense
/// output layer. With L_c = log2 N the final pooling also has size 2.
[[nodiscard]] std::vector<double> ht_forward(const HtDecomposition& ht, const RepGrid& grid,
                                             ForwardStats* stats = nullptr);

[[nodiscard]] std::vector<double> forward(const Decomposition& d, const RepGrid& grid,
                                          ForwardStats* stats = nullptr);

/// 0-based argmax; ties go to the lowest index. Throws on empty input.
[[nodiscard]] std::size_t classify(std::span<const double> scores);

}  // namespace cac
