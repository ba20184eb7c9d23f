#pragma once

#include "cac/random.hpp"
#include "cac/tensor.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace cac {

/// Reconstructions larger than this many entries are rejected up front.
inline constexpr std::size_t kDefaultMaxTensorEntries = 10'000'000;

struct CpSizes {
    std::size_t n_modes = 2;   // N
    std::size_t mode_dim = 1;  // M
    std::size_t n_terms = 1;   // Z
    std::size_t n_classes = 1; // Y
};

/// Joint CP factorization of Y coefficient tensors:
///
///   A^y = sum_z class_weight(y)[z] * factor(z, 0) ⊗ ... ⊗ factor(z, N-1)
///
/// The factors are shared across classes. When `shared` is set the factor
/// vectors do not depend on the position i and are stored once per term,
/// which makes every A^y symmetric.
///
/// Flat layouts: class weights by (y, z); factors by (z, i, d), or (z, d)
/// when shared.
class CpDecomposition {
public:
    CpDecomposition(CpSizes sizes, bool shared, std::vector<double> class_weights,
                    std::vector<double> factors);

    /// All parameters zero.
    static CpDecomposition zeros(CpSizes sizes, bool shared);

    [[nodiscard]] const CpSizes& sizes() const { return sizes_; }
    [[nodiscard]] std::size_t n_modes() const { return sizes_.n_modes; }
    [[nodiscard]] std::size_t mode_dim() const { return sizes_.mode_dim; }
    [[nodiscard]] std::size_t n_terms() const { return sizes_.n_terms; }
    [[nodiscard]] std::size_t n_classes() const { return sizes_.n_classes; }
    [[nodiscard]] bool shared() const { return shared_; }

    [[nodiscard]] std::span<const double> class_weights(std::size_t y) const;
    [[nodiscard]] std::span<double> class_weights(std::size_t y);
    [[nodiscard]] std::span<const double> factor(std::size_t z, std::size_t i) const;
    [[nodiscard]] std::span<double> factor(std::size_t z, std::size_t i);

    [[nodiscard]] const std::vector<double>& class_weight_data() const { return class_weights_; }
    [[nodiscard]] const std::vector<double>& factor_data() const { return factors_; }

private:
    [[nodiscard]] std::size_t factor_offset(std::size_t z, std::size_t i) const;

    CpSizes sizes_;
    bool shared_ = false;
    std::vector<double> class_weights_;
    std::vector<double> factors_;
};

struct HtSizes {
    std::size_t n_modes = 2;          // N, a power of two
    std::size_t mode_dim = 1;         // M
    std::vector<std::size_t> ranks;   // r_0 .. r_{L_c - 1}; L_c = ranks.size()
    std::size_t n_classes = 1;        // Y
};

/// Hierarchical (binary-tree) factorization, optionally truncated.
///
/// Level 0 holds vectors leaf(j, g) in R^M for positions j < N and g < r_0.
/// For 1 <= l < L_c, the tensors of level l are
///
///   phi(l, j, g) = sum_a level_weight(l, j, g)[a] * phi(l-1, 2j, a) ⊗ phi(l-1, 2j+1, a)
///
/// with phi(0, j, a) = leaf(j, a), j < N / 2^l and g < r_l. The class tensors
/// combine the K = N / 2^(L_c - 1) tensors of the last built level at once:
///
///   A^y = sum_a top_weight(y)[a] * phi(L_c-1, 0, a) ⊗ ... ⊗ phi(L_c-1, K-1, a)
///
/// L_c = log2(N) is the full decomposition (K = 2). L_c = 1 combines the leaf
/// vectors directly and is structurally a CP decomposition with Z = r_0.
///
/// When `shared` is set, leaves and level weights do not depend on j.
///
/// Flat layouts: leaves by (j, g, d); level l by (j, g, a); top by (y, a).
/// Shared variants drop the j coordinate.
class HtDecomposition {
public:
    HtDecomposition(HtSizes sizes, bool shared, std::vector<double> leaves,
                    std::vector<std::vector<double>> level_weights, std::vector<double> top_weights);

    static HtDecomposition zeros(HtSizes sizes, bool shared);

    [[nodiscard]] const HtSizes& sizes() const { return sizes_; }
    [[nodiscard]] std::size_t n_modes() const { return sizes_.n_modes; }
    [[nodiscard]] std::size_t mode_dim() const { return sizes_.mode_dim; }
    [[nodiscard]] std::size_t n_classes() const { return sizes_.n_classes; }
    [[nodiscard]] bool shared() const { return shared_; }

    /// L_c: number of levels built before the final combination.
    [[nodiscard]] std::size_t levels_built() const { return sizes_.ranks.size(); }
    /// L = log2(N).
    [[nodiscard]] std::size_t full_depth() const { return depth_; }
    [[nodiscard]] bool truncated() const { return levels_built() < depth_; }
    [[nodiscard]] std::size_t rank(std::size_t level) const { return sizes_.ranks.at(level); }
    [[nodiscard]] const std::vector<std::size_t>& ranks() const { return sizes_.ranks; }

    /// Number of positions j at level l: N / 2^l.
    [[nodiscard]] std::size_t locations(std::size_t level) const { return sizes_.n_modes >> level; }
    /// Number of tensors joined by the final combination: N / 2^(L_c - 1).
    [[nodiscard]] std::size_t top_arity() const { return locations(levels_built() - 1); }

    [[nodiscard]] std::span<const double> leaf(std::size_t j, std::size_t g) const;
    [[nodiscard]] std::span<double> leaf(std::size_t j, std::size_t g);
    /// Weight vector of phi(level, j, g); 1 <= level < L_c. Length r_{level-1}.
    [[nodiscard]] std::span<const double> level_weight(std::size_t level, std::size_t j, std::size_t g) const;
    [[nodiscard]] std::span<double> level_weight(std::size_t level, std::size_t j, std::size_t g);
    /// Length r_{L_c - 1}.
    [[nodiscard]] std::span<const double> top_weight(std::size_t y) const;
    [[nodiscard]] std::span<double> top_weight(std::size_t y);

    [[nodiscard]] const std::vector<double>& leaf_data() const { return leaves_; }
    [[nodiscard]] const std::vector<std::vector<double>>& level_data() const { return levels_; }
    [[nodiscard]] const std::vector<double>& top_data() const { return top_; }

private:
    [[nodiscard]] std::size_t leaf_offset(std::size_t j, std::size_t g) const;
    [[nodiscard]] std::size_t level_offset(std::size_t level, std::size_t j, std::size_t g) const;

    HtSizes sizes_;
    bool shared_ = false;
    std::size_t depth_ = 1;
    std::vector<double> leaves_;
    std::vector<std::vector<double>> levels_;  // index level - 1
    std::vector<double> top_;
};

using Decomposition = std::variant<CpDecomposition, HtDecomposition>;

/// Expected flat lengths for a given size/sharing; used by constructors and
/// deserialization.
[[nodiscard]] std::size_t cp_factor_length(const CpSizes& sizes, bool shared);
[[nodiscard]] std::size_t ht_leaf_length(const HtSizes& sizes, bool shared);
[[nodiscard]] std::size_t ht_level_length(const HtSizes& sizes, bool shared, std::size_t level);

/// Throws std::invalid_argument unless n is a power of two >= 2; returns log2(n).
std::size_t checked_log2(std::size_t n);

[[nodiscard]] DenseTensor cp_reconstruct(const CpDecomposition& cp, std::size_t y,
                                         std::size_t max_entries = kDefaultMaxTensorEntries);
[[nodiscard]] DenseTensor ht_reconstruct(const HtDecomposition& ht, std::size_t y,
                                         std::size_t max_entries = kDefaultMaxTensorEntries);
/// All class tensors, sharing the level tensors between classes.
[[nodiscard]] std::vector<DenseTensor> ht_reconstruct_all(const HtDecomposition& ht,
                                                          std::size_t max_entries = kDefaultMaxTensorEntries);
[[nodiscard]] DenseTensor reconstruct(const Decomposition& d, std::size_t y,
                                      std::size_t max_entries = kDefaultMaxTensorEntries);

/// Full HT with every rank equal to Z that reconstructs exactly the CP
/// tensors: leaves are the CP factors, intermediate weights are indicator
/// vectors, top weights are the CP class weights. Sharing carries over.
[[nodiscard]] HtDecomposition embed_cp_in_ht(const CpDecomposition& cp);

/// CP decomposition with Z = M^N one-hot terms reproducing `target` exactly.
[[nodiscard]] CpDecomposition cp_from_tensor(const DenseTensor& target);

/// Number of stored scalar parameters (shared vectors counted once).
[[nodiscard]] std::size_t param_count(const CpDecomposition& cp);
[[nodiscard]] std::size_t param_count(const HtDecomposition& ht);
[[nodiscard]] std::size_t param_count(const Decomposition& d);

/// Every free parameter drawn i.i.d. from `dist` in flat-layout order.
[[nodiscard]] CpDecomposition sample_cp(const CpSizes& sizes, bool shared, std::uint64_t seed,
                                        Distribution dist = Distribution::normal);
[[nodiscard]] HtDecomposition sample_ht(const HtSizes& sizes, bool shared, std::uint64_t seed,
                                        Distribution dist = Distribution::normal);
[[nodiscard]] Decomposition sample_random(const std::variant<CpSizes, HtSizes>& sizes, bool shared,
                                          std::uint64_t seed, Distribution dist = Distribution::normal);

/// Replaces position-dependent parameters with the position-0 copy.
[[nodiscard]] CpDecomposition make_shared(const CpDecomposition& cp);
[[nodiscard]] HtDecomposition make_shared(const HtDecomposition& ht);
[[nodiscard]] Decomposition make_shared(const Decomposition& d);

[[nodiscard]] std::size_t n_modes(const Decomposition& d);
[[nodiscard]] std::size_t mode_dim(const Decomposition& d);
[[nodiscard]] std::size_t n_classes(const Decomposition& d);

}  // namespace cac
