#include "cac/decompositions.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace cac {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw std::invalid_argument(message);
}

void check_length(const std::vector<double>& v, std::size_t expected, const char* what) {
    if (v.size() != expected) {
        throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(expected) +
                                    " values, got " + std::to_string(v.size()));
    }
}

void check_class(std::size_t y, std::size_t n_classes) {
    if (y >= n_classes) {
        throw std::out_of_range("class index " + std::to_string(y) + " out of range for " +
                                std::to_string(n_classes) + " classes");
    }
}

// Throws std::length_error when M^N exceeds the cap; saturates instead of overflowing.
void check_capacity(std::size_t order, std::size_t dim, std::size_t max_entries) {
    std::size_t size = 1;
    for (std::size_t k = 0; k < order; ++k) {
        if (size > max_entries / dim) {
            throw std::length_error("reconstruction of " + std::to_string(dim) + "^" + std::to_string(order) +
                                    " entries exceeds the cap of " + std::to_string(max_entries));
        }
        size *= dim;
    }
    if (size > max_entries) {
        throw std::length_error("reconstruction of " + std::to_string(size) + " entries exceeds the cap of " +
                                std::to_string(max_entries));
    }
}

void validate(const CpSizes& s) {
    require(s.n_modes >= 2, "CP decomposition: n_modes must be at least 2");
    require(s.mode_dim >= 1, "CP decomposition: mode_dim must be at least 1");
    require(s.n_terms >= 1, "CP decomposition: n_terms must be at least 1");
    require(s.n_classes >= 1, "CP decomposition: n_classes must be at least 1");
}

void validate(const HtSizes& s) {
    const std::size_t depth = checked_log2(s.n_modes);
    require(s.mode_dim >= 1, "HT decomposition: mode_dim must be at least 1");
    require(s.n_classes >= 1, "HT decomposition: n_classes must be at least 1");
    require(!s.ranks.empty() && s.ranks.size() <= depth,
            "HT decomposition: number of ranks (levels built) must be in [1, log2(N)] = [1, " +
                std::to_string(depth) + "], got " + std::to_string(s.ranks.size()));
    for (std::size_t r : s.ranks) require(r >= 1, "HT decomposition: every rank must be at least 1");
}

template <typename Fill>
std::vector<double> filled(std::size_t n, Fill&& fill) {
    std::vector<double> v(n);
    for (double& x : v) x = fill();
    return v;
}

}  // namespace

std::size_t checked_log2(std::size_t n) {
    if (n < 2 || (n & (n - 1)) != 0) {
        throw std::invalid_argument("number of modes must be a power of two >= 2, got " + std::to_string(n));
    }
    std::size_t l = 0;
    while ((std::size_t{1} << l) < n) ++l;
    return l;
}

// ---------------------------------------------------------------- CP

std::size_t cp_factor_length(const CpSizes& s, bool shared) {
    return s.n_terms * (shared ? 1 : s.n_modes) * s.mode_dim;
}

CpDecomposition::CpDecomposition(CpSizes sizes, bool shared, std::vector<double> class_weights,
                                 std::vector<double> factors)
    : sizes_(sizes), shared_(shared), class_weights_(std::move(class_weights)), factors_(std::move(factors)) {
    validate(sizes_);
    check_length(class_weights_, sizes_.n_classes * sizes_.n_terms, "CP class weights");
    check_length(factors_, cp_factor_length(sizes_, shared_), "CP factors");
}

CpDecomposition CpDecomposition::zeros(CpSizes sizes, bool shared) {
    validate(sizes);
    return CpDecomposition(sizes, shared, std::vector<double>(sizes.n_classes * sizes.n_terms, 0.0),
                           std::vector<double>(cp_factor_length(sizes, shared), 0.0));
}

std::span<const double> CpDecomposition::class_weights(std::size_t y) const {
    check_class(y, sizes_.n_classes);
    return std::span<const double>(class_weights_).subspan(y * sizes_.n_terms, sizes_.n_terms);
}

std::span<double> CpDecomposition::class_weights(std::size_t y) {
    check_class(y, sizes_.n_classes);
    return std::span<double>(class_weights_).subspan(y * sizes_.n_terms, sizes_.n_terms);
}

std::size_t CpDecomposition::factor_offset(std::size_t z, std::size_t i) const {
    if (z >= sizes_.n_terms || i >= sizes_.n_modes) throw std::out_of_range("CP factor index out of range");
    return (shared_ ? z : z * sizes_.n_modes + i) * sizes_.mode_dim;
}

std::span<const double> CpDecomposition::factor(std::size_t z, std::size_t i) const {
    return std::span<const double>(factors_).subspan(factor_offset(z, i), sizes_.mode_dim);
}

std::span<double> CpDecomposition::factor(std::size_t z, std::size_t i) {
    return std::span<double>(factors_).subspan(factor_offset(z, i), sizes_.mode_dim);
}

// ---------------------------------------------------------------- HT

std::size_t ht_leaf_length(const HtSizes& s, bool shared) {
    return (shared ? 1 : s.n_modes) * s.ranks.at(0) * s.mode_dim;
}

std::size_t ht_level_length(const HtSizes& s, bool shared, std::size_t level) {
    const std::size_t locations = shared ? 1 : (s.n_modes >> level);
    return locations * s.ranks.at(level) * s.ranks.at(level - 1);
}

HtDecomposition::HtDecomposition(HtSizes sizes, bool shared, std::vector<double> leaves,
                                 std::vector<std::vector<double>> level_weights, std::vector<double> top_weights)
    : sizes_(std::move(sizes)),
      shared_(shared),
      leaves_(std::move(leaves)),
      levels_(std::move(level_weights)),
      top_(std::move(top_weights)) {
    validate(sizes_);
    depth_ = checked_log2(sizes_.n_modes);
    check_length(leaves_, ht_leaf_length(sizes_, shared_), "HT leaf vectors");
    if (levels_.size() + 1 != levels_built()) {
        throw std::invalid_argument("HT level weights: expected " + std::to_string(levels_built() - 1) +
                                    " levels, got " + std::to_string(levels_.size()));
    }
    for (std::size_t l = 1; l < levels_built(); ++l) {
        check_length(levels_[l - 1], ht_level_length(sizes_, shared_, l),
                     ("HT level " + std::to_string(l) + " weights").c_str());
    }
    check_length(top_, sizes_.n_classes * sizes_.ranks.back(), "HT top weights");
}

HtDecomposition HtDecomposition::zeros(HtSizes sizes, bool shared) {
    validate(sizes);
    std::vector<std::vector<double>> levels;
    for (std::size_t l = 1; l < sizes.ranks.size(); ++l) {
        levels.emplace_back(ht_level_length(sizes, shared, l), 0.0);
    }
    std::vector<double> leaves(ht_leaf_length(sizes, shared), 0.0);
    std::vector<double> top(sizes.n_classes * sizes.ranks.back(), 0.0);
    return HtDecomposition(std::move(sizes), shared, std::move(leaves), std::move(levels), std::move(top));
}

std::size_t HtDecomposition::leaf_offset(std::size_t j, std::size_t g) const {
    if (j >= sizes_.n_modes || g >= sizes_.ranks[0]) throw std::out_of_range("HT leaf index out of range");
    return ((shared_ ? 0 : j) * sizes_.ranks[0] + g) * sizes_.mode_dim;
}

std::size_t HtDecomposition::level_offset(std::size_t level, std::size_t j, std::size_t g) const {
    if (level == 0 || level >= levels_built() || j >= locations(level) || g >= sizes_.ranks[level]) {
        throw std::out_of_range("HT level weight index out of range");
    }
    return ((shared_ ? 0 : j) * sizes_.ranks[level] + g) * sizes_.ranks[level - 1];
}

std::span<const double> HtDecomposition::leaf(std::size_t j, std::size_t g) const {
    return std::span<const double>(leaves_).subspan(leaf_offset(j, g), sizes_.mode_dim);
}

std::span<double> HtDecomposition::leaf(std::size_t j, std::size_t g) {
    return std::span<double>(leaves_).subspan(leaf_offset(j, g), sizes_.mode_dim);
}

std::span<const double> HtDecomposition::level_weight(std::size_t level, std::size_t j, std::size_t g) const {
    const std::size_t off = level_offset(level, j, g);
    return std::span<const double>(levels_[level - 1]).subspan(off, sizes_.ranks[level - 1]);
}

std::span<double> HtDecomposition::level_weight(std::size_t level, std::size_t j, std::size_t g) {
    const std::size_t off = level_offset(level, j, g);
    return std::span<double>(levels_[level - 1]).subspan(off, sizes_.ranks[level - 1]);
}

std::span<const double> HtDecomposition::top_weight(std::size_t y) const {
    check_class(y, sizes_.n_classes);
    return std::span<const double>(top_).subspan(y * sizes_.ranks.back(), sizes_.ranks.back());
}

std::span<double> HtDecomposition::top_weight(std::size_t y) {
    check_class(y, sizes_.n_classes);
    return std::span<double>(top_).subspan(y * sizes_.ranks.back(), sizes_.ranks.back());
}

// ---------------------------------------------------------------- reconstruction

DenseTensor cp_reconstruct(const CpDecomposition& cp, std::size_t y, std::size_t max_entries) {
    check_class(y, cp.n_classes());
    check_capacity(cp.n_modes(), cp.mode_dim(), max_entries);
    const auto weights = cp.class_weights(y);
    DenseTensor acc(Shape::uniform(cp.n_modes(), cp.mode_dim()));
    for (std::size_t z = 0; z < cp.n_terms(); ++z) {
        if (weights[z] == 0.0) continue;
        DenseTensor term = DenseTensor::vector(cp.factor(z, 0));
        for (std::size_t i = 1; i < cp.n_modes(); ++i) {
            term = tensor_product(term, DenseTensor::vector(cp.factor(z, i)));
        }
        acc.add_scaled(weights[z], term);
    }
    return acc;
}

namespace {

// Tensors phi(L_c - 1, j, a) of the last built level, indexed [j][a].
std::vector<std::vector<DenseTensor>> ht_last_level(const HtDecomposition& ht) {
    std::vector<std::vector<DenseTensor>> current(ht.n_modes());
    for (std::size_t j = 0; j < ht.n_modes(); ++j) {
        for (std::size_t g = 0; g < ht.rank(0); ++g) current[j].push_back(DenseTensor::vector(ht.leaf(j, g)));
    }
    for (std::size_t l = 1; l < ht.levels_built(); ++l) {
        std::vector<std::vector<DenseTensor>> next(ht.locations(l));
        for (std::size_t j = 0; j < ht.locations(l); ++j) {
            // The pairwise products do not depend on g.
            std::vector<DenseTensor> pairs;
            pairs.reserve(ht.rank(l - 1));
            for (std::size_t a = 0; a < ht.rank(l - 1); ++a) {
                pairs.push_back(tensor_product(current[2 * j][a], current[2 * j + 1][a]));
            }
            for (std::size_t g = 0; g < ht.rank(l); ++g) {
                const auto w = ht.level_weight(l, j, g);
                DenseTensor phi(pairs.front().shape());
                for (std::size_t a = 0; a < pairs.size(); ++a) {
                    if (w[a] != 0.0) phi.add_scaled(w[a], pairs[a]);
                }
                next[j].push_back(std::move(phi));
            }
        }
        current = std::move(next);
    }
    return current;
}

}  // namespace

std::vector<DenseTensor> ht_reconstruct_all(const HtDecomposition& ht, std::size_t max_entries) {
    check_capacity(ht.n_modes(), ht.mode_dim(), max_entries);
    const auto last = ht_last_level(ht);
    const std::size_t r_top = ht.ranks().back();
    std::vector<DenseTensor> terms;
    terms.reserve(r_top);
    for (std::size_t a = 0; a < r_top; ++a) {
        DenseTensor term = last[0][a];
        for (std::size_t j = 1; j < last.size(); ++j) term = tensor_product(term, last[j][a]);
        terms.push_back(std::move(term));
    }
    std::vector<DenseTensor> out;
    out.reserve(ht.n_classes());
    for (std::size_t y = 0; y < ht.n_classes(); ++y) {
        const auto w = ht.top_weight(y);
        DenseTensor acc(Shape::uniform(ht.n_modes(), ht.mode_dim()));
        for (std::size_t a = 0; a < r_top; ++a) {
            if (w[a] != 0.0) acc.add_scaled(w[a], terms[a]);
        }
        out.push_back(std::move(acc));
    }
    return out;
}

DenseTensor ht_reconstruct(const HtDecomposition& ht, std::size_t y, std::size_t max_entries) {
    check_class(y, ht.n_classes());
    check_capacity(ht.n_modes(), ht.mode_dim(), max_entries);
    const auto last = ht_last_level(ht);
    const auto w = ht.top_weight(y);
    DenseTensor acc(Shape::uniform(ht.n_modes(), ht.mode_dim()));
    for (std::size_t a = 0; a < w.size(); ++a) {
        if (w[a] == 0.0) continue;
        DenseTensor term = last[0][a];
        for (std::size_t j = 1; j < last.size(); ++j) term = tensor_product(term, last[j][a]);
        acc.add_scaled(w[a], term);
    }
    return acc;
}

DenseTensor reconstruct(const Decomposition& d, std::size_t y, std::size_t max_entries) {
    return std::visit(
        [&](const auto& dec) -> DenseTensor {
            if constexpr (std::is_same_v<std::decay_t<decltype(dec)>, CpDecomposition>) {
                return cp_reconstruct(dec, y, max_entries);
            } else {
                return ht_reconstruct(dec, y, max_entries);
            }
        },
        d);
}

// ---------------------------------------------------------------- embedding

HtDecomposition embed_cp_in_ht(const CpDecomposition& cp) {
    const std::size_t depth = checked_log2(cp.n_modes());
    const std::size_t z_terms = cp.n_terms();
    HtSizes sizes{cp.n_modes(), cp.mode_dim(), std::vector<std::size_t>(depth, z_terms), cp.n_classes()};
    HtDecomposition ht = HtDecomposition::zeros(sizes, cp.shared());
    const std::size_t positions = cp.shared() ? 1 : cp.n_modes();
    for (std::size_t j = 0; j < positions; ++j) {
        for (std::size_t g = 0; g < z_terms; ++g) {
            const auto src = cp.factor(g, j);
            auto dst = ht.leaf(j, g);
            std::copy(src.begin(), src.end(), dst.begin());
        }
    }
    for (std::size_t l = 1; l < depth; ++l) {
        const std::size_t locations = cp.shared() ? 1 : ht.locations(l);
        for (std::size_t j = 0; j < locations; ++j) {
            for (std::size_t g = 0; g < z_terms; ++g) ht.level_weight(l, j, g)[g] = 1.0;
        }
    }
    for (std::size_t y = 0; y < cp.n_classes(); ++y) {
        const auto src = cp.class_weights(y);
        auto dst = ht.top_weight(y);
        std::copy(src.begin(), src.end(), dst.begin());
    }
    return ht;
}

CpDecomposition cp_from_tensor(const DenseTensor& target) {
    const auto& dims = target.shape().dims();
    const std::size_t dim = dims.front();
    for (std::size_t d : dims) require(d == dim, "cp_from_tensor: all mode dimensions must be equal");
    require(target.order() >= 2, "cp_from_tensor: order must be at least 2");
    const std::size_t order = target.order();
    const std::size_t terms = target.size();
    CpDecomposition cp = CpDecomposition::zeros({order, dim, terms, 1}, false);
    std::vector<std::size_t> index(order);
    for (std::size_t z = 0; z < terms; ++z) {
        target.shape().unravel(z, index);
        for (std::size_t i = 0; i < order; ++i) cp.factor(z, i)[index[i]] = 1.0;
        cp.class_weights(0)[z] = target.data()[z];
    }
    return cp;
}

// ---------------------------------------------------------------- parameter counts

std::size_t param_count(const CpDecomposition& cp) {
    return cp.factor_data().size() + cp.class_weight_data().size();
}

std::size_t param_count(const HtDecomposition& ht) {
    std::size_t total = ht.leaf_data().size() + ht.top_data().size();
    for (const auto& level : ht.level_data()) total += level.size();
    return total;
}

std::size_t param_count(const Decomposition& d) {
    return std::visit([](const auto& dec) { return param_count(dec); }, d);
}

// ---------------------------------------------------------------- sampling

CpDecomposition sample_cp(const CpSizes& sizes, bool shared, std::uint64_t seed, Distribution dist) {
    validate(sizes);
    Sampler draw(seed, dist);
    // Factors first, then class weights, each in flat-layout order.
    auto factors = filled(cp_factor_length(sizes, shared), draw);
    auto weights = filled(sizes.n_classes * sizes.n_terms, draw);
    return CpDecomposition(sizes, shared, std::move(weights), std::move(factors));
}

HtDecomposition sample_ht(const HtSizes& sizes, bool shared, std::uint64_t seed, Distribution dist) {
    validate(sizes);
    Sampler draw(seed, dist);
    auto leaves = filled(ht_leaf_length(sizes, shared), draw);
    std::vector<std::vector<double>> levels;
    for (std::size_t l = 1; l < sizes.ranks.size(); ++l) {
        levels.push_back(filled(ht_level_length(sizes, shared, l), draw));
    }
    auto top = filled(sizes.n_classes * sizes.ranks.back(), draw);
    return HtDecomposition(sizes, shared, std::move(leaves), std::move(levels), std::move(top));
}

Decomposition sample_random(const std::variant<CpSizes, HtSizes>& sizes, bool shared, std::uint64_t seed,
                            Distribution dist) {
    if (const auto* cp = std::get_if<CpSizes>(&sizes)) return sample_cp(*cp, shared, seed, dist);
    return sample_ht(std::get<HtSizes>(sizes), shared, seed, dist);
}

// ---------------------------------------------------------------- sharing

CpDecomposition make_shared(const CpDecomposition& cp) {
    if (cp.shared()) return cp;
    CpDecomposition out = CpDecomposition::zeros(cp.sizes(), true);
    for (std::size_t z = 0; z < cp.n_terms(); ++z) {
        const auto src = cp.factor(z, 0);
        std::copy(src.begin(), src.end(), out.factor(z, 0).begin());
    }
    for (std::size_t y = 0; y < cp.n_classes(); ++y) {
        const auto src = cp.class_weights(y);
        std::copy(src.begin(), src.end(), out.class_weights(y).begin());
    }
    return out;
}

HtDecomposition make_shared(const HtDecomposition& ht) {
    if (ht.shared()) return ht;
    HtDecomposition out = HtDecomposition::zeros(ht.sizes(), true);
    for (std::size_t g = 0; g < ht.rank(0); ++g) {
        const auto src = ht.leaf(0, g);
        std::copy(src.begin(), src.end(), out.leaf(0, g).begin());
    }
    for (std::size_t l = 1; l < ht.levels_built(); ++l) {
        for (std::size_t g = 0; g < ht.rank(l); ++g) {
            const auto src = ht.level_weight(l, 0, g);
            std::copy(src.begin(), src.end(), out.level_weight(l, 0, g).begin());
        }
    }
    for (std::size_t y = 0; y < ht.n_classes(); ++y) {
        const auto src = ht.top_weight(y);
        std::copy(src.begin(), src.end(), out.top_weight(y).begin());
    }
    return out;
}

Decomposition make_shared(const Decomposition& d) {
    return std::visit([](const auto& dec) -> Decomposition { return make_shared(dec); }, d);
}

std::size_t n_modes(const Decomposition& d) {
    return std::visit([](const auto& dec) { return dec.n_modes(); }, d);
}

std::size_t mode_dim(const Decomposition& d) {
    return std::visit([](const auto& dec) { return dec.mode_dim(); }, d);
}

std::size_t n_classes(const Decomposition& d) {
    return std::visit([](const auto& dec) { return dec.n_classes(); }, d);
}

}  // namespace cac
