#include "cac/exact_rank.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cac {

namespace modp {

__extension__ typedef unsigned __int128 u128;

std::uint64_t add(std::uint64_t a, std::uint64_t b) {
    const std::uint64_t s = a + b;  // < 2^62, no overflow
    return s >= kPrime ? s - kPrime : s;
}

std::uint64_t sub(std::uint64_t a, std::uint64_t b) { return a >= b ? a - b : a + kPrime - b; }

std::uint64_t mul(std::uint64_t a, std::uint64_t b) {
    const u128 prod = static_cast<u128>(a) * b;
    const std::uint64_t lo = static_cast<std::uint64_t>(prod) & kPrime;
    const std::uint64_t hi = static_cast<std::uint64_t>(prod >> 61);
    return add(lo, hi);
}

std::uint64_t inverse(std::uint64_t a) {
    if (a == 0) throw std::domain_error("modp::inverse: zero has no inverse");
    // Fermat: a^(p-2).
    std::uint64_t result = 1, base = a, e = kPrime - 2;
    while (e) {
        if (e & 1) result = mul(result, base);
        base = mul(base, base);
        e >>= 1;
    }
    return result;
}

std::uint64_t from_double(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("modp::from_double: non-finite value");
    if (x == 0.0) return 0;
    int e = 0;
    const double f = std::frexp(std::fabs(x), &e);
    const auto mantissa = static_cast<std::uint64_t>(std::ldexp(f, 53));  // exact, < 2^53 < p
    // |x| = mantissa * 2^(e - 53), and 2^61 = 1 (mod p).
    long k = (static_cast<long>(e) - 53) % 61;
    if (k < 0) k += 61;
    const std::uint64_t v = mul(mantissa, std::uint64_t{1} << k);
    return x < 0 ? sub(0, v) : v;
}

std::size_t rank(std::vector<std::uint64_t> m, std::size_t rows, std::size_t cols) {
    if (m.size() != rows * cols) throw std::invalid_argument("modp::rank: size mismatch");
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t pivot = r;
        while (pivot < rows && m[pivot * cols + c] == 0) ++pivot;
        if (pivot == rows) continue;
        if (pivot != r) {
            for (std::size_t k = 0; k < cols; ++k) std::swap(m[r * cols + k], m[pivot * cols + k]);
        }
        const std::uint64_t inv = inverse(m[r * cols + c]);
        for (std::size_t i = r + 1; i < rows; ++i) {
            const std::uint64_t f = mul(m[i * cols + c], inv);
            if (f == 0) continue;
            for (std::size_t k = c; k < cols; ++k) m[i * cols + k] = sub(m[i * cols + k], mul(f, m[r * cols + k]));
        }
        ++r;
    }
    return r;
}

}  // namespace modp

namespace {

using Residues = std::vector<std::uint64_t>;

Residues to_residues(std::span<const double> v) {
    Residues out(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) out[k] = modp::from_double(v[k]);
    return out;
}

Residues outer(const Residues& a, const Residues& b) {
    Residues out(a.size() * b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = modp::mul(a[i], b[j]);
    return out;
}

void add_scaled(Residues& acc, std::uint64_t w, const Residues& t) {
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] = modp::add(acc[k], modp::mul(w, t[k]));
}

void check_size(std::size_t order, std::size_t dim, std::size_t max_entries) {
    double entries = 1.0;
    for (std::size_t k = 0; k < order; ++k) entries *= static_cast<double>(dim);
    if (entries > static_cast<double>(max_entries)) {
        throw std::length_error("exact rank: " + std::to_string(dim) + "^" + std::to_string(order) +
                                " entries exceed the cap of " + std::to_string(max_entries));
    }
}

// Rank of the matricization of the order-N, mode-M tensor `flat` after
// merging modes in consecutive groups of `group`.
std::size_t matricized_rank(const Residues& flat, std::size_t order, std::size_t dim, std::size_t group) {
    if (group == 0 || order % group != 0) {
        throw std::invalid_argument("exact rank: group size " + std::to_string(group) + " does not divide order " +
                                    std::to_string(order));
    }
    const std::size_t merged_order = order / group;
    if (merged_order % 2 != 0) {
        throw std::invalid_argument("exact rank: squeezed order " + std::to_string(merged_order) + " is odd");
    }
    std::size_t merged_dim = 1;
    for (std::size_t k = 0; k < group; ++k) merged_dim *= dim;
    std::size_t side = 1;
    for (std::size_t k = 0; k < merged_order / 2; ++k) side *= merged_dim;

    Residues m(side * side);
    std::vector<std::size_t> index(merged_order);
    for (std::size_t f = 0; f < flat.size(); ++f) {
        std::size_t rest = f;
        for (std::size_t k = merged_order; k-- > 0;) {
            index[k] = rest % merged_dim;
            rest /= merged_dim;
        }
        std::size_t row = 0, col = 0;
        for (std::size_t k = 0; k < merged_order; k += 2) {
            row = row * merged_dim + index[k];
            col = col * merged_dim + index[k + 1];
        }
        m[row * side + col] = flat[f];
    }
    return modp::rank(std::move(m), side, side);
}

}  // namespace

std::size_t exact_matricization_rank(const HtDecomposition& ht, std::size_t y, std::size_t group,
                                     std::size_t max_entries) {
    if (y >= ht.n_classes()) throw std::out_of_range("exact rank: class index out of range");
    check_size(ht.n_modes(), ht.mode_dim(), max_entries);

    std::vector<std::vector<Residues>> current(ht.n_modes());
    for (std::size_t j = 0; j < ht.n_modes(); ++j)
        for (std::size_t g = 0; g < ht.rank(0); ++g) current[j].push_back(to_residues(ht.leaf(j, g)));

    for (std::size_t l = 1; l < ht.levels_built(); ++l) {
        std::vector<std::vector<Residues>> next(ht.locations(l));
        for (std::size_t j = 0; j < next.size(); ++j) {
            std::vector<Residues> pairs;
            for (std::size_t a = 0; a < ht.rank(l - 1); ++a) pairs.push_back(outer(current[2 * j][a], current[2 * j + 1][a]));
            for (std::size_t g = 0; g < ht.rank(l); ++g) {
                const Residues w = to_residues(ht.level_weight(l, j, g));
                Residues phi(pairs.front().size(), 0);
                for (std::size_t a = 0; a < pairs.size(); ++a) add_scaled(phi, w[a], pairs[a]);
                next[j].push_back(std::move(phi));
            }
        }
        current = std::move(next);
    }

    const Residues top = to_residues(ht.top_weight(y));
    Residues acc;
    for (std::size_t a = 0; a < top.size(); ++a) {
        Residues term = current[0][a];
        for (std::size_t j = 1; j < current.size(); ++j) term = outer(term, current[j][a]);
        if (acc.empty()) acc.assign(term.size(), 0);
        add_scaled(acc, top[a], term);
    }
    return matricized_rank(acc, ht.n_modes(), ht.mode_dim(), group);
}

std::size_t exact_matricization_rank(const CpDecomposition& cp, std::size_t y, std::size_t group,
                                     std::size_t max_entries) {
    if (y >= cp.n_classes()) throw std::out_of_range("exact rank: class index out of range");
    check_size(cp.n_modes(), cp.mode_dim(), max_entries);
    const Residues w = to_residues(cp.class_weights(y));
    Residues acc;
    for (std::size_t z = 0; z < cp.n_terms(); ++z) {
        Residues term = to_residues(cp.factor(z, 0));
        for (std::size_t i = 1; i < cp.n_modes(); ++i) term = outer(term, to_residues(cp.factor(z, i)));
        if (acc.empty()) acc.assign(term.size(), 0);
        add_scaled(acc, w[z], term);
    }
    return matricized_rank(acc, cp.n_modes(), cp.mode_dim(), group);
}

}  // namespace cac
