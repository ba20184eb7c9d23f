// Independent reference computations for the tests. Written against the
// defining formulas with explicit loops, sharing no code with the library.
#pragma once

#include "cac/tensor.hpp"

#include <cstddef>
#include <random>
#include <vector>

namespace oracle {

inline cac::DenseTensor random_tensor(std::vector<std::size_t> dims, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    cac::Shape shape(std::move(dims));
    std::vector<double> data(shape.size());
    for (double& v : data) v = n(rng);
    return cac::DenseTensor(shape, std::move(data));
}

inline cac::Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    cac::Matrix m(rows, cols);
    for (double& v : m.data()) v = n(rng);
    return m;
}

// 1-based row index of the matricization:
// 1 + sum_{i=1}^{N/2} (d_{2i-1} - 1) prod_{j=i+1}^{N/2} M_{2j-1}
inline std::size_t matricization_row_1based(const std::vector<std::size_t>& d1, const std::vector<std::size_t>& dims) {
    const std::size_t half = dims.size() / 2;
    std::size_t row = 1;
    for (std::size_t i = 1; i <= half; ++i) {
        std::size_t prod = 1;
        for (std::size_t j = i + 1; j <= half; ++j) prod *= dims[2 * j - 2];
        row += (d1[2 * i - 2] - 1) * prod;
    }
    return row;
}

inline std::size_t matricization_col_1based(const std::vector<std::size_t>& d1, const std::vector<std::size_t>& dims) {
    const std::size_t half = dims.size() / 2;
    std::size_t col = 1;
    for (std::size_t i = 1; i <= half; ++i) {
        std::size_t prod = 1;
        for (std::size_t j = i + 1; j <= half; ++j) prod *= dims[2 * j - 1];
        col += (d1[2 * i - 1] - 1) * prod;
    }
    return col;
}

// 1-based merged index of group t under the squeezing operator:
// 1 + sum_{i=1}^{q} (d_{i+q(t-1)} - 1) prod_{j=i+1}^{q} M_{j+q(t-1)}
inline std::size_t squeeze_index_1based(const std::vector<std::size_t>& d1, const std::vector<std::size_t>& dims,
                                        std::size_t q, std::size_t t) {
    std::size_t out = 1;
    for (std::size_t i = 1; i <= q; ++i) {
        std::size_t prod = 1;
        for (std::size_t j = i + 1; j <= q; ++j) prod *= dims[j + q * (t - 1) - 1];
        out += (d1[i + q * (t - 1) - 1] - 1) * prod;
    }
    return out;
}

// Advances a 1-based multi-index; false after the last one.
inline bool next_index_1based(std::vector<std::size_t>& d1, const std::vector<std::size_t>& dims) {
    for (std::size_t k = d1.size(); k-- > 0;) {
        if (++d1[k] <= dims[k]) return true;
        d1[k] = 1;
    }
    return false;
}

inline double entry_1based(const cac::DenseTensor& a, const std::vector<std::size_t>& d1) {
    std::vector<std::size_t> d0(d1.size());
    for (std::size_t k = 0; k < d1.size(); ++k) d0[k] = d1[k] - 1;
    return a.at(d0);
}

}  // namespace oracle
