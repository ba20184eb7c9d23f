#pragma once

#include "cac/tensor.hpp"

#include <cstddef>
#include <limits>
#include <vector>

namespace cac {

/// Tolerance used to decide which singular values count toward the rank.
/// A singular value sigma_i counts iff sigma_i > rel_tol * sigma_1 * max(rows, cols).
struct RankPolicy {
    double rel_tol = 100.0 * std::numeric_limits<double>::epsilon();
};

/// Singular values in non-increasing order (min(rows, cols) of them).
[[nodiscard]] std::vector<double> singular_values(const Matrix& m);

/// Threshold below which singular values are treated as zero. Zero for the
/// zero matrix.
[[nodiscard]] double rank_threshold(const Matrix& m, std::span<const double> sigma,
                                    const RankPolicy& policy = {});

[[nodiscard]] std::size_t numerical_rank(const Matrix& m, const RankPolicy& policy = {});

/// Rank of the matricization, a lower bound on the CP-rank.
[[nodiscard]] std::size_t cp_rank_lower_bound(const DenseTensor& a, const RankPolicy& policy = {});

/// Frobenius distance from m to the set of matrices of rank <= z
/// (square root of the tail sum of squared singular values).
[[nodiscard]] double low_rank_residual(const Matrix& m, std::size_t z);

/// Same, from precomputed singular values.
[[nodiscard]] double low_rank_residual(std::span<const double> sigma, std::size_t z);

}  // namespace cac
