#pragma once

#include "cac/circuits.hpp"
#include "cac/decompositions.hpp"

#include <span>
#include <stdexcept>
#include <vector>

namespace cac {

/// Raised when a decomposition or grid cannot be evaluated in log-space
/// (negative weight, non-positive activation). The message names the
/// offending parameter.
class LogDomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// MEX_beta(x, b) = (1/beta) * log( (1/n) * sum_j exp(beta * (x_j + b_j)) ).
///
/// Evaluated with a max shift so that only non-positive numbers are
/// exponentiated. beta == 0 returns the limit mean_j(x_j + b_j). Entries equal
/// to -infinity are allowed; if every entry is -infinity the result is
/// -infinity for beta > 0.
///
/// Throws std::invalid_argument on empty input or length mismatch.
[[nodiscard]] double mex(double beta, std::span<const double> x, std::span<const double> b);

/// log(sum_j exp(v_j)) with -infinity entries treated as absent terms.
/// Computed as MEX_1 over the present terms plus log(count). Returns
/// -infinity when no term is present.
[[nodiscard]] double log_sum_exp(std::span<const double> v);

/// sum_j v_j computed as n * MEX_0(v, 0), the pooling primitive of the
/// log-space network.
[[nodiscard]] double log_product_pool(std::span<const double> v);

/// Log of the per-class forward scores.
///
/// Every conv (weighted sum) becomes a log-sum-exp over
/// log(weight) + log(activation), and every product pooling becomes a plain
/// sum of log-activations. Zero weights are absent terms. Requires all
/// decomposition weights >= 0 and all grid entries > 0; otherwise throws
/// LogDomainError. exp() of the result reproduces forward() whenever the
/// latter is representable in double precision.
[[nodiscard]] std::vector<double> logspace_forward(const CpDecomposition& cp, const RepGrid& grid);
[[nodiscard]] std::vector<double> logspace_forward(const HtDecomposition& ht, const RepGrid& grid);
[[nodiscard]] std::vector<double> logspace_forward(const Decomposition& d, const RepGrid& grid);

}  // namespace cac
