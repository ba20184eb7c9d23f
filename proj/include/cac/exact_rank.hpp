#pragma once

#include "cac/decompositions.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace cac {

/// Arithmetic modulo the Mersenne prime 2^61 - 1.
namespace modp {

inline constexpr std::uint64_t kPrime = (std::uint64_t{1} << 61) - 1;

[[nodiscard]] std::uint64_t add(std::uint64_t a, std::uint64_t b);
[[nodiscard]] std::uint64_t sub(std::uint64_t a, std::uint64_t b);
[[nodiscard]] std::uint64_t mul(std::uint64_t a, std::uint64_t b);
[[nodiscard]] std::uint64_t inverse(std::uint64_t a);

/// Image of a finite double in F_p. Every finite double is m * 2^e with
/// integer m, and 2 is invertible mod p, so the map is exact and a ring
/// homomorphism on the dyadic rationals. Throws on NaN or infinity.
[[nodiscard]] std::uint64_t from_double(double x);

/// Rank over F_p of a rows x cols row-major matrix (Gaussian elimination).
[[nodiscard]] std::size_t rank(std::vector<std::uint64_t> m, std::size_t rows, std::size_t cols);

}  // namespace modp

/// Rank of the matricization of the class-y tensor, computed without
/// rounding: the tensor is rebuilt from the (exactly representable)
/// parameters in F_p and its matricization is row-reduced there. The result
/// never exceeds the rank over the rationals, so it is a certified lower
/// bound on the matricization rank of the exactly reconstructed tensor.
///
/// `group` > 1 squeezes consecutive modes in groups of that size first.
/// Throws std::length_error above `max_entries`.
[[nodiscard]] std::size_t exact_matricization_rank(const HtDecomposition& ht, std::size_t y, std::size_t group = 1,
                                                   std::size_t max_entries = kDefaultMaxTensorEntries);
[[nodiscard]] std::size_t exact_matricization_rank(const CpDecomposition& cp, std::size_t y, std::size_t group = 1,
                                                   std::size_t max_entries = kDefaultMaxTensorEntries);

}  // namespace cac
