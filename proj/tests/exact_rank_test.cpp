#include "cac/decompositions.hpp"
#include "cac/exact_rank.hpp"
#include "cac/rank.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace cac;

TEST(ModP, FromDoubleIsARingMap) {
    using namespace modp;
    EXPECT_EQ(from_double(0.0), 0u);
    EXPECT_EQ(from_double(1.0), 1u);
    EXPECT_EQ(from_double(3.0), 3u);
    EXPECT_EQ(from_double(-1.0), kPrime - 1);
    EXPECT_EQ(mul(from_double(0.5), 2), 1u);
    EXPECT_EQ(mul(from_double(0.375), 8), 3u);
    const double a = 1.2345678901234567, b = -9.87654321e-7;
    // a * b and a + b are not exact in double, but 2a and a/4 are.
    EXPECT_EQ(from_double(2 * a), add(from_double(a), from_double(a)));
    EXPECT_EQ(from_double(a / 4), mul(from_double(a), inverse(4)));
    EXPECT_EQ(from_double(std::ldexp(b, 200)), mul(from_double(b), from_double(std::ldexp(1.0, 200))));
    EXPECT_THROW((void)from_double(NAN), std::invalid_argument);
}

TEST(ModP, RankOfSmallIntegerMatrices) {
    EXPECT_EQ(modp::rank({1, 2, 2, 4}, 2, 2), 1u);
    EXPECT_EQ(modp::rank({1, 0, 0, 0, 1, 0, 0, 0, 1}, 3, 3), 3u);
    EXPECT_EQ(modp::rank({0, 0, 0, 0}, 2, 2), 0u);
}

TEST(ExactMatricizationRank, CpTermsBoundRank) {
    for (std::size_t z = 1; z <= 5; ++z) {
        const auto cp = sample_cp(CpSizes{8, 3, z, 1}, false, 100 + z);
        EXPECT_EQ(exact_matricization_rank(cp, 0), z);
    }
}

TEST(ExactMatricizationRank, AgreesWithSvdOnWellConditionedCases) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto ht = sample_ht(HtSizes{4, 2, {2, 2}, 1}, false, seed);
        EXPECT_EQ(exact_matricization_rank(ht, 0), cp_rank_lower_bound(ht_reconstruct(ht, 0)));
    }
}

TEST(ExactMatricizationRank, SqueezedGroups) {
    // Generic truncated HT, N = 8, L_c = 3, squeezed in pairs: rank 4.
    const auto ht = sample_ht(HtSizes{8, 2, {2, 2, 2}, 1}, false, 7);
    EXPECT_EQ(exact_matricization_rank(ht, 0, 2), 4u);
    EXPECT_EQ(exact_matricization_rank(ht, 0, 2), numerical_rank(matricize(squeeze(ht_reconstruct(ht, 0), 2))));
    EXPECT_THROW((void)exact_matricization_rank(ht, 0, 3), std::invalid_argument);
    EXPECT_THROW((void)exact_matricization_rank(ht, 1), std::out_of_range);
}
