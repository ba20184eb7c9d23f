#include "cac/rank.hpp"
#include "cac/tensor.hpp"
#include "oracles.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace cac;
using boost::multiprecision::cpp_rational;

namespace {

// Exact rank by Gaussian elimination over the rationals.
std::size_t rational_rank(std::vector<std::vector<cpp_rational>> m) {
    const std::size_t rows = m.size(), cols = m.empty() ? 0 : m[0].size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        while (p < rows && m[p][c] == 0) ++p;
        if (p == rows) continue;
        std::swap(m[p], m[r]);
        for (std::size_t i = r + 1; i < rows; ++i) {
            if (m[i][c] == 0) continue;
            const cpp_rational f = m[i][c] / m[r][c];
            for (std::size_t k = c; k < cols; ++k) m[i][k] -= f * m[r][k];
        }
        ++r;
    }
    return r;
}

// Doubles are dyadic rationals, so this conversion is exact.
cpp_rational exact(double x) {
    int e = 0;
    const double f = std::frexp(x, &e);
    const auto mant = static_cast<long long>(std::ldexp(f, 53));
    cpp_rational out(mant);
    const int shift = e - 53;
    const cpp_rational two(2);
    for (int k = 0; k < std::abs(shift); ++k) {
        if (shift > 0) out *= two;
        else out /= two;
    }
    return out;
}

}  // namespace

TEST(NumericalRank, SmallCases) {
    EXPECT_EQ(numerical_rank(Matrix::identity(3)), 3u);
    EXPECT_EQ(numerical_rank(Matrix{{1, 2}, {2, 4}}), 1u);
    EXPECT_EQ(numerical_rank(Matrix(3, 4)), 0u);
}

TEST(NumericalRank, ThresholdFollowsPolicy) {
    const Matrix m{{1, 0}, {0, 1e-10}};
    EXPECT_EQ(numerical_rank(m), 2u);
    EXPECT_EQ(numerical_rank(m, RankPolicy{1e-9}), 1u);
    const auto sigma = singular_values(m);
    EXPECT_DOUBLE_EQ(rank_threshold(m, sigma), 100 * std::numeric_limits<double>::epsilon() * 1.0 * 2);
}

TEST(NumericalRank, LowRankProductAgreesWithExactRowReduction) {
    std::mt19937_64 rng(20);
    for (int t = 0; t < 5; ++t) {
        const Matrix a = oracle::random_matrix(10, 4, rng);
        const Matrix b = oracle::random_matrix(4, 10, rng);
        std::vector<std::vector<cpp_rational>> prod(10, std::vector<cpp_rational>(10));
        for (std::size_t i = 0; i < 10; ++i)
            for (std::size_t j = 0; j < 10; ++j)
                for (std::size_t k = 0; k < 4; ++k) prod[i][j] += exact(a(i, k)) * exact(b(k, j));
        EXPECT_EQ(rational_rank(prod), 4u);
        EXPECT_EQ(numerical_rank(a * b), 4u);
    }
}

TEST(SingularValues, DescendingAndMatchOrthogonalDiagonal) {
    const Matrix m{{0, 3, 0}, {2, 0, 0}};
    const auto s = singular_values(m);
    ASSERT_EQ(s.size(), 2u);
    EXPECT_NEAR(s[0], 3.0, 1e-14);
    EXPECT_NEAR(s[1], 2.0, 1e-14);
}

TEST(CpRankLowerBound, IntegerFixtures) {
    const std::vector<double> v{1, 2, -1};
    const auto vt = DenseTensor::vector(v);
    const DenseTensor parts[] = {vt, vt, vt, vt};
    EXPECT_EQ(cp_rank_lower_bound(tensor_product(parts)), 1u);

    DenseTensor diag(Shape({2, 2, 2, 2}));
    diag.at({0, 0, 0, 0}) = 1;
    diag.at({1, 1, 1, 1}) = 1;
    EXPECT_EQ(cp_rank_lower_bound(diag), 2u);
    EXPECT_THROW((void)cp_rank_lower_bound(DenseTensor(Shape({2, 2, 2}))), std::invalid_argument);
}

TEST(CpRankLowerBound, SumOfRankOneTermsBoundedByTermCount) {
    std::mt19937_64 rng(21);
    for (std::size_t z = 1; z <= 5; ++z) {
        DenseTensor sum(Shape::uniform(4, 3));
        for (std::size_t k = 0; k < z; ++k) {
            std::vector<DenseTensor> f;
            for (int i = 0; i < 4; ++i) f.push_back(oracle::random_tensor({3}, rng));
            sum += tensor_product(f);
        }
        EXPECT_LE(cp_rank_lower_bound(sum), z);
    }
}

TEST(LowRankResidual, Cases) {
    EXPECT_NEAR(low_rank_residual(Matrix::identity(3), 2), 1.0, 1e-14);
    EXPECT_NEAR(low_rank_residual(Matrix::identity(3), 0), std::sqrt(3.0), 1e-14);
    const Matrix r1{{1, 2}, {2, 4}};
    EXPECT_LE(low_rank_residual(r1, 1), 1e-14);
    EXPECT_EQ(low_rank_residual(r1, 5), 0.0);
}

TEST(LowRankResidual, NonIncreasingAndZeroExactlyAtRank) {
    std::mt19937_64 rng(22);
    const Matrix m = oracle::random_matrix(6, 3, rng) * oracle::random_matrix(3, 6, rng);
    const auto sigma = singular_values(m);
    const std::size_t rank = numerical_rank(m);
    ASSERT_EQ(rank, 3u);
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t z = 0; z <= 6; ++z) {
        const double r = low_rank_residual(sigma, z);
        EXPECT_LE(r, prev);
        prev = r;
        if (z < rank) {
            EXPECT_GE(r, sigma[z]);
        } else {
            EXPECT_LE(r, 1e-12 * sigma[0]);
        }
    }
}

TEST(Kronecker, RankMultiplicativeOnRandomPairs) {
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<std::size_t> dim(1, 6);
    for (int t = 0; t < 50; ++t) {
        const std::size_t ra = dim(rng), ca = dim(rng), rb = dim(rng), cb = dim(rng);
        const Matrix a = oracle::random_matrix(ra, ca, rng);
        const Matrix b = oracle::random_matrix(rb, cb, rng);
        EXPECT_EQ(numerical_rank(kronecker(a, b)), numerical_rank(a) * numerical_rank(b));
    }
}
