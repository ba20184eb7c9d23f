#include "cac/rank.hpp"
#include "cac/tensor.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace cac;

TEST(Shape, RejectsEmptyAndZeroDims) {
    EXPECT_THROW(Shape(std::vector<std::size_t>{}), std::invalid_argument);
    EXPECT_THROW(Shape({2, 0, 3}), std::invalid_argument);
    EXPECT_EQ(Shape({2, 3, 4}).size(), 24u);
}

TEST(Shape, OffsetIsRowMajorAndInvertible) {
    const Shape s({2, 3, 4});
    const std::vector<std::size_t> idx{1, 2, 3};
    EXPECT_EQ(s.offset(idx), 1u * 12 + 2u * 4 + 3u);
    std::vector<std::size_t> back(3);
    for (std::size_t f = 0; f < s.size(); ++f) {
        s.unravel(f, back);
        EXPECT_EQ(s.offset(back), f);
    }
    const std::vector<std::size_t> bad{2, 0, 0};
    EXPECT_THROW((void)s.offset(bad), std::out_of_range);
}

TEST(DenseTensor, DataLengthMustMatchShape) {
    EXPECT_THROW(DenseTensor(Shape({2, 2}), std::vector<double>(3)), std::invalid_argument);
}

TEST(TensorProduct, TwoVectors) {
    const std::vector<double> u{1, 2}, v{3, 4};
    const auto t = tensor_product(DenseTensor::vector(u), DenseTensor::vector(v));
    EXPECT_EQ(t.shape(), Shape({2, 2}));
    EXPECT_EQ(t.at({0, 0}), 3);
    EXPECT_EQ(t.at({0, 1}), 4);
    EXPECT_EQ(t.at({1, 0}), 6);
    EXPECT_EQ(t.at({1, 1}), 8);
}

TEST(TensorProduct, ZeroAnnihilates) {
    std::mt19937_64 rng(1);
    const auto a = oracle::random_tensor({2, 3}, rng);
    const auto t = tensor_product(a, DenseTensor(Shape({3, 2})));
    EXPECT_EQ(t.shape(), Shape({2, 3, 3, 2}));
    for (double x : t.data()) EXPECT_EQ(x, 0.0);
}

TEST(TensorProduct, FourIndexLoop) {
    std::mt19937_64 rng(2);
    const auto a = oracle::random_tensor({2, 3}, rng);
    const auto b = oracle::random_tensor({3, 2}, rng);
    const auto t = tensor_product(a, b);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t k = 0; k < 3; ++k)
                for (std::size_t l = 0; l < 2; ++l) EXPECT_EQ(t.at({i, j, k, l}), a.at({i, j}) * b.at({k, l}));
}

TEST(Matricize, OrderTwoIsIdentity) {
    std::mt19937_64 rng(3);
    const auto a = oracle::random_tensor({3, 4}, rng);
    const Matrix m = matricize(a);
    ASSERT_EQ(m.rows(), 3u);
    ASSERT_EQ(m.cols(), 4u);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(m(i, j), a.at({i, j}));
}

TEST(Matricize, DocumentedEntryPlacement) {
    // A_{1,2,2,1} (1-based) lands at row 2, col 3 (1-based).
    DenseTensor a(Shape({2, 2, 2, 2}));
    a.at({0, 1, 1, 0}) = 7.0;
    const Matrix m = matricize(a);
    EXPECT_EQ(m(1, 2), 7.0);
    EXPECT_EQ(oracle::matricization_row_1based({1, 2, 2, 1}, {2, 2, 2, 2}), 2u);
    EXPECT_EQ(oracle::matricization_col_1based({1, 2, 2, 1}, {2, 2, 2, 2}), 3u);
}

TEST(Matricize, MatchesOneBasedFormulaOnMixedDims) {
    std::mt19937_64 rng(4);
    const std::vector<std::size_t> dims{2, 3, 4, 2, 3, 2};
    const auto a = oracle::random_tensor(dims, rng);
    const Matrix m = matricize(a);
    ASSERT_EQ(m.rows(), 2u * 4 * 3);
    ASSERT_EQ(m.cols(), 3u * 2 * 2);
    std::vector<std::size_t> d1(dims.size(), 1);
    do {
        const std::size_t r = oracle::matricization_row_1based(d1, dims) - 1;
        const std::size_t c = oracle::matricization_col_1based(d1, dims) - 1;
        EXPECT_EQ(m(r, c), oracle::entry_1based(a, d1));
    } while (oracle::next_index_1based(d1, dims));
}

TEST(Matricize, OddOrderRejected) {
    EXPECT_THROW((void)matricize(DenseTensor(Shape({2, 2, 2}))), std::invalid_argument);
}

TEST(Matricize, IsLinear) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 20; ++t) {
        const auto a = oracle::random_tensor({2, 3, 2, 2}, rng);
        const auto b = oracle::random_tensor({2, 3, 2, 2}, rng);
        const double alpha = std::normal_distribution<double>()(rng);
        Matrix expected = matricize(a);
        expected *= alpha;
        expected += matricize(b);
        EXPECT_LE(matricize(alpha * a + b).max_abs_diff(expected), 1e-14);
    }
}

TEST(Matricize, TensorProductBecomesKronecker) {
    std::mt19937_64 rng(6);
    for (int t = 0; t < 20; ++t) {
        const auto a = oracle::random_tensor({2, 3}, rng);
        const auto b = oracle::random_tensor({3, 2, 2, 2}, rng);
        EXPECT_EQ(matricize(tensor_product(a, b)).max_abs_diff(kronecker(matricize(a), matricize(b))), 0.0);
    }
}

TEST(Kronecker, IdentityGivesBlockDiagonal) {
    const Matrix b{{1, 2}, {3, 4}};
    const Matrix k = kronecker(Matrix::identity(2), b);
    const Matrix expected{{1, 2, 0, 0}, {3, 4, 0, 0}, {0, 0, 1, 2}, {0, 0, 3, 4}};
    EXPECT_EQ(k.max_abs_diff(expected), 0.0);
}

TEST(Kronecker, OneBasedPlacement) {
    std::mt19937_64 rng(7);
    const Matrix a = oracle::random_matrix(2, 3, rng);
    const Matrix b = oracle::random_matrix(4, 2, rng);
    const Matrix k = kronecker(a, b);
    for (std::size_t i = 1; i <= 2; ++i)
        for (std::size_t j = 1; j <= 3; ++j)
            for (std::size_t p = 1; p <= 4; ++p)
                for (std::size_t l = 1; l <= 2; ++l)
                    EXPECT_EQ(k((i - 1) * 4 + p - 1, (j - 1) * 2 + l - 1), a(i - 1, j - 1) * b(p - 1, l - 1));
}

TEST(Kronecker, RanksMultiply) {
    const Matrix a{{1, 2}, {2, 4}};                         // rank 1
    const Matrix b{{1, 0, 0}, {0, 1, 0}, {1, 1, 0}};        // rank 2
    EXPECT_EQ(numerical_rank(kronecker(a, b)), 2u);
}

TEST(Kronecker, ScalarFactorsOut) {
    std::mt19937_64 rng(8);
    const Matrix a = oracle::random_matrix(3, 2, rng);
    const Matrix b = oracle::random_matrix(2, 2, rng);
    Matrix scaled = a;
    scaled *= 2.5;
    Matrix expected = kronecker(a, b);
    expected *= 2.5;
    EXPECT_LE(kronecker(scaled, b).max_abs_diff(expected), 1e-14);
}

TEST(Squeeze, GroupOneIsIdentity) {
    std::mt19937_64 rng(9);
    const auto a = oracle::random_tensor({2, 3, 2}, rng);
    const auto s = squeeze(a, 1);
    EXPECT_EQ(s.shape(), a.shape());
    EXPECT_EQ(s.max_abs_diff(a), 0.0);
}

TEST(Squeeze, FullGroupFlattens) {
    const DenseTensor a(Shape({2, 2}), {1, 2, 3, 4});
    const auto s = squeeze(a, 2);
    EXPECT_EQ(s.shape(), Shape({4}));
    EXPECT_EQ(std::vector<double>(s.data().begin(), s.data().end()), (std::vector<double>{1, 2, 3, 4}));
}

TEST(Squeeze, MatchesOneBasedFormula) {
    std::mt19937_64 rng(10);
    const std::vector<std::size_t> dims{2, 3, 3, 2, 2, 2};
    const auto a = oracle::random_tensor(dims, rng);
    for (std::size_t q : {1u, 2u, 3u}) {
        const auto s = squeeze(a, q);
        ASSERT_EQ(s.order(), dims.size() / q);
        std::vector<std::size_t> d1(dims.size(), 1);
        do {
            std::vector<std::size_t> merged(dims.size() / q);
            for (std::size_t t = 1; t <= merged.size(); ++t) merged[t - 1] = oracle::squeeze_index_1based(d1, dims, q, t) - 1;
            EXPECT_EQ(s.at(merged), oracle::entry_1based(a, d1));
        } while (oracle::next_index_1based(d1, dims));
    }
}

TEST(Squeeze, RejectsNonDivisor) {
    EXPECT_THROW((void)squeeze(DenseTensor(Shape({2, 2, 2})), 2), std::invalid_argument);
    EXPECT_THROW((void)squeeze(DenseTensor(Shape({2, 2})), 0), std::invalid_argument);
}

TEST(Squeeze, LinearAndMultiplicative) {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 10; ++t) {
        const auto a = oracle::random_tensor({2, 3, 2, 2}, rng);
        const auto b = oracle::random_tensor({3, 3}, rng);
        const auto c = oracle::random_tensor({2, 3, 2, 2}, rng);
        EXPECT_EQ(squeeze(tensor_product(a, b), 2).max_abs_diff(tensor_product(squeeze(a, 2), squeeze(b, 2))), 0.0);
        EXPECT_LE(squeeze(1.5 * a + c, 2).max_abs_diff(1.5 * squeeze(a, 2) + squeeze(c, 2)), 1e-14);
    }
}

TEST(IsSymmetric, Basics) {
    const std::vector<double> v{0.3, -1.2}, e1{1, 0}, e2{0, 1};
    EXPECT_TRUE(is_symmetric(tensor_product(DenseTensor::vector(v), DenseTensor::vector(v))));
    EXPECT_FALSE(is_symmetric(tensor_product(DenseTensor::vector(e1), DenseTensor::vector(e2))));
    EXPECT_THROW((void)is_symmetric(DenseTensor(Shape({2, 3}))), std::invalid_argument);
}
