#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace cac {

/// Mode dimensions M_1..M_N of a dense tensor. Every dimension is >= 1 and
/// the order is >= 1.
class Shape {
public:
    Shape() = default;
    explicit Shape(std::vector<std::size_t> dims);
    Shape(std::initializer_list<std::size_t> dims);

    /// N copies of the same dimension M.
    static Shape uniform(std::size_t order, std::size_t dim);

    [[nodiscard]] std::size_t order() const { return dims_.size(); }
    [[nodiscard]] std::size_t operator[](std::size_t mode) const { return dims_[mode]; }
    [[nodiscard]] const std::vector<std::size_t>& dims() const { return dims_; }

    /// Product of all dimensions.
    [[nodiscard]] std::size_t size() const;

    /// Row-major offset of a 0-based multi-index (last mode fastest).
    [[nodiscard]] std::size_t offset(std::span<const std::size_t> index) const;

    /// Inverse of offset().
    void unravel(std::size_t offset, std::span<std::size_t> index) const;

    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const Shape&, const Shape&) = default;

private:
    std::vector<std::size_t> dims_;
};

/// Order-N real array stored row-major.
class DenseTensor {
public:
    DenseTensor() = default;
    explicit DenseTensor(Shape shape);
    DenseTensor(Shape shape, std::vector<double> data);

    /// Order-1 tensor holding the given values.
    static DenseTensor vector(std::span<const double> values);

    [[nodiscard]] const Shape& shape() const { return shape_; }
    [[nodiscard]] std::size_t order() const { return shape_.order(); }
    [[nodiscard]] std::size_t size() const { return data_.size(); }

    [[nodiscard]] std::span<const double> data() const { return data_; }
    [[nodiscard]] std::span<double> data() { return data_; }

    [[nodiscard]] double at(std::span<const std::size_t> index) const {
        return data_[shape_.offset(index)];
    }
    double& at(std::span<const std::size_t> index) { return data_[shape_.offset(index)]; }
    [[nodiscard]] double at(std::initializer_list<std::size_t> index) const {
        return at(std::span<const std::size_t>(index.begin(), index.size()));
    }
    double& at(std::initializer_list<std::size_t> index) {
        return at(std::span<const std::size_t>(index.begin(), index.size()));
    }

    DenseTensor& operator+=(const DenseTensor& other);
    DenseTensor& operator*=(double alpha);

    /// this += alpha * other
    void add_scaled(double alpha, const DenseTensor& other);

    /// Largest absolute entrywise difference; shapes must match.
    [[nodiscard]] double max_abs_diff(const DenseTensor& other) const;

private:
    Shape shape_;
    std::vector<double> data_;
};

DenseTensor operator+(DenseTensor a, const DenseTensor& b);
DenseTensor operator*(double alpha, DenseTensor a);

/// Row-major dense matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);

    [[nodiscard]] std::size_t rows() const { return rows_; }
    [[nodiscard]] std::size_t cols() const { return cols_; }
    [[nodiscard]] std::span<const double> data() const { return data_; }
    [[nodiscard]] std::span<double> data() { return data_; }

    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

    Matrix& operator*=(double alpha);
    Matrix& operator+=(const Matrix& other);

    [[nodiscard]] double max_abs_diff(const Matrix& other) const;
    [[nodiscard]] double frobenius_norm() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& m);

/// (a ⊗ b)_{d_1..d_{P+Q}} = a_{d_1..d_P} * b_{d_{P+1}..d_{P+Q}}.
[[nodiscard]] DenseTensor tensor_product(const DenseTensor& a, const DenseTensor& b);

/// Tensor product of all tensors in order, left to right.
[[nodiscard]] DenseTensor tensor_product(std::span<const DenseTensor> factors);

/// Matricization [a]: odd modes (1st, 3rd, ...) index rows, even modes index
/// columns, each group flattened with its last mode fastest. Requires even
/// order; throws std::invalid_argument otherwise.
[[nodiscard]] Matrix matricize(const DenseTensor& a);

/// Kronecker product: a_{ij} b_{kl} lands at row i*rows(b)+k, column
/// j*cols(b)+l (0-based).
[[nodiscard]] Matrix kronecker(const Matrix& a, const Matrix& b);

/// Squeezing operator: merges consecutive modes in groups of q. Each merged
/// mode has the product of its group's dimensions and flattens the group
/// with its last mode fastest. Throws std::invalid_argument unless q divides
/// the order.
[[nodiscard]] DenseTensor squeeze(const DenseTensor& a, std::size_t q);

/// True iff the tensor is invariant under every permutation of its modes,
/// up to abs_tol. All dimensions must be equal (std::invalid_argument).
[[nodiscard]] bool is_symmetric(const DenseTensor& a, double abs_tol = 1e-12);

}  // namespace cac
