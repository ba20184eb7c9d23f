#include "cac/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace cac {

namespace {

void require_same_shape(const Shape& a, const Shape& b, const char* what) {
    if (a != b) {
        throw std::invalid_argument(std::string(what) + ": shape mismatch " + a.to_string() +
                                    " vs " + b.to_string());
    }
}

// Advances a row-major multi-index; returns false after the last index.
bool increment(std::vector<std::size_t>& index, const std::vector<std::size_t>& dims) {
    for (std::size_t k = index.size(); k-- > 0;) {
        if (++index[k] < dims[k]) return true;
        index[k] = 0;
    }
    return false;
}

}  // namespace

// ---------------------------------------------------------------- Shape

Shape::Shape(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw std::invalid_argument("Shape: order must be at least 1");
    for (std::size_t d : dims_) {
        if (d == 0) throw std::invalid_argument("Shape: every dimension must be at least 1");
    }
}

Shape::Shape(std::initializer_list<std::size_t> dims) : Shape(std::vector<std::size_t>(dims)) {}

Shape Shape::uniform(std::size_t order, std::size_t dim) {
    return Shape(std::vector<std::size_t>(order, dim));
}

std::size_t Shape::size() const {
    return std::accumulate(dims_.begin(), dims_.end(), std::size_t{1}, std::multiplies<>());
}

std::size_t Shape::offset(std::span<const std::size_t> index) const {
    if (index.size() != dims_.size()) {
        throw std::invalid_argument("Shape::offset: index has wrong order");
    }
    std::size_t off = 0;
    for (std::size_t k = 0; k < dims_.size(); ++k) {
        if (index[k] >= dims_[k]) throw std::out_of_range("Shape::offset: index out of range");
        off = off * dims_[k] + index[k];
    }
    return off;
}

void Shape::unravel(std::size_t offset, std::span<std::size_t> index) const {
    for (std::size_t k = dims_.size(); k-- > 0;) {
        index[k] = offset % dims_[k];
        offset /= dims_[k];
    }
}

std::string Shape::to_string() const {
    std::ostringstream os;
    os << '(';
    for (std::size_t k = 0; k < dims_.size(); ++k) os << (k ? "x" : "") << dims_[k];
    os << ')';
    return os.str();
}

// ---------------------------------------------------------------- DenseTensor

DenseTensor::DenseTensor(Shape shape) : shape_(std::move(shape)), data_(shape_.size(), 0.0) {}

DenseTensor::DenseTensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != shape_.size()) {
        throw std::invalid_argument("DenseTensor: data length " + std::to_string(data_.size()) +
                                    " does not match shape " + shape_.to_string());
    }
}

DenseTensor DenseTensor::vector(std::span<const double> values) {
    return DenseTensor(Shape{values.size()}, std::vector<double>(values.begin(), values.end()));
}

DenseTensor& DenseTensor::operator+=(const DenseTensor& other) {
    add_scaled(1.0, other);
    return *this;
}

DenseTensor& DenseTensor::operator*=(double alpha) {
    for (double& v : data_) v *= alpha;
    return *this;
}

void DenseTensor::add_scaled(double alpha, const DenseTensor& other) {
    require_same_shape(shape_, other.shape_, "DenseTensor::add_scaled");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += alpha * other.data_[k];
}

double DenseTensor::max_abs_diff(const DenseTensor& other) const {
    require_same_shape(shape_, other.shape_, "DenseTensor::max_abs_diff");
    double worst = 0.0;
    for (std::size_t k = 0; k < data_.size(); ++k) {
        worst = std::max(worst, std::abs(data_[k] - other.data_[k]));
    }
    return worst;
}

DenseTensor operator+(DenseTensor a, const DenseTensor& b) {
    a += b;
    return a;
}

DenseTensor operator*(double alpha, DenseTensor a) {
    a *= alpha;
    return a;
}

// ---------------------------------------------------------------- Matrix

Matrix::Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw std::invalid_argument("Matrix: data length does not match rows*cols");
    }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
        if (row.size() != cols_) throw std::invalid_argument("Matrix: ragged initializer");
        data_.insert(data_.end(), row.begin(), row.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix& Matrix::operator*=(double alpha) {
    for (double& v : data_) v *= alpha;
    return *this;
}

Matrix& Matrix::operator+=(const Matrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw std::invalid_argument("Matrix::operator+=: dimension mismatch");
    }
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
    return *this;
}

double Matrix::max_abs_diff(const Matrix& other) const {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw std::invalid_argument("Matrix::max_abs_diff: dimension mismatch");
    }
    double worst = 0.0;
    for (std::size_t k = 0; k < data_.size(); ++k) {
        worst = std::max(worst, std::abs(data_[k] - other.data_[k]));
    }
    return worst;
}

double Matrix::frobenius_norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("Matrix product: inner dimension mismatch");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

Matrix transpose(const Matrix& m) {
    Matrix t(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = m(i, j);
    return t;
}

// ---------------------------------------------------------------- operators

DenseTensor tensor_product(const DenseTensor& a, const DenseTensor& b) {
    std::vector<std::size_t> dims = a.shape().dims();
    dims.insert(dims.end(), b.shape().dims().begin(), b.shape().dims().end());
    DenseTensor out{Shape(std::move(dims))};
    // Row-major layout makes the result an outer product of the flat arrays.
    auto dst = out.data();
    const auto lhs = a.data();
    const auto rhs = b.data();
    for (std::size_t i = 0; i < lhs.size(); ++i) {
        const double ai = lhs[i];
        double* row = dst.data() + i * rhs.size();
        for (std::size_t k = 0; k < rhs.size(); ++k) row[k] = ai * rhs[k];
    }
    return out;
}

DenseTensor tensor_product(std::span<const DenseTensor> factors) {
    if (factors.empty()) throw std::invalid_argument("tensor_product: no factors");
    DenseTensor acc = factors.front();
    for (std::size_t k = 1; k < factors.size(); ++k) acc = tensor_product(acc, factors[k]);
    return acc;
}

Matrix matricize(const DenseTensor& a) {
    const std::size_t order = a.order();
    if (order % 2 != 0) {
        throw std::invalid_argument("matricize: tensor order " + std::to_string(order) +
                                    " is odd; matricization is defined for even orders only");
    }
    const auto& dims = a.shape().dims();
    std::size_t rows = 1, cols = 1;
    for (std::size_t k = 0; k < order; k += 2) {
        rows *= dims[k];
        cols *= dims[k + 1];
    }
    Matrix m(rows, cols);
    std::vector<std::size_t> index(order, 0);
    const auto src = a.data();
    std::size_t flat = 0;
    do {
        std::size_t row = 0, col = 0;
        for (std::size_t k = 0; k < order; k += 2) {
            row = row * dims[k] + index[k];
            col = col * dims[k + 1] + index[k + 1];
        }
        m(row, col) = src[flat++];
    } while (increment(index, dims));
    return m;
}

Matrix kronecker(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const double aij = a(i, j);
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
        }
    return out;
}

DenseTensor squeeze(const DenseTensor& a, std::size_t q) {
    if (q == 0 || a.order() % q != 0) {
        throw std::invalid_argument("squeeze: group size " + std::to_string(q) +
                                    " does not divide tensor order " + std::to_string(a.order()));
    }
    const auto& dims = a.shape().dims();
    std::vector<std::size_t> merged;
    merged.reserve(dims.size() / q);
    for (std::size_t t = 0; t < dims.size(); t += q) {
        std::size_t d = 1;
        for (std::size_t i = 0; i < q; ++i) d *= dims[t + i];
        merged.push_back(d);
    }
    // Groups are consecutive and flattened last-mode-fastest, so row-major
    // storage is unchanged: squeezing is a reshape.
    return DenseTensor(Shape(std::move(merged)), std::vector<double>(a.data().begin(), a.data().end()));
}

bool is_symmetric(const DenseTensor& a, double abs_tol) {
    const auto& dims = a.shape().dims();
    if (std::adjacent_find(dims.begin(), dims.end(), std::not_equal_to<>()) != dims.end()) {
        throw std::invalid_argument("is_symmetric: all mode dimensions must be equal, got " +
                                    a.shape().to_string());
    }
    std::vector<std::size_t> index(dims.size(), 0);
    std::vector<std::size_t> canonical(dims.size());
    const auto src = a.data();
    std::size_t flat = 0;
    do {
        canonical = index;
        std::sort(canonical.begin(), canonical.end());
        if (std::abs(src[flat] - a.at(canonical)) > abs_tol) return false;
        ++flat;
    } while (increment(index, dims));
    return true;
}

}  // namespace cac
