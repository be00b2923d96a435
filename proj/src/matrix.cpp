#include "mollify/matrix.hpp"

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>

namespace mollify {

namespace {

using EigenRowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const EigenRowMajor>;
using MutMap = Eigen::Map<EigenRowMajor>;

ConstMap map_of(const Matrix& m) {
    return ConstMap(m.data(), static_cast<Eigen::Index>(m.rows()),
                    static_cast<Eigen::Index>(m.cols()));
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw std::invalid_argument("Matrix: data length " +
                                    std::to_string(data_.size()) +
                                    " does not match shape " + shape_str());
    }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
        if (row.size() != cols_) {
            throw std::invalid_argument("Matrix: ragged initializer list");
        }
        data_.insert(data_.end(), row.begin(), row.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

std::string Matrix::shape_str() const {
    return "(" + std::to_string(rows_) + " x " + std::to_string(cols_) + ")";
}

Matrix Matrix::transpose() const {
    Matrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) out.at(c, r) = at(r, c);
    return out;
}

Matrix Matrix::hadamard(const Matrix& other) const {
    if (!same_shape(other)) {
        throw std::invalid_argument("hadamard: shape mismatch " + shape_str() +
                                    " vs " + other.shape_str());
    }
    Matrix out = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) out[i] *= other[i];
    return out;
}

Matrix Matrix::apply(const std::function<double(double)>& fn) const {
    Matrix out = *this;
    for (auto& v : out.data_) v = fn(v);
    return out;
}

Matrix& Matrix::operator+=(const Matrix& other) {
    if (!same_shape(other)) {
        throw std::invalid_argument("operator+=: shape mismatch " + shape_str() +
                                    " vs " + other.shape_str());
    }
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other[i];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
    if (!same_shape(other)) {
        throw std::invalid_argument("operator-=: shape mismatch " + shape_str() +
                                    " vs " + other.shape_str());
    }
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other[i];
    return *this;
}

Matrix& Matrix::operator*=(double scalar) {
    for (auto& v : data_) v *= scalar;
    return *this;
}

Matrix Matrix::operator+(const Matrix& other) const {
    Matrix out = *this;
    out += other;
    return out;
}

Matrix Matrix::operator-(const Matrix& other) const {
    Matrix out = *this;
    out -= other;
    return out;
}

bool Matrix::all_finite() const { return first_non_finite() == data_.size(); }

std::size_t Matrix::first_non_finite() const {
    for (std::size_t i = 0; i < data_.size(); ++i) {
        if (!std::isfinite(data_[i])) return i;
    }
    return data_.size();
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw std::invalid_argument("matmul: inner dimensions disagree, " +
                                    a.shape_str() + " x " + b.shape_str());
    }
    Matrix out(a.rows(), b.cols());
    MutMap(out.data(), static_cast<Eigen::Index>(out.rows()),
           static_cast<Eigen::Index>(out.cols()))
        .noalias() = map_of(a) * map_of(b);
    return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) {
        throw std::invalid_argument("matmul_nt: inner dimensions disagree, " +
                                    a.shape_str() + " x " + b.shape_str() + "^T");
    }
    Matrix out(a.rows(), b.rows());
    MutMap(out.data(), static_cast<Eigen::Index>(out.rows()),
           static_cast<Eigen::Index>(out.cols()))
        .noalias() = map_of(a) * map_of(b).transpose();
    return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) {
        throw std::invalid_argument("matmul_tn: inner dimensions disagree, " +
                                    a.shape_str() + "^T x " + b.shape_str());
    }
    Matrix out(a.cols(), b.cols());
    MutMap(out.data(), static_cast<Eigen::Index>(out.rows()),
           static_cast<Eigen::Index>(out.cols()))
        .noalias() = map_of(a).transpose() * map_of(b);
    return out;
}

Matrix column_sums(const Matrix& m) {
    Matrix out(1, m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) out[c] += m.at(r, c);
    return out;
}

void add_row_vector(Matrix& m, const Matrix& row) {
    if (row.rows() != 1 || row.cols() != m.cols()) {
        throw std::invalid_argument("add_row_vector: shape mismatch " +
                                    m.shape_str() + " vs " + row.shape_str());
    }
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) m.at(r, c) += row[c];
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument("max_abs_diff: shape mismatch " +
                                    a.shape_str() + " vs " + b.shape_str());
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a[i] - b[i]));
    }
    return worst;
}

}  // namespace mollify
