#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace mollify {

/// Dense row-major matrix of doubles. The batch dimension is always the
/// row dimension; a vector of n values is a 1 x n matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::span<const double> values() const { return data_; }

    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }
    std::string shape_str() const;

    Matrix transpose() const;
    Matrix hadamard(const Matrix& other) const;
    Matrix apply(const std::function<double(double)>& fn) const;

    Matrix& operator+=(const Matrix& other);
    Matrix& operator-=(const Matrix& other);
    Matrix& operator*=(double scalar);
    Matrix operator+(const Matrix& other) const;
    Matrix operator-(const Matrix& other) const;

    bool operator==(const Matrix& other) const = default;

    /// True when every entry is finite (no NaN or Inf).
    bool all_finite() const;
    /// Index of the first non-finite entry, or size() when all finite.
    std::size_t first_non_finite() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Standard matrix product. Throws std::invalid_argument naming both
/// shapes when a.cols != b.rows.
Matrix matmul(const Matrix& a, const Matrix& b);

/// a * b^T without materializing the transpose.
Matrix matmul_nt(const Matrix& a, const Matrix& b);

/// a^T * b without materializing the transpose.
Matrix matmul_tn(const Matrix& a, const Matrix& b);

/// Sum of each column; returns a 1 x cols matrix.
Matrix column_sums(const Matrix& m);

/// Broadcast-add a 1 x cols row vector to every row of m.
void add_row_vector(Matrix& m, const Matrix& row);

double max_abs_diff(const Matrix& a, const Matrix& b);

}  // namespace mollify
