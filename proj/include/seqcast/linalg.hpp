#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace seqcast {

/**
 * Dense column of doubles. Construction rejects empty or non-finite data;
 * downstream code may therefore assume finite entries.
 */
class Vector {
public:
    explicit Vector(std::vector<double> data);
    static Vector zeros(std::size_t n);
    static Vector from(std::span<const double> data);

    std::size_t size() const { return data_.size(); }
    double operator[](std::size_t i) const { return data_[i]; }
    double& operator[](std::size_t i) { return data_[i]; }

    std::span<const double> span() const { return data_; }
    const std::vector<double>& values() const { return data_; }

    auto begin() const { return data_.begin(); }
    auto end() const { return data_.end(); }

private:
    std::vector<double> data_;
};

/// Dense row-major matrix; construction rejects non-finite data.
class Matrix {
public:
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
    static Matrix zeros(std::size_t rows, std::size_t cols);
    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double operator()(std::size_t r, std::size_t c) const {
        return data_[r * cols_ + c];
    }
    double& operator()(std::size_t r, std::size_t c) {
        return data_[r * cols_ + c];
    }

    std::span<const double> span() const { return data_; }
    const std::vector<double>& values() const { return data_; }

private:
    std::size_t rows_, cols_;
    std::vector<double> data_;
};

// --- products and sums ---
Vector matvec(const Matrix& m, const Vector& v);
/// y = m^T v without forming the transpose.
Vector matvec_transposed(const Matrix& m, const Vector& v);
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& m);
Matrix add(const Matrix& a, const Matrix& b);
Vector add(const Vector& a, const Vector& b);
Vector sub(const Vector& a, const Vector& b);
Vector scale(const Vector& v, double s);
double dot(const Vector& a, const Vector& b);

// --- elementwise nonlinearities ---
Vector sigmoid(const Vector& v);
Vector tanh_ew(const Vector& v);
Vector hadamard(const Vector& u, const Vector& v);

/**
 * Solve a·x = b for symmetric positive definite a via Cholesky.
 * Throws SingularSystemError when the factorization breaks down, which
 * doubles as the degeneracy detector for normal equations and innovation
 * covariances.
 */
Vector solve_spd(const Matrix& a, const Vector& b);
/// Column-wise SPD solve: returns x with a·x = b (b and x are n×k).
Matrix solve_spd_multi(const Matrix& a, const Matrix& b);

} // namespace seqcast
