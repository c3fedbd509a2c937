#include "seqcast/linalg.hpp"

#include "seqcast/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace seqcast {

namespace {

void require_finite(std::span<const double> data, const char* what) {
    for (const double x : data) {
        if (!std::isfinite(x)) {
            throw DimensionError(std::string(what) +
                                 ": non-finite entry on construction");
        }
    }
}

} // namespace

Vector::Vector(std::vector<double> data) : data_(std::move(data)) {
    if (data_.empty()) {
        throw DimensionError("Vector: length must be >= 1");
    }
    require_finite(data_, "Vector");
}

Vector Vector::zeros(std::size_t n) {
    return Vector(std::vector<double>(n, 0.0));
}

Vector Vector::from(std::span<const double> data) {
    return Vector(std::vector<double>(data.begin(), data.end()));
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (rows_ == 0 || cols_ == 0 || data_.size() != rows_ * cols_) {
        throw DimensionError("Matrix: rows*cols must match data length");
    }
    require_finite(data_, "Matrix");
}

Matrix Matrix::zeros(std::size_t rows, std::size_t cols) {
    return Matrix(rows, cols, std::vector<double>(rows * cols, 0.0));
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m = zeros(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Vector matvec(const Matrix& m, const Vector& v) {
    if (m.cols() != v.size()) {
        throw DimensionError("matvec: cols != vector length");
    }
    std::vector<double> out(m.rows(), 0.0);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < m.cols(); ++c) acc += m(r, c) * v[c];
        out[r] = acc;
    }
    return Vector(std::move(out));
}

Vector matvec_transposed(const Matrix& m, const Vector& v) {
    if (m.rows() != v.size()) {
        throw DimensionError("matvec_transposed: rows != vector length");
    }
    std::vector<double> out(m.cols(), 0.0);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const double vr = v[r];
        for (std::size_t c = 0; c < m.cols(); ++c) out[c] += m(r, c) * vr;
    }
    return Vector(std::move(out));
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw DimensionError("matmul: inner dimensions disagree");
    }
    Matrix out = Matrix::zeros(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) {
                out(i, j) += aik * b(k, j);
            }
        }
    }
    return out;
}

Matrix transpose(const Matrix& m) {
    Matrix out = Matrix::zeros(m.cols(), m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) out(c, r) = m(r, c);
    return out;
}

Matrix add(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError("matrix add: shape mismatch");
    }
    std::vector<double> out(a.span().begin(), a.span().end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.span()[i];
    return Matrix(a.rows(), a.cols(), std::move(out));
}

namespace {

Vector zip(const Vector& a, const Vector& b, double (*fn)(double, double),
           const char* what) {
    if (a.size() != b.size()) {
        throw DimensionError(std::string(what) + ": length mismatch");
    }
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = fn(a[i], b[i]);
    return Vector(std::move(out));
}

} // namespace

Vector add(const Vector& a, const Vector& b) {
    return zip(a, b, [](double x, double y) { return x + y; }, "vector add");
}

Vector sub(const Vector& a, const Vector& b) {
    return zip(a, b, [](double x, double y) { return x - y; }, "vector sub");
}

Vector scale(const Vector& v, double s) {
    std::vector<double> out(v.begin(), v.end());
    for (double& x : out) x *= s;
    return Vector(std::move(out));
}

double dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) {
        throw DimensionError("dot: length mismatch");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

Vector sigmoid(const Vector& v) {
    std::vector<double> out(v.begin(), v.end());
    for (double& x : out) x = 1.0 / (1.0 + std::exp(-x));
    return Vector(std::move(out));
}

Vector tanh_ew(const Vector& v) {
    std::vector<double> out(v.begin(), v.end());
    for (double& x : out) x = std::tanh(x);
    return Vector(std::move(out));
}

Vector hadamard(const Vector& u, const Vector& v) {
    return zip(u, v, [](double x, double y) { return x * y; }, "hadamard");
}

namespace {

// Lower-triangular Cholesky factor, stored dense. Throws on non-SPD input;
// pivots collapsing past 1e-12 of the largest pivot flag effective rank
// deficiency (the degeneracy detector for normal equations).
std::vector<double> cholesky_factor(const Matrix& a) {
    const std::size_t n = a.rows();
    if (a.cols() != n) {
        throw DimensionError("solve_spd: matrix must be square");
    }
    std::vector<double> l(n * n, 0.0);
    double max_pivot = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double diag = a(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= l[j * n + k] * l[j * n + k];
        max_pivot = std::max(max_pivot, diag);
        if (!(diag > 0.0) || !std::isfinite(diag) ||
            diag <= 1e-12 * max_pivot) {
            throw SingularSystemError(
                "solve_spd: matrix is not positive definite");
        }
        const double ljj = std::sqrt(diag);
        l[j * n + j] = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double acc = a(i, j);
            for (std::size_t k = 0; k < j; ++k)
                acc -= l[i * n + k] * l[j * n + k];
            l[i * n + j] = acc / ljj;
        }
    }
    return l;
}

void solve_with_factor(const std::vector<double>& l, std::size_t n,
                       std::span<const double> b, std::span<double> x) {
    // forward: L y = b
    for (std::size_t i = 0; i < n; ++i) {
        double acc = b[i];
        for (std::size_t k = 0; k < i; ++k) acc -= l[i * n + k] * x[k];
        x[i] = acc / l[i * n + i];
    }
    // backward: L^T x = y
    for (std::size_t ii = n; ii-- > 0;) {
        double acc = x[ii];
        for (std::size_t k = ii + 1; k < n; ++k) acc -= l[k * n + ii] * x[k];
        x[ii] = acc / l[ii * n + ii];
    }
}

} // namespace

Vector solve_spd(const Matrix& a, const Vector& b) {
    if (a.rows() != b.size()) {
        throw DimensionError("solve_spd: rhs length mismatch");
    }
    const std::vector<double> l = cholesky_factor(a);
    std::vector<double> x(b.begin(), b.end());
    solve_with_factor(l, a.rows(), b.span(), x);
    return Vector(std::move(x));
}

Matrix solve_spd_multi(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) {
        throw DimensionError("solve_spd_multi: rhs rows mismatch");
    }
    const std::size_t n = a.rows();
    const std::vector<double> l = cholesky_factor(a);
    Matrix x = Matrix::zeros(n, b.cols());
    std::vector<double> col(n), sol(n);
    for (std::size_t j = 0; j < b.cols(); ++j) {
        for (std::size_t i = 0; i < n; ++i) col[i] = b(i, j);
        solve_with_factor(l, n, col, sol);
        for (std::size_t i = 0; i < n; ++i) x(i, j) = sol[i];
    }
    return x;
}

} // namespace seqcast
