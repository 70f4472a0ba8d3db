#pragma once
// Small dense and packed-symmetric matrix types, the entry sum Gamma(E), and
// the partition inequality Gamma(C)^2 <= Gamma(A)Gamma(B) that every positive
// semi-definite matrix satisfies for any contiguous block split.
//
// Indices are 0-based. SymMatrix stores only the lower triangle, so symmetry
// is structural rather than a runtime invariant.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace evb {

class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }

    std::span<const double> data() const { return a_; }
    std::span<const double> row(std::size_t i) const { return {a_.data() + i * cols_, cols_}; }

    bool square() const { return rows_ == cols_; }

    // Exact entrywise symmetry; no tolerance.
    bool symmetric() const {
        if (!square()) return false;
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = i + 1; j < cols_; ++j)
                if ((*this)(i, j) != (*this)(j, i)) return false;
        return true;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> a_;
};

inline Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul: dimension mismatch");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

inline std::vector<double> vecmat(std::span<const double> v, const Matrix& m) {
    if (v.size() != m.rows()) throw std::invalid_argument("vecmat: dimension mismatch");
    std::vector<double> out(m.cols(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const double vi = v[i];
        if (vi == 0.0) continue;
        for (std::size_t j = 0; j < m.cols(); ++j) out[j] += vi * m(i, j);
    }
    return out;
}

// Symmetric n x n matrix, packed lower triangle in row-major order.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(std::size_t n) : n_(n), a_(n * (n + 1) / 2, 0.0) {}

    std::size_t size() const { return n_; }

    double operator()(std::size_t i, std::size_t j) const {
        return i >= j ? a_[idx(i, j)] : a_[idx(j, i)];
    }
    double& at(std::size_t i, std::size_t j) {
        return i >= j ? a_[idx(i, j)] : a_[idx(j, i)];
    }

    std::span<const double> packed() const { return a_; }

    Matrix dense() const {
        Matrix m(n_, n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j <= i; ++j) m(i, j) = m(j, i) = a_[idx(i, j)];
        return m;
    }

    static SymMatrix from_dense(const Matrix& m) {
        if (!m.symmetric()) throw std::invalid_argument("SymMatrix: input is not symmetric");
        SymMatrix s(m.rows());
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j <= i; ++j) s.at(i, j) = m(i, j);
        return s;
    }

private:
    static std::size_t idx(std::size_t i, std::size_t j) { return i * (i + 1) / 2 + j; }

    std::size_t n_ = 0;
    std::vector<double> a_;
};

// Gamma(E): the sum of all entries. Empty matrices sum to zero.
inline double gamma_sum(const Matrix& e) {
    double s = 0.0;
    for (double v : e.data()) s += v;
    return s;
}

inline double gamma_sum(const SymMatrix& m) {
    double diag = 0.0, lower = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        diag += m(i, i);
        for (std::size_t j = 0; j < i; ++j) lower += m(i, j);
    }
    return diag + 2.0 * lower;
}

struct PartitionSides {
    double lhs = 0.0; // Gamma(C)^2 for the off-diagonal block C
    double rhs = 0.0; // Gamma(A) * Gamma(B) for the diagonal blocks
};

// Split E into [[A, C], [C^T, B]] with A the leading m x m block.
// For PSD input, lhs <= rhs up to rounding; callers assert the contract.
inline PartitionSides partition_inequality(const SymMatrix& e, std::size_t m) {
    const std::size_t n = e.size();
    if (m < 1 || m >= n) throw std::out_of_range("partition_inequality: split out of range");
    double ga = 0.0, gb = 0.0, gc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double v = e(i, j);
            if (i < m && j < m) ga += v;
            else if (i >= m && j >= m) gb += v;
            else if (i < m) gc += v; // upper-right block only
        }
    return {gc * gc, ga * gb};
}

inline PartitionSides partition_inequality(const Matrix& e, std::size_t m) {
    return partition_inequality(SymMatrix::from_dense(e), m);
}

} // namespace evb
