#pragma once
// Positive semi-definiteness check with a scaled tolerance. The spectral work
// is delegated to Eigen's self-adjoint solver; everything above it speaks the
// library's own matrix types.

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "evb/matrix.hpp"

namespace evb {

struct PsdVerdict {
    bool pass = false;
    double min_eigenvalue = 0.0;
};

namespace detail {

inline Eigen::MatrixXd to_eigen(const SymMatrix& m) {
    const auto n = static_cast<Eigen::Index>(m.size());
    Eigen::MatrixXd e(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j <= i; ++j)
            e(i, j) = e(j, i) = m(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    return e;
}

struct SymEigen {
    Eigen::VectorXd values;  // ascending
    Eigen::MatrixXd vectors; // columns
};

inline SymEigen sym_eigen(const SymMatrix& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(to_eigen(m));
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("sym_eigen: eigendecomposition failed");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

} // namespace detail

// Passes iff the smallest eigenvalue is >= -tol * max(1, max|entry|).
inline PsdVerdict check_psd(const SymMatrix& m, double tol = 1e-8) {
    if (m.size() == 0) return {true, 0.0};
    double max_abs = 0.0;
    for (double v : m.packed()) {
        if (!std::isfinite(v)) throw std::invalid_argument("check_psd: non-finite entry");
        max_abs = std::max(max_abs, std::abs(v));
    }
    const double lambda_min = detail::sym_eigen(m).values(0);
    return {lambda_min >= -tol * std::max(1.0, max_abs), lambda_min};
}

// Dense entry point; rejects non-square or non-symmetric input before the
// spectral test.
inline PsdVerdict check_psd(const Matrix& e, double tol = 1e-8) {
    if (!e.square()) throw std::invalid_argument("check_psd: matrix is not square");
    for (double v : e.data())
        if (!std::isfinite(v)) throw std::invalid_argument("check_psd: non-finite entry");
    if (!e.symmetric()) throw std::invalid_argument("check_psd: matrix is not symmetric");
    return check_psd(SymMatrix::from_dense(e), tol);
}

} // namespace evb
