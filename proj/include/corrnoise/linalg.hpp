#pragma once

#include "corrnoise/core.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

namespace corrnoise {

/// Eigenvalues ascending, eigenvectors as orthonormal columns.
struct EigenDecomposition {
    RealVector eigenvalues;
    Matrix eigenvectors;

    /// V diag(f(λ)) V†
    template <class F>
    [[nodiscard]] Matrix apply(F &&f) const {
        const Eigen::Index n = eigenvalues.size();
        RealVector mapped(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            mapped(i) = f(eigenvalues(i));
        }
        return eigenvectors * mapped.asDiagonal() * eigenvectors.adjoint();
    }
};

/// Largest |m(i,j) - conj(m(j,i))| over all entries.
[[nodiscard]] inline double hermitian_deviation(const Matrix &m) {
    if (m.rows() != m.cols()) {
        return INFINITY;
    }
    double worst = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = i; j < m.cols(); ++j) {
            worst = std::max(worst, std::abs(m(i, j) - std::conj(m(j, i))));
        }
    }
    return worst;
}

[[nodiscard]] inline bool is_real(const Matrix &m) {
    return (m.imag().array() == 0.0).all();
}

/// Dense Hermitian eigendecomposition. Real symmetric input takes the
/// cheaper real solver; the result is identical in form.
[[nodiscard]] inline EigenDecomposition hermitian_eig(const Matrix &m, double tol = 1e-10) {
    if (m.rows() != m.cols()) {
        throw InvalidArgument("hermitian_eig: matrix is not square");
    }
    const double dev = hermitian_deviation(m);
    if (dev > tol) {
        throw InvalidArgument("hermitian_eig: matrix is not Hermitian (deviation " +
                              std::to_string(dev) + ")");
    }
    if (is_real(m)) {
        const RealMatrix sym = 0.5 * (m.real() + m.real().transpose());
        Eigen::SelfAdjointEigenSolver<RealMatrix> solver(sym);
        if (solver.info() != Eigen::Success) {
            throw ConvergenceError("hermitian_eig: real solver did not converge");
        }
        return {solver.eigenvalues(), solver.eigenvectors().cast<Complex>()};
    }
    const Matrix herm = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(herm);
    if (solver.info() != Eigen::Success) {
        throw ConvergenceError("hermitian_eig: complex solver did not converge");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

[[nodiscard]] inline double min_eigenvalue(const Matrix &m) {
    return hermitian_eig(m).eigenvalues.minCoeff();
}

/// Principal square root of a PSD matrix; eigenvalues in [-floor, 0) are
/// clamped to zero, anything below -floor is rejected.
[[nodiscard]] inline Matrix psd_sqrt(const EigenDecomposition &eig, double floor = 1e-8) {
    if (eig.eigenvalues.size() > 0 && eig.eigenvalues.minCoeff() < -floor) {
        throw InvalidArgument("psd_sqrt: matrix has eigenvalue " +
                              std::to_string(eig.eigenvalues.minCoeff()) + " below -" +
                              std::to_string(floor));
    }
    return eig.apply([](double l) { return std::sqrt(std::max(l, 0.0)); });
}

} // namespace corrnoise
