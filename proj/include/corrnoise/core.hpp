#pragma once

// Shared vocabulary for the corrnoise library: matrix aliases, the closed
// interval used for parameter domains, and the exception hierarchy.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace corrnoise {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Absolute per-entry tolerance for Hermiticity of coefficient matrices.
inline constexpr double kHermitianTol = 1e-12;
/// Eigenvalue floor for positive semidefiniteness of coefficient matrices.
inline constexpr double kPsdTol = 1e-10;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument does not hold.
class InvalidArgument : public Error {
  public:
    using Error::Error;
};

/// Requested problem size exceeds a fixed enumeration guard.
class ResourceLimit : public Error {
  public:
    using Error::Error;
};

/// An iterative procedure failed to meet its stopping criterion.
class ConvergenceError : public Error {
  public:
    using Error::Error;
};

/// Reading or writing a file failed.
class IoError : public Error {
  public:
    using Error::Error;
};

/// Closed real interval [lo, hi].
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    [[nodiscard]] constexpr double midpoint() const { return 0.5 * (lo + hi); }
    [[nodiscard]] constexpr bool contains(double x) const { return x >= lo && x <= hi; }
    [[nodiscard]] constexpr bool degenerate() const { return lo == hi; }
    [[nodiscard]] constexpr bool operator==(const Interval &) const = default;
};

/// 2^n for small n.
[[nodiscard]] constexpr std::size_t dimension_of(int n_qubits) {
    return std::size_t{1} << static_cast<unsigned>(n_qubits);
}

} // namespace corrnoise
