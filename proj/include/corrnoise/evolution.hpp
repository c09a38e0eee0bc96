#pragma once

// Exact propagation under the pure-dephasing Lindbladian
//
//   L[rho] = (gamma/2) sum_jl C_jl (Z_l rho Z_j - {Z_j Z_l, rho} / 2).
//
// In the computational basis every outer product |a><b| is an eigenoperator,
// so propagation is an elementwise product with exp(lambda_ab t).
//
// Conventions: basis index bit (n-1-j) is qubit j (qubit 0 most significant,
// matching Kronecker ordering); bit 0 means Z eigenvalue +1, bit 1 means -1.

#include "corrnoise/core.hpp"
#include "corrnoise/linalg.hpp"
#include "corrnoise/model.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

namespace corrnoise {

/// Computational-basis label alpha in {+1,-1}^N.
class SpinPattern {
  public:
    SpinPattern() = default;
    SpinPattern(int n_qubits, std::uint32_t index) : n_(n_qubits), index_(index) {
        if (n_qubits < 1 || n_qubits > 30 || index >= (std::uint64_t{1} << n_qubits)) {
            throw InvalidArgument("SpinPattern: index out of range");
        }
    }

    /// From explicit +-1 entries, qubit 0 first.
    static SpinPattern from_entries(const std::vector<int> &entries) {
        std::uint32_t index = 0;
        for (int e : entries) {
            if (e != 1 && e != -1) {
                throw InvalidArgument("SpinPattern: entries must be +1 or -1");
            }
            index = (index << 1U) | (e == -1 ? 1U : 0U);
        }
        return {static_cast<int>(entries.size()), index};
    }

    /// From a bitstring such as "0110" (0 -> +1, 1 -> -1).
    static SpinPattern from_bits(const std::string &bits) {
        std::vector<int> entries;
        for (char c : bits) {
            if (c != '0' && c != '1') {
                throw InvalidArgument("SpinPattern: bitstring must contain only 0 and 1");
            }
            entries.push_back(c == '0' ? 1 : -1);
        }
        return from_entries(entries);
    }

    [[nodiscard]] int n_qubits() const { return n_; }
    [[nodiscard]] std::uint32_t index() const { return index_; }
    [[nodiscard]] int entry(int j) const {
        return ((index_ >> static_cast<unsigned>(n_ - 1 - j)) & 1U) ? -1 : 1;
    }
    [[nodiscard]] std::string bits() const {
        std::string s;
        for (int j = 0; j < n_; ++j) {
            s.push_back(entry(j) == 1 ? '0' : '1');
        }
        return s;
    }

    [[nodiscard]] auto operator<=>(const SpinPattern &) const = default;

  private:
    int n_ = 0;
    std::uint32_t index_ = 0;
};

/// Ordered pair (alpha, beta), alpha < beta by basis index.
class CoherencePair {
  public:
    CoherencePair() = default;
    CoherencePair(SpinPattern a, SpinPattern b) {
        if (a.n_qubits() != b.n_qubits()) {
            throw InvalidArgument("CoherencePair: patterns have different qubit counts");
        }
        if (a == b) {
            throw InvalidArgument("CoherencePair: alpha and beta must differ");
        }
        alpha_ = std::min(a, b);
        beta_ = std::max(a, b);
    }

    /// (|0...0>, |1...1>)
    static CoherencePair ghz(int n) {
        return {SpinPattern(n, 0), SpinPattern(n, static_cast<std::uint32_t>(dimension_of(n) - 1))};
    }

    [[nodiscard]] const SpinPattern &alpha() const { return alpha_; }
    [[nodiscard]] const SpinPattern &beta() const { return beta_; }
    [[nodiscard]] int n_qubits() const { return alpha_.n_qubits(); }
    [[nodiscard]] std::string label() const { return alpha_.bits() + "|" + beta_.bits(); }

    [[nodiscard]] auto operator<=>(const CoherencePair &) const = default;

  private:
    SpinPattern alpha_;
    SpinPattern beta_;
};

/// 2^N x 2^N complex Hermitian, PSD, unit-trace matrix.
class DensityMatrix {
  public:
    struct Unchecked {};

    /// Validates Hermiticity (1e-10), unit trace (1e-10) and eigenvalues >= -1e-8.
    explicit DensityMatrix(Matrix m) : m_(std::move(m)) {
        const auto dim = m_.rows();
        if (dim < 2 || m_.cols() != dim || (dim & (dim - 1)) != 0) {
            throw InvalidArgument("DensityMatrix: dimension must be a power of two >= 2");
        }
        if (hermitian_deviation(m_) > 1e-10) {
            throw InvalidArgument("DensityMatrix: not Hermitian");
        }
        if (std::abs(m_.trace() - Complex(1.0, 0.0)) > 1e-10) {
            throw InvalidArgument("DensityMatrix: trace is not 1");
        }
        if (min_eigenvalue(m_) < -1e-8) {
            throw InvalidArgument("DensityMatrix: not positive semidefinite");
        }
    }
    DensityMatrix(Matrix m, Unchecked) : m_(std::move(m)) {}

    /// |psi><psi| after normalizing psi.
    static DensityMatrix pure(const Vector &psi) {
        const double norm = psi.norm();
        if (!(norm > 0.0)) {
            throw InvalidArgument("DensityMatrix::pure: zero vector");
        }
        const auto dim = psi.size();
        if (dim < 2 || (dim & (dim - 1)) != 0) {
            throw InvalidArgument("DensityMatrix::pure: dimension must be a power of two >= 2");
        }
        const Vector v = psi / norm;
        return {v * v.adjoint(), Unchecked{}};
    }

    [[nodiscard]] const Matrix &matrix() const { return m_; }
    [[nodiscard]] Eigen::Index dim() const { return m_.rows(); }
    [[nodiscard]] int n_qubits() const {
        int n = 0;
        while ((Eigen::Index{1} << n) < m_.rows()) {
            ++n;
        }
        return n;
    }

  private:
    Matrix m_;
};

/// Product of single-qubit states cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>.
struct ProductState {
    std::vector<double> thetas;
    std::vector<double> phis;

    static ProductState uniform(int n, double theta, double phi = 0.0) {
        return {std::vector<double>(static_cast<std::size_t>(n), theta),
                std::vector<double>(static_cast<std::size_t>(n), phi)};
    }

    /// |+>^{(x) n}
    static ProductState plus(int n) { return uniform(n, std::numbers::pi / 2.0); }

    [[nodiscard]] int n_qubits() const { return static_cast<int>(thetas.size()); }

    void validate() const {
        if (thetas.empty() || thetas.size() != phis.size()) {
            throw InvalidArgument("ProductState: thetas and phis must be non-empty and equal length");
        }
        for (double th : thetas) {
            if (!(th >= 0.0 && th <= std::numbers::pi)) {
                throw InvalidArgument("ProductState: theta outside [0, pi]");
            }
        }
        for (double ph : phis) {
            if (!(ph >= 0.0 && ph < 2.0 * std::numbers::pi)) {
                throw InvalidArgument("ProductState: phi outside [0, 2 pi)");
            }
        }
    }

    [[nodiscard]] Vector state_vector() const {
        validate();
        return state_vector_unchecked(thetas, phis);
    }

    /// Accepts any real angles; used by optimizers that search unconstrained.
    static Vector state_vector_unchecked(const std::vector<double> &th,
                                         const std::vector<double> &ph) {
        Vector psi = Vector::Ones(1);
        for (std::size_t j = 0; j < th.size(); ++j) {
            Vector q(2);
            q(0) = std::cos(th[j] / 2.0);
            const double phi = ph.empty() ? 0.0 : ph[j];
            q(1) = std::sin(th[j] / 2.0) * Complex(std::cos(phi), std::sin(phi));
            Vector next(psi.size() * 2);
            for (Eigen::Index a = 0; a < psi.size(); ++a) {
                next(2 * a) = psi(a) * q(0);
                next(2 * a + 1) = psi(a) * q(1);
            }
            psi = std::move(next);
        }
        return psi;
    }

    [[nodiscard]] DensityMatrix density() const { return DensityMatrix::pure(state_vector()); }
};

/// (|alpha> + |beta>) / sqrt(2)
[[nodiscard]] inline DensityMatrix pair_probe(const CoherencePair &pair) {
    Vector psi = Vector::Zero(static_cast<Eigen::Index>(dimension_of(pair.n_qubits())));
    psi(pair.alpha().index()) = 1.0;
    psi(pair.beta().index()) = 1.0;
    return DensityMatrix::pure(psi);
}

namespace detail {

inline void require_pair_matches(const DephasingFamily &family, const CoherencePair &pair,
                                 const char *who) {
    if (pair.n_qubits() != family.n_qubits()) {
        throw InvalidArgument(std::string(who) + ": pair has " + std::to_string(pair.n_qubits()) +
                              " qubits, family has " + std::to_string(family.n_qubits()));
    }
}

/// (gamma/4) d^dagger M d with d = alpha - beta.
inline double pair_quadratic_form(const Matrix &m, double gamma, const CoherencePair &pair) {
    const int n = pair.n_qubits();
    Vector d(n);
    for (int j = 0; j < n; ++j) {
        d(j) = static_cast<double>(pair.alpha().entry(j) - pair.beta().entry(j));
    }
    return 0.25 * gamma * (d.adjoint() * m * d)(0, 0).real();
}

} // namespace detail

/// gamma_ab(xi) = (gamma/4)(alpha - beta)^dagger C(xi) (alpha - beta) >= 0.
[[nodiscard]] inline double decay_rate(const DephasingFamily &family, double xi,
                                       const CoherencePair &pair) {
    detail::require_pair_matches(family, pair, "decay_rate");
    family.require_in_domain(xi, "decay_rate");
    return detail::pair_quadratic_form(family.coefficients(xi), family.gamma(), pair);
}

/// d gamma_ab / d xi = (gamma/4)(alpha - beta)^dagger dC (alpha - beta); xi-independent.
[[nodiscard]] inline double decay_rate_derivative(const DephasingFamily &family, double /*xi*/,
                                                  const CoherencePair &pair) {
    detail::require_pair_matches(family, pair, "decay_rate_derivative");
    return detail::pair_quadratic_form(family.delta_c(), family.gamma(), pair);
}

/// Table of Lindbladian eigenvalues lambda_ab for every basis pair at one xi,
/// together with d lambda_ab / d xi. Real part is -gamma_ab; a complex
/// coefficient matrix adds an imaginary (frequency) part. Build once per
/// (family, xi) and reuse; the object is immutable afterwards.
class CoherenceGenerator {
  public:
    CoherenceGenerator(const DephasingFamily &family, double xi)
        : n_(family.n_qubits()), gamma_(family.gamma()), xi_(xi) {
        family.require_in_domain(xi, "CoherenceGenerator");
        if (n_ > 14) {
            throw ResourceLimit("CoherenceGenerator: n_qubits = " + std::to_string(n_) +
                                " exceeds dense limit 14");
        }
        lambda_ = table(family.coefficients(xi));
        dlambda_ = table(family.delta_c());
    }

    [[nodiscard]] int n_qubits() const { return n_; }
    [[nodiscard]] double xi() const { return xi_; }
    [[nodiscard]] const Matrix &lambda() const { return lambda_; }
    [[nodiscard]] const Matrix &dlambda() const { return dlambda_; }

    [[nodiscard]] double rate(std::uint32_t a, std::uint32_t b) const { return -lambda_(a, b).real(); }

    /// Largest decay rate over all pairs.
    [[nodiscard]] double max_rate() const { return (-lambda_.real().array()).maxCoeff(); }

    /// Smallest decay rate above `floor` over all off-diagonal pairs, or 0
    /// when every coherence is conserved.
    [[nodiscard]] double min_nonzero_rate(double floor = 1e-14) const {
        double best = INFINITY;
        for (Eigen::Index a = 0; a < lambda_.rows(); ++a) {
            for (Eigen::Index b = a + 1; b < lambda_.cols(); ++b) {
                const double r = -lambda_(a, b).real();
                if (r > floor) {
                    best = std::min(best, r);
                }
            }
        }
        return std::isfinite(best) ? best : 0.0;
    }

  private:
    [[nodiscard]] Matrix table(const Matrix &c) const {
        const auto dim = static_cast<Eigen::Index>(dimension_of(n_));
        // Spin vectors as columns, C alpha and alpha^T C alpha per basis state.
        RealMatrix spins(n_, dim);
        for (Eigen::Index a = 0; a < dim; ++a) {
            const SpinPattern s(n_, static_cast<std::uint32_t>(a));
            for (int j = 0; j < n_; ++j) {
                spins(j, a) = s.entry(j);
            }
        }
        const Matrix c_spins = c * spins.cast<Complex>();
        RealVector self(dim);
        for (Eigen::Index a = 0; a < dim; ++a) {
            self(a) = (spins.col(a).cast<Complex>().transpose() * c_spins.col(a))(0, 0).real();
        }
        // cross(a, b) = beta^T C alpha
        const Matrix cross = spins.transpose().cast<Complex>() * c_spins;
        Matrix out(dim, dim);
        for (Eigen::Index b = 0; b < dim; ++b) {
            for (Eigen::Index a = 0; a < dim; ++a) {
                out(a, b) = 0.5 * gamma_ * (cross(b, a) - 0.5 * (self(a) + self(b)));
            }
        }
        return out;
    }

    int n_;
    double gamma_;
    double xi_;
    Matrix lambda_;
    Matrix dlambda_;
};

namespace detail {

inline void require_state_matches(const DensityMatrix &rho, int n, const char *who) {
    if (rho.dim() != static_cast<Eigen::Index>(dimension_of(n))) {
        throw InvalidArgument(std::string(who) + ": state dimension " + std::to_string(rho.dim()) +
                              " does not match " + std::to_string(n) + " qubits");
    }
}

} // namespace detail

[[nodiscard]] inline DensityMatrix evolve(const DensityMatrix &rho0, const CoherenceGenerator &gen,
                                          double t) {
    if (!(t >= 0.0)) {
        throw InvalidArgument("evolve: t must be >= 0");
    }
    detail::require_state_matches(rho0, gen.n_qubits(), "evolve");
    const Matrix &lam = gen.lambda();
    Matrix out = rho0.matrix();
    for (Eigen::Index b = 0; b < out.cols(); ++b) {
        for (Eigen::Index a = 0; a < out.rows(); ++a) {
            if (a != b) {
                out(a, b) *= std::exp(lam(a, b) * t);
            }
        }
    }
    return {std::move(out), DensityMatrix::Unchecked{}};
}

/// rho(t) with entries rho0[a,b] exp(lambda_ab t); populations are untouched.
[[nodiscard]] inline DensityMatrix evolve(const DensityMatrix &rho0, const DephasingFamily &family,
                                          double xi, double t) {
    return evolve(rho0, CoherenceGenerator(family, xi), t);
}

[[nodiscard]] inline Matrix drho_dxi(const DensityMatrix &rho0, const CoherenceGenerator &gen,
                                     double t) {
    if (!(t >= 0.0)) {
        throw InvalidArgument("drho_dxi: t must be >= 0");
    }
    detail::require_state_matches(rho0, gen.n_qubits(), "drho_dxi");
    const Matrix &lam = gen.lambda();
    const Matrix &dlam = gen.dlambda();
    const Matrix &r0 = rho0.matrix();
    Matrix out = Matrix::Zero(r0.rows(), r0.cols());
    for (Eigen::Index b = 0; b < out.cols(); ++b) {
        for (Eigen::Index a = 0; a < out.rows(); ++a) {
            if (a != b) {
                out(a, b) = t * dlam(a, b) * r0(a, b) * std::exp(lam(a, b) * t);
            }
        }
    }
    return out;
}

/// Exact xi-derivative of evolve(rho0, family, xi, t); traceless, zero diagonal.
[[nodiscard]] inline Matrix drho_dxi(const DensityMatrix &rho0, const DephasingFamily &family,
                                     double xi, double t) {
    return drho_dxi(rho0, CoherenceGenerator(family, xi), t);
}

struct PairRate {
    CoherencePair pair;
    double rate = 0.0;
};

inline constexpr int kMaxSpectrumQubits = 12;

/// All canonical pairs with their decay rates, ascending by rate, ties by pair order.
[[nodiscard]] inline std::vector<PairRate> coherence_spectrum(const DephasingFamily &family,
                                                              double xi) {
    const int n = family.n_qubits();
    if (n > kMaxSpectrumQubits) {
        throw ResourceLimit("coherence_spectrum: " + std::to_string(n) +
                            " qubits exceeds the pair-enumeration limit of " +
                            std::to_string(kMaxSpectrumQubits));
    }
    family.require_in_domain(xi, "coherence_spectrum");
    const Matrix c = family.coefficients(xi);
    const auto dim = static_cast<std::uint32_t>(dimension_of(n));
    std::vector<PairRate> out;
    out.reserve(static_cast<std::size_t>(dim) * (dim - 1) / 2);
    for (std::uint32_t a = 0; a < dim; ++a) {
        for (std::uint32_t b = a + 1; b < dim; ++b) {
            CoherencePair pair(SpinPattern(n, a), SpinPattern(n, b));
            const double r = detail::pair_quadratic_form(c, family.gamma(), pair);
            out.push_back({pair, r});
        }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const PairRate &x, const PairRate &y) { return x.rate < y.rate; });
    return out;
}

inline constexpr int kMaxSuperoperatorQubits = 3;

/// The 4^N x 4^N matrix of the Lindbladian acting on column-stacked operators,
/// assembled from Kronecker products of Pauli Z.
[[nodiscard]] inline Matrix superoperator_matrix(const DephasingFamily &family, double xi) {
    const int n = family.n_qubits();
    if (n > kMaxSuperoperatorQubits) {
        throw ResourceLimit("superoperator_matrix: " + std::to_string(n) +
                            " qubits exceeds the brute-force limit of " +
                            std::to_string(kMaxSuperoperatorQubits));
    }
    family.require_in_domain(xi, "superoperator_matrix");
    const auto dim = static_cast<Eigen::Index>(dimension_of(n));
    Matrix pauli_z(2, 2);
    pauli_z << 1.0, 0.0, 0.0, -1.0;
    std::vector<Matrix> z(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        Matrix op = Matrix::Identity(1, 1);
        for (int k = 0; k < n; ++k) {
            const Matrix factor = (k == j) ? pauli_z : Matrix::Identity(2, 2);
            op = Eigen::kroneckerProduct(op, factor).eval();
        }
        z[static_cast<std::size_t>(j)] = op;
    }
    const Matrix c = family.coefficients(xi);
    const Matrix id = Matrix::Identity(dim, dim);
    Matrix super = Matrix::Zero(dim * dim, dim * dim);
    // vec(A X B) = (B^T kron A) vec(X)
    for (int j = 0; j < n; ++j) {
        for (int l = 0; l < n; ++l) {
            const Matrix &zj = z[static_cast<std::size_t>(j)];
            const Matrix &zl = z[static_cast<std::size_t>(l)];
            const Matrix zz = zj * zl;
            Matrix term = Eigen::kroneckerProduct(zj.transpose(), zl).eval();
            term -= 0.5 * Eigen::kroneckerProduct(id, zz).eval();
            term -= 0.5 * Eigen::kroneckerProduct(zz.transpose(), id).eval();
            super += 0.5 * family.gamma() * c(j, l) * term;
        }
    }
    return super;
}

/// Eigenvalues of the dense superoperator (brute-force oracle, N <= 3).
[[nodiscard]] inline std::vector<Complex> superoperator_spectrum(const DephasingFamily &family,
                                                                 double xi) {
    const Matrix super = superoperator_matrix(family, xi);
    Eigen::ComplexEigenSolver<Matrix> solver(super, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw ConvergenceError("superoperator_spectrum: eigensolver failed");
    }
    std::vector<Complex> out(solver.eigenvalues().data(),
                             solver.eigenvalues().data() + solver.eigenvalues().size());
    std::sort(out.begin(), out.end(), [](Complex x, Complex y) {
        return std::pair(x.real(), x.imag()) < std::pair(y.real(), y.imag());
    });
    return out;
}

/// Largest distance in a nearest-neighbour matching between the superoperator
/// spectrum and the multiset {0 x 2^N} U {lambda_ab, conj(lambda_ab)} built
/// from the coherence spectrum.
[[nodiscard]] inline double spectrum_mismatch(const std::vector<Complex> &super,
                                              const DephasingFamily &family, double xi) {
    const int n = family.n_qubits();
    std::vector<Complex> expected(dimension_of(n), Complex{});
    const CoherenceGenerator gen(family, xi);
    for (const auto &pr : coherence_spectrum(family, xi)) {
        const Complex lam = gen.lambda()(pr.pair.alpha().index(), pr.pair.beta().index());
        // rate from the enumeration route, frequency from the generator table
        expected.emplace_back(-pr.rate, lam.imag());
        expected.emplace_back(-pr.rate, -lam.imag());
    }
    if (expected.size() != super.size()) {
        return INFINITY;
    }
    std::vector<bool> used(super.size(), false);
    double worst = 0.0;
    for (const Complex &e : expected) {
        std::size_t best = super.size();
        double best_d = INFINITY;
        for (std::size_t i = 0; i < super.size(); ++i) {
            if (!used[i] && std::abs(super[i] - e) < best_d) {
                best_d = std::abs(super[i] - e);
                best = i;
            }
        }
        used[best] = true;
        worst = std::max(worst, best_d);
    }
    return worst;
}

} // namespace corrnoise
