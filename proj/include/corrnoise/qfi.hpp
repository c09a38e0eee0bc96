#pragma once

// Quantum Fisher information for the dephasing parameter xi: the SLD
// spectral formula on exactly propagated states, Uhlmann fidelity and Bures
// distance, the time-averaged QFI and its t -> 0 supremum, and closed forms
// for single-coherence probes.

#include "corrnoise/core.hpp"
#include "corrnoise/evolution.hpp"
#include "corrnoise/linalg.hpp"
#include "corrnoise/model.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace corrnoise {

enum class Regime { per_shot, time_averaged };

inline const char *to_string(Regime r) { return r == Regime::per_shot ? "shot" : "time"; }

/// Opaque description of a dense probe that is neither a product state nor a pair.
struct DenseProbe {
    std::uint64_t hash = 0;
};

using ProbeDescriptor = std::variant<std::monostate, ProductState, CoherencePair, DenseProbe>;

struct QfiResult {
    double value = 0.0;
    Regime regime = Regime::per_shot;
    /// Interrogation time; 0 marks the t -> 0+ limit.
    double time = 0.0;
    ProbeDescriptor probe;
};

/// FNV-1a over the raw bytes of the matrix entries.
[[nodiscard]] inline DenseProbe describe_dense(const DensityMatrix &rho) {
    std::uint64_t h = 1469598103934665603ULL;
    const auto *bytes = reinterpret_cast<const unsigned char *>(rho.matrix().data());
    const auto count = static_cast<std::size_t>(rho.matrix().size()) * sizeof(Complex);
    for (std::size_t i = 0; i < count; ++i) {
        h = (h ^ bytes[i]) * 1099511628211ULL;
    }
    return {h};
}

/// Pairs with lambda_j + lambda_k at or below this are dropped from the SLD sum.
inline constexpr double kSldCutoff = 1e-12;

/// F = 2 sum_jk |<j|drho|k>|^2 / (lambda_j + lambda_k) over the eigenbasis of rho.
[[nodiscard]] inline double sld_qfi(const Matrix &rho, const Matrix &drho) {
    const EigenDecomposition eig = hermitian_eig(rho);
    const auto n = eig.eigenvalues.size();
    double total = 0.0;
    if (is_real(eig.eigenvectors) && is_real(drho)) {
        const RealMatrix v = eig.eigenvectors.real();
        const RealMatrix d = v.transpose() * drho.real() * v;
        for (Eigen::Index k = 0; k < n; ++k) {
            for (Eigen::Index j = 0; j < n; ++j) {
                const double s = eig.eigenvalues(j) + eig.eigenvalues(k);
                if (s > kSldCutoff) {
                    total += d(j, k) * d(j, k) / s;
                }
            }
        }
    } else {
        const Matrix d = eig.eigenvectors.adjoint() * drho * eig.eigenvectors;
        for (Eigen::Index k = 0; k < n; ++k) {
            for (Eigen::Index j = 0; j < n; ++j) {
                const double s = eig.eigenvalues(j) + eig.eigenvalues(k);
                if (s > kSldCutoff) {
                    total += std::norm(d(j, k)) / s;
                }
            }
        }
    }
    return 2.0 * total;
}

/// Per-shot QFI at time t using a prebuilt generator (hot path for optimizers).
[[nodiscard]] inline double qfi_value(const DensityMatrix &rho0, const CoherenceGenerator &gen,
                                      double t) {
    if (!(t > 0.0)) {
        throw InvalidArgument("qfi: t must be > 0");
    }
    return sld_qfi(evolve(rho0, gen, t).matrix(), drho_dxi(rho0, gen, t));
}

[[nodiscard]] inline QfiResult qfi_exact(const DensityMatrix &rho0, const DephasingFamily &family,
                                         double xi, double t) {
    const CoherenceGenerator gen(family, xi);
    return {qfi_value(rho0, gen, t), Regime::per_shot, t, describe_dense(rho0)};
}

/// Squared Bures distance Tr rho + Tr sigma - 2 ||sqrt(rho) sqrt(sigma)||_1.
///
/// Computed as min_U ||sqrt(rho) - sqrt(sigma) U||_F^2 with the optimal
/// unitary from the polar factor of sqrt(rho) sqrt(sigma). Forming the
/// difference first avoids the cancellation in 1 - sqrt(F) for nearby states.
[[nodiscard]] inline double bures_distance_sq(const Matrix &rho, const Matrix &sigma) {
    if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
        throw InvalidArgument("fidelity: dimension mismatch");
    }
    const Matrix sqrt_rho = psd_sqrt(hermitian_eig(rho));
    const EigenDecomposition sigma_eig = hermitian_eig(sigma);
    if (sigma_eig.eigenvalues.size() > 0 && sigma_eig.eigenvalues.minCoeff() < -1e-8) {
        throw InvalidArgument("fidelity: sigma is not positive semidefinite");
    }
    const Matrix sqrt_sigma = psd_sqrt(sigma_eig);
    const Eigen::JacobiSVD<Matrix> svd(sqrt_rho * sqrt_sigma, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Matrix unitary = svd.matrixV() * svd.matrixU().adjoint();
    return std::max((sqrt_rho - sqrt_sigma * unitary).squaredNorm(), 0.0);
}

/// sqrt of the Uhlmann fidelity, Tr sqrt(sqrt(rho) sigma sqrt(rho)), clamped to [0, 1].
[[nodiscard]] inline double root_fidelity(const Matrix &rho, const Matrix &sigma) {
    const double traces = rho.trace().real() + sigma.trace().real();
    return std::clamp(0.5 * (traces - bures_distance_sq(rho, sigma)), 0.0, 1.0);
}

/// F(rho, sigma) = [Tr sqrt(sqrt(rho) sigma sqrt(rho))]^2
[[nodiscard]] inline double fidelity(const DensityMatrix &rho, const DensityMatrix &sigma) {
    const double r = root_fidelity(rho.matrix(), sigma.matrix());
    return r * r;
}

/// d_B^2 = 2 (1 - sqrt F)
[[nodiscard]] inline double bures_distance_sq(const DensityMatrix &rho, const DensityMatrix &sigma) {
    return bures_distance_sq(rho.matrix(), sigma.matrix());
}

/// 4 d_B^2(rho(xi), rho(xi + dxi)) / dxi^2, the fidelity-route QFI
/// per shot. dxi defaults to 1e-4 * xi when not positive.
[[nodiscard]] inline double qfi_fidelity_check(const DensityMatrix &rho0,
                                               const DephasingFamily &family, double xi, double t,
                                               double dxi = 0.0) {
    if (!(t > 0.0)) {
        throw InvalidArgument("qfi_fidelity_check: t must be > 0");
    }
    if (!(dxi > 0.0)) {
        dxi = 1e-4 * xi;
    }
    family.require_in_domain(xi, "qfi_fidelity_check");
    family.require_in_domain(xi + dxi, "qfi_fidelity_check (xi + dxi)");
    const DensityMatrix a = evolve(rho0, family, xi, t);
    const DensityMatrix b = evolve(rho0, family, xi + dxi, t);
    return 4.0 * bures_distance_sq(a, b) / (dxi * dxi);
}

/// QFI per unit interrogation time, qfi_exact / t.
[[nodiscard]] inline QfiResult time_averaged_qfi(const DensityMatrix &rho0,
                                                 const DephasingFamily &family, double xi,
                                                 double t) {
    if (!(t > 0.0)) {
        throw InvalidArgument("time_averaged_qfi: t must be > 0");
    }
    QfiResult r = qfi_exact(rho0, family, xi, t);
    r.value /= t;
    r.regime = Regime::time_averaged;
    return r;
}

struct LimitOptions {
    /// Extrapolation nodes t_k = t0 2^-k, k = 0..levels-1.
    int levels = 7;
    /// t0 = start_scale / (largest decay rate).
    double start_scale = 0.01;
    double rel_tol = 1e-6;
};

/// Richardson extrapolation of QFI(t)/t to t -> 0+ on a halving grid. For a
/// pure probe the supremum over t sits at the origin. A full-rank probe has
/// QFI = O(t^2); an extrapolant below rel_tol times the largest sampled
/// QFI(t)/t is reported as 0.
[[nodiscard]] inline double time_averaged_limit_value(const DensityMatrix &rho0,
                                                      const CoherenceGenerator &gen,
                                                      double gamma_scale,
                                                      const LimitOptions &opt = {}) {
    double max_rate = gen.max_rate();
    if (!(max_rate > 0.0)) {
        max_rate = gamma_scale;
    }
    const double t0 = opt.start_scale / max_rate;
    std::vector<std::vector<double>> table;
    std::vector<double> diagonal;
    double scale = 0.0;
    for (int k = 0; k < opt.levels; ++k) {
        const double t = t0 * std::ldexp(1.0, -k);
        std::vector<double> row{qfi_value(rho0, gen, t) / t};
        for (int m = 1; m <= k; ++m) {
            const double p = std::ldexp(1.0, m);
            const double prev = table[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(m - 1)];
            row.push_back((p * row.back() - prev) / (p - 1.0));
        }
        diagonal.push_back(row.back());
        table.push_back(std::move(row));
        scale = std::max(scale, std::abs(table.back().front()));
        if (k >= 2) {
            const double cur = diagonal[static_cast<std::size_t>(k)];
            const double diff = std::abs(cur - diagonal[static_cast<std::size_t>(k - 1)]);
            if (diff <= opt.rel_tol * std::abs(cur) || (cur == 0.0 && diff == 0.0)) {
                return std::max(cur, 0.0);
            }
            if (std::abs(cur) <= opt.rel_tol * scale && diff <= opt.rel_tol * scale) {
                return 0.0;
            }
        }
    }
    std::ostringstream os;
    os.precision(17);
    os << "time_averaged_qfi_limit: Richardson extrapolation did not converge; extrapolants:";
    for (double d : diagonal) {
        os << ' ' << d;
    }
    throw ConvergenceError(os.str());
}

[[nodiscard]] inline QfiResult time_averaged_qfi_limit(const DensityMatrix &rho0,
                                                       const DephasingFamily &family, double xi,
                                                       const LimitOptions &opt = {}) {
    const CoherenceGenerator gen(family, xi);
    return {time_averaged_limit_value(rho0, gen, family.gamma(), opt), Regime::time_averaged, 0.0,
            describe_dense(rho0)};
}

/// Closed-form t -> 0+ time-averaged QFI of a pure probe |psi>.
///
/// To first order in t the state leaves |psi> only through the jump term,
/// whose projection on the orthogonal complement is K = (gamma/2) W C^T W^dagger
/// with W = (1 - |psi><psi|) [Z_1 psi, ..., Z_N psi]. The limit equals the SLD
/// QFI of K, which reduces to the N x N family G^1/2 C^T G^1/2 with Gram
/// matrix G = W^dagger W. Valid when C(xi) has full rank; cross-checked
/// against the Richardson route in the test suite.
[[nodiscard]] inline double pure_state_rate_limit(const Vector &psi_in,
                                                  const DephasingFamily &family, double xi) {
    const int n = family.n_qubits();
    if (psi_in.size() != static_cast<Eigen::Index>(dimension_of(n))) {
        throw InvalidArgument("pure_state_rate_limit: state dimension does not match family");
    }
    family.require_in_domain(xi, "pure_state_rate_limit");
    const Vector psi = psi_in / psi_in.norm();
    Matrix w(psi.size(), n);
    for (int l = 0; l < n; ++l) {
        for (Eigen::Index a = 0; a < psi.size(); ++a) {
            const SpinPattern s(n, static_cast<std::uint32_t>(a));
            w(a, l) = static_cast<double>(s.entry(l)) * psi(a);
        }
    }
    const Matrix overlap = psi.adjoint() * w;
    w -= psi * overlap;
    Matrix gram = w.adjoint() * w;
    gram = 0.5 * (gram + gram.adjoint()).eval();
    const Matrix root = psd_sqrt(hermitian_eig(gram), 1e-10);
    const Matrix k = root * family.coefficients(xi).transpose() * root;
    const Matrix dk = root * family.delta_c().transpose() * root;
    return 0.5 * family.gamma() * sld_qfi(0.5 * (k + k.adjoint()), 0.5 * (dk + dk.adjoint()));
}

/// Root of 1 - exp(-2x) = x on (0.5, 1) by bisection: the value of
/// Gamma * t that maximizes the per-shot QFI of a decaying coherence.
[[nodiscard]] inline double shot_optimum_x() {
    static const double root = [] {
        double lo = 0.5;
        double hi = 1.0;
        auto f = [](double x) { return -std::expm1(-2.0 * x) - x; };
        for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
            const double mid = 0.5 * (lo + hi);
            (f(lo) * f(mid) <= 0.0 ? hi : lo) = mid;
        }
        return 0.5 * (lo + hi);
    }();
    return root;
}

/// x* exp(-2 x*): max_t of t^2 G'^2 e^{-2Gt} / (1 - e^{-2Gt}) in units of (G'/G)^2.
[[nodiscard]] inline double shot_optimum_value() {
    const double x = shot_optimum_x();
    return x * std::exp(-2.0 * x);
}

/// d omega_ab / d xi = (gamma/2) Im(beta^T dC alpha); zero for real dC.
[[nodiscard]] inline double pair_frequency_derivative(const DephasingFamily &family,
                                                      const CoherencePair &pair) {
    const int n = pair.n_qubits();
    Complex cross{};
    for (int j = 0; j < n; ++j) {
        for (int l = 0; l < n; ++l) {
            cross += family.delta_c()(j, l) *
                     static_cast<double>(pair.beta().entry(j) * pair.alpha().entry(l));
        }
    }
    return 0.5 * family.gamma() * cross.imag();
}

/// (Gamma/2)(Gamma'/Gamma)^2, the t -> 0+ time-averaged QFI of (|a>+|b>)/sqrt(2).
/// Infinite when the pair is dark (Gamma = 0) but still xi-dependent.
[[nodiscard]] inline QfiResult coherence_pair_qfi_timeavg(const DephasingFamily &family, double xi,
                                                          const CoherencePair &pair) {
    const double g = decay_rate(family, xi, pair);
    const double dg = decay_rate_derivative(family, xi, pair);
    double value = 0.0;
    if (dg != 0.0) {
        value = g > 0.0 ? 0.5 * dg * dg / g : INFINITY;
    }
    return {value, Regime::time_averaged, 0.0, pair};
}

/// Per-shot QFI of (|a>+|b>)/sqrt(2) at time t:
///   t^2 G'^2 e^{-2Gt} / (1 - e^{-2Gt})  +  t^2 w'^2 e^{-2Gt},
/// the second term being the phase contribution, nonzero only for complex C.
[[nodiscard]] inline QfiResult coherence_pair_qfi_shot(const DephasingFamily &family, double xi,
                                                       const CoherencePair &pair, double t) {
    if (!(t > 0.0)) {
        throw InvalidArgument("coherence_pair_qfi_shot: t must be > 0");
    }
    const double g = decay_rate(family, xi, pair);
    const double dg = decay_rate_derivative(family, xi, pair);
    const double dw = pair_frequency_derivative(family, pair);
    const double decay2 = std::exp(-2.0 * g * t);
    double value = 0.0;
    if (dg != 0.0) {
        value += g > 0.0 ? t * t * dg * dg * decay2 / -std::expm1(-2.0 * g * t) : INFINITY;
    }
    value += t * t * dw * dw * decay2;
    return {value, Regime::per_shot, t, pair};
}

} // namespace corrnoise
