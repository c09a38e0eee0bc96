#pragma once

// Reproducible random probes for property checks, drawn from CounterRng.

#include "corrnoise/core.hpp"
#include "corrnoise/evolution.hpp"
#include "corrnoise/rng.hpp"

#include <cmath>
#include <numbers>

namespace corrnoise {

/// Standard normal by Box-Muller; consumes two uniforms.
[[nodiscard]] inline double normal_sample(CounterRng &rng) {
    const double u1 = 1.0 - rng.next_double();
    const double u2 = rng.next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Haar-random pure state on n qubits.
[[nodiscard]] inline Vector random_pure_vector(int n, CounterRng &rng) {
    Vector psi(static_cast<Eigen::Index>(dimension_of(n)));
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
        const double re = normal_sample(rng);
        const double im = normal_sample(rng);
        psi(i) = Complex(re, im);
    }
    return psi / psi.norm();
}

[[nodiscard]] inline DensityMatrix random_pure_state(int n, CounterRng &rng) {
    return DensityMatrix::pure(random_pure_vector(n, rng));
}

/// Full-rank Hilbert-Schmidt random mixed state G G^dagger / Tr.
[[nodiscard]] inline DensityMatrix random_mixed_state(int n, CounterRng &rng) {
    const auto dim = static_cast<Eigen::Index>(dimension_of(n));
    Matrix g(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) {
            const double re = normal_sample(rng);
            const double im = normal_sample(rng);
            g(i, j) = Complex(re, im);
        }
    }
    Matrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return DensityMatrix(rho);
}

/// Log-uniform sample in [lo, hi].
[[nodiscard]] inline double log_uniform(CounterRng &rng, double lo, double hi) {
    return lo * std::pow(hi / lo, rng.next_double());
}

} // namespace corrnoise
