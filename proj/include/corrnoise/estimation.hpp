#pragma once

// Shot-noise accounting, the dynamical-range promise check, and a simulated
// parity experiment with a closed-form maximum-likelihood estimator of xi.

#include "corrnoise/core.hpp"
#include "corrnoise/evolution.hpp"
#include "corrnoise/model.hpp"
#include "corrnoise/optimize.hpp"
#include "corrnoise/parallel.hpp"
#include "corrnoise/qfi.hpp"
#include "corrnoise/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace corrnoise {

struct ExperimentRecord {
    CoherencePair pair;
    double xi_true = 0.0;
    double t = 0.0;
    std::int64_t shots = 0;
    std::int64_t plus_count = 0;
    std::uint64_t seed = 0;
};

struct EstimateReport {
    /// Empty when the coherence has decayed below the parity signal floor.
    std::optional<double> xi_hat;
    bool clamped = false;
    /// [M F_Q]^{-1/2} at the record's t and the true xi.
    double std_error_crb = 0.0;
    /// Filled in by replication studies.
    double empirical_std = 0.0;
};

/// Delta xi = [M max_t F_shot]^{-1/2} for the probe (|a>+|b>)/sqrt(2).
[[nodiscard]] inline double shot_uncertainty(const DephasingFamily &family, double xi,
                                             const CoherencePair &pair, std::int64_t shots) {
    if (shots <= 0) {
        throw InvalidArgument("shot_uncertainty: shots must be positive");
    }
    const TimeMaximum best = pair_shot_maximum(family, xi, pair);
    if (!(best.value > 0.0)) {
        throw InvalidArgument("shot_uncertainty: probe carries no information about xi");
    }
    return 1.0 / std::sqrt(static_cast<double>(shots) * best.value);
}

struct PromiseReport {
    bool holds = false;
    /// |<GHZ coherence>| = e^{-Gamma(xi_hat) t} at t = 1 / (N xi_hat gamma).
    double predicted_coherence = 0.0;
    double probe_time = 0.0;
    double xi_hat = 0.0;
    double threshold = 0.0;
};

/// Checks xi_hat against xi_c = N / 2^(N-1) and predicts the GHZ coherence
/// that a verification measurement would see at t = 1 / (N xi_hat gamma).
[[nodiscard]] inline PromiseReport promise_check(const DephasingFamily &family, double xi_hat) {
    if (!(xi_hat > 0.0)) {
        throw InvalidArgument("promise_check: xi_hat must be positive");
    }
    const int n = family.n_qubits();
    PromiseReport r;
    r.xi_hat = xi_hat;
    r.threshold = dynamical_range_threshold(n);
    r.probe_time = 1.0 / (n * xi_hat * family.gamma());
    r.predicted_coherence = std::exp(-decay_rate(family, xi_hat, CoherencePair::ghz(n)) * r.probe_time);
    r.holds = xi_hat < r.threshold;
    return r;
}

namespace detail {

/// (gamma/2) Im(beta^T C alpha): the coherence's oscillation frequency.
inline double pair_frequency(const Matrix &c, double gamma, const CoherencePair &pair) {
    Complex cross{};
    for (int j = 0; j < pair.n_qubits(); ++j) {
        for (int l = 0; l < pair.n_qubits(); ++l) {
            cross += c(j, l) * static_cast<double>(pair.beta().entry(j) * pair.alpha().entry(l));
        }
    }
    return 0.5 * gamma * cross.imag();
}

} // namespace detail

/// Probability of the + outcome of the (|a> +- |b>)/sqrt(2) measurement on
/// the evolved probe: (1 + Re e^{lambda t}) / 2.
[[nodiscard]] inline double parity_plus_probability(const DephasingFamily &family, double xi,
                                                    const CoherencePair &pair, double t) {
    const double g = decay_rate(family, xi, pair);
    const double w = detail::pair_frequency(family.coefficients(xi), family.gamma(), pair);
    return 0.5 * (1.0 + std::exp(-g * t) * std::cos(w * t));
}

/// plus_count ~ Binomial(M, p+) as M Bernoulli trials u_k < p+ with u_k the
/// k-th uniform of CounterRng(seed).
[[nodiscard]] inline ExperimentRecord simulate_parity_counts(const DephasingFamily &family,
                                                             double xi_true,
                                                             const CoherencePair &pair, double t,
                                                             std::int64_t shots,
                                                             std::uint64_t seed) {
    if (!(t > 0.0)) {
        throw InvalidArgument("simulate_parity_counts: t must be positive");
    }
    if (shots <= 0) {
        throw InvalidArgument("simulate_parity_counts: shots must be positive");
    }
    const double p = parity_plus_probability(family, xi_true, pair, t);
    CounterRng rng(seed);
    std::int64_t plus = 0;
    for (std::int64_t k = 0; k < shots; ++k) {
        plus += rng.next_double() < p ? 1 : 0;
    }
    return {pair, xi_true, t, shots, plus, seed};
}

/// Inverts Gamma(xi) t = -ln(2 p+ - 1) using linearity of Gamma in xi, then
/// clamps to the family domain. p+ <= 1/2 leaves xi_hat empty.
[[nodiscard]] inline EstimateReport estimate_xi(const ExperimentRecord &record,
                                                const DephasingFamily &family) {
    if (record.shots <= 0 || record.plus_count < 0 || record.plus_count > record.shots ||
        !(record.t > 0.0)) {
        throw InvalidArgument("estimate_xi: malformed experiment record");
    }
    const CoherencePair &pair = record.pair;
    detail::require_pair_matches(family, pair, "estimate_xi");
    if (detail::pair_frequency(family.c0(), family.gamma(), pair) != 0.0 ||
        pair_frequency_derivative(family, pair) != 0.0) {
        throw InvalidArgument("estimate_xi: parity inversion needs a non-oscillating coherence");
    }
    const double g0 = detail::pair_quadratic_form(family.c0(), family.gamma(), pair);
    const double dg = detail::pair_quadratic_form(family.delta_c(), family.gamma(), pair);
    if (dg == 0.0) {
        throw InvalidArgument("estimate_xi: decay rate does not depend on xi");
    }

    EstimateReport out;
    const CoherenceGenerator gen(family, record.xi_true);
    const double f = qfi_value(pair_probe(pair), gen, record.t);
    out.std_error_crb = f > 0.0 ? 1.0 / std::sqrt(static_cast<double>(record.shots) * f) : INFINITY;

    const double p_hat = static_cast<double>(record.plus_count) / static_cast<double>(record.shots);
    if (!(p_hat > 0.5)) {
        return out;
    }
    const double xi = (-std::log(2.0 * p_hat - 1.0) / record.t - g0) / dg;
    const Interval dom = family.xi_domain();
    const double clamped = std::clamp(xi, dom.lo, dom.hi);
    out.clamped = clamped != xi;
    out.xi_hat = clamped;
    return out;
}

struct ReplicationStudy {
    double t = 0.0;
    std::int64_t shots = 0;
    int seeds = 0;
    int failures = 0;
    int clamped = 0;
    double mean = 0.0;
    double empirical_std = 0.0;
    double shot_uncertainty = 0.0;
    std::vector<EstimateReport> estimates;
};

/// Runs `seeds` independent experiments at the optimal per-shot time of the
/// pair, replicate i using seed base ^ i, and summarizes the estimates.
[[nodiscard]] inline ReplicationStudy replicate_estimation(const DephasingFamily &family,
                                                           double xi_true,
                                                           const CoherencePair &pair,
                                                           std::int64_t shots, int seeds,
                                                           std::uint64_t base_seed,
                                                           unsigned threads = 1) {
    if (seeds <= 1) {
        throw InvalidArgument("replicate_estimation: need at least two seeds");
    }
    ReplicationStudy study;
    study.shots = shots;
    study.seeds = seeds;
    study.shot_uncertainty = shot_uncertainty(family, xi_true, pair, shots);
    study.t = pair_shot_maximum(family, xi_true, pair).time;
    study.estimates.resize(static_cast<std::size_t>(seeds));
    parallel_for(static_cast<std::size_t>(seeds), threads, [&](std::size_t i) {
        const auto rec = simulate_parity_counts(family, xi_true, pair, study.t, shots,
                                                base_seed ^ static_cast<std::uint64_t>(i));
        study.estimates[i] = estimate_xi(rec, family);
    });
    double sum = 0.0;
    int ok = 0;
    for (const auto &e : study.estimates) {
        if (e.xi_hat) {
            sum += *e.xi_hat;
            ++ok;
        } else {
            ++study.failures;
        }
        study.clamped += e.clamped ? 1 : 0;
    }
    if (ok < 2) {
        throw ConvergenceError("replicate_estimation: fewer than two successful estimates");
    }
    study.mean = sum / ok;
    double ss = 0.0;
    for (const auto &e : study.estimates) {
        if (e.xi_hat) {
            ss += (*e.xi_hat - study.mean) * (*e.xi_hat - study.mean);
        }
    }
    study.empirical_std = std::sqrt(ss / (ok - 1));
    for (auto &e : study.estimates) {
        e.empirical_std = study.empirical_std;
    }
    return study;
}

} // namespace corrnoise
