#pragma once

// Maximization of the QFI over interrogation time, product probes and
// single-coherence probes, and the entangled/separable advantage ratio.

#include "corrnoise/core.hpp"
#include "corrnoise/evolution.hpp"
#include "corrnoise/model.hpp"
#include "corrnoise/parallel.hpp"
#include "corrnoise/qfi.hpp"
#include "corrnoise/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace corrnoise {

// ---------------------------------------------------------------------------
// Nelder-Mead

struct NelderMeadOptions {
    double diameter_tol = 1e-8;
    /// Relative spread of simplex values.
    double value_tol = 1e-10;
    int max_iterations = 2000;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

/// Minimizes f from x0 with an axis-aligned initial simplex of edge `step`.
template <class F>
[[nodiscard]] NelderMeadResult nelder_mead(F &&f, std::vector<double> x0, double step,
                                           const NelderMeadOptions &opt = {}) {
    const std::size_t n = x0.size();
    NelderMeadResult out;
    std::vector<std::vector<double>> pts(n + 1, x0);
    std::vector<double> vals(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        pts[i + 1][i] += step;
    }
    for (std::size_t i = 0; i <= n; ++i) {
        vals[i] = f(pts[i]);
        ++out.evaluations;
    }
    std::vector<std::size_t> order(n + 1);
    auto point_on_line = [&](const std::vector<double> &centroid, const std::vector<double> &worst,
                             double coeff) {
        std::vector<double> p(n);
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = centroid[i] + coeff * (worst[i] - centroid[i]);
        }
        return p;
    };
    for (out.iterations = 0; out.iterations < opt.max_iterations; ++out.iterations) {
        for (std::size_t i = 0; i <= n; ++i) {
            order[i] = i;
        }
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[n - 1];

        double diameter = 0.0;
        for (std::size_t i = 0; i <= n; ++i) {
            double d2 = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                const double d = pts[i][k] - pts[best][k];
                d2 += d * d;
            }
            diameter = std::max(diameter, std::sqrt(d2));
        }
        const double spread = std::abs(vals[worst] - vals[best]);
        if (diameter < opt.diameter_tol ||
            spread <= opt.value_tol * std::max(1.0, std::abs(vals[best]))) {
            out.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t k = 0; k < n; ++k) {
                centroid[k] += pts[i][k] / static_cast<double>(n);
            }
        }
        const auto reflected = point_on_line(centroid, pts[worst], -1.0);
        const double fr = f(reflected);
        ++out.evaluations;
        if (fr < vals[best]) {
            const auto expanded = point_on_line(centroid, pts[worst], -2.0);
            const double fe = f(expanded);
            ++out.evaluations;
            if (fe < fr) {
                pts[worst] = expanded;
                vals[worst] = fe;
            } else {
                pts[worst] = reflected;
                vals[worst] = fr;
            }
            continue;
        }
        if (fr < vals[second]) {
            pts[worst] = reflected;
            vals[worst] = fr;
            continue;
        }
        const bool outside = fr < vals[worst];
        const auto contracted = point_on_line(centroid, pts[worst], outside ? -0.5 : 0.5);
        const double fc = f(contracted);
        ++out.evaluations;
        if (fc < (outside ? fr : vals[worst])) {
            pts[worst] = contracted;
            vals[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (std::size_t k = 0; k < n; ++k) {
                pts[i][k] = pts[best][k] + 0.5 * (pts[i][k] - pts[best][k]);
            }
            vals[i] = f(pts[i]);
            ++out.evaluations;
        }
    }
    const auto it = std::min_element(vals.begin(), vals.end());
    out.x = pts[static_cast<std::size_t>(it - vals.begin())];
    out.value = *it;
    return out;
}

// ---------------------------------------------------------------------------
// Time maximization

struct TimeMaximum {
    double time = 0.0;
    double value = 0.0;
};

inline constexpr int kTimeGridPoints = 64;

/// 64-point log-spaced scan of [t_lo, t_hi], then golden-section refinement in
/// log t around the best grid point to |dt|/t <= 1e-6. Returns whichever of
/// the grid maximum and the refined point is larger.
template <class Eval>
[[nodiscard]] TimeMaximum maximize_over_time(Eval &&eval, double t_lo, double t_hi) {
    if (!(t_lo > 0.0) || !(t_hi > t_lo) || !std::isfinite(t_hi)) {
        throw InvalidArgument("maximize_over_time: bracket must satisfy 0 < t_lo < t_hi");
    }
    const double log_lo = std::log(t_lo);
    const double log_hi = std::log(t_hi);
    std::vector<double> log_t(kTimeGridPoints);
    std::vector<double> values(kTimeGridPoints);
    std::size_t best = 0;
    for (int i = 0; i < kTimeGridPoints; ++i) {
        const auto k = static_cast<std::size_t>(i);
        log_t[k] = log_lo + (log_hi - log_lo) * i / (kTimeGridPoints - 1);
        const double t = i == 0 ? t_lo : (i == kTimeGridPoints - 1 ? t_hi : std::exp(log_t[k]));
        values[k] = eval(t);
        if (values[k] > values[best]) {
            best = k;
        }
    }
    TimeMaximum grid{best == 0 ? t_lo : (best + 1 == values.size() ? t_hi : std::exp(log_t[best])),
                     values[best]};

    double a = log_t[best == 0 ? 0 : best - 1];
    double b = log_t[std::min(best + 1, values.size() - 1)];
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = eval(std::exp(c));
    double fd = eval(std::exp(d));
    // |dt|/t ~ |d log t|
    while (b - a > 1e-6) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(std::exp(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(std::exp(d));
        }
    }
    const TimeMaximum refined = fc >= fd ? TimeMaximum{std::exp(c), fc} : TimeMaximum{std::exp(d), fd};
    return refined.value > grid.value ? refined : grid;
}

/// Default search bracket [1e-3, 1e2] / (smallest nonzero decay rate at xi).
[[nodiscard]] inline std::pair<double, double> default_time_bracket(const CoherenceGenerator &gen,
                                                                    double gamma) {
    double slow = gen.min_nonzero_rate();
    if (!(slow > 0.0)) {
        slow = gamma;
    }
    return {1e-3 / slow, 1e2 / slow};
}

// ---------------------------------------------------------------------------
// Coherence-pair probes

/// Maximum over t of the per-shot QFI of (|a>+|b>)/sqrt(2). For a real
/// coherence this is the closed form (G'/G)^2 x* e^{-2x*} at t = x*/G; a
/// coherence with a phase derivative is maximized numerically on [1e-3, 1e2]/G.
/// A dark but xi-dependent pair gives an infinite value.
[[nodiscard]] inline TimeMaximum pair_shot_maximum(const DephasingFamily &family, double xi,
                                                   const CoherencePair &pair) {
    const double g = decay_rate(family, xi, pair);
    const double dg = decay_rate_derivative(family, xi, pair);
    const double dw = pair_frequency_derivative(family, pair);
    if (dg == 0.0 && dw == 0.0) {
        return {g > 0.0 ? shot_optimum_x() / g : 0.0, 0.0};
    }
    if (!(g > 0.0)) {
        return {INFINITY, INFINITY};
    }
    if (dw == 0.0) {
        const double ratio = dg / g;
        return {shot_optimum_x() / g, ratio * ratio * shot_optimum_value()};
    }
    return maximize_over_time(
        [&](double t) { return coherence_pair_qfi_shot(family, xi, pair, t).value; }, 1e-3 / g,
        1e2 / g);
}

/// Best single-coherence probe (|a>+|b>)/sqrt(2) over all canonical pairs,
/// each maximized over t in the shot regime. Ties keep the lexicographically
/// first pair.
[[nodiscard]] inline QfiResult optimal_coherence_pair(const DephasingFamily &family, double xi,
                                                      Regime regime) {
    const int n = family.n_qubits();
    if (n > kMaxSpectrumQubits) {
        throw ResourceLimit("optimal_coherence_pair: " + std::to_string(n) +
                            " qubits exceeds the pair-enumeration limit of " +
                            std::to_string(kMaxSpectrumQubits));
    }
    family.require_in_domain(xi, "optimal_coherence_pair");
    const auto dim = static_cast<std::uint32_t>(dimension_of(n));
    QfiResult best{-1.0, regime, 0.0, {}};
    for (std::uint32_t a = 0; a < dim; ++a) {
        for (std::uint32_t b = a + 1; b < dim; ++b) {
            const CoherencePair pair(SpinPattern(n, a), SpinPattern(n, b));
            QfiResult r;
            if (regime == Regime::time_averaged) {
                r = coherence_pair_qfi_timeavg(family, xi, pair);
            } else {
                const TimeMaximum m = pair_shot_maximum(family, xi, pair);
                r = {m.value, Regime::per_shot, m.time, pair};
            }
            if (r.value > best.value) {
                best = r;
            }
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Product probes

struct OptimizationReport {
    QfiResult best;
    int starts = 0;
    double converged_fraction = 0.0;
    bool grid_fallback_used = false;
};

struct ProductSearchOptions {
    std::uint64_t seed = 20240601;
    /// 0 means 8 + 2N.
    int starts = 0;
    unsigned threads = 1;
    NelderMeadOptions nelder_mead{};
};

inline constexpr int kMaxProductQubits = 10;

namespace detail {

/// Folds an unconstrained angle into theta in [0, pi] with phi in {0, pi};
/// the map preserves the state up to a global phase and a per-qubit Z.
inline ProductState fold_angles(const std::vector<double> &raw) {
    ProductState s;
    for (double th : raw) {
        double t = std::fmod(th, 2.0 * std::numbers::pi);
        if (t < 0.0) t += 2.0 * std::numbers::pi;
        double phi = 0.0;
        if (t > std::numbers::pi) {
            t = 2.0 * std::numbers::pi - t;
            phi = std::numbers::pi;
        }
        s.thetas.push_back(t);
        s.phis.push_back(phi);
    }
    return s;
}

struct Candidate {
    std::vector<double> thetas;
    double value = -1.0;
    double time = 0.0;
    bool converged = false;
};

/// Larger value wins; equal values go to the lexicographically smaller angles.
inline bool better(const Candidate &a, const Candidate &b) {
    if (a.value != b.value) {
        return a.value > b.value;
    }
    return a.thetas < b.thetas;
}

} // namespace detail

/// Maximizes the QFI over product probes with azimuths fixed to zero (the
/// dynamics commute with per-qubit Z rotations). Nelder-Mead runs from the
/// all-pi/2 start plus uniform random starts. In the time-averaged regime the
/// objective is the closed-form t -> 0+ limit and the winner is re-scored by
/// Richardson extrapolation. In the shot regime the search runs jointly over
/// (theta, log t) and every candidate is re-maximized over t on the default
/// bracket. A 9-point-per-axis grid is evaluated if no start converges.
[[nodiscard]] inline OptimizationReport optimal_product_state(const DephasingFamily &family,
                                                             double xi, Regime regime,
                                                             const ProductSearchOptions &opt = {}) {
    const int n = family.n_qubits();
    if (n > kMaxProductQubits) {
        throw ResourceLimit("optimal_product_state: " + std::to_string(n) +
                            " qubits exceeds the limit of " + std::to_string(kMaxProductQubits));
    }
    family.require_in_domain(xi, "optimal_product_state");
    const CoherenceGenerator gen(family, xi);
    const auto [t_lo, t_hi] = default_time_bracket(gen, family.gamma());
    const std::vector<double> no_phis;

    auto state_of = [&](const std::vector<double> &th) {
        return DensityMatrix::pure(ProductState::state_vector_unchecked(th, no_phis));
    };
    auto time_objective = [&](const std::vector<double> &th) {
        return pure_state_rate_limit(ProductState::state_vector_unchecked(th, no_phis), family, xi);
    };
    auto clamp_time = [&](double log_t) { return std::clamp(std::exp(log_t), t_lo, t_hi); };
    auto best_time_for = [&](const std::vector<double> &th) {
        const DensityMatrix rho = state_of(th);
        return maximize_over_time([&](double t) { return qfi_value(rho, gen, t); }, t_lo, t_hi);
    };

    const int starts = opt.starts > 0 ? opt.starts : 8 + 2 * n;
    std::vector<std::vector<double>> initial(static_cast<std::size_t>(starts));
    initial[0].assign(static_cast<std::size_t>(n), std::numbers::pi / 2.0);
    CounterRng rng(opt.seed);
    for (int s = 1; s < starts; ++s) {
        for (int j = 0; j < n; ++j) {
            initial[static_cast<std::size_t>(s)].push_back(std::numbers::pi * rng.next_double());
        }
    }
    double slow = gen.min_nonzero_rate();
    const double t_start = std::clamp(slow > 0.0 ? shot_optimum_x() / slow : 1.0, t_lo, t_hi);

    std::vector<detail::Candidate> results(initial.size());
    parallel_for(initial.size(), opt.threads, [&](std::size_t s) {
        detail::Candidate c;
        if (regime == Regime::time_averaged) {
            const auto r = nelder_mead([&](const std::vector<double> &x) { return -time_objective(x); },
                                       initial[s], 0.25, opt.nelder_mead);
            c = {r.x, -r.value, 0.0, r.converged};
        } else {
            std::vector<double> x0 = initial[s];
            x0.push_back(std::log(t_start));
            const auto r = nelder_mead(
                [&](const std::vector<double> &x) {
                    const std::vector<double> th(x.begin(), x.end() - 1);
                    return -qfi_value(state_of(th), gen, clamp_time(x.back()));
                },
                x0, 0.25, opt.nelder_mead);
            std::vector<double> th(r.x.begin(), r.x.end() - 1);
            c = {th, -r.value, clamp_time(r.x.back()), r.converged};
            const TimeMaximum m = best_time_for(th);
            if (m.value > c.value) {
                c.value = m.value;
                c.time = m.time;
            }
        }
        c.thetas = detail::fold_angles(c.thetas).thetas;
        results[s] = std::move(c);
    });

    OptimizationReport report;
    report.starts = starts;
    int converged = 0;
    detail::Candidate best;
    for (const auto &c : results) {
        converged += c.converged ? 1 : 0;
        if (detail::better(c, best)) {
            best = c;
        }
    }
    report.converged_fraction = static_cast<double>(converged) / starts;

    if (converged == 0) {
        report.grid_fallback_used = true;
        const int per_axis = 9;
        auto score = [&](const std::vector<double> &th) {
            detail::Candidate c{th, 0.0, 0.0, false};
            if (regime == Regime::time_averaged) {
                c.value = time_objective(th);
            } else {
                const TimeMaximum m = best_time_for(th);
                c.value = m.value;
                c.time = m.time;
            }
            return c;
        };
        auto axis_value = [&](int k) { return std::numbers::pi * k / (per_axis - 1); };
        const double total = std::pow(per_axis, n);
        if (total <= 20000.0) {
            std::vector<int> idx(static_cast<std::size_t>(n), 0);
            for (long g = 0; g < static_cast<long>(total); ++g) {
                long rem = g;
                std::vector<double> th(static_cast<std::size_t>(n));
                for (int j = n - 1; j >= 0; --j) {
                    th[static_cast<std::size_t>(j)] = axis_value(static_cast<int>(rem % per_axis));
                    rem /= per_axis;
                }
                const auto c = score(th);
                if (detail::better(c, best)) best = c;
            }
        } else {
            // Coordinate sweeps through the incumbent.
            for (int j = 0; j < n; ++j) {
                for (int k = 0; k < per_axis; ++k) {
                    std::vector<double> th = best.thetas;
                    th[static_cast<std::size_t>(j)] = axis_value(k);
                    const auto c = score(th);
                    if (detail::better(c, best)) best = c;
                }
            }
        }
    }

    ProductState probe = detail::fold_angles(best.thetas);
    if (regime == Regime::time_averaged) {
        const DensityMatrix rho = state_of(best.thetas);
        report.best = {time_averaged_limit_value(rho, gen, family.gamma()), regime, 0.0, probe};
    } else {
        report.best = {best.value, regime, best.time, probe};
    }
    return report;
}

// ---------------------------------------------------------------------------
// Advantage ratio

struct AdvantageRatio {
    int n_qubits = 0;
    double xi = 0.0;
    Regime regime = Regime::per_shot;
    QfiResult entangled_best;
    QfiResult separable_best;
    double ratio = 0.0;
};

[[nodiscard]] inline AdvantageRatio advantage_ratio(const DephasingFamily &family, double xi,
                                                    Regime regime,
                                                    const ProductSearchOptions &opt = {}) {
    AdvantageRatio out;
    out.n_qubits = family.n_qubits();
    out.xi = xi;
    out.regime = regime;
    out.entangled_best = optimal_coherence_pair(family, xi, regime);
    out.separable_best = optimal_product_state(family, xi, regime, opt).best;
    out.ratio = out.entangled_best.value / out.separable_best.value;
    return out;
}

/// Advantage on the n-qubit correlated family C_jl = delta_jl - (1 - xi)/n.
[[nodiscard]] inline AdvantageRatio advantage_ratio(int n, double xi, Regime regime,
                                                    const ProductSearchOptions &opt = {}) {
    if (n < 2 || n > kMaxProductQubits) {
        throw InvalidArgument("advantage_ratio: n must be in [2, " +
                              std::to_string(kMaxProductQubits) + "]");
    }
    if (!(xi > 0.0 && xi <= 1.0)) {
        throw InvalidArgument("advantage_ratio: xi must lie in (0, 1]");
    }
    return advantage_ratio(build_n_qubit(n, {std::min(1e-9, xi), 1.0}), xi, regime, opt);
}

/// xi_c = n / 2^(n-1): upper edge of the exponential-advantage window (the
/// scaling prefactor is fixed to 1).
[[nodiscard]] inline double dynamical_range_threshold(int n) {
    if (n < 2) {
        throw InvalidArgument("dynamical_range_threshold: n must be >= 2");
    }
    return static_cast<double>(n) / std::ldexp(1.0, n - 1);
}

} // namespace corrnoise
