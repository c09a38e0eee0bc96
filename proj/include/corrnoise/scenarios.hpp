#pragma once

// Reproduction scenarios behind the command-line tool. Each scenario turns a
// RunConfig into CSV text plus an exit code; file and flag handling live in
// the tool itself.

#include "corrnoise/core.hpp"
#include "corrnoise/estimation.hpp"
#include "corrnoise/evolution.hpp"
#include "corrnoise/model.hpp"
#include "corrnoise/optimize.hpp"
#include "corrnoise/parallel.hpp"
#include "corrnoise/qfi.hpp"
#include "corrnoise/random_states.hpp"
#include "corrnoise/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace corrnoise {

struct TimeGrid {
    double lo = 1e-2;
    double hi = 1e3;
    int points = 200;
    bool log_spaced = true;
};

struct RunConfig {
    std::string scenario;
    /// single | two | nqb | file:<path>
    std::string family = "nqb";
    int n = 6;
    double xi = 0.01;
    double gamma = 1.0;
    Regime regime = Regime::per_shot;
    TimeGrid t_grid{};
    std::int64_t shots = 10000;
    int seeds = 200;
    std::uint64_t seed = 20240601;
    std::string out;
    unsigned threads = 1;
};

enum ExitCode : int { kExitOk = 0, kExitTolerance = 1, kExitInvalidConfig = 2, kExitIo = 3 };

struct ScenarioOutput {
    std::string csv;
    int exit_code = kExitOk;
};

inline const std::array<const char *, 7> kScenarioNames{
    "fig1a", "fig1b", "closed-forms", "advantage", "estimate", "spectrum", "verify"};

[[nodiscard]] inline Regime parse_regime(const std::string &s) {
    if (s == "shot") return Regime::per_shot;
    if (s == "time") return Regime::time_averaged;
    throw InvalidArgument("regime must be 'shot' or 'time', got '" + s + "'");
}

/// Single-line JSON echo of every field that affects the output.
[[nodiscard]] inline std::string config_line(const RunConfig &c) {
    std::ostringstream os;
    auto quoted = [](const std::string &s) {
        std::string q = "\"";
        for (char ch : s) {
            if (ch == '"' || ch == '\\') q += '\\';
            q += ch;
        }
        return q + "\"";
    };
    os << "# config: {\"scenario\":" << quoted(c.scenario) << ",\"family\":" << quoted(c.family)
       << ",\"n\":" << c.n << ",\"xi\":" << format_double(c.xi)
       << ",\"gamma\":" << format_double(c.gamma) << ",\"regime\":\"" << to_string(c.regime)
       << "\",\"t_grid\":{\"lo\":" << format_double(c.t_grid.lo)
       << ",\"hi\":" << format_double(c.t_grid.hi) << ",\"points\":" << c.t_grid.points
       << ",\"log_spaced\":" << (c.t_grid.log_spaced ? "true" : "false") << "}"
       << ",\"shots\":" << c.shots << ",\"seeds\":" << c.seeds << ",\"seed\":" << c.seed << "}\n";
    os << "# units: times in 1/gamma, rates in gamma, gamma = " << format_double(c.gamma) << "\n";
    return os.str();
}

inline constexpr double kFamilyDomainFloor = 1e-9;

/// Family named by the config. File families are fixed channels read from a
/// spectral-density CSV with gamma as the reference rate.
[[nodiscard]] inline DephasingFamily make_family(const RunConfig &c) {
    if (c.family == "single") {
        return build_single_qubit({kFamilyDomainFloor, std::max(1.0, 2.0 * c.xi)}, c.gamma);
    }
    if (c.family == "two") {
        return build_two_qubit({kFamilyDomainFloor, 1.0}, c.gamma);
    }
    if (c.family == "nqb") {
        return build_n_qubit(c.n, {kFamilyDomainFloor, 1.0}, c.gamma);
    }
    if (c.family.rfind("file:", 0) == 0) {
        const std::string path = c.family.substr(5);
        std::ifstream in(path);
        if (!in) {
            throw IoError("cannot open spectral density file '" + path + "'");
        }
        return from_spectral_density(parse_spectral_csv(in, c.gamma));
    }
    throw InvalidArgument("unknown family '" + c.family + "' (expected single, two, nqb or file:<path>)");
}

namespace detail {

inline std::vector<double> grid_points(const TimeGrid &g) {
    if (!(g.lo > 0.0) || !(g.hi > g.lo) || g.points < 2) {
        throw InvalidArgument("t_grid needs 0 < lo < hi and at least two points");
    }
    std::vector<double> t(static_cast<std::size_t>(g.points));
    for (int i = 0; i < g.points; ++i) {
        const double f = static_cast<double>(i) / (g.points - 1);
        t[static_cast<std::size_t>(i)] =
            g.log_spaced ? std::exp(std::log(g.lo) + f * (std::log(g.hi) - std::log(g.lo)))
                         : g.lo + f * (g.hi - g.lo);
    }
    t.front() = g.lo;
    t.back() = g.hi;
    return t;
}

inline void require_xi_dependence(const DephasingFamily &f, const char *scenario) {
    if (!f.depends_on_xi()) {
        throw InvalidArgument(std::string(scenario) + ": family has no xi dependence");
    }
}

inline std::string thetas_field(const ProbeDescriptor &p) {
    if (const auto *s = std::get_if<ProductState>(&p)) {
        std::string out;
        for (std::size_t i = 0; i < s->thetas.size(); ++i) {
            out += (i ? ";" : "") + format_double(s->thetas[i]);
        }
        return out;
    }
    if (const auto *pair = std::get_if<CoherencePair>(&p)) {
        return pair->label();
    }
    return "";
}

} // namespace detail

/// Per-shot QFI against t for |+>^N and the GHZ pair.
[[nodiscard]] inline ScenarioOutput run_fig1a(const RunConfig &c) {
    const DephasingFamily family = make_family(c);
    detail::require_xi_dependence(family, "fig1a");
    const int n = family.n_qubits();
    const CoherenceGenerator gen(family, c.xi);
    const DensityMatrix product = ProductState::plus(n).density();
    const DensityMatrix ghz = n >= 2 ? pair_probe(CoherencePair::ghz(n)) : product;
    const std::vector<double> ts = detail::grid_points(c.t_grid);
    std::vector<std::array<double, 2>> rows(ts.size());
    parallel_for(ts.size(), c.threads, [&](std::size_t i) {
        rows[i] = {qfi_value(product, gen, ts[i]), qfi_value(ghz, gen, ts[i])};
    });
    std::ostringstream os;
    os << config_line(c) << "t,qfi_product,qfi_ghz\n";
    for (std::size_t i = 0; i < ts.size(); ++i) {
        os << format_double(ts[i]) << ',' << format_double(rows[i][0]) << ','
           << format_double(rows[i][1]) << '\n';
    }
    return {os.str(), kExitOk};
}

/// Advantage ratios in both regimes for n = 2..N on the n-qubit family.
[[nodiscard]] inline ScenarioOutput run_fig1b(const RunConfig &c) {
    if (c.n < 2 || c.n > kMaxProductQubits) {
        throw InvalidArgument("fig1b: n must be in [2, " + std::to_string(kMaxProductQubits) + "]");
    }
    const int count = c.n - 1;
    std::vector<double> ratios(static_cast<std::size_t>(2 * count));
    parallel_for(ratios.size(), c.threads, [&](std::size_t k) {
        const int n = 2 + static_cast<int>(k / 2);
        const Regime r = k % 2 == 0 ? Regime::time_averaged : Regime::per_shot;
        ProductSearchOptions opt;
        opt.seed = c.seed;
        ratios[k] = advantage_ratio(n, c.xi, r, opt).ratio;
    });
    std::ostringstream os;
    os << config_line(c) << "n,ratio_time,ratio_shot,pred_time,pred_shot\n";
    for (int i = 0; i < count; ++i) {
        const int n = 2 + i;
        os << n << ',' << format_double(ratios[static_cast<std::size_t>(2 * i)]) << ','
           << format_double(ratios[static_cast<std::size_t>(2 * i + 1)]) << ',' << n << ','
           << format_double(std::ldexp(1.0, n - 1)) << '\n';
    }
    return {os.str(), kExitOk};
}

struct ClosedFormRow {
    std::string name;
    double computed = 0.0;
    double expected = 0.0;
    [[nodiscard]] double rel_err() const { return std::abs(computed - expected) / std::abs(expected); }
};

inline constexpr double kClosedFormTol = 1e-4;

/// Richardson t -> 0+ limits against the analytic optimal time-averaged QFIs.
[[nodiscard]] inline std::vector<ClosedFormRow> closed_form_rows(double xi, double gamma, int n) {
    if (!(xi > 0.0 && xi <= 1.0)) {
        throw InvalidArgument("closed-forms: xi must lie in (0, 1]");
    }
    if (n < 2) {
        throw InvalidArgument("closed-forms: n must be >= 2");
    }
    const Interval dom{kFamilyDomainFloor, 1.0};
    const auto single = build_single_qubit(dom, gamma);
    const auto two = build_two_qubit(dom, gamma);
    const auto multi = build_n_qubit(n, dom, gamma);
    const CoherencePair bell(SpinPattern::from_bits("01"), SpinPattern::from_bits("10"));
    const std::string nn = std::to_string(n);
    return {
        {"single_plus", time_averaged_qfi_limit(ProductState::plus(1).density(), single, xi).value,
         gamma / (2.0 * xi)},
        {"two_bell", time_averaged_qfi_limit(pair_probe(bell), two, xi).value, gamma / xi},
        {"two_product", time_averaged_qfi_limit(ProductState::plus(2).density(), two, xi).value,
         gamma / (xi * (2.0 - xi))},
        {"nqb" + nn + "_ghz",
         time_averaged_qfi_limit(pair_probe(CoherencePair::ghz(n)), multi, xi).value,
         n * gamma / (2.0 * xi)},
        {"nqb" + nn + "_product",
         time_averaged_qfi_limit(ProductState::plus(n).density(), multi, xi).value,
         gamma / (2.0 * xi)},
    };
}

[[nodiscard]] inline ScenarioOutput run_closed_forms(const RunConfig &c) {
    const auto rows = closed_form_rows(c.xi, c.gamma, std::max(c.n, 2));
    std::ostringstream os;
    os << config_line(c) << "case,computed,expected,rel_err\n";
    int code = kExitOk;
    for (const auto &r : rows) {
        os << r.name << ',' << format_double(r.computed) << ',' << format_double(r.expected) << ','
           << format_double(r.rel_err()) << '\n';
        if (!(r.rel_err() <= kClosedFormTol)) {
            code = kExitTolerance;
        }
    }
    return {os.str(), code};
}

[[nodiscard]] inline ScenarioOutput run_advantage(const RunConfig &c) {
    ProductSearchOptions opt;
    opt.seed = c.seed;
    opt.threads = c.threads;
    AdvantageRatio a;
    if (c.family == "nqb") {
        a = advantage_ratio(c.n, c.xi, c.regime, opt);
    } else if (c.family == "two") {
        a = advantage_ratio(make_family(c), c.xi, c.regime, opt);
    } else {
        throw InvalidArgument("advantage: family must be nqb or two");
    }
    std::ostringstream os;
    os << config_line(c)
       << "n,xi,regime,entangled_value,entangled_time,entangled_probe,separable_value,"
          "separable_time,separable_thetas,ratio\n";
    os << a.n_qubits << ',' << format_double(a.xi) << ',' << to_string(a.regime) << ','
       << format_double(a.entangled_best.value) << ',' << format_double(a.entangled_best.time) << ','
       << detail::thetas_field(a.entangled_best.probe) << ','
       << format_double(a.separable_best.value) << ',' << format_double(a.separable_best.time)
       << ',' << detail::thetas_field(a.separable_best.probe) << ',' << format_double(a.ratio)
       << '\n';
    return {os.str(), kExitOk};
}

/// Monte Carlo parity experiments on the GHZ pair at its optimal per-shot time.
[[nodiscard]] inline ScenarioOutput run_estimate(const RunConfig &c) {
    const DephasingFamily family = make_family(c);
    detail::require_xi_dependence(family, "estimate");
    if (family.n_qubits() < 2) {
        throw InvalidArgument("estimate: needs at least two qubits for the GHZ pair");
    }
    if (c.shots <= 0 || c.seeds < 2) {
        throw InvalidArgument("estimate: shots must be positive and seeds >= 2");
    }
    const CoherencePair pair = CoherencePair::ghz(family.n_qubits());
    const ReplicationStudy study =
        replicate_estimation(family, c.xi, pair, c.shots, c.seeds, c.seed, c.threads);
    std::ostringstream os;
    os << config_line(c) << "replicate,seed,xi_hat,clamped,std_error_crb\n";
    for (std::size_t i = 0; i < study.estimates.size(); ++i) {
        const auto &e = study.estimates[i];
        os << i << ',' << (c.seed ^ static_cast<std::uint64_t>(i)) << ','
           << (e.xi_hat ? format_double(*e.xi_hat) : std::string("fail")) << ','
           << (e.clamped ? 1 : 0) << ',' << format_double(e.std_error_crb) << '\n';
    }
    os << "# t: " << format_double(study.t) << '\n';
    os << "# mean_xi_hat: " << format_double(study.mean) << '\n';
    os << "# empirical_std: " << format_double(study.empirical_std) << '\n';
    os << "# shot_uncertainty: " << format_double(study.shot_uncertainty) << '\n';
    os << "# failures: " << study.failures << '\n';
    if (family.n_qubits() >= 2 && c.family == "nqb") {
        const PromiseReport p = promise_check(family, study.mean);
        os << "# promise: holds=" << (p.holds ? "true" : "false")
           << " xi_c=" << format_double(p.threshold)
           << " coherence_at_probe_time=" << format_double(p.predicted_coherence) << '\n';
    }
    return {os.str(), kExitOk};
}

/// Coherence decay spectrum of a family at xi (or of a fixed channel).
[[nodiscard]] inline ScenarioOutput run_spectrum(const RunConfig &c) {
    const DephasingFamily family = make_family(c);
    const double xi = family.depends_on_xi() ? c.xi : family.xi_domain().lo;
    const auto spectrum = coherence_spectrum(family, xi);
    const CoherenceGenerator gen(family, xi);
    std::ostringstream os;
    os << config_line(c) << "alpha,beta,rate,frequency\n";
    for (const auto &pr : spectrum) {
        const Complex lam = gen.lambda()(pr.pair.alpha().index(), pr.pair.beta().index());
        os << pr.pair.alpha().bits() << ',' << pr.pair.beta().bits() << ','
           << format_double(pr.rate) << ',' << format_double(lam.imag()) << '\n';
    }
    if (family.n_qubits() <= kMaxSuperoperatorQubits) {
        os << "# superoperator_residual: "
           << format_double(spectrum_mismatch(superoperator_spectrum(family, xi), family, xi))
           << '\n';
    }
    return {os.str(), kExitOk};
}

// ---------------------------------------------------------------------------
// verify

struct CheckResult {
    std::string name;
    bool pass = false;
    /// Worst observed violation measure.
    double residual = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

namespace detail {

inline std::vector<DephasingFamily> small_families() {
    const Interval dom{kFamilyDomainFloor, 1.0};
    return {build_single_qubit(dom), build_two_qubit(dom), build_n_qubit(2, dom),
            build_n_qubit(3, dom)};
}

inline CheckResult check(std::string name, double residual, double tol, std::string detail = {}) {
    return {std::move(name), residual <= tol, residual, tol, std::move(detail)};
}

/// t -> 0+ limit of QFI(t)/t for a pure probe: the Richardson extrapolant,
/// or the closed form when extrapolation does not converge.
inline double pure_limit_reference(const Vector &psi, const DephasingFamily &f,
                                   const CoherenceGenerator &gen, double xi, bool &fallback) {
    fallback = false;
    try {
        return time_averaged_limit_value(DensityMatrix::pure(psi), gen, f.gamma());
    } catch (const ConvergenceError &) {
        fallback = true;
        return pure_state_rate_limit(psi, f, xi);
    }
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

} // namespace detail

/// Each check is a pure function of its fixed seed.
[[nodiscard]] inline std::vector<std::function<CheckResult()>> verify_checks(const RunConfig &c) {
    std::vector<std::function<CheckResult()>> checks;
    const std::uint64_t seed = c.seed;

    if (c.family.rfind("file:", 0) == 0) {
        checks.emplace_back([c] {
            try {
                const DephasingFamily f = make_family(c);
                const double xi = f.xi_domain().lo;
                const double residual =
                    f.n_qubits() <= kMaxSuperoperatorQubits
                        ? spectrum_mismatch(superoperator_spectrum(f, xi), f, xi)
                        : 0.0;
                return detail::check("file_family_valid", residual, 1e-10,
                                     "n=" + std::to_string(f.n_qubits()));
            } catch (const InvalidArgument &e) {
                return CheckResult{"file_family_valid", false, INFINITY, 0.0, e.what()};
            }
        });
    }

    checks.emplace_back([] {
        double worst = 0.0;
        for (int n = 2; n <= 6; ++n) {
            for (double xi : {1e-3, 1e-2, 1e-1}) {
                const auto f = build_n_qubit(n, {kFamilyDomainFloor, 1.0});
                for (const auto &pr : coherence_spectrum(f, xi)) {
                    worst = std::max(worst, -pr.rate);
                }
            }
        }
        return detail::check("rates_nonnegative", worst, 0.0);
    });

    checks.emplace_back([seed] {
        CounterRng rng(seed ^ 0x11);
        double worst = 0.0;
        for (const auto &f : detail::small_families()) {
            for (int k = 0; k < 5; ++k) {
                const double xi = log_uniform(rng, 1e-3, 0.9);
                const DensityMatrix rho = random_mixed_state(f.n_qubits(), rng);
                const DensityMatrix out = evolve(rho, f, xi, log_uniform(rng, 1e-2, 1e2));
                worst = std::max(worst, std::max(0.0, -min_eigenvalue(out.matrix())));
                worst = std::max(worst, std::abs(out.matrix().trace() - Complex(1.0)));
                worst = std::max(worst, hermitian_deviation(out.matrix()));
            }
        }
        return detail::check("psd_trace_preservation", worst, 1e-10);
    });

    checks.emplace_back([seed] {
        CounterRng rng(seed ^ 0x22);
        double worst = 0.0;
        for (const auto &f : detail::small_families()) {
            for (int k = 0; k < 5; ++k) {
                const CoherenceGenerator gen(f, log_uniform(rng, 1e-3, 0.9));
                const DensityMatrix rho = random_mixed_state(f.n_qubits(), rng);
                const double t1 = log_uniform(rng, 1e-2, 10.0);
                const double t2 = log_uniform(rng, 1e-2, 10.0);
                const Matrix direct = evolve(rho, gen, t1 + t2).matrix();
                const Matrix stepped = evolve(evolve(rho, gen, t1), gen, t2).matrix();
                worst = std::max(worst, (direct - stepped).cwiseAbs().maxCoeff());
            }
        }
        return detail::check("semigroup", worst, 1e-12);
    });

    checks.emplace_back([] {
        double worst = 0.0;
        for (const auto &f : detail::small_families()) {
            for (double xi : {1e-3, 0.05, 0.7}) {
                worst = std::max(worst, spectrum_mismatch(superoperator_spectrum(f, xi), f, xi));
            }
        }
        return detail::check("superoperator_oracle", worst, 1e-10);
    });

    checks.emplace_back([seed] {
        CounterRng rng(seed ^ 0x33);
        double worst = 0.0;
        const auto fams = detail::small_families();
        for (int k = 0; k < 20; ++k) {
            const auto &f = fams[static_cast<std::size_t>(k) % fams.size()];
            const double xi = log_uniform(rng, 1e-2, 0.5);
            const DensityMatrix rho = random_pure_state(f.n_qubits(), rng);
            const CoherenceGenerator gen(f, xi);
            const double t = log_uniform(rng, 0.1, 3.0) / gen.min_nonzero_rate();
            const double exact = qfi_value(rho, gen, t);
            worst = std::max(worst, detail::rel(qfi_fidelity_check(rho, f, xi, t), exact));
        }
        return detail::check("qfi_fidelity_crosscheck", worst, 1e-3);
    });

    checks.emplace_back([seed] {
        CounterRng rng(seed ^ 0x44);
        double worst = -INFINITY;
        const auto fams = detail::small_families();
        for (int k = 0; k < 30; ++k) {
            const auto &f = fams[static_cast<std::size_t>(k) % fams.size()];
            const double xi = log_uniform(rng, 1e-3, 0.5);
            const double tau = log_uniform(rng, 1e-2, 3.0) / std::max(xi, 0.1);
            const DensityMatrix rho = random_pure_state(f.n_qubits(), rng);
            const CoherenceGenerator a(f, xi);
            const CoherenceGenerator b(f, xi * 1.01);
            const double d1 = bures_distance_sq(evolve(rho, a, tau), evolve(rho, b, tau));
            for (int m : {2, 4, 8}) {
                const double dm = bures_distance_sq(evolve(rho, a, m * tau), evolve(rho, b, m * tau));
                worst = std::max(worst, dm - m * d1);
            }
        }
        return detail::check("bures_convexity", worst, 1e-10);
    });

    checks.emplace_back([seed] {
        CounterRng rng(seed ^ 0x55);
        double worst = -INFINITY;
        const auto fams = detail::small_families();
        for (int k = 0; k < 20; ++k) {
            const auto &f = fams[static_cast<std::size_t>(k) % fams.size()];
            const CoherenceGenerator gen(f, log_uniform(rng, 1e-2, 0.5));
            const DensityMatrix r1 = random_mixed_state(f.n_qubits(), rng);
            const DensityMatrix r2 = random_pure_state(f.n_qubits(), rng);
            const double p = rng.next_double();
            const double t = log_uniform(rng, 0.1, 3.0) / gen.min_nonzero_rate();
            const DensityMatrix mix(p * r1.matrix() + (1.0 - p) * r2.matrix(), DensityMatrix::Unchecked{});
            const double lhs = qfi_value(mix, gen, t);
            const double rhs = p * qfi_value(r1, gen, t) + (1.0 - p) * qfi_value(r2, gen, t);
            worst = std::max(worst, lhs - rhs);
        }
        return detail::check("qfi_convexity", worst, 1e-8);
    });

    checks.emplace_back([seed] {
        CounterRng rng(seed ^ 0x66);
        double worst = -INFINITY;
        const auto fams = detail::small_families();
        int closed_form = 0;
        for (int k = 0; k < 8; ++k) {
            const auto &f = fams[static_cast<std::size_t>(k) % fams.size()];
            const double xi = log_uniform(rng, 1e-3, 0.5);
            const CoherenceGenerator gen(f, xi);
            const Vector psi = random_pure_vector(f.n_qubits(), rng);
            const DensityMatrix rho = DensityMatrix::pure(psi);
            bool fallback = false;
            const double limit = detail::pure_limit_reference(psi, f, gen, xi, fallback);
            closed_form += fallback ? 1 : 0;
            for (int i = 0; i <= 40; ++i) {
                const double t = 1e-3 * std::pow(1e5, i / 40.0) / gen.max_rate();
                worst = std::max(worst, (qfi_value(rho, gen, t) / t - limit) / limit);
            }
        }
        return detail::check("time_average_below_limit", worst, 1e-6,
                             "closed-form limit used for " + std::to_string(closed_form) + " of 8");
    });

    checks.emplace_back([c] {
        double worst = 0.0;
        std::string where;
        for (double xi : {1e-3, 1e-2, 1e-1}) {
            for (int n : {2, 4, 6}) {
                for (const auto &row : closed_form_rows(xi, c.gamma, n)) {
                    if (row.rel_err() > worst) {
                        worst = row.rel_err();
                        where = row.name + " xi=" + format_double(xi);
                    }
                }
            }
        }
        return detail::check("closed_forms", worst, kClosedFormTol, where);
    });

    checks.emplace_back([seed] {
        CounterRng rng(seed ^ 0x77);
        double worst = 0.0;
        for (int n = 1; n <= 4; ++n) {
            const DephasingFamily f = n == 1 ? build_single_qubit({kFamilyDomainFloor, 1.0})
                                             : build_n_qubit(n, {kFamilyDomainFloor, 1.0});
            for (int k = 0; k < 3; ++k) {
                const double xi = log_uniform(rng, 1e-2, 0.5);
                const Vector psi = random_pure_vector(n, rng);
                const double closed = pure_state_rate_limit(psi, f, xi);
                const double richardson =
                    time_averaged_qfi_limit(DensityMatrix::pure(psi), f, xi).value;
                worst = std::max(worst, detail::rel(closed, richardson));
            }
        }
        return detail::check("pure_state_limit_formula", worst, 1e-6);
    });

    checks.emplace_back([] {
        constexpr std::array<std::uint64_t, 5> expected{
            6457827717110365317ULL, 3203168211198807973ULL, 9817491932198370423ULL,
            4593380528125082431ULL, 16408922859458223821ULL};
        CounterRng rng(1234567);
        int mismatches = 0;
        for (std::uint64_t v : expected) {
            mismatches += rng.next_u64() == v ? 0 : 1;
        }
        return detail::check("rng_test_vectors", mismatches, 0.0);
    });

    return checks;
}

[[nodiscard]] inline ScenarioOutput run_verify(const RunConfig &c) {
    const auto checks = verify_checks(c);
    std::vector<CheckResult> results(checks.size());
    parallel_for(checks.size(), c.threads, [&](std::size_t i) {
        try {
            results[i] = checks[i]();
        } catch (const Error &e) {
            results[i] = {"check_" + std::to_string(i), false, INFINITY, 0.0, e.what()};
        }
    });
    std::ostringstream os;
    os << config_line(c) << "property,status,residual,tolerance,detail\n";
    int code = kExitOk;
    for (const auto &r : results) {
        std::string detail = r.detail;
        std::replace(detail.begin(), detail.end(), ',', ';');
        std::replace(detail.begin(), detail.end(), '\n', ' ');
        os << r.name << ',' << (r.pass ? "pass" : "FAIL") << ',' << format_double(r.residual) << ','
           << format_double(r.tolerance) << ',' << detail << '\n';
        if (!r.pass) {
            code = kExitTolerance;
        }
    }
    return {os.str(), code};
}

[[nodiscard]] inline ScenarioOutput run_scenario(const RunConfig &c) {
    if (c.scenario == "fig1a") return run_fig1a(c);
    if (c.scenario == "fig1b") return run_fig1b(c);
    if (c.scenario == "closed-forms") return run_closed_forms(c);
    if (c.scenario == "advantage") return run_advantage(c);
    if (c.scenario == "estimate") return run_estimate(c);
    if (c.scenario == "spectrum") return run_spectrum(c);
    if (c.scenario == "verify") return run_verify(c);
    throw InvalidArgument("unknown scenario '" + c.scenario + "'");
}

} // namespace corrnoise
