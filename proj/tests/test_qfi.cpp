#include "corrnoise/qfi.hpp"
#include "corrnoise/random_states.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace cn = corrnoise;

namespace {

const cn::Interval kDom{1e-6, 1.0};

// Frozen with 30-digit bisection on 1 - exp(-2x) = x.
constexpr double kShotX = 0.796812130020020;
constexpr double kShotValue = 0.161902559472979;

double single_qubit_qfi(double gamma, double xi, double t) {
    const double e = std::exp(-2 * gamma * xi * t);
    return gamma * t * gamma * t * e / (1 - e);
}

cn::Matrix coherence_state(double a) {
    cn::Matrix m(2, 2);
    m << 0.5, 0.5 * std::exp(-a), 0.5 * std::exp(-a), 0.5;
    return m;
}

cn::DensityMatrix plus_state(int n) { return cn::DensityMatrix::pure(cn::ProductState::plus(n).state_vector()); }

cn::CoherencePair bell() {
    return {cn::SpinPattern::from_bits("01"), cn::SpinPattern::from_bits("10")};
}

} // namespace

TEST(HermitianEig, SmallExamples) {
    const auto a = cn::hermitian_eig(0.5 * cn::Matrix::Identity(2, 2));
    EXPECT_NEAR(a.eigenvalues(0), 0.5, 1e-15);
    EXPECT_NEAR(a.eigenvalues(1), 0.5, 1e-15);
    const auto b = cn::hermitian_eig(0.5 * cn::Matrix::Ones(2, 2));
    EXPECT_NEAR(b.eigenvalues(0), 0.0, 1e-15);
    EXPECT_NEAR(b.eigenvalues(1), 1.0, 1e-15);
    cn::Matrix skew = cn::Matrix::Zero(2, 2);
    skew(0, 1) = 1.0;
    EXPECT_THROW((void)cn::hermitian_eig(skew), cn::InvalidArgument);
}

TEST(HermitianEig, RandomDimension64Reconstruction) {
    cn::CounterRng rng(3);
    cn::Matrix g(64, 64);
    for (Eigen::Index i = 0; i < 64; ++i)
        for (Eigen::Index j = 0; j < 64; ++j) g(i, j) = cn::Complex(cn::normal_sample(rng), cn::normal_sample(rng));
    const cn::Matrix h = 0.5 * (g + g.adjoint());
    const auto e = cn::hermitian_eig(h);
    const cn::Matrix &v = e.eigenvectors;
    EXPECT_LE((v * e.eigenvalues.asDiagonal() * v.adjoint() - h).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE((v.adjoint() * v - cn::Matrix::Identity(64, 64)).cwiseAbs().maxCoeff(), 1e-10);
    for (Eigen::Index i = 1; i < 64; ++i) EXPECT_LE(e.eigenvalues(i - 1), e.eigenvalues(i));
}

TEST(Fidelity, BasicProperties) {
    cn::CounterRng rng(7);
    const auto rho = cn::random_mixed_state(2, rng);
    const auto sigma = cn::random_mixed_state(2, rng);
    EXPECT_NEAR(cn::fidelity(rho, rho), 1.0, 1e-12);
    EXPECT_NEAR(cn::bures_distance_sq(rho, rho), 0.0, 1e-12);
    EXPECT_NEAR(cn::fidelity(rho, sigma), cn::fidelity(sigma, rho), 1e-9);
    cn::Vector up = cn::Vector::Zero(2);
    cn::Vector down = cn::Vector::Zero(2);
    up(0) = 1.0;
    down(1) = 1.0;
    EXPECT_NEAR(cn::fidelity(cn::DensityMatrix::pure(up), cn::DensityMatrix::pure(down)), 0.0, 1e-15);
    EXPECT_NEAR(cn::bures_distance_sq(cn::DensityMatrix::pure(up), cn::DensityMatrix::pure(down)), 2.0, 1e-15);
}

TEST(Fidelity, DephasedQubitClosedForm) {
    for (auto [a, b] : {std::pair{0.1, 0.3}, std::pair{1.0, 1.5}, std::pair{0.02, 2.0}}) {
        const double expected = 0.5 * (1 + std::exp(-a - b)) +
                                0.5 * std::sqrt((1 - std::exp(-2 * a)) * (1 - std::exp(-2 * b)));
        const cn::DensityMatrix rho(coherence_state(a));
        const cn::DensityMatrix sigma(coherence_state(b));
        EXPECT_NEAR(cn::fidelity(rho, sigma), expected, 1e-13);
    }
}

TEST(Fidelity, BuresIdentityAndTriangle) {
    cn::CounterRng rng(11);
    for (int k = 0; k < 20; ++k) {
        const auto a = cn::random_mixed_state(2, rng);
        const auto b = cn::random_mixed_state(2, rng);
        const auto c = cn::random_pure_state(2, rng);
        EXPECT_NEAR(cn::bures_distance_sq(a, b), 2 * (1 - std::sqrt(cn::fidelity(a, b))), 1e-12);
        const double ab = std::sqrt(cn::bures_distance_sq(a, b));
        const double bc = std::sqrt(cn::bures_distance_sq(b, c));
        const double ac = std::sqrt(cn::bures_distance_sq(a, c));
        EXPECT_LE(ac, ab + bc + 1e-12);
    }
}

TEST(QfiExact, SingleQubitClosedForm) {
    const auto f = cn::build_single_qubit({1e-3, 2.0}, 1.4);
    const auto plus = plus_state(1);
    for (double xi : {0.01, 0.2, 1.5}) {
        for (double t : {0.05, 1.0, 7.0}) {
            const auto r = cn::qfi_exact(plus, f, xi, t);
            EXPECT_NEAR(r.value / single_qubit_qfi(1.4, xi, t), 1.0, 1e-12);
            EXPECT_EQ(r.regime, cn::Regime::per_shot);
            EXPECT_EQ(r.time, t);
        }
    }
}

TEST(QfiExact, ZeroPerturbationGivesZero) {
    const auto f = cn::from_spectral_density({2, 0.5 * cn::Matrix::Identity(2, 2), 1.0});
    cn::CounterRng rng(1);
    const auto rho = cn::random_pure_state(2, rng);
    EXPECT_EQ(cn::qfi_exact(rho, f, 0.0, 1.0).value, 0.0);
    EXPECT_THROW((void)cn::qfi_fidelity_check(rho, f, 0.0, 1.0, 1e-6), cn::InvalidArgument);
}

TEST(QfiExact, GhzPeakValue) {
    const auto f = cn::build_n_qubit(6, kDom);
    const auto ghz = cn::pair_probe(cn::CoherencePair::ghz(6));
    const double t = kShotX / 0.06;
    const double v = cn::qfi_exact(ghz, f, 0.01, t).value;
    EXPECT_NEAR(v, kShotValue / (0.01 * 0.01), 1e-6);
    EXPECT_NEAR(v / 1619.5, 1.0, 1e-3);
}

TEST(QfiExact, RejectsNonPositiveTime) {
    const auto f = cn::build_single_qubit(kDom);
    EXPECT_THROW((void)cn::qfi_exact(plus_state(1), f, 0.1, 0.0), cn::InvalidArgument);
}

TEST(QfiExact, CovariantUnderLocalZRotations) {
    cn::CounterRng rng(41);
    const auto f = cn::build_n_qubit(3, kDom);
    for (int k = 0; k < 5; ++k) {
        std::vector<double> th;
        std::vector<double> ph;
        for (int j = 0; j < 3; ++j) {
            th.push_back(3.0 * rng.next_double());
            ph.push_back(6.0 * rng.next_double());
        }
        const auto a = cn::DensityMatrix::pure(cn::ProductState::state_vector_unchecked(th, {}));
        const auto b = cn::DensityMatrix::pure(cn::ProductState::state_vector_unchecked(th, ph));
        EXPECT_NEAR(cn::qfi_exact(a, f, 0.05, 2.0).value, cn::qfi_exact(b, f, 0.05, 2.0).value, 1e-10);
    }
}

TEST(QfiExact, ConvexInTheProbe) {
    cn::CounterRng rng(43);
    const auto f = cn::build_two_qubit(kDom);
    const cn::CoherenceGenerator gen(f, 0.1);
    for (int k = 0; k < 20; ++k) {
        const auto r1 = cn::random_pure_state(2, rng);
        const auto r2 = cn::random_mixed_state(2, rng);
        const double p = rng.next_double();
        const double t = cn::log_uniform(rng, 0.1, 10.0);
        const cn::DensityMatrix mix(p * r1.matrix() + (1 - p) * r2.matrix());
        EXPECT_LE(cn::qfi_value(mix, gen, t),
                  p * cn::qfi_value(r1, gen, t) + (1 - p) * cn::qfi_value(r2, gen, t) + 1e-8);
    }
}

TEST(FidelityRoute, MatchesSldOnSingleQubit) {
    const auto f = cn::build_single_qubit({1e-3, 2.0});
    const auto plus = plus_state(1);
    for (double t : {0.5, 5.0, 20.0}) {
        const double exact = single_qubit_qfi(1.0, 0.1, t);
        EXPECT_NEAR(cn::qfi_fidelity_check(plus, f, 0.1, t) / exact, 1.0, 1e-3);
    }
}

TEST(FidelityRoute, RichardsonOverTwoStepsAgreesTightly) {
    cn::CounterRng rng(47);
    const std::vector<cn::DephasingFamily> fams{cn::build_single_qubit(kDom), cn::build_two_qubit(kDom),
                                                cn::build_n_qubit(3, kDom)};
    for (const auto &f : fams) {
        for (int k = 0; k < 5; ++k) {
            const double xi = cn::log_uniform(rng, 1e-2, 0.5);
            const auto rho = cn::random_pure_state(f.n_qubits(), rng);
            const double t = cn::log_uniform(rng, 0.1, 3.0) / xi;
            const double exact = cn::qfi_exact(rho, f, xi, t).value;
            const double a = cn::qfi_fidelity_check(rho, f, xi, t, 1e-4 * xi);
            const double b = cn::qfi_fidelity_check(rho, f, xi, t, 5e-5 * xi);
            EXPECT_NEAR((2 * b - a) / exact, 1.0, 1e-5);
        }
    }
}

TEST(FidelityRoute, DomainEdgeRejected) {
    const auto f = cn::build_two_qubit({0.1, 1.0});
    EXPECT_THROW((void)cn::qfi_fidelity_check(cn::pair_probe(bell()), f, 1.0, 1.0), cn::InvalidArgument);
}

TEST(TimeAveraged, SingleQubitClosedFormAndLimit) {
    const auto f = cn::build_single_qubit({1e-3, 2.0});
    const auto plus = plus_state(1);
    EXPECT_NEAR(cn::time_averaged_qfi(plus, f, 0.1, 3.0).value, single_qubit_qfi(1.0, 0.1, 3.0) / 3.0, 1e-12);
    EXPECT_LT(cn::time_averaged_qfi(plus, f, 0.1, 1e4).value, 1e-100);
    const auto lim = cn::time_averaged_qfi_limit(plus, f, 0.1);
    EXPECT_NEAR(lim.value, 5.0, 5.0 * 1e-6);
    EXPECT_EQ(lim.time, 0.0);
    EXPECT_EQ(lim.regime, cn::Regime::time_averaged);
}

TEST(TimeAveraged, KnownOptimalLimits) {
    EXPECT_NEAR(cn::time_averaged_qfi_limit(cn::pair_probe(bell()), cn::build_two_qubit(kDom), 0.1).value, 10.0, 1e-5);
    EXPECT_NEAR(cn::time_averaged_qfi_limit(cn::pair_probe(cn::CoherencePair::ghz(4)), cn::build_n_qubit(4, kDom), 0.1).value,
                20.0, 2e-5);
}

TEST(TimeAveraged, ClosedFormGrid) {
    for (double xi : {1e-3, 1e-2, 1e-1}) {
        const auto two = cn::build_two_qubit(kDom);
        const auto prod2 = cn::time_averaged_qfi_limit(plus_state(2), two, xi).value;
        EXPECT_NEAR(prod2 * xi * (2 - xi), 1.0, 1e-4);
        for (int n : {2, 4, 6}) {
            const auto f = cn::build_n_qubit(n, kDom);
            const double ghz = cn::time_averaged_qfi_limit(cn::pair_probe(cn::CoherencePair::ghz(n)), f, xi).value;
            const double sep = cn::time_averaged_qfi_limit(plus_state(n), f, xi).value;
            EXPECT_NEAR(ghz * 2 * xi / n, 1.0, 1e-4);
            EXPECT_NEAR(sep * 2 * xi, 1.0, 1e-4);
        }
    }
}

TEST(TimeAveraged, NeverAboveLimitOnLogGrid) {
    cn::CounterRng rng(53);
    const std::vector<cn::DephasingFamily> fams{cn::build_single_qubit(kDom), cn::build_two_qubit(kDom),
                                                cn::build_n_qubit(3, kDom)};
    for (const auto &f : fams) {
        for (int k = 0; k < 4; ++k) {
            const auto rho = cn::random_pure_state(f.n_qubits(), rng);
            const cn::CoherenceGenerator gen(f, cn::log_uniform(rng, 1e-3, 0.5));
            const double lim = cn::time_averaged_limit_value(rho, gen, 1.0);
            for (int i = 0; i <= 30; ++i) {
                const double t = 1e-3 * std::pow(1e5, i / 30.0) / gen.max_rate();
                EXPECT_LE(cn::qfi_value(rho, gen, t) / t, lim * (1 + 1e-6));
            }
        }
    }
}

TEST(TimeAveraged, FullRankProbeHasZeroLimit) {
    cn::CounterRng rng(67);
    const auto f = cn::build_n_qubit(2, kDom);
    const auto rho = cn::random_mixed_state(2, rng);
    EXPECT_EQ(cn::time_averaged_qfi_limit(rho, f, 0.1).value, 0.0);
    EXPECT_GT(cn::time_averaged_qfi(rho, f, 0.1, 1.0).value, 0.0);
}

TEST(TimeAveraged, ConvergenceFailureListsExtrapolants) {
    const auto f = cn::build_single_qubit(kDom);
    cn::LimitOptions opt;
    opt.levels = 2;
    try {
        (void)cn::time_averaged_qfi_limit(plus_state(1), f, 0.1, opt);
        FAIL() << "expected ConvergenceError";
    } catch (const cn::ConvergenceError &e) {
        EXPECT_NE(std::string(e.what()).find("extrapolants"), std::string::npos);
    }
}

TEST(PureStateLimit, AgreesWithRichardson) {
    cn::CounterRng rng(59);
    for (int n = 1; n <= 4; ++n) {
        const auto f = n == 1 ? cn::build_single_qubit(kDom) : cn::build_n_qubit(n, kDom);
        for (int k = 0; k < 4; ++k) {
            const double xi = cn::log_uniform(rng, 1e-2, 0.5);
            const cn::Vector psi = cn::random_pure_vector(n, rng);
            const double closed = cn::pure_state_rate_limit(psi, f, xi);
            const double rich = cn::time_averaged_qfi_limit(cn::DensityMatrix::pure(psi), f, xi).value;
            EXPECT_NEAR(closed / rich, 1.0, 1e-6);
        }
    }
    const auto two = cn::build_two_qubit(kDom);
    EXPECT_NEAR(cn::pure_state_rate_limit(cn::ProductState::plus(2).state_vector(), two, 0.1), 1 / (0.1 * 1.9), 1e-12);
}

TEST(PureStateLimit, SeparableOptimumIsHalfOverXi) {
    for (int n = 2; n <= 6; ++n) {
        const auto f = cn::build_n_qubit(n, kDom);
        EXPECT_NEAR(cn::pure_state_rate_limit(cn::ProductState::plus(n).state_vector(), f, 0.03), 1 / 0.06, 1e-9);
    }
}

TEST(ShotOptimum, FrozenRootAndValue) {
    EXPECT_NEAR(cn::shot_optimum_x(), kShotX, 1e-14);
    EXPECT_NEAR(cn::shot_optimum_value(), kShotValue, 1e-14);
    const double x = cn::shot_optimum_x();
    EXPECT_NEAR(-std::expm1(-2 * x), x, 1e-15);
}

TEST(CoherencePairQfi, TimeAveragedClosedForms) {
    const auto two = cn::build_two_qubit(kDom, 2.0);
    EXPECT_NEAR(cn::coherence_pair_qfi_timeavg(two, 0.1, bell()).value, 2.0 / 0.1, 1e-12);
    const auto f = cn::build_n_qubit(5, kDom);
    EXPECT_NEAR(cn::coherence_pair_qfi_timeavg(f, 0.02, cn::CoherencePair::ghz(5)).value, 5 / 0.04, 1e-10);
    const auto fixed = cn::from_spectral_density({2, 0.5 * cn::Matrix::Identity(2, 2), 1.0});
    EXPECT_EQ(cn::coherence_pair_qfi_timeavg(fixed, 0.0, bell()).value, 0.0);
}

TEST(CoherencePairQfi, ShotMatchesDenseRoute) {
    cn::CounterRng rng(61);
    const auto f = cn::build_n_qubit(3, kDom);
    const auto spec = cn::coherence_spectrum(f, 0.05);
    for (int k = 0; k < 10; ++k) {
        const auto &pair = spec[static_cast<std::size_t>(k * 2)].pair;
        const double t = cn::log_uniform(rng, 0.1, 20.0);
        const double closed = cn::coherence_pair_qfi_shot(f, 0.05, pair, t).value;
        const double dense = cn::qfi_exact(cn::pair_probe(pair), f, 0.05, t).value;
        EXPECT_NEAR(closed, dense, 1e-9 * std::max(1.0, dense)) << pair.label();
    }
}

TEST(CoherencePairQfi, ShotIncludesPhaseForComplexCoefficients) {
    cn::Matrix dc = cn::Matrix::Zero(2, 2);
    dc(0, 1) = cn::Complex(0.0, 0.3);
    dc(1, 0) = cn::Complex(0.0, -0.3);
    dc += cn::Matrix::Identity(2, 2);
    const cn::DephasingFamily f(2, 1.0, cn::Matrix::Identity(2, 2), dc, {0.0, 0.5});
    const cn::CoherencePair pair(cn::SpinPattern::from_bits("00"), cn::SpinPattern::from_bits("01"));
    for (double t : {0.2, 1.0, 3.0}) {
        const double closed = cn::coherence_pair_qfi_shot(f, 0.2, pair, t).value;
        const double dense = cn::qfi_exact(cn::pair_probe(pair), f, 0.2, t).value;
        EXPECT_NEAR(closed, dense, 1e-10 * dense);
    }
    EXPECT_NEAR(cn::pair_frequency_derivative(f, pair), 0.3, 1e-15);
    EXPECT_EQ(cn::pair_frequency_derivative(f, bell()), 0.0);
}
