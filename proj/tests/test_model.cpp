#include "corrnoise/model.hpp"
#include "corrnoise/random_states.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace cn = corrnoise;

namespace {

cn::Matrix real_matrix(std::initializer_list<std::initializer_list<double>> rows) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    cn::Matrix m(n, n);
    Eigen::Index i = 0;
    for (const auto &row : rows) {
        Eigen::Index j = 0;
        for (double v : row) {
            m(i, j++) = v;
        }
        ++i;
    }
    return m;
}

double max_diff(const cn::Matrix &a, const cn::Matrix &b) { return (a - b).cwiseAbs().maxCoeff(); }

} // namespace

TEST(SingleQubitFamily, CoefficientIsXi) {
    const auto f = cn::build_single_qubit({0.1, 1.0});
    EXPECT_EQ(f.n_qubits(), 1);
    EXPECT_DOUBLE_EQ(f.coefficients(0.5)(0, 0).real(), 0.5);
    EXPECT_GE(cn::min_eigenvalue(f.coefficients(0.1)), 0.1 - 1e-15);
}

TEST(SingleQubitFamily, RejectsNonPositiveDomain) {
    EXPECT_THROW(cn::build_single_qubit({-0.1, 1.0}), cn::InvalidArgument);
    EXPECT_THROW(cn::build_single_qubit({0.0, 1.0}), cn::InvalidArgument);
    EXPECT_THROW(cn::build_single_qubit({0.5, 0.5}), cn::InvalidArgument);
}

TEST(TwoQubitFamily, MatchesFormula) {
    const auto f = cn::build_two_qubit({1e-4, 1.0});
    EXPECT_LT(max_diff(f.coefficients(0.2), real_matrix({{1.0, 0.8}, {0.8, 1.0}})), 1e-15);
    EXPECT_LT(max_diff(f.coefficients(1.0), cn::Matrix::Identity(2, 2)), 1e-15);
    const auto eig = cn::hermitian_eig(f.coefficients(0.2)).eigenvalues;
    EXPECT_NEAR(eig(0), 0.2, 1e-14);
    EXPECT_NEAR(eig(1), 1.8, 1e-14);
}

TEST(TwoQubitFamily, RejectsDomainAboveOne) {
    EXPECT_THROW(cn::build_two_qubit({0.1, 1.5}), cn::InvalidArgument);
}

TEST(NQubitFamily, TwoQubitEntries) {
    const auto f = cn::build_n_qubit(2, {1e-4, 1.0});
    for (double xi : {0.01, 0.3, 0.9}) {
        const cn::Matrix expected =
            real_matrix({{(1 + xi) / 2, -(1 - xi) / 2}, {-(1 - xi) / 2, (1 + xi) / 2}});
        EXPECT_LT(max_diff(f.coefficients(xi), expected), 1e-15);
    }
}

TEST(NQubitFamily, SpectrumIsXiAndOnes) {
    const auto f = cn::build_n_qubit(4, {1e-4, 1.0});
    const auto eig = cn::hermitian_eig(f.coefficients(0.01)).eigenvalues;
    EXPECT_NEAR(eig(0), 0.01, 1e-14);
    for (int i = 1; i < 4; ++i) {
        EXPECT_NEAR(eig(i), 1.0, 1e-14);
    }
}

TEST(NQubitFamily, BoundaryEigenvalue) {
    const auto f = cn::build_n_qubit(6, {1e-6, 1.0});
    const double floor = cn::min_eigenvalue(f.coefficients(1e-6));
    EXPECT_GE(floor, -1e-10);
    EXPECT_NEAR(floor, 1e-6, 1e-12);
}

TEST(NQubitFamily, OddSizesAcceptedAndSmallRejected) {
    EXPECT_NO_THROW(cn::build_n_qubit(5, {1e-3, 1.0}));
    EXPECT_THROW(cn::build_n_qubit(1, {1e-3, 1.0}), cn::InvalidArgument);
}

TEST(Families, PositiveSemidefiniteOnSixteenPointGrid) {
    const cn::Interval dom{1e-6, 1.0};
    std::vector<cn::DephasingFamily> fams{cn::build_single_qubit(dom), cn::build_two_qubit(dom)};
    for (int n = 2; n <= 8; ++n) {
        fams.push_back(cn::build_n_qubit(n, dom));
    }
    for (const auto &f : fams) {
        for (int k = 0; k < 16; ++k) {
            const double xi = dom.lo + (dom.hi - dom.lo) * k / 15.0;
            EXPECT_GE(cn::min_eigenvalue(f.coefficients(xi)), -1e-10);
        }
    }
}

TEST(DephasingFamily, ValidatesConstruction) {
    const cn::Matrix id = cn::Matrix::Identity(2, 2);
    EXPECT_THROW(cn::DephasingFamily(2, 0.0, id, id, {0.1, 1.0}), cn::InvalidArgument);
    EXPECT_THROW(cn::DephasingFamily(2, 1.0, cn::Matrix::Identity(3, 3), id, {0.1, 1.0}),
                 cn::InvalidArgument);
    cn::Matrix skew = cn::Matrix::Zero(2, 2);
    skew(0, 1) = 1.0;
    EXPECT_THROW(cn::DephasingFamily(2, 1.0, id, skew, {0.1, 1.0}), cn::InvalidArgument);
    // C(xi) = I - xi * I is not PSD at xi = 2.
    EXPECT_THROW(cn::DephasingFamily(2, 1.0, id, -id, {0.1, 2.0}), cn::InvalidArgument);
}

TEST(DephasingFamily, DomainCheckNamesValue) {
    const auto f = cn::build_two_qubit({0.1, 1.0});
    try {
        f.require_in_domain(0.05, "probe");
        FAIL() << "expected an exception";
    } catch (const cn::InvalidArgument &e) {
        EXPECT_NE(std::string(e.what()).find("0.05"), std::string::npos);
    }
}

TEST(DephasingFamily, AcceptsComplexHermitian) {
    cn::Matrix c0 = cn::Matrix::Identity(2, 2);
    c0(0, 1) = cn::Complex(0.0, 0.5);
    c0(1, 0) = cn::Complex(0.0, -0.5);
    EXPECT_NO_THROW(cn::DephasingFamily(2, 1.0, c0, cn::Matrix::Identity(2, 2), {0.0, 1.0}));
}

TEST(SpectralIngestion, HalfGammaIdentityGivesIdentity) {
    const double gamma = 2.5;
    const cn::SpectralData d{2, 0.5 * gamma * cn::Matrix::Identity(2, 2), gamma};
    const auto f = cn::from_spectral_density(d);
    EXPECT_LT(max_diff(f.c0(), cn::Matrix::Identity(2, 2)), 1e-15);
    EXPECT_FALSE(f.depends_on_xi());
    EXPECT_TRUE(f.xi_domain().degenerate());
}

TEST(SpectralIngestion, AllOnesGivesTwoQubitAtZero) {
    const cn::SpectralData d{2, 0.5 * cn::Matrix::Ones(2, 2), 1.0};
    const auto f = cn::from_spectral_density(d);
    const auto two = cn::build_two_qubit({1e-4, 1.0});
    EXPECT_LT(max_diff(f.c0(), two.c0()), 1e-15);
}

TEST(SpectralIngestion, RejectsNegativeEigenvalue) {
    cn::Matrix s = cn::Matrix::Identity(2, 2);
    s(1, 1) = -1e-3;
    EXPECT_THROW(cn::from_spectral_density({2, s, 1.0}), cn::InvalidArgument);
}

TEST(SpectralIngestion, RoundTripsRandomPsdMatrices) {
    for (int seed = 0; seed < 10; ++seed) {
        cn::CounterRng rng(static_cast<std::uint64_t>(seed));
        const cn::Matrix c = 3.0 * cn::random_mixed_state(2, rng).matrix().topLeftCorner(3, 3);
        const double gamma = 0.7 + seed;
        const auto f = cn::from_spectral_density({3, 0.5 * gamma * c, gamma});
        EXPECT_LT(max_diff(f.c0(), c), 1e-12);
    }
}

TEST(WithPerturbation, ReconstructsTwoQubitFamily) {
    const auto base = cn::from_spectral_density({2, 0.5 * cn::Matrix::Ones(2, 2), 1.0});
    const cn::Matrix dc = cn::Matrix::Identity(2, 2) - cn::Matrix::Ones(2, 2);
    const auto f = cn::with_perturbation(base, dc, {1e-4, 1.0});
    const auto two = cn::build_two_qubit({1e-4, 1.0});
    for (double xi : {1e-4, 0.3, 1.0}) {
        EXPECT_LT(max_diff(f.coefficients(xi), two.coefficients(xi)), 1e-15);
    }
}

TEST(WithPerturbation, RejectsNonHermitianAndNonPsd) {
    const auto base = cn::build_two_qubit({1e-4, 1.0});
    cn::Matrix skew = cn::Matrix::Zero(2, 2);
    skew(0, 1) = 1.0;
    EXPECT_THROW(cn::with_perturbation(base, skew, {1e-4, 1.0}), cn::InvalidArgument);
    try {
        (void)cn::with_perturbation(base, -cn::Matrix::Ones(2, 2), {0.0, 2.0});
        FAIL() << "expected PSD violation";
    } catch (const cn::InvalidArgument &e) {
        EXPECT_NE(std::string(e.what()).find("xi ="), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("min eigenvalue"), std::string::npos);
    }
}

TEST(SpectralCsv, ParsesUpperTriangle) {
    std::istringstream in("# comment\nj,l,re,im\n0,0,0.5,0\n0,1,0.25,0.1\n\n1,1,0.5,0\n");
    const auto d = cn::parse_spectral_csv(in, 1.0);
    EXPECT_EQ(d.n_qubits, 2);
    EXPECT_EQ(d.s_zero(0, 1), cn::Complex(0.25, 0.1));
    EXPECT_EQ(d.s_zero(1, 0), cn::Complex(0.25, -0.1));
}

TEST(SpectralCsv, ExplicitQubitCountAndMissingEntries) {
    std::istringstream in("j,l,re,im\n0,0,1,0\n");
    const auto d = cn::parse_spectral_csv(in, 1.0, 3);
    EXPECT_EQ(d.n_qubits, 3);
    EXPECT_EQ(d.s_zero(2, 2), cn::Complex(0.0, 0.0));
}

TEST(SpectralCsv, RejectsMalformedInput) {
    const std::vector<std::string> bad{
        "i,j,re,im\n0,0,1,0\n",      // header
        "j,l,re,im\n1,0,1,0\n",      // below diagonal
        "j,l,re,im\n0,0,1,0\n0,0,2,0\n", // duplicate
        "j,l,re,im\n0,0,abc,0\n",    // number
        "j,l,re,im\n0,0,1\n",        // field count
        "j,l,re,im\n-1,0,1,0\n",     // negative index
        "",                          // empty
    };
    for (const auto &text : bad) {
        std::istringstream in(text);
        EXPECT_THROW((void)cn::parse_spectral_csv(in, 1.0), cn::InvalidArgument) << text;
    }
    std::istringstream range("j,l,re,im\n0,3,1,0\n");
    EXPECT_THROW((void)cn::parse_spectral_csv(range, 1.0, 2), cn::InvalidArgument);
}
