#pragma once

// Dephasing coefficient families C(xi) = C0 + xi * dC for N qubits, the
// three built-in families, and ingestion of zero-frequency spectral
// densities.

#include "corrnoise/core.hpp"
#include "corrnoise/linalg.hpp"

#include <array>
#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace corrnoise {

inline std::string format_double(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

/// Immutable linear family of dephasing coefficient matrices.
///
/// Construction validates Hermiticity of both matrices, gamma > 0, and
/// positive semidefiniteness of C(xi) at the domain endpoints and midpoint.
class DephasingFamily {
  public:
    DephasingFamily(int n_qubits, double gamma, Matrix c0, Matrix delta_c, Interval xi_domain)
        : n_qubits_(n_qubits), gamma_(gamma), c0_(std::move(c0)), delta_c_(std::move(delta_c)),
          xi_domain_(xi_domain) {
        validate();
    }

    [[nodiscard]] int n_qubits() const { return n_qubits_; }
    [[nodiscard]] double gamma() const { return gamma_; }
    [[nodiscard]] const Matrix &c0() const { return c0_; }
    [[nodiscard]] const Matrix &delta_c() const { return delta_c_; }
    [[nodiscard]] Interval xi_domain() const { return xi_domain_; }

    [[nodiscard]] Matrix coefficients(double xi) const { return c0_ + xi * delta_c_; }

    [[nodiscard]] bool depends_on_xi() const { return delta_c_.cwiseAbs().maxCoeff() > 0.0; }

    void require_in_domain(double xi, const char *what) const {
        if (!xi_domain_.contains(xi)) {
            throw InvalidArgument(std::string(what) + ": xi = " + format_double(xi) +
                                  " outside domain [" + format_double(xi_domain_.lo) + ", " +
                                  format_double(xi_domain_.hi) + "]");
        }
    }

  private:
    void validate() const {
        if (n_qubits_ < 1) {
            throw InvalidArgument("DephasingFamily: n_qubits must be positive");
        }
        if (!(gamma_ > 0.0) || !std::isfinite(gamma_)) {
            throw InvalidArgument("DephasingFamily: gamma must be positive, got " +
                                  format_double(gamma_));
        }
        const auto n = static_cast<Eigen::Index>(n_qubits_);
        if (c0_.rows() != n || c0_.cols() != n || delta_c_.rows() != n || delta_c_.cols() != n) {
            throw InvalidArgument("DephasingFamily: coefficient matrices must be " +
                                  std::to_string(n_qubits_) + "x" + std::to_string(n_qubits_));
        }
        if (xi_domain_.lo > xi_domain_.hi) {
            throw InvalidArgument("DephasingFamily: empty xi domain");
        }
        if (hermitian_deviation(c0_) > kHermitianTol) {
            throw InvalidArgument("DephasingFamily: c0 is not Hermitian (deviation " +
                                  format_double(hermitian_deviation(c0_)) + ")");
        }
        if (hermitian_deviation(delta_c_) > kHermitianTol) {
            throw InvalidArgument("DephasingFamily: delta_c is not Hermitian (deviation " +
                                  format_double(hermitian_deviation(delta_c_)) + ")");
        }
        // Convexity of the eigenvalue floor is not assumed; the three sample
        // points are the declared check.
        const std::array<double, 3> samples{xi_domain_.lo, xi_domain_.midpoint(), xi_domain_.hi};
        for (double xi : samples) {
            const double floor = min_eigenvalue(coefficients(xi));
            if (floor < -kPsdTol) {
                throw InvalidArgument("DephasingFamily: C(xi) not positive semidefinite at xi = " +
                                      format_double(xi) + " (min eigenvalue " +
                                      format_double(floor) + ")");
            }
        }
    }

    int n_qubits_;
    double gamma_;
    Matrix c0_;
    Matrix delta_c_;
    Interval xi_domain_;
};

/// Zero-frequency spectral densities S_jl[w -> 0] and the chosen rate scale.
struct SpectralData {
    int n_qubits = 0;
    Matrix s_zero;
    double gamma_ref = 1.0;
};

namespace detail {

inline void require_positive_domain(Interval d, double upper, const char *who) {
    if (!(d.lo > 0.0) || !(d.lo < d.hi) || d.hi > upper) {
        throw InvalidArgument(std::string(who) + ": xi domain must satisfy 0 < lo < hi <= " +
                              format_double(upper) + ", got [" + format_double(d.lo) + ", " +
                              format_double(d.hi) + "]");
    }
}

} // namespace detail

/// C(xi) = [xi]. The domain must exclude xi <= 0, where the QFI diverges.
[[nodiscard]] inline DephasingFamily build_single_qubit(Interval xi_domain, double gamma = 1.0) {
    detail::require_positive_domain(xi_domain, INFINITY, "build_single_qubit");
    return {1, gamma, Matrix::Zero(1, 1), Matrix::Ones(1, 1), xi_domain};
}

/// C_jl(xi) = 1 - xi (1 - delta_jl): nearly maximally correlated pair.
[[nodiscard]] inline DephasingFamily build_two_qubit(Interval xi_domain, double gamma = 1.0) {
    detail::require_positive_domain(xi_domain, 1.0, "build_two_qubit");
    const Matrix ones = Matrix::Ones(2, 2);
    return {2, gamma, ones, -(ones - Matrix::Identity(2, 2)), xi_domain};
}

/// C_jl(xi) = delta_jl - (1 - xi) / n: every collective mode except the
/// uniform one dephases at full strength; the uniform mode at strength xi.
/// Odd n is accepted.
[[nodiscard]] inline DephasingFamily build_n_qubit(int n, Interval xi_domain, double gamma = 1.0) {
    if (n < 2) {
        throw InvalidArgument("build_n_qubit: n must be >= 2, got " + std::to_string(n));
    }
    detail::require_positive_domain(xi_domain, 1.0, "build_n_qubit");
    const Matrix uniform = Matrix::Constant(n, n, Complex(1.0 / n, 0.0));
    return {n, gamma, Matrix::Identity(n, n) - uniform, uniform, xi_domain};
}

/// C = (2 / gamma_ref) S(0). The result is a fixed channel (delta_c = 0,
/// degenerate domain at 0); attach a perturbation with with_perturbation.
[[nodiscard]] inline DephasingFamily from_spectral_density(const SpectralData &data) {
    if (data.n_qubits < 1) {
        throw InvalidArgument("from_spectral_density: n_qubits must be positive");
    }
    const auto n = static_cast<Eigen::Index>(data.n_qubits);
    if (data.s_zero.rows() != n || data.s_zero.cols() != n) {
        throw InvalidArgument("from_spectral_density: s_zero has wrong shape");
    }
    if (!(data.gamma_ref > 0.0)) {
        throw InvalidArgument("from_spectral_density: gamma_ref must be positive");
    }
    const double dev = hermitian_deviation(data.s_zero);
    if (dev > kPsdTol) {
        throw InvalidArgument("from_spectral_density: spectral matrix is not Hermitian (deviation " +
                              format_double(dev) + ")");
    }
    const double floor = min_eigenvalue(data.s_zero);
    if (floor < -kPsdTol) {
        throw InvalidArgument(
            "from_spectral_density: spectral matrix not positive semidefinite (min eigenvalue " +
            format_double(floor) + ")");
    }
    const Matrix herm = 0.5 * (data.s_zero + data.s_zero.adjoint());
    return {data.n_qubits, data.gamma_ref, (2.0 / data.gamma_ref) * herm, Matrix::Zero(n, n),
            Interval{0.0, 0.0}};
}

/// Same c0 and gamma with a new perturbation direction and domain.
[[nodiscard]] inline DephasingFamily with_perturbation(const DephasingFamily &family,
                                                       const Matrix &delta_c, Interval xi_domain) {
    return {family.n_qubits(), family.gamma(), family.c0(), delta_c, xi_domain};
}

/// Parses the spectral-density CSV: header `j,l,re,im`, 0-based indices,
/// upper triangle only (j <= l). Unlisted entries are zero. When n_qubits
/// is not given it is inferred as the largest index + 1.
[[nodiscard]] inline SpectralData parse_spectral_csv(std::istream &in, double gamma_ref,
                                                     std::optional<int> n_qubits = std::nullopt) {
    std::string line;
    std::size_t line_no = 0;
    auto fail = [&](const std::string &msg) -> InvalidArgument {
        return InvalidArgument("spectral csv line " + std::to_string(line_no) + ": " + msg);
    };
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };

    bool header_seen = false;
    std::map<std::pair<int, int>, Complex> entries;
    int max_index = -1;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) {
            fields.push_back(trim(field));
        }
        if (!header_seen) {
            if (fields != std::vector<std::string>{"j", "l", "re", "im"}) {
                throw fail("expected header 'j,l,re,im'");
            }
            header_seen = true;
            continue;
        }
        if (fields.size() != 4) {
            throw fail("expected 4 fields, got " + std::to_string(fields.size()));
        }
        int j = 0;
        int l = 0;
        double re = 0.0;
        double im = 0.0;
        try {
            std::size_t pos = 0;
            j = std::stoi(fields[0], &pos);
            if (pos != fields[0].size()) throw std::invalid_argument("j");
            l = std::stoi(fields[1], &pos);
            if (pos != fields[1].size()) throw std::invalid_argument("l");
            re = std::stod(fields[2], &pos);
            if (pos != fields[2].size()) throw std::invalid_argument("re");
            im = std::stod(fields[3], &pos);
            if (pos != fields[3].size()) throw std::invalid_argument("im");
        } catch (const std::exception &) {
            throw fail("malformed number");
        }
        if (j < 0 || l < 0) {
            throw fail("negative index");
        }
        if (j > l) {
            throw fail("row below the diagonal (j > l)");
        }
        if (!entries.emplace(std::pair{j, l}, Complex(re, im)).second) {
            throw fail("duplicate entry (" + std::to_string(j) + "," + std::to_string(l) + ")");
        }
        max_index = std::max(max_index, l);
    }
    if (!header_seen) {
        throw InvalidArgument("spectral csv: missing header");
    }
    const int n = n_qubits.value_or(max_index + 1);
    if (n < 1) {
        throw InvalidArgument("spectral csv: no entries and no qubit count given");
    }
    if (max_index >= n) {
        throw InvalidArgument("spectral csv: index " + std::to_string(max_index) +
                              " out of range for " + std::to_string(n) + " qubits");
    }
    SpectralData data{n, Matrix::Zero(n, n), gamma_ref};
    for (const auto &[key, value] : entries) {
        const auto [j, l] = key;
        data.s_zero(j, l) = value;
        if (j != l) {
            data.s_zero(l, j) = std::conj(value);
        }
    }
    return data;
}

} // namespace corrnoise
