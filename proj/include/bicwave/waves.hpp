#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <tuple>
#include <vector>

#include "bicwave/model.hpp"
#include "bicwave/selfenergy.hpp"

namespace bicwave {

/**
 * Excitation waves: the closed-form spectrum of the nearest-neighbor adjacency
 * matrix Delta_n, the resonant matrix A(theta, b) whose eigenproblem encodes
 * the propagator kernel, and the exact/deformed/superradiant classification.
 */

enum class WaveKind { Exact, Deformed, Superradiant };
enum class Parity { Symmetric, Antisymmetric };

inline const char* to_string(WaveKind k) {
    switch (k) {
        case WaveKind::Exact: return "exact";
        case WaveKind::Deformed: return "deformed";
        case WaveKind::Superradiant: return "superradiant";
    }
    return "?";
}

inline const char* to_string(Parity p) {
    return p == Parity::Symmetric ? "symmetric" : "antisymmetric";
}

struct ExcitationWave {
    int j = 0;                       // frequency index, 1..n
    Eigen::VectorXcd amplitudes;     // unit norm, first nonzero component positive real
    Complex chi{0.0, 0.0};           // eigenvalue of A (or 2cos(j pi/(n+1)) scaled view)
    WaveKind kind = WaveKind::Exact;
    Parity parity = Parity::Symmetric;
    Complex resonance_overlap{0.0, 0.0}; // u_nu . amplitudes
    double deformation_norm = 0.0;       // || amplitudes - a^{(j)} ||
    double re_chi_over_b1 = 0.0;         // diagnostic: Re(chi)/b1, ~ -chi^{(j)}
    double parity_residual = 0.0;        // pre-purification deviation from definite parity
};

struct WaveCatalog {
    int n = 0;
    int nu = 0;
    double b1 = 0.0;
    std::vector<ExcitationWave> waves;   // ordered by j = 1..n
    std::vector<double> epsilon_values;  // required epsilon per wave (NaN for superradiant)
};

/// Adjacency matrix of the open chain: ones on the first off-diagonals.
inline Eigen::MatrixXd delta_matrix(int n) {
    if (n < 1) throw DomainError("delta_matrix: n must be >= 1");
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) {
        D(i, i + 1) = 1.0;
        D(i + 1, i) = 1.0;
    }
    return D;
}

namespace detail {

/// sin(pi * num / den) with exact integer reduction to the first quadrant, so
/// mirror-symmetric components come out bit-identical.
inline double sin_pi_ratio(std::int64_t num, std::int64_t den) {
    std::int64_t r = num % (2 * den);
    if (r < 0) r += 2 * den;
    double sign = 1.0;
    if (r > den) {
        sign = -1.0;
        r -= den;
    }
    r = std::min(r, den - r);
    return sign * std::sin(M_PI * static_cast<double>(r) / static_cast<double>(den));
}

} // namespace detail

struct DeltaSpectrum {
    Eigen::VectorXd chi;      // chi^{(j)} = 2 cos(j pi/(n+1)), decreasing in j
    Eigen::MatrixXd vectors;  // column j-1 holds a^{(j)}, unit norm
};

/// Closed-form eigensystem of Delta_n: a^{(j)}_l = sin(j l pi/(n+1)) / sqrt((n+1)/2).
inline DeltaSpectrum delta_spectrum(int n) {
    if (n < 1) throw DomainError("delta_spectrum: n must be >= 1");
    DeltaSpectrum s;
    s.chi.resize(n);
    s.vectors.resize(n, n);
    const double norm = std::sqrt(2.0 / (n + 1));
    for (int j = 1; j <= n; ++j) {
        s.chi(j - 1) = 2.0 * std::cos(j * M_PI / (n + 1));
        for (int l = 1; l <= n; ++l)
            s.vectors(l - 1, j - 1) =
                norm * detail::sin_pi_ratio(static_cast<std::int64_t>(j) * l, n + 1);
    }
    return s;
}

/// u_nu = (1, (-1)^nu, 1, ...): the resonant coupling direction.
inline Eigen::VectorXd u_vector(int nu, int n) {
    Eigen::VectorXd u(n);
    for (int l = 0; l < n; ++l) u(l) = (nu % 2 != 0 && l % 2 != 0) ? -1.0 : 1.0;
    return u;
}

/**
 * A_{jl}(theta, b) = i on the diagonal, i e^{i|j-l| theta} - b_{|j-l|} off it.
 * When theta is an integer multiple of pi the phases are evaluated as exact
 * signs, so A(nu pi, (b1,0,...)) == i u u^T - b1 Delta_n holds elementwise.
 */
inline Eigen::MatrixXcd a_matrix(double theta, const std::vector<double>& b, int n) {
    if (n < 1) throw DomainError("a_matrix: n must be >= 1");
    const double ratio = theta / M_PI;
    const bool at_resonance = std::abs(ratio - std::round(ratio)) < 1e-12;
    const bool odd_pi = at_resonance && (static_cast<std::int64_t>(std::llround(ratio)) % 2 != 0);
    Eigen::MatrixXcd A(n, n);
    const Complex I(0.0, 1.0);
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
            const int mu = std::abs(j - l);
            if (mu == 0) {
                A(j, l) = I;
                continue;
            }
            Complex phase = at_resonance ? Complex((odd_pi && mu % 2 != 0) ? -1.0 : 1.0, 0.0)
                                         : std::polar(1.0, mu * theta);
            const double bmu = (mu - 1 < static_cast<int>(b.size())) ? b[mu - 1] : 0.0;
            A(j, l) = I * phase - bmu;
        }
    return A;
}

/// Mirror parity of an amplitude vector; tolerance 1e-8 on the unit sphere.
inline Parity parity_of(const Eigen::VectorXcd& a, double tol = 1e-8) {
    const int n = static_cast<int>(a.size());
    const double norm = a.norm();
    double dsym = 0.0, dasym = 0.0;
    for (int l = 0; l < n; ++l) {
        dsym += std::norm(a(l) - a(n - 1 - l));
        dasym += std::norm(a(l) + a(n - 1 - l));
    }
    dsym = std::sqrt(dsym);
    dasym = std::sqrt(dasym);
    if (dsym <= tol * norm) return Parity::Symmetric;
    if (dasym <= tol * norm) return Parity::Antisymmetric;
    throw ParityError("parity_of: no definite parity (likely degenerate eigenvalue); residual " +
                      std::to_string(std::min(dsym, dasym) / norm));
}

/// Expected classification from the parity rules of Table 2.
inline WaveKind expected_kind(int n, int nu, int j) {
    const int super_j = (nu % 2 == 0) ? 1 : n;
    if (j == super_j) return WaveKind::Superradiant;
    const bool exact = (n % 2 == 0) ? (j % 2 == nu % 2) : (j % 2 == 0);
    return exact ? WaveKind::Exact : WaveKind::Deformed;
}

namespace detail {

inline void canonical_sign(Eigen::VectorXcd& v) {
    for (int l = 0; l < v.size(); ++l) {
        if (std::abs(v(l)) > 1e-10) {
            v *= std::abs(v(l)) / v(l);
            return;
        }
    }
}

/// Project onto the dominant mirror-parity component; valid because [A, J] = 0
/// exactly, so eigenvectors of simple eigenvalues carry definite parity and the
/// projection only strips eigensolver noise. Returns the stripped residual.
inline double purify_parity(Eigen::VectorXcd& v) {
    const int n = static_cast<int>(v.size());
    Eigen::VectorXcd jv(n);
    for (int l = 0; l < n; ++l) jv(l) = v(n - 1 - l);
    const double plus = (v + jv).norm();
    const double minus = (v - jv).norm();
    Eigen::VectorXcd pure = (plus >= minus) ? Eigen::VectorXcd(v + jv) : Eigen::VectorXcd(v - jv);
    const double residual = std::min(plus, minus) / 2.0;
    if (pure.norm() < 0.5 * v.norm()) return residual; // ambiguous; keep v untouched
    v = pure / pure.norm();
    return residual;
}

} // namespace detail

/**
 * Dense eigensolve of A(nu pi, (b1, 0, ...)) and bijective matching of its
 * eigenvectors to the excitation waves a^{(j)} by maximal overlap (greedy,
 * descending; ties broken by lower j). Classification per Table 2:
 * superradiant by Im(chi) > n/2, exact by u_nu . a^{(j)} = 0.
 */
inline WaveCatalog classify_waves(int n, int nu, double b1) {
    if (n < 2) throw DomainError("classify_waves: n must be >= 2");
    if (n > 500) throw SizeError("classify_waves: dense eigensolve limited to n <= 500");
    if (b1 == 0.0) throw DomainError("classify_waves: b1 must be nonzero");
    if (std::abs(b1) > 0.1)
        throw DomainError("classify_waves: |b1| <= 0.1 (nearest-neighbor regime)");
    if (nu < 0) throw DomainError("classify_waves: nu must be >= 0");

    const DeltaSpectrum spec = delta_spectrum(n);
    const Eigen::VectorXd u = u_vector(nu, n);
    const Eigen::MatrixXcd A = a_matrix(nu * M_PI, {b1}, n);

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(A);
    if (solver.info() != Eigen::Success)
        throw EigensolverError("classify_waves: complex eigensolver failed");
    const Eigen::VectorXcd& lambda = solver.eigenvalues();
    const Eigen::MatrixXcd& V = solver.eigenvectors();

    // overlap table |a^{(j)} . v_k|
    Eigen::MatrixXd overlap(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            overlap(j, k) = std::abs(spec.vectors.col(j).cast<Complex>().dot(V.col(k)));

    std::vector<std::tuple<double, int, int>> pairs;
    pairs.reserve(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) pairs.emplace_back(overlap(j, k), j, k);
    std::sort(pairs.begin(), pairs.end(), [](const auto& x, const auto& y) {
        if (std::get<0>(x) != std::get<0>(y)) return std::get<0>(x) > std::get<0>(y);
        if (std::get<1>(x) != std::get<1>(y)) return std::get<1>(x) < std::get<1>(y);
        return std::get<2>(x) < std::get<2>(y);
    });
    std::vector<int> match(n, -1);
    std::vector<bool> jused(n, false), kused(n, false);
    int assigned = 0;
    for (const auto& [o, j, k] : pairs) {
        if (jused[j] || kused[k]) continue;
        match[j] = k;
        jused[j] = true;
        kused[k] = true;
        if (++assigned == n) break;
    }

    WaveCatalog cat;
    cat.n = n;
    cat.nu = nu;
    cat.b1 = b1;
    cat.waves.resize(n);
    int n_super = 0, n_exact = 0, n_deformed = 0;
    for (int j = 0; j < n; ++j) {
        ExcitationWave& w = cat.waves[j];
        w.j = j + 1;
        w.chi = lambda(match[j]);
        Eigen::VectorXcd v = V.col(match[j]);
        w.parity_residual = detail::purify_parity(v);
        detail::canonical_sign(v);
        w.amplitudes = v;
        w.parity = parity_of(v);
        w.resonance_overlap = u.cast<Complex>().dot(v);
        w.re_chi_over_b1 = w.chi.real() / b1;

        const double u_dot_closed = u.dot(spec.vectors.col(j));
        const Eigen::VectorXcd closed = spec.vectors.col(j).cast<Complex>();
        const double sign = (closed.dot(v).real() >= 0.0) ? 1.0 : -1.0;
        w.deformation_norm = (v - sign * closed).norm();

        if (w.chi.imag() > 0.5 * n) {
            w.kind = WaveKind::Superradiant;
            ++n_super;
        } else if (std::abs(u_dot_closed) < 1e-12) {
            w.kind = WaveKind::Exact;
            ++n_exact;
            if (w.deformation_norm > 1e-8)
                throw ClassificationError(
                    "classify_waves: exact wave j=" + std::to_string(j + 1) +
                    " deviates from closed form by " + std::to_string(w.deformation_norm));
        } else {
            w.kind = WaveKind::Deformed;
            ++n_deformed;
        }
    }

    if (n_super != 1 || n_exact != n / 2 || n_deformed != (n + 1) / 2 - 1)
        throw ClassificationError("classify_waves: counts (super=" + std::to_string(n_super) +
                                  ", exact=" + std::to_string(n_exact) +
                                  ", deformed=" + std::to_string(n_deformed) +
                                  ") violate the catalog invariants");
    const int super_j = (nu % 2 == 0) ? 1 : n;
    if (cat.waves[super_j - 1].kind != WaveKind::Superradiant)
        throw ClassificationError("classify_waves: superradiant index is not j=" +
                                  std::to_string(super_j));
    return cat;
}

/// Physical nearest-neighbor coefficient b1 = beta_1(E_nu)/Z(E_nu).
inline double b1_physical(const WaveguideModel& model, double d, int nu,
                          const QuadratureConfig& quad = {}) {
    const double E = resonant_energy(model, d, nu);
    return beta_j(model, d, E, 1, quad) / residue_weight_Z(model, E);
}

/**
 * Excitation energy switching on the (nu, j) BIC:
 *   epsilon = E_nu - beta_0(E_nu) - beta_1(E_nu) chi^{(j)}.
 * Exact for exact waves; the same value is the approximate requirement for
 * deformed waves. Refuses the superradiant index, which is not a BIC.
 */
inline double epsilon_for_bic(const WaveguideModel& model, double d, int n, int nu, int j,
                              const QuadratureConfig& quad = {}) {
    if (j < 1 || j > n) throw DomainError("epsilon_for_bic: j out of range");
    if (expected_kind(n, nu, j) == WaveKind::Superradiant)
        throw DomainError("epsilon_for_bic: (nu=" + std::to_string(nu) + ", j=" + std::to_string(j) +
                          ") is the superradiant index, not a BIC");
    const double E = resonant_energy(model, d, nu);
    const double chi = 2.0 * std::cos(j * M_PI / (n + 1));
    return E - beta_j(model, d, E, 0, quad) - beta_j(model, d, E, 1, quad) * chi;
}

/// Fill catalog.epsilon_values from the physical selection rule (NaN for the superradiant wave).
inline void attach_epsilons(WaveCatalog& cat, const WaveguideModel& model, double d,
                            const QuadratureConfig& quad = {}) {
    const double E = resonant_energy(model, d, cat.nu);
    const double b0 = beta_j(model, d, E, 0, quad);
    const double b1 = beta_j(model, d, E, 1, quad);
    cat.epsilon_values.assign(cat.waves.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < cat.waves.size(); ++i) {
        if (cat.waves[i].kind == WaveKind::Superradiant) continue;
        const double chi = 2.0 * std::cos(cat.waves[i].j * M_PI / (cat.n + 1));
        cat.epsilon_values[i] = E - b0 - b1 * chi;
    }
}

} // namespace bicwave
