#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "bicwave/model.hpp"

namespace bicwave {

/**
 * Brute-force verification path: discretize the photon continuum on a uniform
 * momentum box, diagonalize the full single-excitation Hamiltonian, and pull
 * out near-bound candidates. Entirely independent of the propagator route.
 *
 *   H = [ eps I_n      C      ]     C_{j,i} = F(k_i) e^{-i j k_i d} sqrt(dk)
 *       [ C^dagger   diag(w_i)]     (j zero-based; w_i = omega(k_i))
 *
 * The sqrt(dk) weights give the standard continuum limit as N_k -> inf.
 */

struct DiscretizedHamiltonian {
    int n = 0;
    Eigen::VectorXd k_grid;
    double dk = 0.0;
    Eigen::MatrixXcd matrix;
};

inline DiscretizedHamiltonian build_hamiltonian(const WaveguideModel& model,
                                                const EmitterArray& array, double K, int N_k) {
    if (!(K > 0.0)) throw DomainError("build_hamiltonian: K must be > 0");
    if (N_k < 2) throw DomainError("build_hamiltonian: N_k must be >= 2");
    if (array.n + N_k > 20000)
        throw SizeError("build_hamiltonian: n + N_k exceeds the 20000 dense limit");

    DiscretizedHamiltonian h;
    h.n = array.n;
    h.k_grid.resize(N_k);
    h.dk = 2.0 * K / (N_k - 1);
    for (int i = 0; i < N_k; ++i) h.k_grid(i) = -K + i * h.dk;

    const int dim = array.n + N_k;
    h.matrix = Eigen::MatrixXcd::Zero(dim, dim);
    for (int j = 0; j < array.n; ++j) h.matrix(j, j) = array.epsilon;
    const double root_dk = std::sqrt(h.dk);
    for (int i = 0; i < N_k; ++i) {
        const double k = h.k_grid(i);
        h.matrix(array.n + i, array.n + i) = model.omega(k);
        const double F = model.form_factor(k);
        for (int j = 0; j < array.n; ++j) {
            const Complex c = F * std::polar(1.0, -j * k * array.d) * root_dk;
            h.matrix(array.n + i, j) = std::conj(c);
            h.matrix(j, array.n + i) = c;
        }
    }
    return h;
}

struct BicCandidate {
    double energy = 0.0;
    Eigen::VectorXcd emitter_amplitudes; // emitter sector of the unit eigenvector
    Eigen::VectorXcd field_coeffs;       // momentum-space field sector
    double emitter_weight = 0.0;         // sum |a|^2
    double field_weight = 0.0;           // 1 - emitter weight
};

/// All eigenstates with energy inside the window, sorted by emitter weight (descending).
inline std::vector<BicCandidate> find_bic_candidates(const DiscretizedHamiltonian& ham,
                                                     std::pair<double, double> window) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(ham.matrix);
    if (solver.info() != Eigen::Success)
        throw EigensolverError("find_bic_candidates: Hermitian eigensolver failed");
    std::vector<BicCandidate> out;
    const int dim = static_cast<int>(ham.matrix.rows());
    for (int i = 0; i < dim; ++i) {
        const double E = solver.eigenvalues()(i);
        if (E < window.first || E > window.second) continue;
        BicCandidate c;
        c.energy = E;
        c.emitter_amplitudes = solver.eigenvectors().col(i).head(ham.n);
        c.field_coeffs = solver.eigenvectors().col(i).tail(dim - ham.n);
        c.emitter_weight = c.emitter_amplitudes.squaredNorm();
        c.field_weight = 1.0 - c.emitter_weight;
        out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end(),
              [](const BicCandidate& a, const BicCandidate& b) {
                  return a.emitter_weight > b.emitter_weight;
              });
    return out;
}

/// The window state maximizing emitter-sector weight.
inline BicCandidate find_bic_candidate(const DiscretizedHamiltonian& ham, double E_target,
                                       std::pair<double, double> window) {
    std::vector<BicCandidate> all = find_bic_candidates(ham, window);
    if (all.empty())
        throw NotFoundError("find_bic_candidate: no eigenstate in window around E_target=" +
                            std::to_string(E_target));
    return all.front();
}

/// Position-space field reconstructed from the momentum coefficients.
inline Complex field_at(const DiscretizedHamiltonian& ham, const Eigen::VectorXcd& field_coeffs,
                        double x) {
    Complex acc(0.0, 0.0);
    for (int i = 0; i < ham.k_grid.size(); ++i)
        acc += field_coeffs(i) * std::polar(1.0, ham.k_grid(i) * x);
    return acc * std::sqrt(ham.dk / (2.0 * M_PI));
}

} // namespace bicwave
