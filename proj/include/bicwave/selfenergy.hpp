#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

#include "bicwave/model.hpp"
#include "bicwave/quadrature.hpp"

namespace bicwave {

/**
 * Evanescent couplings beta_j(E), the self-energy Sigma(E+i0) and the inverse
 * propagator G^{-1}(E) = (eps - E) I + Sigma(E+i0).
 *
 * Two independent evaluation routes are provided:
 *   sigma_contour : residue + shifted-line contour (beta_j along Im kappa = m),
 *   sigma_pv      : principal value on the real axis with explicit pole
 *                   subtraction plus the on-shell delta term.
 * They must agree; the second serves as the oracle for the first.
 *
 * Truncation of the semi-infinite integrals is avoided entirely: beyond the
 * split point K the contour is rotated to a vertical line (rotated_tail), so
 * the only error budget is quadrature error.
 */

struct BetaEval {
    double value = 0.0;       // beta_j(E)
    double im_residual = 0.0; // |Im| of the raw line integral; must sit at quadrature noise
    double quad_error = 0.0;
    long evals = 0;
};

namespace detail {

inline double default_k_split(const WaveguideModel& model, double d, double E) {
    const double kE = k_of_E(model, E);
    double K = std::max({10.0 * model.m, 10.0 / d, 2.0 * kE + model.m});
    return K;
}

/**
 * Int_R kernel(k + i m) e^{i lam k} dk along the shifted line, lam >= 0.
 * Branch-point singularity at k = 0 removed by k = t^2 on [0, kc]; the two
 * half-lines are quadratured independently (so Im of the result measures the
 * strip symmetry numerically); beyond +-K the contour is rotated vertically.
 */
template <typename Kernel>
QuadResult shifted_line_integral(Kernel&& kernel, double m, double kc, double K, double lam,
                                 const QuadratureConfig& quad) {
    const std::complex<double> I(0.0, 1.0);
    auto g = [&](double k) { return kernel(std::complex<double>(k, m)) * std::exp(I * lam * k); };
    const double seg_tol = quad.abs_tol / 6.0;
    QuadResult total;
    for (double side : {1.0, -1.0}) {
        auto gs = [&](double k) { return g(side * k); };
        auto sub = [&](double t) { return gs(t * t) * 2.0 * t; };
        total += integrate_adaptive(sub, uniform_breaks(0.0, std::sqrt(kc), std::sqrt(kc) / 8.0),
                                    seg_tol, quad.rel_tol, quad.max_refinements);
        const double osc_step = lam > 0.0 ? M_PI / lam : (K - kc);
        total += integrate_adaptive(gs, uniform_breaks(kc, K, std::min(osc_step, (K - kc) / 8.0)),
                                    seg_tol, quad.rel_tol, quad.max_refinements);
        total += rotated_tail(kernel, side * K, m, lam, seg_tol, quad.rel_tol,
                              quad.max_refinements);
    }
    return total;
}

} // namespace detail

/**
 * beta_j(E) = e^{-j m d} Int_R f(k+im) e^{i j k d} / (E - omega(k+im)) dk.
 *
 * The branch-point singularity ~1/sqrt(k) at k=0 is removed by k = t^2 on
 * [0, k_c]; both half-lines are integrated independently so the recorded
 * imaginary residual genuinely checks the strip symmetry g(-k+im) = g(k+im)*.
 */
inline BetaEval beta_eval(const WaveguideModel& model, double d, double E, int j,
                          const QuadratureConfig& quad = {}) {
    quad.validate();
    if (!(E > model.m)) throw DomainError("beta_j: requires E > m");
    if (j < 0) throw DomainError("beta_j: j must be >= 0");
    if (!(d > 0.0)) throw DomainError("beta_j: d must be > 0");

    const double m = model.m;
    const double kc = std::max(1.0 / d, m);
    const double K = quad.k_max > 0.0 ? quad.k_max : detail::default_k_split(model, d, E);
    if (K <= std::max(kc, k_of_E(model, E)))
        throw ConfigError("beta_j: k_max must exceed both k_c and k(E)");

    auto kernel = [&](std::complex<double> kappa) {
        const std::complex<double> w = model.omega_cont_raw(kappa);
        return model.gamma / (2.0 * M_PI * w) / (E - w);
    };
    QuadResult total = detail::shifted_line_integral(kernel, m, kc, K, j * d, quad);

    BetaEval out;
    const double damp = std::exp(-static_cast<double>(j) * m * d);
    out.value = damp * total.value.real();
    out.im_residual = std::abs(total.value.imag());
    out.quad_error = total.error;
    out.evals = total.evals;
    return out;
}

inline double beta_j(const WaveguideModel& model, double d, double E, int j,
                     const QuadratureConfig& quad = {}) {
    return beta_eval(model, d, E, j, quad).value;
}

struct PropagatorBundle {
    double E = 0.0;
    std::vector<double> beta;        // beta_0 .. beta_{n-1}
    std::vector<double> beta_im;     // symmetry diagnostics of the raw integrals
    double Z = 0.0;
    Eigen::MatrixXcd sigma;          // Sigma(E+i0), complex symmetric Toeplitz
    Eigen::MatrixXcd g_inv;          // (eps - E) I + Sigma
    double quad_error = 0.0;
};

namespace detail {

inline Eigen::MatrixXcd toeplitz_symmetric(const std::vector<std::complex<double>>& first_row) {
    const int n = static_cast<int>(first_row.size());
    Eigen::MatrixXcd M(n, n);
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) M(j, l) = first_row[static_cast<std::size_t>(std::abs(j - l))];
    return M;
}

} // namespace detail

/// Sigma_{jl}(E+i0) = -i Z(E) e^{i |j-l| k(E) d} + beta_{j-l}(E)  (contour route).
inline Eigen::MatrixXcd sigma_contour(const WaveguideModel& model, const EmitterArray& array,
                                      double E, const QuadratureConfig& quad = {}) {
    const double kE = k_of_E(model, E);
    const double Z = residue_weight_Z(model, E);
    std::vector<std::complex<double>> row(array.n);
    for (int mu = 0; mu < array.n; ++mu) {
        const double b = beta_j(model, array.d, E, mu, quad);
        row[mu] = std::complex<double>(0.0, -Z) * std::polar(1.0, mu * kE * array.d) + b;
    }
    return detail::toeplitz_symmetric(row);
}

/**
 * Oracle route: Sokhotski-Plemelj split of Sigma(E+i0) into a real-axis
 * principal value plus the on-shell delta contribution -i Z(E) cos(mu k_E d).
 *
 * The even reduction 2 PV Int_0^inf f(k) cos(mu k d)/(E - omega(k)) dk leaves a
 * single simple pole at k_E. With the Klein-Gordon factorization
 * E - omega = -(k - k_E)(k + k_E)/(E + omega) the integrand equals
 * q(k)/(k - k_E) with smooth q, and the subtracted remainder is the difference
 * quotient (q(k) - q(k_E))/(k - k_E); the subtracted term integrates to
 * q(k_E) log((k_b - k_E)/(k_E - k_a)) over the symmetric pole window.
 */
inline Eigen::MatrixXcd sigma_pv(const WaveguideModel& model, const EmitterArray& array, double E,
                                 const QuadratureConfig& quad = {}) {
    quad.validate();
    if (!(E > model.m)) throw DomainError("sigma_pv: requires E > m");
    const double d = array.d;
    const double kE = k_of_E(model, E);
    const double Z = residue_weight_Z(model, E);
    const double K = quad.k_max > 0.0 ? quad.k_max : detail::default_k_split(model, d, E);
    if (K <= kE) throw ConfigError("sigma_pv: k_max must exceed k(E)");
    const double w = 0.5 * std::min(kE, K - kE);
    const double ka = kE - w, kb = kE + w;

    auto kernel = [&](std::complex<double> kappa) {
        const std::complex<double> w = model.omega_cont_raw(kappa);
        return model.gamma / (2.0 * M_PI * w) / (E - w);
    };

    std::vector<std::complex<double>> row(array.n);
    for (int mu = 0; mu < array.n; ++mu) {
        const double lam = mu * d;
        auto h = [&](double k) -> std::complex<double> {
            return model.f(k) * std::cos(lam * k) / (E - model.omega(k));
        };
        auto q = [&](double k) {
            return -model.f(k) * std::cos(lam * k) * (E + model.omega(k)) / (k + kE);
        };
        const double qpole = q(kE);
        auto reg = [&](double k) -> std::complex<double> {
            if (k == kE) return (q(kE + 1e-7) - q(kE - 1e-7)) / 2e-7;
            return (q(k) - qpole) / (k - kE);
        };

        const double seg_tol = quad.abs_tol / 8.0;
        const double osc = lam > 0.0 ? M_PI / lam : K;
        QuadResult acc;
        if (ka > 0.0)
            acc += integrate_adaptive(h, uniform_breaks(0.0, ka, std::min(osc, ka / 4.0)),
                                      seg_tol, quad.rel_tol, quad.max_refinements);
        std::vector<double> wb = uniform_breaks(ka, kE, std::min(osc, w / 2.0));
        std::vector<double> wb2 = uniform_breaks(kE, kb, std::min(osc, w / 2.0));
        wb.insert(wb.end(), wb2.begin() + 1, wb2.end());
        acc += integrate_adaptive(reg, wb, seg_tol, quad.rel_tol, quad.max_refinements);
        acc.value += qpole * std::log((kb - kE) / (kE - ka));
        acc += integrate_adaptive(h, uniform_breaks(kb, K, std::min(osc, (K - kb) / 4.0)),
                                  seg_tol, quad.rel_tol, quad.max_refinements);
        QuadResult tail = rotated_tail(kernel, K, 0.0, lam, seg_tol, quad.rel_tol,
                                       quad.max_refinements);
        acc.value += tail.value.real();
        acc.error += tail.error;

        row[mu] = 2.0 * acc.value.real() +
                  std::complex<double>(0.0, -Z * std::cos(lam * kE));
    }
    return detail::toeplitz_symmetric(row);
}

/// G^{-1}(E) with all bundle diagnostics; beta values are computed once and cached here.
inline PropagatorBundle propagator_inv(const WaveguideModel& model, const EmitterArray& array,
                                       double E, const QuadratureConfig& quad = {}) {
    PropagatorBundle b;
    b.E = E;
    b.Z = residue_weight_Z(model, E);
    const double kE = k_of_E(model, E);
    b.beta.resize(array.n);
    b.beta_im.resize(array.n);
    std::vector<std::complex<double>> row(array.n);
    for (int mu = 0; mu < array.n; ++mu) {
        BetaEval be = beta_eval(model, array.d, E, mu, quad);
        b.beta[mu] = be.value;
        b.beta_im[mu] = be.im_residual;
        b.quad_error += be.quad_error;
        row[mu] = std::complex<double>(0.0, -b.Z) * std::polar(1.0, mu * kE * array.d) + be.value;
    }
    b.sigma = detail::toeplitz_symmetric(row);
    b.g_inv = b.sigma;
    b.g_inv.diagonal().array() += std::complex<double>(array.epsilon - E, 0.0);
    return b;
}

/// det G^{-1}(E); diagnostic for root bracketing of exact BIC energies.
inline std::complex<double> det_residual(const PropagatorBundle& bundle) {
    return bundle.g_inv.determinant();
}

} // namespace bicwave
