#pragma once

#include <cmath>
#include <complex>

#include "bicwave/errors.hpp"

namespace bicwave {

using Complex = std::complex<double>;

enum class DispersionKind { KleinGordon };

/**
 * Massive 1D waveguide continuum in natural units (hbar = c = 1).
 *
 * Dispersion  omega(k) = sqrt(k^2 + m^2), photon mass m = omega(0) > 0.
 * Form factor F(k) = sqrt(gamma / (2 pi omega(k))), coupling gamma > 0.
 * Both are even, real on the real axis, and analytic in the strip
 * |Im kappa| < m; the principal square root extends them to the whole
 * plane minus the imaginary-axis cuts +-i[m, inf), which is what the
 * shifted-contour and rotated-tail quadratures evaluate.
 */
struct WaveguideModel {
    double m = 1.0;
    double gamma = 0.1;
    DispersionKind kind = DispersionKind::KleinGordon;

    WaveguideModel() = default;
    WaveguideModel(double mass, double coupling, DispersionKind k = DispersionKind::KleinGordon)
        : m(mass), gamma(coupling), kind(k) {
        if (!(m > 0.0)) throw DomainError("WaveguideModel: m must be > 0");
        if (!(gamma > 0.0)) throw DomainError("WaveguideModel: gamma must be > 0");
    }

    double omega(double k) const { return std::hypot(k, m); }

    /// d omega / dk; strictly positive for k > 0.
    double omega_prime(double k) const { return k / omega(k); }

    /// Analytic continuation of omega. Exact on the real axis by construction.
    Complex omega_cont(Complex kappa) const {
        check_branch_point(kappa);
        return omega_cont_raw(kappa);
    }

    /// Continuation without the branch-point guard. Quadratures that integrate
    /// through the integrable ~1/sqrt singularity at +-i m evaluate this at
    /// points arbitrarily close to the branch point; all values stay finite
    /// because the nodes never coincide with it.
    Complex omega_cont_raw(Complex kappa) const {
        if (kappa.imag() == 0.0) return Complex(omega(kappa.real()), 0.0);
        return std::sqrt(kappa * kappa + m * m);
    }

    double form_factor(double k) const { return std::sqrt(gamma / (2.0 * M_PI * omega(k))); }

    Complex form_factor_cont(Complex kappa) const {
        return std::sqrt(gamma / (2.0 * M_PI * omega_cont(kappa)));
    }

    /// f(kappa) = F(kappa)^2 = gamma / (2 pi omega(kappa)); the self-energy kernel.
    Complex f_cont(Complex kappa) const { return gamma / (2.0 * M_PI * omega_cont(kappa)); }

    double f(double k) const { return gamma / (2.0 * M_PI * omega(k)); }

  private:
    void check_branch_point(Complex kappa) const {
        if (std::abs(kappa - Complex(0.0, m)) <= 1e-14 ||
            std::abs(kappa + Complex(0.0, m)) <= 1e-14)
            throw BranchPointError("omega_cont: kappa at branch point +-i m");
    }
};

/// Equally spaced chain of two-level emitters; positions x_j = (j-1) d.
struct EmitterArray {
    int n = 1;
    double d = 1.0;
    double epsilon = 1.0;

    EmitterArray() = default;
    EmitterArray(int n_emitters, double spacing, double excitation_energy)
        : n(n_emitters), d(spacing), epsilon(excitation_energy) {
        if (n < 1) throw DomainError("EmitterArray: n must be >= 1");
        if (!(d > 0.0)) throw DomainError("EmitterArray: d must be > 0");
    }

    double position(int j) const { return (j - 1) * d; }
};

/// Momentum of a propagating photon with energy E; the positive root of omega(k) = E.
inline double k_of_E(const WaveguideModel& model, double E) {
    if (!(E > model.m)) throw DomainError("k_of_E: E must exceed the mass threshold m");
    return std::sqrt((E - model.m) * (E + model.m));
}

/// E_nu = omega(nu pi / d): spacing equals nu half-wavelengths.
inline double resonant_energy(const WaveguideModel& model, double d, int nu) {
    if (!(d > 0.0)) throw DomainError("resonant_energy: d must be > 0");
    if (nu < 0) throw DomainError("resonant_energy: nu must be >= 0");
    return model.omega(nu * M_PI / d);
}

/// Residue weight Z(E) = 2 pi f(k(E)) / omega'(k(E)); Klein-Gordon closed form gamma/k(E).
inline double residue_weight_Z(const WaveguideModel& model, double E) {
    const double k = k_of_E(model, E);
    return 2.0 * M_PI * model.f(k) / model.omega_prime(k);
}

/// Field weight W(E) = sqrt(2 pi) F(k(E)) / omega'(k(E)); Klein-Gordon closed form sqrt(gamma E)/k(E).
inline double field_weight_W(const WaveguideModel& model, double E) {
    const double k = k_of_E(model, E);
    return std::sqrt(2.0 * M_PI) * model.form_factor(k) / model.omega_prime(k);
}

} // namespace bicwave
