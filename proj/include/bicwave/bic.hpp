#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "bicwave/waves.hpp"

namespace bicwave {

/**
 * Full BIC states: photon wavefunction xi(x) reconstructed from emitter
 * amplitudes, normalization, constraint and derivative-jump diagnostics.
 *
 *   xi(x)    = sum_l a_l xi_1(x - (l-1) d)
 *   xi_1(x)  = W(E) sin(k(E)|x|) + eta(x)
 *
 * with eta the evanescent correction, computed on the same shifted contour as
 * beta_j with F/sqrt(2 pi) in place of f.
 */

struct GridSpec {
    int per_cell = 64; // samples per lattice spacing
    double pad = 0.0;  // padding on both sides; 0 selects the default 6/m
};

struct EtaEval {
    double value = 0.0;
    double im_residual = 0.0;
    double quad_error = 0.0;
};

/// Evanescent part of the single-emitter wavefunction; even in x.
inline EtaEval eta_eval(const WaveguideModel& model, double E, double x,
                        const QuadratureConfig& quad = {}) {
    quad.validate();
    if (!(E > model.m)) throw DomainError("eta: requires E > m");
    const double ax = std::abs(x);
    const double kc = model.m;
    const double K = quad.k_max > 0.0 ? quad.k_max
                                      : std::max(10.0 * model.m, 2.0 * k_of_E(model, E) + model.m);
    auto kernel = [&](Complex kappa) {
        const Complex w = model.omega_cont_raw(kappa);
        return std::sqrt(model.gamma / (2.0 * M_PI * w)) /
               ((E - w) * std::sqrt(2.0 * M_PI));
    };
    QuadResult raw = detail::shifted_line_integral(kernel, model.m, kc, K, ax, quad);
    EtaEval out;
    const double damp = std::exp(-model.m * ax);
    out.value = damp * raw.value.real();
    out.im_residual = std::abs(raw.value.imag());
    out.quad_error = raw.error;
    return out;
}

inline double eta(const WaveguideModel& model, double E, double x,
                  const QuadratureConfig& quad = {}) {
    return eta_eval(model, E, x, quad).value;
}

/// xi_1(x) = W(E) sin(k(E)|x|) + eta(x).
inline double xi_single(const WaveguideModel& model, double E, double x,
                        const QuadratureConfig& quad = {}) {
    const double ax = std::abs(x);
    return field_weight_W(model, E) * std::sin(k_of_E(model, E) * ax) +
           eta(model, E, ax, quad);
}

/// F(k(E)) sum_j a_j e^{+-i (j-1) k(E) d}; both signs. Vanishes for BIC amplitudes.
inline std::pair<Complex, Complex> constraint_residual(const WaveguideModel& model,
                                                       const EmitterArray& array, double E,
                                                       const Eigen::VectorXcd& amplitudes) {
    const double kE = k_of_E(model, E);
    const double F = model.form_factor(kE);
    Complex plus(0.0, 0.0), minus(0.0, 0.0);
    for (int l = 0; l < array.n; ++l) {
        const double phase = l * kE * array.d;
        plus += amplitudes(l) * std::polar(1.0, phase);
        minus += amplitudes(l) * std::polar(1.0, -phase);
    }
    return {F * plus, F * minus};
}

/**
 * Uniform sampling grid covering [-pad, (n-1)d + pad] with spacing d/per_cell.
 * The padding is rounded up to a whole number of grid steps so every emitter
 * sits exactly on a grid point; the jump stencils rely on that.
 */
struct FieldGrid {
    std::vector<double> x;
    double dx = 0.0;
    int stride = 0;  // grid points between adjacent emitters
    int offset = 0;  // index of emitter 1
};

inline FieldGrid make_grid(const EmitterArray& array, const WaveguideModel& model,
                           const GridSpec& spec = {}) {
    if (spec.per_cell < 8) throw GridError("make_grid: need at least 8 samples per cell");
    FieldGrid g;
    g.dx = array.d / spec.per_cell;
    const double pad = spec.pad > 0.0 ? spec.pad : 6.0 / model.m;
    const int pad_pts = static_cast<int>(std::ceil(pad / g.dx - 1e-12));
    g.stride = spec.per_cell;
    g.offset = pad_pts;
    const int total = (array.n - 1) * spec.per_cell + 2 * pad_pts + 1;
    g.x.resize(total);
    for (int i = 0; i < total; ++i) g.x[i] = (i - pad_pts) * g.dx;
    return g;
}

/// eta sampled at all grid distances q * dx for one (model, E); shared across waves.
struct EtaTable {
    std::vector<double> values;
    double dx = 0.0;
    double quad_error = 0.0;
};

inline EtaTable make_eta_table(const WaveguideModel& model, double E, const FieldGrid& grid,
                               const QuadratureConfig& quad = {}) {
    EtaTable t;
    t.dx = grid.dx;
    const int total = static_cast<int>(grid.x.size());
    const int qmax = std::max(grid.offset + 2, total - 1 - grid.offset + 2);
    t.values.resize(qmax + 1);
    for (int q = 0; q <= qmax; ++q) {
        EtaEval e = eta_eval(model, E, q * grid.dx, quad);
        t.values[q] = e.value;
        t.quad_error += e.quad_error;
    }
    return t;
}

struct NormReport {
    double sum_amps2 = 0.0;
    double int_xi2 = 0.0;
    double total = 0.0;
};

struct BicState {
    int nu = 0;
    int j = 0;
    double E = 0.0;
    double epsilon_required = 0.0;
    bool approximate = false; // deformed wave assembled at E_nu
    Eigen::VectorXd amplitudes;
    double max_im_amplitude = 0.0;
    FieldGrid grid;
    std::vector<double> xi;      // full field (pole + evanescent)
    std::vector<double> xi_pole; // resonant pole contribution alone
    NormReport norm;
    std::pair<Complex, Complex> constraint{};
    double W = 0.0;
    double kE = 0.0;
};

/// Field samples for a given real amplitude vector, before any normalization.
inline void sample_field(const WaveguideModel& model, const EmitterArray& array,
                         const Eigen::VectorXd& a, double E, const FieldGrid& grid,
                         const EtaTable& etas, std::vector<double>& xi,
                         std::vector<double>& xi_pole) {
    const double kE = k_of_E(model, E);
    const double W = field_weight_W(model, E);
    const int total = static_cast<int>(grid.x.size());
    xi.assign(total, 0.0);
    xi_pole.assign(total, 0.0);
    for (int i = 0; i < total; ++i) {
        double pole = 0.0, evan = 0.0;
        for (int l = 0; l < array.n; ++l) {
            const int q = std::abs(i - (grid.offset + l * grid.stride));
            const double dist = q * grid.dx;
            pole += a(l) * std::sin(kE * dist);
            evan += a(l) * etas.values[q];
        }
        xi_pole[i] = W * pole;
        xi[i] = W * pole + evan;
    }
}

/**
 * Assemble a state at E = E_nu from a given real amplitude vector (normalized
 * here jointly with the field so that sum |a|^2 + integral |xi|^2 = 1 by the
 * trapezoidal rule). epsilon_required must be supplied by the caller.
 */
inline BicState assemble_amplitudes(const WaveguideModel& model, const EmitterArray& array,
                                    int nu, int j_label, bool approximate, Eigen::VectorXd a,
                                    double epsilon_required, const GridSpec& spec = {},
                                    const QuadratureConfig& quad = {},
                                    const EtaTable* shared_etas = nullptr) {
    if (a.size() != array.n) throw DomainError("assemble_amplitudes: amplitude size mismatch");
    BicState st;
    st.nu = nu;
    st.j = j_label;
    st.approximate = approximate;
    st.E = resonant_energy(model, array.d, nu);
    st.kE = k_of_E(model, st.E);
    st.W = field_weight_W(model, st.E);
    st.epsilon_required = epsilon_required;
    a /= a.norm();

    st.grid = make_grid(array, model, spec);
    EtaTable local;
    const EtaTable* etas = shared_etas;
    if (etas == nullptr) {
        local = make_eta_table(model, st.E, st.grid, quad);
        etas = &local;
    }
    sample_field(model, array, a, st.E, st.grid, *etas, st.xi, st.xi_pole);

    // trapezoidal field norm; endpoints carry half weight
    double xi2 = 0.0;
    for (double v : st.xi) xi2 += v * v;
    xi2 -= 0.5 * (st.xi.front() * st.xi.front() + st.xi.back() * st.xi.back());
    xi2 *= st.grid.dx;
    const double total = 1.0 + xi2; // sum |a|^2 = 1 before scaling
    const double scale = 1.0 / std::sqrt(total);
    for (auto& v : st.xi) v *= scale;
    for (auto& v : st.xi_pole) v *= scale;
    a *= scale;
    st.amplitudes = a;
    st.norm.sum_amps2 = a.squaredNorm();
    st.norm.int_xi2 = xi2 * scale * scale;
    st.norm.total = st.norm.sum_amps2 + st.norm.int_xi2;

    st.constraint = constraint_residual(model, array, st.E, a.cast<Complex>());
    return st;
}

/**
 * Assemble the (nu, j) state of a catalog at E = E_nu. Deformed waves are
 * assembled from the real part of their amplitudes and flagged approximate;
 * the superradiant index is refused.
 */
inline BicState assemble(const WaveguideModel& model, const EmitterArray& array,
                         const WaveCatalog& catalog, int j, const GridSpec& spec = {},
                         const QuadratureConfig& quad = {}, const EtaTable* shared_etas = nullptr) {
    if (j < 1 || j > catalog.n) throw DomainError("assemble: j out of range");
    if (catalog.n != array.n) throw DomainError("assemble: catalog size mismatch");
    const ExcitationWave& wave = catalog.waves[j - 1];
    if (wave.kind == WaveKind::Superradiant)
        throw DomainError("assemble: superradiant wave is not a bound state; "
                          "its eigenvalue has a large imaginary part");

    const double eps = epsilon_for_bic(model, array.d, array.n, catalog.nu, j, quad);
    BicState st = assemble_amplitudes(model, array, catalog.nu, j,
                                      wave.kind == WaveKind::Deformed,
                                      wave.amplitudes.real(), eps, spec, quad, shared_etas);
    st.max_im_amplitude = wave.amplitudes.imag().cwiseAbs().maxCoeff();
    return st;
}

/**
 * One-sided second-order derivative jumps xi'(x_l+) - xi'(x_l-) from the
 * sampled field. Proportional to a_l: jumps_l / a_l is constant across the
 * chain, and vanishes where a_l = 0 (smooth field at dark emitters).
 */
inline Eigen::VectorXd derivative_jumps(const BicState& state, const std::vector<double>* samples = nullptr) {
    const std::vector<double>& xi = samples ? *samples : state.xi;
    const FieldGrid& g = state.grid;
    const int n = static_cast<int>(state.amplitudes.size());
    if (g.stride < 2 || g.offset < 2 ||
        g.offset + (n - 1) * g.stride + 2 >= static_cast<int>(xi.size()))
        throw GridError("derivative_jumps: grid does not admit one-sided stencils");
    for (int l = 0; l < n; ++l) {
        const int i = g.offset + l * g.stride;
        if (std::abs(g.x[i] - l * (g.dx * g.stride)) > 1e-12 * (1.0 + std::abs(g.x[i])))
            throw GridError("derivative_jumps: emitter not grid-aligned");
    }
    Eigen::VectorXd jumps(n);
    const double h = g.dx;
    for (int l = 0; l < n; ++l) {
        const int i = g.offset + l * g.stride;
        const double right = (-3.0 * xi[i] + 4.0 * xi[i + 1] - xi[i + 2]) / (2.0 * h);
        const double left = (3.0 * xi[i] - 4.0 * xi[i - 1] + xi[i - 2]) / (2.0 * h);
        jumps(l) = right - left;
    }
    return jumps;
}

} // namespace bicwave
