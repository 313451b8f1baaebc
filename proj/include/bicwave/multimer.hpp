#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <utility>
#include <vector>

#include "bicwave/waves.hpp"

namespace bicwave {

/**
 * Multimerized amplitude vectors: r identical h-emitter blocks separated by
 * single dark emitters, n = r h + r - 1. A definite-parity eigenvector of
 * Delta_h extends to an eigenvector of Delta_n with the same eigenvalue when
 * the junction rule a^{(s)}_h = -a^{(s+1)}_1 holds at every dark site:
 * antisymmetric blocks repeat unchanged, symmetric blocks alternate in sign.
 */

struct MultimerPlan {
    int n = 0, h = 0, r = 0;
    int j_h = 0;               // base wave index within Delta_h
    Parity base_parity = Parity::Symmetric;
    double chi = 0.0;          // shared eigenvalue of Delta_h and Delta_n
    Eigen::VectorXd base;      // unit-norm eigenvector of Delta_h
    Eigen::VectorXd assembled; // unit-norm vector of length n
    int target_j = 0;          // index map j_n = r * j_h
    bool degenerate_block = false; // h = 1: isolated emitters between mirrors
};

struct MultimerReport {
    double eigen_residual = 0.0;          // ||Delta_n A - chi A||
    double u_overlap = 0.0;               // |U_nu . A|
    int matched_closed_form_j = 0;        // best-overlap wave of Delta_n
    double closed_form_overlap = 0.0;     // |a^{(matched)} . A|
    double base_standalone_overlap = 0.0; // |u_nu(h) . base|, diagnostic
    bool junctions_ok = false;
    bool scalar_slots_zero = false;
};

/// All (h, r) with n = r h + r - 1, h >= 1, r >= 2; equivalently r | (n+1).
inline std::vector<std::pair<int, int>> admissible_decompositions(int n) {
    if (n < 3) throw DomainError("admissible_decompositions: n must be >= 3");
    std::vector<std::pair<int, int>> out;
    for (int r = 2; 2 * r <= n + 1; ++r) {
        if ((n + 1) % r != 0) continue;
        const int h = (n + 1) / r - 1;
        if (h >= 1) out.emplace_back(h, r);
    }
    return out;
}

/// Repeat a definite-parity block r times with dark emitters between copies.
inline Eigen::VectorXd build(const Eigen::VectorXd& base, int r) {
    if (r < 2) throw DomainError("build: need at least two blocks");
    const Parity parity = parity_of(base.cast<Complex>()); // ParityError if indefinite
    const int h = static_cast<int>(base.size());
    const int n = r * h + r - 1;
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    for (int s = 0; s < r; ++s) {
        const double sign = (parity == Parity::Symmetric && s % 2 == 1) ? -1.0 : 1.0;
        out.segment(s * (h + 1), h) = sign * base;
    }
    out /= out.norm();
    for (int l = 0; l < n; ++l) {
        if (std::abs(out(l)) > 1e-10) {
            if (out(l) < 0.0) out = -out;
            break;
        }
    }
    return out;
}

inline MultimerPlan make_plan(int h, int r, int j_h) {
    if (j_h < 1 || j_h > h) throw DomainError("make_plan: j_h out of range");
    MultimerPlan p;
    p.h = h;
    p.r = r;
    p.n = r * h + r - 1;
    p.j_h = j_h;
    p.degenerate_block = (h == 1);
    DeltaSpectrum s = delta_spectrum(h);
    p.base = s.vectors.col(j_h - 1);
    p.chi = s.chi(j_h - 1);
    p.base_parity = parity_of(p.base.cast<Complex>());
    p.assembled = build(p.base, r);
    p.target_j = r * j_h;
    return p;
}

/// Check an assembled vector directly; failures are reported, not thrown.
inline MultimerReport verify_vector(const Eigen::VectorXd& assembled, double chi, int h, int r,
                                    int nu, const Eigen::VectorXd& base) {
    const int n = static_cast<int>(assembled.size());
    MultimerReport rep;
    rep.eigen_residual = (delta_matrix(n) * assembled - chi * assembled).norm();
    rep.u_overlap = std::abs(u_vector(nu, n).dot(assembled));
    DeltaSpectrum s = delta_spectrum(n);
    for (int j = 1; j <= n; ++j) {
        const double ov = std::abs(s.vectors.col(j - 1).dot(assembled));
        if (ov > rep.closed_form_overlap) {
            rep.closed_form_overlap = ov;
            rep.matched_closed_form_j = j;
        }
    }
    rep.base_standalone_overlap = std::abs(u_vector(nu, h).dot(base)) / base.norm();
    rep.scalar_slots_zero = true;
    for (int s_idx = 1; s_idx < r; ++s_idx)
        if (assembled(s_idx * (h + 1) - 1) != 0.0) rep.scalar_slots_zero = false;
    rep.junctions_ok = true;
    for (int s_idx = 0; s_idx + 1 < r; ++s_idx) {
        const double tail = assembled(s_idx * (h + 1) + h - 1);
        const double head = assembled((s_idx + 1) * (h + 1));
        if (tail != -head) rep.junctions_ok = false;
    }
    return rep;
}

inline MultimerReport verify(const MultimerPlan& plan, int nu) {
    return verify_vector(plan.assembled, plan.chi, plan.h, plan.r, nu, plan.base);
}

} // namespace bicwave
