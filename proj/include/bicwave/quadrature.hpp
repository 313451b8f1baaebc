#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <queue>
#include <vector>

#include "bicwave/errors.hpp"

namespace bicwave {

struct QuadratureConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
    double k_max = 0.0;         // truncation point of the semi-infinite integrals; 0 = auto
    int max_refinements = 2000; // panel-split budget per segment chain

    void validate() const {
        if (!(rel_tol > 0.0)) throw ConfigError("QuadratureConfig: rel_tol must be > 0");
        if (k_max < 0.0) throw ConfigError("QuadratureConfig: k_max must be >= 0");
    }
};

struct QuadResult {
    std::complex<double> value{0.0, 0.0};
    double error = 0.0;
    long evals = 0;

    QuadResult& operator+=(const QuadResult& o) {
        value += o.value;
        error += o.error;
        evals += o.evals;
        return *this;
    }
};

namespace detail {

// 15-point Kronrod / 7-point Gauss pair (QUADPACK dqk15 constants).
inline constexpr double kGK15Nodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr double kKronrodW[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kGaussW[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename F>
QuadResult gk15_panel(F&& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double hw = 0.5 * (b - a);
    std::complex<double> fc = f(c);
    std::complex<double> ik = kKronrodW[7] * fc;
    std::complex<double> ig = kGaussW[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = hw * kGK15Nodes[i];
        const std::complex<double> f1 = f(c - dx);
        const std::complex<double> f2 = f(c + dx);
        ik += kKronrodW[i] * (f1 + f2);
        if (i % 2 == 1) ig += kGaussW[(i - 1) / 2] * (f1 + f2);
    }
    ik *= hw;
    ig *= hw;
    return {ik, std::abs(ik - ig), 15};
}

struct Panel {
    double a, b;
    std::complex<double> value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

} // namespace detail

/**
 * Adaptive Gauss-Kronrod integration of a complex-valued function over the
 * union of panels defined by `breaks` (strictly increasing). Refines the
 * worst panel until  sum(err) <= max(abs_tol, rel_tol * |sum(value)|)
 * or the split budget is exhausted (QuadratureError).
 */
template <typename F>
QuadResult integrate_adaptive(F&& f, const std::vector<double>& breaks, double abs_tol,
                              double rel_tol, int max_splits) {
    if (breaks.size() < 2) throw ConfigError("integrate_adaptive: need at least one panel");
    std::priority_queue<detail::Panel> heap;
    std::complex<double> total{0.0, 0.0};
    double err = 0.0;
    long evals = 0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        QuadResult r = detail::gk15_panel(f, breaks[i], breaks[i + 1]);
        heap.push({breaks[i], breaks[i + 1], r.value, r.error});
        total += r.value;
        err += r.error;
        evals += r.evals;
    }
    int splits = 0;
    while (err > std::max(abs_tol, rel_tol * std::abs(total))) {
        if (splits >= max_splits)
            throw QuadratureError("integrate_adaptive: tolerance not reached (err=" +
                                  std::to_string(err) + ") within split budget");
        detail::Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            // panel no longer splittable in double precision; accept its error
            // by parking it with zero error so refinement moves elsewhere
            heap.push({worst.a, worst.b, worst.value, 0.0});
            ++splits;
            continue;
        }
        QuadResult left = detail::gk15_panel(f, worst.a, mid);
        QuadResult right = detail::gk15_panel(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        evals += left.evals + right.evals;
        heap.push({worst.a, mid, left.value, left.error});
        heap.push({mid, worst.b, right.value, right.error});
        ++splits;
    }
    return {total, err, evals};
}

/// Breakpoints a = b_0 < ... < b_m = b with spacing at most max_step.
inline std::vector<double> uniform_breaks(double a, double b, double max_step) {
    const int n = std::max(1, static_cast<int>(std::ceil((b - a) / max_step)));
    std::vector<double> out(n + 1);
    for (int i = 0; i <= n; ++i) out[i] = a + (b - a) * i / n;
    return out;
}

/// Geometric breakpoints {a, a+s, a+2s, a+4s, ...} up to b; resolves boundary layers.
inline std::vector<double> geometric_breaks(double a, double b, double first_step) {
    std::vector<double> out{a};
    double step = first_step;
    double x = a;
    while (x + step < b) {
        x += step;
        out.push_back(x);
        step *= 2.0;
    }
    out.push_back(b);
    return out;
}

/**
 * Exact evaluation of the truncation tail  Int_K^inf A0(kappa(k)) e^{i lam k} dk
 * along the horizontal line Im kappa = y0 (kappa(k) = k + i y0), by rotating the
 * contour to the vertical line Re kappa = K:
 *
 *   Int = side * i * Int_0^inf A0(K_signed + i(y0 + y)) e^{i lam (K_signed + i y)} dy,
 *
 * valid when A0 is analytic in the quarter-plane beyond K_signed (side=+1 rotates
 * the right end up; side=-1 the left end, with K_signed < 0) and lam >= 0.
 * The y-integral is split [0, Y1] plus [Y1, inf) via y = Y1/v^2, so there is no
 * truncation error; only quadrature error remains.
 */
template <typename A0>
QuadResult rotated_tail(A0&& kernel, double K_signed, double y0, double lam, double abs_tol,
                        double rel_tol, int max_splits) {
    const double side = (K_signed >= 0.0) ? 1.0 : -1.0;
    const double Kmag = std::abs(K_signed);
    const double Y1 = 4.0 * Kmag;
    const std::complex<double> I(0.0, 1.0);

    auto g = [&](double y) -> std::complex<double> {
        const std::complex<double> kappa(K_signed, y0 + y);
        // e^{i lam (K_signed + i y)} kept in this form so nothing overflows
        return kernel(kappa) * std::exp(I * lam * std::complex<double>(K_signed, y));
    };
    double first = Kmag / 8.0;
    if (lam > 0.0) first = std::min(first, 1.0 / lam);
    QuadResult near = integrate_adaptive(g, geometric_breaks(0.0, Y1, first), 0.5 * abs_tol,
                                         rel_tol, max_splits);

    auto far = [&](double v) -> std::complex<double> {
        const double y = Y1 / (v * v);
        if (y > 1e150) return {0.0, 0.0}; // kernel decays at least ~1/y^2; below any tol here
        return g(y) * (2.0 * Y1 / (v * v * v));
    };
    QuadResult tail = integrate_adaptive(far, {0.0, 0.25, 0.5, 0.75, 1.0}, 0.5 * abs_tol,
                                         rel_tol, max_splits);

    QuadResult out;
    out.value = side * I * (near.value + tail.value);
    out.error = near.error + tail.error;
    out.evals = near.evals + tail.evals;
    return out;
}

} // namespace bicwave
