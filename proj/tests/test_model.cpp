#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "bicwave/model.hpp"

using namespace bicwave;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Continuation oracle: integrate d(omega)/d(kappa) = kappa/omega along a path
// from the real axis, never choosing a square-root branch. RK4, fixed steps.
Complex continue_omega_along(const WaveguideModel& model, Complex from, Complex to,
                             Complex omega_start, int steps = 4000) {
    Complex om = omega_start;
    const Complex dk = (to - from) / static_cast<double>(steps);
    Complex kappa = from;
    auto rhs = [](Complex k, Complex w) { return k / w; };
    for (int i = 0; i < steps; ++i) {
        Complex k1 = rhs(kappa, om);
        Complex k2 = rhs(kappa + 0.5 * dk, om + 0.5 * dk * k1);
        Complex k3 = rhs(kappa + 0.5 * dk, om + 0.5 * dk * k2);
        Complex k4 = rhs(kappa + dk, om + dk * k3);
        om += dk / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        kappa += dk;
    }
    return om;
}

} // namespace

TEST_CASE("dispersion on the real axis") {
    WaveguideModel m1(1.0, 0.1);
    CHECK(m1.omega(0.0) == 1.0);
    CHECK_THAT(m1.omega(std::sqrt(3.0)), WithinAbs(2.0, 1e-15));
    WaveguideModel m2(2.0, 0.1);
    CHECK_THAT(m2.omega(-1.5), WithinAbs(2.5, 1e-15));
    CHECK(m2.omega(-1.5) == m2.omega(1.5));
}

TEST_CASE("model parameter validation") {
    CHECK_THROWS_AS(WaveguideModel(0.0, 0.1), DomainError);
    CHECK_THROWS_AS(WaveguideModel(1.0, -1.0), DomainError);
    CHECK_THROWS_AS(EmitterArray(0, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(EmitterArray(3, -1.0, 1.0), DomainError);
}

TEST_CASE("analytic continuation of omega") {
    WaveguideModel model(1.0, 0.1);

    SECTION("real-axis values are bit-exact") {
        for (double k : {0.0, 0.3, 1.7, -2.5, 10.0})
            CHECK(model.omega_cont({k, 0.0}) == Complex(model.omega(k), 0.0));
    }

    SECTION("strip value against ODE continuation from the real axis") {
        // kappa = i/2: principal sqrt gives sqrt(3)/2, purely real
        Complex target(0.0, 0.5);
        Complex direct = model.omega_cont(target);
        CHECK_THAT(direct.real(), WithinAbs(std::sqrt(0.75), 1e-14));
        CHECK_THAT(direct.imag(), WithinAbs(0.0, 1e-14));

        Complex from(0.5, 0.0);
        Complex mid(0.5, 0.5);
        Complex om = continue_omega_along(model, from, mid, {model.omega(0.5), 0.0});
        om = continue_omega_along(model, mid, target, om);
        CHECK_THAT(std::abs(om - direct), WithinAbs(0.0, 1e-10));
    }

    SECTION("kappa = 0.5: real-axis value") {
        CHECK_THAT(model.omega_cont({0.5, 0.0}).real(), WithinAbs(std::sqrt(1.25), 1e-15));
    }

    SECTION("symmetries on random strip points") {
        std::mt19937_64 rng(20240811);
        std::uniform_real_distribution<double> rk(-8.0, 8.0), re(-0.95, 0.95);
        for (int i = 0; i < 100; ++i) {
            Complex kappa(rk(rng), re(rng) * model.m);
            Complex w = model.omega_cont(kappa);
            CHECK(std::abs(w - std::conj(model.omega_cont(std::conj(kappa)))) < 1e-14 * std::abs(w));
            CHECK(std::abs(w - model.omega_cont(-kappa)) < 1e-14 * std::abs(w));
        }
    }

    SECTION("branch points rejected") {
        CHECK_THROWS_AS(model.omega_cont({0.0, 1.0}), BranchPointError);
        CHECK_THROWS_AS(model.omega_cont({0.0, -1.0}), BranchPointError);
        CHECK_THROWS_AS(model.omega_cont(Complex(0.0, 1.0 + 5e-15)), BranchPointError);
    }
}

TEST_CASE("form factor and its continuation") {
    WaveguideModel model(1.0, 0.1);
    CHECK_THAT(model.form_factor(0.0), WithinAbs(std::sqrt(0.1 / (2.0 * M_PI)), 1e-16));

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> rk(-6.0, 6.0), re(-0.9, 0.9);
    for (int i = 0; i < 50; ++i) {
        double k = rk(rng);
        CHECK(model.f(k) == model.f(-k));
        CHECK(model.f(k) > 0.0);
        Complex kappa(rk(rng), re(rng));
        Complex fk = model.f_cont(kappa);
        CHECK(std::abs(fk - std::conj(model.f_cont(std::conj(kappa)))) < 1e-14 * std::abs(fk));
        CHECK(std::abs(fk - model.f_cont(-kappa)) < 1e-14 * std::abs(fk));
        Complex Fk = model.form_factor_cont(kappa);
        CHECK(std::abs(Fk * Fk - fk) < 1e-14 * std::abs(fk));
    }
}

TEST_CASE("photon momentum from energy") {
    WaveguideModel model(1.0, 0.1);
    CHECK_THAT(k_of_E(model, std::sqrt(2.0)), WithinAbs(1.0, 1e-14));
    CHECK_THROWS_AS(k_of_E(model, 1.0), DomainError);
    CHECK_THROWS_AS(k_of_E(model, 0.5), DomainError);

    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> rE(1.0 + 1e-9, 10.0);
    double prev_k = 0.0;
    for (int i = 0; i < 100; ++i) {
        double E = rE(rng);
        double k = k_of_E(model, E);
        CHECK_THAT(model.omega(k), WithinRel(E, 1e-12));
        (void)prev_k;
    }
}

TEST_CASE("resonant energies") {
    WaveguideModel model(1.0, 0.1);
    CHECK(resonant_energy(model, 2.7, 0) == 1.0);
    CHECK_THAT(resonant_energy(model, M_PI, 1), WithinAbs(std::sqrt(2.0), 1e-15));
    const double d = 5.0;
    double prev = 0.0;
    for (int nu = 1; nu <= 5; ++nu) {
        double E = resonant_energy(model, d, nu);
        CHECK(E > prev);
        prev = E;
        CHECK_THAT(k_of_E(model, E) * d, WithinAbs(nu * M_PI, 1e-12));
    }
}

TEST_CASE("residue and field weights") {
    WaveguideModel model(1.0, 0.1);
    // closed forms for Klein-Gordon act as the oracle: Z = gamma/k, W = sqrt(gamma E)/k
    CHECK_THAT(residue_weight_Z(model, std::sqrt(2.0)), WithinAbs(0.1, 1e-15));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> rE(1.0 + 1e-6, 10.0);
    for (int i = 0; i < 50; ++i) {
        double E = rE(rng);
        double k = k_of_E(model, E);
        CHECK_THAT(residue_weight_Z(model, E), WithinRel(model.gamma / k, 1e-12));
        CHECK_THAT(field_weight_W(model, E), WithinRel(std::sqrt(model.gamma * E) / k, 1e-12));
        CHECK(residue_weight_Z(model, E) > 0.0);
    }
    CHECK_THROWS_AS(residue_weight_Z(model, 0.99), DomainError);
}

TEST_CASE("strip symmetry of the self-energy integrand") {
    WaveguideModel model(1.0, 0.1);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> rk(0.01, 8.0), rE(1.05, 3.0);
    const double d = 5.0;
    for (int i = 0; i < 60; ++i) {
        const double k = rk(rng), E = rE(rng);
        for (int j : {0, 1, 3}) {
            auto g = [&](double kk) {
                Complex kappa(kk, model.m);
                return model.f_cont(kappa) / (E - model.omega_cont(kappa)) *
                       std::exp(Complex(0.0, j * kk * d));
            };
            Complex lhs = std::conj(g(-k)), rhs = g(k);
            CHECK(std::abs(lhs - rhs) < 1e-13 * std::abs(rhs));
        }
    }
}
