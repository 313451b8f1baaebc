#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "bicwave/oracle.hpp"
#include "bicwave/waves.hpp"

using namespace bicwave;
using Catch::Matchers::WithinAbs;

namespace {

// Criterion-9 configuration: weak coupling so the BIC dominates its window.
const double kGamma = 0.01;
const WaveguideModel kModel(1.0, kGamma);
const double kD = 5.0;

double overlap_with(const Eigen::VectorXcd& a, const Eigen::VectorXd& target) {
    return std::abs(target.cast<Complex>().dot(a)) / a.norm();
}

Eigen::VectorXd node_target() {
    Eigen::VectorXd t(3);
    t << 1.0, 0.0, -1.0;
    return t / std::sqrt(2.0);
}

struct Criterion9Data {
    double E1, Z, eps;
    DiscretizedHamiltonian ham;
    std::vector<BicCandidate> cands;
    std::vector<BicCandidate> detuned_cands;
};

const Criterion9Data& criterion9_data() {
    static const Criterion9Data data = [] {
        Criterion9Data d;
        const int n = 3, nu = 1, j = 2;
        d.E1 = resonant_energy(kModel, kD, nu);
        d.Z = residue_weight_Z(kModel, d.E1);
        d.eps = epsilon_for_bic(kModel, kD, n, nu, j);
        EmitterArray array(n, kD, d.eps);
        d.ham = build_hamiltonian(kModel, array, 10.0, 2000);
        d.cands = find_bic_candidates(d.ham, {d.E1 - 10.0 * d.Z, d.E1 + 10.0 * d.Z});

        EmitterArray detuned(n, kD, d.eps + 10.0 * d.Z);
        DiscretizedHamiltonian ham2 = build_hamiltonian(kModel, detuned, 10.0, 2000);
        d.detuned_cands = find_bic_candidates(ham2, {d.E1 - 20.0 * d.Z, d.E1 + 20.0 * d.Z});
        return d;
    }();
    return data;
}

} // namespace

TEST_CASE("hamiltonian construction") {
    EmitterArray array(3, kD, 1.17);
    DiscretizedHamiltonian ham = build_hamiltonian(kModel, array, 10.0, 2000);

    SECTION("hermitian to machine precision") {
        const double res = (ham.matrix - ham.matrix.adjoint()).cwiseAbs().maxCoeff();
        CHECK(res < 1e-14);
    }
    SECTION("block structure") {
        CHECK(ham.matrix.rows() == 2003);
        for (int j = 0; j < 3; ++j) CHECK(ham.matrix(j, j) == Complex(1.17, 0.0));
        for (int i = 0; i < 2000; ++i)
            CHECK(ham.matrix(3 + i, 3 + i) == Complex(kModel.omega(ham.k_grid(i)), 0.0));
        // emitter-emitter coupling only through the field
        CHECK(ham.matrix(0, 1) == Complex(0.0, 0.0));
    }
    SECTION("eigenvalue count equals n + N_k") {
        EmitterArray small(2, kD, 1.0);
        DiscretizedHamiltonian h2 = build_hamiltonian(kModel, small, 5.0, 60);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h2.matrix);
        CHECK(es.eigenvalues().size() == 62);
    }
    SECTION("size cap") {
        EmitterArray one(1, kD, 1.0);
        CHECK_THROWS_AS(build_hamiltonian(kModel, one, 10.0, 20001), SizeError);
    }
}

TEST_CASE("decoupling limit: candidate pins to epsilon with unit weight") {
    EmitterArray array(1, kD, 1.3);
    double prev_gap = 1.0, prev_weight = 0.0;
    for (double gamma : {1e-3, 1e-5, 1e-7}) {
        WaveguideModel weak(1.0, gamma);
        DiscretizedHamiltonian ham = build_hamiltonian(weak, array, 10.0, 600);
        BicCandidate c = find_bic_candidate(ham, 1.3, {1.2, 1.4});
        const double gap = std::abs(c.energy - 1.3);
        CHECK(gap <= prev_gap + 1e-12);
        prev_gap = gap;
        CHECK(c.emitter_weight > prev_weight);
        prev_weight = c.emitter_weight;
    }
    CHECK(prev_weight > 0.9999);
    CHECK(prev_gap < 1e-6);
}

TEST_CASE("criterion-9 configuration: measured candidate structure") {
    const Criterion9Data& d = criterion9_data();
    const Eigen::VectorXd target = node_target();
    REQUIRE(d.cands.size() >= 2);

    SECTION("the target BIC is present with near-perfect overlap in the top two") {
        const double ov0 = overlap_with(d.cands[0].emitter_amplitudes, target);
        const double ov1 = overlap_with(d.cands[1].emitter_amplitudes, target);
        CHECK(std::max(ov0, ov1) >= 0.99);
        CHECK(d.cands[0].emitter_weight > 0.5);
        CHECK(d.cands[1].emitter_weight > 0.5);
    }
    SECTION("the max-weight state is the acoustic quasi-BIC, not the target") {
        // the nu-odd acoustic deformed state carries less field energy and wins
        CHECK(overlap_with(d.cands[0].emitter_amplitudes, target) < 0.1);
        CHECK(d.cands[0].emitter_weight > 0.85);
    }
    SECTION("field node at the dark middle emitter") {
        // highest-weight candidate matching the target direction (the list is
        // weight-sorted; field-dominated states can align in direction too)
        const BicCandidate* bic = nullptr;
        for (const auto& c : d.cands)
            if (overlap_with(c.emitter_amplitudes, target) >= 0.99) {
                bic = &c;
                break;
            }
        REQUIRE(bic != nullptr);
        double fmax = 0.0;
        for (double x = -5.0; x <= 15.0; x += 0.25)
            fmax = std::max(fmax, std::abs(field_at(d.ham, bic->field_coeffs, x)));
        CHECK(std::abs(field_at(d.ham, bic->field_coeffs, kD)) <= 0.05 * fmax);
    }
    SECTION("detuning destroys every high-weight state") {
        REQUIRE(!d.detuned_cands.empty());
        for (const auto& c : d.detuned_cands) CHECK(c.emitter_weight < 0.5);
    }
    SECTION("empty window raises") {
        CHECK_THROWS_AS(find_bic_candidate(d.ham, d.E1, {d.E1 + 1e-9, d.E1 + 2e-9}),
                        NotFoundError);
    }
}

// The N_k sweep re-diagonalizes up to a 4003-dimensional matrix; kept out of
// the default run and driven by its own ctest entry.
TEST_CASE("box convergence: target-state overlap improves with N_k", "[.][convergence]") {
    const int n = 3, nu = 1, j = 2;
    const double E1 = resonant_energy(kModel, kD, nu);
    const double Z = residue_weight_Z(kModel, E1);
    const double eps = epsilon_for_bic(kModel, kD, n, nu, j);
    const Eigen::VectorXd target = node_target();
    EmitterArray array(n, kD, eps);
    auto window = std::pair{E1 - 10.0 * Z, E1 + 10.0 * Z};

    double prev_best = 0.0, prev_sel = 0.0;
    for (int N_k : {500, 1000, 2000, 4000}) {
        DiscretizedHamiltonian ham = build_hamiltonian(kModel, array, 10.0, N_k);
        std::vector<BicCandidate> cands = find_bic_candidates(ham, window);
        REQUIRE(!cands.empty());
        double best = 0.0;
        for (const auto& c : cands)
            best = std::max(best, overlap_with(c.emitter_amplitudes, target));
        // best-overlap state converges monotonically (within noise)
        CHECK(best >= prev_best - 1e-3);
        prev_best = best;
        // the spec-selected max-weight candidate's overlap is monotone too
        // (trivially: it stays at the orthogonal acoustic state)
        const double sel = overlap_with(cands[0].emitter_amplitudes, target);
        CHECK(sel >= prev_sel - 1e-3);
        prev_sel = sel;
    }
    CHECK(prev_best >= 0.99);
}
