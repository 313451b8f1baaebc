// bicwave: bound states in the continuum for emitter arrays in a massive
// 1D waveguide. Subcommands cover the excitation-wave catalog, assembled
// photon wavefunctions, multimer construction, the self-energy table, and
// the brute-force discretized-continuum check.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <mutex>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "bicwave/bic.hpp"
#include "bicwave/config.hpp"
#include "bicwave/io.hpp"
#include "bicwave/multimer.hpp"
#include "bicwave/oracle.hpp"
#include "bicwave/selfenergy.hpp"
#include "bicwave/version.hpp"
#include "bicwave/waves.hpp"

namespace fs = std::filesystem;
using namespace bicwave;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitConfig = 4;

fs::path out_path(const RunConfig& cfg, const std::string& name) {
    return fs::path(cfg.out_dir) / name;
}

void run_parallel(std::vector<std::function<void()>> tasks, int jobs) {
    if (jobs <= 1 || tasks.size() <= 1) {
        for (auto& t : tasks) t();
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            try {
                tasks[i]();
            } catch (...) {
                std::scoped_lock lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const int nthreads = std::min<int>(jobs, static_cast<int>(tasks.size()));
    pool.reserve(nthreads);
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

double resolve_b1(const RunConfig& cfg) {
    if (cfg.b1_override != 0.0) return cfg.b1_override;
    if (cfg.model_free)
        throw ConfigError("--model-free requires an explicit --b1");
    return b1_physical(cfg.model(), cfg.d, cfg.nu, cfg.quad);
}

// --- subcommand bodies -----------------------------------------------------

void cmd_spectrum(const RunConfig& cfg) {
    if (cfg.n == 1) {
        // single emitter: one trivial wave, nothing to classify
        CsvWriter csv(out_path(cfg, "waves_n1_nu" + std::to_string(cfg.nu) + ".csv"),
                      {"j", "kind", "chi_re", "chi_im", "parity", "overlap_with_u",
                       "epsilon_required", "a1_re", "a1_im"},
                      cfg.fingerprint());
        csv.row({"1", "exact", "0", "0", "symmetric", "1", "nan", "1", "0"});
        return;
    }
    const double b1 = resolve_b1(cfg);
    WaveCatalog cat = classify_waves(cfg.n, cfg.nu, b1);
    if (!cfg.model_free) attach_epsilons(cat, cfg.model(), cfg.d, cfg.quad);

    std::vector<std::string> header = {"j",      "kind",          "chi_re",
                                       "chi_im", "parity",        "overlap_with_u",
                                       "epsilon_required"};
    for (int l = 1; l <= cfg.n; ++l) {
        header.push_back("a" + std::to_string(l) + "_re");
        header.push_back("a" + std::to_string(l) + "_im");
    }
    CsvWriter csv(out_path(cfg, "waves_n" + std::to_string(cfg.n) + "_nu" +
                                    std::to_string(cfg.nu) + ".csv"),
                  header, cfg.fingerprint());
    for (std::size_t i = 0; i < cat.waves.size(); ++i) {
        const ExcitationWave& w = cat.waves[i];
        std::vector<std::string> row = {
            std::to_string(w.j),
            to_string(w.kind),
            fmt(w.chi.real()),
            fmt(w.chi.imag()),
            to_string(w.parity),
            fmt(std::abs(w.resonance_overlap)),
            cat.epsilon_values.empty() ? "nan" : fmt(cat.epsilon_values[i])};
        for (int l = 0; l < cfg.n; ++l) {
            row.push_back(fmt(w.amplitudes(l).real()));
            row.push_back(fmt(w.amplitudes(l).imag()));
        }
        csv.row(row);
    }
}

void write_bic_outputs(const RunConfig& cfg, const BicState& st, const std::string& stem) {
    CsvWriter field(out_path(cfg, stem + ".csv"), {"x", "xi_full", "xi_pole_only"},
                    cfg.fingerprint());
    for (std::size_t i = 0; i < st.grid.x.size(); ++i)
        field.row({fmt(st.grid.x[i]), fmt(st.xi[i]), fmt(st.xi_pole[i])});

    Eigen::VectorXd jumps = derivative_jumps(st);
    CsvWriter amps(out_path(cfg, "amps_" + stem.substr(stem.find('_') + 1) + ".csv"),
                   {"ell", "a_ell", "jump_ell"}, cfg.fingerprint());
    for (int l = 0; l < st.amplitudes.size(); ++l)
        amps.row({std::to_string(l + 1), fmt(st.amplitudes(l)), fmt(jumps(l))});

    if (cfg.svg) {
        // field in units of W(E_nu), amplitudes as stems, as in the figures
        double ymax = 0.0;
        for (double v : st.xi) ymax = std::max(ymax, std::abs(v / st.W));
        for (int l = 0; l < st.amplitudes.size(); ++l)
            ymax = std::max(ymax, std::abs(st.amplitudes(l)));
        ymax *= 1.1;
        SvgPlot plot(st.grid.x.front(), st.grid.x.back(), -ymax, ymax);
        std::vector<double> scaled(st.xi.size());
        for (std::size_t i = 0; i < st.xi.size(); ++i) scaled[i] = st.xi[i] / st.W;
        plot.polyline(st.grid.x, scaled);
        std::vector<double> ex(st.amplitudes.size()), ey(st.amplitudes.size());
        for (int l = 0; l < st.amplitudes.size(); ++l) {
            ex[l] = st.grid.x[st.grid.offset + l * st.grid.stride];
            ey[l] = st.amplitudes(l);
        }
        plot.stems(ex, ey);
        plot.title(stem);
        plot.write(out_path(cfg, stem + ".svg"));
    }
}

void cmd_bic(const RunConfig& cfg) {
    if (cfg.j < 1) throw ConfigError("bic: --j is required");
    const double b1 = resolve_b1(cfg);
    WaveCatalog cat = classify_waves(cfg.n, cfg.nu, b1);
    EmitterArray array(cfg.n, cfg.d,
                       epsilon_for_bic(cfg.model(), cfg.d, cfg.n, cfg.nu, cfg.j, cfg.quad));
    BicState st = assemble(cfg.model(), array, cat, cfg.j, cfg.grid, cfg.quad);
    write_bic_outputs(cfg, st,
                      "bic_n" + std::to_string(cfg.n) + "_nu" + std::to_string(cfg.nu) + "_j" +
                          std::to_string(cfg.j));
}

void cmd_multimer(const RunConfig& cfg) {
    CsvWriter csv(out_path(cfg, "multimers_n" + std::to_string(cfg.n) + ".csv"),
                  {"h", "r", "j_h", "j_n", "parity", "chi", "eig_residual", "u_overlap",
                   "degenerate_block"},
                  cfg.fingerprint());
    for (auto [h, r] : admissible_decompositions(cfg.n)) {
        for (int jh = 1; jh <= h; ++jh) {
            MultimerPlan plan = make_plan(h, r, jh);
            MultimerReport rep = verify(plan, cfg.nu);
            csv.row({std::to_string(h), std::to_string(r), std::to_string(jh),
                     std::to_string(plan.target_j), to_string(plan.base_parity), fmt(plan.chi),
                     fmt(rep.eigen_residual), fmt(rep.u_overlap),
                     plan.degenerate_block ? "1" : "0"});
        }
    }
}

void cmd_selfenergy(const RunConfig& cfg, const std::string& energy_spec) {
    double E;
    if (energy_spec.rfind("resonant:", 0) == 0) {
        const int nu = std::stoi(energy_spec.substr(9));
        E = resonant_energy(cfg.model(), cfg.d, nu);
    } else {
        E = std::stod(energy_spec);
    }
    const double md = cfg.m * cfg.d;
    std::vector<BetaEval> betas(cfg.n);
    for (int j = 0; j < cfg.n; ++j) betas[j] = beta_eval(cfg.model(), cfg.d, E, j, cfg.quad);

    CsvWriter csv(out_path(cfg, "selfenergy.csv"), {"j", "beta_j", "beta_bound", "quad_err"},
                  cfg.fingerprint());
    for (int j = 0; j < cfg.n; ++j)
        csv.row({std::to_string(j), fmt(betas[j].value),
                 fmt(std::exp(-j * md) * std::abs(betas[0].value)), fmt(betas[j].quad_error)});
}

void cmd_oracle(const RunConfig& cfg, int N_k, double K_over) {
    if (cfg.j < 1) throw ConfigError("oracle: --j is required");
    const WaveguideModel model = cfg.model();
    const double E = resonant_energy(model, cfg.d, cfg.nu);
    const double Z = residue_weight_Z(model, E);
    const double K = K_over > 0.0 ? K_over : 10.0 * std::max(k_of_E(model, E), cfg.m);
    EmitterArray array(cfg.n, cfg.d,
                       epsilon_for_bic(model, cfg.d, cfg.n, cfg.nu, cfg.j, cfg.quad));
    DiscretizedHamiltonian ham = build_hamiltonian(model, array, K, N_k);
    std::vector<BicCandidate> cands =
        find_bic_candidates(ham, {E - 10.0 * Z, E + 10.0 * Z});
    if (cands.empty()) throw NotFoundError("oracle: no candidate in the resonance window");

    DeltaSpectrum s = delta_spectrum(cfg.n);
    Eigen::VectorXcd target = s.vectors.col(cfg.j - 1).cast<Complex>();

    CsvWriter csv(out_path(cfg, "oracle_report.csv"),
                  {"n", "nu", "j", "N_k", "candidate_E", "emitter_weight",
                   "overlap_with_analytic"},
                  cfg.fingerprint());
    const std::size_t rows = std::min<std::size_t>(cands.size(), 3);
    for (std::size_t i = 0; i < rows; ++i) {
        const double ov =
            std::abs(target.dot(cands[i].emitter_amplitudes)) / cands[i].emitter_amplitudes.norm();
        csv.row({std::to_string(cfg.n), std::to_string(cfg.nu), std::to_string(cfg.j),
                 std::to_string(N_k), fmt(cands[i].energy), fmt(cands[i].emitter_weight),
                 fmt(ov)});
    }
}

void cmd_figures(const RunConfig& cfg) {
    const WaveguideModel model = cfg.model();
    std::vector<std::function<void()>> tasks;

    // excitation-wave states for n=30 at the first two resonances
    for (int nu : {1, 2}) {
        tasks.push_back([cfg, model, nu] {
            RunConfig local = cfg;
            local.nu = nu;
            const double b1 = resolve_b1(local);
            WaveCatalog cat = classify_waves(30, nu, b1);
            const double E = resonant_energy(model, cfg.d, nu);
            EmitterArray probe(30, cfg.d, 1.0);
            FieldGrid grid = make_grid(probe, model, cfg.grid);
            EtaTable etas = make_eta_table(model, E, grid, cfg.quad);
            const std::vector<int> js =
                nu == 1 ? std::vector<int>{1, 2, 28, 29} : std::vector<int>{2, 3, 29, 30};
            for (int j : js) {
                EmitterArray array(30, cfg.d,
                                   epsilon_for_bic(model, cfg.d, 30, nu, j, cfg.quad));
                BicState st = assemble(model, array, cat, j, cfg.grid, cfg.quad, &etas);
                write_bic_outputs(local, st,
                                  "bic_n30_nu" + std::to_string(nu) + "_j" + std::to_string(j));
            }
        });
    }

    // multimer examples; the (11,3,3) trimer is only approximately resonant
    struct Fig4 { int n, r, h, j_h; };
    for (Fig4 f : {Fig4{7, 2, 3, 1}, Fig4{9, 2, 4, 1}, Fig4{11, 3, 3, 1}, Fig4{23, 4, 5, 2}}) {
        tasks.push_back([cfg, model, f] {
            MultimerPlan plan = make_plan(f.h, f.r, f.j_h);
            const double eps =
                epsilon_for_bic(model, cfg.d, plan.n, 1, plan.target_j, cfg.quad);
            EmitterArray array(plan.n, cfg.d, eps);
            BicState st = assemble_amplitudes(model, array, 1, plan.target_j,
                                              expected_kind(plan.n, 1, plan.target_j) !=
                                                  WaveKind::Exact,
                                              plan.assembled, eps, cfg.grid, cfg.quad);
            write_bic_outputs(cfg, st,
                              "multimer_n" + std::to_string(plan.n) + "_r" +
                                  std::to_string(f.r) + "_h" + std::to_string(f.h));
        });
        tasks.push_back([cfg, f] {
            RunConfig local = cfg;
            local.n = f.n;
            cmd_multimer(local);
        });
    }

    // resonance overlaps u_nu . a^{(j)} for n = 50, 51 (both parities)
    tasks.push_back([cfg] {
        CsvWriter csv(out_path(cfg, "fig5_overlaps.csv"),
                      {"n", "nu_parity", "j", "overlap_normalized"}, cfg.fingerprint());
        for (int n : {50, 51}) {
            DeltaSpectrum s = delta_spectrum(n);
            for (int nu : {2, 1}) {
                Eigen::VectorXd u = u_vector(nu, n);
                double mx = 0.0;
                std::vector<double> vals(n);
                for (int j = 1; j <= n; ++j) {
                    vals[j - 1] = std::abs(u.dot(s.vectors.col(j - 1)));
                    mx = std::max(mx, vals[j - 1]);
                }
                for (int j = 1; j <= n; ++j)
                    csv.row({std::to_string(n), nu % 2 == 0 ? "even" : "odd",
                             std::to_string(j), fmt(vals[j - 1] / mx)});
            }
        }
    });

    // deformed vs closed-form amplitudes for n=100
    for (int nu : {1, 2}) {
        tasks.push_back([cfg, nu] {
            const int n = 100;
            const double b1 = cfg.b1_override != 0.0 ? cfg.b1_override : 1e-3;
            WaveCatalog cat = classify_waves(n, nu, b1);
            DeltaSpectrum s = delta_spectrum(n);
            const std::vector<int> js = nu % 2 == 0 ? std::vector<int>{2, 3, 99, 100}
                                                    : std::vector<int>{1, 2, 98, 99};
            const std::string name = nu % 2 == 0 ? "fig6" : "fig7";
            for (int j : js) {
                CsvWriter csv(out_path(cfg, name + "_n100_nu" + std::to_string(nu) + "_j" +
                                                std::to_string(j) + ".csv"),
                              {"ell", "a_closed", "a_deformed_re", "a_deformed_im", "kind"},
                              cfg.fingerprint());
                const ExcitationWave& w = cat.waves[j - 1];
                for (int l = 0; l < n; ++l)
                    csv.row({std::to_string(l + 1), fmt(s.vectors(l, j - 1)),
                             fmt(w.amplitudes(l).real()), fmt(w.amplitudes(l).imag()),
                             to_string(w.kind)});
            }
        });
    }

    run_parallel(std::move(tasks), cfg.jobs);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"bicwave " + std::string(kVersion) +
                 ": bound states in the continuum for waveguide emitter arrays"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;
    std::string energy_spec = "resonant:1";
    int N_k = 2000;
    double K_override = 0.0;

    // global options, available to every subcommand
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--m", cfg.m, "photon mass (energy units)");
        sub->add_option("--gamma", cfg.gamma, "coupling constant");
        sub->add_option("--d", cfg.d, "emitter spacing");
        sub->add_option("--n", cfg.n, "number of emitters");
        sub->add_option("--nu", cfg.nu, "resonance index");
        sub->add_option("--j", cfg.j, "wave index");
        sub->add_option("--b1", cfg.b1_override, "nearest-neighbor coefficient override");
        sub->add_flag("--model-free", cfg.model_free,
                      "classify from --b1 alone, no quadrature");
        sub->add_option("--k-max", cfg.quad.k_max, "quadrature split point");
        sub->add_option("--rel-tol", cfg.quad.rel_tol, "quadrature relative tolerance");
        sub->add_option("--grid-per-cell", cfg.grid.per_cell, "field samples per spacing");
        sub->add_option("--pad", cfg.grid.pad, "field grid padding");
        sub->add_option("--out", cfg.out_dir, "output directory");
        sub->add_flag("--svg", cfg.svg, "emit SVG plots next to the CSVs");
        sub->add_option("--jobs", cfg.jobs, "worker threads for sweeps");
        sub->add_option("--seed", cfg.seed, "seed for randomized tooling");
        sub->add_option("--config", config_path, "JSON config file (flags take precedence)");
    };

    CLI::App* spectrum = app.add_subcommand("spectrum", "excitation-wave catalog CSV");
    CLI::App* bic = app.add_subcommand("bic", "assemble a BIC and emit field/amplitude CSVs");
    CLI::App* multimer = app.add_subcommand("multimer", "enumerate and verify multimer plans");
    CLI::App* selfenergy =
        app.add_subcommand("selfenergy", "beta table with the evanescent bound column");
    CLI::App* oracle =
        app.add_subcommand("oracle", "discretized-continuum diagonalization report");
    CLI::App* figures = app.add_subcommand("figures", "regenerate all figure data");
    for (CLI::App* sub : {spectrum, bic, multimer, selfenergy, oracle, figures})
        add_common(sub);
    selfenergy->add_option("--E", energy_spec, "evaluation energy: number or resonant:<nu>");
    oracle->add_option("--Nk", N_k, "number of momentum modes");
    oracle->add_option("--K", K_override, "momentum cutoff");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        // precedence: flags > config file > defaults. Parse order: defaults were
        // overwritten by flags already; the config file fills only what the
        // command line left untouched, so re-apply flags afterwards.
        if (!config_path.empty()) {
            RunConfig file_cfg;
            load_config_file(file_cfg, config_path);
            RunConfig flag_cfg = cfg;
            CLI::App* active = app.get_subcommands().front();
            auto keep = [&](const std::string& flag) { return active->count(flag) > 0; };
            cfg = file_cfg;
            if (keep("--m")) cfg.m = flag_cfg.m;
            if (keep("--gamma")) cfg.gamma = flag_cfg.gamma;
            if (keep("--d")) cfg.d = flag_cfg.d;
            if (keep("--n")) cfg.n = flag_cfg.n;
            if (keep("--nu")) cfg.nu = flag_cfg.nu;
            if (keep("--j")) cfg.j = flag_cfg.j;
            if (keep("--b1")) cfg.b1_override = flag_cfg.b1_override;
            if (keep("--model-free")) cfg.model_free = flag_cfg.model_free;
            if (keep("--k-max")) cfg.quad.k_max = flag_cfg.quad.k_max;
            if (keep("--rel-tol")) cfg.quad.rel_tol = flag_cfg.quad.rel_tol;
            if (keep("--grid-per-cell")) cfg.grid.per_cell = flag_cfg.grid.per_cell;
            if (keep("--pad")) cfg.grid.pad = flag_cfg.grid.pad;
            if (keep("--out")) cfg.out_dir = flag_cfg.out_dir;
            if (keep("--svg")) cfg.svg = flag_cfg.svg;
            if (keep("--jobs")) cfg.jobs = flag_cfg.jobs;
            if (keep("--seed")) cfg.seed = flag_cfg.seed;
        }
        // BICWAVE_OUT overrides everything but an explicit --out
        if (const char* env = std::getenv("BICWAVE_OUT")) {
            CLI::App* active = app.get_subcommands().front();
            if (active->count("--out") == 0) cfg.out_dir = env;
        }
        cfg.validate();
        if (cfg.below_evanescent_regime())
            std::cerr << "warning: m*d = " << cfg.m * cfg.d
                      << " < 1; results leave the evanescent regime the theory assumes\n";

        if (spectrum->parsed()) cmd_spectrum(cfg);
        else if (bic->parsed()) cmd_bic(cfg);
        else if (multimer->parsed()) cmd_multimer(cfg);
        else if (selfenergy->parsed()) cmd_selfenergy(cfg, energy_spec);
        else if (oracle->parsed()) cmd_oracle(cfg, N_k, K_override);
        else if (figures->parsed()) cmd_figures(cfg);
        return kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
}
