#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "bicwave/bic.hpp"
#include "bicwave/io.hpp"
#include "bicwave/model.hpp"
#include "bicwave/quadrature.hpp"

namespace bicwave {

/**
 * Run configuration shared by all CLI subcommands.
 * Precedence: command-line flags > --config JSON file > defaults.
 */
struct RunConfig {
    double m = 1.0;
    double gamma = 0.1;
    double d = 5.0;
    int n = 30;
    int nu = 1;
    int j = 0;                // 0 = not selected
    double b1_override = 0.0; // 0 = derive from the physical model
    bool model_free = false;
    QuadratureConfig quad{};
    GridSpec grid{};
    std::string out_dir = ".";
    bool svg = false;
    int jobs = 1;
    std::uint64_t seed = 12345; // reserved for randomized sweeps/tooling

    WaveguideModel model() const { return WaveguideModel(m, gamma); }

    void validate() const {
        if (!(m > 0.0) || !(gamma > 0.0) || !(d > 0.0))
            throw ConfigError("config: m, gamma, d must be positive");
        if (n < 1) throw ConfigError("config: n must be >= 1");
        if (nu < 0) throw ConfigError("config: nu must be >= 0");
        if (jobs < 1) throw ConfigError("config: jobs must be >= 1");
        quad.validate();
    }

    bool below_evanescent_regime() const { return m * d < 1.0; }

    /// Canonical serialization; the fingerprint stamped into every CSV.
    std::string canonical_string() const {
        std::ostringstream os;
        os << "m=" << fmt(m) << ";gamma=" << fmt(gamma) << ";d=" << fmt(d) << ";n=" << n
           << ";nu=" << nu << ";j=" << j << ";b1=" << fmt(b1_override)
           << ";model_free=" << model_free << ";rel_tol=" << fmt(quad.rel_tol)
           << ";abs_tol=" << fmt(quad.abs_tol) << ";k_max=" << fmt(quad.k_max)
           << ";per_cell=" << grid.per_cell << ";pad=" << fmt(grid.pad) << ";svg=" << svg
           << ";seed=" << seed;
        return os.str();
    }

    std::string fingerprint() const { return hex64(fnv1a(canonical_string())); }
};

/// Overlay values from a JSON file; unknown keys are rejected.
inline void load_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config: parse error in " + path + ": " + e.what());
    }
    for (auto& [key, value] : doc.items()) {
        if (key == "m") cfg.m = value.get<double>();
        else if (key == "gamma") cfg.gamma = value.get<double>();
        else if (key == "d") cfg.d = value.get<double>();
        else if (key == "n") cfg.n = value.get<int>();
        else if (key == "nu") cfg.nu = value.get<int>();
        else if (key == "j") cfg.j = value.get<int>();
        else if (key == "b1") cfg.b1_override = value.get<double>();
        else if (key == "model_free") cfg.model_free = value.get<bool>();
        else if (key == "rel_tol") cfg.quad.rel_tol = value.get<double>();
        else if (key == "abs_tol") cfg.quad.abs_tol = value.get<double>();
        else if (key == "k_max") cfg.quad.k_max = value.get<double>();
        else if (key == "grid_per_cell") cfg.grid.per_cell = value.get<int>();
        else if (key == "pad") cfg.grid.pad = value.get<double>();
        else if (key == "out") cfg.out_dir = value.get<std::string>();
        else if (key == "svg") cfg.svg = value.get<bool>();
        else if (key == "jobs") cfg.jobs = value.get<int>();
        else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
        else throw ConfigError("config: unknown key '" + key + "' in " + path);
    }
}

} // namespace bicwave
