// SPDX-License-Identifier: Apache-2.0
//
// nlcancel: run cancellation experiments and inspect dictionary sizes.
//
//   nlcancel simulate --config imd.cfg --out imd.csv [--seed N] [--trials N] [--threads N]
//   nlcancel counts --scenario hd --Q 3 --L 4
//   nlcancel counts --scenario imd --p 2 --q -1 --L1 3 --L2 3

#include "nlcancel/nlcancel.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <iostream>
#include <optional>

int main(int argc, char** argv)
{
    CLI::App app{"Sparse digital cancellation of receiver nonlinear distortion"};
    app.set_version_flag("--version", std::string("nlcancel ") + NLCANCEL_VERSION);
    app.require_subcommand(1);

    auto* sim = app.add_subcommand("simulate", "Run a Monte-Carlo sweep and write CSV results");
    std::string config_path, out_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    unsigned threads = 1;
    sim->add_option("--config", config_path, "Scenario config file")->required()->check(CLI::ExistingFile);
    sim->add_option("--out", out_path, "Row CSV path (aggregates go to <out>.agg.csv)")->required();
    sim->add_option("--seed", seed, "Override the master seed");
    sim->add_option("--trials", trials, "Override the trial count")->check(CLI::PositiveNumber);
    sim->add_option("--threads", threads, "Worker threads (0 = all cores)");

    auto* counts = app.add_subcommand("counts", "Print the exact dictionary size");
    std::string scenario;
    long long Q = 3, p = 2, q = -1;
    unsigned long long L = 4, L1 = 3, L2 = 3;
    counts->add_option("--scenario", scenario, "hd or imd")->required()->check(CLI::IsMember({"hd", "imd"}));
    counts->add_option("--Q", Q, "HD order");
    counts->add_option("--L", L, "HD model length");
    counts->add_option("--p", p, "IMD exponent of source 1");
    counts->add_option("--q", q, "IMD exponent of source 2");
    counts->add_option("--L1", L1, "IMD model length, source 1");
    counts->add_option("--L2", L2, "IMD model length, source 2");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) {
            auto cfg = nlcancel::load_config(config_path);
            if (seed) cfg.seed = *seed;
            if (trials) cfg.trials = *trials;
            const auto t0 = std::chrono::steady_clock::now();
            const auto res = nlcancel::run_sweep_to_files(cfg, out_path, threads);
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            std::size_t failed = 0;
            for (const auto& r : res.rows) {
                if (!r.failed()) continue;
                if (failed++ < 10)
                    std::cerr << "warning: " << r.solver_id << " trial " << r.trial_index << ": " << r.diagnostic << '\n';
            }
            std::cerr << res.rows.size() << " rows (" << failed << " failed), " << res.aggregates.size()
                      << " aggregates in " << secs << " s\n";
            for (const auto& a : res.aggregates)
                if (a.metric == "median_residual_dbm")
                    std::cout << a.solver_id << " J=" << a.J << " P_s=" << a.P_s_dbm
                              << " dBm  median residual " << nlcancel::format_db(a.value) << " dBm\n";
        } else if (*counts) {
            if (Q < 1 || L < 1 || L1 < 1 || L2 < 1)
                throw std::invalid_argument("orders and lengths must be >= 1");
            const auto n = scenario == "hd"
                               ? nlcancel::hd_term_count(static_cast<std::uint64_t>(Q), L)
                               : nlcancel::imd_term_count(p, q, L1, L2);
            std::cout << n << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
