// SPDX-License-Identifier: Apache-2.0
//
// Monte-Carlo runner: per trial, synthesize leakage through random chip
// channels, distort, assemble the received frame, then estimate and cancel the
// distortion with every configured solver.
//
// Seeding. With master seed m and trial index t:
//     trial seed   T = child_seed(m, {t}, "trial")
//     role seeds   child_seed(T, {}, role), role in {s1, s2, frame}
//     channel      child_seed(T, {}, "h1"/"h2"); with channel_policy = fixed
//                  child_seed(m, {}, "h1"/"h2") instead
// The sweep index is deliberately not mixed in: all sweep points of one trial
// see the same signals and channels. Each (sweep point, trial) is a pure
// function of the config, so results do not depend on thread scheduling.
#pragma once

#include "nlcancel/canceller.hpp"
#include "nlcancel/dictionary.hpp"
#include "nlcancel/distortion.hpp"
#include "nlcancel/harness/config.hpp"
#include "nlcancel/seeding.hpp"
#include "nlcancel/signal.hpp"
#include "nlcancel/solvers.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

namespace nlcancel {

// h(k) = decay^k * g_k, g_k i.i.d. unit circular Gaussian, scaled to unit energy.
inline ChipChannel random_channel(std::size_t L, double decay, std::uint64_t seed)
{
    if (L < 1) throw std::invalid_argument("random_channel: L must be >= 1");
    if (!(decay > 0.0 && decay <= 1.0)) throw std::invalid_argument("random_channel: decay must be in (0, 1]");
    std::mt19937_64 rng(seed);
    auto g = detail::gaussian_samples(L, rng);
    double energy = 0.0;
    double w = 1.0;
    for (auto& t : g) {
        t *= w;
        w *= decay;
        energy += std::norm(t);
    }
    const double scale = 1.0 / std::sqrt(energy);
    for (auto& t : g) t *= scale;
    return ChipChannel(std::move(g));
}

struct ResultRow {
    std::string scenario;
    std::string solver_id;
    std::size_t J = 0;
    double P_s_dbm = 0.0;
    std::size_t trial_index = 0;
    double original_distortion_dbm = 0.0;
    double residual_distortion_dbm = 0.0;
    double suppression_db = 0.0;
    std::uint64_t seed = 0;
    std::string diagnostic; // empty on success; residual fields are NaN otherwise

    bool failed() const { return !diagnostic.empty(); }
};

inline std::uint64_t trial_seed(const ScenarioConfig& c, std::size_t trial_index)
{
    return child_seed(c.seed, {static_cast<std::uint64_t>(trial_index)}, "trial");
}

// The noiseless-of-DL part of a trial: sources, channels and scaled distortion.
struct TrialSignals {
    BasebandSignal s1;
    std::optional<BasebandSignal> s2;
    BasebandSignal p; // unscaled distortion
};

inline TrialSignals synthesize_trial(const ScenarioConfig& c, std::size_t trial_index)
{
    const std::uint64_t T = trial_seed(c, trial_index);
    const std::uint64_t chan_parent = c.channel_policy == ChannelPolicy::fixed ? c.seed : T;
    const auto spec = c.distortion();

    TrialSignals ts;
    ts.s1 = generate_block(c.P, c.signal_kind, child_seed(T, {}, "s1"));
    if (c.scenario == DistortionKind::HD) {
        const auto h = random_channel(c.true_L, c.channel_decay, child_seed(chan_parent, {}, "h1"));
        ts.p = hd_distortion(fir_filter(ts.s1, h), spec);
    } else {
        ts.s2 = generate_block(c.P, c.signal_kind, child_seed(T, {}, "s2"));
        const auto h1 = random_channel(c.true_L1, c.channel_decay, child_seed(chan_parent, {}, "h1"));
        const auto h2 = random_channel(c.true_L2, c.channel_decay, child_seed(chan_parent, {}, "h2"));
        ts.p = imd_distortion(fir_filter(ts.s1, h1), fir_filter(*ts.s2, h2), spec);
    }
    return ts;
}

// One row per configured solver, in config order. Estimation failures become
// rows with a diagnostic instead of exceptions.
inline std::vector<ResultRow> run_trial(const ScenarioConfig& c, std::size_t sweep_index, std::size_t trial_index)
{
    const auto spec = c.distortion();
    const double P_s = c.P_s_at(sweep_index);
    const std::uint64_t T = trial_seed(c, trial_index);
    const auto ts = synthesize_trial(c, trial_index);
    const auto frame = make_frame(ts.p, {c.distortion_dbm}, {P_s}, c.inr_db, child_seed(T, {}, "frame"));
    const BasebandSignal* s2 = ts.s2 ? &*ts.s2 : nullptr;

    std::optional<Dictionary> exact;
    auto exact_dictionary = [&]() -> const Dictionary& {
        if (!exact) exact = build_dictionary(ModelKind::Exact, ts.s1, s2, spec, c.model_shape());
        return *exact;
    };

    std::vector<ResultRow> rows;
    for (const auto& solver : c.solvers) {
        ResultRow row;
        row.scenario = c.scenario == DistortionKind::HD ? "hd" : "imd";
        row.solver_id = std::string(to_string(solver.id));
        row.J = c.solver_J(solver, sweep_index);
        row.P_s_dbm = P_s;
        row.trial_index = trial_index;
        row.seed = T;
        row.original_distortion_dbm = measure_power(frame.p_true).dbm;
        try {
            BasebandSignal p_hat;
            switch (solver.id) {
            case SolverId::sparse: {
                const auto& D = exact_dictionary();
                p_hat = reconstruct(D, omp_solve(D, frame.r, row.J).v_hat);
                break;
            }
            case SolverId::full: {
                const auto& D = exact_dictionary();
                p_hat = reconstruct(D, lls_solve(D, frame.r).v_hat);
                break;
            }
            case SolverId::prior:
            case SolverId::hammerstein: {
                const auto model = solver.id == SolverId::prior ? ModelKind::PriorArt : ModelKind::Hammerstein;
                const auto D = build_dictionary(model, ts.s1, s2, spec, c.model_shape(row.J));
                p_hat = reconstruct(D, lls_solve(D, frame.r).v_hat);
                break;
            }
            }
            const auto rep = make_report(frame, p_hat, row.solver_id, row.J);
            row.residual_distortion_dbm = rep.residual_distortion_dbm;
            row.suppression_db = rep.suppression_db;
        } catch (const std::exception& e) {
            row.diagnostic = e.what();
            row.residual_distortion_dbm = std::numeric_limits<double>::quiet_NaN();
            row.suppression_db = std::numeric_limits<double>::quiet_NaN();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

struct AggregateRow {
    std::string scenario;
    std::string solver_id;
    std::size_t J = 0;
    double P_s_dbm = 0.0;
    std::string metric; // median_residual_dbm | mean_residual_dbm
    double value = 0.0;
};

struct SweepResult {
    std::vector<ResultRow> rows;            // ordered by (sweep point, trial, solver)
    std::vector<AggregateRow> aggregates;   // ordered by (sweep point, solver, metric)
};

// Median of the dBm values (failed rows skipped; midpoint average for even counts).
inline double median_dbm(std::vector<double> v)
{
    std::erase_if(v, [](double x) { return std::isnan(x); });
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    const double a = v[n / 2 - 1], b = v[n / 2];
    if (std::isinf(a) || std::isinf(b)) return a; // avoid -inf + finite ambiguity
    return 0.5 * (a + b);
}

// Mean taken in linear power, reported in dBm.
inline double mean_dbm(const std::vector<double>& v)
{
    double acc = 0.0;
    std::size_t n = 0;
    for (double x : v) {
        if (std::isnan(x)) continue;
        acc += std::isinf(x) ? 0.0 : std::pow(10.0, x / 10.0);
        ++n;
    }
    if (n == 0) return std::numeric_limits<double>::quiet_NaN();
    if (acc == 0.0) return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(acc / static_cast<double>(n));
}

inline std::vector<AggregateRow> aggregate(const ScenarioConfig& c, const std::vector<ResultRow>& rows)
{
    std::vector<AggregateRow> out;
    const std::size_t S = c.solvers.size();
    for (std::size_t sp = 0; sp < c.sweep_size(); ++sp) {
        for (std::size_t si = 0; si < S; ++si) {
            std::vector<double> residuals;
            residuals.reserve(c.trials);
            for (std::size_t t = 0; t < c.trials; ++t)
                residuals.push_back(rows[(sp * c.trials + t) * S + si].residual_distortion_dbm);
            const auto& first = rows[(sp * c.trials) * S + si];
            out.push_back({first.scenario, first.solver_id, first.J, first.P_s_dbm, "median_residual_dbm",
                           median_dbm(residuals)});
            out.push_back({first.scenario, first.solver_id, first.J, first.P_s_dbm, "mean_residual_dbm",
                           mean_dbm(residuals)});
        }
    }
    return out;
}

// Runs sweep points x trials on `threads` workers (0 = hardware concurrency).
inline SweepResult run_sweep(const ScenarioConfig& c, unsigned threads = 1)
{
    c.validate();
    const std::size_t tasks = c.sweep_size() * c.trials;
    const std::size_t S = c.solvers.size();
    std::vector<std::vector<ResultRow>> slots(tasks);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};

    auto worker = [&] {
        for (std::size_t i = next++; i < tasks && !failed; i = next++) {
            try {
                slots[i] = run_trial(c, i / c.trials, i % c.trials);
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
            }
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, tasks));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    SweepResult res;
    res.rows.reserve(tasks * S);
    for (auto& s : slots)
        for (auto& r : s) res.rows.push_back(std::move(r));
    res.aggregates = aggregate(c, res.rows);
    return res;
}

// ---------------------------------------------------------------------------
// CSV output

inline constexpr const char* kRowHeader = "scenario,solver,J,P_s_dbm,trial,original_dbm,residual_dbm,suppression_db,seed";
inline constexpr const char* kAggregateHeader = "scenario,solver,J,P_s_dbm,metric,value";

inline std::string format_db(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

inline void write_rows_csv(std::ostream& os, const std::vector<ResultRow>& rows)
{
    os << kRowHeader << '\n';
    for (const auto& r : rows) {
        os << r.scenario << ',' << r.solver_id << ',' << r.J << ',' << format_db(r.P_s_dbm) << ','
           << r.trial_index << ',' << format_db(r.original_distortion_dbm) << ','
           << format_db(r.residual_distortion_dbm) << ',' << format_db(r.suppression_db) << ',' << r.seed << '\n';
    }
}

inline void write_aggregates_csv(std::ostream& os, const std::vector<AggregateRow>& rows)
{
    os << kAggregateHeader << '\n';
    for (const auto& a : rows)
        os << a.scenario << ',' << a.solver_id << ',' << a.J << ',' << format_db(a.P_s_dbm) << ',' << a.metric
           << ',' << format_db(a.value) << '\n';
}

// Writes `out_path` and `out_path + ".agg.csv"`. Both files are opened before
// any simulation work, so a bad path fails fast.
inline SweepResult run_sweep_to_files(const ScenarioConfig& c, const std::string& out_path, unsigned threads)
{
    c.validate();
    std::ofstream rows_out(out_path, std::ios::binary | std::ios::trunc);
    if (!rows_out) throw std::ios_base::failure("cannot open output file '" + out_path + "'");
    const std::string agg_path = out_path + ".agg.csv";
    std::ofstream agg_out(agg_path, std::ios::binary | std::ios::trunc);
    if (!agg_out) throw std::ios_base::failure("cannot open output file '" + agg_path + "'");

    auto res = run_sweep(c, threads);
    write_rows_csv(rows_out, res.rows);
    write_aggregates_csv(agg_out, res.aggregates);
    rows_out.flush();
    agg_out.flush();
    if (!rows_out || !agg_out) throw std::ios_base::failure("error while writing CSV output");
    return res;
}

} // namespace nlcancel
