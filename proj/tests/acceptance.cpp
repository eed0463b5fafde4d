// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include "nlcancel/nlcancel.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace nlcancel;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double median_of(const SweepResult& res, std::string_view solver, double P_s, std::size_t J = 0)
{
    for (const auto& a : res.aggregates)
        if (a.solver_id == solver && a.P_s_dbm == P_s && a.metric == "median_residual_dbm" && (J == 0 || a.J == J))
            return a.value;
    throw std::runtime_error("aggregate not found");
}

ScenarioConfig imd_config(std::vector<double> P_s, std::size_t trials, std::uint64_t seed)
{
    ScenarioConfig c;
    c.scenario = DistortionKind::IMD;
    c.p = 2;
    c.q = -1;
    c.true_L1 = c.true_L2 = 3;
    c.model_L1 = c.model_L2 = 3;
    c.channel_decay = 0.6;
    c.P = 520;
    c.distortion_dbm = -85.0;
    c.inr_db = 0.0;
    c.solvers = {{SolverId::sparse, 9}, {SolverId::prior, 9}, {SolverId::hammerstein, 9}, {SolverId::full, std::nullopt}};
    c.sweep_axis = SweepAxis::P_s;
    c.P_s_dbm = std::move(P_s);
    c.trials = trials;
    c.seed = seed;
    return c;
}

// 1: closed-form dictionary sizes.
Outcome dictionary_combinatorics()
{
    const auto hd = hd_term_count(3, 4);
    const auto imd = imd_term_count(2, -1, 3, 3);
    const auto s1 = generate_block(520, SignalKind::gaussian, 1);
    const auto s2 = generate_block(520, SignalKind::gaussian, 2);
    const auto prior = build_dictionary(ModelKind::PriorArt, s1, &s2, DistortionSpec::imd(2, -1), {.L1 = 3, .L2 = 3}).cols();
    const auto exact_hd = build_dictionary(ModelKind::Exact, s1, nullptr, DistortionSpec::hd(3), {.L1 = 4}).cols();
    const auto exact_imd = build_dictionary(ModelKind::Exact, s1, &s2, DistortionSpec::imd(2, -1), {.L1 = 3, .L2 = 3}).cols();
    return {hd == 20 && imd == 18 && prior == 9 && exact_hd == 20 && exact_imd == 18,
            fmt("HD L=%llu, IMD L=%llu, prior J=%zu, built exact %zu/%zu", (unsigned long long)hd,
                (unsigned long long)imd, prior, exact_hd, exact_imd)};
}

// 2: Cholesky-path OMP agrees with the QR reference.
Outcome omp_oracle_equivalence()
{
    std::mt19937_64 rng(2);
    double worst = 0.0;
    int support_mismatch = 0;
    for (int i = 0; i < 100; ++i) {
        const auto D = Dictionary::from_matrix(oracle::gaussian_matrix(520, 18, rng));
        const CVector v = oracle::sparse_vector(18, 6, rng, nullptr);
        const CVector y = D.columns() * v + 0.05 * oracle::gaussian_matrix(520, 1, rng).col(0);
        const std::size_t Js = 1 + static_cast<std::size_t>(i % 9);
        const auto a = omp_solve(D, to_signal(y), Js);
        const auto b = omp_solve_reference(D, to_signal(y), Js);
        if (a.support != b.support) ++support_mismatch;
        worst = std::max(worst, (a.v_hat - b.v_hat).norm() / b.v_hat.norm());
    }
    return {support_mismatch == 0 && worst <= 1e-9,
            fmt("support mismatches %d/100, worst coefficient rel. diff %.3e (tol 1e-9)", support_mismatch, worst)};
}

// Stationarity of one lls_solve call; returns the ratio to the tolerance base.
double stationarity_ratio(const Dictionary& D, const BasebandSignal& r, const LlsSolution& sol)
{
    const CVector y = as_vector(r);
    const CVector grad = D.columns().adjoint() * (y - D.columns() * D.normalize(sol.v_hat));
    return grad.cwiseAbs().maxCoeff() / (D.columns().adjoint() * y).cwiseAbs().maxCoeff();
}

struct StationarityLog {
    std::size_t calls = 0;
    double worst = 0.0;

    LlsSolution solve(const Dictionary& D, const BasebandSignal& r)
    {
        auto sol = lls_solve(D, r);
        ++calls;
        worst = std::max(worst, stationarity_ratio(D, r, sol));
        return sol;
    }
};

// 3: noiseless, DL-free frames are cancelled to arithmetic precision.
Outcome exact_recovery(StationarityLog& log)
{
    std::mt19937_64 rng(3);
    double worst = INFINITY;
    for (int i = 0; i < 50; ++i) {
        const auto s1 = generate_block(520, SignalKind::gaussian, rng());
        const auto s2 = generate_block(520, SignalKind::gaussian, rng());
        const auto h1 = random_channel(3, 0.6, rng());
        const auto h2 = random_channel(3, 0.6, rng());
        const auto h = random_channel(4, 0.6, rng());
        {
            const auto spec = DistortionSpec::imd(2, -1);
            const auto p = imd_distortion(fir_filter(s1, h1), fir_filter(s2, h2), spec);
            const auto f = make_frame(p, {-85.0}, PowerLevel::silent(), INFINITY, rng());
            const auto D = build_dictionary(ModelKind::Exact, s1, &s2, spec, {.L1 = 3, .L2 = 3});
            const auto rep = make_report(f, reconstruct(D, log.solve(D, f.r).v_hat), "full", D.cols());
            worst = std::min(worst, rep.suppression_db);
        }
        {
            const auto spec = DistortionSpec::hd(3);
            const auto p = hd_distortion(fir_filter(s1, h), spec);
            const auto f = make_frame(p, {-85.0}, PowerLevel::silent(), INFINITY, rng());
            const auto D = build_dictionary(ModelKind::Exact, s1, nullptr, spec, {.L1 = 4});
            const auto rep = make_report(f, reconstruct(D, log.solve(D, f.r).v_hat), "full", D.cols());
            worst = std::min(worst, rep.suppression_db);
        }
    }
    return {worst >= 100.0, fmt("minimum suppression over 50 IMD + 50 HD channels: %.1f dB (need >= 100)", worst)};
}

// 4: every LLS call of the acceptance sweeps satisfies the normal equations.
// Re-runs the criterion-6 trials' dictionaries through the logged solver.
Outcome normal_equation_stationarity(StationarityLog& log)
{
    const auto c = imd_config({-95.0}, 200, 6);
    const auto spec = c.distortion();
    for (std::size_t t = 0; t < c.trials; ++t) {
        const auto ts = synthesize_trial(c, t);
        const auto f = make_frame(ts.p, {c.distortion_dbm}, {-95.0}, c.inr_db, child_seed(trial_seed(c, t), {}, "frame"));
        for (auto model : {ModelKind::Exact, ModelKind::PriorArt, ModelKind::Hammerstein}) {
            const auto D = build_dictionary(model, ts.s1, &*ts.s2, spec, c.model_shape(9));
            log.solve(D, f.r);
        }
    }
    return {log.worst <= 1e-9,
            fmt("%zu lls_solve calls, worst |D^H(r-Dv)|_inf / |D^H r|_inf = %.3e (tol 1e-9)", log.calls, log.worst)};
}

// 5: OMP invariants on random instances.
Outcome omp_invariants()
{
    std::mt19937_64 rng(5);
    int violations = 0;
    double worst_orth = 0.0;
    for (int i = 0; i < 200; ++i) {
        const Eigen::Index P = 64 + static_cast<Eigen::Index>(rng() % 200);
        const Eigen::Index J = 8 + static_cast<Eigen::Index>(rng() % 20);
        const auto D = Dictionary::from_matrix(oracle::gaussian_matrix(P, J, rng));
        const CVector y = D.columns() * oracle::sparse_vector(J, 4, rng, nullptr) +
                          0.1 * oracle::gaussian_matrix(P, 1, rng).col(0);
        const auto r = to_signal(y);
        const std::size_t Js = 1 + rng() % static_cast<std::size_t>(std::min<Eigen::Index>(J, 12));
        const auto sol = omp_solve(D, r, Js);

        // Monotone residual, starting from ||y||.
        double prev = y.norm();
        for (double rn : sol.residual_norms) {
            if (rn > prev) ++violations;
            prev = rn;
        }
        // Distinct support.
        auto s = sol.support;
        std::sort(s.begin(), s.end());
        if (std::adjacent_find(s.begin(), s.end()) != s.end()) ++violations;
        // Residual orthogonal to the support after every iteration k (prefix runs).
        for (std::size_t k = 1; k <= sol.support.size(); ++k) {
            const auto pre = omp_solve(D, r, k);
            if (!std::equal(pre.support.begin(), pre.support.end(), sol.support.begin())) ++violations;
            const CVector res = y - D.columns() * D.normalize(pre.v_hat);
            for (auto idx : pre.support)
                worst_orth = std::max(worst_orth, std::abs(D.columns().col(Eigen::Index(idx)).dot(res)) / y.norm());
        }
        // Determinism, and ties resolved toward the lower index.
        if (omp_solve(D, r, Js).support != sol.support) ++violations;
        // Coordinate atoms in shuffled rows give bitwise-equal correlations.
        std::vector<Eigen::Index> rows(static_cast<std::size_t>(P));
        std::iota(rows.begin(), rows.end(), Eigen::Index{0});
        std::shuffle(rows.begin(), rows.end(), rng);
        CMatrix E = CMatrix::Zero(P, J);
        for (Eigen::Index j = 0; j < J; ++j) E(rows[static_cast<std::size_t>(j)], j) = 1.0;
        const auto orth = Dictionary::from_matrix(E);
        const auto a = static_cast<Eigen::Index>(rng() % static_cast<std::size_t>(J));
        auto b = static_cast<Eigen::Index>(rng() % static_cast<std::size_t>(J));
        if (b == a) b = (a + 1) % J;
        const auto tie = omp_solve(orth, to_signal(CVector(E.col(a) * cplx{0, 1.5} + E.col(b) * 1.5)), 1);
        if (tie.support.front() != static_cast<std::size_t>(std::min(a, b))) ++violations;
    }
    return {violations == 0 && worst_orth <= 1e-9,
            fmt("200 instances: %d violations, worst residual orthogonality %.3e * |r| (tol 1e-9)", violations, worst_orth)};
}

// 6: median ordering at P_s = -95 dBm.
Outcome median_ordering(const SweepResult& res)
{
    const double sparse = median_of(res, "sparse", -95.0);
    const double prior = median_of(res, "prior", -95.0);
    const double hamm = median_of(res, "hammerstein", -95.0);
    const double full = median_of(res, "full", -95.0);
    const double m_prior = prior - sparse, m_hamm = hamm - sparse, m_full = sparse - full;
    return {m_prior > 0 && m_hamm > 0 && m_full > 0,
            fmt("median residual dBm: sparse %.2f, prior %.2f, hammerstein %.2f, full %.2f; margins: "
                "sparse vs prior %.2f dB, sparse vs hammerstein %.2f dB, full vs sparse %.2f dB",
                sparse, prior, hamm, full, m_prior, m_hamm, m_full)};
}

// 7: HD tap sweep.
Outcome tap_sweep_shape()
{
    ScenarioConfig c;
    c.scenario = DistortionKind::HD;
    c.Q = 3;
    c.true_L = c.model_L = 4;
    c.channel_decay = 0.6;
    c.solvers = {{SolverId::sparse, std::nullopt}, {SolverId::hammerstein, std::nullopt}};
    c.sweep_axis = SweepAxis::J;
    c.J_values = {4, 5, 6, 7, 8, 9, 10};
    c.P_s_dbm = {-95.0};
    c.trials = 200;
    c.seed = 7;
    const auto res = run_sweep(c, 0);

    std::vector<double> sparse, hamm;
    for (std::size_t J : c.J_values) {
        sparse.push_back(median_of(res, "sparse", -95.0, J));
        hamm.push_back(median_of(res, "hammerstein", -95.0, J));
    }
    double worst_step = -INFINITY;
    for (std::size_t i = 1; i < sparse.size(); ++i) worst_step = std::max(worst_step, sparse[i] - sparse[i - 1]);
    const double hamm_range = *std::max_element(hamm.begin(), hamm.end()) - *std::min_element(hamm.begin(), hamm.end());
    std::string curve;
    for (std::size_t i = 0; i < sparse.size(); ++i) curve += fmt(" J=%zu:%.2f/%.2f", c.J_values[i], sparse[i], hamm[i]);
    return {worst_step <= 0.5 && hamm_range < 2.0,
            fmt("sparse worst step %+.2f dB (tol +0.5), hammerstein range %.2f dB (< 2); sparse/hamm:", worst_step,
                hamm_range) + curve};
}

// 8: high DL power degrades the sparse estimate.
Outcome high_ps_degradation()
{
    const auto res = run_sweep(imd_config({-110.0, -65.0}, 200, 8), 0);
    const double low = median_of(res, "sparse", -110.0);
    const double high = median_of(res, "sparse", -65.0);
    return {high > low, fmt("sparse median residual %.2f dBm at P_s=-65 vs %.2f dBm at P_s=-110", high, low)};
}

// 9: thread count does not change the CSV bytes.
Outcome determinism(const ScenarioConfig& c, const SweepResult& single)
{
    auto bytes = [](const SweepResult& r) {
        std::ostringstream os;
        write_rows_csv(os, r.rows);
        write_aggregates_csv(os, r.aggregates);
        return os.str();
    };
    const auto ref = bytes(single);
    const auto four = bytes(run_sweep(c, 4));
    const auto all = bytes(run_sweep(c, 0));
    return {ref == four && ref == all, fmt("%zu bytes; 1 vs 4 threads %s, 1 vs all cores %s", ref.size(),
                                          ref == four ? "identical" : "DIFFER", ref == all ? "identical" : "DIFFER")};
}

} // namespace

int main()
{
    int failures = 0;
    auto report = [&](int id, const char* name, const std::function<Outcome()>& fn) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("[%s] criterion %2d  %-34s %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
        std::fflush(stdout);
        failures += !o.pass;
    };

    StationarityLog lls_log;
    const auto c6 = imd_config({-95.0}, 200, 6);
    SweepResult c6_result;
    double c6_seconds = 0.0;

    report(1, "dictionary combinatorics", dictionary_combinatorics);
    report(2, "OMP oracle equivalence", omp_oracle_equivalence);
    report(3, "exact recovery (noiseless)", [&] { return exact_recovery(lls_log); });
    report(4, "normal-equation stationarity", [&] { return normal_equation_stationarity(lls_log); });
    report(5, "OMP invariants", omp_invariants);
    report(6, "IMD median ordering", [&] {
        const auto t0 = std::chrono::steady_clock::now();
        c6_result = run_sweep(c6, 1);
        c6_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return median_ordering(c6_result);
    });
    report(7, "HD tap-sweep shape", tap_sweep_shape);
    report(8, "high-P_s degradation", high_ps_degradation);
    report(9, "thread determinism", [&] { return determinism(c6, c6_result); });
    report(10, "desk-scale runtime", [&] {
        return Outcome{c6_seconds > 0.0 && c6_seconds < 60.0,
                       fmt("criterion-6 sweep (200 trials x 4 solvers, 1 thread) took %.2f s (limit 60 s)", c6_seconds)};
    });

    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
