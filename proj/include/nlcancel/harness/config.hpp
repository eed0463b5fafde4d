// SPDX-License-Identifier: Apache-2.0
//
// Scenario configuration for Monte-Carlo cancellation experiments.
//
// File format: one `key = value` per line, `#` starts a comment, keys are the
// ScenarioConfig field names. Lists are comma separated; numeric lists also
// accept `start:step:stop` ranges (inclusive). Unknown or repeated keys are
// errors. Example:
//
//     scenario = imd
//     p = 2
//     q = -1
//     solvers = sparse:9, prior:9, hammerstein:9, full
//     sweep_axis = P_s
//     P_s_dbm = -110:5:-80
//     trials = 100
#pragma once

#include "nlcancel/dictionary.hpp"
#include "nlcancel/distortion.hpp"
#include "nlcancel/errors.hpp"
#include "nlcancel/signal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace nlcancel {

enum class SolverId { sparse, full, prior, hammerstein };

inline std::string_view to_string(SolverId id)
{
    switch (id) {
    case SolverId::sparse: return "sparse";
    case SolverId::full: return "full";
    case SolverId::prior: return "prior";
    case SolverId::hammerstein: return "hammerstein";
    }
    return "?";
}

struct SolverSpec {
    SolverId id = SolverId::sparse;
    std::optional<std::size_t> J; // unset: full/prior use their natural size, others follow a J sweep
};

enum class SweepAxis { P_s, J };
enum class ChannelPolicy { per_trial, fixed };

struct ScenarioConfig {
    DistortionKind scenario = DistortionKind::IMD;
    int Q = 3;
    int p = 2;
    int q = -1;

    // True leakage channels.
    std::size_t true_L = 4;
    std::size_t true_L1 = 3;
    std::size_t true_L2 = 3;
    double channel_decay = 0.6;
    ChannelPolicy channel_policy = ChannelPolicy::per_trial;

    // Lengths used to build the exact and prior-art dictionaries.
    std::size_t model_L = 4;
    std::size_t model_L1 = 3;
    std::size_t model_L2 = 3;
    bool prior_swap_sources = false;

    std::size_t P = 520;
    double distortion_dbm = -85.0;
    double inr_db = 0.0;
    SignalKind signal_kind = SignalKind::gaussian;

    std::vector<SolverSpec> solvers;
    SweepAxis sweep_axis = SweepAxis::P_s;
    std::vector<double> P_s_dbm{-95.0};
    std::vector<std::size_t> J_values;

    std::size_t trials = 100;
    std::uint64_t seed = 1;

    DistortionSpec distortion() const
    {
        return scenario == DistortionKind::HD ? DistortionSpec::hd(Q) : DistortionSpec::imd(p, q);
    }

    // Column count of the exact dictionary.
    std::size_t exact_terms() const
    {
        return scenario == DistortionKind::HD
                   ? static_cast<std::size_t>(hd_term_count(static_cast<std::uint64_t>(Q), model_L))
                   : static_cast<std::size_t>(imd_term_count(p, q, model_L1, model_L2));
    }

    ModelShape model_shape(std::size_t hammerstein_taps = 0) const
    {
        ModelShape s;
        s.L1 = scenario == DistortionKind::HD ? model_L : model_L1;
        s.L2 = model_L2;
        s.hammerstein_taps = hammerstein_taps;
        s.prior_swap_sources = prior_swap_sources;
        return s;
    }

    std::size_t sweep_size() const { return sweep_axis == SweepAxis::P_s ? P_s_dbm.size() : J_values.size(); }

    double P_s_at(std::size_t sweep_index) const
    {
        return sweep_axis == SweepAxis::P_s ? P_s_dbm.at(sweep_index) : P_s_dbm.front();
    }

    // Dictionary size a solver uses at a sweep point.
    std::size_t solver_J(const SolverSpec& s, std::size_t sweep_index) const
    {
        switch (s.id) {
        case SolverId::full: return exact_terms();
        case SolverId::prior: return model_L1 * model_L2;
        case SolverId::sparse:
        case SolverId::hammerstein:
            if (sweep_axis == SweepAxis::J && !s.J) return J_values.at(sweep_index);
            return s.J.value();
        }
        return 0;
    }

    void validate() const
    {
        auto fail = [](const std::string& msg) { throw ConfigError("config: " + msg); };
        try {
            distortion().validate();
        } catch (const std::invalid_argument& e) {
            fail(e.what());
        }
        if (true_L < 1 || true_L1 < 1 || true_L2 < 1) fail("true channel lengths must be >= 1");
        if (model_L < 1 || model_L1 < 1 || model_L2 < 1) fail("model lengths must be >= 1");
        if (!(channel_decay > 0.0 && channel_decay <= 1.0)) fail("channel_decay must be in (0, 1]");
        if (P < 1) fail("P must be >= 1");
        if (trials < 1) fail("trials must be >= 1");
        if (!std::isfinite(distortion_dbm)) fail("distortion_dbm must be finite");
        if (std::isnan(inr_db) || inr_db == -INFINITY) fail("inr_db must be finite or inf");
        if (solvers.empty()) fail("solver list is empty");
        if (P_s_dbm.empty()) fail("P_s_dbm is empty");
        for (double v : P_s_dbm)
            if (std::isnan(v) || v == INFINITY) fail("P_s_dbm entries must be finite or -inf");
        if (sweep_axis == SweepAxis::J) {
            if (J_values.empty()) fail("sweep_axis = J needs J_values");
            if (P_s_dbm.size() != 1) fail("sweep_axis = J takes a single P_s_dbm value");
        }

        const std::size_t exact = exact_terms();
        for (const auto& s : solvers) {
            const auto name = std::string(to_string(s.id));
            if (s.id == SolverId::prior && scenario != DistortionKind::IMD)
                fail("prior-art solver is defined for IMD only");
            if (s.id == SolverId::full && s.J && *s.J != exact)
                fail("full solver J must equal the exact term count " + std::to_string(exact));
            if (s.id == SolverId::prior && s.J && *s.J != model_L1 * model_L2)
                fail("prior solver J must equal model_L1 * model_L2");
            if ((s.id == SolverId::sparse || s.id == SolverId::hammerstein) && !s.J &&
                sweep_axis != SweepAxis::J)
                fail(name + " solver needs an explicit J outside a J sweep");
            for (std::size_t i = 0; i < sweep_size(); ++i) {
                const std::size_t J = solver_J(s, i);
                if (J < 1) fail(name + " J must be >= 1");
                if (s.id == SolverId::sparse && J > exact)
                    fail("sparse J exceeds exact dictionary size " + std::to_string(exact));
                if (J > P) fail("P must be >= every dictionary size");
            }
        }
        if (exact > P) fail("P must be >= every dictionary size");
    }
};

namespace detail {

inline std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(std::string_view s)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto pos = s.find(',', start);
        auto item = trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (!item.empty()) out.push_back(std::move(item));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline double parse_double(const std::string& key, const std::string& v)
{
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
    }
}

inline long long parse_int(const std::string& key, const std::string& v)
{
    try {
        std::size_t used = 0;
        const long long x = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: '" + key + "' expects an integer, got '" + v + "'");
    }
}

inline std::size_t parse_count(const std::string& key, const std::string& v)
{
    const long long x = parse_int(key, v);
    if (x < 0) throw ConfigError("config: '" + key + "' must be non-negative");
    return static_cast<std::size_t>(x);
}

inline std::vector<double> parse_double_list(const std::string& key, const std::string& v)
{
    std::vector<double> out;
    for (const auto& item : split_list(v)) {
        const auto c1 = item.find(':');
        if (c1 == std::string::npos) {
            out.push_back(parse_double(key, item));
            continue;
        }
        const auto c2 = item.find(':', c1 + 1);
        if (c2 == std::string::npos) throw ConfigError("config: '" + key + "' range must be start:step:stop");
        const double a = parse_double(key, trim(item.substr(0, c1)));
        const double step = parse_double(key, trim(item.substr(c1 + 1, c2 - c1 - 1)));
        const double b = parse_double(key, trim(item.substr(c2 + 1)));
        if (step == 0.0 || (b - a) / step < 0) throw ConfigError("config: '" + key + "' has an empty range");
        const auto n = static_cast<long long>(std::floor((b - a) / step + 1e-9));
        for (long long i = 0; i <= n; ++i) out.push_back(a + static_cast<double>(i) * step);
    }
    return out;
}

inline bool parse_bool(const std::string& key, const std::string& v)
{
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config: '" + key + "' expects true/false");
}

inline SolverSpec parse_solver(const std::string& item)
{
    const auto colon = item.find(':');
    const std::string name = trim(item.substr(0, colon));
    SolverSpec s;
    if (name == "sparse" || name == "omp") s.id = SolverId::sparse;
    else if (name == "full") s.id = SolverId::full;
    else if (name == "prior") s.id = SolverId::prior;
    else if (name == "hammerstein") s.id = SolverId::hammerstein;
    else throw ConfigError("config: unknown solver '" + name + "'");
    if (colon != std::string::npos) s.J = parse_count("solvers", trim(item.substr(colon + 1)));
    return s;
}

} // namespace detail

// Parses and validates a configuration document.
inline ScenarioConfig parse_config(std::istream& in)
{
    using namespace detail;
    ScenarioConfig c;
    std::map<std::string, bool> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(body.substr(0, eq));
        const std::string val = trim(body.substr(eq + 1));
        if (seen[key]) throw ConfigError("config: duplicate key '" + key + "'");
        seen[key] = true;

        if (key == "scenario") {
            if (val == "hd" || val == "HD") c.scenario = DistortionKind::HD;
            else if (val == "imd" || val == "IMD") c.scenario = DistortionKind::IMD;
            else throw ConfigError("config: scenario must be hd or imd");
        }
        else if (key == "Q") c.Q = static_cast<int>(parse_int(key, val));
        else if (key == "p") c.p = static_cast<int>(parse_int(key, val));
        else if (key == "q") c.q = static_cast<int>(parse_int(key, val));
        else if (key == "true_L") c.true_L = parse_count(key, val);
        else if (key == "true_L1") c.true_L1 = parse_count(key, val);
        else if (key == "true_L2") c.true_L2 = parse_count(key, val);
        else if (key == "channel_decay") c.channel_decay = parse_double(key, val);
        else if (key == "channel_policy") {
            if (val == "per_trial") c.channel_policy = ChannelPolicy::per_trial;
            else if (val == "fixed") c.channel_policy = ChannelPolicy::fixed;
            else throw ConfigError("config: channel_policy must be per_trial or fixed");
        }
        else if (key == "model_L") c.model_L = parse_count(key, val);
        else if (key == "model_L1") c.model_L1 = parse_count(key, val);
        else if (key == "model_L2") c.model_L2 = parse_count(key, val);
        else if (key == "prior_swap_sources") c.prior_swap_sources = parse_bool(key, val);
        else if (key == "P") c.P = parse_count(key, val);
        else if (key == "distortion_dbm") c.distortion_dbm = parse_double(key, val);
        else if (key == "inr_db") c.inr_db = parse_double(key, val);
        else if (key == "signal_kind") {
            try {
                c.signal_kind = parse_signal_kind(val);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(std::string("config: ") + e.what());
            }
        }
        else if (key == "solvers") {
            c.solvers.clear();
            for (const auto& item : split_list(val)) c.solvers.push_back(parse_solver(item));
        }
        else if (key == "sweep_axis") {
            if (val == "P_s") c.sweep_axis = SweepAxis::P_s;
            else if (val == "J") c.sweep_axis = SweepAxis::J;
            else throw ConfigError("config: sweep_axis must be P_s or J");
        }
        else if (key == "P_s_dbm") c.P_s_dbm = parse_double_list(key, val);
        else if (key == "J_values") {
            c.J_values.clear();
            for (double v : parse_double_list(key, val)) {
                if (v < 1 || v != std::floor(v)) throw ConfigError("config: J_values must be positive integers");
                c.J_values.push_back(static_cast<std::size_t>(v));
            }
        }
        else if (key == "trials") c.trials = parse_count(key, val);
        else if (key == "seed") {
            const long long s = parse_int(key, val);
            c.seed = static_cast<std::uint64_t>(s);
        }
        else throw ConfigError("config: unknown key '" + key + "'");
    }
    c.validate();
    return c;
}

inline ScenarioConfig parse_config(std::string_view text)
{
    std::istringstream in{std::string(text)};
    return parse_config(in);
}

inline ScenarioConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in);
}

} // namespace nlcancel
