// SPDX-License-Identifier: Apache-2.0
//
// Complex-baseband signal blocks: generation, FIR filtering and power handling.
//
// Power convention: amplitude^2 of 1.0 is 1 mW, so a block with unit mean-square
// magnitude sits at 0 dBm. All levels are realized per block, never as ensemble
// expectations.
#pragma once

#include "nlcancel/errors.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nlcancel {

using cplx = std::complex<double>;

// Power in dBm. An all-zero block reports -infinity.
struct PowerLevel {
    double dbm = 0.0;

    static constexpr PowerLevel silent() { return {-std::numeric_limits<double>::infinity()}; }
    bool is_silent() const { return std::isinf(dbm) && dbm < 0; }
    double linear() const { return is_silent() ? 0.0 : std::pow(10.0, dbm / 10.0); }

    friend bool operator==(const PowerLevel&, const PowerLevel&) = default;
};

class BasebandSignal {
public:
    BasebandSignal() = default;

    explicit BasebandSignal(std::vector<cplx> samples, std::string label = {})
        : samples_(std::move(samples)), label_(std::move(label))
    {
        for (const auto& v : samples_)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw std::invalid_argument("BasebandSignal: non-finite sample");
    }

    static BasebandSignal zeros(std::size_t P, std::string label = {})
    {
        return BasebandSignal(std::vector<cplx>(P), std::move(label));
    }

    std::size_t size() const { return samples_.size(); }
    bool empty() const { return samples_.empty(); }
    const cplx& operator[](std::size_t n) const { return samples_[n]; }
    std::span<const cplx> samples() const { return samples_; }
    const std::string& label() const { return label_; }

    bool all_zero() const
    {
        for (const auto& v : samples_)
            if (v != cplx{}) return false;
        return true;
    }

    double energy() const
    {
        double e = 0.0;
        for (const auto& v : samples_) e += std::norm(v);
        return e;
    }

    BasebandSignal scaled(double factor, std::string label = {}) const
    {
        std::vector<cplx> out(samples_);
        for (auto& v : out) v *= factor;
        return BasebandSignal(std::move(out), label.empty() ? label_ : std::move(label));
    }

    friend bool operator==(const BasebandSignal& a, const BasebandSignal& b)
    {
        return a.samples_ == b.samples_;
    }

private:
    std::vector<cplx> samples_;
    std::string label_;
};

// Elementwise sum of equal-length blocks.
inline BasebandSignal operator+(const BasebandSignal& a, const BasebandSignal& b)
{
    if (a.size() != b.size()) throw std::invalid_argument("signal sum: length mismatch");
    std::vector<cplx> out(a.size());
    for (std::size_t n = 0; n < a.size(); ++n) out[n] = a[n] + b[n];
    return BasebandSignal(std::move(out));
}

inline BasebandSignal operator-(const BasebandSignal& a, const BasebandSignal& b)
{
    if (a.size() != b.size()) throw std::invalid_argument("signal difference: length mismatch");
    std::vector<cplx> out(a.size());
    for (std::size_t n = 0; n < a.size(); ++n) out[n] = a[n] - b[n];
    return BasebandSignal(std::move(out));
}

// Complex FIR response h(0..L-1) of a leakage path.
class ChipChannel {
public:
    explicit ChipChannel(std::vector<cplx> taps) : taps_(std::move(taps))
    {
        if (taps_.empty()) throw std::invalid_argument("ChipChannel: needs at least one tap");
        bool any_nonzero = false;
        for (const auto& t : taps_) {
            if (!std::isfinite(t.real()) || !std::isfinite(t.imag()))
                throw std::invalid_argument("ChipChannel: non-finite tap");
            any_nonzero = any_nonzero || t != cplx{};
        }
        if (!any_nonzero) throw std::invalid_argument("ChipChannel: all taps are zero");
    }

    static ChipChannel impulse() { return ChipChannel({cplx{1.0, 0.0}}); }

    std::size_t length() const { return taps_.size(); }
    std::span<const cplx> taps() const { return taps_; }
    const cplx& operator[](std::size_t k) const { return taps_[k]; }

private:
    std::vector<cplx> taps_;
};

enum class SignalKind { gaussian, qpsk, qam16 };

inline std::string_view to_string(SignalKind k)
{
    switch (k) {
    case SignalKind::gaussian: return "gaussian";
    case SignalKind::qpsk: return "qpsk";
    case SignalKind::qam16: return "qam16";
    }
    return "?";
}

inline SignalKind parse_signal_kind(std::string_view s)
{
    if (s == "gaussian" || s == "circular-complex-gaussian") return SignalKind::gaussian;
    if (s == "qpsk") return SignalKind::qpsk;
    if (s == "qam16") return SignalKind::qam16;
    throw std::invalid_argument("unknown signal kind '" + std::string(s) + "'");
}

inline PowerLevel measure_power(const BasebandSignal& s)
{
    if (s.empty()) throw std::invalid_argument("measure_power: empty block");
    const double ms = s.energy() / static_cast<double>(s.size());
    if (ms == 0.0) return PowerLevel::silent();
    return {10.0 * std::log10(ms)};
}

// Rescales by a single positive real factor so the realized block power is `target`.
inline BasebandSignal set_power(const BasebandSignal& s, PowerLevel target)
{
    if (s.empty() || s.all_zero()) throw std::invalid_argument("set_power: all-zero block");
    if (!std::isfinite(target.dbm)) throw std::invalid_argument("set_power: non-finite target");
    const double ms = s.energy() / static_cast<double>(s.size());
    return s.scaled(std::sqrt(target.linear() / ms));
}

namespace detail {

// Unit-variance circular complex Gaussian: each component has variance 1/2.
inline std::vector<cplx> gaussian_samples(std::size_t P, std::mt19937_64& rng)
{
    std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
    std::vector<cplx> out(P);
    for (auto& v : out) {
        const double re = nd(rng);
        const double im = nd(rng);
        v = {re, im};
    }
    return out;
}

} // namespace detail

// Unit-power (0 dBm) block, deterministic in (P, kind, seed). Gaussian and QAM16
// blocks are normalized exactly; QPSK is unit modulus by construction.
inline BasebandSignal generate_block(std::size_t P, SignalKind kind, std::uint64_t seed)
{
    if (P == 0) throw std::invalid_argument("generate_block: P must be >= 1");
    std::mt19937_64 rng(seed);
    std::vector<cplx> out;
    switch (kind) {
    case SignalKind::gaussian:
        out = detail::gaussian_samples(P, rng);
        break;
    case SignalKind::qpsk: {
        const double a = 1.0 / std::sqrt(2.0);
        out.resize(P);
        for (auto& v : out) {
            const auto bits = rng();
            v = {(bits & 1u) ? a : -a, (bits & 2u) ? a : -a};
        }
        break;
    }
    case SignalKind::qam16: {
        static constexpr double levels[4] = {-3.0, -1.0, 1.0, 3.0};
        const double a = 1.0 / std::sqrt(10.0);
        out.resize(P);
        for (auto& v : out) {
            const auto bits = rng();
            v = {a * levels[bits & 3u], a * levels[(bits >> 2) & 3u]};
        }
        break;
    }
    }
    BasebandSignal block(std::move(out), std::string(to_string(kind)));
    if (kind == SignalKind::qpsk) return block;
    return set_power(block, {0.0});
}

// Circular complex white Gaussian noise realized at exactly `power`.
inline BasebandSignal awgn_block(std::size_t P, PowerLevel power, std::uint64_t seed)
{
    if (P == 0) throw std::invalid_argument("awgn_block: P must be >= 1");
    if (power.is_silent()) return BasebandSignal::zeros(P, "awgn");
    std::mt19937_64 rng(seed);
    return set_power(BasebandSignal(detail::gaussian_samples(P, rng), "awgn"), power);
}

// out(n) = sum_k h(k) s(n-k), with s(m) = 0 for m < 0. Output keeps the input length.
inline BasebandSignal fir_filter(const BasebandSignal& s, const ChipChannel& h)
{
    if (s.empty()) throw std::invalid_argument("fir_filter: empty input");
    const std::size_t P = s.size();
    std::vector<cplx> out(P);
    for (std::size_t n = 0; n < P; ++n) {
        cplx acc{};
        const std::size_t kmax = std::min(h.length(), n + 1);
        for (std::size_t k = 0; k < kmax; ++k) acc += h[k] * s[n - k];
        out[n] = acc;
    }
    return BasebandSignal(std::move(out), s.label());
}

} // namespace nlcancel
