// SPDX-License-Identifier: Apache-2.0
//
// LNA distortion synthesis (harmonic and inter-modulation) and received-frame
// assembly with ground-truth components.
#pragma once

#include "nlcancel/seeding.hpp"
#include "nlcancel/signal.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace nlcancel {

enum class DistortionKind { HD, IMD };

struct DistortionSpec {
    DistortionKind kind = DistortionKind::HD;
    int Q = 3;  // HD order
    int p = 2;  // IMD exponent on source 1
    int q = -1; // IMD exponent on source 2
    cplx c0{1.0, 0.0};

    static DistortionSpec hd(int Q, cplx c0 = {1.0, 0.0})
    {
        DistortionSpec s{DistortionKind::HD, Q, 0, 0, c0};
        s.validate();
        return s;
    }

    static DistortionSpec imd(int p, int q, cplx c0 = {1.0, 0.0})
    {
        DistortionSpec s{DistortionKind::IMD, 0, p, q, c0};
        s.validate();
        return s;
    }

    int order() const { return kind == DistortionKind::HD ? Q : std::abs(p) + std::abs(q); }

    void validate() const
    {
        if (!std::isfinite(c0.real()) || !std::isfinite(c0.imag()) || c0 == cplx{})
            throw std::invalid_argument("DistortionSpec: c0 must be finite and nonzero");
        if (kind == DistortionKind::HD) {
            if (Q < 2) throw std::invalid_argument("DistortionSpec: HD order Q must be >= 2");
        } else {
            if (p == 0 || q == 0) throw std::invalid_argument("DistortionSpec: IMD p and q must be nonzero");
            if (order() < 2) throw std::invalid_argument("DistortionSpec: IMD order must be >= 2");
        }
    }
};

namespace detail {

inline cplx ipow(cplx base, int e)
{
    cplx acc{1.0, 0.0};
    for (int i = 0; i < e; ++i) acc *= base;
    return acc;
}

} // namespace detail

// p(n) = c0 * x(n)^Q
inline BasebandSignal hd_distortion(const BasebandSignal& x, const DistortionSpec& spec)
{
    if (spec.kind != DistortionKind::HD) throw std::invalid_argument("hd_distortion: spec is not HD");
    spec.validate();
    std::vector<cplx> out(x.size());
    for (std::size_t n = 0; n < x.size(); ++n) out[n] = spec.c0 * detail::ipow(x[n], spec.Q);
    return BasebandSignal(std::move(out), "hd");
}

// p(n) = c0 * u1(n)^|p| * u2(n)^|q|, with u_i = conj(x_i) where the exponent is negative.
inline BasebandSignal imd_distortion(const BasebandSignal& x1, const BasebandSignal& x2,
                                     const DistortionSpec& spec)
{
    if (spec.kind != DistortionKind::IMD) throw std::invalid_argument("imd_distortion: spec is not IMD");
    spec.validate();
    if (x1.size() != x2.size()) throw std::invalid_argument("imd_distortion: length mismatch");
    const int e1 = std::abs(spec.p), e2 = std::abs(spec.q);
    std::vector<cplx> out(x1.size());
    for (std::size_t n = 0; n < x1.size(); ++n) {
        const cplx u1 = spec.p < 0 ? std::conj(x1[n]) : x1[n];
        const cplx u2 = spec.q < 0 ? std::conj(x2[n]) : x2[n];
        out[n] = spec.c0 * detail::ipow(u1, e1) * detail::ipow(u2, e2);
    }
    return BasebandSignal(std::move(out), "imd");
}

struct FrameLevels {
    PowerLevel distortion;
    PowerLevel desired; // P_s
    PowerLevel noise;
};

// Observed block r = p_true + y + z, plus its components.
struct ReceiveFrame {
    BasebandSignal r;
    BasebandSignal p_true;
    BasebandSignal y;
    BasebandSignal z;
    FrameLevels levels;

    std::size_t size() const { return r.size(); }
};

// Scales the distortion to `distortion`, draws a Gaussian DL block at `desired`
// and white noise at distortion - inr_db. `desired` may be silent (no DL) and
// inr_db may be +inf (noiseless).
inline ReceiveFrame make_frame(const BasebandSignal& p, PowerLevel distortion, PowerLevel desired,
                               double inr_db, std::uint64_t seed)
{
    if (p.empty() || p.all_zero()) throw std::invalid_argument("make_frame: all-zero distortion");
    if (std::isnan(inr_db) || inr_db == -std::numeric_limits<double>::infinity())
        throw std::invalid_argument("make_frame: INR must be finite or +inf");
    const std::size_t P = p.size();

    ReceiveFrame f;
    f.p_true = set_power(p, distortion);
    f.y = desired.is_silent() ? BasebandSignal::zeros(P, "dl")
                              : set_power(generate_block(P, SignalKind::gaussian, child_seed(seed, {}, "dl")), desired);
    const PowerLevel noise = std::isinf(inr_db) ? PowerLevel::silent() : PowerLevel{distortion.dbm - inr_db};
    f.z = awgn_block(P, noise, child_seed(seed, {}, "noise"));
    f.r = f.p_true + f.y + f.z;
    f.levels = {distortion, desired, noise};
    return f;
}

} // namespace nlcancel
