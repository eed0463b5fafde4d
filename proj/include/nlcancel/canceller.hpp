// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "nlcancel/dictionary.hpp"
#include "nlcancel/distortion.hpp"

#include <string>

namespace nlcancel {

// p_hat = sum_j v_hat(j) * raw reference signal j.
inline BasebandSignal reconstruct(const Dictionary& D, const CVector& v_hat)
{
    if (static_cast<std::size_t>(v_hat.size()) != D.cols())
        throw std::invalid_argument("reconstruct: coefficient length mismatch");
    return to_signal(D.columns() * D.normalize(v_hat), "p_hat");
}

// Power of p_true - p_hat. Depends only on the distortion component, never on
// the DL signal or noise realizations.
inline PowerLevel residual_distortion_power(const ReceiveFrame& frame, const BasebandSignal& p_hat)
{
    if (p_hat.size() != frame.size()) throw std::invalid_argument("residual_distortion_power: length mismatch");
    return measure_power(frame.p_true - p_hat);
}

struct CancellationReport {
    double original_distortion_dbm = 0.0;
    double residual_distortion_dbm = 0.0;
    double suppression_db = 0.0;
    double inr_db = 0.0;
    double isr_db = 0.0;
    std::string solver_id;
    std::size_t J_used = 0;
};

inline CancellationReport make_report(const ReceiveFrame& frame, const BasebandSignal& p_hat,
                                      std::string solver_id, std::size_t J)
{
    CancellationReport rep;
    rep.original_distortion_dbm = measure_power(frame.p_true).dbm;
    rep.residual_distortion_dbm = residual_distortion_power(frame, p_hat).dbm;
    rep.suppression_db = rep.original_distortion_dbm - rep.residual_distortion_dbm;
    rep.inr_db = frame.levels.distortion.dbm - frame.levels.noise.dbm;
    rep.isr_db = frame.levels.distortion.dbm - frame.levels.desired.dbm;
    rep.solver_id = std::move(solver_id);
    rep.J_used = J;
    return rep;
}

} // namespace nlcancel
