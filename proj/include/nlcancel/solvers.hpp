// SPDX-License-Identifier: Apache-2.0
//
// Coefficient estimators over a Dictionary: full linear least squares via the
// normal equations, and orthogonal matching pursuit.
//
// Both work on the dictionary's unit-norm columns and return coefficients for
// the raw (un-normalized) reference signals.
#pragma once

#include "nlcancel/cholesky.hpp"
#include "nlcancel/dictionary.hpp"
#include "nlcancel/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace nlcancel {

struct LlsSolution {
    CVector v_hat;               // raw-column coefficients, length J
    double residual_norm = 0.0;  // ||r - D v_hat||
    bool condition_flag = false; // diagonal loading was needed
};

// Minimizes ||r - D v||^2 through a Cholesky factorization of R = D^H D. If
// the plain factorization meets a non-positive pivot, R is loaded with
// 1e-10 * trace(R) / J on the diagonal and refactored.
inline LlsSolution lls_solve(const Dictionary& D, const BasebandSignal& r)
{
    const auto& A = D.columns();
    if (r.size() != D.rows()) throw std::invalid_argument("lls_solve: observation length mismatch");
    if (D.cols() == 0) throw std::invalid_argument("lls_solve: empty dictionary");
    if (D.rows() < D.cols())
        throw UnderdeterminedError("lls_solve: fewer samples than dictionary columns");

    const auto y = as_vector(r);
    const CMatrix R = A.adjoint() * A;
    const CVector q = A.adjoint() * y;

    LlsSolution sol;
    Eigen::LLT<CMatrix> llt(R);
    if (llt.info() != Eigen::Success) {
        const double load = 1e-10 * R.trace().real() / static_cast<double>(D.cols());
        llt.compute(R + load * CMatrix::Identity(R.rows(), R.cols()));
        if (llt.info() != Eigen::Success)
            throw SingularDictionaryError("lls_solve: Gram matrix singular after diagonal loading");
        sol.condition_flag = true;
    }
    const CVector v = llt.solve(q);
    sol.residual_norm = (y - A * v).norm();
    sol.v_hat = D.denormalize(v);
    return sol;
}

struct OmpSolution {
    std::vector<std::size_t> support;     // selection order
    CVector v_hat;                        // raw-column coefficients, zero off-support
    std::vector<double> residual_norms;   // ||r_k|| after each iteration
    std::vector<double> selection_scores; // winning |r_{k-1}^H d| per iteration (unit columns)
    bool early_stop = false;              // residual or correlations exhausted before Js
    bool degenerate_stop = false;         // every remaining candidate was linearly dependent
};

namespace detail {

inline void check_omp_args(const Dictionary& D, const BasebandSignal& r, std::size_t Js)
{
    if (r.size() != D.rows()) throw std::invalid_argument("omp: observation length mismatch");
    if (Js < 1) throw std::invalid_argument("omp: Js must be >= 1");
    if (Js > D.cols()) throw std::invalid_argument("omp: Js exceeds dictionary size");
    if (Js > D.rows()) throw std::invalid_argument("omp: Js exceeds number of samples");
}

// Candidates outside `in_support`, ordered by descending score with the lowest
// index winning ties.
inline std::vector<std::size_t> ranked_candidates(const Eigen::VectorXd& delta, const std::vector<bool>& in_support)
{
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < in_support.size(); ++i)
        if (!in_support[i]) idx.push_back(i);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return delta(static_cast<Eigen::Index>(a)) > delta(static_cast<Eigen::Index>(b));
    });
    return idx;
}

constexpr double omp_residual_floor = 1e-12;    // relative to ||y||
constexpr double omp_correlation_floor = 1e-14; // relative to ||y||

} // namespace detail

// Greedy Js-sparse fit. Each iteration picks the unselected column with the
// largest |r^H d| and refits on the support by least squares; the Gram factor
// grows by one forward substitution per iteration.
inline OmpSolution omp_solve(const Dictionary& D, const BasebandSignal& r, std::size_t Js)
{
    detail::check_omp_args(D, r, Js);
    const auto& A = D.columns();
    const auto y = as_vector(r);
    const double ynorm = y.norm();
    const std::size_t J = D.cols();

    OmpSolution sol;
    CVector residual = y;
    CVector v_support;
    CVector b(0); // D_I^H y
    CholeskyState chol;
    std::vector<bool> in_support(J, false);

    while (sol.support.size() < Js) {
        if (residual.norm() <= detail::omp_residual_floor * ynorm) {
            sol.early_stop = true;
            break;
        }
        const Eigen::VectorXd delta = (A.adjoint() * residual).cwiseAbs();
        const auto ranked = detail::ranked_candidates(delta, in_support);
        const double best = delta(static_cast<Eigen::Index>(ranked.front()));
        if (best <= detail::omp_correlation_floor * ynorm) {
            sol.early_stop = true;
            break;
        }

        const auto k = static_cast<Eigen::Index>(chol.size());
        bool accepted = false;
        for (std::size_t c : ranked) {
            const auto col = A.col(static_cast<Eigen::Index>(c));
            Eigen::VectorXcd g(k + 1);
            for (Eigen::Index i = 0; i < k; ++i)
                g(i) = A.col(static_cast<Eigen::Index>(chol.support()[static_cast<std::size_t>(i)])).dot(col);
            g(k) = col.squaredNorm();
            try {
                chol.augment(c, g);
            } catch (const DegenerateColumnError&) {
                continue;
            }
            sol.support.push_back(c);
            sol.selection_scores.push_back(delta(static_cast<Eigen::Index>(c)));
            in_support[c] = true;
            b.conservativeResize(k + 1);
            b(k) = col.dot(y);
            accepted = true;
            break;
        }
        if (!accepted) {
            sol.degenerate_stop = true;
            sol.early_stop = true;
            break;
        }

        v_support = chol.solve(b);
        residual = y;
        for (std::size_t i = 0; i < sol.support.size(); ++i)
            residual -= v_support(static_cast<Eigen::Index>(i)) * A.col(static_cast<Eigen::Index>(sol.support[i]));
        sol.residual_norms.push_back(residual.norm());
    }

    CVector unit = CVector::Zero(static_cast<Eigen::Index>(J));
    for (std::size_t i = 0; i < sol.support.size(); ++i)
        unit(static_cast<Eigen::Index>(sol.support[i])) = v_support(static_cast<Eigen::Index>(i));
    sol.v_hat = D.denormalize(unit);
    return sol;
}

// Same contract as omp_solve, but every iteration re-solves the support least
// squares from scratch with a Householder QR of D(:, I_k). Test oracle.
inline OmpSolution omp_solve_reference(const Dictionary& D, const BasebandSignal& r, std::size_t Js)
{
    detail::check_omp_args(D, r, Js);
    const auto& A = D.columns();
    const CVector y = as_vector(r);
    const double ynorm = y.norm();
    const std::size_t J = D.cols();
    const auto P = static_cast<Eigen::Index>(D.rows());

    OmpSolution sol;
    CVector residual = y;
    CVector v_support;
    std::vector<bool> in_support(J, false);

    while (sol.support.size() < Js) {
        if (residual.norm() <= detail::omp_residual_floor * ynorm) {
            sol.early_stop = true;
            break;
        }
        Eigen::VectorXd delta(static_cast<Eigen::Index>(J));
        for (std::size_t i = 0; i < J; ++i)
            delta(static_cast<Eigen::Index>(i)) = std::abs(residual.dot(A.col(static_cast<Eigen::Index>(i))));
        const auto ranked = detail::ranked_candidates(delta, in_support);
        const double best = delta(static_cast<Eigen::Index>(ranked.front()));
        if (best <= detail::omp_correlation_floor * ynorm) {
            sol.early_stop = true;
            break;
        }

        const auto k = static_cast<Eigen::Index>(sol.support.size());
        CMatrix sub(P, k + 1);
        for (Eigen::Index i = 0; i < k; ++i)
            sub.col(i) = A.col(static_cast<Eigen::Index>(sol.support[static_cast<std::size_t>(i)]));
        Eigen::HouseholderQR<CMatrix> current_qr(sub.leftCols(k));

        bool accepted = false;
        for (std::size_t c : ranked) {
            const CVector d = A.col(static_cast<Eigen::Index>(c));
            // Squared distance from d to span(D_I), relative to |d|^2.
            CVector out_of_span = d;
            if (k > 0) {
                const CMatrix Q = current_qr.householderQ() * CMatrix::Identity(P, k);
                out_of_span -= Q * (Q.adjoint() * d);
            }
            if (!(out_of_span.squaredNorm() > CholeskyState::pivot_threshold * d.squaredNorm())) continue;
            sub.col(k) = d;
            sol.support.push_back(c);
            sol.selection_scores.push_back(delta(static_cast<Eigen::Index>(c)));
            in_support[c] = true;
            accepted = true;
            break;
        }
        if (!accepted) {
            sol.degenerate_stop = true;
            sol.early_stop = true;
            break;
        }

        Eigen::HouseholderQR<CMatrix> qr(sub);
        v_support = qr.solve(y);
        residual = y - sub * v_support;
        sol.residual_norms.push_back(residual.norm());
    }

    CVector unit = CVector::Zero(static_cast<Eigen::Index>(J));
    for (std::size_t i = 0; i < sol.support.size(); ++i)
        unit(static_cast<Eigen::Index>(sol.support[i])) = v_support(static_cast<Eigen::Index>(i));
    sol.v_hat = D.denormalize(unit);
    return sol;
}

} // namespace nlcancel
