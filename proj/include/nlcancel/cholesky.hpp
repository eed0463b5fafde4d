// SPDX-License-Identifier: Apache-2.0
//
// Growing Cholesky factor of the Gram matrix of a selected column set.
//
// With G_k = L_k L_k^H and a new column d, the augmented Gram matrix is
//
//     [ G_k   c  ]        c = D_I^H d,  s = d^H d
//     [ c^H   s  ]
//
// and its factor is [L_k 0; w^H lambda] with L_k w = c (forward substitution)
// and lambda = sqrt(s - |w|^2). One augmentation costs O(k^2).
#pragma once

#include "nlcancel/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <vector>

namespace nlcancel {

class CholeskyState {
public:
    // lambda^2 <= pivot_threshold * s rejects a candidate as linearly dependent.
    static constexpr double pivot_threshold = 1e-12;

    std::size_t size() const { return support_.size(); }
    bool empty() const { return support_.empty(); }
    const std::vector<std::size_t>& support() const { return support_; }

    // Lower-triangular k x k factor.
    Eigen::MatrixXcd factor() const { return factor_.topLeftCorner(kdim(), kdim()); }

    // gram_column holds k cross terms (selected columns vs new) followed by the
    // new column's self term. Strong guarantee: state unchanged on throw.
    void augment(std::size_t column_index, const Eigen::VectorXcd& gram_column)
    {
        const Eigen::Index k = kdim();
        if (gram_column.size() != k + 1)
            throw std::invalid_argument("CholeskyState::augment: gram column must have k+1 entries");

        const Eigen::VectorXcd w = forward_solve(gram_column.head(k));
        const double self = gram_column(k).real();
        const double pivot_sq = self - w.squaredNorm();
        if (!(self > 0.0) || !(pivot_sq > pivot_threshold * self))
            throw DegenerateColumnError("Cholesky pivot below threshold");

        if (factor_.rows() < k + 1) {
            const Eigen::Index cap = std::max<Eigen::Index>(2 * factor_.rows(), k + 1);
            Eigen::MatrixXcd grown = Eigen::MatrixXcd::Zero(cap, cap);
            grown.topLeftCorner(k, k) = factor_.topLeftCorner(k, k);
            factor_.swap(grown);
        }
        factor_.row(k).head(k) = w.adjoint();
        factor_(k, k) = std::sqrt(pivot_sq);
        support_.push_back(column_index);
    }

    // Solves L y = b.
    Eigen::VectorXcd forward_solve(const Eigen::VectorXcd& b) const
    {
        const Eigen::Index k = kdim();
        Eigen::VectorXcd y(k);
        for (Eigen::Index i = 0; i < k; ++i) {
            std::complex<double> acc = b(i);
            for (Eigen::Index j = 0; j < i; ++j) acc -= factor_(i, j) * y(j);
            y(i) = acc / factor_(i, i);
        }
        return y;
    }

    // Solves L^H x = y.
    Eigen::VectorXcd backward_solve(const Eigen::VectorXcd& y) const
    {
        const Eigen::Index k = kdim();
        Eigen::VectorXcd x(k);
        for (Eigen::Index i = k - 1; i >= 0; --i) {
            std::complex<double> acc = y(i);
            for (Eigen::Index j = i + 1; j < k; ++j) acc -= std::conj(factor_(j, i)) * x(j);
            x(i) = acc / factor_(i, i).real();
        }
        return x;
    }

    // Solves G x = b with G = L L^H.
    Eigen::VectorXcd solve(const Eigen::VectorXcd& b) const { return backward_solve(forward_solve(b)); }

private:
    Eigen::Index kdim() const { return static_cast<Eigen::Index>(support_.size()); }

    Eigen::MatrixXcd factor_; // capacity-padded; only the leading k x k block is live
    std::vector<std::size_t> support_;
};

// Value-returning form of CholeskyState::augment.
inline CholeskyState cholesky_augment(CholeskyState state, std::size_t column_index,
                                      const Eigen::VectorXcd& gram_column)
{
    state.augment(column_index, gram_column);
    return state;
}

} // namespace nlcancel
