// Copyright 2026 The smplocc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Random instance generators shared by the experiment runner and the tests.

#pragma once

#include <cmath>
#include <vector>

#include "smplocc/linalg.hpp"
#include "smplocc/rng.hpp"

namespace smplocc::random {

inline cplx gaussian(Rng& rng) { return {rng.normal() / std::sqrt(2.0), rng.normal() / std::sqrt(2.0)}; }

inline Matrix ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    Matrix g(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            g(i, j) = gaussian(rng);
        }
    }
    return g;
}

/// Haar-distributed pure state.
inline Ket ket(Eigen::Index dim, Rng& rng) { return Ket::normalized(ginibre(dim, 1, rng).col(0)); }

/// Haar-distributed unitary (QR of a Ginibre matrix with the R-diagonal phases removed).
inline Matrix unitary(Eigen::Index dim, Rng& rng) {
    const Matrix g = ginibre(dim, dim, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < dim; ++j) {
        const double a = std::abs(r(j, j));
        if (a > 0.0) {
            q.col(j) *= r(j, j) / a;
        }
    }
    return q;
}

/// Mixed state from the Hilbert-Schmidt ensemble with a random environment rank.
/// With probability 1/4 the draw is pure instead.
inline DensityMatrix density(Eigen::Index dim, Rng& rng) {
    if (rng.below(4) == 0) {
        return DensityMatrix::from_ket(ket(dim, rng));
    }
    const auto rank = static_cast<Eigen::Index>(1 + rng.below(static_cast<std::uint64_t>(dim)));
    const Matrix g = ginibre(dim, rank, rng);
    const Matrix m = g * g.adjoint();
    return DensityMatrix::normalized(0.5 * (m + m.adjoint()));
}

/// Effect with Haar eigenbasis and eigenvalues uniform on [0, 1].
inline Matrix effect(Eigen::Index dim, Rng& rng) {
    const Matrix u = unitary(dim, rng);
    Eigen::VectorXd lam(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        lam(i) = rng.uniform();
    }
    const Matrix m = u * lam.cast<cplx>().asDiagonal() * u.adjoint();
    return 0.5 * (m + m.adjoint());
}

/// POVM with `outcomes` effects, built as S^{-1/2} A_i S^{-1/2} with A_i Wishart.
inline std::vector<Matrix> povm_effects(Eigen::Index dim, std::size_t outcomes, Rng& rng) {
    std::vector<Matrix> a;
    Matrix s = Matrix::Zero(dim, dim);
    std::vector<Eigen::Index> ranks;
    Eigen::Index total = 0;
    for (std::size_t i = 0; i < outcomes; ++i) {
        ranks.push_back(static_cast<Eigen::Index>(1 + rng.below(static_cast<std::uint64_t>(dim))));
        total += ranks.back();
    }
    // S must be invertible, so the ranks have to cover the space.
    for (std::size_t i = 0; total < dim; i = (i + 1) % outcomes) {
        if (ranks[i] < dim) {
            ++ranks[i];
            ++total;
        }
    }
    for (std::size_t i = 0; i < outcomes; ++i) {
        const Matrix g = ginibre(dim, ranks[i], rng);
        a.push_back(g * g.adjoint());
        s += a.back();
    }
    s = 0.5 * (s + s.adjoint());
    const Matrix s_inv_half = hermitian_function(s, [](double v) { return 1.0 / std::sqrt(v); });
    std::vector<Matrix> out;
    for (const auto& ai : a) {
        const Matrix e = s_inv_half * ai * s_inv_half;
        out.push_back(0.5 * (e + e.adjoint()));
    }
    return out;
}

/// Kraus operators {K_0, ..., K_{outcomes-1}} of a random instrument: the blocks of the
/// first `dim` columns of a Haar unitary on C^{outcomes·dim}.
inline std::vector<Matrix> instrument_kraus(Eigen::Index dim, std::size_t outcomes, Rng& rng) {
    const auto big = static_cast<Eigen::Index>(outcomes) * dim;
    const Matrix u = unitary(big, rng);
    std::vector<Matrix> out;
    for (std::size_t i = 0; i < outcomes; ++i) {
        out.push_back(u.block(static_cast<Eigen::Index>(i) * dim, 0, dim, dim));
    }
    return out;
}

}  // namespace smplocc::random
