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

// Quantum union bound: if each 2-value measurement alone succeeds on ρ with probability
// at least 1 − δ, all k in sequence succeed with probability at least 1 − 2√(kδ).
// Outcome 0 of every instrument is success.

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "smplocc/errors.hpp"
#include "smplocc/linalg.hpp"
#include "smplocc/measurements.hpp"
#include "smplocc/random.hpp"
#include "smplocc/rng.hpp"

namespace smplocc {

struct UnionBoundResult {
    double all_success = 0.0;
    double bound = 0.0;
    double worst_step_failure = 0.0;  // max_i 1 − tr(K_i† K_i ρ)

    [[nodiscard]] bool holds() const { return all_success >= bound - 1e-12; }
};

inline double union_bound_value(std::size_t k, double delta) {
    return 1.0 - 2.0 * std::sqrt(static_cast<double>(k) * delta);
}

/// Verifies the hypothesis (throws HypothesisRejected if some step fails on ρ with
/// probability above δ), then computes the exact all-success probability.
inline UnionBoundResult union_bound_check(const std::vector<Instrument>& chain, const DensityMatrix& rho,
                                          double delta) {
    require(!chain.empty(), "union_bound_check: empty chain");
    require(delta >= 0.0, "union_bound_check: negative delta");
    UnionBoundResult res;
    for (std::size_t i = 0; i < chain.size(); ++i) {
        require(chain[i].size() == 2 && chain[i].dim() == rho.dim(), "union_bound_check: bad instrument");
        const double fail = 1.0 - real_trace(apply_kraus(chain[i][0], rho.matrix()));
        res.worst_step_failure = std::max(res.worst_step_failure, fail);
        if (fail > delta + 1e-12) {
            throw HypothesisRejected("union_bound_check: step " + std::to_string(i) + " fails with probability " +
                                     std::to_string(fail));
        }
    }
    Matrix sigma = rho.matrix();
    for (const auto& ins : chain) {
        sigma = apply_kraus(ins[0], sigma);
    }
    res.all_success = real_trace(sigma);
    res.bound = union_bound_value(chain.size(), delta);
    return res;
}

/// Random chain satisfying the hypothesis on ρ: step i succeeds through √E_i with
/// E_i = I − s_i A_i, A_i a random effect and s_i chosen so that the standalone failure
/// s_i tr(A_i ρ) is uniform in [0, δ].
inline std::vector<Instrument> random_union_chain(const DensityMatrix& rho, std::size_t k, double delta, Rng& rng) {
    const Eigen::Index d = rho.dim();
    std::vector<Instrument> chain;
    for (std::size_t i = 0; i < k; ++i) {
        const Matrix a = random::effect(d, rng);
        const double load = rho.expectation(a);
        const double target = rng.uniform(0.0, delta);
        const double s = load > 1e-15 ? std::min(1.0, target / load) : 1.0;
        const Matrix e = Matrix::Identity(d, d) - s * a;
        chain.push_back(Instrument::two_value(psd_sqrt(e)));
    }
    return chain;
}

}  // namespace smplocc
