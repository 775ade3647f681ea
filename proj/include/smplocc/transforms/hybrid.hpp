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

// One-way LOCC referees and their hybrid replacement: Alice measures her own state with a
// randomized projective simulation of Ref_A's POVM (branch index shared with the
// referee) and sends the classical outcome; the referee relabels it and runs Ref_B on
// Bob's quantum message unchanged.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "smplocc/errors.hpp"
#include "smplocc/linalg.hpp"
#include "smplocc/measurements.hpp"
#include "smplocc/random.hpp"
#include "smplocc/rng.hpp"

namespace smplocc {

/// (Ref_A outcome, Ref_B outcome) -> protocol output.
using OneWayOutputRule = std::function<std::int64_t(std::size_t, std::size_t)>;

struct OneWayLoccProtocol {
    Povm ref_a;
    std::vector<Povm> ref_b;  // indexed by Ref_A's outcome
    OneWayOutputRule output;

    void validate() const {
        require(ref_b.size() == ref_a.size(), "OneWayLoccProtocol: need one Ref_B POVM per Ref_A outcome");
        for (const auto& b : ref_b) {
            require(b.dim() == ref_b.front().dim(), "OneWayLoccProtocol: Ref_B dimensions differ");
        }
        require(static_cast<bool>(output), "OneWayLoccProtocol: missing output rule");
    }

    [[nodiscard]] std::map<std::int64_t, double> distribution(const DensityMatrix& rho,
                                                              const DensityMatrix& sigma) const {
        std::map<std::int64_t, double> out;
        const auto pa = ref_a.probabilities(rho);
        for (std::size_t k = 0; k < pa.size(); ++k) {
            const auto pb = ref_b[k].probabilities(sigma);
            for (std::size_t o = 0; o < pb.size(); ++o) {
                out[output(k, o)] += pa[k] * pb[o];
            }
        }
        return out;
    }
};

/// Output k·|B| + o, so that distributions are compared over full outcome pairs.
inline OneWayOutputRule pair_output(std::size_t b_outcomes) {
    return [b_outcomes](std::size_t k, std::size_t o) {
        return static_cast<std::int64_t>(k * b_outcomes + o);
    };
}

inline OneWayLoccProtocol random_one_way_protocol(Eigen::Index dim_a, Eigen::Index dim_b, std::size_t outcomes_a,
                                                  std::size_t outcomes_b, Rng& rng) {
    OneWayLoccProtocol p{Povm(random::povm_effects(dim_a, outcomes_a, rng)), {}, pair_output(outcomes_b)};
    for (std::size_t k = 0; k < outcomes_a; ++k) {
        p.ref_b.emplace_back(random::povm_effects(dim_b, outcomes_b, rng));
    }
    return p;
}

/// Incoherent one-way setting: the receiver applies a fixed POVM to the quantum message
/// and outputs rule(m, y). Cast as a one-way referee whose second system is the classical
/// y stored in the computational basis of C^{|Y|}.
inline OneWayLoccProtocol incoherent_one_way(Povm receiver, std::size_t y_count, OneWayOutputRule rule) {
    require(y_count >= 1, "incoherent_one_way: empty input set");
    std::vector<Matrix> basis;
    for (std::size_t y = 0; y < y_count; ++y) {
        basis.push_back(projector(basis_vector(static_cast<Eigen::Index>(y_count), static_cast<Eigen::Index>(y))));
    }
    const std::size_t outcomes = receiver.size();
    return OneWayLoccProtocol{std::move(receiver), std::vector<Povm>(outcomes, Povm(basis)), std::move(rule)};
}

enum class Dilation {
    Naimark,  // single projective measurement on the state plus a fixed ancilla
    Layered,  // randomized threshold projectors; two-outcome Ref_A only
};

struct HybridProtocol {
    PmSimulation alice;
    std::vector<Povm> ref_b;
    OneWayOutputRule output;

    /// Alice's classical message: outcome of the selected projective branch.
    [[nodiscard]] std::size_t outcome_bits() const { return alice.outcome_bits(); }
    /// Shared-randomness index the referee must know (sent along after derandomization).
    [[nodiscard]] std::size_t branch_bits() const { return alice.branch_bits(); }
    [[nodiscard]] std::size_t classical_bits() const { return outcome_bits() + branch_bits(); }

    /// Joint law of Alice's message (branch, outcome) on ρ, weighted by the branch law.
    [[nodiscard]] std::map<std::pair<std::size_t, std::size_t>, double> message_distribution(
        const DensityMatrix& rho) const {
        std::map<std::pair<std::size_t, std::size_t>, double> out;
        for (std::size_t k = 0; k < alice.branches.size(); ++k) {
            const auto p = alice.branch_probabilities(k, rho);
            for (std::size_t j = 0; j < p.size(); ++j) {
                out[{k, j}] += alice.branches[k].weight * p[j];
            }
        }
        return out;
    }

    /// Referee's recovery of Ref_A's outcome.
    [[nodiscard]] std::size_t decode(std::size_t branch, std::size_t outcome) const {
        return alice.branches.at(branch).relabel.at(outcome);
    }

    [[nodiscard]] std::map<std::int64_t, double> distribution(const DensityMatrix& rho,
                                                              const DensityMatrix& sigma) const {
        std::vector<std::vector<double>> pb;
        for (const auto& b : ref_b) {
            pb.push_back(b.probabilities(sigma));
        }
        std::map<std::int64_t, double> out;
        for (const auto& [msg, p] : message_distribution(rho)) {
            const std::size_t k = decode(msg.first, msg.second);
            for (std::size_t o = 0; o < pb[k].size(); ++o) {
                out[output(k, o)] += p * pb[k][o];
            }
        }
        return out;
    }

    /// One execution with the branch drawn from shared randomness.
    [[nodiscard]] std::int64_t run(const DensityMatrix& rho, const DensityMatrix& sigma, Rng& shared,
                                   Rng& local) const {
        std::vector<double> w;
        for (const auto& b : alice.branches) {
            w.push_back(b.weight);
        }
        const std::size_t branch = sample_outcome(shared, w);
        const auto pa = alice.branch_probabilities(branch, rho);
        const std::size_t k = decode(branch, sample_outcome(local, pa));
        const auto pb = ref_b[k].probabilities(sigma);
        return output(k, sample_outcome(local, pb));
    }
};

inline HybridProtocol locc1_to_hybrid(const OneWayLoccProtocol& p, Dilation how = Dilation::Naimark) {
    p.validate();
    require(how == Dilation::Naimark || p.ref_a.size() == 2,
            "locc1_to_hybrid: layered decomposition needs a two-outcome Ref_A");
    HybridProtocol h{how == Dilation::Naimark ? naimark_dilate(p.ref_a) : pm_simulate_two_outcome(p.ref_a[0]),
                     p.ref_b, p.output};
    h.alice.validate();
    return h;
}

/// Largest per-output deviation between two output laws.
inline double max_output_deviation(const std::map<std::int64_t, double>& a, const std::map<std::int64_t, double>& b) {
    double worst = 0.0;
    for (const auto& [k, v] : a) {
        auto it = b.find(k);
        worst = std::max(worst, std::abs(v - (it == b.end() ? 0.0 : it->second)));
    }
    for (const auto& [k, v] : b) {
        if (!a.count(k)) {
            worst = std::max(worst, std::abs(v));
        }
    }
    return worst;
}

}  // namespace smplocc
