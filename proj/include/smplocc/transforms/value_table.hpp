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

// Value tables of 2-value LOCC protocols and referee-side simulation from them.
//
// For a protocol with steps = 2r + 1 (Ref_A first and last), an entry is keyed by the
// history prefix p at which the table's side measures, and stores
//   v_{m|p} = tr(K_m ... K_first ρ K_first† ... K_m†)
// where the chain runs over that side's own Kraus operators along p. Ref_A prefixes
// have even length 0, 2, ..., 2r; Ref_B prefixes have odd length 1, 3, ..., 2r − 1.
// The depth of an entry is the number of earlier measurements by the same side.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "smplocc/errors.hpp"
#include "smplocc/linalg.hpp"
#include "smplocc/measurements.hpp"
#include "smplocc/protocols/locc.hpp"
#include "smplocc/rng.hpp"

namespace smplocc {

struct ValueTable {
    Side side = Side::A;
    std::size_t rounds = 0;
    std::map<History, std::array<double, 2>> values;

    [[nodiscard]] std::size_t root_length() const { return side == Side::A ? 0 : 1; }
    [[nodiscard]] std::size_t depth(const History& p) const { return (p.size() - root_length()) / 2; }
    [[nodiscard]] bool is_root(const History& p) const { return p.size() == root_length(); }

    /// Parent prefix and the outcome there that leads to p (p must not be a root).
    [[nodiscard]] std::pair<History, std::uint32_t> parent(const History& p) const {
        History q(p.begin(), p.end() - 2);
        return {q, p[p.size() - 2]};
    }

    [[nodiscard]] double at(const History& p, std::uint32_t m) const {
        auto it = values.find(p);
        if (it == values.end()) {
            throw ContractViolation("ValueTable: no entry for prefix " + history_to_string(p));
        }
        return it->second.at(m);
    }

    [[nodiscard]] std::size_t entry_count() const { return 2 * values.size(); }

    /// Largest violation of v_0 + v_1 = 1 at roots and v_{a|h} = v_{0|hab} + v_{1|hab} below.
    [[nodiscard]] double consistency_defect() const {
        double worst = 0.0;
        for (const auto& [p, v] : values) {
            const double target = is_root(p) ? 1.0 : [&] {
                const auto [q, a] = parent(p);
                return at(q, a);
            }();
            worst = std::max(worst, std::abs(v[0] + v[1] - target));
        }
        return worst;
    }
};

namespace detail {

inline void fill_values(const LoccProtocol& proto, Side side, const Matrix& sigma, History& p, ValueTable& t) {
    const Instrument& ins = proto.instrument(p);
    require(ins.size() == 2, "value_table: instrument at " + history_to_string(p) + " is not 2-value");
    std::array<double, 2> v{};
    std::array<Matrix, 2> next;
    for (std::uint32_t m = 0; m < 2; ++m) {
        next[m] = apply_kraus(ins[m], sigma);
        v[m] = real_trace(next[m]);
    }
    t.values[p] = v;
    for (std::uint32_t m = 0; m < 2; ++m) {
        p.push_back(m);
        if (p.size() < proto.steps()) {
            const std::size_t other = proto.instrument(p).size();
            for (std::uint32_t o = 0; o < other; ++o) {
                p.push_back(o);
                if (p.size() < proto.steps()) {
                    fill_values(proto, side, next[m], p, t);
                }
                p.pop_back();
            }
        }
        p.pop_back();
    }
}

}  // namespace detail

/// All v_{m|p} of one side of a 2-value protocol with steps = 2r + 1.
inline ValueTable value_table(const LoccProtocol& proto, Side side, const DensityMatrix& rho) {
    require(proto.two_value(), "value_table: protocol is not 2-value");
    require(proto.steps() % 2 == 1, "value_table: expected 2r + 1 steps ending with Ref_A");
    require(proto.rounds() <= 10, "value_table: more than 10 rounds");
    require(rho.dim() == (side == Side::A ? proto.dim_a() : proto.dim_b()), "value_table: dimension mismatch");
    ValueTable t;
    t.side = side;
    t.rounds = proto.rounds();
    History p;
    if (side == Side::A) {
        detail::fill_values(proto, side, rho.matrix(), p, t);
    } else {
        for (std::uint32_t a0 = 0; a0 < 2 && proto.steps() > 1; ++a0) {
            p = {a0};
            detail::fill_values(proto, side, rho.matrix(), p, t);
        }
    }
    return t;
}

// ---------------------------------------------------------------------------
// Ratio identity.

/// v_i = tr(M_0† ... M_i† M_i ... M_0 ρ) for a chain of success operators.
inline std::vector<double> chain_values(const std::vector<Matrix>& chain, const DensityMatrix& rho) {
    std::vector<double> v;
    Matrix sigma = rho.matrix();
    for (const auto& m : chain) {
        require(m.cols() == rho.dim(), "chain_values: dimension mismatch");
        sigma = apply_kraus(m, sigma);
        v.push_back(real_trace(sigma));
    }
    return v;
}

/// Conditional success probabilities p_{k|k−1} = v_k / v_{k−1} (v_{−1} = 1).
inline std::vector<double> ratio_conditionals(const std::vector<Matrix>& chain, const DensityMatrix& rho) {
    const std::vector<double> v = chain_values(chain, rho);
    std::vector<double> p;
    double prev = 1.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (prev <= kDegenerateProb) {
            throw DegenerateError("ratio_conditionals: chain degenerate before step " + std::to_string(k));
        }
        p.push_back(v[k] / prev);
        prev = v[k];
    }
    return p;
}

/// Same conditionals by measuring the renormalized post-state step by step; each step
/// is the success arm of the 2-value instrument {M, √(I − M†M)}.
inline std::vector<double> sequential_conditionals(const std::vector<Matrix>& chain, const DensityMatrix& rho) {
    std::vector<double> p;
    DensityMatrix state = rho;
    for (std::size_t k = 0; k < chain.size(); ++k) {
        const MeasurementBranch br = instrument_apply(Instrument::two_value(chain[k]), state, 0);
        p.push_back(br.prob);
        if (k + 1 < chain.size()) {
            if (br.degenerate()) {
                throw DegenerateError("sequential_conditionals: chain degenerate after step " + std::to_string(k));
            }
            state = br.state();
        }
    }
    return p;
}

/// Table form: p_{m|p} = v_{m|p} / v_{a|parent(p)} (roots: p_{m} = v_m).
inline std::map<History, std::array<double, 2>> ratio_conditionals(const ValueTable& t) {
    std::map<History, std::array<double, 2>> out;
    for (const auto& [p, v] : t.values) {
        double denom = 1.0;
        if (!t.is_root(p)) {
            const auto [q, a] = t.parent(p);
            denom = t.at(q, a);
        }
        if (denom <= kDegenerateProb) {
            throw DegenerateError("ratio_conditionals: zero denominator at " + history_to_string(p));
        }
        out[p] = {v[0] / denom, v[1] / denom};
    }
    return out;
}

// ---------------------------------------------------------------------------
// Clamping.

enum class ClampRule {
    /// v''_{0|hab} = clamp(v'_{0|hab}, 0, v''_{a|h}), v''_{1|hab} = v''_{a|h} − v''_{0|hab}.
    Complement,
    /// Both entries clamped independently to [0, v''_{a|h}]; branching sums may drift.
    Independent,
};

struct ClampedTable {
    ValueTable table;
    ClampRule rule = ClampRule::Complement;
};

/// Roots: v''_0 = clamp(v'_0, 0, 1), v''_1 = 1 − v''_0 (both rules). Below the roots the
/// rule decides; the map order visits parents before children.
inline ClampedTable clamp_table(const ValueTable& noisy, ClampRule rule = ClampRule::Complement) {
    ClampedTable out{noisy, rule};
    auto& vals = out.table.values;
    for (auto& [p, v] : vals) {
        require(std::isfinite(v[0]) && std::isfinite(v[1]), "clamp_table: non-finite entry");
        if (noisy.is_root(p)) {
            v[0] = std::clamp(v[0], 0.0, 1.0);
            v[1] = 1.0 - v[0];
            continue;
        }
        const auto [q, a] = noisy.parent(p);
        const double cap = vals.at(q)[a];
        v[0] = std::clamp(v[0], 0.0, cap);
        v[1] = rule == ClampRule::Complement ? cap - v[0] : std::clamp(v[1], 0.0, cap);
    }
    return out;
}

/// Largest |v''_{m|p} − v_{m|p}| − (depth + 1)·δ over all entries (<= 0 means the depth
/// bound holds everywhere).
inline double clamp_depth_excess(const ValueTable& exact, const ClampedTable& clamped, double delta) {
    double worst = -1e300;
    for (const auto& [p, v] : exact.values) {
        const auto& c = clamped.table.values.at(p);
        const double bound = static_cast<double>(exact.depth(p) + 1) * delta;
        for (int m = 0; m < 2; ++m) {
            worst = std::max(worst, std::abs(c[m] - v[m]) - bound);
        }
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Perturbations used by the error-bound experiments.

enum class Perturbation { Uniform, RandomSign, AllPlus, AllMinus, Alternating };

/// Entrywise shifts of magnitude <= δ. Uniform draws from [−δ, δ]; RandomSign uses ±δ;
/// Alternating uses +δ at even depth and −δ at odd depth.
inline ValueTable perturb(const ValueTable& t, double delta, Perturbation kind, Rng& rng) {
    ValueTable out = t;
    for (auto& [p, v] : out.values) {
        for (auto& x : v) {
            switch (kind) {
                case Perturbation::Uniform:
                    x += rng.uniform(-delta, delta);
                    break;
                case Perturbation::RandomSign:
                    x += rng.coin() ? delta : -delta;
                    break;
                case Perturbation::AllPlus:
                    x += delta;
                    break;
                case Perturbation::AllMinus:
                    x -= delta;
                    break;
                case Perturbation::Alternating:
                    x += out.depth(p) % 2 == 0 ? delta : -delta;
                    break;
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Referee-side simulation.

namespace detail {

/// Σ over full histories h of v^A_{1|h} times the product of Ref_B conditionals along
/// h. The product telescopes to v^B_{b_last|h without its last bit}.
inline double acceptance_from_tables(const ValueTable& a, const ValueTable* b) {
    require(a.side == Side::A, "simulate: first table must belong to Ref_A");
    double acc = 0.0;
    const std::size_t full = 2 * a.rounds;
    for (const auto& [p, v] : a.values) {
        if (p.size() != full) {
            continue;
        }
        double weight = 1.0;
        if (full > 0) {
            require(b != nullptr && b->side == Side::B && b->rounds == a.rounds, "simulate: Ref_B table mismatch");
            const History q(p.begin(), p.end() - 1);
            weight = b->at(q, p.back());
        }
        acc += weight * v[1];
    }
    return acc;
}

}  // namespace detail

/// Ref_A replaced: the referee samples Ref_A's outcomes from the (clamped) table and
/// measures Bob's message for real, so Ref_B contributes exact values.
inline double simulate_from_tables(const ValueTable& a, const ValueTable& b_exact) {
    return detail::acceptance_from_tables(a, &b_exact);
}
inline double simulate_from_tables(const ClampedTable& a, const ValueTable& b_exact) {
    return simulate_from_tables(a.table, b_exact);
}

/// Both messages replaced by tables.
inline double simulate_both_replaced(const ValueTable& a, const ValueTable& b) {
    return detail::acceptance_from_tables(a, &b);
}
inline double simulate_both_replaced(const ClampedTable& a, const ClampedTable& b) {
    return simulate_both_replaced(a.table, b.table);
}

/// Error bound with Ref_A's table clamped: 2^r (r + 1) δ. At r = 1 the sharper 2δ holds.
inline double single_replaced_bound(std::size_t r, double delta) {
    return std::ldexp(1.0, static_cast<int>(r)) * static_cast<double>(r + 1) * delta;
}

/// Envelope 2^{2r} (2(r + 1)δ + (r + 1)²δ²) for both tables clamped.
inline double both_replaced_envelope(std::size_t r, double delta) {
    const double k = static_cast<double>(r + 1);
    return std::ldexp(1.0, static_cast<int>(2 * r)) * (2.0 * k * delta + k * k * delta * delta);
}

}  // namespace smplocc
