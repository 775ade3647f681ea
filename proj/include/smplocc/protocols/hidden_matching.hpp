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

// Hidden-matching protocols: the one-way phase-state protocol, edge-disjoint
// matching families, and the doubled two-referee variant in both its
// multi-outcome and its all-binary schedule.
//
// Nodes are 0-based. Output tuples are flattened as {i, j, b} (one instance) or
// {i1, j1, b1, i2, j2, b2} (doubled problem); {-1} marks an invalid transcript.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "smplocc/errors.hpp"
#include "smplocc/fingerprints.hpp"
#include "smplocc/linalg.hpp"
#include "smplocc/measurements.hpp"
#include "smplocc/protocols/locc.hpp"

namespace smplocc {

using Edge = std::pair<std::uint32_t, std::uint32_t>;
using Matching = std::vector<Edge>;

/// Normalizes to i < j per edge and sorts the edges.
inline Matching canonical(Matching m) {
    for (auto& e : m) {
        if (e.first > e.second) {
            std::swap(e.first, e.second);
        }
    }
    std::sort(m.begin(), m.end());
    return m;
}

inline bool is_perfect_matching(const Matching& m, std::uint32_t n) {
    if (m.size() * 2 != n) {
        return false;
    }
    std::vector<bool> seen(n, false);
    for (const auto& [i, j] : m) {
        if (i >= n || j >= n || i == j || seen[i] || seen[j]) {
            return false;
        }
        seen[i] = seen[j] = true;
    }
    return true;
}

struct MatchingFamily {
    std::uint32_t n = 0;
    std::vector<Matching> matchings;

    [[nodiscard]] std::size_t size() const { return matchings.size(); }

    /// Every matching perfect and no edge shared between two matchings.
    [[nodiscard]] bool valid() const {
        std::set<Edge> used;
        for (const auto& m : matchings) {
            if (!is_perfect_matching(m, n)) {
                return false;
            }
            for (const auto& e : canonical(m)) {
                if (!used.insert(e).second) {
                    return false;
                }
            }
        }
        return true;
    }
};

/// Round-robin 1-factorization of K_n: n − 1 pairwise edge-disjoint perfect matchings,
/// each in canonical form, sorted lexicographically.
inline MatchingFamily matching_family(std::uint32_t n) {
    require(n >= 2 && n % 2 == 0, "matching_family: n must be even and positive");
    MatchingFamily fam;
    fam.n = n;
    const std::uint32_t rot = n - 1;
    for (std::uint32_t k = 0; k < rot; ++k) {
        Matching m;
        m.emplace_back(k, n - 1);
        for (std::uint32_t i = 1; i < n / 2; ++i) {
            m.emplace_back((k + i) % rot, (k + rot - i) % rot);
        }
        fam.matchings.push_back(canonical(std::move(m)));
    }
    std::sort(fam.matchings.begin(), fam.matchings.end());
    return fam;
}

/// (1/√n) Σ_i (−1)^{x(i)} |i⟩.
inline Ket phase_state(const Bits& x) {
    require(!x.empty(), "phase_state: empty input");
    Vector v(static_cast<Eigen::Index>(x.size()));
    const double amp = 1.0 / std::sqrt(static_cast<double>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = x[i] ? -amp : amp;
    }
    return Ket(v);
}

/// |i⟩⟨i| + |j⟩⟨j|.
inline Matrix edge_projector(const Edge& e, Eigen::Index dim) {
    Matrix p = Matrix::Zero(dim, dim);
    p(e.first, e.first) = 1.0;
    p(e.second, e.second) = 1.0;
    return p;
}

/// |+_ij⟩⟨+_ij| with |+_ij⟩ = (|i⟩ + |j⟩)/√2.
inline Matrix edge_plus_projector(const Edge& e, Eigen::Index dim) {
    Vector v = Vector::Zero(dim);
    v(e.first) = 1.0 / std::sqrt(2.0);
    v(e.second) = 1.0 / std::sqrt(2.0);
    return projector(v);
}

/// Projective measurement {P_ij : (i,j) ∈ M}.
inline Instrument matching_instrument(const Matching& m, Eigen::Index dim) {
    std::vector<Matrix> kraus;
    for (const auto& e : m) {
        kraus.push_back(edge_projector(e, dim));
    }
    return Instrument(std::move(kraus));
}

/// {|+_ij⟩⟨+_ij|, I − |+_ij⟩⟨+_ij|}; outcome 0 reports b = 0.
inline Instrument parity_instrument(const Edge& e, Eigen::Index dim) {
    return Instrument::projective_pair(edge_plus_projector(e, dim));
}

struct HmTuple {
    std::uint32_t i = 0;
    std::uint32_t j = 0;
    std::uint8_t b = 0;
    auto operator<=>(const HmTuple&) const = default;
};

/// One-way protocol: phase state, projective measurement along the matching, then the
/// ± basis on the selected edge. Returns the exact output distribution.
inline std::map<HmTuple, double> hm_protocol(std::uint32_t n, const Bits& x, const Matching& m) {
    require(n >= 2 && is_power_of_two(n), "hm_protocol: n must be a power of two >= 2");
    require(x.size() == n, "hm_protocol: input length mismatch");
    require(is_perfect_matching(m, n), "hm_protocol: not a perfect matching");
    const auto dim = static_cast<Eigen::Index>(n);
    const DensityMatrix rho = DensityMatrix::from_ket(phase_state(x));
    const Instrument edges = matching_instrument(m, dim);
    std::map<HmTuple, double> out;
    for (std::size_t e = 0; e < m.size(); ++e) {
        const MeasurementBranch first = instrument_apply(edges, rho, e);
        if (first.degenerate()) {
            continue;
        }
        const Instrument parity = parity_instrument(m[e], dim);
        for (std::uint8_t b = 0; b < 2; ++b) {
            const MeasurementBranch second = instrument_apply(parity, first.state(), b);
            const double p = first.prob * second.prob;
            if (p > 0.0) {
                out[HmTuple{m[e].first, m[e].second, b}] += p;
            }
        }
    }
    return out;
}

inline bool hm_tuple_correct(const HmTuple& t, const Bits& x, const Matching& m) {
    const Edge e{std::min(t.i, t.j), std::max(t.i, t.j)};
    const auto c = canonical(m);
    return std::binary_search(c.begin(), c.end(), e) && t.b == (x[t.i] ^ x[t.j]);
}

// ---------------------------------------------------------------------------
// Doubled problem: Alice holds (x1, M2), Bob holds (x2, M1). Each message is the phase
// state of the party's string tensored with the index of the party's matching in the
// computational basis.

struct DrhmInputs {
    Bits x1;
    Bits x2;
    std::size_t m1 = 0;  // index into the family; held by Bob
    std::size_t m2 = 0;  // held by Alice
};

struct DrhmLayout {
    std::uint32_t n = 0;
    std::size_t register_bits = 0;  // ceil(log2(family size))

    [[nodiscard]] Eigen::Index register_dim() const { return Eigen::Index{1} << register_bits; }
    [[nodiscard]] Eigen::Index message_dim() const { return static_cast<Eigen::Index>(n) * register_dim(); }
    [[nodiscard]] std::size_t message_qubits_total() const {
        return 2 * (ceil_log2(n) + register_bits);
    }
};

inline DrhmLayout drhm_layout(const MatchingFamily& fam) {
    require(fam.n >= 2 && is_power_of_two(fam.n), "drhm: n must be a power of two >= 2");
    return DrhmLayout{fam.n, ceil_log2(fam.size())};
}

struct DrhmMessages {
    DensityMatrix alice;
    DensityMatrix bob;
};

inline DrhmMessages drhm_messages(const MatchingFamily& fam, const DrhmInputs& in) {
    const DrhmLayout lay = drhm_layout(fam);
    require(in.x1.size() == fam.n && in.x2.size() == fam.n, "drhm_messages: input length mismatch");
    require(in.m1 < fam.size() && in.m2 < fam.size(), "drhm_messages: matching index out of range");
    const Ket a(tensor(phase_state(in.x1).amplitudes(),
                       basis_vector(lay.register_dim(), static_cast<Eigen::Index>(in.m2))));
    const Ket b(tensor(phase_state(in.x2).amplitudes(),
                       basis_vector(lay.register_dim(), static_cast<Eigen::Index>(in.m1))));
    return {DensityMatrix::from_ket(a), DensityMatrix::from_ket(b)};
}

namespace detail {

inline Matrix on_phase(const Matrix& p, const DrhmLayout& lay) {
    return tensor(p, Matrix::Identity(lay.register_dim(), lay.register_dim()));
}

inline Matrix register_value_projector(const DrhmLayout& lay, std::uint64_t value) {
    Matrix q = Matrix::Zero(lay.register_dim(), lay.register_dim());
    q(static_cast<Eigen::Index>(value), static_cast<Eigen::Index>(value)) = 1.0;
    return tensor(Matrix::Identity(lay.n, lay.n), q);
}

/// Projector onto register values whose bit `bit` (0 = most significant) is zero.
inline Matrix register_bit_zero_projector(const DrhmLayout& lay, std::size_t bit) {
    Matrix q = Matrix::Zero(lay.register_dim(), lay.register_dim());
    for (Eigen::Index v = 0; v < lay.register_dim(); ++v) {
        if (((static_cast<std::uint64_t>(v) >> (lay.register_bits - 1 - bit)) & 1U) == 0) {
            q(v, v) = 1.0;
        }
    }
    return tensor(Matrix::Identity(lay.n, lay.n), q);
}

inline Output flatten_tuples(const Edge& e1, std::uint32_t b1, const Edge& e2, std::uint32_t b2) {
    return {e1.first, e1.second, b1, e2.first, e2.second, b2};
}

}  // namespace detail

/// Multi-outcome schedule (6 steps): Ref_A reads |M2⟩, Ref_B reads |M1⟩, then each side
/// measures its phase state along the other side's decoded matching and finally in the
/// ± basis of the selected edge.
inline LoccProtocol drhm_locc_protocol(const MatchingFamily& fam) {
    const DrhmLayout lay = drhm_layout(fam);
    const Eigen::Index dim = lay.message_dim();
    const auto nd = static_cast<Eigen::Index>(lay.n);
    auto builder = [fam, lay, dim, nd](Side, const History& h) -> Instrument {
        switch (h.size()) {
            case 0:
            case 1: {
                std::vector<Matrix> kraus;
                for (Eigen::Index v = 0; v < lay.register_dim(); ++v) {
                    kraus.push_back(detail::register_value_projector(lay, static_cast<std::uint64_t>(v)));
                }
                return Instrument(std::move(kraus));
            }
            case 2:
            case 3: {
                // Ref_A uses M1 (decoded by Ref_B at step 1); Ref_B uses M2 (step 0).
                const std::size_t idx = h.size() == 2 ? h[1] : h[0];
                if (idx >= fam.size()) {
                    return Instrument::trivial(dim);
                }
                std::vector<Matrix> kraus;
                for (const auto& e : fam.matchings[idx]) {
                    kraus.push_back(detail::on_phase(edge_projector(e, nd), lay));
                }
                return Instrument(std::move(kraus));
            }
            default: {
                const bool alice = h.size() == 4;
                const std::size_t idx = alice ? h[1] : h[0];
                if (idx >= fam.size()) {
                    return Instrument::trivial(dim);
                }
                const Edge& e = fam.matchings[idx][alice ? h[2] : h[3]];
                return Instrument::projective_pair(detail::on_phase(edge_plus_projector(e, nd), lay));
            }
        }
    };
    auto output = [fam](const History& h) -> Output {
        if (h.size() < 6 || h[1] >= fam.size() || h[0] >= fam.size()) {
            return {-1};
        }
        return detail::flatten_tuples(fam.matchings[h[1]][h[2]], h[4], fam.matchings[h[0]][h[3]], h[5]);
    };
    return LoccProtocol::build(dim, dim, 6, builder, output);
}

/// All-binary schedule. Steps alternate Ref_A, Ref_B:
///   - register_bits rounds per side reading the matching registers bit by bit (MSB first);
///   - log2(n/2) rounds per side halving the candidate edge set of the decoded matching
///     (outcome 0 keeps the first half in canonical edge order);
///   - one ± round per side on the surviving edge.
/// Total steps: 2·register_bits + 2·log2(n), every one a 2-outcome measurement.
inline LoccProtocol drhm_two_value_rounds(const MatchingFamily& fam) {
    const DrhmLayout lay = drhm_layout(fam);
    const Eigen::Index dim = lay.message_dim();
    const auto nd = static_cast<Eigen::Index>(lay.n);
    const std::size_t reg = lay.register_bits;
    const std::size_t groups = ceil_log2(lay.n / 2);
    const std::size_t steps = 2 * reg + 2 * (groups + 1);

    // Matching index decoded from one side's register outcomes (side 0 = A's steps).
    auto decoded = [reg](const History& h, std::size_t side) {
        std::size_t v = 0;
        for (std::size_t l = 0; l < reg; ++l) {
            v = (v << 1) | h[2 * l + side];
        }
        return v;
    };
    // Surviving candidate range [lo, lo + len) after `count` halvings by one side.
    auto candidates = [reg](const History& h, std::size_t side, std::size_t count, std::size_t edges) {
        std::size_t lo = 0;
        std::size_t len = edges;
        for (std::size_t g = 0; g < count; ++g) {
            len /= 2;
            if (h[2 * reg + 2 * g + side] == 1) {
                lo += len;
            }
        }
        return std::pair{lo, len};
    };

    auto builder = [=](Side side, const History& h) -> Instrument {
        const std::size_t step = h.size();
        const std::size_t s = side == Side::A ? 0 : 1;
        if (step < 2 * reg) {
            return Instrument::projective_pair(detail::register_bit_zero_projector(lay, step / 2));
        }
        // Ref_A works with M1 (Ref_B's register), Ref_B with M2 (Ref_A's register).
        const std::size_t idx = decoded(h, 1 - s);
        if (idx >= fam.size()) {
            return Instrument::trivial_two_value(dim);
        }
        const Matching& m = fam.matchings[idx];
        const std::size_t g = (step - 2 * reg) / 2;
        const auto [lo, len] = candidates(h, s, g, m.size());
        if (g < groups) {
            Matrix p = Matrix::Zero(nd, nd);
            for (std::size_t e = lo; e < lo + len / 2; ++e) {
                p += edge_projector(m[e], nd);
            }
            return Instrument::projective_pair(detail::on_phase(p, lay));
        }
        return Instrument::projective_pair(detail::on_phase(edge_plus_projector(m[lo], nd), lay));
    };
    auto output = [=](const History& h) -> Output {
        if (h.size() < steps) {
            return {-1};
        }
        const std::size_t i1 = decoded(h, 1);
        const std::size_t i2 = decoded(h, 0);
        if (i1 >= fam.size() || i2 >= fam.size()) {
            return {-1};
        }
        const auto e1 = candidates(h, 0, groups, fam.matchings[i1].size()).first;
        const auto e2 = candidates(h, 1, groups, fam.matchings[i2].size()).first;
        return detail::flatten_tuples(fam.matchings[i1][e1], h[steps - 2], fam.matchings[i2][e2], h[steps - 1]);
    };
    return LoccProtocol::build(dim, dim, steps, builder, output);
}

/// Every output with positive probability solves both instances.
inline bool drhm_output_correct(const Output& out, const MatchingFamily& fam, const DrhmInputs& in) {
    if (out.size() != 6) {
        return false;
    }
    const HmTuple t1{static_cast<std::uint32_t>(out[0]), static_cast<std::uint32_t>(out[1]),
                     static_cast<std::uint8_t>(out[2])};
    const HmTuple t2{static_cast<std::uint32_t>(out[3]), static_cast<std::uint32_t>(out[4]),
                     static_cast<std::uint8_t>(out[5])};
    return hm_tuple_correct(t1, in.x1, fam.matchings[in.m1]) && hm_tuple_correct(t2, in.x2, fam.matchings[in.m2]);
}

}  // namespace smplocc
