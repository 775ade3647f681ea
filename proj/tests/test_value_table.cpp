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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "smplocc/random.hpp"
#include "smplocc/transforms/value_table.hpp"

namespace smplocc {
namespace {

struct Instance {
    LoccProtocol proto;
    DensityMatrix ra;
    DensityMatrix rb;
};

Instance make_instance(std::size_t r, Rng& rng) {
    const Eigen::Index da = Eigen::Index{1} << (1 + rng.below(3));
    const Eigen::Index db = Eigen::Index{1} << (1 + rng.below(3));
    LoccProtocol p = random_two_value_protocol(da, db, r, rng);
    DensityMatrix ra = random::density(da, rng);
    DensityMatrix rb = random::density(db, rng);
    return {std::move(p), std::move(ra), std::move(rb)};
}

// Probability that the transcript starts with `prefix`.
double prefix_mass(const TranscriptDistribution& d, const History& prefix) {
    double s = 0.0;
    for (const auto& [h, p] : d.probs) {
        if (h.size() >= prefix.size() && std::equal(prefix.begin(), prefix.end(), h.begin())) {
            s += p;
        }
    }
    return s;
}

TEST(RatioIdentity, MatchesStepwiseRenormalization) {
    Rng rng(71);
    for (int t = 0; t < 50; ++t) {
        const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng.below(7));
        const std::size_t len = 1 + rng.below(6);
        std::vector<Matrix> chain;
        for (std::size_t s = 0; s < len; ++s) {
            chain.push_back(random::instrument_kraus(d, 2, rng)[0]);
        }
        const DensityMatrix rho = random::density(d, rng);
        const auto ratio = ratio_conditionals(chain, rho);
        // Oracle: renormalize the post-state by hand after every step.
        Matrix sigma = rho.matrix();
        for (std::size_t k = 0; k < len; ++k) {
            const Matrix next = chain[k] * sigma * chain[k].adjoint();
            const double p = real_trace(next);
            EXPECT_NEAR(ratio[k], p, 1e-9);
            sigma = next / p;
        }
        const auto seq = sequential_conditionals(chain, rho);
        for (std::size_t k = 0; k < len; ++k) {
            EXPECT_NEAR(ratio[k], seq[k], 1e-9);
        }
    }
}

TEST(RatioIdentity, DegenerateChainIsReported) {
    const Matrix p0 = projector(basis_vector(2, 0));
    const Matrix p1 = projector(basis_vector(2, 1));
    const DensityMatrix rho = DensityMatrix::maximally_mixed(2);
    EXPECT_THROW(ratio_conditionals({p0, p1, p0}, rho), DegenerateError);
    EXPECT_THROW(sequential_conditionals({p0, p1, p0}, rho), DegenerateError);
}

TEST(ValueTable, EntriesAreConsistentAndCountedPerRound) {
    Rng rng(72);
    for (std::size_t r = 1; r <= 3; ++r) {
        const Instance in = make_instance(r, rng);
        const ValueTable a = value_table(in.proto, Side::A, in.ra);
        const ValueTable b = value_table(in.proto, Side::B, in.rb);
        EXPECT_LE(a.consistency_defect(), 1e-10);
        EXPECT_LE(b.consistency_defect(), 1e-10);
        // Ref_A measures r + 1 times over binary outcomes of both sides: Σ_k 4^k prefixes.
        std::size_t a_prefixes = 0;
        for (std::size_t k = 0; k <= r; ++k) {
            a_prefixes += std::size_t{1} << (2 * k);
        }
        EXPECT_EQ(a.values.size(), a_prefixes);
        std::size_t b_prefixes = 0;
        for (std::size_t k = 0; k < r; ++k) {
            b_prefixes += std::size_t{2} << (2 * k);
        }
        EXPECT_EQ(b.values.size(), b_prefixes);
        for (const auto& [p, v] : a.values) {
            EXPECT_EQ(p.size() % 2, 0u);
            EXPECT_EQ(a.depth(p), p.size() / 2);
        }
    }
}

TEST(ValueTable, RatiosAreTranscriptConditionals) {
    Rng rng(73);
    const Instance in = make_instance(2, rng);
    const TranscriptDistribution d = run_locc_exact(in.proto, in.ra, in.rb);
    for (Side side : {Side::A, Side::B}) {
        const ValueTable t = value_table(in.proto, side, side == Side::A ? in.ra : in.rb);
        for (const auto& [p, cond] : ratio_conditionals(t)) {
            const double base = prefix_mass(d, p);
            for (std::uint32_t m = 0; m < 2; ++m) {
                History pm = p;
                pm.push_back(m);
                EXPECT_NEAR(prefix_mass(d, pm), base * cond[m], 1e-10);
            }
        }
    }
}

TEST(ValueTable, RejectsNonBinaryProtocols) {
    Rng rng(74);
    const LoccProtocol p = LoccProtocol::build(2, 2, 3, [&](Side, const History&) {
        return Instrument(random::instrument_kraus(2, 3, rng));
    });
    EXPECT_THROW(value_table(p, Side::A, DensityMatrix::maximally_mixed(2)), ContractViolation);
}

TEST(Simulation, ExactTablesReproduceAcceptance) {
    Rng rng(75);
    for (int t = 0; t < 30; ++t) {
        const Instance in = make_instance(1 + t % 3, rng);
        const double truth = run_locc_exact(in.proto, in.ra, in.rb).acceptance(in.proto);
        const ValueTable a = value_table(in.proto, Side::A, in.ra);
        const ValueTable b = value_table(in.proto, Side::B, in.rb);
        EXPECT_NEAR(simulate_from_tables(a, b), truth, 1e-9);
        EXPECT_NEAR(simulate_both_replaced(a, b), truth, 1e-9);
        EXPECT_NEAR(simulate_from_tables(clamp_table(a), b), truth, 1e-9);
        EXPECT_NEAR(simulate_both_replaced(clamp_table(a), clamp_table(b)), truth, 1e-9);
    }
}

TEST(Simulation, OneRoundClosedForm) {
    // r = 1: Σ_{a0,b0,a1} v^A_{a1|a0 b0} · v^B_{b0|a0}, summed over a1 = 1.
    Rng rng(76);
    const Instance in = make_instance(1, rng);
    const ValueTable a = value_table(in.proto, Side::A, in.ra);
    const ValueTable b = value_table(in.proto, Side::B, in.rb);
    double closed = 0.0;
    for (std::uint32_t a0 = 0; a0 < 2; ++a0) {
        for (std::uint32_t b0 = 0; b0 < 2; ++b0) {
            closed += a.at({a0, b0}, 1) * b.at({a0}, b0);
        }
    }
    EXPECT_NEAR(closed, run_locc_exact(in.proto, in.ra, in.rb).acceptance(in.proto), 1e-10);
}

TEST(Clamp, ComplementRuleInvariants) {
    Rng rng(77);
    for (int t = 0; t < 30; ++t) {
        const Instance in = make_instance(1 + t % 3, rng);
        const ValueTable a = value_table(in.proto, Side::A, in.ra);
        const ValueTable noisy = perturb(a, rng.uniform(0.0, 0.3), Perturbation::Uniform, rng);
        const ClampedTable c = clamp_table(noisy);
        EXPECT_LE(c.table.consistency_defect(), 1e-12);
        for (const auto& [p, v] : c.table.values) {
            EXPECT_GE(v[0], 0.0);
            EXPECT_GE(v[1], -1e-15);
        }
        const ClampedTable again = clamp_table(c.table);
        for (const auto& [p, v] : c.table.values) {
            EXPECT_EQ(again.table.values.at(p), v);
        }
    }
}

TEST(Clamp, IndependentRuleStaysInRange) {
    Rng rng(78);
    const Instance in = make_instance(2, rng);
    const ValueTable a = value_table(in.proto, Side::A, in.ra);
    const ClampedTable c = clamp_table(perturb(a, 0.2, Perturbation::RandomSign, rng), ClampRule::Independent);
    for (const auto& [p, v] : c.table.values) {
        const double cap = c.table.is_root(p) ? 1.0 : [&] {
            const auto [q, m] = c.table.parent(p);
            return c.table.at(q, m);
        }();
        EXPECT_GE(v[0], 0.0);
        EXPECT_LE(v[0], cap);
        EXPECT_GE(v[1], 0.0);
        EXPECT_LE(v[1], cap + 1e-15);
    }
}

TEST(Clamp, DepthBoundHolds) {
    Rng rng(79);
    for (int t = 0; t < 30; ++t) {
        const Instance in = make_instance(1 + t % 3, rng);
        const ValueTable a = value_table(in.proto, Side::A, in.ra);
        for (double delta : {0.0, 0.01, 0.1}) {
            for (auto kind : {Perturbation::Uniform, Perturbation::RandomSign, Perturbation::AllPlus,
                              Perturbation::AllMinus, Perturbation::Alternating}) {
                const ClampedTable c = clamp_table(perturb(a, delta, kind, rng));
                EXPECT_LE(clamp_depth_excess(a, c, delta), 1e-12);
            }
        }
    }
}

TEST(Clamp, ErrorBoundsWithOneTableReplaced) {
    Rng rng(80);
    for (int t = 0; t < 30; ++t) {
        const std::size_t r = 1 + t % 3;
        const Instance in = make_instance(r, rng);
        const double truth = run_locc_exact(in.proto, in.ra, in.rb).acceptance(in.proto);
        const ValueTable a = value_table(in.proto, Side::A, in.ra);
        const ValueTable b = value_table(in.proto, Side::B, in.rb);
        const double delta = 0.02;
        const double bound = r == 1 ? 2.0 * delta : single_replaced_bound(r, delta);
        for (int draw = 0; draw < 50; ++draw) {
            const auto kind = draw % 2 == 0 ? Perturbation::Uniform : Perturbation::RandomSign;
            const ClampedTable c = clamp_table(perturb(a, delta, kind, rng));
            EXPECT_LE(std::abs(simulate_from_tables(c, b) - truth), bound + 1e-12);
            const ClampedTable cb = clamp_table(perturb(b, delta, kind, rng));
            EXPECT_LE(std::abs(simulate_both_replaced(c, cb) - truth), both_replaced_envelope(r, delta) + 1e-12);
        }
    }
}

TEST(Perturb, MagnitudesAndPatterns) {
    Rng rng(81);
    const Instance in = make_instance(2, rng);
    const ValueTable a = value_table(in.proto, Side::A, in.ra);
    const double delta = 0.05;
    const ValueTable plus = perturb(a, delta, Perturbation::AllPlus, rng);
    const ValueTable alt = perturb(a, delta, Perturbation::Alternating, rng);
    const ValueTable uni = perturb(a, delta, Perturbation::Uniform, rng);
    for (const auto& [p, v] : a.values) {
        for (int m = 0; m < 2; ++m) {
            EXPECT_NEAR(plus.values.at(p)[m] - v[m], delta, 1e-15);
            EXPECT_NEAR(alt.values.at(p)[m] - v[m], a.depth(p) % 2 == 0 ? delta : -delta, 1e-15);
            EXPECT_LE(std::abs(uni.values.at(p)[m] - v[m]), delta);
        }
    }
}

TEST(Bounds, Formulas) {
    EXPECT_NEAR(single_replaced_bound(1, 0.1), 0.4, 1e-15);
    EXPECT_NEAR(single_replaced_bound(3, 0.01), 8.0 * 4.0 * 0.01, 1e-15);
    EXPECT_NEAR(both_replaced_envelope(1, 0.1), 4.0 * (0.4 + 0.04), 1e-14);
    EXPECT_NEAR(both_replaced_envelope(2, 0.01), 16.0 * (0.06 + 0.0009), 1e-14);
}

}  // namespace
}  // namespace smplocc
