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

#include <cmath>
#include <map>

#include "smplocc/protocols/locc.hpp"
#include "smplocc/random.hpp"

namespace smplocc {
namespace {

// History probability computed on the joint space with unnormalized lifted Kraus
// products, without local post-state bookkeeping.
std::map<History, double> global_history_probs(const LoccProtocol& p, const DensityMatrix& ra,
                                               const DensityMatrix& rb) {
    const Eigen::Index da = p.dim_a();
    const Eigen::Index db = p.dim_b();
    const Matrix joint = tensor(ra.matrix(), rb.matrix());
    std::map<History, double> out;
    std::function<void(History&, const Matrix&)> walk = [&](History& h, const Matrix& k) {
        if (h.size() == p.steps()) {
            out[h] = real_trace(k * joint * k.adjoint());
            return;
        }
        const Instrument& ins = p.instrument(h);
        for (std::size_t m = 0; m < ins.size(); ++m) {
            const Matrix lift = side_of_step(h.size()) == Side::A ? tensor(ins[m], Matrix::Identity(db, db))
                                                                 : tensor(Matrix::Identity(da, da), ins[m]);
            h.push_back(static_cast<std::uint32_t>(m));
            walk(h, lift * k);
            h.pop_back();
        }
    };
    History h;
    walk(h, Matrix::Identity(da * db, da * db));
    return out;
}

TEST(Locc, ExactDistributionMatchesJointSpaceOracle) {
    Rng rng(41);
    for (int t = 0; t < 20; ++t) {
        const Eigen::Index da = 2 + static_cast<Eigen::Index>(rng.below(3));
        const Eigen::Index db = 2 + static_cast<Eigen::Index>(rng.below(3));
        const std::size_t r = 1 + rng.below(3);
        const LoccProtocol p = random_two_value_protocol(da, db, r, rng);
        EXPECT_EQ(p.steps(), 2 * r + 1);
        EXPECT_EQ(p.rounds(), r);
        EXPECT_TRUE(p.two_value());
        const DensityMatrix ra = random::density(da, rng);
        const DensityMatrix rb = random::density(db, rng);
        const TranscriptDistribution dist = run_locc_exact(p, ra, rb);
        const auto oracle = global_history_probs(p, ra, rb);
        EXPECT_NEAR(dist.total(), 1.0, 1e-10);
        ASSERT_EQ(dist.probs.size(), oracle.size());
        double acc = 0.0;
        for (const auto& [h, q] : oracle) {
            EXPECT_NEAR(dist.probs.at(h), q, 1e-10);
            acc += h.back() == 1 ? q : 0.0;
        }
        EXPECT_NEAR(dist.acceptance(p), acc, 1e-10);
    }
}

TEST(Locc, MultiOutcomeInstrumentsAndCustomOutput) {
    Rng rng(42);
    const LoccProtocol p = LoccProtocol::build(
        2, 3, 2,
        [&](Side side, const History&) {
            return Instrument(random::instrument_kraus(side == Side::A ? 2 : 3, 3, rng));
        },
        [](const History& h) { return Output{static_cast<std::int64_t>(h[0] + h[1])}; });
    EXPECT_FALSE(p.two_value());
    const DensityMatrix ra = random::density(2, rng);
    const DensityMatrix rb = random::density(3, rng);
    const auto outputs = run_locc_exact(p, ra, rb).outputs(p);
    const auto oracle = global_history_probs(p, ra, rb);
    std::map<Output, double> expected;
    for (const auto& [h, q] : oracle) {
        expected[Output{static_cast<std::int64_t>(h[0] + h[1])}] += q;
    }
    ASSERT_EQ(outputs.size(), expected.size());
    for (const auto& [o, q] : expected) {
        EXPECT_NEAR(outputs.at(o), q, 1e-10);
    }
}

TEST(Locc, SampledRunsFollowExactDistribution) {
    Rng rng(43);
    const LoccProtocol p = random_two_value_protocol(2, 2, 1, rng);
    const DensityMatrix ra = random::density(2, rng);
    const DensityMatrix rb = random::density(2, rng);
    const auto exact = run_locc_exact(p, ra, rb);
    std::map<History, int> counts;
    const int n = 40000;
    for (int i = 0; i < n; ++i) {
        ++counts[run_locc_sampled(p, ra, rb, rng)];
    }
    for (const auto& [h, q] : exact.probs) {
        EXPECT_NEAR(counts[h] / static_cast<double>(n), q, 0.01) << history_to_string(h);
    }
}

TEST(Locc, DefaultOutputIsLastRefAOutcome) {
    const auto rule = LoccProtocol::default_output(3);
    EXPECT_EQ(rule(History{0, 1, 1}), Output{1});
    EXPECT_EQ(rule(History{1, 1, 0}), Output{0});
    EXPECT_EQ(rule(History{1, 1}), Output{-1});
}

TEST(Locc, DimensionMismatchIsRejected) {
    Rng rng(44);
    const LoccProtocol p = random_two_value_protocol(2, 2, 1, rng);
    EXPECT_THROW(run_locc_exact(p, random::density(3, rng), random::density(2, rng)), ContractViolation);
}

TEST(Locc, DegenerateBranchesAreTruncated) {
    // Alice's first outcome 1 never happens on |0⟩.
    const Matrix p0 = projector(basis_vector(2, 0));
    const LoccProtocol p = LoccProtocol::build(2, 2, 3, [&](Side, const History&) {
        return Instrument::projective_pair(p0);
    });
    const DensityMatrix zero = DensityMatrix::from_ket(Ket::basis(2, 0));
    const auto dist = run_locc_exact(p, zero, zero);
    EXPECT_NEAR(dist.total(), 1.0, 1e-12);
    EXPECT_EQ(dist.probs.size(), 1u);
    EXPECT_NEAR(dist.probs.at(History{0, 0, 0}), 1.0, 1e-12);
}

}  // namespace
}  // namespace smplocc
