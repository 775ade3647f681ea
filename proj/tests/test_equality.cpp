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

#include "smplocc/protocols/equality.hpp"

namespace smplocc {
namespace {

TEST(FingerprintEq, ExhaustiveAcceptanceAtSmallN) {
    Rng rng(51);
    for (std::size_t k : {1u, 3u, 5u}) {
        const FingerprintEqProtocol p(4, k, rng);
        const double expected = std::pow(5.0 / 8.0, static_cast<double>(k));
        for (std::uint64_t a = 0; a < 16; ++a) {
            for (std::uint64_t b = 0; b < 16; ++b) {
                const Bits x = bits_from_int(a, 4);
                const Bits y = bits_from_int(b, 4);
                EXPECT_NEAR(p.accept_prob(x, y), a == b ? 1.0 : expected, 1e-12);
            }
        }
    }
}

TEST(FingerprintEq, CircuitAgreesWithFormula) {
    Rng rng(52);
    const FingerprintEqProtocol p(hadamard_code(6), 2);
    for (int t = 0; t < 10; ++t) {
        const Bits x = bits_from_int(rng.below(64), 6);
        const Bits y = bits_from_int(rng.below(64), 6);
        EXPECT_NEAR(p.accept_prob_by_circuit(x, y), p.accept_prob(x, y), 1e-9);
    }
}

TEST(FingerprintEq, QubitCount) {
    // Hadamard code at n = 8 has N = 256, so each copy lives on C^256 ⊗ C^2.
    const FingerprintEqProtocol p(hadamard_code(8), 5);
    EXPECT_EQ(p.message_qubits(), 5u * 9u);
}

TEST(FingerprintEq, RejectsZeroRepetitions) { EXPECT_THROW(FingerprintEqProtocol(hadamard_code(3), 0), ContractViolation); }

TEST(AmbainisEq, RejectionAtLeastRelativeDistance) {
    Rng rng(53);
    for (std::size_t n : {3u, 4u, 5u, 6u}) {
        const AmbainisEqProtocol p(n, 1, rng);
        // Zero padding dilutes the distance by N / side^2; no dilution when N is a square.
        const double fill = static_cast<double>(p.code().N) / static_cast<double>(p.side() * p.side());
        const double rel = p.code().relative_distance() * fill;
        for (std::uint64_t a = 0; a < (1u << n); ++a) {
            const Bits x = bits_from_int(a, n);
            EXPECT_DOUBLE_EQ(p.accept_prob(x, x), 1.0);
            for (std::uint64_t b = 0; b < (1u << n); ++b) {
                if (a != b) {
                    EXPECT_GE(p.reject_prob_single(x, bits_from_int(b, n)), rel - 1e-15);
                }
            }
        }
    }
}

TEST(AmbainisEq, GridCoversCodeword) {
    Rng rng(54);
    const AmbainisEqProtocol p(5, 2, rng);  // N = 32
    EXPECT_EQ(p.side(), 6u);
    EXPECT_GE(p.side() * p.side(), p.code().N);
    EXPECT_EQ(p.message_bits_per_rep(), 2u * (6u + 3u));
    EXPECT_EQ(p.message_bits(), 2u * p.message_bits_per_rep());
}

TEST(AmbainisEq, SampledRunsMatchExactRejection) {
    Rng rng(55);
    const AmbainisEqProtocol p(4, 1, rng);
    const Bits x = bits_from_string("1010");
    const Bits y = bits_from_string("0110");
    int accepted = 0;
    const int n = 40000;
    for (int i = 0; i < n; ++i) {
        accepted += p.run(x, y, rng) ? 1 : 0;
    }
    EXPECT_NEAR(accepted / static_cast<double>(n), p.accept_prob(x, y), 0.01);
    for (int i = 0; i < 100; ++i) {
        EXPECT_TRUE(p.run(x, x, rng));
    }
}

}  // namespace
}  // namespace smplocc
