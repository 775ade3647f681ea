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
#include <set>

#include "smplocc/protocols/hidden_matching.hpp"

namespace smplocc {
namespace {

// Closed form of the one-way protocol: edge (i, j) of M with probability 2/n, reported
// with b = x_i ⊕ x_j.
std::map<HmTuple, double> hm_closed_form(const Bits& x, const Matching& m) {
    std::map<HmTuple, double> out;
    for (const auto& e : m) {
        out[HmTuple{e.first, e.second, static_cast<std::uint8_t>(x[e.first] ^ x[e.second])}] =
            2.0 / static_cast<double>(x.size());
    }
    return out;
}

// DRHM closed form: both halves independent, every edge pair with probability (2/n)².
std::map<Output, double> drhm_closed_form(const MatchingFamily& fam, const DrhmInputs& in) {
    std::map<Output, double> out;
    const double w = 2.0 / static_cast<double>(fam.n);
    for (const auto& e1 : fam.matchings[in.m1]) {
        for (const auto& e2 : fam.matchings[in.m2]) {
            out[Output{e1.first, e1.second, in.x1[e1.first] ^ in.x1[e1.second], e2.first, e2.second,
                       in.x2[e2.first] ^ in.x2[e2.second]}] = w * w;
        }
    }
    return out;
}

void expect_same(const std::map<Output, double>& got, const std::map<Output, double>& want, double tol) {
    double mass = 0.0;
    for (const auto& [o, p] : got) {
        if (p <= tol) {
            continue;
        }
        mass += p;
        ASSERT_TRUE(want.count(o));
        EXPECT_NEAR(p, want.at(o), tol);
    }
    EXPECT_NEAR(mass, 1.0, tol * static_cast<double>(want.size() + 1));
}

TEST(MatchingFamily, SmallFamilyIsExplicit) {
    const MatchingFamily f = matching_family(4);
    ASSERT_EQ(f.size(), 3u);
    EXPECT_EQ(f.matchings[0], (Matching{{0, 1}, {2, 3}}));
    EXPECT_EQ(f.matchings[1], (Matching{{0, 2}, {1, 3}}));
    EXPECT_EQ(f.matchings[2], (Matching{{0, 3}, {1, 2}}));
}

TEST(MatchingFamily, OneFactorizationInvariants) {
    for (std::uint32_t n = 2; n <= 16; n += 2) {
        const MatchingFamily f = matching_family(n);
        EXPECT_EQ(f.size(), n - 1u);
        EXPECT_TRUE(f.valid());
        std::set<Edge> all;
        for (const auto& m : f.matchings) {
            EXPECT_EQ(m, canonical(m));
            EXPECT_EQ(m.size(), n / 2u);
            all.insert(m.begin(), m.end());
        }
        EXPECT_EQ(all.size(), static_cast<std::size_t>(n) * (n - 1) / 2);
        EXPECT_TRUE(std::is_sorted(f.matchings.begin(), f.matchings.end()));
    }
    EXPECT_THROW(matching_family(5), ContractViolation);
}

TEST(MatchingFamily, PerfectMatchingCheck) {
    EXPECT_TRUE(is_perfect_matching({{1, 0}, {3, 2}}, 4));
    EXPECT_FALSE(is_perfect_matching({{0, 1}, {1, 2}}, 4));
    EXPECT_FALSE(is_perfect_matching({{0, 1}}, 4));
    EXPECT_FALSE(is_perfect_matching({{0, 0}, {1, 2}}, 4));
    EXPECT_FALSE(is_perfect_matching({{0, 1}, {2, 7}}, 4));
    MatchingFamily bad{4, {{{0, 1}, {2, 3}}, {{0, 1}, {2, 3}}}};
    EXPECT_FALSE(bad.valid());
}

TEST(PhaseState, Amplitudes) {
    const Ket k = phase_state(bits_from_string("0110"));
    EXPECT_NEAR(k(0).real(), 0.5, 1e-15);
    EXPECT_NEAR(k(1).real(), -0.5, 1e-15);
    EXPECT_NEAR(k(2).real(), -0.5, 1e-15);
    EXPECT_NEAR(k(3).real(), 0.5, 1e-15);
}

TEST(HiddenMatching, MatchesClosedFormExhaustivelyAtN4) {
    const MatchingFamily f = matching_family(4);
    for (const auto& m : f.matchings) {
        for (std::uint64_t v = 0; v < 16; ++v) {
            const Bits x = bits_from_int(v, 4);
            const auto got = hm_protocol(4, x, m);
            const auto want = hm_closed_form(x, m);
            for (const auto& [t, p] : want) {
                ASSERT_TRUE(got.count(t));
                EXPECT_NEAR(got.at(t), p, 1e-12);
                EXPECT_TRUE(hm_tuple_correct(t, x, m));
            }
            for (const auto& [t, p] : got) {
                if (!want.count(t)) {
                    EXPECT_NEAR(p, 0.0, 1e-12);
                }
            }
        }
    }
}

TEST(HiddenMatching, ZeroErrorOnRandomInputsAtN16) {
    Rng rng(61);
    const MatchingFamily f = matching_family(16);
    for (int t = 0; t < 20; ++t) {
        const Bits x = bits_from_int(rng.below(1u << 16), 16);
        const Matching& m = f.matchings[rng.below(f.size())];
        for (const auto& [tuple, p] : hm_protocol(16, x, m)) {
            EXPECT_TRUE(hm_tuple_correct(tuple, x, m) || p <= 1e-12);
        }
    }
}

TEST(HiddenMatching, TupleCheckRejectsWrongAnswers) {
    const Matching m{{0, 1}, {2, 3}};
    const Bits x = bits_from_string("1000");
    EXPECT_TRUE(hm_tuple_correct({0, 1, 1}, x, m));
    EXPECT_TRUE(hm_tuple_correct({1, 0, 1}, x, m));
    EXPECT_FALSE(hm_tuple_correct({0, 1, 0}, x, m));
    EXPECT_FALSE(hm_tuple_correct({0, 2, 1}, x, m));
}

TEST(Drhm, LayoutAtN4) {
    const DrhmLayout lay = drhm_layout(matching_family(4));
    EXPECT_EQ(lay.register_bits, 2u);
    EXPECT_EQ(lay.message_dim(), 16);
    EXPECT_EQ(lay.message_qubits_total(), 8u);
}

TEST(Drhm, BothSchedulesMatchClosedForm) {
    Rng rng(62);
    const MatchingFamily f = matching_family(4);
    const LoccProtocol multi = drhm_locc_protocol(f);
    const LoccProtocol binary = drhm_two_value_rounds(f);
    EXPECT_EQ(multi.steps(), 6u);
    EXPECT_TRUE(binary.two_value());
    EXPECT_EQ(binary.steps(), 2u * 2u + 2u * 2u);
    for (std::size_t m1 = 0; m1 < 3; ++m1) {
        for (std::size_t m2 = 0; m2 < 3; ++m2) {
            for (int t = 0; t < 4; ++t) {
                const DrhmInputs in{bits_from_int(rng.below(16), 4), bits_from_int(rng.below(16), 4), m1, m2};
                const DrhmMessages msg = drhm_messages(f, in);
                const auto want = drhm_closed_form(f, in);
                expect_same(run_locc_exact(multi, msg.alice, msg.bob).outputs(multi), want, 1e-10);
                expect_same(run_locc_exact(binary, msg.alice, msg.bob).outputs(binary), want, 1e-10);
                for (const auto& [o, p] : want) {
                    EXPECT_TRUE(drhm_output_correct(o, f, in));
                }
            }
        }
    }
}

TEST(Drhm, BinaryScheduleAtN8) {
    const MatchingFamily f = matching_family(8);
    const LoccProtocol binary = drhm_two_value_rounds(f);
    // 2 log2(8) + 2 ceil(log2(7)) = 12.
    EXPECT_EQ(binary.steps(), 12u);
    EXPECT_TRUE(binary.two_value());
    const DrhmInputs in{bits_from_string("10110010"), bits_from_string("01101100"), 5, 2};
    const DrhmMessages msg = drhm_messages(f, in);
    expect_same(run_locc_exact(binary, msg.alice, msg.bob).outputs(binary), drhm_closed_form(f, in), 1e-10);
}

TEST(Drhm, RejectsBadInputs) {
    const MatchingFamily f = matching_family(4);
    EXPECT_THROW(drhm_messages(f, DrhmInputs{bits_from_string("0000"), bits_from_string("0000"), 3, 0}),
                 ContractViolation);
    EXPECT_THROW(drhm_messages(f, DrhmInputs{bits_from_string("000"), bits_from_string("0000"), 0, 0}),
                 ContractViolation);
    EXPECT_FALSE(drhm_output_correct(Output{-1}, f, DrhmInputs{bits_from_string("0000"), bits_from_string("0000"), 0, 0}));
}

}  // namespace
}  // namespace smplocc
