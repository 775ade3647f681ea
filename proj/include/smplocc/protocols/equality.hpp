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

// Equality protocols: quantum fingerprinting with SWAP tests, and the classical
// grid protocol built on the same codes.

#pragma once

#include <cmath>
#include <cstddef>

#include "smplocc/errors.hpp"
#include "smplocc/fingerprints.hpp"
#include "smplocc/rng.hpp"

namespace smplocc {

/// Alice and Bob each send k fingerprint copies; the referee runs k SWAP tests on fresh
/// pairs and accepts iff all of them accept.
class FingerprintEqProtocol {
public:
    FingerprintEqProtocol(std::size_t n, std::size_t k, Rng& rng) : code_(default_code(n, rng)), k_(k) {
        require(k >= 1, "FingerprintEqProtocol: k must be positive");
    }
    FingerprintEqProtocol(CodeSpec code, std::size_t k) : code_(std::move(code)), k_(k) {
        require(k >= 1, "FingerprintEqProtocol: k must be positive");
    }

    [[nodiscard]] const CodeSpec& code() const { return code_; }
    [[nodiscard]] std::size_t repetitions() const { return k_; }

    [[nodiscard]] double accept_prob(const Bits& x, const Bits& y) const {
        return std::pow(swap_accept_prob(fingerprint_overlap(code_, x, y)), static_cast<double>(k_));
    }

    /// Same quantity with every SWAP test simulated as a circuit on the explicit states.
    [[nodiscard]] double accept_prob_by_circuit(const Bits& x, const Bits& y) const {
        const double single = swap_circuit_sim(fingerprint_state(code_, x), fingerprint_state(code_, y));
        return std::pow(single, static_cast<double>(k_));
    }

    /// Qubits per party.
    [[nodiscard]] std::size_t message_qubits() const { return k_ * ceil_log2(2 * code_.N); }

private:
    CodeSpec code_;
    std::size_t k_;
};

/// Codeword laid out row-major on a side×side grid (zero padded). Alice sends a random
/// row index and that row of E(x); Bob sends a random column index and that column of
/// E(y); the referee accepts iff the two bits at the intersection agree.
class AmbainisEqProtocol {
public:
    AmbainisEqProtocol(std::size_t n, std::size_t reps, Rng& rng) : code_(default_code(n, rng)), reps_(reps) {
        require(reps >= 1, "AmbainisEqProtocol: reps must be positive");
        side_ = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(code_.N))));
        while (side_ * side_ < code_.N) {
            ++side_;
        }
    }

    [[nodiscard]] const CodeSpec& code() const { return code_; }
    [[nodiscard]] std::size_t side() const { return side_; }

    [[nodiscard]] std::size_t message_bits_per_rep() const { return 2 * (side_ + ceil_log2(side_)); }
    [[nodiscard]] std::size_t message_bits() const { return reps_ * message_bits_per_rep(); }

    /// Grid cell (row, col) of the padded codeword.
    [[nodiscard]] std::uint8_t cell(const Bits& codeword, std::size_t row, std::size_t col) const {
        const std::size_t pos = row * side_ + col;
        return pos < codeword.size() ? codeword[pos] : 0;
    }

    /// Exact single-repetition rejection probability over all (row, col) pairs.
    [[nodiscard]] double reject_prob_single(const Bits& x, const Bits& y) const {
        const Bits ex = encode(code_, x);
        const Bits ey = encode(code_, y);
        std::size_t differ = 0;
        for (std::size_t r = 0; r < side_; ++r) {
            for (std::size_t c = 0; c < side_; ++c) {
                differ += cell(ex, r, c) != cell(ey, r, c) ? 1 : 0;
            }
        }
        return static_cast<double>(differ) / static_cast<double>(side_ * side_);
    }

    [[nodiscard]] double accept_prob(const Bits& x, const Bits& y) const {
        return std::pow(1.0 - reject_prob_single(x, y), static_cast<double>(reps_));
    }

    /// One sampled run with private randomness for both parties.
    [[nodiscard]] bool run(const Bits& x, const Bits& y, Rng& rng) const {
        const Bits ex = encode(code_, x);
        const Bits ey = encode(code_, y);
        for (std::size_t rep = 0; rep < reps_; ++rep) {
            const std::size_t row = rng.below(side_);
            const std::size_t col = rng.below(side_);
            if (cell(ex, row, col) != cell(ey, row, col)) {
                return false;
            }
        }
        return true;
    }

private:
    CodeSpec code_;
    std::size_t reps_;
    std::size_t side_ = 1;
};

}  // namespace smplocc
