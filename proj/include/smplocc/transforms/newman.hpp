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

// Newman-style reduction of shared randomness: sample t coin strings, let Alice and the
// referee pick one of them uniformly, and verify the worst-case error exhaustively.

#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <vector>

#include "smplocc/errors.hpp"
#include "smplocc/fingerprints.hpp"
#include "smplocc/linalg.hpp"
#include "smplocc/rng.hpp"

namespace smplocc {

/// A public-coin protocol with exactly computable error V(x, y, coins).
template <typename P>
concept PublicCoinProtocol = requires(const P& p, Rng& rng, std::size_t i, const typename P::Coins& c) {
    typename P::Coins;
    { p.x_count() } -> std::convertible_to<std::size_t>;
    { p.y_count() } -> std::convertible_to<std::size_t>;
    { p.sample_coins(rng) } -> std::same_as<typename P::Coins>;
    { p.error(i, i, c) } -> std::convertible_to<double>;
};

/// t = ceil(ln(2|X||Y|) / (2δ²)).
inline std::size_t newman_sample_count(std::size_t x_count, std::size_t y_count, double delta) {
    require(delta > 0.0, "newman: delta must be positive");
    const double pairs = static_cast<double>(x_count) * static_cast<double>(y_count);
    return static_cast<std::size_t>(std::ceil(std::log(2.0 * pairs) / (2.0 * delta * delta)));
}

template <PublicCoinProtocol P>
struct DerandomizedProtocol {
    std::vector<typename P::Coins> coins;
    double max_error = 0.0;  // max over inputs of the average error over the t strings
    std::size_t attempts = 0;

    [[nodiscard]] std::size_t t() const { return coins.size(); }
    /// Bits Alice adds to her message to name the chosen string.
    [[nodiscard]] std::size_t randomness_bits() const { return ceil_log2(coins.size()); }

    [[nodiscard]] double error(const P& p, std::size_t x, std::size_t y) const {
        double s = 0.0;
        for (const auto& c : coins) {
            s += p.error(x, y, c);
        }
        return s / static_cast<double>(coins.size());
    }
};

/// Worst-case average error of a candidate string set over all input pairs.
template <PublicCoinProtocol P>
double newman_max_error(const P& p, const std::vector<typename P::Coins>& coins) {
    double worst = 0.0;
    for (std::size_t x = 0; x < p.x_count(); ++x) {
        for (std::size_t y = 0; y < p.y_count(); ++y) {
            double s = 0.0;
            for (const auto& c : coins) {
                s += p.error(x, y, c);
            }
            worst = std::max(worst, s / static_cast<double>(coins.size()));
        }
    }
    return worst;
}

/// Samples t strings and accepts them when every input pair has average error at most
/// ε + δ; otherwise resamples, up to `retries` attempts in total.
template <PublicCoinProtocol P>
DerandomizedProtocol<P> newman_derandomize(const P& p, double eps, double delta, Rng& rng, std::size_t retries = 10) {
    require(p.x_count() * p.y_count() <= (std::size_t{1} << 16), "newman: input space too large to verify");
    require(retries >= 1, "newman: need at least one attempt");
    const std::size_t t = newman_sample_count(p.x_count(), p.y_count(), delta);
    for (std::size_t attempt = 1; attempt <= retries; ++attempt) {
        DerandomizedProtocol<P> d;
        d.attempts = attempt;
        for (std::size_t i = 0; i < t; ++i) {
            d.coins.push_back(p.sample_coins(rng));
        }
        d.max_error = newman_max_error(p, d.coins);
        if (d.max_error <= eps + delta + 1e-12) {
            return d;
        }
    }
    throw ExistenceSamplingError("newman: no sampled string set met eps + delta");
}

/// Public-coin hybrid equality test. The shared coins are `hashes` random parity masks;
/// Alice sends the parities <s_i, x> classically, Bob sends |y⟩ in the computational
/// basis, and the referee measures |y⟩ and accepts iff every parity of y matches. Error
/// is one-sided: 2^{−hashes} on every x ≠ y.
class HashingEqProtocol {
public:
    using Coins = std::vector<std::uint64_t>;

    HashingEqProtocol(std::size_t n, std::size_t hashes) : n_(n), hashes_(hashes) {
        require(n >= 1 && n <= 16, "HashingEqProtocol: n out of range");
        require(hashes >= 1, "HashingEqProtocol: need at least one hash");
    }

    [[nodiscard]] std::size_t n() const { return n_; }
    [[nodiscard]] std::size_t x_count() const { return std::size_t{1} << n_; }
    [[nodiscard]] std::size_t y_count() const { return std::size_t{1} << n_; }
    [[nodiscard]] double epsilon() const { return std::ldexp(1.0, -static_cast<int>(hashes_)); }
    [[nodiscard]] std::size_t alice_bits() const { return hashes_; }
    [[nodiscard]] std::size_t bob_qubits() const { return n_; }

    [[nodiscard]] Coins sample_coins(Rng& rng) const {
        Coins c(hashes_);
        for (auto& s : c) {
            s = rng.below(std::uint64_t{1} << n_);
        }
        return c;
    }

    [[nodiscard]] static std::uint8_t parity(std::uint64_t mask, std::uint64_t v) {
        return static_cast<std::uint8_t>(__builtin_popcountll(mask & v) & 1);
    }

    /// Accept probability given the coins; the computational-basis readout of |y⟩ is
    /// deterministic, so this is 0 or 1.
    [[nodiscard]] double accept_prob(std::size_t x, std::size_t y, const Coins& c) const {
        for (auto s : c) {
            if (parity(s, x) != parity(s, y)) {
                return 0.0;
            }
        }
        return 1.0;
    }

    /// Same quantity with the referee's readout done on the density matrix of |y⟩.
    [[nodiscard]] double accept_prob_quantum(std::size_t x, std::size_t y, const Coins& c) const {
        const auto dim = static_cast<Eigen::Index>(y_count());
        const DensityMatrix sigma = DensityMatrix::from_ket(Ket::basis(dim, static_cast<Eigen::Index>(y)));
        double acc = 0.0;
        for (Eigen::Index v = 0; v < dim; ++v) {
            const double pv = sigma.expectation(projector(basis_vector(dim, v)));
            acc += pv * accept_prob(x, static_cast<std::size_t>(v), c);
        }
        return acc;
    }

    [[nodiscard]] double error(std::size_t x, std::size_t y, const Coins& c) const {
        const double acc = accept_prob(x, y, c);
        return x == y ? 1.0 - acc : acc;
    }

private:
    std::size_t n_;
    std::size_t hashes_;
};

}  // namespace smplocc
