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

// Binary codes, quantum fingerprint states and SWAP-test statistics.
//
// Bit-string conventions: a Bits value stores one bit per element (0 or 1).
// When a bit string is read as an integer, element 0 is the most significant
// bit. Hadamard codeword positions z are enumerated in ascending integer order,
// so for n = 2 and x = "10" the codeword is x·z over z = 00, 01, 10, 11, i.e.
// "0011".

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "smplocc/errors.hpp"
#include "smplocc/linalg.hpp"
#include "smplocc/rng.hpp"

namespace smplocc {

using Bits = std::vector<std::uint8_t>;

inline Bits bits_from_string(const std::string& s) {
    Bits out;
    out.reserve(s.size());
    for (char ch : s) {
        require(ch == '0' || ch == '1', "bits_from_string: expected 0/1");
        out.push_back(static_cast<std::uint8_t>(ch - '0'));
    }
    return out;
}

inline std::string bits_to_string(const Bits& b) {
    std::string s;
    s.reserve(b.size());
    for (auto v : b) {
        s.push_back(v ? '1' : '0');
    }
    return s;
}

/// Bits of `value` with element 0 holding bit (width - 1).
inline Bits bits_from_int(std::uint64_t value, std::size_t width) {
    Bits out(width);
    for (std::size_t i = 0; i < width; ++i) {
        out[i] = static_cast<std::uint8_t>((value >> (width - 1 - i)) & 1U);
    }
    return out;
}

inline std::uint64_t bits_to_int(const Bits& b) {
    std::uint64_t v = 0;
    for (auto bit : b) {
        v = (v << 1) | (bit & 1U);
    }
    return v;
}

inline std::size_t hamming_distance(const Bits& a, const Bits& b) {
    require(a.size() == b.size(), "hamming_distance: length mismatch");
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d += (a[i] != b[i]) ? 1 : 0;
    }
    return d;
}

enum class CodeKind { Hadamard, RandomLinear };

struct CodeSpec {
    CodeKind kind = CodeKind::Hadamard;
    std::size_t n = 0;  // message bits
    std::size_t N = 0;  // codeword bits
    std::vector<Bits> generator;  // N rows of n bits (random-linear only)
    std::size_t min_distance = 0;
    bool distance_exact = false;

    [[nodiscard]] double relative_distance() const {
        return static_cast<double>(min_distance) / static_cast<double>(N);
    }
};

inline Bits encode(const CodeSpec& code, const Bits& x) {
    require(x.size() == code.n, "encode: message length mismatch");
    Bits out(code.N, 0);
    if (code.kind == CodeKind::Hadamard) {
        const std::uint64_t xv = bits_to_int(x);
        for (std::size_t z = 0; z < code.N; ++z) {
            out[z] = static_cast<std::uint8_t>(__builtin_popcountll(xv & z) & 1);
        }
        return out;
    }
    for (std::size_t i = 0; i < code.N; ++i) {
        unsigned acc = 0;
        for (std::size_t j = 0; j < code.n; ++j) {
            acc ^= code.generator[i][j] & x[j];
        }
        out[i] = static_cast<std::uint8_t>(acc);
    }
    return out;
}

/// Minimum Hamming distance of a linear code.
struct DistanceReport {
    std::size_t value = 0;
    bool exact = false;  // false: sampled estimate (an upper bound on the true minimum)
};

/// Exact minimum weight over all nonzero messages when n <= 14; otherwise the minimum
/// over `samples` random nonzero messages, flagged as inexact.
inline DistanceReport min_distance_check(const CodeSpec& code, Rng* rng = nullptr,
                                         std::size_t samples = 1 << 14) {
    require(code.n >= 1 && code.n <= 63, "min_distance_check: unsupported n");
    auto weight_of = [&](std::uint64_t msg) {
        const Bits cw = encode(code, bits_from_int(msg, code.n));
        return static_cast<std::size_t>(std::count(cw.begin(), cw.end(), 1));
    };
    DistanceReport rep;
    rep.value = code.N;
    if (code.n <= 14) {
        rep.exact = true;
        for (std::uint64_t m = 1; m < (std::uint64_t{1} << code.n); ++m) {
            rep.value = std::min(rep.value, weight_of(m));
        }
        return rep;
    }
    require(rng != nullptr, "min_distance_check: sampled mode needs a generator");
    const std::uint64_t space = (std::uint64_t{1} << code.n) - 1;
    for (std::size_t s = 0; s < samples; ++s) {
        rep.value = std::min(rep.value, weight_of(1 + rng->below(space)));
    }
    return rep;
}

inline CodeSpec hadamard_code(std::size_t n) {
    require(n >= 1 && n <= 20, "hadamard_code: n out of range");
    CodeSpec c;
    c.kind = CodeKind::Hadamard;
    c.n = n;
    c.N = std::size_t{1} << n;
    c.min_distance = c.N / 2;
    c.distance_exact = true;
    return c;
}

/// Random generator matrix with N = 4n rows, resampled until the verified distance is
/// at least ceil(c·N).
inline CodeSpec random_linear_code(std::size_t n, Rng& rng, double c = 0.1, std::size_t max_tries = 64) {
    require(n >= 1 && n <= 20, "random_linear_code: n out of range");
    CodeSpec code;
    code.kind = CodeKind::RandomLinear;
    code.n = n;
    code.N = 4 * n;
    const auto target = static_cast<std::size_t>(std::ceil(c * static_cast<double>(code.N)));
    for (std::size_t attempt = 0; attempt < max_tries; ++attempt) {
        code.generator.assign(code.N, Bits(n, 0));
        for (auto& row : code.generator) {
            for (auto& bit : row) {
                bit = static_cast<std::uint8_t>(rng.coin());
            }
        }
        const DistanceReport rep = min_distance_check(code, &rng);
        if (rep.value >= target) {
            code.min_distance = rep.value;
            code.distance_exact = rep.exact;
            return code;
        }
    }
    throw ExistenceSamplingError("random_linear_code: no generator met the distance target");
}

/// Hadamard for n <= 12, verified random-linear above.
inline CodeSpec default_code(std::size_t n, Rng& rng) {
    return n <= 12 ? hadamard_code(n) : random_linear_code(n, rng);
}

/// (1/√N) Σ_i |i⟩|E_i(x)⟩ on C^N ⊗ C^2; basis index 2i + E_i(x).
inline Ket fingerprint_state(const CodeSpec& code, const Bits& x) {
    const Bits cw = encode(code, x);
    check_entries(2 * code.N, 1, "fingerprint_state");
    Vector v = Vector::Zero(static_cast<Eigen::Index>(2 * code.N));
    const double amp = 1.0 / std::sqrt(static_cast<double>(code.N));
    for (std::size_t i = 0; i < code.N; ++i) {
        v(static_cast<Eigen::Index>(2 * i + cw[i])) = amp;
    }
    return Ket(v);
}

/// ⟨h_x|h_y⟩ = 1 − Δ(E(x), E(y))/N.
inline double fingerprint_overlap(const CodeSpec& code, const Bits& x, const Bits& y) {
    require(x.size() == code.n && y.size() == code.n, "fingerprint_overlap: length mismatch");
    const std::size_t d = hamming_distance(encode(code, x), encode(code, y));
    return 1.0 - static_cast<double>(d) / static_cast<double>(code.N);
}

/// Same quantity through the explicit states.
inline double fingerprint_overlap_by_states(const CodeSpec& code, const Bits& x, const Bits& y) {
    return fingerprint_state(code, x).inner(fingerprint_state(code, y)).real();
}

inline double swap_accept_prob(double overlap) {
    require(overlap >= -1.0 - 1e-12 && overlap <= 1.0 + 1e-12, "swap_accept_prob: overlap out of range");
    return 0.5 + 0.5 * overlap * overlap;
}

/// Acceptance of the controlled-SWAP circuit: ancilla |+⟩, controlled swap of the two
/// registers, Hadamard on the ancilla, accept on ancilla outcome 0. The joint state is
/// simulated explicitly on C^2 ⊗ C^d ⊗ C^d.
inline double swap_circuit_sim(const Ket& a, const Ket& b) {
    require(a.dim() == b.dim(), "swap_circuit_sim: dimension mismatch");
    const Eigen::Index d = a.dim();
    check_entries(2 * static_cast<std::size_t>(d), static_cast<std::size_t>(d), "swap_circuit_sim");
    const Vector ab = tensor(a.amplitudes(), b.amplitudes());
    const double s = 1.0 / std::sqrt(2.0);
    // Ancilla |+⟩: both branches carry |a⟩|b⟩ with amplitude 1/√2.
    Vector branch0 = s * ab;
    Vector branch1(d * d);
    // Controlled swap acts on the ancilla-1 branch.
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            branch1(i * d + j) = s * ab(j * d + i);
        }
    }
    // Hadamard on the ancilla; the accept amplitude is (branch0 + branch1)/√2.
    const Vector accept = s * (branch0 + branch1);
    return accept.squaredNorm();
}

}  // namespace smplocc
