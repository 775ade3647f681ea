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

// Deterministic classical replacement of a quantum message.
//
// Alice knows ρ (q qubits); Bob knows 2^c effects E_b. Both walk the same sequence of
// rq-qubit states starting from I/2^{rq}. With F_b = (1/r)Σ_j E_b^{(j)} (E_b on copy j),
// b is good when |tr(F_b ρ_b) − p_b| <= δ. For a bad b Alice appends (b, p̃_b) and both
// project ρ_b onto the eigenspaces of F_b with eigenvalues in [p̃_b − δ/2, p̃_b + δ/2].
//
// F_b is never built: its eigenbasis is U^{⊗r} for E_b = U diag(λ) U†, and its
// eigenvalue at multi-index (i_1..i_r) is the mean of λ_{i_j}.
//
// Wire format (little-endian, byte aligned):
//   u8 version (=1), u8 q, u8 r, u8 c, u8 frac_bits, f64 delta, u32 pair count,
//   then per pair: index in ceil(c/8) bytes, numerator in ceil(frac_bits/8) bytes.
// p̃ = numerator / 2^frac_bits.

#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "smplocc/errors.hpp"
#include "smplocc/linalg.hpp"

namespace smplocc {

struct ReplaceParams {
    std::size_t q = 0;
    std::size_t r = 0;
    std::size_t c = 0;
    double delta = 0.0;
    std::size_t frac_bits = 0;

    [[nodiscard]] std::size_t total_qubits() const { return q * r; }
    [[nodiscard]] Eigen::Index copy_dim() const { return Eigen::Index{1} << q; }
    [[nodiscard]] Eigen::Index total_dim() const { return Eigen::Index{1} << (q * r); }
    [[nodiscard]] double eta() const { return 1.0 - delta / 4.0; }
    /// t <= (rq + 1) / log2(1/η).
    [[nodiscard]] double t_bound() const {
        return static_cast<double>(total_qubits() + 1) / std::log2(1.0 / eta());
    }
    /// C in r = (C/δ²) ln(q/δ).
    [[nodiscard]] double implied_constant() const {
        return static_cast<double>(r) * delta * delta / std::log(static_cast<double>(q) / delta);
    }
};

/// ceil(log2(1/δ)) + 7 fraction bits, so |p̃ − p| <= 2^{−bits} <= δ/128.
inline std::size_t replace_fraction_bits(double delta) {
    require(delta > 0.0 && delta < 1.0, "replace: delta must lie in (0, 1)");
    return static_cast<std::size_t>(std::ceil(std::log2(1.0 / delta))) + 7;
}

/// floor(p · 2^bits), clamped to [0, 2^bits − 1].
inline std::uint64_t truncate_probability(double p, std::size_t bits) {
    const double scale = std::ldexp(1.0, static_cast<int>(bits));
    const double x = std::floor(std::clamp(p, 0.0, 1.0) * scale);
    const auto top = (std::uint64_t{1} << bits) - 1;
    return std::min(static_cast<std::uint64_t>(x), top);
}

struct ReplacePair {
    std::uint32_t index = 0;
    std::uint64_t numerator = 0;
    bool operator==(const ReplacePair&) const = default;
};

struct ReplaceMessage {
    ReplaceParams params;
    std::vector<ReplacePair> pairs;

    [[nodiscard]] std::size_t t() const { return pairs.size(); }
    [[nodiscard]] double p_tilde(const ReplacePair& pr) const {
        return std::ldexp(static_cast<double>(pr.numerator), -static_cast<int>(params.frac_bits));
    }
    /// Payload size counted as t(c + frac_bits).
    [[nodiscard]] std::size_t payload_bits() const { return t() * (params.c + params.frac_bits); }
};

// ---------------------------------------------------------------------------
// Serialization.

namespace detail {

inline void put_le(std::vector<std::uint8_t>& out, std::uint64_t v, std::size_t bytes) {
    for (std::size_t i = 0; i < bytes; ++i) {
        out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
    }
}

inline std::uint64_t get_le(const std::vector<std::uint8_t>& in, std::size_t& pos, std::size_t bytes) {
    if (pos + bytes > in.size()) {
        throw IntegrityError("ReplaceMessage: truncated input");
    }
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < bytes; ++i) {
        v |= static_cast<std::uint64_t>(in[pos + i]) << (8 * i);
    }
    pos += bytes;
    return v;
}

inline std::size_t byte_width(std::size_t bits) { return (bits + 7) / 8; }

}  // namespace detail

inline std::vector<std::uint8_t> serialize(const ReplaceMessage& msg) {
    const auto& p = msg.params;
    require(p.q < 256 && p.r < 256 && p.c < 33 && p.frac_bits < 64, "serialize: parameters out of range");
    std::vector<std::uint8_t> out;
    out.push_back(1);
    out.push_back(static_cast<std::uint8_t>(p.q));
    out.push_back(static_cast<std::uint8_t>(p.r));
    out.push_back(static_cast<std::uint8_t>(p.c));
    out.push_back(static_cast<std::uint8_t>(p.frac_bits));
    detail::put_le(out, std::bit_cast<std::uint64_t>(p.delta), 8);
    detail::put_le(out, msg.pairs.size(), 4);
    for (const auto& pr : msg.pairs) {
        detail::put_le(out, pr.index, detail::byte_width(p.c));
        detail::put_le(out, pr.numerator, detail::byte_width(p.frac_bits));
    }
    return out;
}

inline ReplaceMessage deserialize_replace_message(const std::vector<std::uint8_t>& in) {
    std::size_t pos = 0;
    if (detail::get_le(in, pos, 1) != 1) {
        throw IntegrityError("ReplaceMessage: unknown version");
    }
    ReplaceMessage msg;
    auto& p = msg.params;
    p.q = detail::get_le(in, pos, 1);
    p.r = detail::get_le(in, pos, 1);
    p.c = detail::get_le(in, pos, 1);
    p.frac_bits = detail::get_le(in, pos, 1);
    p.delta = std::bit_cast<double>(detail::get_le(in, pos, 8));
    const std::uint64_t count = detail::get_le(in, pos, 4);
    if (p.c > 32 || p.frac_bits >= 64 || !(p.delta > 0.0 && p.delta < 1.0)) {
        throw IntegrityError("ReplaceMessage: header out of range");
    }
    for (std::uint64_t i = 0; i < count; ++i) {
        ReplacePair pr;
        pr.index = static_cast<std::uint32_t>(detail::get_le(in, pos, detail::byte_width(p.c)));
        pr.numerator = detail::get_le(in, pos, detail::byte_width(p.frac_bits));
        if ((p.c < 32 && pr.index >> p.c) || pr.numerator >> p.frac_bits) {
            throw IntegrityError("ReplaceMessage: pair out of range");
        }
        msg.pairs.push_back(pr);
    }
    if (pos != in.size()) {
        throw IntegrityError("ReplaceMessage: trailing bytes");
    }
    return msg;
}

// ---------------------------------------------------------------------------
// The state sequence.

using RowMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Applies u (d×d) to every tensor factor of the rows of m, in place: m ← u^{⊗r} m.
/// Row-major storage keeps each row slab contiguous.
inline void apply_to_each_factor(RowMatrix& m, const Matrix& u, std::size_t copies) {
    const Eigen::Index d = u.rows();
    const Eigen::Index total = m.rows();
    std::vector<RowMatrix> parts(static_cast<std::size_t>(d));
    for (std::size_t j = 0; j < copies; ++j) {
        Eigen::Index stride = 1;
        for (std::size_t k = j + 1; k < copies; ++k) {
            stride *= d;
        }
        // Row index = (outer, digit of factor j, inner); digit k owns the row slab
        // [base + k·stride, base + (k + 1)·stride).
        for (Eigen::Index base = 0; base < total; base += stride * d) {
            for (Eigen::Index k = 0; k < d; ++k) {
                parts[static_cast<std::size_t>(k)] = m.middleRows(base + k * stride, stride);
            }
            for (Eigen::Index k = 0; k < d; ++k) {
                auto slab = m.middleRows(base + k * stride, stride);
                slab = u(k, 0) * parts[0];
                for (Eigen::Index l = 1; l < d; ++l) {
                    slab += u(k, l) * parts[static_cast<std::size_t>(l)];
                }
            }
        }
    }
}

/// The walk ρ_1 = I/2^{rq}, ρ_{b+1} = ρ_b or its renormalized window projection.
class ReplaceSequence {
public:
    ReplaceSequence(const std::vector<Matrix>& effects, const ReplaceParams& params) : params_(params) {
        require(params.q >= 1 && params.r >= 1, "ReplaceSequence: q and r must be positive");
        require(params.total_qubits() <= 10, "ReplaceSequence: rq must be at most 10");
        require(effects.size() == (std::size_t{1} << params.c), "ReplaceSequence: need exactly 2^c effects");
        const Eigen::Index d = params.copy_dim();
        check_entries(static_cast<std::size_t>(params.total_dim()), static_cast<std::size_t>(params.total_dim()),
                      "ReplaceSequence");
        for (const auto& e : effects) {
            require(e.rows() == d && is_effect(e), "ReplaceSequence: invalid effect");
            eig_.push_back(hermitian_eig(e));
        }
        effects_ = effects;
        const Eigen::Index n = params.total_dim();
        rho_ = Matrix::Identity(n, n) / static_cast<double>(n);
    }

    [[nodiscard]] const Matrix& state() const { return rho_; }

    /// tr(F_b ρ_b) = (1/r) Σ_j tr(E_b ρ^{(j)}) with ρ^{(j)} the reduced state of copy j.
    [[nodiscard]] double expectation(std::size_t b) const {
        const Eigen::Index d = params_.copy_dim();
        const Eigen::Index n = params_.total_dim();
        double acc = 0.0;
        for (std::size_t j = 0; j < params_.r; ++j) {
            Eigen::Index stride = 1;
            for (std::size_t k = j + 1; k < params_.r; ++k) {
                stride *= d;
            }
            Matrix reduced = Matrix::Zero(d, d);
            for (Eigen::Index base = 0; base < n; base += stride * d) {
                for (Eigen::Index inner = 0; inner < stride; ++inner) {
                    for (Eigen::Index k = 0; k < d; ++k) {
                        for (Eigen::Index l = 0; l < d; ++l) {
                            reduced(k, l) += rho_(base + inner + k * stride, base + inner + l * stride);
                        }
                    }
                }
            }
            acc += trace_of_product(effects_[b], reduced).real();
        }
        return acc / static_cast<double>(params_.r);
    }

    /// Eigenvalue of F_b at multi-index i.
    [[nodiscard]] double f_eigenvalue(std::size_t b, Eigen::Index i) const {
        const Eigen::Index d = params_.copy_dim();
        double s = 0.0;
        for (std::size_t j = 0; j < params_.r; ++j) {
            s += eig_[b].values[static_cast<std::size_t>(i % d)];
            i /= d;
        }
        return s / static_cast<double>(params_.r);
    }

    /// Projects onto the window [p̃ − δ/2, p̃ + δ/2] (closed) and renormalizes. Returns the
    /// success probability tr(M_b ρ_b); throws DegenerateError below 1e-12.
    double project(std::size_t b, double p_tilde) {
        const double lo = p_tilde - params_.delta / 2.0 - 1e-12;
        const double hi = p_tilde + params_.delta / 2.0 + 1e-12;
        const Eigen::Index n = params_.total_dim();
        Matrix u(params_.copy_dim(), params_.copy_dim());
        for (std::size_t k = 0; k < eig_[b].vectors.size(); ++k) {
            u.col(static_cast<Eigen::Index>(k)) = eig_[b].vectors[k];
        }
        const Matrix ud = u.adjoint();
        // ρ̃ = V† ρ V with V = U^{⊗r}; ρ is Hermitian so V†(V†ρ)† = V†ρV.
        RowMatrix x = rho_;
        apply_to_each_factor(x, ud, params_.r);
        RowMatrix y = x.adjoint();
        apply_to_each_factor(y, ud, params_.r);
        std::vector<bool> keep(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) {
            const double f = f_eigenvalue(b, i);
            keep[static_cast<std::size_t>(i)] = f >= lo && f <= hi;
        }
        double kept = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index k = 0; k < n; ++k) {
                if (!keep[static_cast<std::size_t>(i)] || !keep[static_cast<std::size_t>(k)]) {
                    y(i, k) = 0.0;
                }
            }
            kept += y(i, i).real();
        }
        if (kept < 1e-12) {
            throw DegenerateError("replace: window projection of effect " + std::to_string(b) +
                                  " has success probability " + std::to_string(kept) + " (p~ = " +
                                  std::to_string(p_tilde) + ")");
        }
        apply_to_each_factor(y, u, params_.r);
        RowMatrix z = y.adjoint();
        apply_to_each_factor(z, u, params_.r);
        rho_ = (z + z.adjoint()) / (2.0 * kept);
        return kept;
    }

private:
    ReplaceParams params_;
    std::vector<Matrix> effects_;
    std::vector<Eigensystem> eig_;
    Matrix rho_;
};

/// Called with (b, ρ_b) before b is processed.
using SequenceObserver = std::function<void(std::size_t, const Matrix&)>;

inline ReplaceParams make_replace_params(std::size_t q, std::size_t r, std::size_t effects, double delta) {
    require(effects >= 1 && is_power_of_two(effects), "replace: effect count must be a power of two");
    return ReplaceParams{q, r, ceil_log2(effects), delta, replace_fraction_bits(delta)};
}

/// Alice's side: walks the sequence and records the bad indices.
inline ReplaceMessage replace_message(const DensityMatrix& rho, const std::vector<Matrix>& effects, double delta,
                                      std::size_t r, const SequenceObserver& observer = {}) {
    require(rho.dim() >= 2 && is_power_of_two(static_cast<std::size_t>(rho.dim())),
            "replace_message: state must live on qubits");
    const ReplaceParams params =
        make_replace_params(ceil_log2(static_cast<std::size_t>(rho.dim())), r, effects.size(), delta);
    ReplaceSequence seq(effects, params);
    ReplaceMessage msg{params, {}};
    for (std::size_t b = 0; b < effects.size(); ++b) {
        if (observer) {
            observer(b, seq.state());
        }
        const double p = rho.expectation(effects[b]);
        if (std::abs(seq.expectation(b) - p) <= delta) {
            continue;
        }
        const ReplacePair pr{static_cast<std::uint32_t>(b), truncate_probability(p, params.frac_bits)};
        msg.pairs.push_back(pr);
        seq.project(b, msg.p_tilde(pr));
    }
    return msg;
}

/// Bob's side: replays the sequence from the message alone; good b get tr(F_b ρ_b),
/// bad b get p̃_b.
inline std::vector<double> reconstruct_estimates(const ReplaceMessage& msg, const std::vector<Matrix>& effects,
                                                 const SequenceObserver& observer = {}) {
    ReplaceSequence seq(effects, msg.params);
    std::vector<double> est(effects.size());
    std::size_t next = 0;
    for (std::size_t b = 0; b < effects.size(); ++b) {
        if (observer) {
            observer(b, seq.state());
        }
        if (next < msg.pairs.size() && msg.pairs[next].index == b) {
            est[b] = msg.p_tilde(msg.pairs[next]);
            try {
                seq.project(b, est[b]);
            } catch (const DegenerateError& e) {
                throw IntegrityError(std::string("reconstruct_estimates: replay diverged: ") + e.what());
            }
            ++next;
        } else {
            est[b] = seq.expectation(b);
        }
    }
    if (next != msg.pairs.size()) {
        throw IntegrityError("reconstruct_estimates: message pairs out of order or out of range");
    }
    return est;
}

struct RoundTripReport {
    ReplaceMessage message;
    std::vector<double> estimates;
    double max_state_deviation = 0.0;  // max entrywise |ρ_b(Alice) − ρ_b(Bob)| over b
};

/// Alice's walk and Bob's replay advanced in lockstep. Bob reads only the pairs Alice
/// has emitted so far, which suffices since step b uses only pairs with index b.
inline RoundTripReport replace_round_trip(const DensityMatrix& rho, const std::vector<Matrix>& effects, double delta,
                                          std::size_t r) {
    const ReplaceParams params =
        make_replace_params(ceil_log2(static_cast<std::size_t>(rho.dim())), r, effects.size(), delta);
    ReplaceSequence alice(effects, params);
    ReplaceSequence bob(effects, params);
    RoundTripReport rep{ReplaceMessage{params, {}}, std::vector<double>(effects.size()), 0.0};
    for (std::size_t b = 0; b < effects.size(); ++b) {
        rep.max_state_deviation =
            std::max(rep.max_state_deviation, (alice.state() - bob.state()).cwiseAbs().maxCoeff());
        const double p = rho.expectation(effects[b]);
        if (std::abs(alice.expectation(b) - p) > delta) {
            const ReplacePair pr{static_cast<std::uint32_t>(b), truncate_probability(p, params.frac_bits)};
            rep.message.pairs.push_back(pr);
            alice.project(b, rep.message.p_tilde(pr));
        }
        const auto& pairs = rep.message.pairs;
        if (!pairs.empty() && pairs.back().index == b) {
            rep.estimates[b] = rep.message.p_tilde(pairs.back());
            try {
                bob.project(b, rep.estimates[b]);
            } catch (const DegenerateError& e) {
                throw IntegrityError(std::string("replace_round_trip: replay diverged: ") + e.what());
            }
        } else {
            rep.estimates[b] = bob.expectation(b);
        }
    }
    rep.max_state_deviation = std::max(rep.max_state_deviation, (alice.state() - bob.state()).cwiseAbs().maxCoeff());
    return rep;
}

}  // namespace smplocc
