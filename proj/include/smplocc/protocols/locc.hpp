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

// Two-referee LOCC engine. Ref_A holds Alice's message, Ref_B holds Bob's; they
// measure alternately (Ref_A first), each choosing its instrument from the full
// history of earlier outcomes.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "smplocc/errors.hpp"
#include "smplocc/linalg.hpp"
#include "smplocc/measurements.hpp"
#include "smplocc/random.hpp"
#include "smplocc/rng.hpp"

namespace smplocc {

using History = std::vector<std::uint32_t>;
using Output = std::vector<std::int64_t>;

inline std::string history_to_string(const History& h) {
    std::string s;
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (i) {
            s.push_back('.');
        }
        s += std::to_string(h[i]);
    }
    return s;
}

inline Side side_of_step(std::size_t step) { return step % 2 == 0 ? Side::A : Side::B; }

class LoccProtocol {
public:
    using Builder = std::function<Instrument(Side, const History&)>;
    using OutputRule = std::function<Output(const History&)>;

    /// Enumerates every history (all outcome indices, reachable or not) and asks the
    /// builder for the instrument of the side whose turn it is.
    static LoccProtocol build(Eigen::Index dim_a, Eigen::Index dim_b, std::size_t steps, const Builder& builder,
                              OutputRule output = {}) {
        require(dim_a > 0 && dim_b > 0, "LoccProtocol: dims must be positive");
        require(steps >= 1, "LoccProtocol: need at least one step");
        LoccProtocol p;
        p.dim_a_ = dim_a;
        p.dim_b_ = dim_b;
        p.steps_ = steps;
        p.output_ = output ? std::move(output) : default_output(steps);
        History h;
        p.fill(builder, h);
        return p;
    }

    /// Final Ref_A outcome; partial (degenerate) histories map to {-1}.
    static OutputRule default_output(std::size_t steps) {
        return [steps](const History& h) -> Output {
            if (h.size() < steps) {
                return {-1};
            }
            for (std::size_t s = h.size(); s-- > 0;) {
                if (side_of_step(s) == Side::A) {
                    return {static_cast<std::int64_t>(h[s])};
                }
            }
            return {-1};
        };
    }

    [[nodiscard]] Eigen::Index dim_a() const { return dim_a_; }
    [[nodiscard]] Eigen::Index dim_b() const { return dim_b_; }
    [[nodiscard]] std::size_t steps() const { return steps_; }
    /// Number of Ref_B measurements between Ref_A's; steps = 2r + 1 for the 2-value form.
    [[nodiscard]] std::size_t rounds() const { return steps_ / 2; }
    [[nodiscard]] bool two_value() const { return two_value_; }

    [[nodiscard]] const Instrument& instrument(const History& h) const {
        auto it = instruments_.find(h);
        if (it == instruments_.end()) {
            throw ContractViolation("LoccProtocol: no instrument for history " + history_to_string(h));
        }
        return it->second;
    }

    [[nodiscard]] Output output(const History& h) const { return output_(h); }

    [[nodiscard]] const std::map<History, Instrument>& instruments() const { return instruments_; }

private:
    void fill(const Builder& builder, History& h) {
        if (h.size() == steps_) {
            return;
        }
        const Side side = side_of_step(h.size());
        Instrument ins = builder(side, h);
        require(ins.dim() == (side == Side::A ? dim_a_ : dim_b_),
                "LoccProtocol: instrument dimension does not match its side");
        if (ins.size() != 2) {
            two_value_ = false;
        }
        const std::size_t outcomes = ins.size();
        instruments_.emplace(h, std::move(ins));
        for (std::size_t m = 0; m < outcomes; ++m) {
            h.push_back(static_cast<std::uint32_t>(m));
            fill(builder, h);
            h.pop_back();
        }
    }

    Eigen::Index dim_a_ = 0;
    Eigen::Index dim_b_ = 0;
    std::size_t steps_ = 0;
    bool two_value_ = true;
    std::map<History, Instrument> instruments_;
    OutputRule output_;
};

/// Probability of every complete history. A branch whose conditional probability is
/// at most kDegenerateProb is recorded as a truncated history and not descended.
struct TranscriptDistribution {
    std::map<History, double> probs;

    [[nodiscard]] double total() const {
        double t = 0.0;
        for (const auto& [h, p] : probs) {
            t += p;
        }
        return t;
    }

    [[nodiscard]] std::map<Output, double> outputs(const LoccProtocol& p) const {
        std::map<Output, double> out;
        for (const auto& [h, q] : probs) {
            out[p.output(h)] += q;
        }
        return out;
    }

    [[nodiscard]] double acceptance(const LoccProtocol& p) const {
        double acc = 0.0;
        for (const auto& [h, q] : probs) {
            if (p.output(h) == Output{1}) {
                acc += q;
            }
        }
        return acc;
    }
};

namespace detail {

inline void enumerate_locc(const LoccProtocol& p, const Matrix& rho_a, const Matrix& rho_b, double prob,
                           History& h, TranscriptDistribution& out) {
    if (h.size() == p.steps()) {
        out.probs[h] += prob;
        return;
    }
    const Side side = side_of_step(h.size());
    const Instrument& ins = p.instrument(h);
    const Matrix& local = side == Side::A ? rho_a : rho_b;
    for (std::size_t m = 0; m < ins.size(); ++m) {
        Matrix branch = apply_kraus(ins[m], local);
        const double q = std::max(0.0, real_trace(branch));
        h.push_back(static_cast<std::uint32_t>(m));
        if (q <= kDegenerateProb) {
            if (prob * q > 0.0) {
                out.probs[h] += prob * q;
            }
        } else {
            branch /= q;
            if (side == Side::A) {
                enumerate_locc(p, branch, rho_b, prob * q, h, out);
            } else {
                enumerate_locc(p, rho_a, branch, prob * q, h, out);
            }
        }
        h.pop_back();
    }
}

}  // namespace detail

/// Exact transcript distribution by depth-first enumeration of post-states.
inline TranscriptDistribution run_locc_exact(const LoccProtocol& p, const DensityMatrix& rho_a,
                                             const DensityMatrix& rho_b) {
    require(rho_a.dim() == p.dim_a() && rho_b.dim() == p.dim_b(), "run_locc_exact: message dimension mismatch");
    require(p.steps() <= 21, "run_locc_exact: more than 2r = 20 alternations");
    TranscriptDistribution out;
    History h;
    detail::enumerate_locc(p, rho_a.matrix(), rho_b.matrix(), 1.0, h, out);
    return out;
}

/// One sampled execution.
inline History run_locc_sampled(const LoccProtocol& p, const DensityMatrix& rho_a, const DensityMatrix& rho_b,
                                Rng& rng) {
    DensityMatrix a = rho_a;
    DensityMatrix b = rho_b;
    History h;
    while (h.size() < p.steps()) {
        const Side side = side_of_step(h.size());
        const Instrument& ins = p.instrument(h);
        DensityMatrix& local = side == Side::A ? a : b;
        std::vector<double> probs;
        for (std::size_t m = 0; m < ins.size(); ++m) {
            probs.push_back(std::max(0.0, real_trace(apply_kraus(ins[m], local.matrix()))));
        }
        const std::size_t m = sample_outcome(rng, probs);
        h.push_back(static_cast<std::uint32_t>(m));
        local = instrument_apply(ins, local, m).state();
    }
    return h;
}

/// Random 2-value protocol with `rounds` Ref_B measurements (2·rounds + 1 steps); every
/// instrument is an independent random two-outcome instrument.
inline LoccProtocol random_two_value_protocol(Eigen::Index dim_a, Eigen::Index dim_b, std::size_t rounds, Rng& rng) {
    return LoccProtocol::build(dim_a, dim_b, 2 * rounds + 1, [&](Side side, const History&) {
        return Instrument(random::instrument_kraus(side == Side::A ? dim_a : dim_b, 2, rng));
    });
}

}  // namespace smplocc
