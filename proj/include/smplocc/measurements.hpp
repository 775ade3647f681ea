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

// POVMs, instruments, constructive bipartite measurement classes, and
// simulation of POVMs by randomized projective measurements.

#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "smplocc/errors.hpp"
#include "smplocc/linalg.hpp"
#include "smplocc/rng.hpp"

namespace smplocc {

/// Branch probabilities at or below this are treated as degenerate.
inline constexpr double kDegenerateProb = 1e-12;

class Povm {
public:
    explicit Povm(std::vector<Matrix> effects) : effects_(std::move(effects)) {
        require(!effects_.empty(), "Povm: no effects");
        const Eigen::Index d = effects_.front().rows();
        Matrix sum = Matrix::Zero(d, d);
        for (const auto& e : effects_) {
            require(e.rows() == d && e.cols() == d, "Povm: effect dimension mismatch");
            require(is_effect(e), "Povm: element is not an effect");
            sum += e;
        }
        require((sum - Matrix::Identity(d, d)).norm() <= kIdentityTol, "Povm: effects do not sum to I");
    }

    [[nodiscard]] Eigen::Index dim() const { return effects_.front().rows(); }
    [[nodiscard]] std::size_t size() const { return effects_.size(); }
    [[nodiscard]] const std::vector<Matrix>& effects() const { return effects_; }
    [[nodiscard]] const Matrix& operator[](std::size_t i) const { return effects_[i]; }

    [[nodiscard]] std::vector<double> probabilities(const DensityMatrix& rho) const {
        require(rho.dim() == dim(), "Povm::probabilities: dimension mismatch");
        std::vector<double> p;
        p.reserve(effects_.size());
        for (const auto& e : effects_) {
            p.push_back(rho.expectation(e));
        }
        return p;
    }

    [[nodiscard]] bool is_projective(double tol = kIdentityTol) const {
        for (std::size_t i = 0; i < effects_.size(); ++i) {
            if (!is_projector(effects_[i], tol)) {
                return false;
            }
            for (std::size_t j = i + 1; j < effects_.size(); ++j) {
                if ((effects_[i] * effects_[j]).cwiseAbs().maxCoeff() > tol) {
                    return false;
                }
            }
        }
        return true;
    }

private:
    std::vector<Matrix> effects_;
};

/// Measurement with post-measurement states, given by Kraus operators.
class Instrument {
public:
    explicit Instrument(std::vector<Matrix> kraus) : kraus_(std::move(kraus)) {
        require(!kraus_.empty(), "Instrument: no Kraus operators");
        const Eigen::Index d = kraus_.front().cols();
        Matrix sum = Matrix::Zero(d, d);
        for (const auto& k : kraus_) {
            require(k.rows() == d && k.cols() == d, "Instrument: Kraus dimension mismatch");
            require(k.allFinite(), "Instrument: non-finite Kraus entry");
            sum += k.adjoint() * k;
        }
        require((sum - Matrix::Identity(d, d)).norm() <= kIdentityTol, "Instrument: completeness violated");
    }

    /// Two-outcome instrument {M, complement} where the complement is sqrt(I − M†M).
    static Instrument two_value(const Matrix& success) {
        const Eigen::Index d = success.cols();
        const Matrix rest = Matrix::Identity(d, d) - success.adjoint() * success;
        return Instrument({success, psd_sqrt(0.5 * (rest + rest.adjoint()))});
    }

    /// Projective measurement {P, I − P}.
    static Instrument projective_pair(const Matrix& p) {
        const Eigen::Index d = p.rows();
        return Instrument({p, Matrix::Identity(d, d) - p});
    }

    /// Single outcome, state untouched.
    static Instrument trivial(Eigen::Index dim) { return Instrument({Matrix::Identity(dim, dim)}); }

    /// Two outcomes where outcome 0 always occurs.
    static Instrument trivial_two_value(Eigen::Index dim) {
        return Instrument({Matrix::Identity(dim, dim), Matrix::Zero(dim, dim)});
    }

    [[nodiscard]] Eigen::Index dim() const { return kraus_.front().cols(); }
    [[nodiscard]] std::size_t size() const { return kraus_.size(); }
    [[nodiscard]] const std::vector<Matrix>& kraus() const { return kraus_; }
    [[nodiscard]] const Matrix& operator[](std::size_t i) const { return kraus_[i]; }

private:
    std::vector<Matrix> kraus_;
};

struct MeasurementBranch {
    double prob = 0.0;
    /// Renormalized post-state; empty when prob <= kDegenerateProb.
    std::optional<DensityMatrix> post;

    [[nodiscard]] bool degenerate() const { return !post.has_value(); }
    [[nodiscard]] const DensityMatrix& state() const {
        if (!post) {
            throw DegenerateError("post-state requested for a degenerate branch (prob " +
                                  std::to_string(prob) + ")");
        }
        return *post;
    }
};

/// Unnormalized branch M ρ M†.
inline Matrix apply_kraus(const Matrix& k, const Matrix& rho) { return k * rho * k.adjoint(); }

inline MeasurementBranch instrument_apply(const Instrument& ins, const DensityMatrix& rho, std::size_t outcome) {
    require(ins.dim() == rho.dim(), "instrument_apply: dimension mismatch");
    require(outcome < ins.size(), "instrument_apply: outcome out of range");
    const Matrix& k = ins[outcome];
    Matrix branch = apply_kraus(k, rho.matrix());
    branch = 0.5 * (branch + branch.adjoint());
    MeasurementBranch out;
    out.prob = std::max(0.0, real_trace(branch));
    if (out.prob > kDegenerateProb) {
        out.post = DensityMatrix(branch / out.prob);
    }
    return out;
}

inline Povm povm_of_instrument(const Instrument& ins) {
    std::vector<Matrix> effects;
    for (const auto& k : ins.kraus()) {
        const Matrix e = k.adjoint() * k;
        effects.push_back(0.5 * (e + e.adjoint()));
    }
    return Povm(std::move(effects));
}

// ---------------------------------------------------------------------------
// Constructive bipartite measurement classes. Each certificate carries the data
// of an explicit decomposition; class_operator assembles the accept operator.

/// M = Σ_{(i,j)∈S} α_i ⊗ β_j with {α_i} and {β_j} local POVMs.
struct BellCert {
    std::vector<Matrix> alpha;
    std::vector<Matrix> beta;
    std::vector<std::pair<std::size_t, std::size_t>> accept_pairs;
};

/// M = Σ_i α_i ⊗ M_i with {α_i} a POVM on the first system and 0 <= M_i <= I.
struct Locc1Cert {
    std::vector<Matrix> alpha;
    std::vector<Matrix> second;
};

enum class Side { A, B };

/// M = Σ_i (√E_i ⊗ I) M_i (√E_i ⊗ I) (or with the roles of the factors swapped),
/// Σ_i E_i <= I, each M_i again LOCC. A null child stands for the identity.
struct LoccNode {
    Side side = Side::A;
    std::vector<std::pair<Matrix, std::shared_ptr<const LoccNode>>> branches;
};

struct LoccTreeCert {
    Eigen::Index dim_a = 0;
    Eigen::Index dim_b = 0;
    std::shared_ptr<const LoccNode> root;  // null: M = I
};

using MeasClassCert = std::variant<BellCert, Locc1Cert, LoccTreeCert>;

namespace detail {

inline Matrix sum_of(const std::vector<Matrix>& ms) {
    Matrix s = Matrix::Zero(ms.front().rows(), ms.front().cols());
    for (const auto& m : ms) {
        s += m;
    }
    return s;
}

inline void require_local_povm(const std::vector<Matrix>& ms, const char* what) {
    require(!ms.empty(), std::string(what) + ": empty");
    for (const auto& m : ms) {
        require(is_psd(m), std::string(what) + ": element not PSD");
    }
    const Matrix s = sum_of(ms);
    require((s - Matrix::Identity(s.rows(), s.cols())).norm() <= kIdentityTol,
            std::string(what) + ": elements do not sum to I");
}

inline Matrix tree_operator(const std::shared_ptr<const LoccNode>& node, Eigen::Index da, Eigen::Index db) {
    if (!node) {
        return Matrix::Identity(da * db, da * db);
    }
    require(!node->branches.empty(), "LoccTreeCert: node without branches");
    const Eigen::Index local = node->side == Side::A ? da : db;
    Matrix level = Matrix::Zero(local, local);
    Matrix out = Matrix::Zero(da * db, da * db);
    for (const auto& [e, child] : node->branches) {
        require(e.rows() == local && e.cols() == local, "LoccTreeCert: branch dimension mismatch");
        require(is_psd(e), "LoccTreeCert: branch operator not PSD");
        level += e;
        const Matrix root = psd_sqrt(e);
        const Matrix lift = node->side == Side::A ? tensor(root, Matrix::Identity(db, db))
                                                  : tensor(Matrix::Identity(da, da), root);
        out += lift * tree_operator(child, da, db) * lift;
    }
    require(is_effect(level), "LoccTreeCert: branch operators sum above I");
    return out;
}

}  // namespace detail

inline Matrix class_operator(const BellCert& c) {
    detail::require_local_povm(c.alpha, "BellCert alpha");
    detail::require_local_povm(c.beta, "BellCert beta");
    const Eigen::Index da = c.alpha.front().rows();
    const Eigen::Index db = c.beta.front().rows();
    Matrix m = Matrix::Zero(da * db, da * db);
    for (const auto& [i, j] : c.accept_pairs) {
        require(i < c.alpha.size() && j < c.beta.size(), "BellCert: pair index out of range");
        m += tensor(c.alpha[i], c.beta[j]);
    }
    return m;
}

inline Matrix class_operator(const Locc1Cert& c) {
    detail::require_local_povm(c.alpha, "Locc1Cert alpha");
    require(c.alpha.size() == c.second.size(), "Locc1Cert: one second-system effect per outcome");
    const Eigen::Index da = c.alpha.front().rows();
    const Eigen::Index db = c.second.front().rows();
    Matrix m = Matrix::Zero(da * db, da * db);
    for (std::size_t i = 0; i < c.alpha.size(); ++i) {
        require(is_effect(c.second[i]), "Locc1Cert: second-system operator is not an effect");
        m += tensor(c.alpha[i], c.second[i]);
    }
    return m;
}

inline Matrix class_operator(const LoccTreeCert& c) {
    require(c.dim_a > 0 && c.dim_b > 0, "LoccTreeCert: dims must be positive");
    return detail::tree_operator(c.root, c.dim_a, c.dim_b);
}

inline Matrix class_operator(const MeasClassCert& cert) {
    return std::visit([](const auto& c) { return class_operator(c); }, cert);
}

/// BELL ⊂ LOCC1 witness: α_i paired with Σ_{j:(i,j)∈S} β_j.
inline Locc1Cert to_locc1(const BellCert& c) {
    Locc1Cert out;
    out.alpha = c.alpha;
    const Eigen::Index db = c.beta.front().rows();
    out.second.assign(c.alpha.size(), Matrix::Zero(db, db));
    for (const auto& [i, j] : c.accept_pairs) {
        out.second[i] += c.beta[j];
    }
    return out;
}

/// LOCC1 ⊂ LOCC witness: measure α on the first system, then M_i on the second.
inline LoccTreeCert to_locc_tree(const Locc1Cert& c) {
    LoccTreeCert out;
    out.dim_a = c.alpha.front().rows();
    out.dim_b = c.second.front().rows();
    auto root = std::make_shared<LoccNode>();
    root->side = Side::A;
    for (std::size_t i = 0; i < c.alpha.size(); ++i) {
        auto second = std::make_shared<LoccNode>();
        second->side = Side::B;
        second->branches.emplace_back(c.second[i], nullptr);
        root->branches.emplace_back(c.alpha[i], std::move(second));
    }
    out.root = std::move(root);
    return out;
}

// ---------------------------------------------------------------------------
// Simulation of POVMs by randomized projective measurements.

/// Σ_k p_k N_k on ρ ⊗ |φ⟩⟨φ| followed by classical postprocessing.
struct PmBranch {
    double weight = 0.0;
    Povm measurement;                  // projective on C^d ⊗ C^{ancilla}
    std::vector<std::size_t> relabel;  // branch outcome -> original outcome
};

struct PmSimulation {
    Ket ancilla;
    std::size_t original_outcomes = 0;
    std::vector<PmBranch> branches;

    [[nodiscard]] Eigen::Index ancilla_dim() const { return ancilla.dim(); }
    [[nodiscard]] Eigen::Index extended_dim() const {
        return branches.front().measurement.dim();
    }
    /// Bits needed to report one branch outcome.
    [[nodiscard]] std::size_t outcome_bits() const {
        std::size_t most = 1;
        for (const auto& b : branches) {
            most = std::max(most, b.measurement.size());
        }
        return ceil_log2(most);
    }
    [[nodiscard]] std::size_t branch_bits() const { return ceil_log2(branches.size()); }

    /// ρ ⊗ |φ⟩⟨φ|.
    [[nodiscard]] DensityMatrix extend(const DensityMatrix& rho) const {
        return tensor(rho, DensityMatrix::from_ket(ancilla));
    }

    /// Outcome distribution of branch k on ρ, before relabeling.
    [[nodiscard]] std::vector<double> branch_probabilities(std::size_t k, const DensityMatrix& rho) const {
        return branches.at(k).measurement.probabilities(extend(rho));
    }

    /// Distribution over original outcomes after randomization and relabeling.
    [[nodiscard]] std::vector<double> probabilities(const DensityMatrix& rho) const {
        const DensityMatrix ext = extend(rho);
        std::vector<double> out(original_outcomes, 0.0);
        for (const auto& b : branches) {
            const auto p = b.measurement.probabilities(ext);
            for (std::size_t j = 0; j < p.size(); ++j) {
                out[b.relabel[j]] += b.weight * p[j];
            }
        }
        return out;
    }

    void validate() const {
        require(!branches.empty(), "PmSimulation: no branches");
        double total = 0.0;
        for (const auto& b : branches) {
            require(b.weight >= 0.0, "PmSimulation: negative weight");
            require(b.measurement.dim() == extended_dim(), "PmSimulation: branch dimension mismatch");
            require(b.relabel.size() == b.measurement.size(), "PmSimulation: relabel size mismatch");
            require(b.measurement.is_projective(), "PmSimulation: branch is not projective");
            for (auto r : b.relabel) {
                require(r < original_outcomes, "PmSimulation: relabel out of range");
            }
            total += b.weight;
        }
        require(std::abs(total - 1.0) <= 1e-12, "PmSimulation: weights do not sum to 1");
    }
};

namespace detail {

/// Orthonormal basis of the complement of the span of `cols` (assumed orthonormal),
/// taken from the trailing columns of a full Householder QR.
inline std::vector<Vector> orthonormal_complement(const std::vector<Vector>& cols, Eigen::Index dim) {
    Matrix a(dim, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
        a.col(static_cast<Eigen::Index>(j)) = cols[j];
    }
    Eigen::HouseholderQR<Matrix> qr(a);
    const Matrix q = qr.householderQ();
    std::vector<Vector> added;
    for (Eigen::Index c = a.cols(); c < dim; ++c) {
        added.push_back(q.col(c));
    }
    return added;
}

}  // namespace detail

/// Naimark dilation of a POVM into a single projective measurement on C^d ⊗ C^a with
/// ancilla |0…0⟩.
///
/// Each effect is split into rank-one pieces λ|e⟩⟨e| (pieces with λ < 1e-12 dropped).
/// The K pieces w_k = √λ|e⟩ define an isometry V|ψ⟩ = Σ_k ⟨w_k|ψ⟩|k⟩, which is
/// completed to a unitary U on C^{d·a} with U(|ψ⟩|0⟩) = V|ψ⟩; the ancilla dimension a is
/// the smallest power of two with d·a >= K. Outcome k < K is relabeled to the effect its
/// piece came from; the remaining basis outcomes have zero probability on the fixed
/// ancilla and are relabeled to outcome 0.
inline PmSimulation naimark_dilate(const Povm& p) {
    const Eigen::Index d = p.dim();
    std::vector<Vector> pieces;
    std::vector<std::size_t> owner;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const Eigensystem es = hermitian_eig(p[i]);
        for (std::size_t j = 0; j < es.values.size(); ++j) {
            if (es.values[j] >= 1e-12) {
                pieces.push_back(std::sqrt(es.values[j]) * es.vectors[j]);
                owner.push_back(i);
            }
        }
    }
    const std::size_t k_total = pieces.size();
    std::size_t a = 1;
    while (static_cast<std::size_t>(d) * a < k_total) {
        a *= 2;
    }
    const Eigen::Index big = d * static_cast<Eigen::Index>(a);
    check_entries(static_cast<std::size_t>(big), static_cast<std::size_t>(big), "naimark_dilate");

    // Columns of U at positions j·a (input |j⟩|0⟩) are V|j⟩ padded with zeros.
    std::vector<Vector> isometry_cols;
    for (Eigen::Index j = 0; j < d; ++j) {
        Vector col = Vector::Zero(big);
        for (std::size_t k = 0; k < k_total; ++k) {
            col(static_cast<Eigen::Index>(k)) = std::conj(pieces[k](j));
        }
        isometry_cols.push_back(col);
    }
    const std::vector<Vector> rest = detail::orthonormal_complement(isometry_cols, big);
    require(static_cast<Eigen::Index>(rest.size()) == big - d, "naimark_dilate: completion failed");
    Matrix u(big, big);
    std::size_t next_rest = 0;
    for (Eigen::Index c = 0; c < big; ++c) {
        if (c % static_cast<Eigen::Index>(a) == 0) {
            u.col(c) = isometry_cols[static_cast<std::size_t>(c / static_cast<Eigen::Index>(a))];
        } else {
            u.col(c) = rest[next_rest++];
        }
    }
    // N_k = U†|k⟩⟨k|U = |u_k⟩⟨u_k| with u_k = U†|k⟩.
    std::vector<Matrix> effects;
    std::vector<std::size_t> relabel;
    for (Eigen::Index k = 0; k < big; ++k) {
        const Vector uk = u.row(k).adjoint();
        effects.push_back(projector(uk));
        relabel.push_back(k < static_cast<Eigen::Index>(k_total) ? owner[static_cast<std::size_t>(k)] : 0);
    }
    PmSimulation sim{Ket::basis(static_cast<Eigen::Index>(a), 0), p.size(), {}};
    sim.branches.push_back(PmBranch{1.0, Povm(std::move(effects)), std::move(relabel)});
    return sim;
}

/// Randomized projective simulation of the two-outcome POVM {e, I − e} without ancilla.
///
/// With e = Σ_j λ_j|e_j⟩⟨e_j| (λ descending) and P_k = Σ_{j<=k}|e_j⟩⟨e_j|, the branch
/// {P_k, I − P_k} gets weight λ_k − λ_{k+1} (λ_{d+1} = 0) and the always-reject branch
/// {0, I} gets weight 1 − λ_1. Zero-weight branches are omitted. Outcome 0 is accept.
inline PmSimulation pm_simulate_two_outcome(const Matrix& e) {
    require(is_effect(e), "pm_simulate_two_outcome: not an effect");
    const Eigen::Index d = e.rows();
    const Eigensystem es = hermitian_eig(e);
    std::vector<double> lam;
    for (double v : es.values) {
        lam.push_back(std::clamp(v, 0.0, 1.0));
    }
    PmSimulation sim{Ket::basis(1, 0), 2, {}};
    const Matrix id = Matrix::Identity(d, d);
    Matrix p = Matrix::Zero(d, d);
    double total = 0.0;
    auto add = [&](double w, const Matrix& accept) {
        total += w;
        if (w > 0.0) {
            sim.branches.push_back(PmBranch{w, Povm({accept, id - accept}), {0, 1}});
        }
    };
    add(1.0 - lam.front(), Matrix::Zero(d, d));
    for (std::size_t k = 0; k < lam.size(); ++k) {
        p += projector(es.vectors[k]);
        const double next = k + 1 < lam.size() ? lam[k + 1] : 0.0;
        add(lam[k] - next, p);
    }
    // The telescoping weights sum to 1 in exact arithmetic; absorb rounding.
    if (!sim.branches.empty()) {
        sim.branches.back().weight += 1.0 - total;
    }
    return sim;
}

/// Index drawn from `probs` (renormalized); reproducible for a fixed generator state.
inline std::size_t sample_outcome(Rng& rng, std::span<const double> probs) {
    double total = 0.0;
    for (double p : probs) {
        require(p >= 0.0 && std::isfinite(p), "sample_outcome: negative or non-finite probability");
        total += p;
    }
    require(total > 0.0, "sample_outcome: all probabilities are zero");
    require(std::abs(total - 1.0) <= 1e-6, "sample_outcome: probabilities do not sum to 1");
    const double u = rng.uniform() * total;
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] > 0.0) {
            last_positive = i;
        }
        acc += probs[i];
        if (u < acc) {
            return i;
        }
    }
    return last_positive;
}

}  // namespace smplocc
