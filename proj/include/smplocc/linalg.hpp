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

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "smplocc/errors.hpp"

namespace smplocc {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Identity tolerance used for Hermiticity, normalization and completeness.
inline constexpr double kIdentityTol = 1e-9;
/// Slack allowed below zero (and above one) on eigenvalues of PSD operators / effects.
inline constexpr double kPsdSlack = 1e-10;

namespace detail {
inline std::atomic<std::size_t>& entry_cap_storage() {
    static std::atomic<std::size_t> cap{std::size_t{1} << 20};
    return cap;
}
}  // namespace detail

/// Maximum number of entries a product-forming operation may allocate.
inline std::size_t entry_cap() { return detail::entry_cap_storage().load(); }
inline void set_entry_cap(std::size_t cap) { detail::entry_cap_storage().store(cap); }

inline void check_entries(std::size_t rows, std::size_t cols, const char* what) {
    if (rows != 0 && cols > entry_cap() / rows) {
        throw ResourceError(std::string(what) + ": " + std::to_string(rows) + "x" +
                            std::to_string(cols) + " exceeds entry cap " +
                            std::to_string(entry_cap()));
    }
}

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

inline bool is_hermitian(const Matrix& m, double tol = kIdentityTol) {
    if (m.rows() != m.cols()) {
        return false;
    }
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = i; j < m.cols(); ++j) {
            if (std::abs(m(i, j) - std::conj(m(j, i))) > tol) {
                return false;
            }
        }
    }
    return true;
}

inline double real_trace(const Matrix& m) { return m.trace().real(); }

/// tr(a b) without forming the product.
inline cplx trace_of_product(const Matrix& a, const Matrix& b) {
    require(a.cols() == b.rows() && a.rows() == b.cols(), "trace_of_product: shape mismatch");
    return (a.transpose().array() * b.array()).sum();
}

inline Matrix outer(const Vector& u, const Vector& v) { return u * v.adjoint(); }

inline Matrix projector(const Vector& v) { return outer(v, v); }

inline Vector basis_vector(Eigen::Index dim, Eigen::Index index) {
    Vector v = Vector::Zero(dim);
    v(index) = 1.0;
    return v;
}

/// Unit-norm pure state.
class Ket {
public:
    explicit Ket(Vector amplitudes) : amps_(std::move(amplitudes)) {
        require(amps_.size() > 0, "Ket: empty");
        require(amps_.allFinite(), "Ket: non-finite amplitude");
        require(std::abs(amps_.norm() - 1.0) <= kIdentityTol, "Ket: not normalized");
    }

    /// Rescales to unit norm; the input must be nonzero.
    static Ket normalized(const Vector& v) {
        const double n = v.norm();
        require(n > 0.0 && std::isfinite(n), "Ket::normalized: zero or non-finite vector");
        return Ket(v / n);
    }

    static Ket basis(Eigen::Index dim, Eigen::Index index) { return Ket(basis_vector(dim, index)); }

    [[nodiscard]] Eigen::Index dim() const { return amps_.size(); }
    [[nodiscard]] const Vector& amplitudes() const { return amps_; }
    [[nodiscard]] cplx operator()(Eigen::Index i) const { return amps_(i); }
    [[nodiscard]] cplx inner(const Ket& other) const { return amps_.dot(other.amps_); }
    [[nodiscard]] Matrix projector() const { return smplocc::projector(amps_); }

private:
    Vector amps_;
};

/// Trace-one positive semidefinite operator.
class DensityMatrix {
public:
    explicit DensityMatrix(Matrix m);

    static DensityMatrix from_ket(const Ket& k) { return DensityMatrix(k.projector()); }
    static DensityMatrix maximally_mixed(Eigen::Index dim) {
        return DensityMatrix(Matrix::Identity(dim, dim) / static_cast<double>(dim));
    }
    /// Rescales a nonzero PSD operator to unit trace.
    static DensityMatrix normalized(const Matrix& m) {
        const double t = real_trace(m);
        require(t > 0.0 && std::isfinite(t), "DensityMatrix::normalized: zero trace");
        return DensityMatrix(m / t);
    }

    [[nodiscard]] Eigen::Index dim() const { return m_.rows(); }
    [[nodiscard]] const Matrix& matrix() const { return m_; }
    /// tr(E rho) as a real number.
    [[nodiscard]] double expectation(const Matrix& e) const { return trace_of_product(e, m_).real(); }

private:
    Matrix m_;
};

/// Kronecker product with the left factor most significant:
/// (a ⊗ b)(i*rb + k, j*cb + l) = a(i, j) b(k, l).
inline Matrix tensor(const Matrix& a, const Matrix& b) {
    const auto rows = static_cast<std::size_t>(a.rows() * b.rows());
    const auto cols = static_cast<std::size_t>(a.cols() * b.cols());
    check_entries(rows, cols, "tensor");
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

inline Vector tensor(const Vector& a, const Vector& b) {
    check_entries(static_cast<std::size_t>(a.size()), static_cast<std::size_t>(b.size()), "tensor");
    Vector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        out.segment(i * b.size(), b.size()) = a(i) * b;
    }
    return out;
}

enum class Keep { First, Second };

struct Dims {
    Eigen::Index first;
    Eigen::Index second;
};

/// Traces out one factor of an operator on C^first ⊗ C^second.
inline Matrix partial_trace(const Matrix& m, Dims dims, Keep keep) {
    require(dims.first > 0 && dims.second > 0, "partial_trace: dims must be positive");
    require(m.rows() == m.cols() && m.rows() == dims.first * dims.second,
            "partial_trace: matrix does not match dims");
    const Eigen::Index da = dims.first;
    const Eigen::Index db = dims.second;
    if (keep == Keep::First) {
        Matrix out = Matrix::Zero(da, da);
        for (Eigen::Index i = 0; i < da; ++i) {
            for (Eigen::Index j = 0; j < da; ++j) {
                out(i, j) = m.block(i * db, j * db, db, db).trace();
            }
        }
        return out;
    }
    Matrix out = Matrix::Zero(db, db);
    for (Eigen::Index i = 0; i < da; ++i) {
        out += m.block(i * db, i * db, db, db);
    }
    return out;
}

/// Spectral decomposition of a Hermitian operator.
struct Eigensystem {
    std::vector<double> values;   // descending
    std::vector<Vector> vectors;  // orthonormal, vectors[j] belongs to values[j]

    [[nodiscard]] Matrix reconstruct() const {
        const Eigen::Index d = vectors.empty() ? 0 : vectors.front().size();
        Matrix out = Matrix::Zero(d, d);
        for (std::size_t j = 0; j < values.size(); ++j) {
            out += values[j] * projector(vectors[j]);
        }
        return out;
    }
};

namespace detail {
/// Index of the largest-magnitude component; earliest index wins near-ties.
inline Eigen::Index pivot_index(const Vector& v) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v(i));
        if (a > best_abs + 1e-12) {
            best_abs = a;
            best = i;
        }
    }
    return best;
}
}  // namespace detail

/// Eigenvalues in descending order. Eigenvalues within 1e-12 of each other are
/// ordered by ascending pivot index of their eigenvector, and every eigenvector
/// is phase-fixed so its pivot component is real and positive.
inline Eigensystem hermitian_eig(const Matrix& m) {
    require(m.rows() == m.cols(), "hermitian_eig: matrix not square");
    require(is_hermitian(m), "hermitian_eig: matrix not Hermitian");
    const Matrix sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
    require(solver.info() == Eigen::Success, "hermitian_eig: solver failed");

    const auto n = static_cast<std::size_t>(m.rows());
    struct Entry {
        double value;
        Eigen::Index pivot;
        Vector vec;
    };
    std::vector<Entry> entries;
    entries.reserve(n);
    for (Eigen::Index j = 0; j < m.rows(); ++j) {
        Vector v = solver.eigenvectors().col(j);
        const Eigen::Index p = detail::pivot_index(v);
        const cplx phase = v(p) / std::abs(v(p));
        v /= phase;
        v(p) = std::abs(v(p));
        entries.push_back({solver.eigenvalues()(j), p, std::move(v)});
    }
    std::stable_sort(entries.begin(), entries.end(),
                     [](const Entry& a, const Entry& b) { return a.value > b.value; });
    for (std::size_t start = 0; start < n;) {
        std::size_t end = start + 1;
        while (end < n && entries[start].value - entries[end].value <= 1e-12) {
            ++end;
        }
        std::stable_sort(entries.begin() + static_cast<std::ptrdiff_t>(start),
                         entries.begin() + static_cast<std::ptrdiff_t>(end),
                         [](const Entry& a, const Entry& b) { return a.pivot < b.pivot; });
        start = end;
    }
    Eigensystem out;
    for (auto& e : entries) {
        out.values.push_back(e.value);
        out.vectors.push_back(std::move(e.vec));
    }
    return out;
}

/// Projector onto the eigenvectors whose eigenvalue lies in [lo, hi] (inclusive).
inline Matrix window_projector(const Matrix& m, double lo, double hi) {
    require(lo <= hi, "window_projector: lo > hi");
    const Eigensystem es = hermitian_eig(m);
    Matrix p = Matrix::Zero(m.rows(), m.cols());
    for (std::size_t j = 0; j < es.values.size(); ++j) {
        if (es.values[j] >= lo && es.values[j] <= hi) {
            p += projector(es.vectors[j]);
        }
    }
    return p;
}

/// 0 <= m <= I up to the PSD slack.
inline bool is_effect(const Matrix& m) {
    if (m.rows() != m.cols() || !m.allFinite() || !is_hermitian(m)) {
        return false;
    }
    const Eigensystem es = hermitian_eig(m);
    return std::all_of(es.values.begin(), es.values.end(),
                       [](double v) { return v >= -kPsdSlack && v <= 1.0 + kPsdSlack; });
}

inline bool is_psd(const Matrix& m) {
    if (m.rows() != m.cols() || !is_hermitian(m)) {
        return false;
    }
    const Eigensystem es = hermitian_eig(m);
    return es.values.empty() || es.values.back() >= -kPsdSlack;
}

/// f(m) for Hermitian m through its spectral decomposition.
template <typename F>
Matrix hermitian_function(const Matrix& m, F&& f) {
    const Eigensystem es = hermitian_eig(m);
    Matrix out = Matrix::Zero(m.rows(), m.cols());
    for (std::size_t j = 0; j < es.values.size(); ++j) {
        out += f(es.values[j]) * projector(es.vectors[j]);
    }
    return out;
}

/// Principal square root of a PSD operator; tiny negative eigenvalues are clipped.
inline Matrix psd_sqrt(const Matrix& m) {
    return hermitian_function(m, [](double v) { return std::sqrt(std::max(v, 0.0)); });
}

inline bool is_projector(const Matrix& p, double tol = kIdentityTol) {
    return is_hermitian(p, tol) && ((p * p) - p).cwiseAbs().maxCoeff() <= tol;
}

inline DensityMatrix::DensityMatrix(Matrix m) : m_(std::move(m)) {
    require(m_.rows() > 0 && m_.rows() == m_.cols(), "DensityMatrix: not square");
    require(m_.allFinite(), "DensityMatrix: non-finite entry");
    require(is_hermitian(m_), "DensityMatrix: not Hermitian");
    require(std::abs(m_.trace() - cplx(1.0)) <= kIdentityTol, "DensityMatrix: trace != 1");
    require(is_psd(m_), "DensityMatrix: negative eigenvalue");
}

inline DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
    return DensityMatrix(tensor(a.matrix(), b.matrix()));
}

inline std::size_t ceil_log2(std::size_t n) {
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < n) {
        ++bits;
    }
    return bits;
}

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace smplocc
