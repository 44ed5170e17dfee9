// Copyright 2026 The premeas Authors
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
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace premeas {

using cplx = std::complex<double>;
using Index = Eigen::Index;
using Ket = Eigen::VectorXcd;
using Op = Eigen::MatrixXcd;

/// Largest composite dimension the toolkit accepts.
inline constexpr Index kMaxDim = 64;

/// Thrown when an input violates an operation's precondition. Carries the
/// numeric residual that triggered the rejection when there is one.
class Rejected : public std::invalid_argument {
   public:
    explicit Rejected(const std::string &what, double residual = 0.0)
        : std::invalid_argument(what), residual_(residual) {
    }
    double residual() const noexcept {
        return residual_;
    }

   private:
    double residual_;
};

/// Numerical tolerances. All norms are absolute: Frobenius for operators,
/// Euclidean for kets.
struct Tolerances {
    double op = 1e-10;
    double vec = 1e-10;
    double norm = 1e-12;
    double prob = 1e-9;
    /// Eigenvalues closer than this are merged into one spectral group.
    double grouping = 1e-8;
    /// Residuals between `band_lo` and `band_hi` are neither a clear pass
    /// nor a clear failure.
    double band_lo = 1e-8;
    double band_hi = 1e-4;
    /// Relative spectral cutoff for rank decisions.
    double rank = 1e-9;
    /// Schmidt coefficients closer than this are treated as degenerate.
    double schmidt_group = 1e-8;

    /// Scales the operator and vector tolerances jointly.
    Tolerances scaled(double factor) const {
        Tolerances t = *this;
        t.op *= factor;
        t.vec *= factor;
        return t;
    }
};

/// Dimensions of a two-factor space H_A (x) H_B. Composite index is
/// a * b_dim + b.
struct BipartiteDims {
    Index a = 1;
    Index b = 1;

    BipartiteDims() = default;
    BipartiteDims(Index dim_a, Index dim_b) : a(dim_a), b(dim_b) {
        if (dim_a <= 0 || dim_b <= 0) {
            throw Rejected("bipartite dimensions must be positive");
        }
        if (dim_a * dim_b > kMaxDim) {
            throw Rejected("composite dimension " + std::to_string(dim_a * dim_b) + " exceeds cap " +
                           std::to_string(kMaxDim));
        }
    }
    Index total() const {
        return a * b;
    }
    Index index(Index i, Index j) const {
        return i * b + j;
    }
    bool operator==(const BipartiteDims &) const = default;
};

enum class Subsystem { A, B };

inline Ket basis_ket(Index dim, Index i) {
    return Ket::Unit(dim, i);
}

inline Op identity(Index dim) {
    return Op::Identity(dim, dim);
}

inline Op outer(const Ket &ket) {
    return ket * ket.adjoint();
}

// ---------------------------------------------------------------------------
// Predicates.

inline double hermitian_defect(const Op &x) {
    return (x - x.adjoint()).norm();
}

inline double unitary_defect(const Op &u) {
    return (u.adjoint() * u - identity(u.rows())).norm();
}

/// max(||E^2 - E||, ||E - E^dag||).
inline double projector_defect(const Op &e) {
    return std::max((e * e - e).norm(), hermitian_defect(e));
}

inline bool is_projector(const Op &e, const Tolerances &tol = {}) {
    return e.rows() == e.cols() && projector_defect(e) <= tol.op;
}

inline bool is_unit(const Ket &ket, const Tolerances &tol = {}) {
    return std::abs(ket.norm() - 1.0) <= tol.norm;
}

/// Largest singular value.
inline double spectral_norm(const Op &x) {
    if (x.size() == 0) {
        return 0.0;
    }
    Eigen::JacobiSVD<Op> svd(x);
    return svd.singularValues()(0);
}

inline Index projector_rank(const Op &e) {
    return static_cast<Index>(std::llround(e.trace().real()));
}

// ---------------------------------------------------------------------------
// Tensor products and partial traces.

inline Ket tensor(const Ket &a, const Ket &b) {
    if (a.size() * b.size() > kMaxDim) {
        throw Rejected("tensor product dimension exceeds cap " + std::to_string(kMaxDim));
    }
    return Eigen::kroneckerProduct(a, b).eval();
}

inline Op tensor(const Op &a, const Op &b) {
    if (a.rows() * b.rows() > kMaxDim || a.cols() * b.cols() > kMaxDim) {
        throw Rejected("tensor product dimension exceeds cap " + std::to_string(kMaxDim));
    }
    return Eigen::kroneckerProduct(a, b).eval();
}

/// Traces out `over` from an operator on H_A (x) H_B.
inline Op partial_trace(const Op &x, const BipartiteDims &dims, Subsystem over) {
    if (x.rows() != dims.total() || x.cols() != dims.total()) {
        throw Rejected("partial_trace: operator dimension " + std::to_string(x.rows()) +
                       " does not match dims " + std::to_string(dims.a) + "x" + std::to_string(dims.b));
    }
    if (over == Subsystem::B) {
        Op r = Op::Zero(dims.a, dims.a);
        for (Index i = 0; i < dims.a; ++i) {
            for (Index j = 0; j < dims.a; ++j) {
                cplx s = 0;
                for (Index k = 0; k < dims.b; ++k) {
                    s += x(dims.index(i, k), dims.index(j, k));
                }
                r(i, j) = s;
            }
        }
        return r;
    }
    Op r = Op::Zero(dims.b, dims.b);
    for (Index i = 0; i < dims.b; ++i) {
        for (Index j = 0; j < dims.b; ++j) {
            cplx s = 0;
            for (Index k = 0; k < dims.a; ++k) {
                s += x(dims.index(k, i), dims.index(k, j));
            }
            r(i, j) = s;
        }
    }
    return r;
}

/// Reduced density operator of a pure composite state.
inline Op reduced_state(const Ket &ket, const BipartiteDims &dims, Subsystem over) {
    return partial_trace(outer(ket), dims, over);
}

/// Reshapes a composite ket into its dim_a x dim_b coefficient matrix.
inline Op coefficient_matrix(const Ket &ket, const BipartiteDims &dims) {
    if (ket.size() != dims.total()) {
        throw Rejected("ket dimension does not match bipartite dims");
    }
    Op m(dims.a, dims.b);
    for (Index i = 0; i < dims.a; ++i) {
        for (Index j = 0; j < dims.b; ++j) {
            m(i, j) = ket(dims.index(i, j));
        }
    }
    return m;
}

/// Partial scalar product (I_A (x) <chi|_B) |v>.
inline Ket partial_inner_b(const Ket &v, const Ket &chi, const BipartiteDims &dims) {
    return coefficient_matrix(v, dims) * chi.conjugate();
}

// ---------------------------------------------------------------------------
// Orthonormal bases.

/// Appends the normalized residuals of `candidates` (columns, index order)
/// to the orthonormal columns of `q` until `target` columns exist. A
/// candidate is taken when its residual exceeds 1/(2 sqrt(n)); that bound
/// guarantees completion whenever the candidates span the missing space.
inline Op extend_orthonormal(Op q, const Op &candidates, Index target) {
    const Index n = candidates.rows();
    if (q.cols() == 0) {
        q.resize(n, 0);
    }
    const double threshold = 0.5 / std::sqrt(static_cast<double>(n));
    for (Index j = 0; j < candidates.cols() && q.cols() < target; ++j) {
        Ket v = candidates.col(j);
        for (int pass = 0; pass < 2; ++pass) {
            v -= q * (q.adjoint() * v);
        }
        const double nv = v.norm();
        if (nv > threshold) {
            q.conservativeResize(Eigen::NoChange, q.cols() + 1);
            q.col(q.cols() - 1) = v / nv;
        }
    }
    return q;
}

/// Orthonormal basis (columns) of the range of a projector, built by
/// Gram-Schmidt over its columns in index order.
inline Op range_basis(const Op &projector) {
    return extend_orthonormal(Op(projector.rows(), 0), projector, projector_rank(projector));
}

/// Extends orthonormal columns to a full basis of C^n using the standard
/// basis in index order.
inline Op complete_basis(const Op &q, Index n) {
    return extend_orthonormal(q, identity(n), n);
}

/// Orthonormal basis of the null space of `m`. Singular values at or below
/// `cutoff * max(1, largest)` count as zero. The basis is canonicalized by
/// Gram-Schmidt of the null-space projector's columns.
inline Op null_space(const Op &m, double cutoff) {
    const Index n = m.cols();
    if (m.rows() == 0) {
        return identity(n);
    }
    Eigen::JacobiSVD<Op> svd(m, Eigen::ComputeFullV);
    const auto &s = svd.singularValues();
    const double scale = std::max(1.0, s.size() > 0 ? s(0) : 0.0);
    Index rank = 0;
    for (Index i = 0; i < s.size(); ++i) {
        if (s(i) > cutoff * scale) {
            ++rank;
        }
    }
    const Op v_null = svd.matrixV().rightCols(n - rank);
    const Op proj = v_null * v_null.adjoint();
    return extend_orthonormal(Op(n, 0), proj, n - rank);
}

// ---------------------------------------------------------------------------
// Schmidt decomposition.

struct SchmidtDecomposition {
    /// Non-negative, descending; zero coefficients are dropped.
    std::vector<double> coefficients;
    std::vector<Ket> left;
    std::vector<Ket> right;

    std::size_t size() const {
        return coefficients.size();
    }
    Ket reconstruct() const {
        if (coefficients.empty()) {
            return Ket();
        }
        Ket out = Ket::Zero(left[0].size() * right[0].size());
        for (std::size_t i = 0; i < coefficients.size(); ++i) {
            out += coefficients[i] * tensor(left[i], right[i]);
        }
        return out;
    }
};

inline SchmidtDecomposition schmidt(const Ket &ket, const BipartiteDims &dims, const Tolerances &tol = {}) {
    if (!is_unit(ket, tol)) {
        throw Rejected("schmidt: ket is not a unit vector", std::abs(ket.norm() - 1.0));
    }
    const Op m = coefficient_matrix(ket, dims);
    Eigen::JacobiSVD<Op> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    SchmidtDecomposition out;
    const auto &s = svd.singularValues();
    for (Index i = 0; i < s.size(); ++i) {
        if (s(i) <= tol.norm) {
            break;
        }
        out.coefficients.push_back(s(i));
        out.left.push_back(svd.matrixU().col(i));
        // m = U S V^dag, so |ket> = sum_i s_i u_i (x) conj(v_i).
        out.right.push_back(svd.matrixV().col(i).conjugate());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Unitary completion.

/// Throws if the kets are not orthonormal, naming the first offending index
/// or pair.
inline void require_orthonormal(std::span<const Ket> kets, const std::string &what, const Tolerances &tol) {
    for (std::size_t i = 0; i < kets.size(); ++i) {
        const double dn = std::abs(kets[i].norm() - 1.0);
        if (dn > tol.norm) {
            throw Rejected(what + ": vector " + std::to_string(i) + " is not normalized", dn);
        }
        for (std::size_t j = 0; j < i; ++j) {
            const double ov = std::abs(kets[j].dot(kets[i]));
            if (ov > tol.op) {
                throw Rejected(what + ": vectors (" + std::to_string(j) + ", " + std::to_string(i) +
                                   ") are not orthogonal",
                               ov);
            }
        }
    }
}

/// Unitary U on C^dim with U * domain[i] = image[i]. Both sets are extended
/// to full bases by Gram-Schmidt over the standard basis in index order and
/// the leftovers are paired in order, so the result is deterministic. With
/// empty lists the result is the identity.
inline Op complete_to_unitary(std::span<const Ket> domain, std::span<const Ket> image, Index dim,
                              const Tolerances &tol = {}) {
    if (domain.size() != image.size()) {
        throw Rejected("complete_to_unitary: domain and image counts differ");
    }
    for (const auto &k : domain) {
        if (k.size() != dim) {
            throw Rejected("complete_to_unitary: domain ket has wrong dimension");
        }
    }
    for (const auto &k : image) {
        if (k.size() != dim) {
            throw Rejected("complete_to_unitary: image ket has wrong dimension");
        }
    }
    require_orthonormal(domain, "complete_to_unitary domain", tol);
    require_orthonormal(image, "complete_to_unitary image", tol);

    const auto m = static_cast<Index>(domain.size());
    Op d(dim, m), r(dim, m);
    for (Index i = 0; i < m; ++i) {
        d.col(i) = domain[i];
        r.col(i) = image[i];
    }
    d = complete_basis(d, dim);
    r = complete_basis(r, dim);
    return r * d.adjoint();
}

// ---------------------------------------------------------------------------
// Certainty of an event in a pure state.

struct Certainty {
    /// Probability form: <psi|E|psi> >= 1 - prob tolerance.
    bool certain = false;
    double probability = 0.0;
    /// Invariance form residual ||E psi - psi||.
    double invariance_residual = 0.0;
    /// Whether the probability and invariance forms give the same answer.
    bool forms_agree = true;
};

inline Certainty is_certain(const Ket &ket, const Op &e, const Tolerances &tol = {}) {
    if (e.rows() != ket.size() || e.cols() != ket.size()) {
        throw Rejected("is_certain: dimension mismatch");
    }
    const double pd = projector_defect(e);
    if (pd > tol.op) {
        throw Rejected("is_certain: event is not a projector", pd);
    }
    if (!is_unit(ket, tol)) {
        throw Rejected("is_certain: state is not a unit vector", std::abs(ket.norm() - 1.0));
    }
    Certainty c;
    const Ket ek = e * ket;
    c.probability = ket.dot(ek).real();
    c.invariance_residual = (ek - ket).norm();
    c.certain = c.probability >= 1.0 - tol.prob;
    c.forms_agree = c.certain == (c.invariance_residual <= tol.vec);
    return c;
}

}  // namespace premeas
