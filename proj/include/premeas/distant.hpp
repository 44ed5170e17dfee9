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

#include "premeas/verify_general.hpp"

#include <optional>
#include <string>
#include <vector>

namespace premeas {

/// Dimensions of H_A1 (x) H_A2 (x) H_B. Composite index is
/// ((a1 * a2_dim) + a2) * b_dim + b.
struct TripartiteDims {
    Index a1 = 1;
    Index a2 = 1;
    Index b = 1;

    TripartiteDims() = default;
    TripartiteDims(Index d1, Index d2, Index db) : a1(d1), a2(d2), b(db) {
        if (d1 <= 0 || d2 <= 0 || db <= 0) {
            throw Rejected("tripartite dimensions must be positive");
        }
        if (d1 * d2 * db > kMaxDim) {
            throw Rejected("composite dimension " + std::to_string(d1 * d2 * db) + " exceeds cap " +
                           std::to_string(kMaxDim));
        }
    }
    Index total() const {
        return a1 * a2 * b;
    }
    /// A1 against the rest.
    BipartiteDims distant_split() const {
        return {a1, a2 * b};
    }
};

struct TripartiteState {
    TripartiteDims dims;
    Ket ket;
};

struct SubsystemPremeasurement {
    TripartiteState state;
    /// ||rho_A1(final) - U_A1 rho_A1(initial) U_A1^dag||
    double no_influence_residual = 0.0;
};

namespace detail {

inline void require_pair_state(const Ket &phi, const BipartiteDims &dims, const Tolerances &tol,
                               const std::string &who) {
    if (phi.size() != dims.total()) {
        throw Rejected(who + ": pair state has dimension " + std::to_string(phi.size()) + ", expected " +
                       std::to_string(dims.total()));
    }
    if (!is_unit(phi, tol)) {
        throw Rejected(who + ": pair state is not a unit vector", std::abs(phi.norm() - 1.0));
    }
}

inline void require_distant_unitary(const Op &u, Index dim, const Tolerances &tol) {
    if (u.rows() != dim || u.cols() != dim) {
        throw Rejected("distant unitary has dimension " + std::to_string(u.rows()) + ", expected " +
                       std::to_string(dim));
    }
    const double ud = unitary_defect(u);
    if (ud > tol.op) {
        throw Rejected("distant unitary is not unitary", ud);
    }
}

}  // namespace detail

/// Runs the scheme on A2 (x) B and an independent unitary on A1.
inline SubsystemPremeasurement subsystem_premeasure(const Ket &phi12, const BipartiteDims &pair,
                                                    const MeasurementScheme &s, const Op &u_a1,
                                                    const Tolerances &tol = {}) {
    detail::require_pair_state(phi12, pair, tol, "subsystem_premeasure");
    if (s.dims().a != pair.b) {
        throw Rejected("subsystem_premeasure: scheme object dimension " + std::to_string(s.dims().a) +
                       " does not match the nearby subsystem dimension " + std::to_string(pair.b));
    }
    detail::require_distant_unitary(u_a1, pair.a, tol);
    SubsystemPremeasurement r;
    r.state.dims = TripartiteDims(pair.a, pair.b, s.dims().b);
    r.state.ket = tensor(u_a1, s.interaction()) * tensor(phi12, s.ready());
    const Op after = reduced_state(r.state.ket, r.state.dims.distant_split(), Subsystem::B);
    const Op before = u_a1 * reduced_state(phi12, pair, Subsystem::B) * u_a1.adjoint();
    r.no_influence_residual = (after - before).norm();
    return r;
}

/// State of A1 given that event `e` on A2 occurred.
inline Op conditional_state(const Ket &phi12, const BipartiteDims &pair, const Op &e, const Tolerances &tol = {}) {
    detail::require_pair_state(phi12, pair, tol, "conditional_state");
    if (e.rows() != pair.b || e.cols() != pair.b) {
        throw Rejected("conditional_state: event dimension does not match the nearby subsystem");
    }
    const double pd = projector_defect(e);
    if (pd > tol.op) {
        throw Rejected("conditional_state: event is not a projector", pd);
    }
    const Ket v = tensor(identity(pair.a), e) * phi12;
    const double p = v.squaredNorm();
    if (p <= tol.prob) {
        throw Rejected("conditional_state: event has zero probability", p);
    }
    return reduced_state(v, pair, Subsystem::B) / p;
}

struct DistantOutcome {
    /// Selective state of A1 after outcome k.
    Op state;
    double probability = 0.0;
    /// Distance from U_A1 (conditional state for E^k on A2) U_A1^dag.
    double theorem_residual = 0.0;
};

/// Selective A1 state after the scheme on A2 (x) B reads pointer position k.
inline DistantOutcome distant_state_after_complete(const Ket &phi12, const BipartiteDims &pair,
                                                   const MeasurementScheme &s, const SpectralForm &o_a2,
                                                   const Op &u_a1, std::size_t k, const VerifyOptions &opts = {}) {
    const auto &tol = opts.tol;
    const SubsystemPremeasurement run = subsystem_premeasure(phi12, pair, s, u_a1, tol);
    if (k >= o_a2.size()) {
        throw Rejected("distant_state_after_complete: outcome " + std::to_string(k) + " out of range");
    }
    if (!calibration_holds(s, o_a2, opts)) {
        throw Rejected("distant_state_after_complete: calibration condition does not hold for the nearby observable");
    }
    const Op pointer_event = tensor(identity(pair.a * pair.b), s.pointer().projector(k));
    const Ket branch = pointer_event * run.state.ket;
    DistantOutcome out;
    out.probability = branch.squaredNorm();
    if (out.probability <= tol.prob) {
        throw Rejected("distant_state_after_complete: outcome has zero probability", out.probability);
    }
    out.state = reduced_state(branch, run.state.dims.distant_split(), Subsystem::B) / out.probability;
    const Op expected = u_a1 * conditional_state(phi12, pair, o_a2.projector(k), tol) * u_a1.adjoint();
    out.theorem_residual = (out.state - expected).norm();
    return out;
}

struct TwinResult {
    bool found = false;
    /// Largest violation of the twin relation or of the projector property.
    double residual = 0.0;
    /// Candidate A1 projectors, aligned with the A2 observable's indices.
    std::vector<Op> projectors;
    /// Set when every candidate projector is nonzero.
    std::optional<SpectralForm> observable;
    /// Largest distance between the A1 conditional states reached through the
    /// A2 event and through its twin.
    double consequence_residual = 0.0;
};

/// Looks for projectors on A1 that act on the pair state exactly as the
/// eigenprojectors of `o_a2` do on A2. On the support of the A1 marginal the
/// candidate is C E2^T C^+ with C the coefficient matrix; the orthocomplement
/// of the support goes to index 0.
inline TwinResult find_twin(const Ket &phi12, const BipartiteDims &pair, const SpectralForm &o_a2,
                            const Tolerances &tol = {}) {
    detail::require_pair_state(phi12, pair, tol, "find_twin");
    if (o_a2.dim() != pair.b) {
        throw Rejected("find_twin: observable dimension does not match the nearby subsystem");
    }
    const Op c = coefficient_matrix(phi12, pair);
    Eigen::JacobiSVD<Op> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto &sv = svd.singularValues();
    Index rank = 0;
    for (Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > tol.norm) {
            ++rank;
        }
    }
    const Op u = svd.matrixU();
    const Op v = svd.matrixV();
    Op pinv = Op::Zero(pair.b, pair.a);
    for (Index i = 0; i < rank; ++i) {
        pinv += v.col(i) * (1.0 / sv(i)) * u.col(i).adjoint();
    }
    const Op support = u.leftCols(rank) * u.leftCols(rank).adjoint();

    TwinResult r;
    for (std::size_t k = 0; k < o_a2.size(); ++k) {
        const Op e2t = o_a2.projector(k).transpose();
        Op x = c * e2t * pinv;
        if (k == 0) {
            x += identity(pair.a) - support;
        }
        r.residual = std::max(r.residual, (x * c - c * e2t).norm());
        r.residual = std::max(r.residual, projector_defect(x));
        r.projectors.push_back(x);
    }
    Op sum = Op::Zero(pair.a, pair.a);
    for (const auto &x : r.projectors) {
        sum += x;
    }
    r.residual = std::max(r.residual, (sum - identity(pair.a)).norm());
    r.found = r.residual <= tol.vec;
    if (!r.found) {
        return r;
    }
    bool nonzero = true;
    for (auto &x : r.projectors) {
        x = 0.5 * (x + x.adjoint());
        nonzero = nonzero && x.trace().real() >= 0.5;
    }
    if (nonzero) {
        r.observable = make_spectral_form(o_a2.eigenvalues(), r.projectors, tol);
    }
    for (std::size_t k = 0; k < o_a2.size(); ++k) {
        const Ket near = tensor(identity(pair.a), o_a2.projector(k)) * phi12;
        const double p = near.squaredNorm();
        if (p <= tol.prob) {
            continue;
        }
        const Ket far = tensor(r.projectors[k], identity(pair.b)) * phi12;
        const Op via_near = reduced_state(near, pair, Subsystem::B) / p;
        const Op via_far = reduced_state(far, pair, Subsystem::B) / far.squaredNorm();
        r.consequence_residual = std::max(r.consequence_residual, (via_near - via_far).norm());
    }
    return r;
}

// ---------------------------------------------------------------------------
// Spin-1/2 helpers. |z,+> = |0>, |z,-> = |1>, |x,+-> = (|0> +- |1>)/sqrt2.

inline Ket spin_z_plus() {
    return basis_ket(2, 0);
}
inline Ket spin_z_minus() {
    return basis_ket(2, 1);
}
inline Ket spin_x_plus() {
    return Ket::Ones(2) / std::sqrt(2.0);
}
inline Ket spin_x_minus() {
    Ket v(2);
    v << 1.0, -1.0;
    return v / std::sqrt(2.0);
}

/// (|z+>|z->  -  |z->|z+>)/sqrt2.
inline Ket singlet() {
    Ket v = Ket::Zero(4);
    v(1) = 1.0 / std::sqrt(2.0);
    v(2) = -1.0 / std::sqrt(2.0);
    return v;
}

/// Spin projection along z; index 0 is "+", index 1 is "-".
inline SpectralForm spin_z() {
    return make_spectral_form({0.5, -0.5}, {outer(spin_z_plus()), outer(spin_z_minus())});
}

inline SpectralForm spin_x() {
    return make_spectral_form({0.5, -0.5}, {outer(spin_x_plus()), outer(spin_x_minus())});
}

}  // namespace premeas
