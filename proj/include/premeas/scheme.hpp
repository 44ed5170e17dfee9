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

#include "premeas/observables.hpp"

#include <string>
#include <vector>

namespace premeas {

/// Object-instrument premeasurement: ready state and pointer observable on
/// the instrument, interaction unitary on the composite space.
class MeasurementScheme {
   public:
    MeasurementScheme(BipartiteDims dims, Ket ready, SpectralForm pointer, Op interaction, const Tolerances &tol = {})
        : dims_(dims), ready_(std::move(ready)), pointer_(std::move(pointer)), interaction_(std::move(interaction)) {
        if (ready_.size() != dims_.b) {
            throw Rejected("scheme: ready state has dimension " + std::to_string(ready_.size()) + ", expected " +
                           std::to_string(dims_.b));
        }
        if (!is_unit(ready_, tol)) {
            throw Rejected("scheme: ready state is not a unit vector", std::abs(ready_.norm() - 1.0));
        }
        if (pointer_.dim() != dims_.b) {
            throw Rejected("scheme: pointer observable has dimension " + std::to_string(pointer_.dim()) +
                           ", expected " + std::to_string(dims_.b));
        }
        if (interaction_.rows() != dims_.total() || interaction_.cols() != dims_.total()) {
            throw Rejected("scheme: interaction has dimension " + std::to_string(interaction_.rows()) +
                           ", expected " + std::to_string(dims_.total()));
        }
        const double ud = unitary_defect(interaction_);
        if (ud > tol.op) {
            throw Rejected("scheme: interaction is not unitary", ud);
        }
    }

    const BipartiteDims &dims() const {
        return dims_;
    }
    const Ket &ready() const {
        return ready_;
    }
    const SpectralForm &pointer() const {
        return pointer_;
    }
    const Op &interaction() const {
        return interaction_;
    }

   private:
    BipartiteDims dims_;
    Ket ready_;
    SpectralForm pointer_;
    Op interaction_;
};

/// Throws unless `o` lives on the object space of `s` and the pointer has a
/// position for every eigenvalue of `o`.
inline void require_compatible(const MeasurementScheme &s, const SpectralForm &o) {
    if (o.dim() != s.dims().a) {
        throw Rejected("observable has dimension " + std::to_string(o.dim()) + ", object space has " +
                       std::to_string(s.dims().a));
    }
    if (s.pointer().size() < o.size()) {
        throw Rejected("pointer has " + std::to_string(s.pointer().size()) + " positions, observable has " +
                       std::to_string(o.size()) + " eigenvalues");
    }
}

/// Observable projectors padded with zeros up to `positions` entries, so that
/// pointer positions beyond the observable's range pair with the null event.
inline std::vector<Op> padded_projectors(const SpectralForm &o, std::size_t positions) {
    std::vector<Op> out = o.projectors();
    while (out.size() < positions) {
        out.push_back(Op::Zero(o.dim(), o.dim()));
    }
    return out;
}

struct Branch {
    std::size_t k = 0;
    /// E^k phi, unnormalized.
    Ket initial_component;
    /// (I (x) F^k) Phi, unnormalized.
    Ket final_component;
    double probability = 0.0;
};

struct FinalState {
    Ket ket;
    std::vector<Branch> branches;
};

/// Phi = U (phi (x) ready), split along the pointer positions.
inline FinalState evolve(const MeasurementScheme &s, const SpectralForm &o, const Ket &phi, const Tolerances &tol = {}) {
    require_compatible(s, o);
    if (phi.size() != s.dims().a) {
        throw Rejected("evolve: input has dimension " + std::to_string(phi.size()) + ", expected " +
                       std::to_string(s.dims().a));
    }
    if (!is_unit(phi, tol)) {
        throw Rejected("evolve: input is not a unit vector", std::abs(phi.norm() - 1.0));
    }
    FinalState f;
    f.ket = s.interaction() * tensor(phi, s.ready());
    const auto es = padded_projectors(o, s.pointer().size());
    const Op id_a = identity(s.dims().a);
    for (std::size_t k = 0; k < s.pointer().size(); ++k) {
        Branch b;
        b.k = k;
        b.initial_component = es[k] * phi;
        b.final_component = tensor(id_a, s.pointer().projector(k)) * f.ket;
        b.probability = b.final_component.squaredNorm();
        f.branches.push_back(std::move(b));
    }
    return f;
}

struct ExpansionTerm {
    std::size_t k = 0;
    double probability = 0.0;
    /// Normalized final component of branch k.
    Ket ket;
};

/// Branches with vanishing weight are dropped.
inline std::vector<ExpansionTerm> complete_measurement_expansion(const FinalState &f, const Tolerances &tol = {}) {
    std::vector<ExpansionTerm> out;
    for (const auto &b : f.branches) {
        const double n = b.final_component.norm();
        if (n <= tol.norm) {
            continue;
        }
        out.push_back({b.k, n * n, b.final_component / n});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Builders.

/// One constraint of a constructive scheme: object ket (inside one eigenspace
/// of the measured observable) and the composite ket that object (x) ready
/// must go to.
struct AssignmentEntry {
    Ket object;
    Ket target;
};
using Assignment = std::vector<AssignmentEntry>;

namespace detail {

inline MeasurementScheme build_from_assignment(const SpectralForm &o, const SpectralForm &pointer, const Ket &ready,
                                               const Assignment &assignment, bool nondemolition,
                                               const Tolerances &tol) {
    const BipartiteDims dims(o.dim(), pointer.dim());
    if (pointer.size() < o.size()) {
        throw Rejected("build: pointer has " + std::to_string(pointer.size()) + " positions, observable has " +
                       std::to_string(o.size()) + " eigenvalues");
    }
    if (ready.size() != dims.b || !is_unit(ready, tol)) {
        throw Rejected("build: ready state must be a unit vector on the instrument space");
    }
    for (std::size_t k = 0; k < o.size(); ++k) {
        const Index need = o.rank(k);
        const Index room = nondemolition ? o.rank(k) * pointer.rank(k) : dims.a * pointer.rank(k);
        if (need > room) {
            throw Rejected("build: eigenspace " + std::to_string(k) + " of rank " + std::to_string(need) +
                           " cannot fit into a pointer range of dimension " + std::to_string(room));
        }
    }

    const Op id_a = identity(dims.a);
    std::vector<std::size_t> count(o.size(), 0);
    std::vector<Ket> domain;
    std::vector<Ket> image;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        const auto &entry = assignment[i];
        if (entry.object.size() != dims.a) {
            throw Rejected("build: object ket " + std::to_string(i) + " has wrong dimension");
        }
        if (entry.target.size() != dims.total()) {
            throw Rejected("build: target ket " + std::to_string(i) + " has wrong dimension");
        }
        std::size_t owner = o.size();
        for (std::size_t k = 0; k < o.size(); ++k) {
            if ((entry.object - o.projector(k) * entry.object).norm() <= tol.vec) {
                owner = k;
                break;
            }
        }
        if (owner == o.size()) {
            throw Rejected("build: object ket " + std::to_string(i) + " is not inside any eigenspace");
        }
        const Op range = nondemolition ? tensor(o.projector(owner), pointer.projector(owner))
                                       : tensor(id_a, pointer.projector(owner));
        const double outside = (entry.target - range * entry.target).norm();
        if (outside > tol.vec) {
            throw Rejected("build: target " + std::to_string(i) + " lies outside the range required for index " +
                               std::to_string(owner),
                           outside);
        }
        ++count[owner];
        domain.push_back(tensor(entry.object, ready));
        image.push_back(entry.target);
    }
    for (std::size_t k = 0; k < o.size(); ++k) {
        if (static_cast<Index>(count[k]) != o.rank(k)) {
            throw Rejected("build: eigenspace " + std::to_string(k) + " has rank " + std::to_string(o.rank(k)) +
                           " but " + std::to_string(count[k]) + " assigned kets");
        }
    }
    Op u = complete_to_unitary(domain, image, dims.total(), tol);
    return MeasurementScheme(dims, ready, pointer, std::move(u), tol);
}

}  // namespace detail

/// Interaction sending each object (x) ready to its target inside
/// range(I (x) F^k); completed to a unitary deterministically.
inline MeasurementScheme build_premeasurement(const SpectralForm &o, const SpectralForm &pointer, const Ket &ready,
                                              const Assignment &assignment, const Tolerances &tol = {}) {
    return detail::build_from_assignment(o, pointer, ready, assignment, false, tol);
}

/// As build_premeasurement with targets inside range(E^k (x) F^k).
inline MeasurementScheme build_nondemolition(const SpectralForm &o, const SpectralForm &pointer, const Ket &ready,
                                             const Assignment &assignment, const Tolerances &tol = {}) {
    return detail::build_from_assignment(o, pointer, ready, assignment, true, tol);
}

/// Orthonormal basis of the instrument states for which `interaction`
/// sends every eigenvector of `o` into the matching pointer range. May be
/// empty.
inline std::vector<Ket> ready_subspace(const Op &interaction, const SpectralForm &o, const SpectralForm &pointer,
                                       const Tolerances &tol = {}) {
    const BipartiteDims dims(o.dim(), pointer.dim());
    if (interaction.rows() != dims.total() || interaction.cols() != dims.total()) {
        throw Rejected("ready_subspace: interaction dimension does not match observable and pointer");
    }
    const double ud = unitary_defect(interaction);
    if (ud > tol.op) {
        throw Rejected("ready_subspace: interaction is not unitary", ud);
    }
    if (pointer.size() < o.size()) {
        throw Rejected("ready_subspace: pointer has fewer positions than the observable has eigenvalues");
    }
    const Op id_a = identity(dims.a);
    const Op id_b = identity(dims.b);
    const Op id = identity(dims.total());
    std::vector<Op> blocks;
    Index rows = 0;
    for (std::size_t k = 0; k < o.size(); ++k) {
        const Op q = range_basis(o.projector(k));
        const Op miss = id - tensor(id_a, pointer.projector(k));
        for (Index j = 0; j < q.cols(); ++j) {
            blocks.push_back(miss * interaction * tensor(Op(q.col(j)), id_b));
            rows += blocks.back().rows();
        }
    }
    Op stacked(rows, dims.b);
    Index r = 0;
    for (const auto &b : blocks) {
        stacked.middleRows(r, b.rows()) = b;
        r += b.rows();
    }
    const Op basis = null_space(stacked, tol.vec);
    std::vector<Ket> out;
    for (Index j = 0; j < basis.cols(); ++j) {
        out.push_back(basis.col(j));
    }
    return out;
}

// ---------------------------------------------------------------------------

/// Precomputed operators shared by the verification and classification
/// routines. Index k runs over pointer positions; positions past the
/// observable's eigenvalues pair with the zero projector.
struct SchemeAlgebra {
    BipartiteDims dims;
    std::size_t observable_size = 0;
    std::size_t positions = 0;
    Op u;
    Ket ready;
    std::vector<Op> e;
    std::vector<Op> f;
    std::vector<Op> e_lift;
    std::vector<Op> f_lift;
    /// Orthonormal basis of range(E^k), one column per eigenvector.
    std::vector<Op> domain;
    /// U (domain[k] (x) ready), column by column.
    std::vector<Op> images;
    /// Orthonormal basis of range(F^k).
    std::vector<Op> pointer_basis;
    /// I (x) |ready><ready|.
    Op ready_proj;

    SchemeAlgebra(const MeasurementScheme &s, const SpectralForm &o) : dims(s.dims()) {
        require_compatible(s, o);
        observable_size = o.size();
        positions = s.pointer().size();
        u = s.interaction();
        ready = s.ready();
        e = padded_projectors(o, positions);
        const Op id_a = identity(dims.a);
        const Op id_b = identity(dims.b);
        for (std::size_t k = 0; k < positions; ++k) {
            f.push_back(s.pointer().projector(k));
            e_lift.push_back(tensor(e[k], id_b));
            f_lift.push_back(tensor(id_a, f[k]));
            const Op q = k < observable_size ? range_basis(e[k]) : Op(dims.a, 0);
            domain.push_back(q);
            images.push_back(q.cols() > 0 ? Op(u * tensor(q, Op(ready))) : Op(dims.total(), 0));
            pointer_basis.push_back(range_basis(f[k]));
        }
        ready_proj = tensor(id_a, outer(ready));
    }

    Ket evolve(const Ket &phi) const {
        return u * tensor(phi, ready);
    }
};

}  // namespace premeas
