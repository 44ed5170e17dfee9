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

#include "premeas/verify_nd.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace premeas {

enum class MClass { M11a, M11b, M12, M21, M22 };

inline const char *to_string(MClass c) {
    switch (c) {
        case MClass::M11a:
            return "M11a";
        case MClass::M11b:
            return "M11b";
        case MClass::M12:
            return "M12";
        case MClass::M21:
            return "M21";
        case MClass::M22:
            return "M22";
    }
    return "?";
}

inline std::optional<MClass> parse_mclass(const std::string &s) {
    for (auto c : {MClass::M11a, MClass::M11b, MClass::M12, MClass::M21, MClass::M22}) {
        if (s == to_string(c)) {
            return c;
        }
    }
    return std::nullopt;
}

namespace detail {

/// Per-index view of the final state restricted to eigenvectors of E^k.
struct BranchAnalysis {
    /// Rank of the instrument marginal of the branch operator.
    Index rank = 0;
    /// Dominant instrument vector of the branch, phase-fixed so that its
    /// largest component is real and positive.
    Ket pointer_vector;
    /// Largest ||(I - E^k (x) I) w|| over the branch images.
    double demolition = 0.0;
};

inline Ket fix_phase(Ket v) {
    Index best = 0;
    for (Index i = 1; i < v.size(); ++i) {
        if (std::abs(v(i)) > std::abs(v(best)) + 1e-12) {
            best = i;
        }
    }
    if (std::abs(v(best)) > 0.0) {
        v *= std::conj(v(best)) / std::abs(v(best));
    }
    return v;
}

inline std::vector<BranchAnalysis> analyze_branches(const SchemeAlgebra &alg, const Tolerances &tol) {
    std::vector<BranchAnalysis> out;
    const Op id = identity(alg.dims.total());
    for (std::size_t k = 0; k < alg.observable_size; ++k) {
        BranchAnalysis b;
        Op rho_b = Op::Zero(alg.dims.b, alg.dims.b);
        for (Index q = 0; q < alg.images[k].cols(); ++q) {
            const Ket v = alg.f_lift[k] * alg.images[k].col(q);
            rho_b += reduced_state(v, alg.dims, Subsystem::A);
            b.demolition = std::max(b.demolition, ((id - alg.e_lift[k]) * alg.images[k].col(q)).norm());
        }
        Eigen::SelfAdjointEigenSolver<Op> es(0.5 * (rho_b + rho_b.adjoint()));
        const auto &w = es.eigenvalues();
        const double top = w(w.size() - 1);
        if (top > tol.norm) {
            for (Index i = 0; i < w.size(); ++i) {
                if (w(i) > tol.rank * top) {
                    ++b.rank;
                }
            }
        }
        b.pointer_vector = fix_phase(es.eigenvectors().col(w.size() - 1));
        out.push_back(std::move(b));
    }
    return out;
}

/// sum_q (I (x) <pointer|) F^k w_q <q|.
inline Op transformer(const SchemeAlgebra &alg, std::size_t k, const Ket &pointer) {
    Op m = Op::Zero(alg.dims.a, alg.dims.a);
    for (Index q = 0; q < alg.images[k].cols(); ++q) {
        const Ket v = alg.f_lift[k] * alg.images[k].col(q);
        m += partial_inner_b(v, pointer, alg.dims) * alg.domain[k].col(q).adjoint();
    }
    return m;
}

/// min over theta of ||m - e^{i theta} e||. A phase on the transformer can
/// be moved onto the pointer vector without changing the final state.
inline double distance_up_to_phase(const Op &m, const Op &e) {
    const cplx t = (e.adjoint() * m).trace();
    const cplx phase = std::abs(t) > 0.0 ? t / std::abs(t) : cplx(1.0);
    return (m - phase * e).norm();
}

}  // namespace detail

struct DisentanglementReport {
    bool disentangled = false;
    bool cc_established = false;
    std::vector<Index> ranks;
    std::vector<Ket> pointer_vectors;
    /// First index whose branch marginal has rank above one.
    std::optional<Witness> witness;
};

inline DisentanglementReport is_disentangled(const MeasurementScheme &s, const SpectralForm &o,
                                             const VerifyOptions &opts = {}) {
    const SchemeAlgebra alg(s, o);
    DisentanglementReport r;
    r.cc_established = detail::general_cc_inv(alg, opts).pass();
    r.disentangled = true;
    const auto branches = detail::analyze_branches(alg, opts.tol);
    for (std::size_t k = 0; k < branches.size(); ++k) {
        r.ranks.push_back(branches[k].rank);
        r.pointer_vectors.push_back(branches[k].pointer_vector);
        if (branches[k].rank > 1 && r.disentangled) {
            r.disentangled = false;
            r.witness = Witness{k, "instrument marginal of rank " + std::to_string(branches[k].rank)};
        }
    }
    return r;
}

struct StateTransformerSet {
    std::vector<Op> transformers;
    std::vector<Ket> pointer_vectors;
    /// ||sum_k M_k^dag M_k - I||
    double completeness_residual = 0.0;
    /// max_k ||M_k (I - E^k)||
    double support_residual = 0.0;
    /// max_k ||M_k^dag M_k - E^k||
    double isometry_residual = 0.0;
    /// max over probes of ||U(phi (x) ready) - sum_k M_k phi (x) pointer_k||
    double reconstruction_residual = 0.0;
    /// max_{k != k'} ||M_k^dag M_k'||: the images of distinct transformers
    /// are mutually orthogonal when this vanishes.
    double overlap_residual = 0.0;
    bool orthogonal_family = false;
};

inline StateTransformerSet extract_state_transformers(const MeasurementScheme &s, const SpectralForm &o,
                                                      const VerifyOptions &opts = {}) {
    const SchemeAlgebra alg(s, o);
    const auto branches = detail::analyze_branches(alg, opts.tol);
    for (std::size_t k = 0; k < branches.size(); ++k) {
        if (branches[k].rank > 1) {
            throw Rejected("extract_state_transformers: scheme is entangled at index " + std::to_string(k) +
                           " (instrument marginal of rank " + std::to_string(branches[k].rank) + ")");
        }
    }
    StateTransformerSet t;
    const Index da = alg.dims.a;
    Op sum = Op::Zero(da, da);
    for (std::size_t k = 0; k < branches.size(); ++k) {
        Op m = detail::transformer(alg, k, branches[k].pointer_vector);
        sum += m.adjoint() * m;
        t.support_residual = std::max(t.support_residual, (m * (identity(da) - alg.e[k])).norm());
        t.isometry_residual = std::max(t.isometry_residual, (m.adjoint() * m - alg.e[k]).norm());
        t.transformers.push_back(std::move(m));
        t.pointer_vectors.push_back(branches[k].pointer_vector);
    }
    t.completeness_residual = (sum - identity(da)).norm();
    for (std::size_t k = 0; k < t.transformers.size(); ++k) {
        for (std::size_t j = 0; j < t.transformers.size(); ++j) {
            if (j != k) {
                t.overlap_residual =
                    std::max(t.overlap_residual, (t.transformers[k].adjoint() * t.transformers[j]).norm());
            }
        }
    }
    t.orthogonal_family = t.overlap_residual <= opts.tol.op;
    for (const auto &phi : detail::probe_inputs(da, opts, 32)) {
        Ket rebuilt = Ket::Zero(alg.dims.total());
        for (std::size_t k = 0; k < t.transformers.size(); ++k) {
            rebuilt += tensor(Ket(t.transformers[k] * phi), t.pointer_vectors[k]);
        }
        t.reconstruction_residual = std::max(t.reconstruction_residual, (alg.evolve(phi) - rebuilt).norm());
    }
    return t;
}

/// Transformers keep the object inside the eigenspace they act on.
inline bool is_nondemolition_kraus(const StateTransformerSet &t, const SpectralForm &o, const Tolerances &tol = {}) {
    if (t.transformers.size() != o.size()) {
        throw Rejected("is_nondemolition_kraus: transformer count does not match the observable");
    }
    double worst = 0.0;
    for (std::size_t k = 0; k < o.size(); ++k) {
        worst = std::max(worst, (t.transformers[k] - o.projector(k) * t.transformers[k]).norm());
    }
    return worst <= tol.op;
}

// ---------------------------------------------------------------------------
// Ideal measurement.

/// sum_k E^k |phi><phi| E^k
inline Op luders_channel(const Ket &phi, const SpectralForm &o, const Tolerances &tol = {}) {
    if (phi.size() != o.dim() || !is_unit(phi, tol)) {
        throw Rejected("luders_channel: input must be a unit vector on the observable's space");
    }
    Op rho = Op::Zero(o.dim(), o.dim());
    for (const auto &e : o.projectors()) {
        const Ket v = e * phi;
        rho += v * v.adjoint();
    }
    return rho;
}

struct SelectiveState {
    std::size_t k = 0;
    double weight = 0.0;
    Ket state;
};

/// Normalized E^k phi with weights <phi|E^k|phi>; zero-weight outcomes are
/// omitted.
inline std::vector<SelectiveState> selective_states(const Ket &phi, const SpectralForm &o, const Tolerances &tol = {}) {
    if (phi.size() != o.dim() || !is_unit(phi, tol)) {
        throw Rejected("selective_states: input must be a unit vector on the observable's space");
    }
    std::vector<SelectiveState> out;
    for (std::size_t k = 0; k < o.size(); ++k) {
        const Ket v = o.projector(k) * phi;
        const double n = v.norm();
        if (n <= tol.norm) {
            continue;
        }
        out.push_back({k, n * n, v / n});
    }
    return out;
}

/// Sends |k,q> (x) ready to |k,q> (x) the first basis vector of range(F^k).
inline MeasurementScheme build_ideal(const SpectralForm &o, const SpectralForm &pointer, const Ket &ready,
                                     const Tolerances &tol = {}) {
    if (pointer.size() < o.size()) {
        throw Rejected("build_ideal: pointer has " + std::to_string(pointer.size()) + " positions, observable has " +
                       std::to_string(o.size()) + " eigenvalues");
    }
    Assignment a;
    for (std::size_t k = 0; k < o.size(); ++k) {
        const Op q = range_basis(o.projector(k));
        const Ket chi = range_basis(pointer.projector(k)).col(0);
        for (Index j = 0; j < q.cols(); ++j) {
            const Ket obj = q.col(j);
            a.push_back({obj, tensor(obj, chi)});
        }
    }
    return build_nondemolition(o, pointer, ready, a, tol);
}

struct IdealReport {
    bool cc_established = false;
    /// Disentangled with every transformer equal to its eigenprojector.
    bool canonical_form = false;
    double canonical_residual = 0.0;
    /// Object final state equals the Luders output for every input.
    bool luders_form = false;
    double luders_residual = 0.0;
    /// Every sharp input leaves the object state unchanged.
    bool sharp_form = false;
    double sharp_residual = 0.0;

    bool ideal() const {
        return canonical_form;
    }
    bool definitions_agree() const {
        return canonical_form == luders_form && luders_form == sharp_form;
    }
};

inline IdealReport is_ideal(const MeasurementScheme &s, const SpectralForm &o, const VerifyOptions &opts = {}) {
    const SchemeAlgebra alg(s, o);
    const auto &tol = opts.tol;
    IdealReport r;
    r.cc_established = detail::general_cc_inv(alg, opts).pass();
    const Index da = alg.dims.a;

    const auto branches = detail::analyze_branches(alg, tol);
    bool entangled = false;
    for (const auto &b : branches) {
        entangled = entangled || b.rank > 1;
    }
    if (entangled) {
        r.canonical_residual = std::numeric_limits<double>::infinity();
    } else {
        for (std::size_t k = 0; k < branches.size(); ++k) {
            const Op m = detail::transformer(alg, k, branches[k].pointer_vector);
            r.canonical_residual = std::max(r.canonical_residual, detail::distance_up_to_phase(m, alg.e[k]));
        }
    }
    r.canonical_form = r.canonical_residual <= tol.op;

    for (const auto &phi : polarization_probes(da)) {
        const Op rho = reduced_state(alg.evolve(phi), alg.dims, Subsystem::B);
        r.luders_residual = std::max(r.luders_residual, (rho - luders_channel(phi, o, tol)).norm());
    }
    r.luders_form = r.luders_residual <= tol.op;

    for (std::size_t k = 0; k < alg.observable_size; ++k) {
        const Op &q = alg.domain[k];
        for (const auto &c : polarization_probes(q.cols())) {
            const Ket phi = q * c;
            const Op rho = reduced_state(alg.evolve(phi), alg.dims, Subsystem::B);
            r.sharp_residual = std::max(r.sharp_residual, (rho - outer(phi)).norm());
        }
    }
    r.sharp_form = r.sharp_residual <= tol.op;
    return r;
}

// ---------------------------------------------------------------------------
// Classification.

struct BranchClass {
    std::size_t k = 0;
    bool nondemolition = false;
    bool disentangled = false;
    bool ideal = false;
    MClass kind = MClass::M22;
};

struct Classification {
    MClass kind = MClass::M22;
    bool cc_established = false;
    std::vector<BranchClass> branches;
};

inline MClass kind_of(bool nondemolition, bool disentangled, bool ideal) {
    if (nondemolition) {
        if (!disentangled) {
            return MClass::M12;
        }
        return ideal ? MClass::M11a : MClass::M11b;
    }
    return disentangled ? MClass::M21 : MClass::M22;
}

/// Each branch is classified on its own; the scheme takes the branch class
/// farthest along the reading order M11a, M11b, M12, M21, M22.
inline Classification classify(const MeasurementScheme &s, const SpectralForm &o, const VerifyOptions &opts = {}) {
    const SchemeAlgebra alg(s, o);
    Classification c;
    c.cc_established = detail::general_cc_inv(alg, opts).pass();
    c.kind = MClass::M11a;
    const auto branches = detail::analyze_branches(alg, opts.tol);
    for (std::size_t k = 0; k < branches.size(); ++k) {
        BranchClass b;
        b.k = k;
        b.nondemolition = branches[k].demolition <= opts.tol.vec;
        b.disentangled = branches[k].rank <= 1;
        if (b.nondemolition && b.disentangled) {
            const Op m = detail::transformer(alg, k, branches[k].pointer_vector);
            b.ideal = detail::distance_up_to_phase(m, alg.e[k]) <= opts.tol.op;
        }
        b.kind = kind_of(b.nondemolition, b.disentangled, b.ideal);
        c.kind = std::max(c.kind, b.kind);
        c.branches.push_back(b);
    }
    return c;
}

}  // namespace premeas
