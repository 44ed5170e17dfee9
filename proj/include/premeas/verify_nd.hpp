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

#include <array>
#include <string>
#include <vector>

namespace premeas {

enum class NdCriterion {
    NdStat,
    NdInv,
    NdStrong,
    NdDyn,
    NdBasis,
    NdSubspace,
    Twin,
    Repeat,
    ExtPrc,
    ExpansionNd,
    TwinSchmidt
};

inline constexpr std::array<NdCriterion, 11> kNdCriteria = {
    NdCriterion::NdStat, NdCriterion::NdInv,  NdCriterion::NdStrong, NdCriterion::NdDyn,
    NdCriterion::NdBasis, NdCriterion::NdSubspace, NdCriterion::Twin, NdCriterion::Repeat,
    NdCriterion::ExtPrc, NdCriterion::ExpansionNd, NdCriterion::TwinSchmidt};

inline const char *tag(NdCriterion c) {
    switch (c) {
        case NdCriterion::NdStat:
            return "ND_STAT";
        case NdCriterion::NdInv:
            return "ND_INV";
        case NdCriterion::NdStrong:
            return "ND_STRONG";
        case NdCriterion::NdDyn:
            return "ND_DYN";
        case NdCriterion::NdBasis:
            return "ND_BASIS";
        case NdCriterion::NdSubspace:
            return "ND_SUBSPACE";
        case NdCriterion::Twin:
            return "TWIN";
        case NdCriterion::Repeat:
            return "REPEAT";
        case NdCriterion::ExtPrc:
            return "EXT_PRC";
        case NdCriterion::ExpansionNd:
            return "EXPANSION_ND";
        case NdCriterion::TwinSchmidt:
            return "TWIN_SCHMIDT";
    }
    return "?";
}

inline const char *form_name(NdCriterion c) {
    switch (c) {
        case NdCriterion::NdStat:
            return "sharp value kept, probability form";
        case NdCriterion::NdInv:
            return "sharp value kept, invariance form";
        case NdCriterion::NdStrong:
            return "sharp value kept, strong invariance form";
        case NdCriterion::NdDyn:
            return "interaction commutes with eigenprojectors";
        case NdCriterion::NdBasis:
            return "extended basis-dynamical";
        case NdCriterion::NdSubspace:
            return "extended subspace-dynamical";
        case NdCriterion::Twin:
            return "twin observables";
        case NdCriterion::Repeat:
            return "repeatability";
        case NdCriterion::ExtPrc:
            return "extended probability reproducibility";
        case NdCriterion::ExpansionNd:
            return "expansion coefficients are eigenvectors";
        case NdCriterion::TwinSchmidt:
            return "twin-correlated Schmidt decomposition";
    }
    return "?";
}

namespace detail {

inline Verdict nd_stat(const SchemeAlgebra &alg, const VerifyOptions &opts) {
    const auto &t = opts.tol;
    return make_verdict("ND_STAT", form_name(NdCriterion::NdStat), image_leak_probability(alg, alg.e_lift),
                        t.vec * t.vec, Scale::Quadratic, t);
}

inline Verdict nd_inv(const SchemeAlgebra &alg, const VerifyOptions &opts) {
    return make_verdict("ND_INV", form_name(NdCriterion::NdInv), image_escape(alg, alg.e_lift), opts.tol.vec,
                        Scale::Linear, opts.tol);
}

inline Verdict nd_strong(const SchemeAlgebra &alg, const VerifyOptions &opts) {
    MaxTracker m = image_escape(alg, alg.e_lift);
    merge(m, image_cross(alg, alg.e_lift));
    return make_verdict("ND_STRONG", form_name(NdCriterion::NdStrong), m, opts.tol.vec, Scale::Linear, opts.tol);
}

inline Verdict nd_dyn(const SchemeAlgebra &alg, const VerifyOptions &opts) {
    MaxTracker m;
    for (std::size_t k = 0; k < alg.positions; ++k) {
        const Op d = (alg.u * alg.e_lift[k] - alg.e_lift[k] * alg.u) * alg.ready_proj;
        m.offer(d.norm(), k, "operator identity");
    }
    return make_verdict("ND_DYN", form_name(NdCriterion::NdDyn), m, opts.tol.op, Scale::Linear, opts.tol);
}

inline Verdict nd_basis(const SchemeAlgebra &alg, const VerifyOptions &opts) {
    MaxTracker m;
    for (std::size_t k = 0; k < alg.positions; ++k) {
        if (alg.domain[k].cols() == 0) {
            continue;
        }
        const Op r = tensor(alg.domain[k], alg.pointer_basis[k]);
        for (Index q = 0; q < alg.images[k].cols(); ++q) {
            const Ket w = alg.images[k].col(q);
            m.offer((w - r * (r.adjoint() * w)).norm(), k, eig_label(k, q));
        }
    }
    return make_verdict("ND_BASIS", form_name(NdCriterion::NdBasis), m, opts.tol.vec, Scale::Linear, opts.tol);
}

inline Verdict nd_subspace(const SchemeAlgebra &alg, const VerifyOptions &opts) {
    MaxTracker m;
    const Op id = identity(alg.dims.total());
    for (std::size_t k = 0; k < alg.positions; ++k) {
        if (alg.images[k].cols() == 0) {
            continue;
        }
        const Op image_proj = alg.images[k] * alg.images[k].adjoint();
        const Op target = tensor(alg.e[k], alg.f[k]);
        m.offer(spectral_norm((id - target) * image_proj), k, "image of eigenspace " + std::to_string(k));
    }
    return make_verdict("ND_SUBSPACE", form_name(NdCriterion::NdSubspace), m, opts.tol.vec, Scale::Linear,
                        opts.tol);
}

inline Verdict nd_twin(const SchemeAlgebra &alg, const VerifyOptions &opts) {
    MaxTracker m;
    for (std::size_t k = 0; k < alg.positions; ++k) {
        const Op d = (alg.e_lift[k] - alg.f_lift[k]) * alg.u * alg.ready_proj;
        m.offer(d.norm(), k, "operator identity");
    }
    const auto inputs = probe_inputs(alg.dims.a, opts, 16);
    const std::size_t fixed = inputs.size() - static_cast<std::size_t>(opts.trials);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const Ket fin = alg.evolve(inputs[i]);
        for (std::size_t k = 0; k < alg.positions; ++k) {
            m.offer(((alg.e_lift[k] - alg.f_lift[k]) * fin).norm(), k, probe_label(i, fixed));
        }
    }
    return make_verdict("TWIN", form_name(NdCriterion::Twin), m, opts.tol.op, Scale::Linear, opts.tol);
}

inline Verdict nd_repeat(const SchemeAlgebra &alg, const VerifyOptions &opts) {
    MaxTracker m;
    const Op id = identity(alg.dims.total());
    for (std::size_t k = 0; k < alg.positions; ++k) {
        const Op d = (id - alg.e_lift[k]) * alg.f_lift[k] * alg.u * alg.ready_proj;
        m.offer(d.norm(), k, "operator identity");
    }
    const auto inputs = probe_inputs(alg.dims.a, opts, 17);
    const std::size_t fixed = inputs.size() - static_cast<std::size_t>(opts.trials);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const Ket fin = alg.evolve(inputs[i]);
        for (std::size_t k = 0; k < alg.positions; ++k) {
            const Ket branch = alg.f_lift[k] * fin;
            const double p = branch.squaredNorm();
            if (p <= opts.tol.prob) {
                continue;
            }
            m.offer(((id - alg.e_lift[k]) * branch).norm() / std::sqrt(p), k, probe_label(i, fixed));
        }
    }
    return make_verdict("REPEAT", form_name(NdCriterion::Repeat), m, opts.tol.vec, Scale::Linear, opts.tol);
}

inline Verdict nd_ext_prc(const SchemeAlgebra &alg, const VerifyOptions &opts) {
    MaxTracker m;
    const Op &p = alg.ready_proj;
    for (std::size_t k = 0; k < alg.positions; ++k) {
        const Op d = p * (alg.u.adjoint() * alg.e_lift[k] * alg.u - alg.e_lift[k]) * p;
        m.offer(d.norm(), k, "operator identity");
    }
    const auto inputs = probe_inputs(alg.dims.a, opts, 18);
    const std::size_t fixed = inputs.size() - static_cast<std::size_t>(opts.trials);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const Ket fin = alg.evolve(inputs[i]);
        for (std::size_t k = 0; k < alg.positions; ++k) {
            const double before = inputs[i].dot(alg.e[k] * inputs[i]).real();
            const double after = fin.dot(alg.e_lift[k] * fin).real();
            m.offer(std::abs(before - after), k, probe_label(i, fixed));
        }
    }
    return make_verdict("EXT_PRC", form_name(NdCriterion::ExtPrc), m, opts.tol.prob, Scale::Linear, opts.tol);
}

inline Verdict nd_expansion(const SchemeAlgebra &alg, const VerifyOptions &opts) {
    MaxTracker m;
    const auto inputs = probe_inputs(alg.dims.a, opts, 19);
    const std::size_t fixed = inputs.size() - static_cast<std::size_t>(opts.trials);
    const auto bases = pointer_bases(alg, opts, 19);
    const Op id_a = identity(alg.dims.a);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const Op coef = coefficient_matrix(alg.evolve(inputs[i]), alg.dims);
        for (std::size_t b = 0; b < bases.size(); ++b) {
            for (std::size_t k = 0; k < alg.positions; ++k) {
                const Op c = coef * bases[b][k].conjugate();
                m.offer(((id_a - alg.e[k]) * c).norm(), k,
                        probe_label(i, fixed) + (b == 0 ? "" : ", random eigenbasis " + std::to_string(b)));
            }
        }
    }
    return make_verdict("EXPANSION_ND", form_name(NdCriterion::ExpansionNd), m, opts.tol.vec, Scale::Linear,
                        opts.tol);
}

/// Schmidt vectors are grouped by (near-)equal coefficients. Each group must
/// span subspaces reduced by every E^k and F^k, and the group's component
/// of the final state must satisfy the twin relation.
inline Verdict nd_twin_schmidt(const SchemeAlgebra &alg, const VerifyOptions &opts) {
    MaxTracker m;
    const auto inputs = probe_inputs(alg.dims.a, opts, 20);
    const std::size_t fixed = inputs.size() - static_cast<std::size_t>(opts.trials);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const Ket fin = alg.evolve(inputs[i]);
        const SchmidtDecomposition sd = schmidt(fin / fin.norm(), alg.dims, opts.tol);
        std::size_t start = 0;
        while (start < sd.size()) {
            std::size_t end = start + 1;
            while (end < sd.size() && sd.coefficients[end - 1] - sd.coefficients[end] <= opts.tol.schmidt_group) {
                ++end;
            }
            Op pa = Op::Zero(alg.dims.a, alg.dims.a);
            Op pb = Op::Zero(alg.dims.b, alg.dims.b);
            Ket part = Ket::Zero(alg.dims.total());
            for (std::size_t j = start; j < end; ++j) {
                pa += outer(sd.left[j]);
                pb += outer(sd.right[j]);
                part += sd.coefficients[j] * tensor(sd.left[j], sd.right[j]);
            }
            const std::string label = probe_label(i, fixed) + ", Schmidt group " + std::to_string(start);
            for (std::size_t k = 0; k < alg.positions; ++k) {
                m.offer((pa * alg.e[k] - alg.e[k] * pa).norm(), k, label + ", object side");
                m.offer((pb * alg.f[k] - alg.f[k] * pb).norm(), k, label + ", pointer side");
                m.offer(((alg.e_lift[k] - alg.f_lift[k]) * part).norm(), k, label + ", twin relation");
            }
            start = end;
        }
    }
    return make_verdict("TWIN_SCHMIDT", form_name(NdCriterion::TwinSchmidt), m, opts.tol.vec, Scale::Linear,
                        opts.tol);
}

inline Verdict nd_dispatch(const SchemeAlgebra &alg, NdCriterion c, const VerifyOptions &opts) {
    switch (c) {
        case NdCriterion::NdStat:
            return nd_stat(alg, opts);
        case NdCriterion::NdInv:
            return nd_inv(alg, opts);
        case NdCriterion::NdStrong:
            return nd_strong(alg, opts);
        case NdCriterion::NdDyn:
            return nd_dyn(alg, opts);
        case NdCriterion::NdBasis:
            return nd_basis(alg, opts);
        case NdCriterion::NdSubspace:
            return nd_subspace(alg, opts);
        case NdCriterion::Twin:
            return nd_twin(alg, opts);
        case NdCriterion::Repeat:
            return nd_repeat(alg, opts);
        case NdCriterion::ExtPrc:
            return nd_ext_prc(alg, opts);
        case NdCriterion::ExpansionNd:
            return nd_expansion(alg, opts);
        case NdCriterion::TwinSchmidt:
            return nd_twin_schmidt(alg, opts);
    }
    throw Rejected("unknown criterion");
}

}  // namespace detail

/// Verdicts are computed regardless of the calibration condition; callers
/// that need it should check `calibration_holds` first.
inline Verdict verify_nd(const MeasurementScheme &s, const SpectralForm &o, NdCriterion c,
                         const VerifyOptions &opts = {}) {
    const SchemeAlgebra alg(s, o);
    return detail::nd_dispatch(alg, c, opts);
}

inline CriteriaReport verify_all_nd(const MeasurementScheme &s, const SpectralForm &o, const VerifyOptions &opts = {}) {
    const SchemeAlgebra alg(s, o);
    CriteriaReport r;
    for (auto c : kNdCriteria) {
        r.verdicts.push_back(detail::nd_dispatch(alg, c, opts));
    }
    r.equivalence_consistent = consistent(r.verdicts);
    r.cc_established = detail::general_cc_inv(alg, opts).pass();
    return r;
}

struct CoherenceReport {
    bool twin_established = false;
    /// ||rho_A - sum_k E^k rho_A E^k||
    double object_dephasing = 0.0;
    /// ||rho_B - sum_k F^k rho_B F^k||
    double pointer_dephasing = 0.0;
    double object_commutator = 0.0;
    double pointer_commutator = 0.0;

    double max_residual() const {
        return std::max({object_dephasing, pointer_dephasing, object_commutator, pointer_commutator});
    }
};

/// Coherence between eigenspaces in the final subsystem states. The
/// residuals are reported whether or not the twin relation holds.
inline CoherenceReport coherence_report(const MeasurementScheme &s, const SpectralForm &o, const Ket &phi,
                                        const VerifyOptions &opts = {}) {
    const SchemeAlgebra alg(s, o);
    if (phi.size() != alg.dims.a || !is_unit(phi, opts.tol)) {
        throw Rejected("coherence_report: input must be a unit vector on the object space");
    }
    CoherenceReport r;
    r.twin_established = detail::nd_twin(alg, opts).pass();
    const Ket fin = alg.evolve(phi);
    const Op rho_a = reduced_state(fin, alg.dims, Subsystem::B);
    const Op rho_b = reduced_state(fin, alg.dims, Subsystem::A);
    Op deph_a = Op::Zero(alg.dims.a, alg.dims.a);
    Op deph_b = Op::Zero(alg.dims.b, alg.dims.b);
    for (std::size_t k = 0; k < alg.positions; ++k) {
        deph_a += alg.e[k] * rho_a * alg.e[k];
        deph_b += alg.f[k] * rho_b * alg.f[k];
        r.object_commutator = std::max(r.object_commutator, (alg.e[k] * rho_a - rho_a * alg.e[k]).norm());
        r.pointer_commutator = std::max(r.pointer_commutator, (alg.f[k] * rho_b - rho_b * alg.f[k]).norm());
    }
    r.object_dephasing = (rho_a - deph_a).norm();
    r.pointer_dephasing = (rho_b - deph_b).norm();
    return r;
}

struct Overmeasurement {
    SpectralForm observable;
    MeasurementScheme scheme;
};

/// Measures f(O) with the same interaction and ready state by merging pointer
/// positions along f. Pointer positions past the observable's eigenvalues
/// are kept as separate positions after the merged ones.
inline Overmeasurement overmeasure(const MeasurementScheme &s, const SpectralForm &o, const IndexFunction &f,
                                   const VerifyOptions &opts = {}) {
    require_compatible(s, o);
    if (f.source_size() != o.size()) {
        throw Rejected("overmeasure: index function is not total: defined on " + std::to_string(f.source_size()) +
                       " indices, observable has " + std::to_string(o.size()));
    }
    const Verdict cc = verify_general(s, o, GeneralCriterion::CcInv, opts);
    if (!cc.pass()) {
        throw Rejected("overmeasure: calibration condition does not hold", cc.residual);
    }
    SpectralForm coarse = apply_function(o, f, opts.tol);

    std::vector<std::size_t> mapping = f.mapping();
    std::vector<double> values = f.values();
    double next = *std::max_element(values.begin(), values.end());
    for (std::size_t k = o.size(); k < s.pointer().size(); ++k) {
        mapping.push_back(values.size());
        next += 1.0;
        values.push_back(next);
    }
    const IndexFunction pointer_map(std::move(mapping), values);
    SpectralForm pointer = coarsen_pointer(s.pointer(), pointer_map, values, opts.tol);
    MeasurementScheme coarse_scheme(s.dims(), s.ready(), std::move(pointer), s.interaction(), opts.tol);
    return {std::move(coarse), std::move(coarse_scheme)};
}

}  // namespace premeas
