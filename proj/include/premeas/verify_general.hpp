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

#include "premeas/random.hpp"
#include "premeas/scheme.hpp"
#include "premeas/verdict.hpp"

#include <array>
#include <string>
#include <vector>

namespace premeas {

enum class GeneralCriterion { CcStat, CcInv, StrongInv, Prc, Dynamical, BasisDyn, SubspaceDyn, Expansion };

inline constexpr std::array<GeneralCriterion, 8> kGeneralCriteria = {
    GeneralCriterion::CcStat,   GeneralCriterion::CcInv,    GeneralCriterion::StrongInv,
    GeneralCriterion::Prc,      GeneralCriterion::Dynamical, GeneralCriterion::BasisDyn,
    GeneralCriterion::SubspaceDyn, GeneralCriterion::Expansion};

inline const char *tag(GeneralCriterion c) {
    switch (c) {
        case GeneralCriterion::CcStat:
            return "CC_STAT";
        case GeneralCriterion::CcInv:
            return "CC_INV";
        case GeneralCriterion::StrongInv:
            return "STRONG_INV";
        case GeneralCriterion::Prc:
            return "PRC";
        case GeneralCriterion::Dynamical:
            return "DYNAMICAL";
        case GeneralCriterion::BasisDyn:
            return "BASIS_DYN";
        case GeneralCriterion::SubspaceDyn:
            return "SUBSPACE_DYN";
        case GeneralCriterion::Expansion:
            return "EXPANSION";
    }
    return "?";
}

inline const char *form_name(GeneralCriterion c) {
    switch (c) {
        case GeneralCriterion::CcStat:
            return "calibration, probability form";
        case GeneralCriterion::CcInv:
            return "calibration, invariance form";
        case GeneralCriterion::StrongInv:
            return "calibration, strong invariance form";
        case GeneralCriterion::Prc:
            return "probability reproducibility";
        case GeneralCriterion::Dynamical:
            return "dynamical intertwining";
        case GeneralCriterion::BasisDyn:
            return "basis-dynamical";
        case GeneralCriterion::SubspaceDyn:
            return "subspace-dynamical";
        case GeneralCriterion::Expansion:
            return "pointer-basis expansion";
    }
    return "?";
}

namespace detail {

inline std::string eig_label(std::size_t k, Index q) {
    return "eigenvector " + std::to_string(q) + " of index " + std::to_string(k);
}

inline std::string probe_label(std::size_t i, std::size_t deterministic) {
    return i < deterministic ? "probe " + std::to_string(i) : "sample " + std::to_string(i - deterministic);
}

/// Polarization probes followed by `trials` random inputs.
inline std::vector<Ket> probe_inputs(Index dim, const VerifyOptions &opts, std::uint64_t salt) {
    std::vector<Ket> out = polarization_probes(dim);
    for (auto &k : sample_inputs(dim, opts.trials, opts.seed * 1000003ULL + salt)) {
        out.push_back(std::move(k));
    }
    return out;
}

/// The deterministic eigenbasis of each pointer range followed by
/// `opts.eigenbasis_trials` random rotations within every range.
inline std::vector<std::vector<Op>> pointer_bases(const SchemeAlgebra &alg, const VerifyOptions &opts,
                                                  std::uint64_t salt) {
    std::vector<std::vector<Op>> out{alg.pointer_basis};
    Rng rng(opts.seed * 7919ULL + salt);
    for (int t = 0; t < opts.eigenbasis_trials; ++t) {
        std::vector<Op> rotated;
        for (const auto &b : alg.pointer_basis) {
            rotated.push_back(b * random_unitary(b.cols(), rng));
        }
        out.push_back(std::move(rotated));
    }
    return out;
}

/// max over (k, q) of ||(I - proj[k]) images[k].col(q)||.
inline MaxTracker image_escape(const SchemeAlgebra &alg, const std::vector<Op> &proj) {
    MaxTracker m;
    const Op id = identity(alg.dims.total());
    for (std::size_t k = 0; k < alg.positions; ++k) {
        const Op miss = id - proj[k];
        for (Index q = 0; q < alg.images[k].cols(); ++q) {
            m.offer((miss * alg.images[k].col(q)).norm(), k, eig_label(k, q));
        }
    }
    return m;
}

/// max over (k, q) of the weight of images[k].col(q) on proj[k'] for k' != k,
/// computed as a sum of nonnegative terms.
inline MaxTracker image_leak_probability(const SchemeAlgebra &alg, const std::vector<Op> &proj) {
    MaxTracker m;
    for (std::size_t k = 0; k < alg.positions; ++k) {
        for (Index q = 0; q < alg.images[k].cols(); ++q) {
            const Ket w = alg.images[k].col(q);
            double leak = 0.0;
            for (std::size_t j = 0; j < alg.positions; ++j) {
                if (j != k) {
                    leak += (proj[j] * w).squaredNorm();
                }
            }
            m.offer(leak, k, eig_label(k, q));
        }
    }
    return m;
}

/// max over k != k', q of ||proj[k] images[k'].col(q)||.
inline MaxTracker image_cross(const SchemeAlgebra &alg, const std::vector<Op> &proj) {
    MaxTracker m;
    for (std::size_t k = 0; k < alg.positions; ++k) {
        for (std::size_t j = 0; j < alg.positions; ++j) {
            if (j == k) {
                continue;
            }
            for (Index q = 0; q < alg.images[j].cols(); ++q) {
                m.offer((proj[k] * alg.images[j].col(q)).norm(), k,
                        "weight on index " + std::to_string(k) + " from " + eig_label(j, q));
            }
        }
    }
    return m;
}

inline void merge(MaxTracker &into, const MaxTracker &from) {
    if (from.where && !(from.value <= into.value)) {
        into = from;
    }
}

inline Verdict general_cc_stat(const SchemeAlgebra &alg, const VerifyOptions &opts) {
    const auto &t = opts.tol;
    return make_verdict("CC_STAT", form_name(GeneralCriterion::CcStat), image_leak_probability(alg, alg.f_lift),
                        t.vec * t.vec, Scale::Quadratic, t);
}

inline Verdict general_cc_inv(const SchemeAlgebra &alg, const VerifyOptions &opts) {
    return make_verdict("CC_INV", form_name(GeneralCriterion::CcInv), image_escape(alg, alg.f_lift), opts.tol.vec,
                        Scale::Linear, opts.tol);
}

inline Verdict general_strong_inv(const SchemeAlgebra &alg, const VerifyOptions &opts) {
    MaxTracker m = image_escape(alg, alg.f_lift);
    merge(m, image_cross(alg, alg.f_lift));
    return make_verdict("STRONG_INV", form_name(GeneralCriterion::StrongInv), m, opts.tol.vec, Scale::Linear,
                        opts.tol);
}

inline Verdict general_prc(const SchemeAlgebra &alg, const VerifyOptions &opts) {
    MaxTracker m;
    const Op &p = alg.ready_proj;
    for (std::size_t k = 0; k < alg.positions; ++k) {
        const Op d = p * (alg.u.adjoint() * alg.f_lift[k] * alg.u - alg.e_lift[k]) * p;
        m.offer(d.norm(), k, "operator identity");
    }
    const auto inputs = probe_inputs(alg.dims.a, opts, 4);
    const std::size_t fixed = inputs.size() - static_cast<std::size_t>(opts.trials);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const Ket fin = alg.evolve(inputs[i]);
        for (std::size_t k = 0; k < alg.positions; ++k) {
            const double before = inputs[i].dot(alg.e[k] * inputs[i]).real();
            const double after = (alg.f_lift[k] * fin).squaredNorm();
            m.offer(std::abs(before - after), k, probe_label(i, fixed));
        }
    }
    return make_verdict("PRC", form_name(GeneralCriterion::Prc), m, opts.tol.prob, Scale::Linear, opts.tol);
}

inline Verdict general_dynamical(const SchemeAlgebra &alg, const VerifyOptions &opts) {
    MaxTracker m;
    for (std::size_t k = 0; k < alg.positions; ++k) {
        const Op d = (alg.f_lift[k] * alg.u - alg.u * alg.e_lift[k]) * alg.ready_proj;
        m.offer(d.norm(), k, "operator identity");
    }
    return make_verdict("DYNAMICAL", form_name(GeneralCriterion::Dynamical), m, opts.tol.op, Scale::Linear,
                        opts.tol);
}

inline Verdict general_basis_dyn(const SchemeAlgebra &alg, const VerifyOptions &opts) {
    MaxTracker m;
    const Op id_a = identity(alg.dims.a);
    for (std::size_t k = 0; k < alg.positions; ++k) {
        const Op r = tensor(id_a, alg.pointer_basis[k]);
        for (Index q = 0; q < alg.images[k].cols(); ++q) {
            const Ket w = alg.images[k].col(q);
            m.offer((w - r * (r.adjoint() * w)).norm(), k, eig_label(k, q));
        }
    }
    return make_verdict("BASIS_DYN", form_name(GeneralCriterion::BasisDyn), m, opts.tol.vec, Scale::Linear,
                        opts.tol);
}

inline Verdict general_subspace_dyn(const SchemeAlgebra &alg, const VerifyOptions &opts) {
    MaxTracker m;
    const Op id = identity(alg.dims.total());
    for (std::size_t k = 0; k < alg.positions; ++k) {
        if (alg.images[k].cols() == 0) {
            continue;
        }
        const Op image_proj = alg.images[k] * alg.images[k].adjoint();
        m.offer(spectral_norm((id - alg.f_lift[k]) * image_proj), k, "image of eigenspace " + std::to_string(k));
    }
    return make_verdict("SUBSPACE_DYN", form_name(GeneralCriterion::SubspaceDyn), m, opts.tol.vec, Scale::Linear,
                        opts.tol);
}

inline Verdict general_expansion(const SchemeAlgebra &alg, const VerifyOptions &opts) {
    MaxTracker m;
    const auto inputs = probe_inputs(alg.dims.a, opts, 8);
    const std::size_t fixed = inputs.size() - static_cast<std::size_t>(opts.trials);
    const auto bases = pointer_bases(alg, opts, 8);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const Ket fin = alg.evolve(inputs[i]);
        const Op coef = coefficient_matrix(fin, alg.dims);
        for (std::size_t b = 0; b < bases.size(); ++b) {
            for (std::size_t k = 0; k < alg.positions; ++k) {
                // Column s holds the object-side coefficient of pointer
                // eigenvector s.
                const Op c = coef * bases[b][k].conjugate();
                const double expected = inputs[i].dot(alg.e[k] * inputs[i]).real();
                m.offer(std::abs(c.squaredNorm() - expected), k,
                        probe_label(i, fixed) + (b == 0 ? "" : ", random eigenbasis " + std::to_string(b)));
            }
        }
    }
    return make_verdict("EXPANSION", form_name(GeneralCriterion::Expansion), m, opts.tol.prob, Scale::Linear,
                        opts.tol);
}

inline Verdict general_dispatch(const SchemeAlgebra &alg, GeneralCriterion c, const VerifyOptions &opts) {
    switch (c) {
        case GeneralCriterion::CcStat:
            return general_cc_stat(alg, opts);
        case GeneralCriterion::CcInv:
            return general_cc_inv(alg, opts);
        case GeneralCriterion::StrongInv:
            return general_strong_inv(alg, opts);
        case GeneralCriterion::Prc:
            return general_prc(alg, opts);
        case GeneralCriterion::Dynamical:
            return general_dynamical(alg, opts);
        case GeneralCriterion::BasisDyn:
            return general_basis_dyn(alg, opts);
        case GeneralCriterion::SubspaceDyn:
            return general_subspace_dyn(alg, opts);
        case GeneralCriterion::Expansion:
            return general_expansion(alg, opts);
    }
    throw Rejected("unknown criterion");
}

}  // namespace detail

inline Verdict verify_general(const MeasurementScheme &s, const SpectralForm &o, GeneralCriterion c,
                              const VerifyOptions &opts = {}) {
    const SchemeAlgebra alg(s, o);
    return detail::general_dispatch(alg, c, opts);
}

inline CriteriaReport verify_all_general(const MeasurementScheme &s, const SpectralForm &o,
                                         const VerifyOptions &opts = {}) {
    const SchemeAlgebra alg(s, o);
    CriteriaReport r;
    for (auto c : kGeneralCriteria) {
        r.verdicts.push_back(detail::general_dispatch(alg, c, opts));
    }
    r.equivalence_consistent = consistent(r.verdicts);
    r.cc_established = r.verdicts[1].pass();
    return r;
}

/// True when the invariance form of the calibration condition passes.
inline bool calibration_holds(const MeasurementScheme &s, const SpectralForm &o, const VerifyOptions &opts = {}) {
    return verify_general(s, o, GeneralCriterion::CcInv, opts).pass();
}

/// Reversed process: the final state is run backwards and the former
/// observable acts as pointer. Checks that the probabilities of E^k in the
/// recovered object state equal those of F^k in the final state.
inline Verdict check_time_reversal(const MeasurementScheme &s, const SpectralForm &o, const Ket &phi,
                                   const VerifyOptions &opts = {}) {
    const SchemeAlgebra alg(s, o);
    const Verdict cc = detail::general_cc_inv(alg, opts);
    if (!cc.pass()) {
        throw Rejected("time reversal: calibration condition does not hold", cc.residual);
    }
    if (phi.size() != alg.dims.a || !is_unit(phi, opts.tol)) {
        throw Rejected("time reversal: input must be a unit vector on the object space");
    }
    const Ket fin = alg.evolve(phi);
    const Ket back = alg.u.adjoint() * fin;
    const Op rho_a = reduced_state(back, alg.dims, Subsystem::B);
    detail::MaxTracker m;
    for (std::size_t k = 0; k < alg.positions; ++k) {
        const double recovered = (alg.e[k] * rho_a).trace().real();
        const double pointer = (alg.f_lift[k] * fin).squaredNorm();
        m.offer(std::abs(recovered - pointer), k, "reversed run");
    }
    return detail::make_verdict("TIME_REVERSAL", "reversed probability reproducibility", m, opts.tol.prob,
                                Scale::Linear, opts.tol);
}

}  // namespace premeas
