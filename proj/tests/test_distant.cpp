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


#include "oracles.hpp"
#include "population.hpp"
#include "premeas/distant.hpp"
#include "premeas/fixtures.hpp"

#include <gtest/gtest.h>

namespace premeas {
namespace {

/// Conditional A1 state by explicit projection and partial trace.
Op conditional_oracle(const Ket &phi, Index d1, Index d2, const Op &e) {
    const Ket v = oracle::kron(Op(Op::Identity(d1, d1)), e) * phi;
    return oracle::trace_b(v * v.adjoint(), d1, d2) / v.squaredNorm();
}

/// Demolition scheme for spin z: both outcomes leave the object in |z,->.
MeasurementScheme demolition_z() {
    const Assignment a = {{spin_z_plus(), fixtures::ket2(2, 2, 1, 0)}, {spin_z_minus(), fixtures::ket2(2, 2, 1, 1)}};
    return build_premeasurement(spin_z(), spin_z(), basis_ket(2, 0), a);
}

Ket random_pair_state(Index d1, Index d2, Rng &rng) {
    return random_ket(d1 * d2, rng);
}

TEST(Singlet, AmplitudesAndInvariants) {
    const Ket s = singlet();
    EXPECT_NEAR(s.norm(), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(s(1) - 1.0 / std::sqrt(2.0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(s(2) + 1.0 / std::sqrt(2.0)), 0.0, 1e-15);
    const SchmidtDecomposition sd = schmidt(s, {2, 2});
    ASSERT_EQ(sd.size(), 2u);
    EXPECT_NEAR(sd.coefficients[0], 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(sd.coefficients[1], 1.0 / std::sqrt(2.0), 1e-15);
    const Op sz = spin_z().matrix();
    const Op total = oracle::kron(sz, Op(Op::Identity(2, 2))) + oracle::kron(Op(Op::Identity(2, 2)), sz);
    EXPECT_NEAR(std::abs((s.adjoint() * total * s)(0, 0)), 0.0, 1e-15);
}

TEST(SubsystemPremeasure, ProductInputLeavesDistantMarginal) {
    Rng rng(307);
    const Ket a1 = random_ket(2, rng);
    const Ket a2 = random_ket(2, rng);
    const SubsystemPremeasurement r =
        subsystem_premeasure(oracle::kron(a1, a2), {2, 2}, fixtures::ideal2(spin_z()), Op::Identity(2, 2));
    const Op rho = oracle::trace_b(r.state.ket * r.state.ket.adjoint(), 2, 4);
    EXPECT_LE((rho - outer(a1)).norm(), 1e-12);
    EXPECT_LE(r.no_influence_residual, 1e-12);
}

TEST(SubsystemPremeasure, SingletMarginalStaysMaximallyMixed) {
    for (const auto &s : {fixtures::ideal2(spin_z()), fixtures::ideal2(spin_x()), demolition_z()}) {
        const SubsystemPremeasurement r = subsystem_premeasure(singlet(), {2, 2}, s, Op::Identity(2, 2));
        const Op rho = oracle::trace_b(r.state.ket * r.state.ket.adjoint(), 2, 4);
        EXPECT_LE((rho - 0.5 * Op::Identity(2, 2)).norm(), 1e-12);
    }
}

TEST(SubsystemPremeasure, StateIsTheProductEvolution) {
    Rng rng(311);
    const Ket phi = random_pair_state(3, 2, rng);
    const Op u1 = random_unitary(3, rng);
    const MeasurementScheme s = fixtures::ideal2(spin_x());
    const SubsystemPremeasurement r = subsystem_premeasure(phi, {3, 2}, s, u1);
    const Ket expected = oracle::kron(u1, s.interaction()) * oracle::kron(phi, s.ready());
    EXPECT_LE((r.state.ket - expected).norm(), 1e-12);
    EXPECT_EQ(r.state.dims.total(), 12);
}

TEST(SubsystemPremeasure, NoInfluenceOnRandomInputs) {
    Rng rng(313);
    for (int t = 0; t < 50; ++t) {
        const Index d1 = 2 + t % 2;
        const Index d2 = 2 + (t / 2) % 2;
        const Index db = d2 + t % 3;
        const auto [o, p] = population::random_pair(d2, db, 2, std::min<Index>(2 + t % 2, db), rng);
        const MeasurementScheme s = population::random_built(o, p, random_ket(db, rng), t % 2 == 0, rng);
        const Ket phi = random_pair_state(d1, d2, rng);
        const Op u1 = random_unitary(d1, rng);
        const SubsystemPremeasurement r = subsystem_premeasure(phi, {d1, d2}, s, u1);
        const Op after = oracle::trace_b(r.state.ket * r.state.ket.adjoint(), d1, d2 * db);
        const Op before = u1 * oracle::trace_b(phi * phi.adjoint(), d1, d2) * u1.adjoint();
        EXPECT_LE((after - before).norm(), 1e-10);
        EXPECT_LE(r.no_influence_residual, 1e-10);
    }
}

TEST(SubsystemPremeasure, RejectsMismatchedInputs) {
    const MeasurementScheme s = fixtures::ideal2(spin_z());
    EXPECT_THROW(subsystem_premeasure(singlet(), {1, 4}, s, Op::Identity(1, 1)), Rejected);
    EXPECT_THROW(subsystem_premeasure(singlet(), {2, 2}, s, Op::Ones(2, 2)), Rejected);
    EXPECT_THROW(subsystem_premeasure(Ket(2 * singlet()), {2, 2}, s, Op::Identity(2, 2)), Rejected);
}

TEST(ConditionalState, SingletAnticorrelates) {
    const Op z = conditional_state(singlet(), {2, 2}, outer(spin_z_minus()));
    EXPECT_LE((z - outer(spin_z_plus())).norm(), 1e-12);
    const Op x = conditional_state(singlet(), {2, 2}, outer(spin_x_minus()));
    EXPECT_LE((x - outer(spin_x_plus())).norm(), 1e-12);
    EXPECT_LE((x - conditional_oracle(singlet(), 2, 2, outer(spin_x_minus()))).norm(), 1e-12);
}

TEST(ConditionalState, ProductStateKeepsDistantFactor) {
    Rng rng(317);
    const Ket a1 = random_ket(3, rng);
    const Ket a2 = random_ket(2, rng);
    const SpectralForm sx = spin_x();
    for (const auto &e : sx.projectors()) {
        EXPECT_LE((conditional_state(oracle::kron(a1, a2), {3, 2}, e) - outer(a1)).norm(), 1e-12);
    }
}

TEST(ConditionalState, MatchesOracleAndIsADensity) {
    Rng rng(331);
    for (int t = 0; t < 20; ++t) {
        const Ket phi = random_pair_state(3, 3, rng);
        const SpectralForm o = random_observable(3, {2, 1}, rng);
        for (const auto &e : o.projectors()) {
            const Op rho = conditional_state(phi, {3, 3}, e);
            EXPECT_LE((rho - conditional_oracle(phi, 3, 3, e)).norm(), 1e-12);
            EXPECT_NEAR(rho.trace().real(), 1.0, 1e-9);
            Eigen::SelfAdjointEigenSolver<Op> es(rho);
            EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12);
        }
    }
}

TEST(ConditionalState, RejectsZeroProbabilityEvent) {
    const Ket phi = oracle::kron(spin_z_plus(), spin_z_plus());
    EXPECT_THROW(conditional_state(phi, {2, 2}, outer(spin_z_minus())), Rejected);
    EXPECT_THROW(conditional_state(singlet(), {2, 2}, Op::Ones(2, 2)), Rejected);
}

TEST(DistantOutcome, SingletIdealSchemeGivesZPlus) {
    const auto out = distant_state_after_complete(singlet(), {2, 2}, fixtures::ideal2(spin_z()), spin_z(),
                                                  Op::Identity(2, 2), 1);
    EXPECT_LE((out.state - outer(spin_z_plus())).norm(), 1e-12);
    EXPECT_NEAR(out.probability, 0.5, 1e-12);
    EXPECT_LE(out.theorem_residual, 1e-12);
    // Oracle: full tripartite evolution, pointer projection, partial trace.
    const MeasurementScheme s = fixtures::ideal2(spin_z());
    const Ket fin = oracle::kron(Op(Op::Identity(2, 2)), s.interaction()) * oracle::kron(singlet(), s.ready());
    const Ket branch = oracle::kron(Op(Op::Identity(4, 4)), s.pointer().projector(1)) * fin;
    const Op rho = oracle::trace_b(branch * branch.adjoint(), 2, 4) / branch.squaredNorm();
    EXPECT_LE((out.state - rho).norm(), 1e-12);
}

TEST(DistantOutcome, DemolitionSchemeGivesTheSameState) {
    const auto ideal = distant_state_after_complete(singlet(), {2, 2}, fixtures::ideal2(spin_z()), spin_z(),
                                                    Op::Identity(2, 2), 1);
    const auto demo =
        distant_state_after_complete(singlet(), {2, 2}, demolition_z(), spin_z(), Op::Identity(2, 2), 1);
    EXPECT_LE((ideal.state - demo.state).norm(), 1e-12);
    EXPECT_LE(demo.theorem_residual, 1e-12);
}

TEST(DistantOutcome, ProductInputFollowsTheDistantUnitary) {
    Rng rng(337);
    const Ket a1 = random_ket(2, rng);
    const Ket a2 = random_ket(2, rng);
    const Op u1 = random_unitary(2, rng);
    for (std::size_t k = 0; k < 2; ++k) {
        const auto out =
            distant_state_after_complete(oracle::kron(a1, a2), {2, 2}, demolition_z(), spin_z(), u1, k);
        EXPECT_LE((out.state - u1 * outer(a1) * u1.adjoint()).norm(), 1e-12);
    }
}

TEST(DistantOutcome, SchemeIndependence) {
    Rng rng(347);
    for (int t = 0; t < 10; ++t) {
        const Ket phi = random_pair_state(2, 3, rng);
        const Op u1 = random_unitary(2, rng);
        const SpectralForm o = random_observable(3, {1, 2}, rng);
        std::vector<MeasurementScheme> schemes;
        for (int j = 0; j < 4; ++j) {
            const Index db = 2 + j % 2;
            const SpectralForm p = random_observable(db, random_ranks(db, 2, rng), rng);
            schemes.push_back(population::random_built(o, p, random_ket(db, rng), j % 2 == 0, rng));
        }
        for (std::size_t k = 0; k < 2; ++k) {
            const Op reference = distant_state_after_complete(phi, {2, 3}, schemes[0], o, u1, k).state;
            for (const auto &s : schemes) {
                const auto out = distant_state_after_complete(phi, {2, 3}, s, o, u1, k);
                EXPECT_LE((out.state - reference).norm(), 1e-10);
                EXPECT_LE(out.theorem_residual, 1e-10);
            }
        }
    }
}

TEST(DistantOutcome, RejectsMissingCalibrationAndEmptyBranch) {
    const MeasurementScheme s = fixtures::ideal2(spin_z());
    EXPECT_THROW(distant_state_after_complete(singlet(), {2, 2}, s, spin_x(), Op::Identity(2, 2), 0), Rejected);
    const Ket phi = oracle::kron(spin_z_plus(), spin_z_plus());
    EXPECT_THROW(distant_state_after_complete(phi, {2, 2}, s, spin_z(), Op::Identity(2, 2), 1), Rejected);
    EXPECT_THROW(distant_state_after_complete(singlet(), {2, 2}, s, spin_z(), Op::Identity(2, 2), 2), Rejected);
}

TEST(Twin, SingletAlongZAndX) {
    for (const auto &o : {spin_z(), spin_x()}) {
        const TwinResult r = find_twin(singlet(), {2, 2}, o);
        ASSERT_TRUE(r.found);
        ASSERT_TRUE(r.observable.has_value());
        EXPECT_LE((r.projectors[0] - o.projector(1)).norm(), 1e-12);
        EXPECT_LE((r.projectors[1] - o.projector(0)).norm(), 1e-12);
        EXPECT_LE(r.consequence_residual, 1e-10);
        for (std::size_t k = 0; k < 2; ++k) {
            const Ket near = oracle::kron(Op(Op::Identity(2, 2)), o.projector(k)) * singlet();
            const Ket far = oracle::kron(r.projectors[k], Op(Op::Identity(2, 2))) * singlet();
            EXPECT_LE((near - far).norm(), 1e-12);
        }
    }
}

TEST(Twin, ProductStateNeedsASureOutcome) {
    const Ket split = oracle::kron(spin_z_plus(), spin_x_plus());
    EXPECT_FALSE(find_twin(split, {2, 2}, spin_z()).found);
    const Ket sure = oracle::kron(spin_x_plus(), spin_z_minus());
    const TwinResult r = find_twin(sure, {2, 2}, spin_z());
    ASSERT_TRUE(r.found);
    EXPECT_LE((r.projectors[1] - outer(spin_x_plus())).norm(), 1e-12);
    EXPECT_LE((r.projectors[0] - outer(spin_x_minus())).norm(), 1e-12);
}

TEST(Twin, ExhaustiveProductOracle) {
    // Twin exists for a product state iff some outcome is certain.
    Rng rng(349);
    for (int t = 0; t < 20; ++t) {
        const Ket a1 = random_ket(2, rng);
        const Ket a2 = t % 2 == 0 ? random_ket(2, rng) : Ket(random_observable(2, {1, 1}, rng).projector(0).col(0));
        const SpectralForm o = t % 2 == 0 ? random_observable(2, {1, 1}, rng)
                                          : spectral_decompose(Op(outer(a2.normalized()) - 0.5 * Op::Identity(2, 2)));
        double certain = 0.0;
        for (const auto &e : o.projectors()) {
            certain = std::max(certain, (a2.normalized().adjoint() * e * a2.normalized())(0, 0).real());
        }
        const TwinResult r = find_twin(oracle::kron(a1, Ket(a2.normalized())), {2, 2}, o);
        EXPECT_EQ(r.found, certain > 1.0 - 1e-9) << t;
    }
}

TEST(Twin, ConsequenceOnRandomEntangledStates) {
    Rng rng(353);
    for (int t = 0; t < 20; ++t) {
        // Maximally entangled states twin every observable.
        const Op u = random_unitary(3, rng);
        Ket phi = Ket::Zero(9);
        for (Index i = 0; i < 3; ++i) {
            phi += oracle::kron(Ket(u.col(i)), oracle::unit(3, i)) / std::sqrt(3.0);
        }
        const SpectralForm o = random_observable(3, {1, 2}, rng);
        const TwinResult r = find_twin(phi, {3, 3}, o);
        ASSERT_TRUE(r.found);
        EXPECT_LE(r.consequence_residual, 1e-10);
        for (std::size_t k = 0; k < o.size(); ++k) {
            const Op via_near = conditional_oracle(phi, 3, 3, o.projector(k));
            const Ket far = oracle::kron(r.projectors[k], Op(Op::Identity(3, 3))) * phi;
            const Op via_far = oracle::trace_b(far * far.adjoint(), 3, 3) / far.squaredNorm();
            EXPECT_LE((via_near - via_far).norm(), 1e-10);
        }
    }
}

}  // namespace
}  // namespace premeas
