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
#include "premeas/fixtures.hpp"
#include "premeas/verify_nd.hpp"

#include <gtest/gtest.h>

#include <set>

namespace premeas {
namespace {

TEST(VerifyNd, Ideal3Twin) {
    const auto f = fixtures::ideal3();
    EXPECT_TRUE(verify_nd(f.scheme(), f.observable, NdCriterion::Twin).pass());
}

TEST(VerifyNd, Demo3FailsInvarianceAtSecondIndex) {
    const auto f = fixtures::demo3();
    const MeasurementScheme s = f.scheme();
    const Verdict v = verify_nd(s, f.observable, NdCriterion::NdInv);
    EXPECT_EQ(v.status, Status::Fail);
    ASSERT_TRUE(v.witness.has_value());
    EXPECT_EQ(v.witness->k, 1u);
    EXPECT_NEAR(v.residual, 1.0, 1e-12);
    EXPECT_NEAR(oracle::demolition_residual(s.interaction(), f.observable.projectors(), s.ready()), 1.0, 1e-12);
}

TEST(VerifyNd, NdRotRepeats) {
    const auto f = fixtures::nd_rot();
    EXPECT_TRUE(verify_nd(f.scheme(), f.observable, NdCriterion::Repeat).pass());
}

TEST(VerifyNd, FixtureVerdicts) {
    struct Case {
        Fixture f;
        bool nd;
    };
    for (const auto &c : {Case{fixtures::ideal3(), true}, Case{fixtures::nd_rot(), true},
                          Case{fixtures::nd_ent(), true}, Case{fixtures::demo3(), false},
                          Case{fixtures::demo_ent(), false}}) {
        const CriteriaReport r = verify_all_nd(c.f.scheme(), c.f.observable);
        ASSERT_EQ(r.verdicts.size(), 11u);
        EXPECT_TRUE(r.cc_established) << c.f.name;
        EXPECT_TRUE(r.equivalence_consistent) << c.f.name;
        for (const auto &v : r.verdicts) {
            EXPECT_EQ(v.pass(), c.nd) << c.f.name << " " << v.criterion;
        }
    }
}

TEST(VerifyNd, TagsAreExhaustiveAndUnique) {
    const auto f = fixtures::ideal3();
    const CriteriaReport r = verify_all_nd(f.scheme(), f.observable);
    std::set<std::string> tags;
    for (const auto &v : r.verdicts) {
        tags.insert(v.criterion);
    }
    EXPECT_EQ(tags.size(), 11u);
}

TEST(VerifyNd, InvarianceMatchesBruteForce) {
    Rng rng(97);
    for (int t = 0; t < 20; ++t) {
        const auto smp = population::valid_sample(rng, t % 2 == 0, t);
        const Verdict v = verify_nd(smp.scheme, smp.observable, NdCriterion::NdInv);
        const double brute =
            oracle::demolition_residual(smp.scheme.interaction(), smp.observable.projectors(), smp.scheme.ready());
        EXPECT_EQ(v.pass(), brute <= 1e-10) << smp.label;
    }
}

TEST(VerifyNd, TwinImpliesStrongInvariance) {
    const auto pop = population::standard_population(101);
    for (const auto &smp : pop) {
        if (verify_nd(smp.scheme, smp.observable, NdCriterion::Twin).pass()) {
            EXPECT_TRUE(verify_nd(smp.scheme, smp.observable, NdCriterion::NdStrong).pass()) << smp.label;
        }
    }
}

TEST(Coherence, NdEntUniformInput) {
    const auto f = fixtures::nd_ent();
    const Ket phi = Ket::Ones(3) / std::sqrt(3.0);
    const CoherenceReport c = coherence_report(f.scheme(), f.observable, phi);
    EXPECT_TRUE(c.twin_established);
    EXPECT_LE(c.max_residual(), 1e-10);
    // Oracle: explicit partial traces.
    const Ket fin = f.scheme().interaction() * oracle::kron(Ket(phi), Ket(f.ready));
    const Op rho_a = oracle::trace_b(outer(fin), 3, 3);
    Op deph = Op::Zero(3, 3);
    for (const auto &e : f.observable.projectors()) {
        deph += e * rho_a * e;
    }
    EXPECT_LE((rho_a - deph).norm(), 1e-12);
}

TEST(Coherence, SharpInput) {
    const auto f = fixtures::ideal3();
    const CoherenceReport c = coherence_report(f.scheme(), f.observable, basis_ket(3, 2));
    EXPECT_LE(c.max_residual(), 1e-15);
}

TEST(Coherence, DemolitionKeepsObjectCoherence) {
    // |1> lands in the other eigenspace next to |0> under the same pointer state.
    const SpectralForm o = fixtures::observable_3();
    const Assignment a = {{basis_ket(3, 0), fixtures::ket2(3, 2, 0, 0)},
                          {basis_ket(3, 1), fixtures::ket2(3, 2, 2, 0)},
                          {basis_ket(3, 2), fixtures::ket2(3, 2, 1, 1)}};
    const MeasurementScheme s = build_premeasurement(o, fixtures::pointer_2(), basis_ket(2, 0), a);
    const Ket phi = Ket::Ones(3) / std::sqrt(3.0);
    const CoherenceReport c = coherence_report(s, o, phi);
    EXPECT_FALSE(c.twin_established);
    EXPECT_NEAR(c.object_dephasing, std::sqrt(2.0) / 3.0, 1e-12);
    EXPECT_GT(c.object_commutator, 1e-3);
}

TEST(Overmeasure, ConstantFunctionGivesTrivialObservable) {
    const auto f = fixtures::ideal3();
    const Overmeasurement om = overmeasure(f.scheme(), f.observable, IndexFunction({0, 0}, {0.0}));
    EXPECT_EQ(om.observable.size(), 1u);
    EXPECT_TRUE(all_pass(verify_all_general(om.scheme, om.observable).verdicts));
}

TEST(Overmeasure, CompleteObservableMerged) {
    const SpectralForm o = make_spectral_form({0.0, 1.0, 2.0}, {fixtures::diag_projector(3, {0}),
                                                                fixtures::diag_projector(3, {1}),
                                                                fixtures::diag_projector(3, {2})});
    const SpectralForm p = make_spectral_form({0.0, 1.0, 2.0}, {fixtures::diag_projector(3, {0}),
                                                                fixtures::diag_projector(3, {1}),
                                                                fixtures::diag_projector(3, {2})});
    const MeasurementScheme s = build_ideal(o, p, basis_ket(3, 0));
    const Overmeasurement om = overmeasure(s, o, IndexFunction({0, 0, 1}, {0.0, 1.0}));
    EXPECT_EQ(om.observable.rank(0), 2);
    EXPECT_EQ(om.scheme.pointer().rank(0), 2);
    EXPECT_TRUE(all_pass(verify_all_general(om.scheme, om.observable).verdicts));
    EXPECT_TRUE(all_pass(verify_all_nd(om.scheme, om.observable).verdicts));
}

TEST(Overmeasure, IdentityKeepsVerdicts) {
    const auto f = fixtures::nd_rot();
    const MeasurementScheme s = f.scheme();
    const Overmeasurement om = overmeasure(s, f.observable, IndexFunction::identity(2));
    const auto before = verify_all_nd(s, f.observable).verdicts;
    const auto after = verify_all_nd(om.scheme, om.observable).verdicts;
    for (std::size_t i = 0; i < before.size(); ++i) {
        EXPECT_EQ(before[i].status, after[i].status);
    }
}

TEST(Overmeasure, RejectsPartialFunctionAndMissingCalibration) {
    const auto f = fixtures::ideal3();
    EXPECT_THROW(overmeasure(f.scheme(), f.observable, IndexFunction({0}, {0.0})), Rejected);
    const MeasurementScheme s = f.scheme();
    const SpectralForm swapped =
        make_spectral_form({0.0, 1.0}, {s.pointer().projector(1), s.pointer().projector(0)});
    const MeasurementScheme bad(s.dims(), f.ready, swapped, s.interaction());
    EXPECT_THROW(overmeasure(bad, f.observable, IndexFunction::identity(2)), Rejected);
}

TEST(Overmeasure, Functoriality) {
    Rng rng(107);
    for (int t = 0; t < 10; ++t) {
        const SpectralForm o = random_observable(4, {1, 1, 1, 1}, rng);
        const SpectralForm p = random_observable(4, {1, 1, 1, 1}, rng);
        const MeasurementScheme s = population::random_built(o, p, random_ket(4, rng), t % 2 == 0, rng);
        const IndexFunction f({0, 1, 2, 2}, {0.0, 1.0, 2.0});
        const IndexFunction g({0, 0, 1}, {0.0, 1.0});
        const Overmeasurement once = overmeasure(s, o, f);
        const Overmeasurement twice = overmeasure(once.scheme, once.observable, g);
        const Overmeasurement direct = overmeasure(s, o, compose(g, f));
        const auto a = verify_all_nd(twice.scheme, twice.observable).verdicts;
        const auto b = verify_all_nd(direct.scheme, direct.observable).verdicts;
        for (std::size_t i = 0; i < a.size(); ++i) {
            EXPECT_EQ(a[i].status, b[i].status);
        }
        EXPECT_TRUE(all_pass(verify_all_general(direct.scheme, direct.observable).verdicts));
    }
}

}  // namespace
}  // namespace premeas
