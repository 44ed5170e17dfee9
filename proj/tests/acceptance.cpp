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


// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include "population.hpp"
#include "premeas.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

namespace premeas {
namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::string detail;
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string secs(double t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f s", t);
    return buf;
}

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", x);
    return buf;
}

const std::vector<population::Sample> &population_200() {
    static const std::vector<population::Sample> pop = population::standard_population(20261016);
    return pop;
}

Outcome general_equivalence() {
    const auto t0 = Clock::now();
    int decided = 0;
    int consistent = 0;
    std::string first_bad;
    for (const auto &smp : population_200()) {
        const CriteriaReport r = verify_all_general(smp.scheme, smp.observable);
        if (!all_outside_band(r.verdicts, Tolerances{})) {
            continue;
        }
        ++decided;
        if (r.equivalence_consistent) {
            ++consistent;
        } else if (first_bad.empty()) {
            first_bad = smp.label;
        }
    }
    const double t = seconds_since(t0);
    Outcome o;
    o.pass = decided > 0 && consistent == decided && t <= 60.0;
    o.detail = std::to_string(consistent) + "/" + std::to_string(decided) + " consistent outside the band (" +
               std::to_string(population_200().size() - static_cast<std::size_t>(decided)) + " in band), " +
               secs(t) + (first_bad.empty() ? "" : ", first inconsistent " + first_bad);
    return o;
}

Outcome nd_equivalence() {
    int valid = 0;
    int decided = 0;
    int consistent = 0;
    std::string first_bad;
    for (const auto &smp : population_200()) {
        const CriteriaReport r = verify_all_nd(smp.scheme, smp.observable);
        if (!r.cc_established) {
            continue;
        }
        ++valid;
        if (!all_outside_band(r.verdicts, Tolerances{})) {
            continue;
        }
        ++decided;
        if (r.equivalence_consistent) {
            ++consistent;
        } else if (first_bad.empty()) {
            first_bad = smp.label;
        }
    }
    Outcome o;
    o.pass = decided > 0 && consistent == decided;
    o.detail = std::to_string(consistent) + "/" + std::to_string(decided) + " consistent outside the band, " +
               std::to_string(valid) + " calibrated schemes" + (first_bad.empty() ? "" : ", first inconsistent " + first_bad);
    return o;
}

Outcome calibration_implies_reproducibility() {
    int calibrated = 0;
    int counterexamples = 0;
    for (const auto &smp : population_200()) {
        if (!verify_general(smp.scheme, smp.observable, GeneralCriterion::CcInv).pass()) {
            continue;
        }
        ++calibrated;
        if (!verify_general(smp.scheme, smp.observable, GeneralCriterion::Prc).pass()) {
            ++counterexamples;
        }
    }
    return {calibrated > 0 && counterexamples == 0,
            std::to_string(counterexamples) + " counterexamples among " + std::to_string(calibrated) +
                " calibrated schemes"};
}

Outcome twin_coherence() {
    int twins = 0;
    double worst = 0.0;
    for (const auto &smp : population_200()) {
        if (!verify_nd(smp.scheme, smp.observable, NdCriterion::Twin).pass()) {
            continue;
        }
        ++twins;
        for (const auto &phi : sample_inputs(smp.scheme.dims().a, 20, 401 + static_cast<std::uint64_t>(twins))) {
            worst = std::max(worst, coherence_report(smp.scheme, smp.observable, phi).max_residual());
        }
    }
    return {twins > 0 && worst <= 1e-10,
            std::to_string(twins) + " twin schemes x 20 inputs, worst coherence residual " + sci(worst)};
}

std::vector<double> branch_probabilities(const MeasurementScheme &s, const SpectralForm &o, const Ket &phi) {
    const Ket fin = s.interaction() * tensor(phi, s.ready());
    std::vector<double> p;
    for (std::size_t k = 0; k < o.size(); ++k) {
        p.push_back((tensor(identity(s.dims().a), s.pointer().projector(k)) * fin).squaredNorm());
    }
    return p;
}

Outcome branch_universality() {
    Rng rng(503);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const Index da = population::pick(2, 4, rng);
        const Index parts = population::pick(2, da, rng);
        const SpectralForm o = random_observable(da, random_ranks(da, parts, rng), rng);
        std::vector<MeasurementScheme> pair;
        for (int j = 0; j < 2; ++j) {
            const Index db = population::pick(parts, 4, rng);
            const SpectralForm p = random_observable(db, random_ranks(db, population::pick(parts, db, rng), rng), rng);
            pair.push_back(population::random_built(o, p, random_ket(db, rng), j == 0, rng));
        }
        for (const auto &phi : sample_inputs(da, 50, 509 + static_cast<std::uint64_t>(trial))) {
            const auto a = branch_probabilities(pair[0], o, phi);
            const auto b = branch_probabilities(pair[1], o, phi);
            for (std::size_t k = 0; k < a.size(); ++k) {
                worst = std::max(worst, std::abs(a[k] - b[k]));
            }
        }
    }
    return {worst <= 1e-10, "10 observables x 50 inputs, worst disagreement " + sci(worst)};
}

MeasurementScheme random_ideal(Rng &rng, SpectralForm &o) {
    const Index da = population::pick(2, 4, rng);
    const Index parts = population::pick(2, da, rng);
    o = random_observable(da, random_ranks(da, parts, rng), rng);
    const Index db = population::pick(parts, 4, rng);
    const SpectralForm p = random_observable(db, random_ranks(db, population::pick(parts, db, rng), rng), rng);
    return build_ideal(o, p, random_ket(db, rng));
}

Outcome ideal_equivalence() {
    Rng rng(521);
    int agree = 0;
    int ideal = 0;
    for (int i = 0; i < 50; ++i) {
        SpectralForm o;
        const MeasurementScheme s = random_ideal(rng, o);
        const IdealReport r = is_ideal(s, o);
        agree += r.definitions_agree() ? 1 : 0;
        ideal += r.ideal() ? 1 : 0;
    }
    int fixtures_agree = 0;
    for (const auto &f : {fixtures::nd_rot(), fixtures::nd_ent(), fixtures::demo3()}) {
        fixtures_agree += is_ideal(f.scheme(), f.observable).definitions_agree() ? 1 : 0;
    }
    return {agree == 50 && ideal == 50 && fixtures_agree == 3,
            std::to_string(agree) + "/50 built schemes agree (" + std::to_string(ideal) + " ideal), " +
                std::to_string(fixtures_agree) + "/3 fixtures agree"};
}

Outcome luders_oracle() {
    Rng rng(541);
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) {
        SpectralForm o;
        const MeasurementScheme s = random_ideal(rng, o);
        for (const auto &phi : sample_inputs(s.dims().a, 50, 547 + static_cast<std::uint64_t>(i))) {
            const Op rho = reduced_state(s.interaction() * tensor(phi, s.ready()), s.dims(), Subsystem::B);
            worst = std::max(worst, (rho - luders_channel(phi, o)).norm());
        }
    }
    return {worst <= 1e-10, "5 schemes x 50 inputs, worst distance " + sci(worst)};
}

IndexFunction random_function(std::size_t n, Rng &rng) {
    const std::size_t m = static_cast<std::size_t>(population::pick(1, static_cast<Index>(n), rng));
    std::vector<std::size_t> mapping(n);
    for (std::size_t k = 0; k < n; ++k) {
        mapping[k] = k < m ? k : static_cast<std::size_t>(population::pick(0, static_cast<Index>(m) - 1, rng));
    }
    std::shuffle(mapping.begin(), mapping.end(), rng);
    std::vector<double> values(m);
    std::iota(values.begin(), values.end(), 0.0);
    return IndexFunction(std::move(mapping), std::move(values));
}

Outcome overmeasurement() {
    Rng rng(557);
    int general_ok = 0;
    int nd_sources = 0;
    int nd_ok = 0;
    for (int i = 0; i < 20; ++i) {
        const auto smp = population::valid_sample(rng, i % 2 == 0, i);
        const IndexFunction f = random_function(smp.observable.size(), rng);
        const Overmeasurement om = overmeasure(smp.scheme, smp.observable, f);
        general_ok += all_pass(verify_all_general(om.scheme, om.observable).verdicts) ? 1 : 0;
        if (all_pass(verify_all_nd(smp.scheme, smp.observable).verdicts)) {
            ++nd_sources;
            nd_ok += all_pass(verify_all_nd(om.scheme, om.observable).verdicts) ? 1 : 0;
        }
    }
    return {general_ok == 20 && nd_ok == nd_sources && nd_sources > 0,
            std::to_string(general_ok) + "/20 coarse schemes pass general, " + std::to_string(nd_ok) + "/" +
                std::to_string(nd_sources) + " keep nondemolition"};
}

Outcome distant_theorem() {
    Rng rng(563);
    double worst = 0.0;
    int runs = 0;
    while (runs < 50) {
        const Index d1 = population::pick(2, 3, rng);
        const Index d2 = population::pick(2, 3, rng);
        const Index db = population::pick(2, 3, rng);
        const Index parts = population::pick(2, std::min(d2, db), rng);
        const auto [o, p] = population::random_pair(d2, db, parts, parts, rng);
        const MeasurementScheme s = population::random_built(o, p, random_ket(db, rng), runs % 2 == 0, rng);
        const Ket phi = random_ket(d1 * d2, rng);
        const Op u1 = random_unitary(d1, rng);
        const auto k = static_cast<std::size_t>(population::pick(0, parts - 1, rng));
        const BipartiteDims pair(d1, d2);
        const DistantOutcome out = distant_state_after_complete(phi, pair, s, o, u1, k);
        const Op expected = u1 * conditional_state(phi, pair, o.projector(k)) * u1.adjoint();
        worst = std::max(worst, (out.state - expected).norm());
        ++runs;
    }
    const BipartiteDims qubits(2, 2);
    const double z = (distant_state_after_complete(singlet(), qubits, fixtures::ideal2(spin_z()), spin_z(),
                                                   identity(2), 1)
                          .state -
                      outer(spin_z_plus()))
                         .norm();
    const double x = (distant_state_after_complete(singlet(), qubits, fixtures::ideal2(spin_x()), spin_x(),
                                                   identity(2), 1)
                          .state -
                      outer(spin_x_plus()))
                         .norm();
    return {worst <= 1e-10 && z <= 1e-12 && x <= 1e-12,
            "50 random runs, worst " + sci(worst) + "; singlet z " + sci(z) + ", x " + sci(x)};
}

Outcome classification() {
    std::string got;
    bool ok = true;
    auto fixtures = fixtures::canonical();
    fixtures.push_back(fixtures::mixed());
    for (const auto &f : fixtures) {
        const MClass c = classify(f.scheme(), f.observable).kind;
        ok = ok && c == f.expected;
        got += (got.empty() ? "" : " ") + f.name + "=" + to_string(c);
    }
    return {ok, got};
}

Outcome algebra_properties() {
    const auto t0 = Clock::now();
    Rng rng(569);
    double trace_rules = 0.0;
    for (const auto &[da, db] : std::vector<std::pair<Index, Index>>{{2, 2}, {3, 2}, {3, 4}}) {
        const BipartiteDims d(da, db);
        for (int i = 0; i < 100; ++i) {
            const Op x = random_gaussian(da * db, da * db, rng);
            const Op ya = random_gaussian(da, da, rng);
            const Op yb = random_gaussian(db, db, rng);
            const Op left = partial_trace(tensor(ya, identity(db)) * x, d, Subsystem::B);
            const Op right = partial_trace(x * tensor(ya, identity(db)), d, Subsystem::B);
            const Op tr = partial_trace(x, d, Subsystem::B);
            trace_rules = std::max(trace_rules, (left - ya * tr).norm());
            trace_rules = std::max(trace_rules, (right - tr * ya).norm());
            trace_rules = std::max(trace_rules, (partial_trace(tensor(identity(da), yb) * x, d, Subsystem::B) -
                                                 partial_trace(x * tensor(identity(da), yb), d, Subsystem::B))
                                                    .norm());
        }
    }
    int disagreements = 0;
    for (int i = 0; i < 100; ++i) {
        const Index dim = population::pick(2, 5, rng);
        const SpectralForm o = random_observable(dim, random_ranks(dim, 2, rng), rng);
        const Op &e = o.projector(0);
        Ket psi = random_ket(dim, rng);
        if (i % 2 == 0) {
            psi = (e * psi).normalized();
        }
        disagreements += is_certain(psi, e).forms_agree ? 0 : 1;
    }
    double schmidt_worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const Index da = population::pick(1, 5, rng);
        const Index db = population::pick(1, 5, rng);
        const Ket psi = random_ket(da * db, rng);
        schmidt_worst = std::max(schmidt_worst, (schmidt(psi, {da, db}).reconstruct() - psi).norm());
    }
    const double t = seconds_since(t0);
    return {trace_rules <= 1e-10 && disagreements == 0 && schmidt_worst <= 1e-10,
            "partial trace " + sci(trace_rules) + ", certainty disagreements " + std::to_string(disagreements) +
                ", Schmidt " + sci(schmidt_worst) + ", " + secs(t)};
}

}  // namespace
}  // namespace premeas

int main() {
    using namespace premeas;
    const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria = {
        {"general criteria agree across the population", general_equivalence},
        {"nondemolition criteria agree on calibrated schemes", nd_equivalence},
        {"calibration implies probability reproducibility", calibration_implies_reproducibility},
        {"twin schemes destroy coherence", twin_coherence},
        {"branch probabilities do not depend on the scheme", branch_universality},
        {"ideal definitions agree", ideal_equivalence},
        {"ideal schemes realize the Luders change of state", luders_oracle},
        {"overmeasurement propagates", overmeasurement},
        {"distant measurement theorem and singlet", distant_theorem},
        {"fixture classification", classification},
        {"partial trace, certainty and Schmidt properties", algebra_properties},
    };
    const auto t0 = Clock::now();
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::printf("%s  %2zu  %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    const double total = seconds_since(t0);
    std::printf("total %.2f s\n", total);
    if (total > 120.0) {
        std::printf("FAIL  wall time above 120 s\n");
        ++failed;
    }
    return failed == 0 ? 0 : 1;
}
