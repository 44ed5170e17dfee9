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

#include "premeas/fixtures.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace premeas {

using json = nlohmann::ordered_json;

/// Malformed scenario document. `path` points into the document, e.g.
/// "/interaction/assignment/2/target".
class SchemaError : public std::runtime_error {
   public:
    SchemaError(std::string path, const std::string &message)
        : std::runtime_error((path.empty() ? "/" : path) + ": " + message), path_(std::move(path)) {
    }
    const std::string &path() const noexcept {
        return path_;
    }

   private:
    std::string path_;
};

// ---------------------------------------------------------------------------
// Decoding.

namespace scenario_io {

inline const json &field(const json &j, const std::string &path, const std::string &key) {
    if (!j.is_object()) {
        throw SchemaError(path, "expected an object");
    }
    auto it = j.find(key);
    if (it == j.end()) {
        throw SchemaError(path + "/" + key, "missing required field");
    }
    return *it;
}

inline const json *optional_field(const json &j, const std::string &key) {
    auto it = j.find(key);
    return it == j.end() || it->is_null() ? nullptr : &*it;
}

inline Index parse_dim(const json &j, const std::string &path) {
    if (!j.is_number_integer() || j.get<long long>() <= 0) {
        throw SchemaError(path, "expected a positive integer");
    }
    if (j.get<long long>() > kMaxDim) {
        throw SchemaError(path, "dimension exceeds cap " + std::to_string(kMaxDim));
    }
    return static_cast<Index>(j.get<long long>());
}

inline std::uint64_t parse_uint(const json &j, const std::string &path) {
    if (!j.is_number_integer() || j.get<long long>() < 0) {
        throw SchemaError(path, "expected a non-negative integer");
    }
    return j.get<std::uint64_t>();
}

inline double parse_real(const json &j, const std::string &path) {
    if (!j.is_number()) {
        throw SchemaError(path, "expected a number");
    }
    return j.get<double>();
}

/// A number or a two-element array [re, im].
inline cplx parse_complex(const json &j, const std::string &path) {
    if (j.is_number()) {
        return {j.get<double>(), 0.0};
    }
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        return {j[0].get<double>(), j[1].get<double>()};
    }
    throw SchemaError(path, "expected a number or [re, im]");
}

inline Ket parse_ket(const json &j, const std::string &path, Index dim) {
    if (!j.is_array()) {
        throw SchemaError(path, "expected an array of amplitudes");
    }
    if (static_cast<Index>(j.size()) != dim) {
        throw SchemaError(path, "expected " + std::to_string(dim) + " amplitudes, got " + std::to_string(j.size()));
    }
    Ket v(dim);
    for (Index i = 0; i < dim; ++i) {
        v(i) = parse_complex(j[i], path + "/" + std::to_string(i));
    }
    return v;
}

/// Row-major array of rows.
inline Op parse_matrix(const json &j, const std::string &path, Index dim) {
    if (!j.is_array() || static_cast<Index>(j.size()) != dim) {
        throw SchemaError(path, "expected " + std::to_string(dim) + " rows");
    }
    Op m(dim, dim);
    for (Index r = 0; r < dim; ++r) {
        const std::string rp = path + "/" + std::to_string(r);
        if (!j[r].is_array() || static_cast<Index>(j[r].size()) != dim) {
            throw SchemaError(rp, "expected " + std::to_string(dim) + " entries");
        }
        for (Index c = 0; c < dim; ++c) {
            m(r, c) = parse_complex(j[r][c], rp + "/" + std::to_string(c));
        }
    }
    return m;
}

/// {"matrix": ...} or {"eigenvalues": [...], "projectors": [...]}.
inline SpectralForm parse_observable(const json &j, const std::string &path, Index dim, const Tolerances &tol) {
    if (!j.is_object()) {
        throw SchemaError(path, "expected an object");
    }
    if (const json *m = optional_field(j, "matrix")) {
        return spectral_decompose(parse_matrix(*m, path + "/matrix", dim), tol);
    }
    const json &vals = field(j, path, "eigenvalues");
    const json &projs = field(j, path, "projectors");
    if (!vals.is_array() || !projs.is_array()) {
        throw SchemaError(path, "eigenvalues and projectors must be arrays");
    }
    std::vector<double> values;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        values.push_back(parse_real(vals[i], path + "/eigenvalues/" + std::to_string(i)));
    }
    std::vector<Op> projectors;
    for (std::size_t i = 0; i < projs.size(); ++i) {
        projectors.push_back(parse_matrix(projs[i], path + "/projectors/" + std::to_string(i), dim));
    }
    return make_spectral_form(std::move(values), std::move(projectors), tol);
}

inline json complex_json(cplx z) {
    return json::array({z.real(), z.imag()});
}

inline json ket_json(const Ket &v) {
    json a = json::array();
    for (Index i = 0; i < v.size(); ++i) {
        a.push_back(complex_json(v(i)));
    }
    return a;
}

inline json matrix_json(const Op &m) {
    json rows = json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Index c = 0; c < m.cols(); ++c) {
            row.push_back(complex_json(m(r, c)));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json observable_json(const SpectralForm &o) {
    json projs = json::array();
    for (const auto &p : o.projectors()) {
        projs.push_back(matrix_json(p));
    }
    return json{{"eigenvalues", o.eigenvalues()}, {"projectors", std::move(projs)}};
}

inline json verdict_json(const Verdict &v) {
    json w = nullptr;
    if (v.witness) {
        w = json{{"k", v.witness->k}, {"label", v.witness->label}};
    }
    return json{{"criterion", v.criterion}, {"status", to_string(v.status)}, {"residual", v.residual},
                {"tolerance", v.tolerance}, {"witness", std::move(w)}};
}

inline std::string fmt(const char *f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

}  // namespace scenario_io

// ---------------------------------------------------------------------------
// Running.

struct RunOptions {
    bool strict = false;
    std::optional<std::uint64_t> seed;
    double tol_scale = 1.0;
    std::optional<int> trials;
    /// Include wall time in the structured report. Off by default so that
    /// reports are byte-identical across runs.
    bool timing = false;
};

struct RunResult {
    json report;
    std::string text;
    int exit_code = 0;
};

namespace detail {

struct Check {
    std::string name;
    Status status = Status::Pass;
    std::string detail;
};

inline Status all_status(const std::vector<Verdict> &vs, Status want) {
    bool undecided = false;
    for (const auto &v : vs) {
        if (v.status == Status::Indeterminate) {
            undecided = true;
        } else if (v.status != want) {
            return Status::Fail;
        }
    }
    return undecided ? Status::Indeterminate : Status::Pass;
}

inline Status consistency_status(const std::vector<Verdict> &vs) {
    bool any_pass = false;
    bool any_fail = false;
    bool any_indet = false;
    for (const auto &v : vs) {
        any_pass = any_pass || v.status == Status::Pass;
        any_fail = any_fail || v.status == Status::Fail;
        any_indet = any_indet || v.status == Status::Indeterminate;
    }
    if (any_pass && any_fail) {
        return Status::Fail;
    }
    return any_indet ? Status::Indeterminate : Status::Pass;
}

inline Status threshold(double residual, double tol) {
    return residual <= tol ? Status::Pass : Status::Fail;
}

class ScenarioRunner {
   public:
    ScenarioRunner(const json &doc, const RunOptions &opts) : doc_(doc), run_(opts) {
        using namespace scenario_io;
        if (!doc_.is_object()) {
            throw SchemaError("", "scenario must be a JSON object");
        }
        const json &kind = field(doc_, "", "kind");
        if (!kind.is_string()) {
            throw SchemaError("/kind", "expected a string");
        }
        kind_ = kind.get<std::string>();
        static const char *kinds[] = {"verify-general", "verify-nd",   "classify",
                                      "overmeasure",    "distant",     "ready-subspace"};
        bool known = false;
        for (const char *k : kinds) {
            known = known || kind_ == k;
        }
        if (!known) {
            throw SchemaError("/kind", "unknown kind '" + kind_ + "'");
        }
        if (const json *n = optional_field(doc_, "name")) {
            if (!n->is_string()) {
                throw SchemaError("/name", "expected a string");
            }
            name_ = n->get<std::string>();
        }
        opts_.seed = 1;
        if (const json *s = optional_field(doc_, "seed")) {
            opts_.seed = parse_uint(*s, "/seed");
        }
        if (run_.seed) {
            opts_.seed = *run_.seed;
        }
        if (const json *t = optional_field(doc_, "trials")) {
            opts_.trials = static_cast<int>(parse_uint(*t, "/trials"));
        }
        if (run_.trials) {
            opts_.trials = *run_.trials;
        }
        if (!(run_.tol_scale > 0.0)) {
            throw Rejected("tolerance scale must be positive");
        }
        opts_.tol = Tolerances{}.scaled(run_.tol_scale);
        if (const json *e = optional_field(doc_, "expect")) {
            if (!e->is_object()) {
                throw SchemaError("/expect", "expected an object");
            }
            expect_ = *e;
        } else {
            expect_ = json::object();
        }
    }

    RunResult run() {
        const auto t0 = std::chrono::steady_clock::now();
        json body = json::object();
        if (kind_ == "distant") {
            run_distant(body);
        } else {
            load_bipartite();
            if (kind_ == "verify-general") {
                run_verify_general(body);
            } else if (kind_ == "verify-nd") {
                run_verify_nd(body);
            } else if (kind_ == "classify") {
                run_classify(body);
            } else if (kind_ == "overmeasure") {
                run_overmeasure(body);
            } else {
                run_ready_subspace(body);
            }
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return assemble(std::move(body), seconds);
    }

   private:
    const json &doc_;
    RunOptions run_;
    VerifyOptions opts_;
    std::string kind_;
    std::string name_ = "unnamed";
    json expect_;
    std::vector<Check> checks_;
    std::vector<std::string> lines_;

    std::optional<BipartiteDims> dims_;
    std::optional<SpectralForm> observable_;
    std::optional<MeasurementScheme> scheme_;

    void check(std::string name, Status s, std::string detail = {}) {
        checks_.push_back({std::move(name), s, std::move(detail)});
    }

    void line(const std::string &s) {
        lines_.push_back(s);
    }

    void verdict_lines(const std::vector<Verdict> &vs) {
        for (const auto &v : vs) {
            std::string s = "  " + v.criterion;
            s.resize(16, ' ');
            std::string st = to_string(v.status);
            st.resize(15, ' ');
            s += st + scenario_io::fmt("residual %-12.3e", v.residual) + "  " + v.form;
            if (v.witness) {
                s += "  [k=" + std::to_string(v.witness->k) + ", " + v.witness->label + "]";
            }
            line(s);
        }
    }

    /// Loads dims, observable, pointer, ready state and interaction on A (x) B.
    void load_bipartite(const std::string &a_key = "A", const std::string &b_key = "B") {
        using namespace scenario_io;
        const json &d = field(doc_, "", "dims");
        const Index da = parse_dim(field(d, "/dims", a_key), "/dims/" + a_key);
        const Index db = parse_dim(field(d, "/dims", b_key), "/dims/" + b_key);
        if (da * db > kMaxDim) {
            throw SchemaError("/dims", "composite dimension exceeds cap " + std::to_string(kMaxDim));
        }
        dims_ = BipartiteDims(da, db);
        observable_ = parse_observable(field(doc_, "", "observable"), "/observable", da, opts_.tol);
        SpectralForm pointer = parse_observable(field(doc_, "", "pointer"), "/pointer", db, opts_.tol);
        const json &inter = field(doc_, "", "interaction");
        if (kind_ == "ready-subspace") {
            scheme_.reset();
            interaction_only_ = parse_matrix(field(inter, "/interaction", "matrix"), "/interaction/matrix", da * db);
            pointer_only_ = std::move(pointer);
            return;
        }
        const Ket ready = parse_ket(field(doc_, "", "ready"), "/ready", db);
        if (const json *m = optional_field(inter, "matrix")) {
            Op u = parse_matrix(*m, "/interaction/matrix", da * db);
            scheme_.emplace(*dims_, ready, std::move(pointer), std::move(u), opts_.tol);
            return;
        }
        const json &a = field(inter, "/interaction", "assignment");
        if (!a.is_array()) {
            throw SchemaError("/interaction/assignment", "expected an array");
        }
        Assignment assignment;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const std::string p = "/interaction/assignment/" + std::to_string(i);
            assignment.push_back({parse_ket(field(a[i], p, "object"), p + "/object", da),
                                  parse_ket(field(a[i], p, "target"), p + "/target", da * db)});
        }
        bool nd = false;
        if (const json *f = optional_field(inter, "nondemolition")) {
            if (!f->is_boolean()) {
                throw SchemaError("/interaction/nondemolition", "expected a boolean");
            }
            nd = f->get<bool>();
        }
        scheme_.emplace(nd ? build_nondemolition(*observable_, pointer, ready, assignment, opts_.tol)
                           : build_premeasurement(*observable_, pointer, ready, assignment, opts_.tol));
    }

    std::optional<Op> interaction_only_;
    std::optional<SpectralForm> pointer_only_;

    std::optional<Ket> optional_input() {
        if (const json *p = scenario_io::optional_field(doc_, "phi")) {
            return scenario_io::parse_ket(*p, "/phi", dims_->a);
        }
        return std::nullopt;
    }

    std::optional<std::string> expected_outcome(const char *key) {
        if (const json *e = scenario_io::optional_field(expect_, key)) {
            if (!e->is_string() || (e->get<std::string>() != "pass" && e->get<std::string>() != "fail")) {
                throw SchemaError(std::string("/expect/") + key, "expected \"pass\" or \"fail\"");
            }
            return e->get<std::string>();
        }
        return std::nullopt;
    }

    void criteria_checks(const CriteriaReport &r, const char *expect_key, const char *what) {
        check(std::string(what) + " equivalence", consistency_status(r.verdicts));
        if (auto e = expected_outcome(expect_key)) {
            check(std::string(what) + " expected " + *e,
                  all_status(r.verdicts, *e == "pass" ? Status::Pass : Status::Fail));
        }
    }

    static json verdicts_json(const std::vector<Verdict> &vs) {
        json a = json::array();
        for (const auto &v : vs) {
            a.push_back(scenario_io::verdict_json(v));
        }
        return a;
    }

    void run_verify_general(json &body) {
        const CriteriaReport r = verify_all_general(*scheme_, *observable_, opts_);
        body["verdicts"] = verdicts_json(r.verdicts);
        body["equivalence_consistent"] = r.equivalence_consistent;
        line("general premeasurement criteria:");
        verdict_lines(r.verdicts);
        criteria_checks(r, "general", "general");
        if (auto phi = optional_input()) {
            if (r.cc_established) {
                const Verdict tr = check_time_reversal(*scheme_, *observable_, *phi, opts_);
                body["time_reversal"] = scenario_io::verdict_json(tr);
                verdict_lines({tr});
                check("time reversal", tr.status);
            } else {
                body["time_reversal"] = nullptr;
                line("  time reversal skipped: calibration condition does not hold");
            }
        }
    }

    void run_verify_nd(json &body) {
        const CriteriaReport r = verify_all_nd(*scheme_, *observable_, opts_);
        body["cc_established"] = r.cc_established;
        body["verdicts"] = verdicts_json(r.verdicts);
        body["equivalence_consistent"] = r.equivalence_consistent;
        line("nondemolition criteria:");
        verdict_lines(r.verdicts);
        if (!r.cc_established) {
            line("  note: calibration condition not established; verdicts are advisory");
        }
        criteria_checks(r, "nd", "nondemolition");
        if (auto phi = optional_input()) {
            const CoherenceReport c = coherence_report(*scheme_, *observable_, *phi, opts_);
            body["coherence"] = json{{"twin_established", c.twin_established},
                                     {"object_dephasing", c.object_dephasing},
                                     {"pointer_dephasing", c.pointer_dephasing},
                                     {"object_commutator", c.object_commutator},
                                     {"pointer_commutator", c.pointer_commutator}};
            line("coherence: max residual " + scenario_io::fmt("%.3e", c.max_residual()) +
                 (c.twin_established ? "" : " (twin relation not established)"));
            if (c.twin_established) {
                check("coherence", threshold(c.max_residual(), opts_.tol.op));
            }
        }
    }

    void run_classify(json &body) {
        const Classification c = classify(*scheme_, *observable_, opts_);
        const IdealReport ideal = is_ideal(*scheme_, *observable_, opts_);
        const DisentanglementReport dis = is_disentangled(*scheme_, *observable_, opts_);
        json branches = json::array();
        for (const auto &b : c.branches) {
            branches.push_back(json{{"k", b.k},
                                    {"class", to_string(b.kind)},
                                    {"nondemolition", b.nondemolition},
                                    {"disentangled", b.disentangled},
                                    {"ideal", b.ideal}});
        }
        body["cc_established"] = c.cc_established;
        body["class"] = to_string(c.kind);
        body["branches"] = std::move(branches);
        body["disentangled"] = dis.disentangled;
        body["ideal"] = json{{"canonical_form", ideal.canonical_form},
                             {"luders_form", ideal.luders_form},
                             {"sharp_form", ideal.sharp_form},
                             {"definitions_agree", ideal.definitions_agree()}};
        line("class " + std::string(to_string(c.kind)));
        for (const auto &b : c.branches) {
            line("  branch " + std::to_string(b.k) + ": " + to_string(b.kind) +
                 (b.nondemolition ? "  nondemolition" : "  demolition") +
                 (b.disentangled ? ", disentangled" : ", entangled") + (b.ideal ? ", ideal" : ""));
        }
        line(std::string("ideal definitions agree: ") + (ideal.definitions_agree() ? "yes" : "no"));
        if (dis.disentangled) {
            const StateTransformerSet t = extract_state_transformers(*scheme_, *observable_, opts_);
            json ms = json::array();
            for (const auto &m : t.transformers) {
                ms.push_back(scenario_io::matrix_json(m));
            }
            body["transformers"] = std::move(ms);
            body["transformer_completeness"] = t.completeness_residual;
            body["orthogonal_family"] = t.orthogonal_family;
        }
        check("calibration", c.cc_established ? Status::Pass : Status::Fail);
        check("ideal definitions agree", ideal.definitions_agree() ? Status::Pass : Status::Fail);
        if (const json *e = scenario_io::optional_field(expect_, "class")) {
            if (!e->is_string() || !parse_mclass(e->get<std::string>())) {
                throw SchemaError("/expect/class", "expected one of M11a, M11b, M12, M21, M22");
            }
            check("expected class " + e->get<std::string>(),
                  *parse_mclass(e->get<std::string>()) == c.kind ? Status::Pass : Status::Fail);
        }
    }

    void run_overmeasure(json &body) {
        using namespace scenario_io;
        const json &f = field(doc_, "", "function");
        const json &m = field(f, "/function", "mapping");
        const json &v = field(f, "/function", "values");
        if (!m.is_array() || !v.is_array()) {
            throw SchemaError("/function", "mapping and values must be arrays");
        }
        std::vector<std::size_t> mapping;
        for (std::size_t i = 0; i < m.size(); ++i) {
            mapping.push_back(parse_uint(m[i], "/function/mapping/" + std::to_string(i)));
        }
        std::vector<double> values;
        for (std::size_t i = 0; i < v.size(); ++i) {
            values.push_back(parse_real(v[i], "/function/values/" + std::to_string(i)));
        }
        const IndexFunction fn(std::move(mapping), std::move(values));
        const bool twin_before = verify_nd(*scheme_, *observable_, NdCriterion::Twin, opts_).pass();
        const Overmeasurement om = overmeasure(*scheme_, *observable_, fn, opts_);
        const CriteriaReport g = verify_all_general(om.scheme, om.observable, opts_);
        body["coarse_observable"] = observable_json(om.observable);
        body["general"] = verdicts_json(g.verdicts);
        line("coarse observable with " + std::to_string(om.observable.size()) + " eigenvalues");
        line("general criteria for the coarse observable:");
        verdict_lines(g.verdicts);
        check("coarse general", all_status(g.verdicts, Status::Pass));
        body["source_twin"] = twin_before;
        if (twin_before) {
            const CriteriaReport n = verify_all_nd(om.scheme, om.observable, opts_);
            body["nd"] = verdicts_json(n.verdicts);
            line("nondemolition criteria for the coarse observable:");
            verdict_lines(n.verdicts);
            check("coarse nondemolition", all_status(n.verdicts, Status::Pass));
        }
    }

    void run_ready_subspace(json &body) {
        const std::vector<Ket> basis = ready_subspace(*interaction_only_, *observable_, *pointer_only_, opts_.tol);
        json b = json::array();
        for (const auto &k : basis) {
            b.push_back(scenario_io::ket_json(k));
        }
        body["dimension"] = basis.size();
        body["basis"] = std::move(b);
        line("ready subspace dimension " + std::to_string(basis.size()));
        Status all = Status::Pass;
        for (const auto &k : basis) {
            const MeasurementScheme s(*dims_, k, *pointer_only_, *interaction_only_, opts_.tol);
            const Status st = all_status(verify_all_general(s, *observable_, opts_).verdicts, Status::Pass);
            if (st == Status::Fail || all == Status::Pass) {
                all = st;
            }
        }
        check("basis vectors are ready states", all);
        if (const json *e = scenario_io::optional_field(expect_, "dimension")) {
            const auto want = scenario_io::parse_uint(*e, "/expect/dimension");
            check("expected dimension " + std::to_string(want), want == basis.size() ? Status::Pass : Status::Fail);
        }
    }

    void run_distant(json &body) {
        using namespace scenario_io;
        const json &d = field(doc_, "", "dims");
        const Index d1 = parse_dim(field(d, "/dims", "A1"), "/dims/A1");
        const Index d2 = parse_dim(field(d, "/dims", "A2"), "/dims/A2");
        const Index db = parse_dim(field(d, "/dims", "B"), "/dims/B");
        if (d1 * d2 * db > kMaxDim) {
            throw SchemaError("/dims", "composite dimension exceeds cap " + std::to_string(kMaxDim));
        }
        const BipartiteDims pair(d1, d2);
        load_bipartite("A2", "B");
        const Ket phi = parse_ket(field(doc_, "", "state"), "/state", d1 * d2);
        Op u1 = identity(d1);
        if (const json *u = optional_field(doc_, "distant_unitary")) {
            u1 = parse_matrix(*u, "/distant_unitary", d1);
        }
        const SubsystemPremeasurement sp = subsystem_premeasure(phi, pair, *scheme_, u1, opts_.tol);
        body["no_influence_residual"] = sp.no_influence_residual;
        line("no-influence residual " + fmt("%.3e", sp.no_influence_residual));
        check("no influence on the distant subsystem", threshold(sp.no_influence_residual, opts_.tol.op));

        std::vector<std::size_t> outcomes;
        std::optional<std::size_t> chosen;
        if (const json *k = optional_field(doc_, "outcome")) {
            chosen = parse_uint(*k, "/outcome");
            if (*chosen >= observable_->size()) {
                throw SchemaError("/outcome", "outcome index out of range");
            }
            outcomes.push_back(*chosen);
        } else {
            for (std::size_t k = 0; k < observable_->size(); ++k) {
                outcomes.push_back(k);
            }
        }
        json outs = json::array();
        for (std::size_t k : outcomes) {
            const Ket near = tensor(identity(d1), observable_->projector(k)) * phi;
            if (!chosen && near.squaredNorm() <= opts_.tol.prob) {
                continue;
            }
            const DistantOutcome o = distant_state_after_complete(phi, pair, *scheme_, *observable_, u1, k, opts_);
            outs.push_back(json{{"k", k},
                                {"probability", o.probability},
                                {"state", matrix_json(o.state)},
                                {"theorem_residual", o.theorem_residual}});
            line("outcome " + std::to_string(k) + ": probability " + fmt("%.6f", o.probability) +
                 ", theorem residual " + fmt("%.3e", o.theorem_residual));
            check("distant state for outcome " + std::to_string(k), threshold(o.theorem_residual, opts_.tol.op));
            if (chosen) {
                if (const json *e = optional_field(expect_, "outcome_state")) {
                    const Ket want = parse_ket(*e, "/expect/outcome_state", d1);
                    const double r = (o.state - outer(want / want.norm())).norm();
                    body["expected_state_residual"] = r;
                    line("expected outcome state residual " + fmt("%.3e", r));
                    check("expected outcome state", threshold(r, opts_.tol.op));
                }
            }
        }
        body["outcomes"] = std::move(outs);

        const TwinResult tw = find_twin(phi, pair, *observable_, opts_.tol);
        json twin = json{{"found", tw.found}, {"residual", tw.residual}};
        if (tw.found) {
            json ps = json::array();
            for (const auto &p : tw.projectors) {
                ps.push_back(matrix_json(p));
            }
            twin["projectors"] = std::move(ps);
            twin["consequence_residual"] = tw.consequence_residual;
            check("twin consequence", threshold(tw.consequence_residual, opts_.tol.op));
        }
        body["twin"] = std::move(twin);
        line(std::string("twin on the distant subsystem: ") + (tw.found ? "found" : "none") + ", residual " +
             fmt("%.3e", tw.residual));
    }

    RunResult assemble(json body, double seconds) {
        RunResult r;
        bool failed = false;
        bool undecided = false;
        json checks = json::array();
        for (const auto &c : checks_) {
            failed = failed || c.status == Status::Fail;
            undecided = undecided || c.status == Status::Indeterminate;
            json cj{{"name", c.name}, {"status", to_string(c.status)}};
            if (!c.detail.empty()) {
                cj["detail"] = c.detail;
            }
            checks.push_back(std::move(cj));
        }
        r.exit_code = failed || (undecided && run_.strict) ? 1 : 0;

        r.report = json::object();
        r.report["scenario"] = name_;
        r.report["kind"] = kind_;
        r.report["seed"] = opts_.seed;
        r.report["trials"] = opts_.trials;
        r.report["strict"] = run_.strict;
        for (auto it = body.begin(); it != body.end(); ++it) {
            r.report[it.key()] = it.value();
        }
        r.report["checks"] = std::move(checks);
        r.report["exit_code"] = r.exit_code;
        if (run_.timing) {
            r.report["wall_time_s"] = seconds;
        }

        std::ostringstream os;
        os << "scenario " << name_ << " (" << kind_ << ", seed " << opts_.seed << ")\n";
        for (const auto &l : lines_) {
            os << l << "\n";
        }
        os << "checks:\n";
        for (const auto &c : checks_) {
            os << "  " << to_string(c.status) << "  " << c.name << "\n";
        }
        os << "result: " << (r.exit_code == 0 ? "ok" : "FAILED") << "  (" << scenario_io::fmt("%.3f", seconds)
           << " s)\n";
        r.text = os.str();
        return r;
    }
};

}  // namespace detail

/// Exit codes: 0 when every asserted check passes, 1 on a failed check
/// (or an indeterminate one under `strict`), 2 on a schema violation or a
/// rejected input.
inline RunResult run_scenario(const json &doc, const RunOptions &opts = {}) {
    try {
        detail::ScenarioRunner runner(doc, opts);
        return runner.run();
    } catch (const SchemaError &e) {
        RunResult r;
        r.exit_code = 2;
        r.report = json{{"error", "schema"}, {"path", e.path()}, {"message", e.what()}, {"exit_code", 2}};
        r.text = std::string("schema error at ") + e.what() + "\n";
        return r;
    } catch (const Rejected &e) {
        RunResult r;
        r.exit_code = 2;
        r.report = json{{"error", "rejected"}, {"message", e.what()}, {"residual", e.residual()}, {"exit_code", 2}};
        r.text = std::string("rejected: ") + e.what() + "\n";
        return r;
    }
}

// ---------------------------------------------------------------------------
// Fixture catalog.

inline json fixture_scenario(const Fixture &f) {
    using namespace scenario_io;
    json assignment = json::array();
    for (const auto &e : f.assignment) {
        assignment.push_back(json{{"object", ket_json(e.object)}, {"target", ket_json(e.target)}});
    }
    return json{{"kind", "classify"},
                {"name", f.name},
                {"seed", 1},
                {"dims", json{{"A", f.observable.dim()}, {"B", f.pointer.dim()}}},
                {"observable", observable_json(f.observable)},
                {"pointer", observable_json(f.pointer)},
                {"ready", ket_json(f.ready)},
                {"interaction", json{{"assignment", std::move(assignment)}, {"nondemolition", f.nondemolition}}},
                {"expect", json{{"class", to_string(f.expected)}}}};
}

/// Singlet on A1 (x) A2, z-spin measured on A2 by a two-level ideal scheme,
/// reading the "-" position.
inline json singlet_scenario() {
    using namespace scenario_io;
    const SpectralForm z = spin_z();
    const MeasurementScheme s = fixtures::ideal2(z);
    return json{{"kind", "distant"},
                {"name", "SINGLET_Z"},
                {"seed", 1},
                {"dims", json{{"A1", 2}, {"A2", 2}, {"B", 2}}},
                {"state", ket_json(singlet())},
                {"observable", observable_json(z)},
                {"pointer", observable_json(s.pointer())},
                {"ready", ket_json(s.ready())},
                {"interaction", json{{"matrix", matrix_json(s.interaction())}}},
                {"outcome", 1},
                {"expect", json{{"outcome_state", ket_json(spin_z_plus())}}}};
}

/// File name and document for every catalog entry.
inline std::vector<std::pair<std::string, json>> fixture_catalog() {
    std::vector<std::pair<std::string, json>> out;
    for (const auto &f : fixtures::canonical()) {
        std::string file = f.name;
        for (auto &ch : file) {
            ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        }
        out.emplace_back(file + ".json", fixture_scenario(f));
    }
    out.emplace_back("singlet_distant.json", singlet_scenario());
    return out;
}

}  // namespace premeas
