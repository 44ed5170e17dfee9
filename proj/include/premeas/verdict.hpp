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

#include "premeas/linalg.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace premeas {

enum class Status { Pass, Fail, Indeterminate };

inline const char *to_string(Status s) {
    switch (s) {
        case Status::Pass:
            return "pass";
        case Status::Fail:
            return "fail";
        case Status::Indeterminate:
            return "indeterminate";
    }
    return "?";
}

/// How a residual relates to a state perturbation of size d. Linear
/// residuals grow like d, quadratic ones (complementary probabilities) like
/// d^2 and are judged against squared thresholds.
enum class Scale { Linear, Quadratic };

struct Witness {
    std::size_t k = 0;
    std::string label;
};

struct Verdict {
    std::string criterion;
    /// Short description of the form being tested, for text reports.
    std::string form;
    Status status = Status::Pass;
    double residual = 0.0;
    double tolerance = 0.0;
    Scale scale = Scale::Linear;
    std::optional<Witness> witness;

    bool pass() const {
        return status == Status::Pass;
    }
    /// Residual on the amplitude scale shared by all criteria.
    double amplitude() const {
        return scale == Scale::Quadratic ? std::sqrt(std::max(residual, 0.0)) : residual;
    }
    /// True when the amplitude lies outside the indeterminate band.
    bool outside_band(const Tolerances &tol) const {
        const double a = amplitude();
        return a < tol.band_lo || a > tol.band_hi;
    }
};

/// Pass at or below `tolerance`; fail above the band's upper edge; anything
/// in between is indeterminate.
inline Status judge(double residual, double tolerance, Scale scale, const Tolerances &tol) {
    const double hi = scale == Scale::Quadratic ? tol.band_hi * tol.band_hi : tol.band_hi;
    if (!std::isfinite(residual)) {
        return Status::Fail;
    }
    if (residual <= tolerance) {
        return Status::Pass;
    }
    if (residual > hi) {
        return Status::Fail;
    }
    return Status::Indeterminate;
}

/// All verdicts pass or all fail.
inline bool consistent(const std::vector<Verdict> &verdicts) {
    if (verdicts.empty()) {
        return true;
    }
    const Status first = verdicts.front().status;
    if (first == Status::Indeterminate) {
        return false;
    }
    for (const auto &v : verdicts) {
        if (v.status != first) {
            return false;
        }
    }
    return true;
}

inline bool all_outside_band(const std::vector<Verdict> &verdicts, const Tolerances &tol) {
    for (const auto &v : verdicts) {
        if (!v.outside_band(tol)) {
            return false;
        }
    }
    return true;
}

inline bool all_pass(const std::vector<Verdict> &verdicts) {
    for (const auto &v : verdicts) {
        if (!v.pass()) {
            return false;
        }
    }
    return true;
}

struct VerifyOptions {
    Tolerances tol;
    /// Random inputs in the sampling layer.
    int trials = 50;
    std::uint64_t seed = 1;
    /// Extra randomized pointer eigenbases for the expansion criteria.
    int eigenbasis_trials = 10;
};

struct CriteriaReport {
    std::vector<Verdict> verdicts;
    bool equivalence_consistent = false;
    /// Set when the report was computed for a scheme whose calibration
    /// condition did not pass.
    bool cc_established = true;

    const Verdict &at(const std::string &criterion) const {
        for (const auto &v : verdicts) {
            if (v.criterion == criterion) {
                return v;
            }
        }
        throw std::out_of_range("no verdict for " + criterion);
    }
};

namespace detail {

/// Running maximum of a residual together with the place it occurred.
struct MaxTracker {
    double value = 0.0;
    std::optional<Witness> where;

    void offer(double r, std::size_t k, const std::string &label) {
        if (!(r <= value)) {
            value = r;
            where = Witness{k, label};
        }
    }
};

inline Verdict make_verdict(std::string criterion, std::string form, const MaxTracker &m, double tolerance,
                            Scale scale, const Tolerances &tol) {
    Verdict v;
    v.criterion = std::move(criterion);
    v.form = std::move(form);
    v.residual = m.value;
    v.tolerance = tolerance;
    v.scale = scale;
    v.status = judge(m.value, tolerance, scale, tol);
    if (v.status != Status::Pass) {
        v.witness = m.where;
    }
    return v;
}

}  // namespace detail

}  // namespace premeas
