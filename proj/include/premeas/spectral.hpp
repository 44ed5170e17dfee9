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
#include <string>
#include <utility>
#include <vector>

namespace premeas {

/// A discrete observable: distinct eigenvalues paired with mutually
/// orthogonal, nonzero projectors that sum to the identity.
///
/// Eigenvalues are carried for reporting only. Every criterion in the
/// toolkit works on the indexed projectors.
class SpectralForm {
   public:
    SpectralForm() = default;

    const std::vector<double> &eigenvalues() const {
        return eigenvalues_;
    }
    const std::vector<Op> &projectors() const {
        return projectors_;
    }
    const Op &projector(std::size_t k) const {
        return projectors_.at(k);
    }
    double eigenvalue(std::size_t k) const {
        return eigenvalues_.at(k);
    }
    std::size_t size() const {
        return projectors_.size();
    }
    Index dim() const {
        return projectors_.empty() ? 0 : projectors_[0].rows();
    }
    Index rank(std::size_t k) const {
        return projector_rank(projectors_.at(k));
    }
    /// sum_k o_k E^k
    Op matrix() const {
        Op m = Op::Zero(dim(), dim());
        for (std::size_t k = 0; k < size(); ++k) {
            m += eigenvalues_[k] * projectors_[k];
        }
        return m;
    }
    /// Set by spectral_decompose when two eigenvalues were merged although
    /// their gap exceeded the operator tolerance.
    bool ill_conditioned_grouping() const {
        return ill_conditioned_;
    }

   private:
    SpectralForm(std::vector<double> values, std::vector<Op> projectors, bool ill_conditioned)
        : eigenvalues_(std::move(values)), projectors_(std::move(projectors)), ill_conditioned_(ill_conditioned) {
    }

    std::vector<double> eigenvalues_;
    std::vector<Op> projectors_;
    bool ill_conditioned_ = false;

    friend SpectralForm make_spectral_form(std::vector<double>, std::vector<Op>, const Tolerances &);
    friend SpectralForm spectral_decompose(const Op &, const Tolerances &);
};

/// Validates and assembles a spectral form.
inline SpectralForm make_spectral_form(std::vector<double> eigenvalues, std::vector<Op> projectors,
                                       const Tolerances &tol = {}) {
    if (eigenvalues.size() != projectors.size()) {
        throw Rejected("spectral form: " + std::to_string(eigenvalues.size()) + " eigenvalues but " +
                       std::to_string(projectors.size()) + " projectors");
    }
    if (projectors.empty()) {
        throw Rejected("spectral form: no projectors");
    }
    const Index dim = projectors[0].rows();
    if (dim <= 0 || dim > kMaxDim) {
        throw Rejected("spectral form: bad dimension " + std::to_string(dim));
    }
    for (std::size_t k = 0; k < projectors.size(); ++k) {
        if (projectors[k].rows() != dim || projectors[k].cols() != dim) {
            throw Rejected("spectral form: projector " + std::to_string(k) + " has inconsistent dimension");
        }
        if (!std::isfinite(eigenvalues[k])) {
            throw Rejected("spectral form: eigenvalue " + std::to_string(k) + " is not finite");
        }
        for (std::size_t j = 0; j < k; ++j) {
            if (std::abs(eigenvalues[k] - eigenvalues[j]) <= tol.grouping) {
                throw Rejected("spectral form: duplicate eigenvalue at indices " + std::to_string(j) + " and " +
                               std::to_string(k));
            }
        }
    }
    Op sum = Op::Zero(dim, dim);
    for (std::size_t k = 0; k < projectors.size(); ++k) {
        const double pd = projector_defect(projectors[k]);
        if (pd > tol.op) {
            throw Rejected("spectral form: operator " + std::to_string(k) + " is not a projector", pd);
        }
        if (projectors[k].trace().real() < 0.5) {
            throw Rejected("spectral form: projector " + std::to_string(k) + " is zero");
        }
        for (std::size_t j = 0; j < k; ++j) {
            const double ov = (projectors[j] * projectors[k]).norm();
            if (ov > tol.op) {
                throw Rejected("spectral form: projectors " + std::to_string(j) + " and " + std::to_string(k) +
                                   " are not orthogonal",
                               ov);
            }
        }
        sum += projectors[k];
    }
    const double completeness = (sum - identity(dim)).norm();
    if (completeness > tol.op) {
        throw Rejected("spectral form: projectors do not sum to the identity", completeness);
    }
    return SpectralForm(std::move(eigenvalues), std::move(projectors), false);
}

/// Spectral form of a Hermitian operator, eigenvalues in descending order.
/// Consecutive eigenvalues within `tol.grouping` share one projector, built
/// by summing the rank-1 spectral projectors of the group.
inline SpectralForm spectral_decompose(const Op &h, const Tolerances &tol = {}) {
    if (h.rows() != h.cols() || h.rows() == 0) {
        throw Rejected("spectral_decompose: operator must be square and non-empty");
    }
    const double hd = hermitian_defect(h);
    if (hd > tol.op) {
        throw Rejected("spectral_decompose: operator is not Hermitian", hd);
    }
    const Op herm = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<Op> solver(herm);
    const Eigen::VectorXd &w = solver.eigenvalues();
    const Op &v = solver.eigenvectors();
    const Index n = h.rows();

    std::vector<double> values;
    std::vector<Op> projectors;
    bool ill = false;
    Index i = n - 1;
    while (i >= 0) {
        Index j = i;
        double sum = w(i);
        Op proj = v.col(i) * v.col(i).adjoint();
        while (j - 1 >= 0 && w(j) - w(j - 1) <= tol.grouping) {
            if (w(j) - w(j - 1) > tol.op) {
                ill = true;
            }
            --j;
            sum += w(j);
            proj += v.col(j) * v.col(j).adjoint();
        }
        values.push_back(sum / static_cast<double>(i - j + 1));
        projectors.push_back(std::move(proj));
        i = j - 1;
    }
    SpectralForm sf = make_spectral_form(std::move(values), std::move(projectors), tol);
    sf.ill_conditioned_ = ill;
    return sf;
}

}  // namespace premeas
