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

#include "premeas/spectral.hpp"

#include <string>
#include <vector>

namespace premeas {

/// A function of an observable, given extensionally on eigenvalue indices:
/// source index k goes to target index l = f(k). Only the induced partition
/// of indices matters; `values` holds the eigenvalues attached to the
/// targets.
class IndexFunction {
   public:
    IndexFunction(std::vector<std::size_t> mapping, std::vector<double> values)
        : mapping_(std::move(mapping)), values_(std::move(values)) {
        std::vector<bool> hit(values_.size(), false);
        for (std::size_t k = 0; k < mapping_.size(); ++k) {
            if (mapping_[k] >= values_.size()) {
                throw Rejected("index function: source " + std::to_string(k) + " maps to " +
                               std::to_string(mapping_[k]) + " outside the " + std::to_string(values_.size()) +
                               " targets");
            }
            hit[mapping_[k]] = true;
        }
        for (std::size_t l = 0; l < hit.size(); ++l) {
            if (!hit[l]) {
                throw Rejected("index function: target " + std::to_string(l) + " has an empty preimage");
            }
        }
    }

    /// Identity on n indices with values 0..n-1.
    static IndexFunction identity(std::size_t n) {
        std::vector<std::size_t> m(n);
        std::vector<double> v(n);
        for (std::size_t k = 0; k < n; ++k) {
            m[k] = k;
            v[k] = static_cast<double>(k);
        }
        return IndexFunction(std::move(m), std::move(v));
    }

    std::size_t operator()(std::size_t k) const {
        return mapping_.at(k);
    }
    std::size_t source_size() const {
        return mapping_.size();
    }
    std::size_t target_size() const {
        return values_.size();
    }
    const std::vector<std::size_t> &mapping() const {
        return mapping_;
    }
    const std::vector<double> &values() const {
        return values_;
    }
    std::vector<std::size_t> preimage(std::size_t l) const {
        std::vector<std::size_t> out;
        for (std::size_t k = 0; k < mapping_.size(); ++k) {
            if (mapping_[k] == l) {
                out.push_back(k);
            }
        }
        return out;
    }
    bool injective() const {
        return source_size() == target_size();
    }

   private:
    std::vector<std::size_t> mapping_;
    std::vector<double> values_;
};

/// g after f. Target values are g's.
inline IndexFunction compose(const IndexFunction &g, const IndexFunction &f) {
    if (g.source_size() != f.target_size()) {
        throw Rejected("compose: g is not defined on the targets of f");
    }
    std::vector<std::size_t> m(f.source_size());
    for (std::size_t k = 0; k < m.size(); ++k) {
        m[k] = g(f(k));
    }
    return IndexFunction(std::move(m), g.values());
}

namespace detail {

inline SpectralForm merge_projectors(const SpectralForm &o, const IndexFunction &f, std::vector<double> values,
                                     const Tolerances &tol) {
    if (f.source_size() != o.size()) {
        throw Rejected("index function is not total: defined on " + std::to_string(f.source_size()) +
                       " indices, observable has " + std::to_string(o.size()));
    }
    if (values.size() != f.target_size()) {
        throw Rejected("expected " + std::to_string(f.target_size()) + " target values, got " +
                       std::to_string(values.size()));
    }
    std::vector<Op> projectors(f.target_size(), Op::Zero(o.dim(), o.dim()));
    for (std::size_t k = 0; k < o.size(); ++k) {
        projectors[f(k)] += o.projector(k);
    }
    return make_spectral_form(std::move(values), std::move(projectors), tol);
}

}  // namespace detail

/// f(O): the projector of target l is the sum of E^k over k in f^-1(l).
inline SpectralForm apply_function(const SpectralForm &o, const IndexFunction &f, const Tolerances &tol = {}) {
    return detail::merge_projectors(o, f, f.values(), tol);
}

/// Coarsened pointer observable with freely chosen distinct eigenvalues.
inline SpectralForm coarsen_pointer(const SpectralForm &p, const IndexFunction &f, std::vector<double> target_values,
                                    const Tolerances &tol = {}) {
    return detail::merge_projectors(p, f, std::move(target_values), tol);
}

}  // namespace premeas
