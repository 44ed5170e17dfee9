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

#include <cstdint>
#include <random>
#include <vector>

namespace premeas {

using Rng = std::mt19937_64;

inline Op random_gaussian(Index rows, Index cols, Rng &rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Op m(rows, cols);
    for (Index j = 0; j < cols; ++j) {
        for (Index i = 0; i < rows; ++i) {
            const double re = g(rng);
            const double im = g(rng);
            m(i, j) = cplx(re, im);
        }
    }
    return m;
}

inline Ket random_ket(Index dim, Rng &rng) {
    Ket v = random_gaussian(dim, 1, rng).col(0);
    return v / v.norm();
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
/// of R's diagonal moved into Q.
inline Op random_unitary(Index dim, Rng &rng) {
    const Op z = random_gaussian(dim, dim, rng);
    Eigen::HouseholderQR<Op> qr(z);
    Op q = qr.householderQ() * identity(dim);
    const Op r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index j = 0; j < dim; ++j) {
        const double a = std::abs(r(j, j));
        if (a > 0.0) {
            q.col(j) *= r(j, j) / a;
        }
    }
    return q;
}

inline Op random_hermitian(Index dim, Rng &rng) {
    const Op g = random_gaussian(dim, dim, rng);
    return 0.5 * (g + g.adjoint());
}

/// Random observable on C^dim with the given projector ranks; eigenvalues
/// are 0, 1, 2, ... in index order.
inline SpectralForm random_observable(Index dim, const std::vector<Index> &ranks, Rng &rng) {
    Index total = 0;
    for (Index r : ranks) {
        if (r <= 0) {
            throw Rejected("random_observable: ranks must be positive");
        }
        total += r;
    }
    if (total != dim) {
        throw Rejected("random_observable: ranks do not sum to the dimension");
    }
    const Op u = random_unitary(dim, rng);
    std::vector<double> values;
    std::vector<Op> projectors;
    Index col = 0;
    for (std::size_t k = 0; k < ranks.size(); ++k) {
        const Op block = u.middleCols(col, ranks[k]);
        Op p = block * block.adjoint();
        p = 0.5 * (p + p.adjoint());
        projectors.push_back(p);
        values.push_back(static_cast<double>(k));
        col += ranks[k];
    }
    return make_spectral_form(std::move(values), std::move(projectors));
}

/// Random partition of `dim` into `parts` positive ranks.
inline std::vector<Index> random_ranks(Index dim, Index parts, Rng &rng) {
    if (parts <= 0 || parts > dim) {
        throw Rejected("random_ranks: need 1 <= parts <= dim");
    }
    std::vector<Index> ranks(parts, 1);
    std::uniform_int_distribution<Index> pick(0, parts - 1);
    for (Index extra = dim - parts; extra > 0; --extra) {
        ++ranks[pick(rng)];
    }
    return ranks;
}

/// `count` unit kets drawn from one seeded stream.
inline std::vector<Ket> sample_inputs(Index dim, int count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Ket> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        out.push_back(random_ket(dim, rng));
    }
    return out;
}

/// Deterministic probes whose projectors span all operators on C^dim:
/// basis kets, then (|i> + |j>)/sqrt2 and (|i> + i|j>)/sqrt2 for i < j.
inline std::vector<Ket> polarization_probes(Index dim) {
    std::vector<Ket> out;
    for (Index i = 0; i < dim; ++i) {
        out.push_back(basis_ket(dim, i));
    }
    const double s = 1.0 / std::sqrt(2.0);
    for (Index i = 0; i < dim; ++i) {
        for (Index j = i + 1; j < dim; ++j) {
            Ket a = Ket::Zero(dim);
            a(i) = s;
            a(j) = s;
            out.push_back(a);
            Ket b = Ket::Zero(dim);
            b(i) = s;
            b(j) = cplx(0.0, s);
            out.push_back(b);
        }
    }
    return out;
}

}  // namespace premeas
