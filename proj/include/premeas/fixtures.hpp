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

#include "premeas/distant.hpp"
#include "premeas/kinds.hpp"

#include <string>
#include <vector>

namespace premeas {

/// A named scheme together with the observable it is meant to measure.
struct Fixture {
    std::string name;
    SpectralForm observable;
    SpectralForm pointer;
    Ket ready;
    Assignment assignment;
    bool nondemolition = false;
    MClass expected;

    MeasurementScheme scheme() const {
        return nondemolition ? build_nondemolition(observable, pointer, ready, assignment)
                             : build_premeasurement(observable, pointer, ready, assignment);
    }
};

namespace fixtures {

inline Op diag_projector(Index dim, std::initializer_list<Index> on) {
    Op p = Op::Zero(dim, dim);
    for (Index i : on) {
        p(i, i) = 1.0;
    }
    return p;
}

inline Ket ket2(Index da, Index db, Index a, Index b) {
    return tensor(basis_ket(da, a), basis_ket(db, b));
}

/// E = {|0>,|1>} with value +1 and {|2>} with value -1 on C^3.
inline SpectralForm observable_3() {
    return make_spectral_form({1.0, -1.0}, {diag_projector(3, {0, 1}), diag_projector(3, {2})});
}

inline SpectralForm pointer_2() {
    return make_spectral_form({0.0, 1.0}, {diag_projector(2, {0}), diag_projector(2, {1})});
}

inline SpectralForm pointer_3() {
    return make_spectral_form({0.0, 1.0}, {diag_projector(3, {0, 1}), diag_projector(3, {2})});
}

inline Fixture ideal3() {
    Fixture f{"S_IDEAL3", observable_3(), pointer_2(), basis_ket(2, 0), {}, false, MClass::M11a};
    f.assignment = {{basis_ket(3, 0), ket2(3, 2, 0, 0)},
                    {basis_ket(3, 1), ket2(3, 2, 1, 0)},
                    {basis_ket(3, 2), ket2(3, 2, 2, 1)}};
    return f;
}

inline Fixture demo3() {
    Fixture f = ideal3();
    f.name = "S_DEMO3";
    f.expected = MClass::M21;
    f.assignment[2].target = (ket2(3, 2, 0, 1) + ket2(3, 2, 1, 1)) / std::sqrt(2.0);
    return f;
}

inline Fixture nd_rot() {
    Fixture f = ideal3();
    f.name = "S_ND_ROT";
    f.expected = MClass::M11b;
    f.assignment[0].target = ket2(3, 2, 1, 0);
    f.assignment[1].target = ket2(3, 2, 0, 0);
    return f;
}

inline Fixture nd_ent() {
    Fixture f{"S_ND_ENT", observable_3(), pointer_3(), basis_ket(3, 0), {}, true, MClass::M12};
    f.assignment = {{basis_ket(3, 0), ket2(3, 3, 0, 0)},
                    {basis_ket(3, 1), ket2(3, 3, 1, 1)},
                    {basis_ket(3, 2), ket2(3, 3, 2, 2)}};
    return f;
}

inline Fixture demo_ent() {
    Fixture f = nd_ent();
    f.name = "S_DEMO_ENT";
    f.expected = MClass::M22;
    f.nondemolition = false;
    f.assignment[1].target = ket2(3, 3, 2, 1);
    return f;
}

/// Branch 0 ideal, branch 1 demolishing and entangling.
inline Fixture mixed() {
    const SpectralForm o = make_spectral_form({1.0, -1.0}, {diag_projector(3, {0}), diag_projector(3, {1, 2})});
    const SpectralForm p = make_spectral_form({0.0, 1.0}, {diag_projector(3, {0}), diag_projector(3, {1, 2})});
    Fixture f{"S_MIXED", o, p, basis_ket(3, 0), {}, false, MClass::M22};
    f.assignment = {{basis_ket(3, 0), ket2(3, 3, 0, 0)},
                    {basis_ket(3, 1), ket2(3, 3, 0, 1)},
                    {basis_ket(3, 2), ket2(3, 3, 1, 2)}};
    return f;
}

/// The five canonical fixtures in reading order of their classes.
inline std::vector<Fixture> canonical() {
    return {ideal3(), nd_rot(), nd_ent(), demo3(), demo_ent()};
}

/// Two-level ideal scheme for `o` with rank-1 pointer positions |0>, |1>.
inline MeasurementScheme ideal2(const SpectralForm &o) {
    return build_ideal(o, spin_z(), basis_ket(2, 0));
}

}  // namespace fixtures

}  // namespace premeas
