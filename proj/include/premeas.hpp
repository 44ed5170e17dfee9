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
#include "premeas/fixtures.hpp"
#include "premeas/kinds.hpp"
#include "premeas/linalg.hpp"
#include "premeas/observables.hpp"
#include "premeas/random.hpp"
#include "premeas/scheme.hpp"
#include "premeas/spectral.hpp"
#include "premeas/verdict.hpp"
#include "premeas/verify_general.hpp"
#include "premeas/verify_nd.hpp"
