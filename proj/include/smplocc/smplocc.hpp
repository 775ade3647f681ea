// Copyright 2026 The smplocc Authors
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

// Umbrella header.

#pragma once

#include "smplocc/errors.hpp"
#include "smplocc/fingerprints.hpp"
#include "smplocc/harness/experiments.hpp"
#include "smplocc/linalg.hpp"
#include "smplocc/measurements.hpp"
#include "smplocc/protocols/equality.hpp"
#include "smplocc/protocols/hidden_matching.hpp"
#include "smplocc/protocols/locc.hpp"
#include "smplocc/random.hpp"
#include "smplocc/rng.hpp"
#include "smplocc/transforms/hybrid.hpp"
#include "smplocc/transforms/newman.hpp"
#include "smplocc/transforms/replace_message.hpp"
#include "smplocc/transforms/union_bound.hpp"
#include "smplocc/transforms/value_table.hpp"
