// Copyright 2026 The manoma Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Umbrella header for the optimization library. The harness and verification
// suites (harness.hpp, verify.hpp) are included separately; harness.hpp needs
// CLI11 and nlohmann/json.

#ifndef MANOMA_MANOMA_HPP
#define MANOMA_MANOMA_HPP

#include "manoma/benchmarks.hpp"
#include "manoma/channel.hpp"
#include "manoma/conic.hpp"
#include "manoma/frcalc.hpp"
#include "manoma/ga.hpp"
#include "manoma/orchestrator.hpp"
#include "manoma/problems.hpp"
#include "manoma/rates.hpp"
#include "manoma/stage_one.hpp"

#endif  // MANOMA_MANOMA_HPP
