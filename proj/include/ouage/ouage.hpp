// Copyright 2026 The ouage Authors.
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

#ifndef OUAGE_OUAGE_HPP
#define OUAGE_OUAGE_HPP

#include "ouage/channel.hpp"
#include "ouage/csv.hpp"
#include "ouage/end_to_end.hpp"
#include "ouage/experiments.hpp"
#include "ouage/penalty.hpp"
#include "ouage/policy_fr.hpp"
#include "ouage/policy_iir.hpp"
#include "ouage/quantizer.hpp"
#include "ouage/rng.hpp"
#include "ouage/run_config.hpp"
#include "ouage/sim.hpp"
#include "ouage/svg.hpp"

#endif  // OUAGE_OUAGE_HPP
