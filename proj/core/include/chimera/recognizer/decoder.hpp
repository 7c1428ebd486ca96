// Copyright 2026 The Chimera Authors
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

#pragma once

#include <string>
#include <vector>

#include "chimera/dsp.hpp"
#include "chimera/recognizer/acoustic_model.hpp"
#include "chimera/recognizer/phone_lm.hpp"

namespace chimera {

enum class EarlyExit {
  kAuto,    // only for inputs shorter than one full phone (3 frames)
  kAlways,
  kNever,
};

struct DecodeOptions {
  double lm_weight = 1.0;
  double insertion_penalty = 0.0;  // log-domain, added per hypothesised phone
  EarlyExit early_exit = EarlyExit::kAuto;
};

// Viterbi search over a phone loop whose phone-to-phone transitions are
// scored by the n-gram model. Ties resolve to the lowest phone index.
std::vector<std::string> ViterbiDecode(const AcousticModel& model, const PhoneLm& lm,
                                       const FeatureMatrix& features,
                                       const DecodeOptions& options = {},
                                       double* best_score = nullptr);

}  // namespace chimera
