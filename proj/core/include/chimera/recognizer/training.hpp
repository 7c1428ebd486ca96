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

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "chimera/annotations.hpp"
#include "chimera/dsp.hpp"
#include "chimera/recognizer/acoustic_model.hpp"

namespace chimera {

// Features plus the reference phone sequence. `spans` (frame ranges per
// phone, same length as `phones`) seeds the flat start; phones whose span is
// empty are still part of the reference.
struct TrainUtterance {
  std::string id;
  FeatureMatrix features;
  std::vector<std::string> phones;
  std::vector<std::pair<std::size_t, std::size_t>> spans;
};

// Assigns every frame to the phone covering its centre sample.
std::vector<std::pair<std::size_t, std::size_t>> TierToFrameSpans(const PhoneTier& tier,
                                                                  std::size_t n_frames,
                                                                  std::size_t frame_hop,
                                                                  std::size_t frame_len);

struct FlatStartOptions {
  std::size_t gaussian_budget = 1000;
  double var_floor_fraction = 1e-3;  // of the global per-dimension variance
  double initial_self_loop = 0.75;
  // Phones that must be modelled even when absent from the corpus.
  std::vector<std::string> extra_phones;
};

AcousticModel FlatStart(const std::vector<TrainUtterance>& corpus,
                        const FlatStartOptions& options = {});

struct StateAlignment {
  std::vector<std::size_t> phone;  // model phone index per frame
  std::vector<std::size_t> state;  // 0..2 per frame
  std::vector<std::size_t> position;  // index into the expanded state chain
  double log_likelihood = 0.0;
};

// Viterbi alignment against a known phone sequence. Uses the strict
// 3-frame-minimum topology when the utterance is long enough, otherwise lets
// phones exit from any state.
StateAlignment ForcedAlign(const AcousticModel& model, const FeatureMatrix& features,
                           const std::vector<std::size_t>& phone_ids);

struct MixupStep {
  std::size_t after_iteration = 0;  // split happens after this (1-based) iteration
  std::size_t target_total = 0;
};

struct TrainOptions {
  std::size_t iterations = 10;
  std::vector<MixupStep> mixup;
  double min_component_occupancy = 1e-6;
  double min_self_loop = 0.01;
  double max_self_loop = 0.99;
  std::size_t jobs = 1;
};

// Spreads growth from the current mixture count to `budget` evenly over the
// first two thirds of the iterations.
std::vector<MixupStep> LinearMixupSchedule(std::size_t iterations, std::size_t initial_total,
                                           std::size_t budget);

struct IterationStats {
  std::size_t iteration = 0;
  double log_likelihood = 0.0;  // total forced-alignment score before re-estimation
  std::size_t frames = 0;
  std::size_t num_gaussians = 0;  // mixture count the score was computed with
};

struct TrainReport {
  std::vector<IterationStats> trace;
  std::vector<std::string> warnings;
};

AcousticModel TrainEm(AcousticModel model, const std::vector<TrainUtterance>& corpus,
                      const TrainOptions& options, TrainReport* report = nullptr);

// Splits mixture components (largest weight first) until the model holds
// `target_total` Gaussians, allocating by state occupancy^0.2.
void MixUp(AcousticModel& model, std::size_t target_total,
           const std::vector<std::vector<double>>& occupancy);

}  // namespace chimera
