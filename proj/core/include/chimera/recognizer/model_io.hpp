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
#include <string_view>

#include "chimera/dsp.hpp"
#include "chimera/recognizer/acoustic_model.hpp"
#include "chimera/recognizer/phone_lm.hpp"

namespace chimera {

inline constexpr int kModelFormatVersion = 1;

// Acoustic model, phone LM and the front-end settings they were trained with.
struct RecognizerModel {
  std::string name;
  AcousticModel acoustic;
  PhoneLm lm;
  MfccConfig features;
};

// JSON document, layout described in docs/formats.md.
std::string SerializeModel(const RecognizerModel& model);
RecognizerModel DeserializeModel(std::string_view text);

void SaveModel(const std::string& path, const RecognizerModel& model);
RecognizerModel LoadModel(const std::string& path);

}  // namespace chimera
