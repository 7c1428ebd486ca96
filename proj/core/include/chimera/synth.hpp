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

#include <cstdint>
#include <string>
#include <vector>

#include "chimera/annotations.hpp"
#include "chimera/waveform.hpp"

namespace chimera {

enum class Gender { kMale, kFemale };

char GenderLetter(Gender g);  // 'M' / 'F'

// Source-filter voice. Formant, frication and burst frequencies all scale
// with `tract_scale` (shorter vocal tract -> higher resonances).
struct SpeakerProfile {
  std::string id;  // TIMIT style, e.g. "mabc0"
  Gender gender = Gender::kMale;
  double f0_hz = 115.0;
  double tract_scale = 1.0;
  double rate = 1.0;  // > 1 speaks faster
  double level = 0.3;
  double breathiness = 0.02;
};

SpeakerProfile RandomSpeaker(Gender gender, const std::string& id, uint64_t seed);

struct SynthUtterance {
  Waveform wave;
  PhoneTier tier;
};

// Renders a phone sequence (labels from the builtin inventory) at 16 kHz.
SynthUtterance SynthesizeUtterance(const std::vector<std::string>& phones,
                                   const SpeakerProfile& speaker, uint64_t seed);

// Canonical phone sequence of a synthetic sentence: h# words... h#.
std::vector<std::string> GenerateSentence(uint64_t seed);
// Speaker-specific pronunciation: optional pauses between words and
// occasionally dropped stop releases.
std::vector<std::string> RealizeSentence(const std::vector<std::string>& canonical, uint64_t seed);

struct SynthCorpusOptions {
  uint64_t seed = 1;
  std::size_t train_sentences = 40;
  std::size_t test_sentences = 24;
  std::size_t train_speakers_per_gender = 40;
  std::size_t test_speakers_per_gender = 8;
  std::size_t sentences_per_speaker = 5;
  // Test sentences at the end of the pool read by one gender only.
  std::size_t single_gender_test_sentences = 2;
};

struct SynthCorpusSummary {
  std::size_t train_male = 0;
  std::size_t train_female = 0;
  std::size_t test_male = 0;
  std::size_t test_female = 0;
};

// Writes <root>/{train,test}/dr1/<speaker>/sx<N>.{wav,phn}.
SynthCorpusSummary WriteSynthCorpus(const std::string& root, const SynthCorpusOptions& options);

}  // namespace chimera
