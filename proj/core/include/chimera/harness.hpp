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
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chimera/annotations.hpp"
#include "chimera/mixer.hpp"
#include "chimera/recognizer/decoder.hpp"
#include "chimera/recognizer/model_io.hpp"
#include "chimera/recognizer/phone_lm.hpp"
#include "chimera/recognizer/scoring.hpp"
#include "chimera/recognizer/training.hpp"
#include "chimera/synth.hpp"

namespace chimera {

// ---------------------------------------------------------------------------
// Corpus manifest

struct ManifestEntry {
  std::string utt_id;  // "<speaker>_<sentence>"
  std::string wav_path;
  std::string phn_path;
  std::string speaker;
  Gender gender = Gender::kMale;
  std::string sentence;  // lower case, e.g. "sx127"
  std::string subset;    // "train" or "test"

  bool operator==(const ManifestEntry&) const = default;
};

struct Manifest {
  std::vector<ManifestEntry> entries;  // sorted by utt_id

  const ManifestEntry* Find(std::string_view utt_id) const;
  const ManifestEntry& Require(std::string_view utt_id) const;
  std::size_t Count(std::string_view subset, std::optional<Gender> gender = std::nullopt) const;
};

// Walks a TIMIT-style tree: <root>/<subset>/<dialect>/<g><speaker>/<sentence>.wav
// with a sibling .phn. Only the subset directory and the speaker directory
// (whose first letter gives the gender) are interpreted.
Manifest BuildManifest(const std::string& root);

std::string ManifestToCsv(const Manifest& manifest);
Manifest ManifestFromCsv(std::string_view text);
Manifest LoadManifest(const std::string& path);

// ---------------------------------------------------------------------------
// Opposite-gender pairing

struct UtterancePair {
  ManifestEntry source;
  ManifestEntry target;
};

struct PairingReport {
  std::vector<UtterancePair> pairs;
  std::vector<std::string> excluded;  // source utt ids with no opposite-gender rendition
  std::size_t male_pairs = 0;
  std::size_t female_pairs = 0;
  std::size_t male_excluded = 0;
  std::size_t female_excluded = 0;
};

// Pairs every SX utterance of `subset` with the same sentence read by the
// opposite gender, choosing the lexicographically smallest speaker id.
PairingReport PairUtterances(const Manifest& manifest, std::string_view subset = "test");

// ---------------------------------------------------------------------------
// Conditions and stimuli

struct Condition {
  Gender source = Gender::kMale;
  std::optional<MixKind> mix;  // unset for original utterances

  bool operator==(const Condition&) const = default;
};

// "M", "F", "M<FU", "F<MU", "M<FvU", "F<MvU", "M<FSSt", "F<MSSt".
std::string ConditionLabel(const Condition& c);
Condition ParseCondition(std::string_view label);
// Grid row order: originals, then SSt, U, vU swaps; male sources first.
std::vector<std::string> CanonicalConditionOrder();

struct Stimulus {
  std::string stimulus_id;
  std::string condition;
  std::string source_utt;
  std::string target_utt;  // empty for originals
  std::string wav_path;
  std::string recipe_path;

  bool operator==(const Stimulus&) const = default;
};

struct StimulusManifest {
  std::vector<Stimulus> stimuli;
  // Directory relative paths are resolved against.
  std::string base_dir;

  std::string ResolvePath(const std::string& path) const;
};

std::string StimulusManifestToCsv(const StimulusManifest& manifest);
StimulusManifest StimulusManifestFromCsv(std::string_view text, std::string base_dir = "");
StimulusManifest LoadStimulusManifest(const std::string& path);

// Sidecar written next to each rendered stimulus: the recipe plus the phone
// sequence physically present in the audio.
struct StimulusSidecar {
  MixRecipe recipe;
  std::string condition;
  std::string source_utt;
  std::string target_utt;
  std::vector<std::string> reference;
};

std::string SidecarToJson(const StimulusSidecar& sidecar);
StimulusSidecar SidecarFromJson(std::string_view text);

struct TestsetOptions {
  std::vector<MixKind> modes{MixKind::kSwapU, MixKind::kSwapVU, MixKind::kSwapSSt};
  bool include_originals = true;
  std::size_t crossfade_len = 80;
  bool match_gain = false;
  std::size_t v_swap_count = 2;
  std::size_t jobs = 1;
};

struct TestsetResult {
  StimulusManifest manifest;
  std::vector<std::string> errors;  // one line per failed (pair, mode)
  std::size_t mixed_written = 0;
  std::size_t originals = 0;
};

// Renders every (pair, mode) into <out_dir>/stimuli and writes
// <out_dir>/stimuli.csv. Per-pair failures are collected, not thrown.
TestsetResult GenerateTestsets(const std::vector<UtterancePair>& pairs, const std::string& out_dir,
                               const TestsetOptions& options = {},
                               const ClassificationTable& table = ClassificationTable::Builtin());

// ---------------------------------------------------------------------------
// Recognizer training on manifest data

struct CorpusOptions {
  std::string subset = "train";
  std::optional<Gender> gender;
  // 0 keeps everything; otherwise a seeded sample of this many utterances.
  std::size_t max_utterances = 200;
  uint64_t seed = 1;
  MfccConfig features;
  std::size_t jobs = 1;
};

std::vector<TrainUtterance> LoadTrainingCorpus(const Manifest& manifest, const CorpusOptions& options,
                                               const ClassificationTable& table = ClassificationTable::Builtin());

struct RecognizerTrainOptions {
  std::string name = "model";
  std::size_t gaussian_budget = 1000;
  std::size_t iterations = 10;
  LmOptions lm;
  MfccConfig features;
  std::size_t jobs = 1;
};

RecognizerModel TrainRecognizer(const std::vector<TrainUtterance>& corpus,
                                const RecognizerTrainOptions& options, TrainReport* report = nullptr,
                                const ClassificationTable& table = ClassificationTable::Builtin());

FeatureMatrix ExtractFeatures(const Waveform& wave, const MfccConfig& cfg);

// ---------------------------------------------------------------------------
// Experiment grid

struct ExperimentResult {
  std::vector<std::string> models;
  std::vector<std::string> conditions;
  std::map<std::pair<std::string, std::string>, PerBreakdown> cells;  // (condition, model)
  std::map<std::pair<std::string, std::string>, std::size_t> utterances;

  const PerBreakdown& cell(const std::string& condition, const std::string& model) const;
  // Header "condition,<models...>", one row per condition, PER in percent.
  std::string ToCsv() const;
  std::string ToDetailedCsv() const;
};

struct GridOptions {
  DecodeOptions decode;
  std::size_t jobs = 1;
};

ExperimentResult RunExperimentGrid(const std::vector<RecognizerModel>& models,
                                   const StimulusManifest& stimuli, const GridOptions& options = {},
                                   const ClassificationTable& table = ClassificationTable::Builtin());

// ---------------------------------------------------------------------------
// Listening-test scoring

enum class Choice { kOneSpeaker, kTwoSpeakers };

std::string_view ChoiceName(Choice c);  // "one-speaker" / "two-speakers"
Choice ParseChoice(std::string_view text);

struct SubjectiveRecord {
  std::string condition;
  Choice response = Choice::kOneSpeaker;
};

struct AccuracyRow {
  std::string condition;
  std::size_t correct = 0;
  std::size_t total = 0;

  double accuracy() const;  // percent
};

struct AccuracyTable {
  std::vector<AccuracyRow> rows;
  AccuracyRow overall{"all", 0, 0};

  const AccuracyRow* Find(std::string_view condition) const;
  std::string ToCsv() const;
};

// Correct means "two speakers" for mixed stimuli and "one speaker" for
// originals. Rows follow M, F, M<FvU, F<MvU, M<FU, F<MU, then any others.
AccuracyTable ScoreSubjective(const std::vector<SubjectiveRecord>& records);

// ---------------------------------------------------------------------------
// Provenance

struct RunDescriptor {
  std::string command;
  uint64_t seed = 0;
  std::string config_hash;
  std::string corpus_hash;
  std::map<std::string, std::string> settings;

  std::string ToJson() const;
};

// Hash of the manifest text and the size of every referenced file.
std::string CorpusHash(const Manifest& manifest);
std::string ConfigHash(const std::map<std::string, std::string>& settings);

}  // namespace chimera
