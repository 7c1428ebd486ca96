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

#include "chimera/harness.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <numeric>
#include <set>

#include "chimera/config.hpp"
#include "chimera/error.hpp"
#include "chimera/parallel.hpp"
#include "chimera/random.hpp"
#include "json.hpp"

namespace chimera {
namespace fs = std::filesystem;
namespace {

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string CsvField(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::vector<std::vector<std::string>> ParseCsv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field.push_back(c);
      any = true;
    }
  }
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string ReadText(const std::string& path) {
  const auto bytes = ReadBinaryFile(path);
  return {reinterpret_cast<const char*>(bytes.data()), bytes.size()};
}

void WriteText(const std::string& path, std::string_view text) {
  WriteBinaryFile(path, std::span(reinterpret_cast<const uint8_t*>(text.data()), text.size()));
}

void ExpectHeader(const std::vector<std::vector<std::string>>& rows,
                  const std::vector<std::string>& header, std::string_view what) {
  if (rows.empty() || rows.front() != header) {
    Fail(ErrorCode::kMalformedLine, fmt::format("{}: unexpected header", what));
  }
}

bool HasRiffMagic(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  char magic[4] = {};
  in.read(magic, 4);
  return in.gcount() == 4 && std::string_view(magic, 4) == "RIFF";
}

Gender ParseGenderLetter(std::string_view s) {
  if (s == "M" || s == "m") return Gender::kMale;
  if (s == "F" || s == "f") return Gender::kFemale;
  Fail(ErrorCode::kInvalidArgument, fmt::format("gender '{}'", s));
}

std::string ModeTag(MixKind kind) { return std::string(MixKindName(kind)); }

}  // namespace

// ---------------------------------------------------------------------------

const ManifestEntry* Manifest::Find(std::string_view utt_id) const {
  const auto it = std::lower_bound(entries.begin(), entries.end(), utt_id,
                                   [](const ManifestEntry& e, std::string_view id) { return e.utt_id < id; });
  return it != entries.end() && it->utt_id == utt_id ? &*it : nullptr;
}

const ManifestEntry& Manifest::Require(std::string_view utt_id) const {
  const auto* e = Find(utt_id);
  if (e == nullptr) Fail(ErrorCode::kInvalidArgument, fmt::format("utterance '{}' not in manifest", utt_id));
  return *e;
}

std::size_t Manifest::Count(std::string_view subset, std::optional<Gender> gender) const {
  return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [&](const ManifestEntry& e) {
    return e.subset == subset && (!gender || e.gender == *gender);
  }));
}

Manifest BuildManifest(const std::string& root) {
  const fs::path base(root);
  if (!fs::is_directory(base)) Fail(ErrorCode::kIo, fmt::format("corpus root '{}' is not a directory", root));
  std::map<std::string, std::vector<fs::path>> candidates;
  std::map<std::string, ManifestEntry> by_id;
  for (const auto& item : fs::recursive_directory_iterator(base)) {
    if (!item.is_regular_file()) continue;
    const fs::path& p = item.path();
    if (Lower(p.extension().string()) != ".wav") continue;
    const std::string name = p.filename().string();
    const std::string sentence = Lower(name.substr(0, name.find('.')));
    const fs::path rel = fs::relative(p, base);
    std::string subset;
    for (const auto& part : rel.parent_path()) {
      const auto l = Lower(part.string());
      if (l == "train" || l == "test") subset = l;
    }
    if (subset.empty()) {
      const auto l = Lower(base.filename().string());
      if (l == "train" || l == "test") subset = l;
    }
    const std::string speaker = Lower(p.parent_path().filename().string());
    if (subset.empty() || sentence.empty() || speaker.size() < 2 ||
        (speaker[0] != 'm' && speaker[0] != 'f')) {
      Fail(ErrorCode::kUnparseablePath, p.string());
    }
    ManifestEntry e;
    e.utt_id = speaker + "_" + sentence;
    e.speaker = speaker;
    e.gender = speaker[0] == 'm' ? Gender::kMale : Gender::kFemale;
    e.sentence = sentence;
    e.subset = subset;
    candidates[e.utt_id].push_back(p);
    by_id[e.utt_id] = e;
  }
  Manifest m;
  for (auto& [id, entry] : by_id) {
    auto& paths = candidates[id];
    std::sort(paths.begin(), paths.end());
    fs::path wav = paths.front();
    if (paths.size() > 1) {
      for (const auto& p : paths) {
        if (HasRiffMagic(p)) {
          wav = p;
          break;
        }
      }
    }
    const std::string stem = wav.filename().string().substr(0, wav.filename().string().find('.'));
    fs::path phn;
    for (const auto& sibling : fs::directory_iterator(wav.parent_path())) {
      const std::string n = sibling.path().filename().string();
      if (Lower(n) == Lower(stem) + ".phn") {
        phn = sibling.path();
        break;
      }
    }
    if (phn.empty()) Fail(ErrorCode::kMissingAnnotation, id);
    entry.wav_path = wav.string();
    entry.phn_path = phn.string();
    m.entries.push_back(std::move(entry));
  }
  return m;
}

std::string ManifestToCsv(const Manifest& manifest) {
  std::string out = "utt_id,wav,phn,speaker,gender,sentence,subset\n";
  for (const auto& e : manifest.entries) {
    out += fmt::format("{},{},{},{},{},{},{}\n", CsvField(e.utt_id), CsvField(e.wav_path),
                       CsvField(e.phn_path), CsvField(e.speaker), GenderLetter(e.gender),
                       CsvField(e.sentence), CsvField(e.subset));
  }
  return out;
}

Manifest ManifestFromCsv(std::string_view text) {
  const auto rows = ParseCsv(text);
  ExpectHeader(rows, {"utt_id", "wav", "phn", "speaker", "gender", "sentence", "subset"}, "manifest");
  Manifest m;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 7) Fail(ErrorCode::kMalformedLine, fmt::format("manifest row {}", i + 1));
    m.entries.push_back({r[0], r[1], r[2], r[3], ParseGenderLetter(r[4]), r[5], r[6]});
  }
  std::sort(m.entries.begin(), m.entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.utt_id < b.utt_id; });
  for (std::size_t i = 1; i < m.entries.size(); ++i) {
    if (m.entries[i].utt_id == m.entries[i - 1].utt_id) {
      Fail(ErrorCode::kInvalidArgument, "duplicate utterance " + m.entries[i].utt_id);
    }
  }
  return m;
}

Manifest LoadManifest(const std::string& path) { return ManifestFromCsv(ReadText(path)); }

// ---------------------------------------------------------------------------

PairingReport PairUtterances(const Manifest& manifest, std::string_view subset) {
  // (sentence, gender) -> smallest speaker's entry
  std::map<std::pair<std::string, Gender>, const ManifestEntry*> best;
  for (const auto& e : manifest.entries) {
    if (e.subset != subset || !e.sentence.starts_with("sx")) continue;
    auto& slot = best[{e.sentence, e.gender}];
    if (slot == nullptr || e.speaker < slot->speaker) slot = &e;
  }
  PairingReport report;
  for (const auto& e : manifest.entries) {
    if (e.subset != subset || !e.sentence.starts_with("sx")) continue;
    const Gender other = e.gender == Gender::kMale ? Gender::kFemale : Gender::kMale;
    const auto it = best.find({e.sentence, other});
    const bool male = e.gender == Gender::kMale;
    if (it == best.end()) {
      report.excluded.push_back(e.utt_id);
      ++(male ? report.male_excluded : report.female_excluded);
      continue;
    }
    report.pairs.push_back({e, *it->second});
    ++(male ? report.male_pairs : report.female_pairs);
  }
  return report;
}

// ---------------------------------------------------------------------------

std::string ConditionLabel(const Condition& c) {
  const char src = GenderLetter(c.source);
  if (!c.mix) return std::string(1, src);
  const char tgt = c.source == Gender::kMale ? 'F' : 'M';
  std::string_view suffix;
  switch (*c.mix) {
    case MixKind::kSwapU: suffix = "U"; break;
    case MixKind::kSwapVU: suffix = "vU"; break;
    case MixKind::kSwapSSt: suffix = "SSt"; break;
  }
  return fmt::format("{}<{}{}", src, tgt, suffix);
}

Condition ParseCondition(std::string_view label) {
  for (Gender g : {Gender::kMale, Gender::kFemale}) {
    if (label == ConditionLabel({g, std::nullopt})) return {g, std::nullopt};
    for (MixKind k : {MixKind::kSwapU, MixKind::kSwapVU, MixKind::kSwapSSt}) {
      if (label == ConditionLabel({g, k})) return {g, k};
    }
  }
  Fail(ErrorCode::kUnknownCondition, std::string(label));
}

std::vector<std::string> CanonicalConditionOrder() {
  std::vector<std::string> out;
  for (Gender g : {Gender::kMale, Gender::kFemale}) {
    out.push_back(ConditionLabel({g, std::nullopt}));
    for (MixKind k : {MixKind::kSwapSSt, MixKind::kSwapU, MixKind::kSwapVU}) {
      out.push_back(ConditionLabel({g, k}));
    }
  }
  return out;
}

std::string StimulusManifest::ResolvePath(const std::string& path) const {
  const fs::path p(path);
  if (p.is_absolute() || base_dir.empty()) return path;
  return (fs::path(base_dir) / p).string();
}

std::string StimulusManifestToCsv(const StimulusManifest& manifest) {
  std::string out = "stimulus_id,condition,source_utt,target_utt,wav_path,recipe_path\n";
  for (const auto& s : manifest.stimuli) {
    out += fmt::format("{},{},{},{},{},{}\n", CsvField(s.stimulus_id), CsvField(s.condition),
                       CsvField(s.source_utt), CsvField(s.target_utt), CsvField(s.wav_path),
                       CsvField(s.recipe_path));
  }
  return out;
}

StimulusManifest StimulusManifestFromCsv(std::string_view text, std::string base_dir) {
  const auto rows = ParseCsv(text);
  ExpectHeader(rows, {"stimulus_id", "condition", "source_utt", "target_utt", "wav_path", "recipe_path"},
               "stimulus manifest");
  StimulusManifest m;
  m.base_dir = std::move(base_dir);
  std::set<std::string> seen;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 6) Fail(ErrorCode::kMalformedLine, fmt::format("stimulus manifest row {}", i + 1));
    ParseCondition(r[1]);
    if (!seen.insert(r[0]).second) Fail(ErrorCode::kInvalidArgument, "duplicate stimulus " + r[0]);
    m.stimuli.push_back({r[0], r[1], r[2], r[3], r[4], r[5]});
  }
  return m;
}

StimulusManifest LoadStimulusManifest(const std::string& path) {
  if (!fs::exists(path)) Fail(ErrorCode::kMissingStimuli, path);
  return StimulusManifestFromCsv(ReadText(path), fs::path(path).parent_path().string());
}

std::string SidecarToJson(const StimulusSidecar& sidecar) {
  auto j = nlohmann::ordered_json::parse(RecipeToJson(sidecar.recipe));
  j["condition"] = sidecar.condition;
  j["source_utt"] = sidecar.source_utt;
  j["target_utt"] = sidecar.target_utt;
  j["reference"] = sidecar.reference;
  return j.dump(2) + "\n";
}

StimulusSidecar SidecarFromJson(std::string_view text) {
  StimulusSidecar s;
  s.recipe = RecipeFromJson(text);
  try {
    const auto j = nlohmann::json::parse(text);
    s.condition = j.value("condition", "");
    s.source_utt = j.value("source_utt", "");
    s.target_utt = j.value("target_utt", "");
    s.reference = j.at("reference").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kInvalidArgument, std::string("stimulus sidecar: ") + e.what());
  }
  return s;
}

TestsetResult GenerateTestsets(const std::vector<UtterancePair>& pairs, const std::string& out_dir,
                               const TestsetOptions& options, const ClassificationTable& table) {
  const fs::path root(out_dir);
  fs::create_directories(root / "stimuli");
  struct Slot {
    std::vector<Stimulus> stimuli;
    std::vector<std::string> errors;
    std::size_t mixed = 0;
    std::size_t originals = 0;
  };
  std::vector<Slot> slots(pairs.size());
  // An utterance can be the source of at most one pair, but guard anyway so
  // originals are written once.
  std::vector<bool> first_source(pairs.size(), true);
  {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < pairs.size(); ++i) first_source[i] = seen.insert(pairs[i].source.utt_id).second;
  }

  ParallelFor(pairs.size(), options.jobs, [&](std::size_t i) {
    const auto& pair = pairs[i];
    Slot& slot = slots[i];
    Waveform src, tgt;
    PhoneTier src_tier, tgt_tier;
    try {
      src = ReadWavFile(pair.source.wav_path);
      tgt = ReadWavFile(pair.target.wav_path, src.sample_rate);
      src_tier = ReadPhnFile(pair.source.phn_path, src.sample_rate, &table);
      tgt_tier = ReadPhnFile(pair.target.phn_path, tgt.sample_rate, &table);
    } catch (const Error& e) {
      slot.errors.push_back(fmt::format("{} -> {}: {}", pair.source.utt_id, pair.target.utt_id, e.what()));
      return;
    }
    auto emit = [&](const std::string& id, const std::string& condition, const std::string& target_utt,
                    const Waveform& wave, const StimulusSidecar& sidecar) {
      const std::string wav_rel = "stimuli/" + id + ".wav";
      const std::string recipe_rel = "stimuli/" + id + ".recipe.json";
      WriteWavFile((root / wav_rel).string(), wave);
      WriteText((root / recipe_rel).string(), SidecarToJson(sidecar));
      slot.stimuli.push_back({id, condition, pair.source.utt_id, target_utt, wav_rel, recipe_rel});
    };
    if (options.include_originals && first_source[i]) {
      StimulusSidecar sc;
      sc.recipe.pieces = {{Origin::kSource, 0, static_cast<int64_t>(src.samples.size())}};
      sc.recipe.crossfade_len = options.crossfade_len;
      sc.condition = ConditionLabel({pair.source.gender, std::nullopt});
      sc.source_utt = pair.source.utt_id;
      sc.reference = src_tier.labels();
      emit(pair.source.utt_id + ".orig", sc.condition, "", src, sc);
      ++slot.originals;
    }
    for (MixKind kind : options.modes) {
      const std::string condition = ConditionLabel({pair.source.gender, kind});
      try {
        MixMode mode;
        mode.kind = kind;
        mode.v_swap_count = options.v_swap_count;
        const auto plan = PlanUtteranceMix(src_tier, tgt_tier, mode, table, options.crossfade_len);
        StimulusSidecar sc;
        sc.recipe = plan.recipe;
        if (options.match_gain) sc.recipe.target_gain = MatchRmsGain(src, tgt);
        sc.condition = condition;
        sc.source_utt = pair.source.utt_id;
        sc.target_utt = pair.target.utt_id;
        sc.reference = MixedReference(sc.recipe, src_tier, tgt_tier);
        const Waveform mixed = Render(sc.recipe, src, tgt);
        emit(pair.source.utt_id + "." + ModeTag(kind), condition, pair.target.utt_id, mixed, sc);
        ++slot.mixed;
      } catch (const Error& e) {
        slot.errors.push_back(fmt::format("{} -> {} [{}]: {}", pair.source.utt_id, pair.target.utt_id,
                                          MixKindName(kind), e.what()));
      }
    }
  });

  TestsetResult result;
  result.manifest.base_dir = root.string();
  for (auto& slot : slots) {
    for (auto& s : slot.stimuli) result.manifest.stimuli.push_back(std::move(s));
    for (auto& e : slot.errors) result.errors.push_back(std::move(e));
    result.mixed_written += slot.mixed;
    result.originals += slot.originals;
  }
  WriteText((root / "stimuli.csv").string(), StimulusManifestToCsv(result.manifest));
  return result;
}

// ---------------------------------------------------------------------------

FeatureMatrix ExtractFeatures(const Waveform& wave, const MfccConfig& cfg) { return ComputeMfcc39(wave, cfg); }

std::vector<TrainUtterance> LoadTrainingCorpus(const Manifest& manifest, const CorpusOptions& options,
                                               const ClassificationTable& table) {
  std::vector<const ManifestEntry*> chosen;
  for (const auto& e : manifest.entries) {
    if (e.subset == options.subset && (!options.gender || e.gender == *options.gender)) chosen.push_back(&e);
  }
  if (options.max_utterances > 0 && chosen.size() > options.max_utterances) {
    Rng rng(options.seed);
    rng.Shuffle(chosen);
    chosen.resize(options.max_utterances);
    std::sort(chosen.begin(), chosen.end(),
              [](const ManifestEntry* a, const ManifestEntry* b) { return a->utt_id < b->utt_id; });
  }
  std::vector<TrainUtterance> corpus(chosen.size());
  ParallelFor(chosen.size(), options.jobs, [&](std::size_t i) {
    const auto& e = *chosen[i];
    const Waveform wave = ReadWavFile(e.wav_path, options.features.sample_rate);
    const PhoneTier tier = ReadPhnFile(e.phn_path, wave.sample_rate, &table);
    TrainUtterance& u = corpus[i];
    u.id = e.utt_id;
    u.features = ExtractFeatures(wave, options.features);
    u.phones = tier.labels();
    u.spans = TierToFrameSpans(tier, u.features.rows, u.features.frame_hop, u.features.frame_len);
  });
  return corpus;
}

RecognizerModel TrainRecognizer(const std::vector<TrainUtterance>& corpus,
                                const RecognizerTrainOptions& options, TrainReport* report,
                                const ClassificationTable& table) {
  if (corpus.empty()) Fail(ErrorCode::kEmptyCorpus, "no training utterances");
  const std::size_t expected_dim = options.features.num_ceps * (options.features.add_deltas ? 3 : 1);
  if (corpus.front().features.cols != expected_dim) {
    Fail(ErrorCode::kDimensionMismatch,
         fmt::format("features have {} columns, configuration implies {}", corpus.front().features.cols,
                     expected_dim));
  }
  FlatStartOptions fs_opts;
  fs_opts.gaussian_budget = options.gaussian_budget;
  // Silence labels must always be decodable even when a small sample lacks them.
  for (const auto& phone : table.Inventory()) {
    if (table.Classify(phone).sub == SubClass::kSilence) fs_opts.extra_phones.push_back(phone);
  }
  AcousticModel am = FlatStart(corpus, fs_opts);
  TrainOptions tr;
  tr.iterations = options.iterations;
  tr.mixup = LinearMixupSchedule(options.iterations, am.total_gaussians(), options.gaussian_budget);
  tr.jobs = options.jobs;
  am = TrainEm(std::move(am), corpus, tr, report);

  std::vector<std::vector<std::string>> transcriptions;
  transcriptions.reserve(corpus.size());
  for (const auto& u : corpus) transcriptions.push_back(u.phones);
  RecognizerModel model;
  model.name = options.name;
  model.lm = TrainPhoneLm(transcriptions, options.lm, am.phones());
  model.acoustic = std::move(am);
  model.features = options.features;
  return model;
}

// ---------------------------------------------------------------------------

const PerBreakdown& ExperimentResult::cell(const std::string& condition, const std::string& model) const {
  const auto it = cells.find({condition, model});
  if (it == cells.end()) Fail(ErrorCode::kInvalidArgument, fmt::format("no cell ({}, {})", condition, model));
  return it->second;
}

std::string ExperimentResult::ToCsv() const {
  std::string out = "condition";
  for (const auto& m : models) out += "," + CsvField(m);
  out += "\n";
  for (const auto& c : conditions) {
    out += CsvField(c);
    for (const auto& m : models) out += fmt::format(",{:.2f}", cell(c, m).per());
    out += "\n";
  }
  return out;
}

std::string ExperimentResult::ToDetailedCsv() const {
  std::string out = "condition,model,utterances,substitutions,deletions,insertions,ref_length,per\n";
  for (const auto& c : conditions) {
    for (const auto& m : models) {
      const auto& p = cell(c, m);
      out += fmt::format("{},{},{},{},{},{},{},{:.4f}\n", CsvField(c), CsvField(m), utterances.at({c, m}),
                         p.substitutions, p.deletions, p.insertions, p.ref_length, p.per());
    }
  }
  return out;
}

ExperimentResult RunExperimentGrid(const std::vector<RecognizerModel>& models,
                                   const StimulusManifest& stimuli, const GridOptions& options,
                                   const ClassificationTable& table) {
  if (models.empty()) Fail(ErrorCode::kMissingModel, "no models given");
  if (stimuli.stimuli.empty()) Fail(ErrorCode::kMissingStimuli, "stimulus manifest is empty");
  ExperimentResult result;
  for (const auto& m : models) {
    if (std::find(result.models.begin(), result.models.end(), m.name) != result.models.end()) {
      Fail(ErrorCode::kInvalidArgument, "duplicate model name " + m.name);
    }
    result.models.push_back(m.name);
  }
  std::set<std::string> present;
  for (const auto& s : stimuli.stimuli) {
    ParseCondition(s.condition);
    present.insert(s.condition);
  }
  for (const auto& c : CanonicalConditionOrder()) {
    if (present.contains(c)) result.conditions.push_back(c);
  }

  const std::size_t n = stimuli.stimuli.size();
  std::vector<std::vector<PerBreakdown>> per(n, std::vector<PerBreakdown>(models.size()));
  ParallelFor(n, options.jobs, [&](std::size_t i) {
    const auto& s = stimuli.stimuli[i];
    const std::string wav_path = stimuli.ResolvePath(s.wav_path);
    const std::string recipe_path = stimuli.ResolvePath(s.recipe_path);
    if (!fs::exists(wav_path)) Fail(ErrorCode::kMissingStimuli, wav_path);
    if (!fs::exists(recipe_path)) Fail(ErrorCode::kMissingStimuli, recipe_path);
    const Waveform wave = ReadWavFile(wav_path);
    const auto sidecar = SidecarFromJson(ReadText(recipe_path));
    for (std::size_t m = 0; m < models.size(); ++m) {
      const auto features = ExtractFeatures(wave, models[m].features);
      const auto hyp = ViterbiDecode(models[m].acoustic, models[m].lm, features, options.decode);
      per[i][m] = PhoneErrorRate(sidecar.reference, hyp, table);
    }
  });
  for (const auto& c : result.conditions) {
    for (const auto& m : result.models) {
      result.cells[{c, m}] = {};
      result.utterances[{c, m}] = 0;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t m = 0; m < models.size(); ++m) {
      const std::pair key{stimuli.stimuli[i].condition, models[m].name};
      result.cells[key] += per[i][m];
      ++result.utterances[key];
    }
  }
  return result;
}

// ---------------------------------------------------------------------------

std::string_view ChoiceName(Choice c) { return c == Choice::kOneSpeaker ? "one-speaker" : "two-speakers"; }

Choice ParseChoice(std::string_view text) {
  const std::string l = Lower(text);
  if (l == "one-speaker" || l == "onespeaker" || l == "one" || l == "1") return Choice::kOneSpeaker;
  if (l == "two-speakers" || l == "twospeakers" || l == "two" || l == "2") return Choice::kTwoSpeakers;
  Fail(ErrorCode::kInvalidArgument, fmt::format("choice '{}'", text));
}

double AccuracyRow::accuracy() const {
  return total == 0 ? 0.0 : 100.0 * static_cast<double>(correct) / static_cast<double>(total);
}

const AccuracyRow* AccuracyTable::Find(std::string_view condition) const {
  for (const auto& r : rows) {
    if (r.condition == condition) return &r;
  }
  return nullptr;
}

std::string AccuracyTable::ToCsv() const {
  std::string out = "condition,correct,total,accuracy\n";
  for (const auto& r : rows) out += fmt::format("{},{},{},{:.1f}\n", CsvField(r.condition), r.correct, r.total, r.accuracy());
  if (overall.total > 0) out += fmt::format("all,{},{},{:.1f}\n", overall.correct, overall.total, overall.accuracy());
  return out;
}

AccuracyTable ScoreSubjective(const std::vector<SubjectiveRecord>& records) {
  std::map<std::string, AccuracyRow> rows;
  AccuracyTable table;
  for (const auto& r : records) {
    const Condition c = ParseCondition(r.condition);
    const Choice expected = c.mix ? Choice::kTwoSpeakers : Choice::kOneSpeaker;
    auto& row = rows[r.condition];
    row.condition = r.condition;
    ++row.total;
    ++table.overall.total;
    if (r.response == expected) {
      ++row.correct;
      ++table.overall.correct;
    }
  }
  const std::vector<std::string> order{"M", "F", "M<FvU", "F<MvU", "M<FU", "F<MU", "M<FSSt", "F<MSSt"};
  for (const auto& c : order) {
    if (const auto it = rows.find(c); it != rows.end()) table.rows.push_back(it->second);
  }
  return table;
}

// ---------------------------------------------------------------------------

std::string RunDescriptor::ToJson() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["seed"] = seed;
  j["config_hash"] = config_hash;
  j["corpus_hash"] = corpus_hash;
  j["settings"] = settings;
  return j.dump(2) + "\n";
}

std::string CorpusHash(const Manifest& manifest) {
  uint64_t h = Fnv1a64(ManifestToCsv(manifest));
  for (const auto& e : manifest.entries) {
    for (const auto& p : {e.wav_path, e.phn_path}) {
      std::error_code ec;
      const auto size = fs::file_size(p, ec);
      h = Fnv1a64(std::to_string(ec ? 0 : size) + ";", h);
    }
  }
  return HexDigest(h);
}

std::string ConfigHash(const std::map<std::string, std::string>& settings) {
  uint64_t h = Fnv1a64("");
  for (const auto& [k, v] : settings) h = Fnv1a64(k + "=" + v + "\n", h);
  return HexDigest(h);
}

}  // namespace chimera
