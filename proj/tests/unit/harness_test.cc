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
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "chimera/error.hpp"
#include "test_util.hpp"

namespace chimera {
namespace {

namespace fs = std::filesystem;

ErrorCode CodeOf(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIo;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteText(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
}

// Writes a speaker utterance with a [U V U V U] tier over noise.
void WriteUtt(const fs::path& root, const std::string& subset, const std::string& speaker,
              const std::string& sentence, uint64_t seed, const std::string& wav_ext = ".wav",
              bool with_phn = true) {
  const auto tier = testing::MakeTier({{"h#", 1600 + int64_t(seed % 7) * 40},
                                       {"iy", 2400},
                                       {"s", 1200},
                                       {"aa", 2000 + int64_t(seed % 5) * 80},
                                       {"h#", 1600}});
  const auto wave = testing::NoiseWave(static_cast<std::size_t>(tier.end_sample()), seed);
  const fs::path dir = root / subset / "dr1" / speaker;
  fs::create_directories(dir);
  WriteWavFile((dir / (sentence + wav_ext)).string(), wave);
  if (with_phn) WriteText(dir / (sentence + ".phn"), SerializePhn(tier));
}

TEST(BuildManifest, ParsesTimitLayout) {
  testing::TempDir dir;
  WriteUtt(dir.path(), "test", "fcjf0", "sx127", 1);
  WriteUtt(dir.path(), "train", "mabc0", "sa1", 2);
  const auto m = BuildManifest(dir.str());
  ASSERT_EQ(m.entries.size(), 2u);
  const auto& f = m.Require("fcjf0_sx127");
  EXPECT_EQ(f.gender, Gender::kFemale);
  EXPECT_EQ(f.sentence, "sx127");
  EXPECT_EQ(f.subset, "test");
  EXPECT_EQ(f.speaker, "fcjf0");
  EXPECT_EQ(m.Count("train", Gender::kMale), 1u);
  EXPECT_EQ(m.Count("test"), 1u);
  EXPECT_EQ(m.Find("nobody_sx1"), nullptr);
}

TEST(BuildManifest, UpperCaseNamesAndCsvRoundTrip) {
  testing::TempDir dir;
  WriteUtt(dir.path(), "TEST", "MDAB0", "SX1", 3, ".WAV");
  fs::rename(dir.path() / "TEST/dr1/MDAB0/SX1.phn", dir.path() / "TEST/dr1/MDAB0/SX1.PHN");
  const auto m = BuildManifest(dir.str());
  ASSERT_EQ(m.entries.size(), 1u);
  EXPECT_EQ(m.entries[0].utt_id, "mdab0_sx1");
  const auto back = ManifestFromCsv(ManifestToCsv(m));
  EXPECT_EQ(back.entries, m.entries);
}

TEST(BuildManifest, Errors) {
  testing::TempDir a;
  WriteUtt(a.path(), "test", "fcjf0", "sx127", 1, ".wav", false);
  EXPECT_EQ(CodeOf([&] { BuildManifest(a.str()); }), ErrorCode::kMissingAnnotation);
  testing::TempDir b;
  WriteUtt(b.path(), "test", "xyz0", "sx127", 1);
  EXPECT_EQ(CodeOf([&] { BuildManifest(b.str()); }), ErrorCode::kUnparseablePath);
  testing::TempDir c;
  WriteUtt(c.path(), "other", "fcjf0", "sx127", 1);
  EXPECT_EQ(CodeOf([&] { BuildManifest(c.str()); }), ErrorCode::kUnparseablePath);
  EXPECT_EQ(CodeOf([&] { BuildManifest(c.str("absent")); }), ErrorCode::kIo);
}

Manifest PairingFixture() {
  Manifest m;
  auto add = [&](std::string spk, std::string sent, std::string subset = "test") {
    const Gender g = spk[0] == 'm' ? Gender::kMale : Gender::kFemale;
    m.entries.push_back({spk + "_" + sent, "", "", spk, g, sent, subset});
  };
  add("fbbb1", "sx1");
  add("faaa1", "sx1");
  add("mzzz1", "sx1");
  add("mccc1", "sx2");  // male only
  add("fddd1", "sx3");
  add("mddd1", "sx3");
  add("mddd1", "sa1");  // SA sentences are never paired
  add("fqqq0", "sx2", "train");
  std::sort(m.entries.begin(), m.entries.end(),
            [](const auto& a, const auto& b) { return a.utt_id < b.utt_id; });
  return m;
}

TEST(PairUtterances, SmallestSpeakerWinsAndExclusionsAreCounted) {
  const auto r = PairUtterances(PairingFixture());
  EXPECT_EQ(r.male_pairs, 2u);
  EXPECT_EQ(r.female_pairs, 3u);
  EXPECT_EQ(r.male_excluded, 1u);
  EXPECT_EQ(r.female_excluded, 0u);
  EXPECT_EQ(r.excluded, (std::vector<std::string>{"mccc1_sx2"}));
  for (const auto& p : r.pairs) {
    EXPECT_EQ(p.source.sentence, p.target.sentence);
    EXPECT_NE(p.source.gender, p.target.gender);
    if (p.source.utt_id == "mzzz1_sx1") EXPECT_EQ(p.target.speaker, "faaa1");
  }
  // pairs + excluded == SX test utterances per gender
  const auto m = PairingFixture();
  std::size_t male_sx = 0;
  for (const auto& e : m.entries) male_sx += e.subset == "test" && e.gender == Gender::kMale && e.sentence.starts_with("sx");
  EXPECT_EQ(r.male_pairs + r.male_excluded, male_sx);
}

TEST(Conditions, LabelsRoundTrip) {
  const std::vector<std::string> expected{"M", "M<FSSt", "M<FU", "M<FvU", "F", "F<MSSt", "F<MU", "F<MvU"};
  EXPECT_EQ(CanonicalConditionOrder(), expected);
  for (const auto& label : expected) EXPECT_EQ(ConditionLabel(ParseCondition(label)), label);
  EXPECT_EQ(CodeOf([] { ParseCondition("M<MU"); }), ErrorCode::kUnknownCondition);
}

TEST(StimulusManifest, CsvRoundTripAndErrors) {
  StimulusManifest m;
  m.stimuli = {{"a.orig", "M", "a", "", "stimuli/a.orig.wav", "stimuli/a.orig.recipe.json"},
               {"a.swap-u", "M<FU", "a", "b,c", "stimuli/a.swap-u.wav", "stimuli/a.swap-u.recipe.json"}};
  const auto back = StimulusManifestFromCsv(StimulusManifestToCsv(m), "/base");
  EXPECT_EQ(back.stimuli, m.stimuli);
  EXPECT_EQ(back.ResolvePath("x.wav"), "/base/x.wav");
  EXPECT_EQ(back.ResolvePath("/abs.wav"), "/abs.wav");
  EXPECT_EQ(CodeOf([] { LoadStimulusManifest("/nonexistent/stimuli.csv"); }), ErrorCode::kMissingStimuli);
  EXPECT_EQ(CodeOf([] { StimulusManifestFromCsv("wrong,header\n"); }), ErrorCode::kMalformedLine);
  EXPECT_EQ(CodeOf([] {
              StimulusManifestFromCsv("stimulus_id,condition,source_utt,target_utt,wav_path,recipe_path\nx,Q,a,b,c,d\n");
            }),
            ErrorCode::kUnknownCondition);
}

TEST(Sidecar, JsonRoundTrip) {
  StimulusSidecar s;
  s.recipe.pieces = {{Origin::kTarget, 0, 100}, {Origin::kSource, 100, 300}};
  s.condition = "F<MU";
  s.source_utt = "f_sx1";
  s.target_utt = "m_sx1";
  s.reference = {"h#", "iy", "h#"};
  const auto back = SidecarFromJson(SidecarToJson(s));
  EXPECT_EQ(back.recipe.pieces, s.recipe.pieces);
  EXPECT_EQ(back.condition, s.condition);
  EXPECT_EQ(back.target_utt, s.target_utt);
  EXPECT_EQ(back.reference, s.reference);
}

TEST(GenerateTestsets, SelfPairReproducesOriginal) {
  testing::TempDir corpus, out;
  WriteUtt(corpus.path(), "test", "mabc1", "sx5", 9);
  const auto m = BuildManifest(corpus.str());
  const auto& e = m.entries[0];
  const auto r = GenerateTestsets({{e, e}}, out.str());
  EXPECT_TRUE(r.errors.empty());
  EXPECT_EQ(r.mixed_written, 3u);
  EXPECT_EQ(r.originals, 1u);
  const auto original = Slurp(e.wav_path);
  for (const auto& s : r.manifest.stimuli) {
    EXPECT_EQ(Slurp(r.manifest.ResolvePath(s.wav_path)), original) << s.stimulus_id;
  }
  const auto loaded = LoadStimulusManifest(out.str("stimuli.csv"));
  EXPECT_EQ(loaded.stimuli, r.manifest.stimuli);
}

TEST(GenerateTestsets, ErrorsAreCollectedPerPair) {
  testing::TempDir corpus, out;
  WriteUtt(corpus.path(), "test", "mabc1", "sx5", 9);
  WriteUtt(corpus.path(), "test", "fabc1", "sx5", 10);
  auto m = BuildManifest(corpus.str());
  const auto pairs = PairUtterances(m).pairs;
  ASSERT_EQ(pairs.size(), 2u);
  auto broken = pairs;
  broken[0].target.wav_path = corpus.str("missing.wav");
  TestsetOptions opt;
  opt.v_swap_count = 5;  // more voiced runs than the tier has
  const auto r = GenerateTestsets(broken, out.str(), opt);
  EXPECT_EQ(r.errors.size(), 1u + 1u);
  EXPECT_EQ(r.mixed_written, 2u);
  EXPECT_EQ(r.originals, 1u);
}

TEST(GenerateTestsets, DeterministicAcrossRunsAndJobs) {
  testing::TempDir corpus, a, b;
  WriteUtt(corpus.path(), "test", "mabc1", "sx5", 9);
  WriteUtt(corpus.path(), "test", "fabc1", "sx5", 10);
  WriteUtt(corpus.path(), "test", "faaa1", "sx5", 11);
  const auto pairs = PairUtterances(BuildManifest(corpus.str())).pairs;
  TestsetOptions opt;
  GenerateTestsets(pairs, a.str(), opt);
  opt.jobs = 3;
  GenerateTestsets(pairs, b.str(), opt);
  EXPECT_EQ(Slurp(a.path() / "stimuli.csv"), Slurp(b.path() / "stimuli.csv"));
  for (const auto& item : fs::directory_iterator(a.path() / "stimuli")) {
    EXPECT_EQ(Slurp(item.path()), Slurp(b.path() / "stimuli" / item.path().filename()));
  }
}

class GridFixture : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new testing::TempDir;
    SynthCorpusOptions opt;
    opt.train_sentences = 6;
    opt.test_sentences = 3;
    opt.single_gender_test_sentences = 1;
    opt.train_speakers_per_gender = 3;
    opt.test_speakers_per_gender = 2;
    opt.sentences_per_speaker = 2;
    WriteSynthCorpus(dir_->str("corpus"), opt);
    manifest_ = new Manifest(BuildManifest(dir_->str("corpus")));
    models_ = new std::vector<RecognizerModel>;
    for (Gender g : {Gender::kMale, Gender::kFemale}) {
      CorpusOptions co;
      co.gender = g;
      RecognizerTrainOptions ro;
      ro.name = std::string(1, GenderLetter(g));
      ro.gaussian_budget = 300;
      ro.iterations = 3;
      models_->push_back(TrainRecognizer(LoadTrainingCorpus(*manifest_, co), ro));
    }
    stimuli_ = new StimulusManifest(
        GenerateTestsets(PairUtterances(*manifest_).pairs, dir_->str("out")).manifest);
  }
  static void TearDownTestSuite() {
    delete stimuli_;
    delete models_;
    delete manifest_;
    delete dir_;
  }
  static testing::TempDir* dir_;
  static Manifest* manifest_;
  static std::vector<RecognizerModel>* models_;
  static StimulusManifest* stimuli_;
};
testing::TempDir* GridFixture::dir_ = nullptr;
Manifest* GridFixture::manifest_ = nullptr;
std::vector<RecognizerModel>* GridFixture::models_ = nullptr;
StimulusManifest* GridFixture::stimuli_ = nullptr;

TEST_F(GridFixture, TrainingCorpusSelection) {
  CorpusOptions co;
  co.gender = Gender::kFemale;
  co.max_utterances = 4;
  const auto a = LoadTrainingCorpus(*manifest_, co);
  const auto b = LoadTrainingCorpus(*manifest_, co);
  ASSERT_EQ(a.size(), 4u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].id, b[i].id);
    EXPECT_EQ(a[i].id[0], 'f');
    EXPECT_EQ(a[i].features.cols, 39u);
    EXPECT_EQ(a[i].spans.size(), a[i].phones.size());
  }
}

TEST_F(GridFixture, GridHasEveryCellAndIsDeterministic) {
  const auto r = RunExperimentGrid(*models_, *stimuli_);
  EXPECT_EQ(r.models, (std::vector<std::string>{"M", "F"}));
  EXPECT_EQ(r.conditions, CanonicalConditionOrder());
  for (const auto& c : r.conditions) {
    for (const auto& m : r.models) {
      EXPECT_GT(r.cell(c, m).ref_length, 0u);
      EXPECT_GT(r.utterances.at({c, m}), 0u);
    }
  }
  const auto csv = r.ToCsv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "condition,M,F");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 9);
  GridOptions parallel;
  parallel.jobs = 3;
  EXPECT_EQ(RunExperimentGrid(*models_, *stimuli_, parallel).ToDetailedCsv(), r.ToDetailedCsv());
}

TEST_F(GridFixture, GridErrors) {
  EXPECT_EQ(CodeOf([&] { RunExperimentGrid({}, *stimuli_); }), ErrorCode::kMissingModel);
  EXPECT_EQ(CodeOf([&] { RunExperimentGrid(*models_, StimulusManifest{}); }), ErrorCode::kMissingStimuli);
  EXPECT_EQ(CodeOf([&] { RunExperimentGrid({(*models_)[0], (*models_)[0]}, *stimuli_); }),
            ErrorCode::kInvalidArgument);
  StimulusManifest missing = *stimuli_;
  missing.stimuli.resize(1);
  missing.stimuli[0].wav_path = "stimuli/absent.wav";
  EXPECT_EQ(CodeOf([&] { RunExperimentGrid(*models_, missing); }), ErrorCode::kMissingStimuli);
}

TEST_F(GridFixture, RunDescriptorHashesAreStable) {
  EXPECT_EQ(CorpusHash(*manifest_), CorpusHash(BuildManifest(dir_->str("corpus"))));
  EXPECT_NE(ConfigHash({{"a", "1"}}), ConfigHash({{"a", "2"}}));
  RunDescriptor d{"grid", 7, ConfigHash({}), CorpusHash(*manifest_), {{"k", "v"}}};
  const auto json = d.ToJson();
  EXPECT_NE(json.find("\"seed\": 7"), std::string::npos);
  EXPECT_NE(json.find("\"corpus_hash\""), std::string::npos);
}

TEST(ScoreSubjective, TableLayoutAndCorrectness) {
  std::vector<SubjectiveRecord> recs;
  for (int i = 0; i < 4; ++i) recs.push_back({"F<MU", Choice::kOneSpeaker});
  for (int i = 0; i < 3; ++i) recs.push_back({"M", Choice::kOneSpeaker});
  recs.push_back({"M<FvU", Choice::kTwoSpeakers});
  recs.push_back({"M<FvU", Choice::kOneSpeaker});
  recs.push_back({"F", Choice::kTwoSpeakers});
  const auto t = ScoreSubjective(recs);
  std::vector<std::string> order;
  for (const auto& r : t.rows) order.push_back(r.condition);
  EXPECT_EQ(order, (std::vector<std::string>{"M", "F", "M<FvU", "F<MU"}));
  EXPECT_EQ(t.Find("F<MU")->accuracy(), 0.0);
  EXPECT_EQ(t.Find("M")->accuracy(), 100.0);
  EXPECT_EQ(t.Find("M<FvU")->accuracy(), 50.0);
  EXPECT_EQ(t.Find("F")->accuracy(), 0.0);
  EXPECT_EQ(t.overall.correct, 4u);
  EXPECT_EQ(t.overall.total, 10u);
  EXPECT_EQ(t.ToCsv(), "condition,correct,total,accuracy\nM,3,3,100.0\nF,0,1,0.0\nM<FvU,1,2,50.0\nF<MU,0,4,0.0\nall,4,10,40.0\n");
  EXPECT_EQ(CodeOf([] { ScoreSubjective({{"X<YU", Choice::kOneSpeaker}}); }), ErrorCode::kUnknownCondition);
  EXPECT_EQ(ParseChoice(ChoiceName(Choice::kTwoSpeakers)), Choice::kTwoSpeakers);
  EXPECT_EQ(CodeOf([] { ParseChoice("maybe"); }), ErrorCode::kInvalidArgument);
}

}  // namespace
}  // namespace chimera
