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

// chimera: command-line front end for mixing, feature extraction,
// recognizer training/decoding and the listening test.

#include <algorithm>
#include <csignal>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "chimera/annotations.hpp"
#include "chimera/config.hpp"
#include "chimera/dsp.hpp"
#include "chimera/error.hpp"
#include "chimera/harness.hpp"
#include "chimera/listening/http_server.hpp"
#include "chimera/listening/session_manager.hpp"
#include "chimera/mixer.hpp"
#include "chimera/parallel.hpp"
#include "chimera/synth.hpp"
#include "chimera/vu_align.hpp"

namespace fs = std::filesystem;
using namespace chimera;

namespace {

std::string ReadText(const std::string& path) {
  const auto bytes = ReadBinaryFile(path);
  return {reinterpret_cast<const char*>(bytes.data()), bytes.size()};
}

void WriteText(const std::string& path, std::string_view text) {
  WriteBinaryFile(path, std::span(reinterpret_cast<const uint8_t*>(text.data()), text.size()));
}

void WriteOut(const std::string& path, std::string_view text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    WriteText(path, text);
  }
}

std::string WithSuffix(const std::string& path, std::string_view suffix) {
  fs::path p(path);
  p.replace_extension();
  return p.string() + std::string(suffix);
}

std::vector<std::vector<std::string>> ReadSequences(const std::string& path) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in(ReadText(path));
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream words(line);
    std::vector<std::string> seq;
    for (std::string w; words >> w;) seq.push_back(w);
    if (!seq.empty()) out.push_back(std::move(seq));
  }
  return out;
}

std::string Join(const std::vector<std::string>& v, std::string_view sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += sep;
    out += v[i];
  }
  return out;
}

std::vector<std::string> Split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

struct Globals {
  uint64_t seed = 1;
  std::size_t jobs = 1;
  std::string classes_path;
  std::string fold_path;

  ClassificationTable Table() const {
    if (classes_path.empty() != fold_path.empty()) {
      Fail(ErrorCode::kInvalidArgument, "--phone-classes and --phone-fold go together");
    }
    if (classes_path.empty()) return ClassificationTable::Builtin();
    return ClassificationTable::Load(classes_path, fold_path);
  }
};

listening::HttpServer* g_server = nullptr;

void HandleSignal(int) {
  if (g_server != nullptr) g_server->Stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Voiced/unvoiced speech mixing and monophone phone recognition"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Key/value config file; [section] names a subcommand; flags win");
  Globals g;
  app.add_option("--seed", g.seed, "Seed for every random choice")->capture_default_str();
  app.add_option("--jobs,-j", g.jobs, "Worker threads")->capture_default_str();
  app.add_option("--phone-classes", g.classes_path, "CSV phone,major,sub (default: builtin)");
  app.add_option("--phone-fold", g.fold_path, "CSV phone,folded (default: builtin)");

  // validate ---------------------------------------------------------------
  std::string v_phn, v_wav;
  int v_rate = 16000;
  auto* validate = app.add_subcommand("validate", "Check a .phn tier (and optionally its waveform)");
  validate->add_option("--phn", v_phn, "Phone tier")->required()->check(CLI::ExistingFile);
  validate->add_option("--wav", v_wav, "Waveform the tier annotates")->check(CLI::ExistingFile);
  validate->add_option("--rate", v_rate, "Sample rate when no waveform is given")->capture_default_str();
  validate->callback([&] {
    const auto table = g.Table();
    int64_t n = -1;
    if (!v_wav.empty()) {
      const auto w = ReadWavFile(v_wav);
      v_rate = w.sample_rate;
      n = static_cast<int64_t>(w.samples.size());
    }
    const auto tier = ReadPhnFile(v_phn, v_rate, &table);
    const auto problems = ValidateTier(tier, n);
    for (const auto& p : problems) std::cout << p.message << "\n";
    std::cout << fmt::format("{} phones, {} problems, unvoiced fraction {:.3f}\n", tier.segments.size(),
                             problems.size(), UnvoicedFraction(tier, table));
    if (!problems.empty()) Fail(ErrorCode::kInvalidSegment, v_phn);
  });

  // align ------------------------------------------------------------------
  std::string a_src, a_tgt, a_out;
  auto* align = app.add_subcommand("align", "Dump runs, DP matrix, path and mapping for two tiers");
  align->add_option("--source-phn", a_src)->required()->check(CLI::ExistingFile);
  align->add_option("--target-phn", a_tgt)->required()->check(CLI::ExistingFile);
  align->add_option("-o,--output", a_out, "Output file (default stdout)");
  align->callback([&] {
    const auto table = g.Table();
    const auto s = ExtractRuns(ReadPhnFile(a_src, 16000, &table), table);
    const auto t = ExtractRuns(ReadPhnFile(a_tgt, 16000, &table), table);
    const AlignCosts costs;
    const auto path = Align(s, t, costs);
    const auto map = BuildMappingTable(path, s, t);
    std::string text = DumpAlignment(s, t, costs, path);
    text += "# mapping source_start source_end target_start target_end\n";
    for (const auto& p : map.pairs) {
      const auto& sr = s.runs[p.source];
      if (p.target) {
        const auto& tr = t.runs[*p.target];
        text += fmt::format("{}\t{}\t{}\t{}\n", sr.start, sr.end, tr.start, tr.end);
      } else {
        text += fmt::format("{}\t{}\t-\t-\n", sr.start, sr.end);
      }
    }
    text += "# instant_map source target\n";
    for (const auto& [a, b] : map.instant_map) text += fmt::format("{}\t{}\n", a, b);
    WriteOut(a_out, text);
  });

  // mix --------------------------------------------------------------------
  std::string m_src, m_src_phn, m_tgt, m_tgt_phn, m_mode = "swap-u", m_out;
  std::size_t m_cross = 80, m_vcount = 2;
  std::optional<std::size_t> m_vstart;
  bool m_gain = false;
  auto* mix = app.add_subcommand("mix", "Render one mixed utterance plus its recipe JSON");
  mix->add_option("--source", m_src, "Source waveform (keeps its voiced runs)")->required()->check(CLI::ExistingFile);
  mix->add_option("--source-phn", m_src_phn)->required()->check(CLI::ExistingFile);
  mix->add_option("--target", m_tgt, "Target waveform (donates swapped pieces)")->required()->check(CLI::ExistingFile);
  mix->add_option("--target-phn", m_tgt_phn)->required()->check(CLI::ExistingFile);
  mix->add_option("--mode", m_mode, "swap-u | swap-vu | swap-sst")->capture_default_str();
  mix->add_option("--v-start", m_vstart, "swap-vu: ordinal of the first swapped voiced run");
  mix->add_option("--v-count", m_vcount, "swap-vu: number of voiced runs swapped")->capture_default_str();
  mix->add_option("--crossfade", m_cross, "Crossfade length in samples")->capture_default_str();
  mix->add_flag("--match-gain", m_gain, "Scale target pieces to the source RMS");
  mix->add_option("-o,--output", m_out, "Output WAV; recipe goes to <stem>.recipe.json")->required();
  mix->callback([&] {
    const auto table = g.Table();
    const auto src = ReadWavFile(m_src);
    const auto tgt = ReadWavFile(m_tgt, src.sample_rate);
    const auto st = ReadPhnFile(m_src_phn, src.sample_rate, &table);
    const auto tt = ReadPhnFile(m_tgt_phn, tgt.sample_rate, &table);
    MixMode mode{ParseMixKind(m_mode), m_vstart, m_vcount};
    auto plan = PlanUtteranceMix(st, tt, mode, table, m_cross);
    if (m_gain) plan.recipe.target_gain = MatchRmsGain(src, tgt);
    WriteWavFile(m_out, Render(plan.recipe, src, tgt));
    StimulusSidecar sc{plan.recipe, "", fs::path(m_src).stem().string(), fs::path(m_tgt).stem().string(),
                       MixedReference(plan.recipe, st, tt)};
    WriteText(WithSuffix(m_out, ".recipe.json"), SidecarToJson(sc));
  });

  // spectrogram ------------------------------------------------------------
  std::string s_wav, s_out, s_format;
  std::size_t s_win = 400, s_hop = 160, s_fft = 512;
  double s_range = 80.0;
  auto* spec = app.add_subcommand("spectrogram", "Magnitude spectrogram in dB (text or PGM image)");
  spec->add_option("--wav", s_wav)->required()->check(CLI::ExistingFile);
  spec->add_option("--window", s_win)->capture_default_str();
  spec->add_option("--hop", s_hop)->capture_default_str();
  spec->add_option("--fft", s_fft)->capture_default_str();
  spec->add_option("--range-db", s_range, "PGM dynamic range")->capture_default_str();
  spec->add_option("--format", s_format, "txt | pgm (default from the output extension)");
  spec->add_option("-o,--output", s_out)->required();
  spec->callback([&] {
    const auto sg = ComputeSpectrogram(ReadWavFile(s_wav), s_win, s_hop, s_fft);
    const std::string fmt = s_format.empty() ? (fs::path(s_out).extension() == ".pgm" ? "pgm" : "txt") : s_format;
    if (fmt == "pgm") {
      WriteBinaryFile(s_out, SpectrogramToPgm(sg, s_range));
    } else if (fmt == "txt") {
      WriteText(s_out, SpectrogramToText(sg));
    } else {
      throw CLI::ValidationError("--format", "expected txt or pgm");
    }
  });

  // features ---------------------------------------------------------------
  std::string f_wav, f_out;
  bool f_no_deltas = false, f_cmn = false;
  auto* feats = app.add_subcommand("features", "MFCC (+deltas) feature archive");
  feats->add_option("--wav", f_wav)->required()->check(CLI::ExistingFile);
  feats->add_flag("--no-deltas", f_no_deltas, "13 static coefficients only");
  feats->add_flag("--cmn", f_cmn, "Per-utterance cepstral mean normalisation");
  feats->add_option("-o,--output", f_out)->required();
  feats->callback([&] {
    MfccConfig cfg;
    cfg.add_deltas = !f_no_deltas;
    cfg.cepstral_mean_norm = f_cmn;
    WriteBinaryFile(f_out, WriteFeatureArchive(ExtractFeatures(ReadWavFile(f_wav, cfg.sample_rate), cfg)));
  });

  // manifest ---------------------------------------------------------------
  std::string mf_root, mf_out;
  auto* manifest = app.add_subcommand("manifest", "Index a TIMIT-layout corpus");
  manifest->add_option("--root", mf_root)->required()->check(CLI::ExistingDirectory);
  manifest->add_option("-o,--output", mf_out)->required();
  manifest->callback([&] {
    const auto m = BuildManifest(mf_root);
    WriteText(mf_out, ManifestToCsv(m));
    for (const char* subset : {"train", "test"}) {
      std::cerr << fmt::format("{}: {} male, {} female\n", subset, m.Count(subset, Gender::kMale),
                               m.Count(subset, Gender::kFemale));
    }
  });

  // testsets ---------------------------------------------------------------
  std::string t_manifest, t_out, t_subset = "test", t_modes = "swap-u,swap-vu,swap-sst";
  TestsetOptions t_opts;
  bool t_no_orig = false;
  auto* testsets = app.add_subcommand("testsets", "Pair opposite-gender SX readings and render every mix mode");
  testsets->add_option("--manifest", t_manifest)->required()->check(CLI::ExistingFile);
  testsets->add_option("--out", t_out, "Output directory")->required();
  testsets->add_option("--subset", t_subset)->capture_default_str();
  testsets->add_option("--modes", t_modes, "Comma separated mix modes")->capture_default_str();
  testsets->add_option("--crossfade", t_opts.crossfade_len)->capture_default_str();
  testsets->add_option("--v-count", t_opts.v_swap_count)->capture_default_str();
  testsets->add_flag("--match-gain", t_opts.match_gain);
  testsets->add_flag("--no-originals", t_no_orig);
  testsets->callback([&] {
    const auto table = g.Table();
    const auto m = LoadManifest(t_manifest);
    const auto report = PairUtterances(m, t_subset);
    t_opts.modes.clear();
    for (const auto& s : Split(t_modes, ',')) t_opts.modes.push_back(ParseMixKind(s));
    t_opts.include_originals = !t_no_orig;
    t_opts.jobs = g.jobs;
    const auto result = GenerateTestsets(report.pairs, t_out, t_opts, table);
    std::string excluded = "utt_id\n";
    for (const auto& e : report.excluded) excluded += e + "\n";
    WriteText((fs::path(t_out) / "excluded.csv").string(), excluded);
    std::string errors;
    for (const auto& e : result.errors) errors += e + "\n";
    WriteText((fs::path(t_out) / "errors.log").string(), errors);
    RunDescriptor rd{"testsets", g.seed, "", CorpusHash(m),
                     {{"subset", t_subset}, {"modes", t_modes}, {"crossfade", std::to_string(t_opts.crossfade_len)},
                      {"match_gain", t_opts.match_gain ? "1" : "0"}, {"v_count", std::to_string(t_opts.v_swap_count)}}};
    rd.config_hash = ConfigHash(rd.settings);
    WriteText((fs::path(t_out) / "run.json").string(), rd.ToJson());
    std::cerr << fmt::format("pairs: {} male-source, {} female-source; excluded {} / {}; {} mixed, {} originals, {} errors\n",
                             report.male_pairs, report.female_pairs, report.male_excluded,
                             report.female_excluded, result.mixed_written, result.originals, result.errors.size());
  });

  // train ------------------------------------------------------------------
  std::string tr_manifest, tr_out, tr_gender = "all", tr_trace;
  CorpusOptions tr_corpus;
  RecognizerTrainOptions tr_opts;
  std::size_t tr_lm_order = 2;
  bool tr_cmn = false;
  auto* train = app.add_subcommand("train", "Train a monophone GMM-HMM recognizer");
  train->add_option("--manifest", tr_manifest)->required()->check(CLI::ExistingFile);
  train->add_option("--gender", tr_gender, "M, F or all")->capture_default_str();
  train->add_option("--subset", tr_corpus.subset)->capture_default_str();
  train->add_option("--max-utts", tr_corpus.max_utterances, "0 = whole subset")->capture_default_str();
  train->add_option("--gaussians", tr_opts.gaussian_budget, "Total Gaussian budget")->capture_default_str();
  train->add_option("--iterations", tr_opts.iterations)->capture_default_str();
  train->add_option("--lm-order", tr_lm_order, "2 or 3")->capture_default_str()->check(CLI::Range(2, 3));
  train->add_flag("--cmn", tr_cmn, "Per-utterance cepstral mean normalisation");
  train->add_option("--name", tr_opts.name, "Model name used as grid column")->capture_default_str();
  train->add_option("--trace", tr_trace, "Per-iteration log-likelihood CSV");
  train->add_option("-o,--output", tr_out)->required();
  train->callback([&] {
    const auto table = g.Table();
    if (tr_gender == "M" || tr_gender == "m") {
      tr_corpus.gender = Gender::kMale;
    } else if (tr_gender == "F" || tr_gender == "f") {
      tr_corpus.gender = Gender::kFemale;
    } else if (tr_gender != "all") {
      throw CLI::ValidationError("--gender", "expected M, F or all");
    }
    const auto m = LoadManifest(tr_manifest);
    tr_corpus.seed = g.seed;
    tr_corpus.jobs = g.jobs;
    tr_corpus.features.cepstral_mean_norm = tr_cmn;
    const auto corpus = LoadTrainingCorpus(m, tr_corpus, table);
    tr_opts.lm.order = tr_lm_order;
    tr_opts.features = tr_corpus.features;
    tr_opts.jobs = g.jobs;
    TrainReport report;
    const auto model = TrainRecognizer(corpus, tr_opts, &report, table);
    SaveModel(tr_out, model);
    std::string trace = "iteration,log_likelihood,frames,gaussians\n";
    for (const auto& s : report.trace) {
      trace += fmt::format("{},{:.6f},{},{}\n", s.iteration, s.log_likelihood, s.frames, s.num_gaussians);
    }
    if (!tr_trace.empty()) WriteText(tr_trace, trace);
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
    RunDescriptor rd{"train", g.seed, "", CorpusHash(m),
                     {{"gender", tr_gender}, {"subset", tr_corpus.subset},
                      {"max_utts", std::to_string(tr_corpus.max_utterances)},
                      {"gaussians", std::to_string(tr_opts.gaussian_budget)},
                      {"iterations", std::to_string(tr_opts.iterations)},
                      {"lm_order", std::to_string(tr_lm_order)}, {"cmn", tr_cmn ? "1" : "0"}}};
    rd.config_hash = ConfigHash(rd.settings);
    WriteText(WithSuffix(tr_out, ".run.json"), rd.ToJson());
    std::cerr << fmt::format("{} utterances, {} phones, {} gaussians\n", corpus.size(),
                             model.acoustic.num_phones(), model.acoustic.total_gaussians());
  });

  // decode -----------------------------------------------------------------
  std::string d_model, d_out;
  std::vector<std::string> d_wavs;
  DecodeOptions d_opts;
  auto* decode = app.add_subcommand("decode", "Phone recognition; one line per input: <wav>\\t<phones>");
  decode->add_option("--model", d_model)->required()->check(CLI::ExistingFile);
  decode->add_option("--wav", d_wavs, "Waveforms")->required()->check(CLI::ExistingFile);
  decode->add_option("--lm-weight", d_opts.lm_weight)->capture_default_str();
  decode->add_option("--insertion-penalty", d_opts.insertion_penalty)->capture_default_str();
  decode->add_option("-o,--output", d_out, "Output file (default stdout)");
  decode->callback([&] {
    const auto model = LoadModel(d_model);
    std::vector<std::string> lines(d_wavs.size());
    ParallelFor(d_wavs.size(), g.jobs, [&](std::size_t i) {
      const auto feats = ExtractFeatures(ReadWavFile(d_wavs[i], model.features.sample_rate), model.features);
      lines[i] = d_wavs[i] + "\t" + Join(ViterbiDecode(model.acoustic, model.lm, feats, d_opts)) + "\n";
    });
    std::string text;
    for (const auto& l : lines) text += l;
    WriteOut(d_out, text);
  });

  // per --------------------------------------------------------------------
  std::string p_ref, p_hyp;
  auto* per = app.add_subcommand("per", "Phone error rate after folding; one sequence per line");
  per->add_option("--ref", p_ref)->required()->check(CLI::ExistingFile);
  per->add_option("--hyp", p_hyp)->required()->check(CLI::ExistingFile);
  per->callback([&] {
    const auto table = g.Table();
    const auto ref = ReadSequences(p_ref);
    const auto hyp = ReadSequences(p_hyp);
    if (ref.size() != hyp.size()) {
      Fail(ErrorCode::kInvalidArgument, fmt::format("{} reference lines vs {} hypothesis lines", ref.size(), hyp.size()));
    }
    PerBreakdown total;
    for (std::size_t i = 0; i < ref.size(); ++i) total += PhoneErrorRate(ref[i], hyp[i], table);
    std::cout << fmt::format("PER {:.2f} (S={} D={} I={} N={})\n", total.per(), total.substitutions,
                             total.deletions, total.insertions, total.ref_length);
  });

  // grid -------------------------------------------------------------------
  std::string gr_manifest, gr_models, gr_out, gr_detail;
  GridOptions gr_opts;
  auto* grid = app.add_subcommand("grid", "Decode every stimulus with every model; condition x model PER table");
  grid->add_option("--manifest", gr_manifest, "Stimulus manifest from testsets")->required();
  grid->add_option("--models", gr_models, "Comma separated model files")->required();
  grid->add_option("--lm-weight", gr_opts.decode.lm_weight)->capture_default_str();
  grid->add_option("--insertion-penalty", gr_opts.decode.insertion_penalty)->capture_default_str();
  grid->add_option("--detail", gr_detail, "Per-cell S/D/I CSV");
  grid->add_option("-o,--output", gr_out)->required();
  grid->callback([&] {
    const auto table = g.Table();
    std::vector<RecognizerModel> models;
    for (const auto& p : Split(gr_models, ',')) models.push_back(LoadModel(p));
    const auto stimuli = LoadStimulusManifest(gr_manifest);
    gr_opts.jobs = g.jobs;
    const auto result = RunExperimentGrid(models, stimuli, gr_opts, table);
    WriteText(gr_out, result.ToCsv());
    if (!gr_detail.empty()) WriteText(gr_detail, result.ToDetailedCsv());
    RunDescriptor rd{"grid", g.seed, "", HexDigest(Fnv1a64(ReadText(gr_manifest))),
                     {{"models", gr_models}, {"lm_weight", fmt::format("{}", gr_opts.decode.lm_weight)},
                      {"insertion_penalty", fmt::format("{}", gr_opts.decode.insertion_penalty)}}};
    rd.config_hash = ConfigHash(rd.settings);
    WriteText(WithSuffix(gr_out, ".run.json"), rd.ToJson());
    std::cout << result.ToCsv();
  });

  // score-subjective -------------------------------------------------------
  std::string ss_in, ss_out;
  auto* score = app.add_subcommand("score-subjective", "Listening-test accuracy per condition");
  score->add_option("--responses", ss_in, "CSV with header condition,response")->required()->check(CLI::ExistingFile);
  score->add_option("-o,--output", ss_out, "Output file (default stdout)");
  score->callback([&] {
    std::vector<SubjectiveRecord> records;
    std::istringstream in(ReadText(ss_in));
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      const auto fields = Split(line, ',');
      if (header) {
        if (fields != std::vector<std::string>{"condition", "response"}) {
          Fail(ErrorCode::kMalformedLine, "expected header condition,response");
        }
        header = false;
        continue;
      }
      if (fields.size() != 2) Fail(ErrorCode::kMalformedLine, line);
      records.push_back({fields[0], ParseChoice(fields[1])});
    }
    WriteOut(ss_out, ScoreSubjective(records).ToCsv());
  });

  // serve ------------------------------------------------------------------
  std::string sv_config, sv_manifest, sv_host, sv_log;
  std::optional<int> sv_port;
  auto* serve = app.add_subcommand("serve", "Run the listening-test HTTP service");
  serve->add_option("--service-config", sv_config, "Service key/value file")->check(CLI::ExistingFile);
  serve->add_option("--manifest", sv_manifest, "Stimulus manifest");
  serve->add_option("--host", sv_host);
  serve->add_option("--port", sv_port);
  serve->add_option("--log-dir", sv_log, "Directory for per-session JSONL event logs");
  serve->callback([&] {
    auto kv = sv_config.empty() ? KeyValueConfig{} : KeyValueConfig::Load(sv_config);
    auto cfg = listening::ServiceConfig::FromConfig(kv);
    if (!sv_manifest.empty()) cfg.manifest_path = sv_manifest;
    if (!sv_host.empty()) cfg.host = sv_host;
    if (sv_port) cfg.port = *sv_port;
    if (!sv_log.empty()) cfg.log_dir = sv_log;
    if (cfg.manifest_path.empty()) throw CLI::RequiredError("--manifest");
    listening::SessionManager sessions(LoadStimulusManifest(cfg.manifest_path), cfg.protocol, cfg.seed,
                                       cfg.log_dir);
    listening::HttpServer server(sessions);
    const int port = server.Bind(cfg.host, cfg.port);
    g_server = &server;
    std::signal(SIGINT, HandleSignal);
    std::signal(SIGTERM, HandleSignal);
    std::cerr << fmt::format("listening on http://{}:{} ({} stimuli, {} per session)\n", cfg.host, port,
                             sessions.PublicStimulusIds().size(), cfg.protocol.session_length());
    server.Run();
    g_server = nullptr;
  });

  // synth-corpus -----------------------------------------------------------
  std::string sc_out;
  SynthCorpusOptions sc_opts;
  auto* synth = app.add_subcommand("synth-corpus", "Write a small formant-synthesised corpus in TIMIT layout");
  synth->add_option("--out", sc_out)->required();
  synth->add_option("--train-sentences", sc_opts.train_sentences)->capture_default_str();
  synth->add_option("--test-sentences", sc_opts.test_sentences)->capture_default_str();
  synth->add_option("--train-speakers", sc_opts.train_speakers_per_gender, "Per gender")->capture_default_str();
  synth->add_option("--test-speakers", sc_opts.test_speakers_per_gender, "Per gender")->capture_default_str();
  synth->add_option("--sentences-per-speaker", sc_opts.sentences_per_speaker)->capture_default_str();
  synth->callback([&] {
    sc_opts.seed = g.seed;
    const auto s = WriteSynthCorpus(sc_out, sc_opts);
    std::cerr << fmt::format("train {}M/{}F, test {}M/{}F utterances\n", s.train_male, s.train_female,
                             s.test_male, s.test_female);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
