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

#include "chimera/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <map>
#include <numbers>
#include <string_view>

#include "chimera/error.hpp"
#include "chimera/random.hpp"

namespace chimera {
namespace {

constexpr int kRate = 16000;
constexpr double kMaxResonance = 7600.0;

enum class Kind {
  kVowel,
  kSemivowel,
  kNasal,
  kFricative,
  kAspirate,
  kStopRelease,
  kAffricate,
  kClosure,
  kSilence,
};

struct Formants {
  std::array<double, 3> start{};
  std::array<double, 3> end{};
};

struct PhoneSpec {
  Kind kind = Kind::kSilence;
  double duration_ms = 60.0;
  double voice = 0.0;
  double aspiration = 0.0;
  double frication = 0.0;
  double fric_hz = 0.0;
  double fric_bw = 0.0;
  double burst = 0.0;
  double burst_hz = 0.0;
  double burst_bw = 0.0;
  double burst_ms = 0.0;
  bool has_formants = false;
  Formants formants;
};

PhoneSpec Vowel(double f1, double f2, double f3, double ms = 110.0) {
  PhoneSpec p;
  p.kind = Kind::kVowel;
  p.duration_ms = ms;
  p.voice = 1.0;
  p.has_formants = true;
  p.formants = {{f1, f2, f3}, {f1, f2, f3}};
  return p;
}

PhoneSpec Diphthong(std::array<double, 3> a, std::array<double, 3> b) {
  PhoneSpec p = Vowel(a[0], a[1], a[2], 150.0);
  p.formants.end = b;
  return p;
}

PhoneSpec Sonorant(Kind kind, double voice, double f1, double f2, double f3) {
  PhoneSpec p = Vowel(f1, f2, f3, 65.0);
  p.kind = kind;
  p.voice = voice;
  return p;
}

PhoneSpec Fricative(double hz, double bw, double amp, double voice, double ms) {
  PhoneSpec p;
  p.kind = Kind::kFricative;
  p.duration_ms = ms;
  p.frication = amp;
  p.fric_hz = hz;
  p.fric_bw = bw;
  p.voice = voice;
  if (voice > 0.0) {
    p.has_formants = true;
    p.formants = {{220, 1300, 2500}, {220, 1300, 2500}};
  }
  return p;
}

PhoneSpec Release(double hz, double bw, bool voiced) {
  PhoneSpec p;
  p.kind = Kind::kStopRelease;
  p.duration_ms = voiced ? 22.0 : 50.0;
  p.burst = voiced ? 0.45 : 0.7;
  p.burst_hz = hz;
  p.burst_bw = bw;
  p.burst_ms = voiced ? 7.0 : 11.0;
  p.aspiration = voiced ? 0.0 : 0.35;
  p.voice = voiced ? 0.45 : 0.0;
  return p;
}

PhoneSpec Affricate(bool voiced) {
  PhoneSpec p = Fricative(2700, 1000, 0.4, voiced ? 0.25 : 0.0, 85.0);
  p.kind = Kind::kAffricate;
  p.burst = 0.5;
  p.burst_hz = 3500;
  p.burst_bw = 2000;
  p.burst_ms = 8.0;
  return p;
}

PhoneSpec Closure(bool voiced) {
  PhoneSpec p;
  p.kind = Kind::kClosure;
  p.duration_ms = 60.0;
  if (voiced) {
    p.voice = 0.08;
    p.has_formants = true;
    p.formants = {{200, 1100, 2500}, {200, 1100, 2500}};
  }
  return p;
}

const std::map<std::string, PhoneSpec, std::less<>>& PhoneSpecs() {
  static const std::map<std::string, PhoneSpec, std::less<>> specs = [] {
    std::map<std::string, PhoneSpec, std::less<>> m;
    m["iy"] = Vowel(270, 2290, 3010);
    m["ih"] = Vowel(390, 1990, 2550, 90.0);
    m["eh"] = Vowel(530, 1840, 2480, 95.0);
    m["ae"] = Vowel(660, 1720, 2410, 120.0);
    m["aa"] = Vowel(730, 1090, 2440, 120.0);
    m["ah"] = Vowel(640, 1190, 2390, 90.0);
    m["ao"] = Vowel(570, 840, 2410, 120.0);
    m["uh"] = Vowel(440, 1020, 2240, 85.0);
    m["uw"] = Vowel(300, 870, 2240);
    m["er"] = Vowel(490, 1350, 1690);
    m["ey"] = Diphthong({480, 1950, 2550}, {330, 2200, 2700});
    m["ay"] = Diphthong({700, 1200, 2500}, {400, 1950, 2600});
    m["ow"] = Diphthong({530, 950, 2400}, {400, 800, 2300});
    m["l"] = Sonorant(Kind::kSemivowel, 0.6, 360, 1000, 2700);
    m["r"] = Sonorant(Kind::kSemivowel, 0.6, 420, 1250, 1600);
    m["w"] = Sonorant(Kind::kSemivowel, 0.55, 300, 700, 2200);
    m["y"] = Sonorant(Kind::kSemivowel, 0.55, 300, 2100, 3000);
    m["m"] = Sonorant(Kind::kNasal, 0.45, 280, 1000, 2200);
    m["n"] = Sonorant(Kind::kNasal, 0.45, 280, 1500, 2500);
    m["ng"] = Sonorant(Kind::kNasal, 0.45, 280, 2000, 2700);
    m["s"] = Fricative(5000, 1500, 0.35, 0.0, 115.0);
    m["sh"] = Fricative(2600, 900, 0.45, 0.0, 115.0);
    m["f"] = Fricative(4200, 3500, 0.05, 0.0, 95.0);
    m["th"] = Fricative(4800, 3000, 0.04, 0.0, 90.0);
    m["z"] = Fricative(5000, 1500, 0.22, 0.25, 85.0);
    m["v"] = Fricative(4200, 3500, 0.04, 0.3, 60.0);
    m["dh"] = Fricative(4800, 3000, 0.035, 0.3, 55.0);
    PhoneSpec hh;
    hh.kind = Kind::kAspirate;
    hh.duration_ms = 60.0;
    hh.aspiration = 0.4;
    m["hh"] = hh;
    m["p"] = Release(900, 1400, false);
    m["t"] = Release(4200, 2200, false);
    m["k"] = Release(1900, 700, false);
    m["b"] = Release(900, 1400, true);
    m["d"] = Release(4000, 2200, true);
    m["g"] = Release(1800, 700, true);
    m["ch"] = Affricate(false);
    m["jh"] = Affricate(true);
    for (const char* c : {"pcl", "tcl", "kcl"}) m[c] = Closure(false);
    for (const char* c : {"bcl", "dcl", "gcl"}) m[c] = Closure(true);
    PhoneSpec sil;
    sil.duration_ms = 120.0;
    m["pau"] = sil;
    sil.duration_ms = 200.0;
    m["h#"] = sil;
    return m;
  }();
  return specs;
}

const PhoneSpec& SpecOf(std::string_view phone) {
  const auto& specs = PhoneSpecs();
  const auto it = specs.find(phone);
  if (it == specs.end()) Fail(ErrorCode::kUnknownPhone, "synthesizer has no voice for '" + std::string(phone) + "'");
  return it->second;
}

// Two-pole resonator with unity gain at DC.
struct Resonator {
  double a = 1.0, b = 0.0, c = 0.0, y1 = 0.0, y2 = 0.0;

  void Set(double hz, double bw) {
    const double t = 1.0 / kRate;
    hz = std::min(hz, kMaxResonance);
    c = -std::exp(-2.0 * std::numbers::pi * bw * t);
    b = 2.0 * std::exp(-std::numbers::pi * bw * t) * std::cos(2.0 * std::numbers::pi * hz * t);
    a = 1.0 - b - c;
  }
  double Step(double x) {
    const double y = a * x + b * y1 + c * y2;
    y2 = y1;
    y1 = y;
    return y;
  }
};

// Peak-normalised band-pass: unit gain at the centre frequency.
struct BandPass {
  Resonator r;
  double norm = 1.0;

  void Set(double hz, double bw) {
    r.Set(hz, bw);
    const double w = 2.0 * std::numbers::pi * std::min(hz, kMaxResonance) / kRate;
    // |H(e^jw)| of a / (1 - b z^-1 - c z^-2) at the centre frequency.
    const double re = 1.0 - r.b * std::cos(w) - r.c * std::cos(2.0 * w);
    const double im = r.b * std::sin(w) + r.c * std::sin(2.0 * w);
    norm = std::sqrt(re * re + im * im) / std::abs(r.a);
  }
  double Step(double x) { return norm * r.Step(x); }
};

double Smooth(double current, double target, double coeff) { return target + coeff * (current - target); }

std::string SpeakerLetters(std::size_t k) {
  std::string s(3, 'a');
  s[0] = static_cast<char>('a' + (k / 676) % 26);
  s[1] = static_cast<char>('a' + (k / 26) % 26);
  s[2] = static_cast<char>('a' + k % 26);
  return s;
}

}  // namespace

char GenderLetter(Gender g) { return g == Gender::kMale ? 'M' : 'F'; }

SpeakerProfile RandomSpeaker(Gender gender, const std::string& id, uint64_t seed) {
  Rng rng(seed);
  SpeakerProfile s;
  s.id = id;
  s.gender = gender;
  if (gender == Gender::kMale) {
    s.f0_hz = std::clamp(rng.Normal(115.0, 12.0), 85.0, 150.0);
    s.tract_scale = std::clamp(rng.Normal(1.0, 0.03), 0.92, 1.08);
    s.breathiness = 0.02;
  } else {
    s.f0_hz = std::clamp(rng.Normal(210.0, 18.0), 165.0, 260.0);
    s.tract_scale = std::clamp(rng.Normal(1.17, 0.03), 1.09, 1.25);
    s.breathiness = 0.04;
  }
  s.rate = std::clamp(rng.Normal(1.0, 0.07), 0.85, 1.15);
  s.level = rng.Uniform(0.25, 0.4);
  return s;
}

SynthUtterance SynthesizeUtterance(const std::vector<std::string>& phones,
                                   const SpeakerProfile& speaker, uint64_t seed) {
  if (phones.empty()) Fail(ErrorCode::kEmptySequence, "nothing to synthesize");
  Rng rng(seed);
  const double scale = speaker.tract_scale;

  SynthUtterance out;
  out.tier.sample_rate = kRate;
  int64_t cursor = 0;
  for (const auto& p : phones) {
    const PhoneSpec& spec = SpecOf(p);
    double ms = spec.duration_ms * std::clamp(rng.Normal(1.0, 0.12), 0.7, 1.4) / speaker.rate;
    ms = std::max(ms, 35.0);
    const auto n = static_cast<int64_t>(std::llround(ms * kRate / 1000.0));
    out.tier.segments.push_back({p, cursor, cursor + n});
    cursor += n;
  }

  // Phones without their own formants borrow the nearest following ones
  // (aspiration and bursts colour towards the next vowel).
  std::vector<Formants> tracks(phones.size());
  for (std::size_t i = 0; i < phones.size(); ++i) {
    const PhoneSpec* src = nullptr;
    for (std::size_t j = i; j < phones.size() && src == nullptr; ++j) {
      if (SpecOf(phones[j]).has_formants) src = &SpecOf(phones[j]);
    }
    for (std::size_t j = i + 1; j-- > 0 && src == nullptr;) {
      if (SpecOf(phones[j]).has_formants) src = &SpecOf(phones[j]);
    }
    tracks[i] = src != nullptr ? src->formants : Formants{{500, 1500, 2500}, {500, 1500, 2500}};
    for (auto* arr : {&tracks[i].start, &tracks[i].end}) {
      for (double& f : *arr) f = std::min(f * scale, kMaxResonance);
    }
  }

  const auto total = static_cast<std::size_t>(cursor);
  std::vector<double> signal(total, 0.0);
  std::array<Resonator, 4> cascade;
  const std::array<double, 4> bandwidths{70.0, 100.0, 160.0, 250.0};
  BandPass fric_filter;
  BandPass burst_filter;
  std::array<double, 3> formant{tracks[0].start};
  double voice = 0.0, asp = 0.0, fric = 0.0;
  double glottal1 = 0.0, glottal2 = 0.0, prev_cascade = 0.0, prev_fric = 0.0;
  double phase = 0.0;
  const double gain_coeff = std::exp(-1.0 / (0.004 * kRate));
  const double formant_coeff = std::exp(-1.0 / (0.015 * kRate));
  const double f4 = std::min(3500.0 * scale, kMaxResonance);

  std::size_t seg = 0;
  for (std::size_t n = 0; n < total; ++n) {
    while (n >= static_cast<std::size_t>(out.tier.segments[seg].end)) ++seg;
    const auto& segment = out.tier.segments[seg];
    const PhoneSpec& spec = SpecOf(segment.label);
    const double frac = static_cast<double>(static_cast<int64_t>(n) - segment.start) /
                        static_cast<double>(segment.length());
    const auto since_start = static_cast<double>(static_cast<int64_t>(n) - segment.start) * 1000.0 / kRate;

    for (std::size_t k = 0; k < 3; ++k) {
      const double target = tracks[seg].start[k] + (tracks[seg].end[k] - tracks[seg].start[k]) * frac;
      formant[k] = Smooth(formant[k], target, formant_coeff);
    }
    if (n % 8 == 0) {
      for (std::size_t k = 0; k < 3; ++k) cascade[k].Set(formant[k], bandwidths[k]);
      cascade[3].Set(f4, bandwidths[3]);
      if (spec.frication > 0.0) fric_filter.Set(spec.fric_hz * scale, spec.fric_bw * scale);
      if (spec.burst > 0.0) burst_filter.Set(spec.burst_hz * scale, spec.burst_bw * scale);
    }

    const bool in_burst = spec.burst > 0.0 && since_start < spec.burst_ms;
    double voice_target = spec.voice;
    double asp_target = spec.aspiration;
    if (spec.kind == Kind::kStopRelease && in_burst) voice_target = asp_target = 0.0;
    voice = Smooth(voice, voice_target, gain_coeff);
    asp = Smooth(asp, asp_target, gain_coeff);
    fric = Smooth(fric, spec.frication, gain_coeff);

    const double progress = static_cast<double>(n) / static_cast<double>(total);
    const double f0 = speaker.f0_hz * (1.1 - 0.2 * progress) *
                      (1.0 + 0.02 * std::sin(2.0 * std::numbers::pi * 0.8 * n / kRate)) *
                      (1.0 + 0.005 * rng.Normal());
    phase += f0 / kRate;
    double pulse = 0.0;
    if (phase >= 1.0) {
      phase -= 1.0;
      pulse = 1.0;
    }
    // Spectral tilt of the glottal source.
    glottal1 = 0.93 * glottal1 + pulse;
    glottal2 = 0.93 * glottal2 + glottal1;
    const double source = voice * (0.4 * glottal2 + speaker.breathiness * rng.Normal()) +
                          asp * 0.5 * rng.Normal();
    double y = source;
    for (auto& r : cascade) y = r.Step(y);
    const double radiated = y - prev_cascade;
    prev_cascade = y;

    double noise_out = 0.0;
    if (fric > 1e-6 || spec.frication > 0.0) {
      const double f = fric_filter.Step(fric * rng.Normal());
      noise_out += f - 0.5 * prev_fric;
      prev_fric = f;
    }
    if (in_burst) {
      const double env = std::exp(-since_start / (0.35 * spec.burst_ms));
      noise_out += burst_filter.Step(spec.burst * env * rng.Normal());
    }
    signal[n] = radiated + noise_out;
  }

  double peak = 0.0;
  for (double x : signal) peak = std::max(peak, std::abs(x));
  const double gain = peak > 0.0 ? speaker.level / peak : 1.0;
  Rng floor_noise(MixSeed(seed, 0xf1));
  out.wave.sample_rate = kRate;
  out.wave.samples.resize(total);
  for (std::size_t n = 0; n < total; ++n) {
    const double x = std::clamp(signal[n] * gain + 2e-4 * floor_noise.Normal(), -0.99, 0.99);
    // Keep the in-memory signal on the PCM16 grid so files round-trip exactly.
    out.wave.samples[n] = static_cast<double>(QuantizeSample(x)) / 32768.0;
  }
  return out;
}

std::vector<std::string> GenerateSentence(uint64_t seed) {
  static const std::vector<std::string> kVowels{"iy", "ih", "eh", "ae", "aa", "ah", "ao",
                                                "uh", "uw", "er", "ey", "ay", "ow"};
  static const std::vector<std::string> kOnsets{"p", "t",  "k",  "b", "d", "g", "f",
                                                "th", "s", "sh", "v", "dh", "z", "hh",
                                                "m", "n", "l",  "r", "w", "y", "ch", "jh"};
  static const std::vector<std::string> kCodas{"p", "t", "k",  "b", "d", "g", "f", "th", "s",
                                                "sh", "v", "z", "m", "n", "ng", "l", "r", "ch", "jh"};
  auto expand = [](const std::string& c, std::vector<std::string>& out) {
    static const std::map<std::string, std::string> closure{
        {"p", "pcl"}, {"t", "tcl"}, {"k", "kcl"}, {"b", "bcl"}, {"d", "dcl"},
        {"g", "gcl"}, {"ch", "tcl"}, {"jh", "dcl"}};
    if (const auto it = closure.find(c); it != closure.end()) out.push_back(it->second);
    out.push_back(c);
  };
  Rng rng(seed);
  std::vector<std::string> out{"h#"};
  const auto words = 4 + rng.Below(3);
  for (uint64_t w = 0; w < words; ++w) {
    if (w > 0) out.push_back("|");
    const auto syllables = 1 + rng.Below(3);
    for (uint64_t s = 0; s < syllables; ++s) {
      if (rng.Bernoulli(0.75)) expand(kOnsets[rng.Below(kOnsets.size())], out);
      out.push_back(kVowels[rng.Below(kVowels.size())]);
      if (rng.Bernoulli(0.45)) expand(kCodas[rng.Below(kCodas.size())], out);
    }
  }
  out.push_back("h#");
  return out;
}

std::vector<std::string> RealizeSentence(const std::vector<std::string>& canonical, uint64_t seed) {
  Rng rng(seed);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < canonical.size(); ++i) {
    const auto& p = canonical[i];
    if (p == "|") {
      if (rng.Bernoulli(0.25)) out.push_back("pau");
      continue;
    }
    const bool is_closure = p.size() == 3 && p.ends_with("cl");
    if (is_closure && i + 1 < canonical.size()) {
      const double r = rng.Uniform();
      if (r < 0.08) continue;  // release only
      if (r < 0.16 && canonical[i + 1].size() == 1) {
        out.push_back(p);  // unreleased stop
        ++i;
        continue;
      }
    }
    out.push_back(p);
  }
  return out;
}

SynthCorpusSummary WriteSynthCorpus(const std::string& root, const SynthCorpusOptions& options) {
  namespace fs = std::filesystem;
  SynthCorpusSummary summary;
  if (options.test_sentences <= options.single_gender_test_sentences) {
    Fail(ErrorCode::kInvalidArgument, "test sentences must exceed single-gender sentences");
  }
  auto sentence = [&](bool train, std::size_t k) {
    const uint64_t key = (train ? 0x1000 : 0x2000) + k;
    return GenerateSentence(MixSeed(options.seed, key));
  };
  auto write_speaker = [&](bool train, Gender g, std::size_t k) {
    const std::string id = std::string(1, g == Gender::kMale ? 'm' : 'f') + SpeakerLetters(k) +
                           (train ? "0" : "1");
    const uint64_t speaker_key = (train ? 0x10000 : 0x20000) + (g == Gender::kMale ? 0 : 0x8000) + k;
    const auto profile = RandomSpeaker(g, id, MixSeed(options.seed, speaker_key));
    const fs::path dir = fs::path(root) / (train ? "train" : "test") / "dr1" / id;
    fs::create_directories(dir);
    const std::size_t shared = options.test_sentences - options.single_gender_test_sentences;
    const std::size_t pool = train ? options.train_sentences
                                   : (g == Gender::kMale ? options.test_sentences : shared);
    for (std::size_t i = 0; i < options.sentences_per_speaker; ++i) {
      const std::size_t s = (k * options.sentences_per_speaker + i) % pool;
      const std::string name = "sx" + std::to_string((train ? 10 : 300) + s);
      const uint64_t utt_seed = MixSeed(speaker_key, s);
      const auto phones = RealizeSentence(sentence(train, s), utt_seed);
      const auto utt = SynthesizeUtterance(phones, profile, MixSeed(utt_seed, 7));
      WriteWavFile((dir / (name + ".wav")).string(), utt.wave);
      const auto text = SerializePhn(utt.tier);
      WriteBinaryFile((dir / (name + ".phn")).string(),
                      std::span(reinterpret_cast<const uint8_t*>(text.data()), text.size()));
      auto& counter = train ? (g == Gender::kMale ? summary.train_male : summary.train_female)
                            : (g == Gender::kMale ? summary.test_male : summary.test_female);
      ++counter;
    }
  };
  for (bool train : {true, false}) {
    const std::size_t speakers =
        train ? options.train_speakers_per_gender : options.test_speakers_per_gender;
    for (Gender g : {Gender::kMale, Gender::kFemale}) {
      for (std::size_t k = 0; k < speakers; ++k) write_speaker(train, g, k);
    }
  }
  return summary;
}

}  // namespace chimera
