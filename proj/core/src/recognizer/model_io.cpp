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

#include "chimera/recognizer/model_io.hpp"

#include <fstream>
#include <sstream>

#include "chimera/error.hpp"
#include "json.hpp"

namespace chimera {

using nlohmann::json;

std::string SerializeModel(const RecognizerModel& model) {
  const auto& am = model.acoustic;
  json j;
  j["format"] = "chimera-monophone";
  j["version"] = kModelFormatVersion;
  j["name"] = model.name;
  const auto& f = model.features;
  j["features"] = {{"sample_rate", f.sample_rate}, {"frame_len", f.frame_len},
                   {"frame_hop", f.frame_hop},     {"fft_size", f.fft_size},
                   {"num_mel", f.num_mel},         {"num_ceps", f.num_ceps},
                   {"preemphasis", f.preemphasis}, {"low_freq", f.low_freq},
                   {"high_freq", f.high_freq},     {"log_floor", f.log_floor},
                   {"delta_window", f.delta_window}, {"add_deltas", f.add_deltas},
                   {"cepstral_mean_norm", f.cepstral_mean_norm}};
  j["feature_dim"] = am.feature_dim;
  j["gaussian_budget"] = am.gaussian_budget;
  j["var_floor"] = am.var_floor;
  j["unseen_phones"] = am.unseen_phones;
  auto& phones = j["phones"] = json::array();
  for (const auto& h : am.hmms) {
    json ph;
    ph["phone"] = h.phone;
    auto& states = ph["states"] = json::array();
    for (std::size_t s = 0; s < kStatesPerPhone; ++s) {
      states.push_back({{"self_loop", h.self_loop[s]},
                        {"weights", h.states[s].weights()},
                        {"means", h.states[s].means()},
                        {"vars", h.states[s].vars()}});
    }
    phones.push_back(std::move(ph));
  }
  j["lm"] = {{"order", model.lm.order()}, {"vocab", model.lm.vocab()}, {"log_probs", model.lm.table()}};
  return j.dump();
}

RecognizerModel DeserializeModel(std::string_view text) {
  RecognizerModel m;
  try {
    const auto j = json::parse(text);
    if (j.at("format") != "chimera-monophone") Fail(ErrorCode::kBadModelFile, "unknown format tag");
    if (j.at("version").get<int>() != kModelFormatVersion) {
      Fail(ErrorCode::kBadModelFile, "unsupported model version " + j.at("version").dump());
    }
    m.name = j.value("name", "");
    if (j.contains("features")) {
      const auto& f = j["features"];
      m.features.sample_rate = f.at("sample_rate");
      m.features.frame_len = f.at("frame_len");
      m.features.frame_hop = f.at("frame_hop");
      m.features.fft_size = f.at("fft_size");
      m.features.num_mel = f.at("num_mel");
      m.features.num_ceps = f.at("num_ceps");
      m.features.preemphasis = f.at("preemphasis");
      m.features.low_freq = f.at("low_freq");
      m.features.high_freq = f.at("high_freq");
      m.features.log_floor = f.at("log_floor");
      m.features.delta_window = f.at("delta_window");
      m.features.add_deltas = f.at("add_deltas");
      m.features.cepstral_mean_norm = f.at("cepstral_mean_norm");
    }
    auto& am = m.acoustic;
    am.feature_dim = j.at("feature_dim");
    am.gaussian_budget = j.at("gaussian_budget");
    am.var_floor = j.at("var_floor").get<std::vector<double>>();
    am.unseen_phones = j.value("unseen_phones", std::vector<std::string>{});
    for (const auto& ph : j.at("phones")) {
      PhoneHmm h;
      h.phone = ph.at("phone");
      const auto& states = ph.at("states");
      if (states.size() != kStatesPerPhone) Fail(ErrorCode::kBadModelFile, h.phone + ": state count");
      for (std::size_t s = 0; s < kStatesPerPhone; ++s) {
        const auto& st = states[s];
        h.self_loop[s] = st.at("self_loop");
        DiagGmm gmm(am.feature_dim);
        const auto w = st.at("weights").get<std::vector<double>>();
        const auto mu = st.at("means").get<std::vector<std::vector<double>>>();
        const auto var = st.at("vars").get<std::vector<std::vector<double>>>();
        if (mu.size() != w.size() || var.size() != w.size()) {
          Fail(ErrorCode::kBadModelFile, h.phone + ": mixture arrays differ in length");
        }
        for (std::size_t c = 0; c < w.size(); ++c) gmm.AddComponent(w[c], mu[c], var[c]);
        h.states[s] = std::move(gmm);
      }
      am.hmms.push_back(std::move(h));
    }
    if (!std::is_sorted(am.hmms.begin(), am.hmms.end(),
                        [](const PhoneHmm& a, const PhoneHmm& b) { return a.phone < b.phone; })) {
      Fail(ErrorCode::kBadModelFile, "phones are not sorted");
    }
    am.Precompute();
    const auto& lm = j.at("lm");
    m.lm = PhoneLm(lm.at("order").get<std::size_t>(), lm.at("vocab").get<std::vector<std::string>>(),
                   lm.at("log_probs").get<std::vector<double>>());
  } catch (const json::exception& e) {
    Fail(ErrorCode::kBadModelFile, e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kBadModelFile) throw;
    Fail(ErrorCode::kBadModelFile, e.what());
  }
  return m;
}

void SaveModel(const std::string& path, const RecognizerModel& model) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path);
  out << SerializeModel(model);
}

RecognizerModel LoadModel(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kMissingModel, path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return DeserializeModel(ss.str());
}

}  // namespace chimera
