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

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace chimera {

// Diagonal-covariance Gaussian mixture. Call Precompute() after editing
// weights, means or variances directly.
class DiagGmm {
 public:
  DiagGmm() = default;
  explicit DiagGmm(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return weights_.size(); }

  void AddComponent(double weight, std::vector<double> mean, std::vector<double> var);
  void RemoveComponent(std::size_t c);
  void Precompute();

  double LogLikelihood(std::span<const double> x) const;
  // Per-component log(w_c N(x; c)); returns the total log-likelihood.
  double ComponentLogLikelihoods(std::span<const double> x, std::span<double> out) const;

  std::vector<double>& weights() { return weights_; }
  const std::vector<double>& weights() const { return weights_; }
  std::vector<std::vector<double>>& means() { return means_; }
  const std::vector<std::vector<double>>& means() const { return means_; }
  std::vector<std::vector<double>>& vars() { return vars_; }
  const std::vector<std::vector<double>>& vars() const { return vars_; }

 private:
  std::size_t dim_ = 0;
  std::vector<double> weights_;
  std::vector<std::vector<double>> means_;
  std::vector<std::vector<double>> vars_;
  std::vector<double> gconst_;
  std::vector<std::vector<double>> inv_vars_;
};

inline constexpr std::size_t kStatesPerPhone = 3;

// Three emitting states, left to right. Each state either loops or advances;
// the last state's advance is the phone exit.
struct PhoneHmm {
  std::string phone;
  std::array<double, kStatesPerPhone> self_loop{0.75, 0.75, 0.75};
  std::array<DiagGmm, kStatesPerPhone> states;
};

class AcousticModel {
 public:
  std::size_t feature_dim = 39;
  std::size_t gaussian_budget = 1000;
  std::vector<double> var_floor;
  std::vector<PhoneHmm> hmms;  // sorted by phone symbol
  std::vector<std::string> unseen_phones;

  std::size_t num_phones() const { return hmms.size(); }
  std::size_t total_gaussians() const;
  std::optional<std::size_t> PhoneIndex(const std::string& phone) const;
  std::size_t RequirePhoneIndex(const std::string& phone) const;
  std::vector<std::string> phones() const;
  void Precompute();
};

}  // namespace chimera
