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

#include "chimera/recognizer/acoustic_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "chimera/error.hpp"

namespace chimera {

void DiagGmm::AddComponent(double weight, std::vector<double> mean, std::vector<double> var) {
  if (mean.size() != dim_ || var.size() != dim_) {
    Fail(ErrorCode::kDimensionMismatch, "component of dim " + std::to_string(mean.size()) +
                                            " in a " + std::to_string(dim_) + "-dim mixture");
  }
  weights_.push_back(weight);
  means_.push_back(std::move(mean));
  vars_.push_back(std::move(var));
}

void DiagGmm::RemoveComponent(std::size_t c) {
  weights_.erase(weights_.begin() + static_cast<std::ptrdiff_t>(c));
  means_.erase(means_.begin() + static_cast<std::ptrdiff_t>(c));
  vars_.erase(vars_.begin() + static_cast<std::ptrdiff_t>(c));
  const double total = [&] {
    double s = 0.0;
    for (double w : weights_) s += w;
    return s;
  }();
  if (total > 0.0) {
    for (double& w : weights_) w /= total;
  }
}

void DiagGmm::Precompute() {
  const double log_2pi = std::log(2.0 * std::numbers::pi);
  gconst_.resize(size());
  inv_vars_.resize(size());
  for (std::size_t c = 0; c < size(); ++c) {
    double log_det = 0.0;
    inv_vars_[c].resize(dim_);
    for (std::size_t d = 0; d < dim_; ++d) {
      log_det += std::log(vars_[c][d]);
      inv_vars_[c][d] = 1.0 / vars_[c][d];
    }
    const double lw = weights_[c] > 0.0 ? std::log(weights_[c])
                                        : -std::numeric_limits<double>::infinity();
    gconst_[c] = lw - 0.5 * (static_cast<double>(dim_) * log_2pi + log_det);
  }
}

double DiagGmm::ComponentLogLikelihoods(std::span<const double> x, std::span<double> out) const {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < size(); ++c) {
    const auto& mu = means_[c];
    const auto& iv = inv_vars_[c];
    double quad = 0.0;
    for (std::size_t d = 0; d < dim_; ++d) {
      const double diff = x[d] - mu[d];
      quad += diff * diff * iv[d];
    }
    out[c] = gconst_[c] - 0.5 * quad;
    best = std::max(best, out[c]);
  }
  if (!std::isfinite(best)) return best;
  double acc = 0.0;
  for (std::size_t c = 0; c < size(); ++c) acc += std::exp(out[c] - best);
  return best + std::log(acc);
}

double DiagGmm::LogLikelihood(std::span<const double> x) const {
  double stack[64];
  std::vector<double> heap;
  std::span<double> buf;
  if (size() <= 64) {
    buf = std::span<double>(stack, size());
  } else {
    heap.resize(size());
    buf = heap;
  }
  return ComponentLogLikelihoods(x, buf);
}

std::size_t AcousticModel::total_gaussians() const {
  std::size_t n = 0;
  for (const auto& h : hmms) {
    for (const auto& s : h.states) n += s.size();
  }
  return n;
}

std::optional<std::size_t> AcousticModel::PhoneIndex(const std::string& phone) const {
  const auto it = std::lower_bound(hmms.begin(), hmms.end(), phone,
                                   [](const PhoneHmm& h, const std::string& p) { return h.phone < p; });
  if (it == hmms.end() || it->phone != phone) return std::nullopt;
  return static_cast<std::size_t>(it - hmms.begin());
}

std::size_t AcousticModel::RequirePhoneIndex(const std::string& phone) const {
  const auto idx = PhoneIndex(phone);
  if (!idx) Fail(ErrorCode::kUnknownPhone, phone + " is not in the acoustic model");
  return *idx;
}

std::vector<std::string> AcousticModel::phones() const {
  std::vector<std::string> out;
  out.reserve(hmms.size());
  for (const auto& h : hmms) out.push_back(h.phone);
  return out;
}

void AcousticModel::Precompute() {
  for (auto& h : hmms) {
    for (auto& s : h.states) s.Precompute();
  }
}

}  // namespace chimera
