// Copyright 2026 The ConceptVec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CONCEPTVEC_CONFIG_H_
#define CONCEPTVEC_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "conceptvec/dissection.h"
#include "conceptvec/thresholds.h"
#include "conceptvec/weights.h"
#include "json.hpp"

namespace conceptvec {

/// Effective parameters of a CLI run. Defaults are the published
/// hyperparameters; a config file overrides them and flags override both.
struct RunConfig {
  std::string dataset;  // manifest path
  std::string layer;
  double tau = kDefaultTau;
  ThresholdScope threshold_scope = ThresholdScope::kAllImages;
  TrainConfig training;
  Task task = Task::kSegmentation;
  std::vector<int> f_sweep;  // empty: the task's default sweep
  std::string out = "out";
  int threads = 1;
  // Classification eval: subsample the larger class with this seed.
  std::optional<std::uint64_t> resample_seed;

  /// The sweep actually used: f_sweep, or the task default clipped to K.
  std::vector<int> EffectiveSweep(int filters) const;
};

/// Throws Error(kSchema) for unknown keys or ill-typed values. A "run" key
/// (the echo's record of the invoking command) is accepted and ignored.
RunConfig ParseRunConfig(const nlohmann::json& j, RunConfig base = {});
RunConfig LoadRunConfig(const std::filesystem::path& path);
nlohmann::json RunConfigToJson(const RunConfig& config);

}  // namespace conceptvec

#endif  // CONCEPTVEC_CONFIG_H_
