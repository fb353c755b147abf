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

#include "conceptvec/thresholds.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "conceptvec/error.h"
#include "conceptvec/parallel.h"
#include "conceptvec/tensor_file.h"
#include "json.hpp"

namespace conceptvec {

std::uint64_t ExceedanceCount(std::uint64_t n, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "tau", "tau must lie in (0, 1)");
  }
  if (n == 0) throw Error(ErrorCode::kEmptySplit, "thresholds", "no observations");
  // The epsilon keeps e.g. 0.29 * 100 = 28.999999999999996 at 29.
  const auto m = static_cast<std::uint64_t>(std::floor(tau * static_cast<double>(n) + 1e-9));
  return std::min(m, n - 1);
}

float QuantileThreshold(std::span<float> values, double tau) {
  const std::uint64_t m = ExceedanceCount(values.size(), tau);
  // Ascending position of the (m+1)-th largest.
  const auto pos = static_cast<std::ptrdiff_t>(values.size() - 1 - m);
  std::nth_element(values.begin(), values.begin() + pos, values.end());
  return values[static_cast<std::size_t>(pos)];
}

ThresholdTable compute_thresholds(const ProbeDataset& dataset, std::string_view layer,
                                  double tau, ThresholdScope scope, int threads) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "tau", "tau must lie in (0, 1)");
  }
  const LayerRecord& rec = dataset.layer(layer);
  const std::vector<int> images = dataset.images_in(
      scope == ThresholdScope::kTrainOnly ? std::optional<Split>(Split::kTrain)
                                          : std::nullopt);
  if (images.empty()) {
    throw Error(ErrorCode::kEmptySplit, std::string(layer), "no probe images");
  }
  std::vector<const ActivationBundle*> bundles;
  bundles.reserve(images.size());
  for (int i : images) {
    const ActivationBundle& b = dataset.bundle(layer, i);
    for (float v : b.values) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kNonFinite, b.layer + "/" + b.image, "non-finite activation");
      }
    }
    bundles.push_back(&b);
  }

  ThresholdTable table;
  table.layer = std::string(layer);
  table.tau = tau;
  table.scope = scope;
  table.sample_count = static_cast<std::uint64_t>(images.size()) * rec.map_size();
  table.thresholds.assign(rec.filters, 0.0f);
  ParallelFor(static_cast<std::size_t>(rec.filters), threads, [&](std::size_t k) {
    std::vector<float> obs;
    obs.reserve(table.sample_count);
    for (const ActivationBundle* b : bundles) {
      const auto m = b->map(static_cast<int>(k));
      obs.insert(obs.end(), m.begin(), m.end());
    }
    table.thresholds[k] = QuantileThreshold(obs, tau);
  });
  return table;
}

void save_thresholds(const ThresholdTable& table, const std::filesystem::path& stem) {
  std::filesystem::path tensor_path = stem;
  tensor_path += ".n2vt";
  std::filesystem::path sidecar = stem;
  sidecar += ".json";
  write_tensor(TensorFile::FromF32({table.thresholds.size()}, table.thresholds),
               tensor_path);
  nlohmann::json j = {
      {"layer", table.layer},
      {"tau", table.tau},
      {"sample_count", table.sample_count},
      {"scope", table.scope == ThresholdScope::kAllImages ? "all" : "train"},
      {"tensor", tensor_path.filename().string()}};
  std::ofstream out(sidecar, std::ios::trunc);
  out << j.dump(1) << "\n";
  if (!out) throw Error(ErrorCode::kIo, sidecar.string(), "write failed");
}

ThresholdTable load_thresholds(const std::filesystem::path& sidecar) {
  std::ifstream in(sidecar);
  if (!in) throw Error(ErrorCode::kIo, sidecar.string(), "cannot open threshold sidecar");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
    ThresholdTable t;
    t.layer = j.at("layer").get<std::string>();
    t.tau = j.at("tau").get<double>();
    t.sample_count = j.at("sample_count").get<std::uint64_t>();
    t.scope = j.at("scope").get<std::string>() == "train" ? ThresholdScope::kTrainOnly
                                                          : ThresholdScope::kAllImages;
    const TensorFile tf =
        read_tensor(sidecar.parent_path() / j.at("tensor").get<std::string>());
    if (tf.shape.size() != 1) {
      throw Error(ErrorCode::kShapeMismatch, sidecar.string(), "thresholds must be [K]");
    }
    t.thresholds = tf.ToF32();
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchema, sidecar.string(), e.what());
  }
}

}  // namespace conceptvec
