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

#include "conceptvec/weights.h"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "conceptvec/error.h"
#include "conceptvec/tensor_file.h"
#include "json.hpp"

namespace conceptvec {

std::string_view TaskName(Task task) {
  return task == Task::kSegmentation ? "seg" : "cls";
}

std::optional<Task> ParseTask(std::string_view name) {
  if (name == "seg" || name == "segmentation") return Task::kSegmentation;
  if (name == "cls" || name == "classification") return Task::kClassification;
  return std::nullopt;
}

void ConceptWeights::Validate() const {
  for (double v : w) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kNonFinite, concept_id, "weight");
  }
  if (bias && !std::isfinite(*bias)) throw Error(ErrorCode::kNonFinite, concept_id, "bias");
  if (restricted_support) {
    std::vector<std::uint8_t> on(w.size(), 0);
    for (int k : *restricted_support) {
      if (k < 0 || static_cast<std::size_t>(k) >= w.size()) {
        throw Error(ErrorCode::kInvalidArgument, concept_id, "support index out of range");
      }
      on[k] = 1;
    }
    for (std::size_t k = 0; k < w.size(); ++k) {
      if (!on[k] && w[k] != 0.0) {
        throw Error(ErrorCode::kInvalidArgument, concept_id,
                    "non-zero weight outside the restricted support");
      }
    }
  }
}

std::vector<int> restrict_top_f(const ConceptWeights& weights, int f) {
  const int k = static_cast<int>(weights.w.size());
  if (f < 1 || f > k) {
    throw Error(ErrorCode::kInvalidArgument, "F",
                "F=" + std::to_string(f) + " outside [1, " + std::to_string(k) + "]");
  }
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(weights.w[a]) > std::abs(weights.w[b]);
  });
  order.resize(f);
  std::sort(order.begin(), order.end());
  return order;
}

void save_weights(const ConceptWeights& weights, const std::filesystem::path& stem) {
  weights.Validate();
  std::filesystem::path tensor_path = stem;
  tensor_path += ".n2vt";
  std::filesystem::path sidecar = stem;
  sidecar += ".json";
  std::vector<float> w32(weights.w.begin(), weights.w.end());
  write_tensor(TensorFile::FromF32({w32.size()}, w32), tensor_path);
  nlohmann::json meta = {{"lr", weights.training_meta.lr},
                         {"momentum", weights.training_meta.momentum},
                         {"batch", weights.training_meta.batch},
                         {"epochs", weights.training_meta.epochs},
                         {"seed", weights.training_meta.seed}};
  if (weights.training_meta.alpha) meta["alpha"] = *weights.training_meta.alpha;
  nlohmann::json j = {{"concept", weights.concept_id},
                      {"task", TaskName(weights.task)},
                      {"layer", weights.layer},
                      {"tensor", tensor_path.filename().string()},
                      {"training_meta", meta}};
  if (weights.bias) j["bias"] = *weights.bias;
  if (weights.restricted_support) j["support"] = *weights.restricted_support;
  std::ofstream out(sidecar, std::ios::trunc);
  out << j.dump(1) << "\n";
  if (!out) throw Error(ErrorCode::kIo, sidecar.string(), "write failed");
}

ConceptWeights load_weights(const std::filesystem::path& sidecar) {
  std::ifstream in(sidecar);
  if (!in) throw Error(ErrorCode::kIo, sidecar.string(), "cannot open weights sidecar");
  try {
    const nlohmann::json j = nlohmann::json::parse(in);
    ConceptWeights cw;
    cw.concept_id = j.at("concept").get<std::string>();
    auto task = ParseTask(j.at("task").get<std::string>());
    if (!task) throw Error(ErrorCode::kSchema, sidecar.string(), "unknown task");
    cw.task = *task;
    cw.layer = j.at("layer").get<std::string>();
    if (j.contains("bias")) cw.bias = j["bias"].get<double>();
    if (j.contains("support")) cw.restricted_support = j["support"].get<std::vector<int>>();
    const auto& meta = j.at("training_meta");
    cw.training_meta.lr = meta.at("lr").get<double>();
    cw.training_meta.momentum = meta.at("momentum").get<double>();
    cw.training_meta.batch = meta.at("batch").get<int>();
    cw.training_meta.epochs = meta.at("epochs").get<int>();
    cw.training_meta.seed = meta.at("seed").get<std::uint64_t>();
    if (meta.contains("alpha")) cw.training_meta.alpha = meta["alpha"].get<double>();
    const TensorFile t = read_tensor(sidecar.parent_path() / j.at("tensor").get<std::string>());
    if (t.shape.size() != 1) {
      throw Error(ErrorCode::kShapeMismatch, sidecar.string(), "weights must be [K]");
    }
    const std::vector<float> w32 = t.ToF32();
    cw.w.assign(w32.begin(), w32.end());
    cw.Validate();
    return cw;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchema, sidecar.string(), e.what());
  }
}

}  // namespace conceptvec
