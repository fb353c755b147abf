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

#include "conceptvec/config.h"

#include <fstream>
#include <set>

#include "conceptvec/cls_trainer.h"
#include "conceptvec/error.h"
#include "conceptvec/seg_trainer.h"

namespace conceptvec {
namespace {

[[noreturn]] void Bad(const std::string& key, const std::string& what) {
  throw Error(ErrorCode::kSchema, key, what);
}

void CheckKeys(const nlohmann::json& j, const std::set<std::string>& allowed,
               const std::string& where) {
  if (!j.is_object()) Bad(where, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) Bad(where + "." + key, "unknown key");
  }
}

template <typename T>
T Get(const nlohmann::json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    Bad(key, e.what());
  }
}

}  // namespace

std::vector<int> RunConfig::EffectiveSweep(int filters) const {
  if (!f_sweep.empty()) return f_sweep;
  const auto& defaults =
      task == Task::kSegmentation ? kDefaultSegSweep : kDefaultClsSweep;
  std::vector<int> out;
  for (int f : defaults) {
    if (f <= filters) out.push_back(f);
  }
  if (out.empty() || out.back() != filters) out.push_back(filters);
  return out;
}

RunConfig ParseRunConfig(const nlohmann::json& j, RunConfig c) {
  CheckKeys(j,
            {"dataset", "layer", "tau", "threshold_scope", "training", "eval_resolution", "seed",
             "task", "f_sweep", "out", "threads", "resample_seed", "run"},
            "config");
  if (j.contains("dataset")) c.dataset = Get<std::string>(j, "dataset");
  if (j.contains("layer")) c.layer = Get<std::string>(j, "layer");
  if (j.contains("tau")) c.tau = Get<double>(j, "tau");
  if (j.contains("threshold_scope")) {
    const auto s = Get<std::string>(j, "threshold_scope");
    if (s == "all") {
      c.threshold_scope = ThresholdScope::kAllImages;
    } else if (s == "train") {
      c.threshold_scope = ThresholdScope::kTrainOnly;
    } else {
      Bad("threshold_scope", "expected 'all' or 'train'");
    }
  }
  if (j.contains("training")) {
    const auto& t = j.at("training");
    CheckKeys(t, {"lr", "momentum", "batch", "epochs", "loss"}, "training");
    if (t.contains("lr")) c.training.lr = Get<double>(t, "lr");
    if (t.contains("momentum")) c.training.momentum = Get<double>(t, "momentum");
    if (t.contains("batch")) c.training.batch = Get<int>(t, "batch");
    if (t.contains("epochs")) c.training.epochs = Get<int>(t, "epochs");
    if (t.contains("loss")) {
      const auto s = Get<std::string>(t, "loss");
      if (s == "bce") {
        c.training.loss = LossForm::kBce;
      } else if (s == "literal") {
        c.training.loss = LossForm::kLiteral;
      } else {
        Bad("training.loss", "expected 'bce' or 'literal'");
      }
    }
  }
  if (j.contains("eval_resolution")) {
    const auto s = Get<std::string>(j, "eval_resolution");
    if (s == "ground_truth") {
      c.training.resolution = EvalResolution::kGroundTruth;
    } else if (s == "activation") {
      c.training.resolution = EvalResolution::kActivation;
    } else {
      Bad("eval_resolution", "expected 'ground_truth' or 'activation'");
    }
  }
  if (j.contains("seed")) c.training.seed = Get<std::uint64_t>(j, "seed");
  if (j.contains("task")) {
    const auto t = ParseTask(Get<std::string>(j, "task"));
    if (!t) Bad("task", "expected 'seg' or 'cls'");
    c.task = *t;
  }
  if (j.contains("f_sweep")) c.f_sweep = Get<std::vector<int>>(j, "f_sweep");
  if (j.contains("out")) c.out = Get<std::string>(j, "out");
  if (j.contains("threads")) c.threads = Get<int>(j, "threads");
  if (j.contains("resample_seed")) {
    if (j.at("resample_seed").is_null()) {
      c.resample_seed.reset();
    } else {
      c.resample_seed = Get<std::uint64_t>(j, "resample_seed");
    }
  }

  if (!(c.tau > 0.0 && c.tau < 1.0)) Bad("tau", "must lie in (0, 1)");
  if (!(c.training.lr >= 0.0)) Bad("training.lr", "must be >= 0");
  if (!(c.training.momentum >= 0.0 && c.training.momentum < 1.0)) {
    Bad("training.momentum", "must lie in [0, 1)");
  }
  if (c.training.batch < 2) Bad("training.batch", "must be >= 2");
  if (c.training.epochs < 0) Bad("training.epochs", "must be >= 0");
  if (c.threads < 1) Bad("threads", "must be >= 1");
  for (int f : c.f_sweep) {
    if (f < 1) Bad("f_sweep", "entries must be >= 1");
  }
  return c;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kSchema, path.string(), "cannot open config");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchema, path.string(), e.what());
  }
  return ParseRunConfig(j);
}

nlohmann::json RunConfigToJson(const RunConfig& c) {
  nlohmann::json j;
  j["dataset"] = c.dataset;
  j["layer"] = c.layer;
  j["tau"] = c.tau;
  j["threshold_scope"] = c.threshold_scope == ThresholdScope::kAllImages ? "all" : "train";
  j["training"] = {{"lr", c.training.lr},
                   {"momentum", c.training.momentum},
                   {"batch", c.training.batch},
                   {"epochs", c.training.epochs},
                   {"loss", c.training.loss == LossForm::kBce ? "bce" : "literal"}};
  j["eval_resolution"] =
      c.training.resolution == EvalResolution::kGroundTruth ? "ground_truth" : "activation";
  j["seed"] = c.training.seed;
  j["task"] = TaskName(c.task);
  j["f_sweep"] = c.f_sweep;
  j["out"] = c.out;
  j["threads"] = c.threads;
  j["resample_seed"] = c.resample_seed ? nlohmann::json(*c.resample_seed) : nlohmann::json();
  return j;
}

}  // namespace conceptvec
