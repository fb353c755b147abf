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

#ifndef CONCEPTVEC_WEIGHTS_H_
#define CONCEPTVEC_WEIGHTS_H_

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "conceptvec/dissection.h"

namespace conceptvec {

enum class Task { kSegmentation, kClassification };

std::string_view TaskName(Task task);
std::optional<Task> ParseTask(std::string_view name);

/// Segmentation loss: the standard log-form weighted cross entropy, or the
/// linear expression without logarithms (kept for comparison runs).
enum class LossForm { kBce, kLiteral };

struct TrainConfig {
  double lr = 1e-4;
  double momentum = 0.9;
  int batch = 64;
  int epochs = 30;
  std::uint64_t seed = 0;
  LossForm loss = LossForm::kBce;
  EvalResolution resolution = EvalResolution::kGroundTruth;
};

struct TrainingMeta {
  double lr = 0.0;
  double momentum = 0.0;
  int batch = 0;
  int epochs = 0;
  std::uint64_t seed = 0;
  std::optional<double> alpha;  // segmentation only
};

/// A learned concept embedding over the K filters of one layer.
struct ConceptWeights {
  std::string concept_id;
  Task task = Task::kSegmentation;
  std::string layer;
  std::vector<double> w;
  std::optional<double> bias;                     // classification only
  std::optional<std::vector<int>> restricted_support;  // ascending filter indices
  TrainingMeta training_meta;

  /// Throws if w is non-finite or non-zero outside the restricted support.
  void Validate() const;
};

/// Indices of the F largest |w_k| (ties to the lower index), ascending.
std::vector<int> restrict_top_f(const ConceptWeights& weights, int f);

/// Writes `<stem>.n2vt` (f32 [K]) and the `<stem>.json` sidecar.
void save_weights(const ConceptWeights& weights, const std::filesystem::path& stem);
ConceptWeights load_weights(const std::filesystem::path& sidecar);

/// Numerically stable logistic function; sigmoid(0) == 0.5 exactly.
inline double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// Plain SGD with momentum: v <- momentum * v + g; w <- w - lr * v. Entries
/// outside `support` (when given) stay untouched.
class MomentumSgd {
 public:
  MomentumSgd(std::size_t dim, double lr, double momentum)
      : velocity_(dim, 0.0), lr_(lr), momentum_(momentum) {}

  void Step(std::span<double> params, std::span<const double> grad,
            const std::vector<std::uint8_t>* support_mask = nullptr) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (support_mask && !(*support_mask)[i]) continue;
      velocity_[i] = momentum_ * velocity_[i] + grad[i];
      params[i] -= lr_ * velocity_[i];
    }
  }

 private:
  std::vector<double> velocity_;
  double lr_;
  double momentum_;
};

}  // namespace conceptvec

#endif  // CONCEPTVEC_WEIGHTS_H_
