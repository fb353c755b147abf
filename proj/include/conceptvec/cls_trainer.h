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

#ifndef CONCEPTVEC_CLS_TRAINER_H_
#define CONCEPTVEC_CLS_TRAINER_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "conceptvec/dataset.h"
#include "conceptvec/weights.h"

namespace conceptvec {

/// Default F sweep for top-F classification retraining.
inline const std::vector<int> kDefaultClsSweep = {1,  2,  3,  5,  10, 15, 20, 25,
                                                  30, 35, 40, 45, 50, 80, 100, 128};

/// Per-filter spatial means of one activation bundle.
struct PooledFeatures {
  std::string image;
  std::string layer;
  std::vector<double> features;
};

PooledFeatures pool_features(const ActivationBundle& bundle);

/// sigmoid(b + w . features).
double predict_cls(const PooledFeatures& features, const ConceptWeights& weights);

/// Mean log-loss over a batch of (feature row, label) pairs and its gradient.
/// `grad_w` is resized to K when given.
double ClsObjective(std::span<const std::vector<double>* const> rows,
                    std::span<const int> labels, std::span<const double> w, double b,
                    std::vector<double>* grad_w, double* grad_b);

/// Pooled features of every image of a layer, computed once.
class PooledFeatureTable {
 public:
  PooledFeatureTable(const ProbeDataset& dataset, std::string_view layer);
  const std::vector<double>& features(int image) const;

 private:
  std::vector<std::vector<double>> rows_;
};

/// Logistic regression trained with momentum SGD on class-balanced batches:
/// each step draws batch/2 positives and batch - batch/2 negatives uniformly
/// with replacement. An epoch is ceil(2 * max(|X+|, |X-|) / batch) steps.
ConceptWeights train_cls(const ProbeDataset& dataset, std::string_view layer,
                         std::string_view concept_id, const TrainConfig& config,
                         const std::optional<std::vector<int>>& support = std::nullopt,
                         const PooledFeatureTable* table = nullptr,
                         std::vector<double>* epoch_loss = nullptr);

/// 0.5 * (TPR + TNR) with decision threshold 0.5; a probability of exactly
/// 0.5 earns half credit.
double BalancedAccuracy(std::span<const double> positive_probs,
                        std::span<const double> negative_probs);

/// Balanced accuracy on the validation split. With `resample_seed`, the
/// larger class is subsampled without replacement to the size of the smaller
/// one instead.
double eval_cls(const ProbeDataset& dataset, std::string_view layer,
                std::string_view concept_id, const ConceptWeights& weights,
                std::optional<std::uint64_t> resample_seed = std::nullopt,
                const PooledFeatureTable* table = nullptr);

/// Retrains w' and b' from scratch on the top-F filters of `base`.
ConceptWeights train_cls_topf(const ProbeDataset& dataset, std::string_view layer,
                              std::string_view concept_id, int f, const ConceptWeights& base,
                              const TrainConfig& config,
                              const PooledFeatureTable* table = nullptr);

/// Concepts with both positive and negative training images, in id order.
std::vector<std::string> TrainableClsConcepts(const ProbeDataset& dataset);

}  // namespace conceptvec

#endif  // CONCEPTVEC_CLS_TRAINER_H_
