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

#include "conceptvec/cls_trainer.h"

#include <algorithm>
#include <cmath>

#include "conceptvec/error.h"
#include "conceptvec/rng.h"

namespace conceptvec {
namespace {

// log(1 + exp(z)) without overflow.
double Softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double Logit(std::span<const double> features, std::span<const double> w, double b) {
  double z = b;
  for (std::size_t k = 0; k < w.size(); ++k) z += w[k] * features[k];
  return z;
}

}  // namespace

PooledFeatures pool_features(const ActivationBundle& bundle) {
  PooledFeatures out;
  out.image = bundle.image;
  out.layer = bundle.layer;
  out.features.resize(bundle.filters);
  const double inv = 1.0 / static_cast<double>(bundle.map_size());
  for (int k = 0; k < bundle.filters; ++k) {
    double sum = 0.0;
    for (float v : bundle.map(k)) sum += v;
    out.features[k] = sum * inv;
  }
  return out;
}

double predict_cls(const PooledFeatures& features, const ConceptWeights& weights) {
  if (weights.task != Task::kClassification || !weights.bias) {
    throw Error(ErrorCode::kInvalidArgument, weights.concept_id,
                "weights are not classification weights");
  }
  if (features.features.size() != weights.w.size()) {
    throw Error(ErrorCode::kShapeMismatch, weights.concept_id,
                "feature length " + std::to_string(features.features.size()) +
                    " vs weight length " + std::to_string(weights.w.size()));
  }
  return Sigmoid(Logit(features.features, weights.w, *weights.bias));
}

double ClsObjective(std::span<const std::vector<double>* const> rows,
                    std::span<const int> labels, std::span<const double> w, double b,
                    std::vector<double>* grad_w, double* grad_b) {
  if (rows.empty() || rows.size() != labels.size()) {
    throw Error(ErrorCode::kInvalidArgument, "cls objective", "rows vs labels");
  }
  if (grad_w) grad_w->assign(w.size(), 0.0);
  if (grad_b) *grad_b = 0.0;
  const double inv = 1.0 / static_cast<double>(rows.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::vector<double>& f = *rows[i];
    const double z = Logit(f, w, b);
    const double y = labels[i];
    loss += Softplus(z) - y * z;
    const double r = (Sigmoid(z) - y) * inv;
    if (grad_w) {
      for (std::size_t k = 0; k < w.size(); ++k) (*grad_w)[k] += r * f[k];
    }
    if (grad_b) *grad_b += r;
  }
  return loss * inv;
}

PooledFeatureTable::PooledFeatureTable(const ProbeDataset& dataset, std::string_view layer)
    : rows_(dataset.images().size()) {
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (dataset.has_bundle(layer, static_cast<int>(i))) {
      rows_[i] = pool_features(dataset.bundle(layer, static_cast<int>(i))).features;
    }
  }
}

const std::vector<double>& PooledFeatureTable::features(int image) const {
  const auto& row = rows_.at(image);
  if (row.empty()) throw Error(ErrorCode::kMissingBundle, std::to_string(image), "no bundle");
  return row;
}

ConceptWeights train_cls(const ProbeDataset& dataset, std::string_view layer,
                         std::string_view concept_id, const TrainConfig& config,
                         const std::optional<std::vector<int>>& support,
                         const PooledFeatureTable* table, std::vector<double>* epoch_loss) {
  if (!(config.lr >= 0.0) || !(config.momentum >= 0.0 && config.momentum < 1.0) ||
      config.batch < 2 || config.epochs < 0) {
    throw Error(ErrorCode::kInvalidArgument, "training",
                "need lr >= 0, 0 <= momentum < 1, batch >= 2, epochs >= 0");
  }
  const int c = dataset.concept_index(concept_id);
  const auto split = dataset.classification_split(c, Split::kTrain);
  const std::vector<int>& pos = split.first;
  const std::vector<int>& neg = split.second;
  if (pos.empty() || neg.empty()) {
    throw Error(ErrorCode::kEmptySplit, std::string(concept_id),
                pos.empty() ? "no positive training images" : "no negative training images");
  }
  std::optional<PooledFeatureTable> local;
  if (!table) table = &local.emplace(dataset, layer);
  const LayerRecord& rec = dataset.layer(layer);

  ConceptWeights out;
  out.concept_id = std::string(concept_id);
  out.task = Task::kClassification;
  out.layer = std::string(layer);
  out.w.assign(rec.filters, 0.0);
  out.bias = 0.0;
  out.restricted_support = support;
  out.training_meta = {config.lr, config.momentum, config.batch, config.epochs, config.seed,
                       std::nullopt};

  // Bias rides along as parameter K.
  std::vector<std::uint8_t> mask(rec.filters + 1, support ? 0 : 1);
  if (support) {
    for (int k : *support) {
      if (k < 0 || k >= rec.filters) {
        throw Error(ErrorCode::kInvalidArgument, "support", "filter index out of range");
      }
      mask[k] = 1;
    }
    mask[rec.filters] = 1;
  }
  std::vector<double> params(rec.filters + 1, 0.0);

  std::vector<const std::vector<double>*> all_rows;
  std::vector<int> all_labels;
  for (int i : pos) {
    all_rows.push_back(&table->features(i));
    all_labels.push_back(1);
  }
  for (int i : neg) {
    all_rows.push_back(&table->features(i));
    all_labels.push_back(0);
  }
  auto balanced_loss = [&](std::span<const double> p) {
    const std::span<const double> w = p.first(rec.filters);
    const double b = p[rec.filters];
    const double lp = ClsObjective(std::span(all_rows).first(pos.size()),
                                   std::span(all_labels).first(pos.size()), w, b, nullptr, nullptr);
    const double ln = ClsObjective(std::span(all_rows).subspan(pos.size()),
                                   std::span(all_labels).subspan(pos.size()), w, b, nullptr,
                                   nullptr);
    return 0.5 * (lp + ln);
  };
  if (epoch_loss) {
    epoch_loss->clear();
    epoch_loss->push_back(balanced_loss(params));
  }

  const int half = config.batch / 2;
  const int other = config.batch - half;
  const std::size_t larger = std::max(pos.size(), neg.size());
  const std::size_t steps =
      (2 * larger + static_cast<std::size_t>(config.batch) - 1) / static_cast<std::size_t>(config.batch);

  Rng rng(DeriveSeed(config.seed, concept_id));
  MomentumSgd opt(params.size(), config.lr, config.momentum);
  std::vector<const std::vector<double>*> rows(config.batch);
  std::vector<int> labels(config.batch);
  std::vector<double> grad_w;
  std::vector<double> grad(params.size());
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t s = 0; s < steps; ++s) {
      for (int j = 0; j < half; ++j) {
        rows[j] = &table->features(pos[rng.Below(pos.size())]);
        labels[j] = 1;
      }
      for (int j = 0; j < other; ++j) {
        rows[half + j] = &table->features(neg[rng.Below(neg.size())]);
        labels[half + j] = 0;
      }
      double grad_b = 0.0;
      ClsObjective(rows, labels, std::span<const double>(params).first(rec.filters),
                   params[rec.filters], &grad_w, &grad_b);
      std::copy(grad_w.begin(), grad_w.end(), grad.begin());
      grad[rec.filters] = grad_b;
      opt.Step(params, grad, &mask);
    }
    if (epoch_loss) epoch_loss->push_back(balanced_loss(params));
  }
  std::copy(params.begin(), params.begin() + rec.filters, out.w.begin());
  out.bias = params[rec.filters];
  return out;
}

double BalancedAccuracy(std::span<const double> positive_probs,
                        std::span<const double> negative_probs) {
  if (positive_probs.empty() || negative_probs.empty()) {
    throw Error(ErrorCode::kEmptySplit, "balanced accuracy", "empty class");
  }
  auto credit = [](double p, bool positive) {
    if (p == 0.5) return 0.5;
    return (p > 0.5) == positive ? 1.0 : 0.0;
  };
  double tp = 0.0;
  for (double p : positive_probs) tp += credit(p, true);
  double tn = 0.0;
  for (double p : negative_probs) tn += credit(p, false);
  return 0.5 * (tp / static_cast<double>(positive_probs.size()) +
                tn / static_cast<double>(negative_probs.size()));
}

double eval_cls(const ProbeDataset& dataset, std::string_view layer,
                std::string_view concept_id, const ConceptWeights& weights,
                std::optional<std::uint64_t> resample_seed, const PooledFeatureTable* table) {
  const int c = dataset.concept_index(concept_id);
  auto [pos, neg] = dataset.classification_split(c, Split::kVal);
  if (pos.empty() || neg.empty()) {
    throw Error(ErrorCode::kEmptySplit, std::string(concept_id),
                pos.empty() ? "no positive validation images" : "no negative validation images");
  }
  if (resample_seed) {
    Rng rng(DeriveSeed(*resample_seed, concept_id));
    std::vector<int>& larger = pos.size() > neg.size() ? pos : neg;
    const std::size_t target = std::min(pos.size(), neg.size());
    rng.Shuffle(larger);
    larger.resize(target);
    std::sort(larger.begin(), larger.end());
  }
  std::optional<PooledFeatureTable> local;
  if (!table) table = &local.emplace(dataset, layer);
  auto probs = [&](const std::vector<int>& images) {
    std::vector<double> out;
    for (int i : images) {
      PooledFeatures f{dataset.images()[i].id, std::string(layer), table->features(i)};
      out.push_back(predict_cls(f, weights));
    }
    return out;
  };
  return BalancedAccuracy(probs(pos), probs(neg));
}

ConceptWeights train_cls_topf(const ProbeDataset& dataset, std::string_view layer,
                              std::string_view concept_id, int f, const ConceptWeights& base,
                              const TrainConfig& config, const PooledFeatureTable* table) {
  return train_cls(dataset, layer, concept_id, config, restrict_top_f(base, f), table);
}

std::vector<std::string> TrainableClsConcepts(const ProbeDataset& dataset) {
  std::vector<std::string> ids;
  for (std::size_t c = 0; c < dataset.concepts().size(); ++c) {
    const auto [pos, neg] = dataset.classification_split(static_cast<int>(c), Split::kTrain);
    if (!pos.empty() && !neg.empty()) ids.push_back(dataset.concepts()[c].id);
  }
  return ids;
}

}  // namespace conceptvec
