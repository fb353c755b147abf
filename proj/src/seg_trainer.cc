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

#include "conceptvec/seg_trainer.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "conceptvec/error.h"
#include "conceptvec/parallel.h"
#include "conceptvec/rng.h"

namespace conceptvec {
namespace {

double Clamp(double p) {
  return std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp);
}

bool Unclamped(double p) {
  return p > kProbabilityClamp && p < 1.0 - kProbabilityClamp;
}

void CheckConfig(const TrainConfig& config) {
  if (!(config.lr >= 0.0) || !(config.momentum >= 0.0 && config.momentum < 1.0) ||
      config.batch < 1 || config.epochs < 0) {
    throw Error(ErrorCode::kInvalidArgument, "training",
                "need lr >= 0, 0 <= momentum < 1, batch >= 1, epochs >= 0");
  }
}

std::vector<std::uint8_t> SupportMask(std::size_t k, const std::optional<std::vector<int>>& support) {
  std::vector<std::uint8_t> mask(k, support ? 0 : 1);
  if (support) {
    for (int f : *support) {
      if (f < 0 || static_cast<std::size_t>(f) >= k) {
        throw Error(ErrorCode::kInvalidArgument, "support", "filter index out of range");
      }
      mask[f] = 1;
    }
  }
  return mask;
}

}  // namespace

SegPrediction predict_seg(const ActivationBundle& bundle, const ThresholdTable& thresholds,
                          const ConceptWeights& weights, int out_h, int out_w) {
  if (weights.task != Task::kSegmentation) {
    throw Error(ErrorCode::kInvalidArgument, weights.concept_id,
                "weights are not segmentation weights");
  }
  if (weights.w.size() != static_cast<std::size_t>(bundle.filters)) {
    throw Error(ErrorCode::kShapeMismatch, weights.concept_id,
                "weights have " + std::to_string(weights.w.size()) + " entries, layer has " +
                    std::to_string(bundle.filters) + " filters");
  }
  const auto masks = FilterMasks(bundle, thresholds, out_h, out_w);
  SegPrediction pred;
  pred.height = out_h;
  pred.width = out_w;
  pred.mask = BinaryMask(out_h, out_w);
  const std::size_t n = static_cast<std::size_t>(out_h) * out_w;
  std::vector<double> z(n, 0.0);
  // Accumulate in ascending filter order, skipping inactive filters, which is
  // exactly the order SegObjective uses.
  for (std::size_t p = 0; p < n; ++p) {
    for (int k = 0; k < bundle.filters; ++k) {
      if (masks[k].bits[p]) z[p] += weights.w[k];
    }
  }
  pred.probabilities.resize(n);
  for (std::size_t p = 0; p < n; ++p) {
    pred.probabilities[p] = Sigmoid(z[p]);
    pred.mask.bits[p] = pred.probabilities[p] > 0.5 ? 1 : 0;
  }
  return pred;
}

double seg_loss(std::span<const double> probabilities, const BinaryMask& truth, double alpha,
                LossForm form) {
  if (probabilities.size() != truth.bits.size()) {
    throw Error(ErrorCode::kShapeMismatch, "seg_loss", "probabilities vs truth size");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha", "alpha must lie in (0, 1)");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    const double label = truth.bits[i];
    if (form == LossForm::kBce) {
      const double p = Clamp(probabilities[i]);
      total -= alpha * label * std::log(p) + (1.0 - alpha) * (1.0 - label) * std::log(1.0 - p);
    } else {
      const double p = probabilities[i];
      total -= alpha * p * label + (1.0 - alpha) * (1.0 - p) * (1.0 - label);
    }
  }
  return total / static_cast<double>(probabilities.size());
}

PixelPatterns BuildPixelPatterns(std::span<const BinaryMask> filter_masks) {
  if (filter_masks.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "patterns", "no filter masks");
  }
  PixelPatterns out;
  out.height = filter_masks[0].height;
  out.width = filter_masks[0].width;
  const std::size_t n = filter_masks[0].bits.size();
  for (const auto& m : filter_masks) {
    if (m.bits.size() != n) throw Error(ErrorCode::kShapeMismatch, "patterns", "mask sizes");
  }
  std::map<std::vector<int>, std::uint32_t> index;
  out.pixel_pattern.resize(n);
  std::vector<int> active;
  for (std::size_t p = 0; p < n; ++p) {
    active.clear();
    for (std::size_t k = 0; k < filter_masks.size(); ++k) {
      if (filter_masks[k].bits[p]) active.push_back(static_cast<int>(k));
    }
    auto [it, inserted] = index.emplace(active, static_cast<std::uint32_t>(out.patterns.size()));
    if (inserted) out.patterns.push_back(active);
    out.pixel_pattern[p] = it->second;
  }
  return out;
}

SegExample MakeSegExample(const PixelPatterns& patterns, const BinaryMask& truth) {
  if (truth.height != patterns.height || truth.width != patterns.width) {
    throw Error(ErrorCode::kShapeMismatch, "seg example", "truth vs pattern raster");
  }
  std::vector<std::uint32_t> fg(patterns.patterns.size(), 0);
  std::vector<std::uint32_t> bg(patterns.patterns.size(), 0);
  for (std::size_t p = 0; p < patterns.pixel_pattern.size(); ++p) {
    (truth.bits[p] ? fg : bg)[patterns.pixel_pattern[p]] += 1;
  }
  SegExample ex;
  ex.pixels = patterns.pixel_pattern.size();
  for (std::size_t g = 0; g < patterns.patterns.size(); ++g) {
    if (fg[g] == 0 && bg[g] == 0) continue;
    ex.groups.push_back({patterns.patterns[g], fg[g], bg[g]});
    ex.foreground += fg[g];
  }
  return ex;
}

double SegObjective(std::span<const SegExample* const> batch, std::span<const double> w,
                    double alpha, LossForm form, std::vector<double>* grad) {
  if (batch.empty()) throw Error(ErrorCode::kEmptySplit, "seg objective", "empty batch");
  if (grad) grad->assign(w.size(), 0.0);
  const double inv_batch = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  for (const SegExample* ex : batch) {
    const double inv_pixels = 1.0 / static_cast<double>(ex->pixels);
    double image_loss = 0.0;
    for (const PatternGroup& g : ex->groups) {
      double z = 0.0;
      for (int k : g.filters) z += w[k];
      const double p = Sigmoid(z);
      const double fg = g.foreground;
      const double bg = g.background;
      double dz;
      if (form == LossForm::kBce) {
        const double pc = Clamp(p);
        image_loss -= fg * alpha * std::log(pc) + bg * (1.0 - alpha) * std::log(1.0 - pc);
        dz = Unclamped(p) ? -fg * alpha * (1.0 - p) + bg * (1.0 - alpha) * p : 0.0;
      } else {
        image_loss -= fg * alpha * p + bg * (1.0 - alpha) * (1.0 - p);
        dz = (-fg * alpha + bg * (1.0 - alpha)) * p * (1.0 - p);
      }
      if (grad) {
        const double scaled = dz * inv_pixels * inv_batch;
        for (int k : g.filters) (*grad)[k] += scaled;
      }
    }
    loss += image_loss * inv_pixels;
  }
  return loss * inv_batch;
}

IndicatorCache::IndicatorCache(const ProbeDataset& dataset, std::string_view layer,
                               const ThresholdTable& thresholds, EvalResolution resolution,
                               int threads)
    : per_image_(dataset.images().size()) {
  const LayerRecord& rec = dataset.layer(layer);
  std::vector<int> wanted;
  for (std::size_t i = 0; i < dataset.images().size(); ++i) {
    for (std::size_t c = 0; c < dataset.concepts().size(); ++c) {
      const Annotation* a = dataset.annotation(static_cast<int>(i), static_cast<int>(c));
      if (a && a->mask) {
        wanted.push_back(static_cast<int>(i));
        break;
      }
    }
  }
  ParallelFor(wanted.size(), threads, [&](std::size_t j) {
    const int i = wanted[j];
    const ImageRecord& img = dataset.images()[i];
    const int h = resolution == EvalResolution::kGroundTruth ? img.height : rec.height;
    const int w = resolution == EvalResolution::kGroundTruth ? img.width : rec.width;
    per_image_[i] = BuildPixelPatterns(FilterMasks(dataset.bundle(layer, i), thresholds, h, w));
  });
}

const PixelPatterns* IndicatorCache::patterns(int image) const {
  const auto& slot = per_image_.at(image);
  return slot ? &*slot : nullptr;
}

double ComputeAlpha(std::span<const SegExample> examples, std::string_view concept_id) {
  std::uint64_t fg = 0;
  std::uint64_t total = 0;
  for (const auto& ex : examples) {
    fg += ex.foreground;
    total += ex.pixels;
  }
  const double alpha =
      total == 0 ? 1.0 : 1.0 - static_cast<double>(fg) / static_cast<double>(total);
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::kDegenerateAlpha, std::string(concept_id),
                "foreground fraction is " + std::to_string(1.0 - alpha) +
                    "; the weighted loss needs both classes");
  }
  return alpha;
}

ConceptWeights train_seg(const ProbeDataset& dataset, std::string_view layer,
                         std::string_view concept_id, const ThresholdTable& thresholds,
                         const TrainConfig& config, const std::optional<std::vector<int>>& support,
                         const IndicatorCache* cache, TrainTrace* trace) {
  CheckConfig(config);
  const int c = dataset.concept_index(concept_id);
  if (!dataset.concepts()[c].has_segmentation) {
    throw Error(ErrorCode::kNoSegmentation, std::string(concept_id),
                "concept has no segmentation annotations");
  }
  const std::vector<int> train = dataset.segmentation_images(c, Split::kTrain);
  if (train.empty()) {
    throw Error(ErrorCode::kEmptySplit, std::string(concept_id), "no training images");
  }
  const LayerRecord& rec = dataset.layer(layer);

  std::vector<SegExample> examples;
  examples.reserve(train.size());
  for (int i : train) {
    const BinaryMask truth = TruthAt(*dataset.annotation(i, c)->mask, rec, config.resolution);
    const PixelPatterns* cached = cache ? cache->patterns(i) : nullptr;
    if (cached && cached->height == truth.height && cached->width == truth.width) {
      examples.push_back(MakeSegExample(*cached, truth));
    } else {
      examples.push_back(MakeSegExample(
          BuildPixelPatterns(FilterMasks(dataset.bundle(layer, i), thresholds, truth.height,
                                         truth.width)),
          truth));
    }
  }
  const double alpha = ComputeAlpha(examples, concept_id);

  ConceptWeights out;
  out.concept_id = std::string(concept_id);
  out.task = Task::kSegmentation;
  out.layer = std::string(layer);
  out.w.assign(rec.filters, 0.0);
  out.restricted_support = support;
  out.training_meta = {config.lr, config.momentum, config.batch, config.epochs, config.seed,
                       alpha};
  const std::vector<std::uint8_t> mask = SupportMask(out.w.size(), support);

  std::vector<const SegExample*> all;
  for (const auto& ex : examples) all.push_back(&ex);
  if (trace) {
    trace->epoch_loss.clear();
    trace->epoch_loss.push_back(SegObjective(all, out.w, alpha, config.loss, nullptr));
  }

  Rng rng(DeriveSeed(config.seed, concept_id));
  MomentumSgd opt(out.w.size(), config.lr, config.momentum);
  std::vector<std::size_t> order(examples.size());
  std::vector<const SegExample*> batch;
  std::vector<double> grad;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    rng.Shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += config.batch) {
      const std::size_t end = std::min(order.size(), start + config.batch);
      batch.clear();
      for (std::size_t j = start; j < end; ++j) batch.push_back(&examples[order[j]]);
      SegObjective(batch, out.w, alpha, config.loss, &grad);
      opt.Step(out.w, grad, &mask);
    }
    if (trace) {
      trace->epoch_loss.push_back(SegObjective(all, out.w, alpha, config.loss, nullptr));
    }
  }
  return out;
}

ConceptWeights train_seg_topf(const ProbeDataset& dataset, std::string_view layer,
                              std::string_view concept_id, int f, const ConceptWeights& base,
                              const ThresholdTable& thresholds, const TrainConfig& config,
                              const IndicatorCache* cache) {
  return train_seg(dataset, layer, concept_id, thresholds, config, restrict_top_f(base, f),
                   cache);
}

SegEvaluation eval_seg(const ProbeDataset& dataset, std::string_view layer,
                       std::string_view concept_id, const ThresholdTable& thresholds,
                       const ConceptWeights& weights, Split split, EvalResolution resolution) {
  const int c = dataset.concept_index(concept_id);
  const LayerRecord& rec = dataset.layer(layer);
  SegEvaluation out;
  OverlapCounts total;
  for (int i : dataset.segmentation_images(c, split)) {
    const BinaryMask truth = TruthAt(*dataset.annotation(i, c)->mask, rec, resolution);
    const SegPrediction pred =
        predict_seg(dataset.bundle(layer, i), thresholds, weights, truth.height, truth.width);
    const OverlapCounts oc = CountOverlap(pred.mask, truth);
    total += oc;
    out.per_image.push_back({dataset.images()[i].id, IoUFromCounts(oc)});
  }
  out.iou_set = IoUFromCounts(total);
  return out;
}

std::vector<std::string> TrainableSegConcepts(const ProbeDataset& dataset) {
  std::vector<std::string> ids;
  for (std::size_t c = 0; c < dataset.concepts().size(); ++c) {
    if (dataset.concepts()[c].has_segmentation &&
        !dataset.segmentation_images(static_cast<int>(c), Split::kTrain).empty()) {
      ids.push_back(dataset.concepts()[c].id);
    }
  }
  return ids;
}

}  // namespace conceptvec
