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

#include "conceptvec/dissection.h"

#include "conceptvec/error.h"
#include "conceptvec/parallel.h"

namespace conceptvec {

OverlapCounts CountOverlap(const BinaryMask& prediction, const BinaryMask& truth) {
  if (prediction.height != truth.height || prediction.width != truth.width) {
    throw Error(ErrorCode::kShapeMismatch, "iou",
                std::to_string(prediction.height) + "x" + std::to_string(prediction.width) +
                    " vs " + std::to_string(truth.height) + "x" +
                    std::to_string(truth.width));
  }
  OverlapCounts c;
  const std::size_t n = prediction.bits.size();
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned p = prediction.bits[i];
    const unsigned t = truth.bits[i];
    c.intersection += p & t;
    c.union_count += p | t;
  }
  return c;
}

double IoUFromCounts(const OverlapCounts& counts) {
  if (counts.union_count == 0) return 0.0;
  return static_cast<double>(counts.intersection) / static_cast<double>(counts.union_count);
}

BinaryMask ThresholdMap(std::span<const float> map, int height, int width, float threshold) {
  BinaryMask m(height, width);
  if (map.size() != m.bits.size()) {
    throw Error(ErrorCode::kShapeMismatch, "activation map",
                "expected " + std::to_string(m.bits.size()) + " values");
  }
  for (std::size_t i = 0; i < map.size(); ++i) m.bits[i] = map[i] > threshold ? 1 : 0;
  return m;
}

BinaryMask filter_mask(std::span<const float> map, int height, int width, float threshold,
                       int out_h, int out_w) {
  return ResizeBinary(ThresholdMap(map, height, width, threshold), out_h, out_w);
}

double iou_set(std::span<const MaskPair> pairs) {
  OverlapCounts total;
  for (const MaskPair& p : pairs) total += CountOverlap(p.prediction, p.truth);
  return IoUFromCounts(total);
}

double iou_individual(const BinaryMask& prediction, const BinaryMask& truth) {
  return IoUFromCounts(CountOverlap(prediction, truth));
}

BinaryMask TruthAt(const BinaryMask& truth, const LayerRecord& layer,
                   EvalResolution resolution) {
  if (resolution == EvalResolution::kGroundTruth) return truth;
  return ResizeBinary(truth, layer.height, layer.width);
}

std::vector<BinaryMask> FilterMasks(const ActivationBundle& bundle,
                                    const ThresholdTable& thresholds, int out_h, int out_w) {
  if (thresholds.thresholds.size() != static_cast<std::size_t>(bundle.filters)) {
    throw Error(ErrorCode::kShapeMismatch, bundle.layer,
                "threshold table has " + std::to_string(thresholds.thresholds.size()) +
                    " entries for " + std::to_string(bundle.filters) + " filters");
  }
  std::vector<BinaryMask> out;
  out.reserve(bundle.filters);
  for (int k = 0; k < bundle.filters; ++k) {
    out.push_back(filter_mask(bundle.map(k), bundle.height, bundle.width,
                              thresholds.thresholds[k], out_h, out_w));
  }
  return out;
}

namespace {

// Per-filter pooled counts over the images of one split.
std::vector<OverlapCounts> SplitCounts(const ProbeDataset& dataset, std::string_view layer,
                                       int concept_idx, const ThresholdTable& thresholds,
                                       const std::vector<int>& images,
                                       EvalResolution resolution) {
  const LayerRecord& rec = dataset.layer(layer);
  std::vector<OverlapCounts> counts(rec.filters);
  for (int i : images) {
    const Annotation* a = dataset.annotation(i, concept_idx);
    const BinaryMask truth = TruthAt(*a->mask, rec, resolution);
    const auto masks = FilterMasks(dataset.bundle(layer, i), thresholds, truth.height,
                                   truth.width);
    for (int k = 0; k < rec.filters; ++k) counts[k] += CountOverlap(masks[k], truth);
  }
  return counts;
}

int SegmentationConcept(const ProbeDataset& dataset, std::string_view concept_id) {
  const int c = dataset.concept_index(concept_id);
  if (!dataset.concepts()[c].has_segmentation) {
    throw Error(ErrorCode::kNoSegmentation, std::string(concept_id),
                "concept has no segmentation annotations");
  }
  return c;
}

}  // namespace

std::vector<double> filter_set_ious(const ProbeDataset& dataset, std::string_view layer,
                                    std::string_view concept_id,
                                    const ThresholdTable& thresholds, Split split,
                                    EvalResolution resolution) {
  const int c = SegmentationConcept(dataset, concept_id);
  const auto counts = SplitCounts(dataset, layer, c, thresholds,
                                  dataset.segmentation_images(c, split), resolution);
  std::vector<double> out;
  out.reserve(counts.size());
  for (const auto& oc : counts) out.push_back(IoUFromCounts(oc));
  return out;
}

FilterConceptScore best_filter(const ProbeDataset& dataset, std::string_view layer,
                               std::string_view concept_id,
                               const ThresholdTable& thresholds,
                               EvalResolution resolution) {
  const int c = SegmentationConcept(dataset, concept_id);
  const std::vector<int> train = dataset.segmentation_images(c, Split::kTrain);
  if (train.empty()) {
    throw Error(ErrorCode::kEmptySplit, std::string(concept_id), "no training images");
  }
  const auto counts = SplitCounts(dataset, layer, c, thresholds, train, resolution);
  FilterConceptScore score;
  score.concept_id = std::string(concept_id);
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const double iou = IoUFromCounts(counts[k]);
    if (score.filter < 0 || iou > score.iou_train) {
      score.filter = static_cast<int>(k);
      score.iou_train = iou;
    }
  }
  const std::vector<int> val = dataset.segmentation_images(c, Split::kVal);
  if (!val.empty()) {
    const LayerRecord& rec = dataset.layer(layer);
    OverlapCounts total;
    for (int i : val) {
      const ActivationBundle& b = dataset.bundle(layer, i);
      const BinaryMask truth = TruthAt(*dataset.annotation(i, c)->mask, rec, resolution);
      total += CountOverlap(filter_mask(b.map(score.filter), b.height, b.width,
                                        thresholds.thresholds[score.filter], truth.height,
                                        truth.width),
                            truth);
    }
    score.iou_val = IoUFromCounts(total);
  }
  return score;
}

std::vector<FilterConceptScore> dissect_all(const ProbeDataset& dataset,
                                            std::string_view layer,
                                            const ThresholdTable& thresholds,
                                            EvalResolution resolution, int threads) {
  std::vector<std::string> ids;
  for (std::size_t c = 0; c < dataset.concepts().size(); ++c) {
    if (dataset.concepts()[c].has_segmentation &&
        !dataset.segmentation_images(static_cast<int>(c), Split::kTrain).empty()) {
      ids.push_back(dataset.concepts()[c].id);
    }
  }
  std::vector<FilterConceptScore> out(ids.size());
  ParallelFor(ids.size(), threads, [&](std::size_t i) {
    out[i] = best_filter(dataset, layer, ids[i], thresholds, resolution);
  });
  return out;
}

}  // namespace conceptvec
