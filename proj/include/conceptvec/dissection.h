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

#ifndef CONCEPTVEC_DISSECTION_H_
#define CONCEPTVEC_DISSECTION_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "conceptvec/dataset.h"
#include "conceptvec/mask.h"
#include "conceptvec/thresholds.h"

namespace conceptvec {

/// Resolution at which masks are compared against ground truth. At
/// activation resolution the truth mask is resized down to the layer grid.
enum class EvalResolution { kGroundTruth, kActivation };

struct OverlapCounts {
  std::uint64_t intersection = 0;
  std::uint64_t union_count = 0;

  OverlapCounts& operator+=(const OverlapCounts& o) {
    intersection += o.intersection;
    union_count += o.union_count;
    return *this;
  }
};

/// |M ∩ L| and |M ∪ L|. Throws kShapeMismatch.
OverlapCounts CountOverlap(const BinaryMask& prediction, const BinaryMask& truth);

/// intersection / union, 0 when the union is empty.
double IoUFromCounts(const OverlapCounts& counts);

/// Binarizes a map with the strict test a > threshold.
BinaryMask ThresholdMap(std::span<const float> map, int height, int width,
                        float threshold);

/// Single-filter segmentation mask: threshold, bilinearly resize the {0,1}
/// field (align corners), re-binarize at > 0.5.
BinaryMask filter_mask(std::span<const float> map, int height, int width,
                       float threshold, int out_h, int out_w);

struct MaskPair {
  std::reference_wrapper<const BinaryMask> prediction;
  std::reference_wrapper<const BinaryMask> truth;
};

/// Pooled IoU over all pairs: Σ|M∩L| / Σ|M∪L|.
double iou_set(std::span<const MaskPair> pairs);

/// Per-image IoU.
double iou_individual(const BinaryMask& prediction, const BinaryMask& truth);

/// Ground truth as compared at `resolution`.
BinaryMask TruthAt(const BinaryMask& truth, const LayerRecord& layer,
                   EvalResolution resolution);

/// The K filter masks of one image at the comparison resolution.
std::vector<BinaryMask> FilterMasks(const ActivationBundle& bundle,
                                    const ThresholdTable& thresholds,
                                    int out_h, int out_w);

struct FilterConceptScore {
  std::string concept_id;
  int filter = -1;
  double iou_train = 0.0;
  double iou_val = 0.0;
};

/// IoU_set(c; M_k, split) for every filter k.
std::vector<double> filter_set_ious(const ProbeDataset& dataset, std::string_view layer,
                                    std::string_view concept_id,
                                    const ThresholdTable& thresholds, Split split,
                                    EvalResolution resolution = EvalResolution::kGroundTruth);

/// Best filter on the training split (ties to the lowest index), scored on
/// both splits. An empty validation split scores 0.
FilterConceptScore best_filter(const ProbeDataset& dataset, std::string_view layer,
                               std::string_view concept_id,
                               const ThresholdTable& thresholds,
                               EvalResolution resolution = EvalResolution::kGroundTruth);

/// best_filter for every segmentation concept with training images, in
/// concept id order.
std::vector<FilterConceptScore> dissect_all(const ProbeDataset& dataset,
                                            std::string_view layer,
                                            const ThresholdTable& thresholds,
                                            EvalResolution resolution, int threads);

}  // namespace conceptvec

#endif  // CONCEPTVEC_DISSECTION_H_
