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

#ifndef CONCEPTVEC_SEG_TRAINER_H_
#define CONCEPTVEC_SEG_TRAINER_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "conceptvec/dataset.h"
#include "conceptvec/dissection.h"
#include "conceptvec/thresholds.h"
#include "conceptvec/weights.h"

namespace conceptvec {

// Multi-filter segmentation. The model scores pixel p as
//
//   z(p) = sum_k w_k * M_k(p),   probability = sigmoid(z(p))
//
// where M_k is the single-filter mask of filter k at the comparison
// resolution (thresholded on the activation grid, then resized). A one-hot w
// with a positive weight therefore reproduces filter_mask bit for bit.

inline constexpr double kProbabilityClamp = 1e-7;

/// Default F sweep for top-F segmentation retraining.
inline const std::vector<int> kDefaultSegSweep = {1, 2, 4, 8, 16, 32, 64, 128, 160, 192, 224};

struct SegPrediction {
  int height = 0;
  int width = 0;
  std::vector<double> probabilities;
  BinaryMask mask;  // probability > 0.5
};

SegPrediction predict_seg(const ActivationBundle& bundle, const ThresholdTable& thresholds,
                          const ConceptWeights& weights, int out_h, int out_w);

/// Mean over pixels of -[a*L*log M + (1-a)*(1-L)*log(1-M)] with M clamped to
/// [1e-7, 1 - 1e-7]. kLiteral drops the logarithms.
double seg_loss(std::span<const double> probabilities, const BinaryMask& truth, double alpha,
                LossForm form = LossForm::kBce);

/// Pixels of one image sharing the same set of active filters.
struct PatternGroup {
  std::vector<int> filters;  // ascending
  std::uint32_t foreground = 0;
  std::uint32_t background = 0;
};

/// One training image compressed to its distinct filter patterns.
struct SegExample {
  std::vector<PatternGroup> groups;
  std::uint64_t pixels = 0;
  std::uint64_t foreground = 0;
};

/// Per-pixel active-filter patterns of one image.
struct PixelPatterns {
  int height = 0;
  int width = 0;
  std::vector<std::vector<int>> patterns;
  std::vector<std::uint32_t> pixel_pattern;  // index into patterns
};

PixelPatterns BuildPixelPatterns(std::span<const BinaryMask> filter_masks);
SegExample MakeSegExample(const PixelPatterns& patterns, const BinaryMask& truth);

/// Batch loss (mean over images of per-image pixel means) and, when `grad`
/// is given, its exact gradient with respect to w.
double SegObjective(std::span<const SegExample* const> batch, std::span<const double> w,
                    double alpha, LossForm form, std::vector<double>* grad);

/// Filter patterns for every image that has a mask annotation, computed once
/// per layer and shared by all concepts.
class IndicatorCache {
 public:
  IndicatorCache(const ProbeDataset& dataset, std::string_view layer,
                 const ThresholdTable& thresholds, EvalResolution resolution, int threads);

  /// nullptr when the image was not cached.
  const PixelPatterns* patterns(int image) const;

 private:
  std::vector<std::optional<PixelPatterns>> per_image_;
};

/// Loss on the full training set at initialization and after each epoch.
struct TrainTrace {
  std::vector<double> epoch_loss;
};

/// alpha = 1 - (foreground pixels) / (all ground-truth pixels) over the
/// training images of a concept.
double ComputeAlpha(std::span<const SegExample> examples, std::string_view concept_id);

/// Trains w from zero with momentum SGD. `support` restricts learning to the
/// listed filters (all others stay exactly zero).
ConceptWeights train_seg(const ProbeDataset& dataset, std::string_view layer,
                         std::string_view concept_id, const ThresholdTable& thresholds,
                         const TrainConfig& config,
                         const std::optional<std::vector<int>>& support = std::nullopt,
                         const IndicatorCache* cache = nullptr, TrainTrace* trace = nullptr);

/// Retrains from scratch on the top-F filters of `base`.
ConceptWeights train_seg_topf(const ProbeDataset& dataset, std::string_view layer,
                              std::string_view concept_id, int f, const ConceptWeights& base,
                              const ThresholdTable& thresholds, const TrainConfig& config,
                              const IndicatorCache* cache = nullptr);

struct ImageScore {
  std::string image;
  double iou = 0.0;
};

struct SegEvaluation {
  double iou_set = 0.0;
  std::vector<ImageScore> per_image;  // image id order
};

SegEvaluation eval_seg(const ProbeDataset& dataset, std::string_view layer,
                       std::string_view concept_id, const ThresholdTable& thresholds,
                       const ConceptWeights& weights, Split split,
                       EvalResolution resolution = EvalResolution::kGroundTruth);

/// Segmentation concepts that have training images, in id order.
std::vector<std::string> TrainableSegConcepts(const ProbeDataset& dataset);

}  // namespace conceptvec

#endif  // CONCEPTVEC_SEG_TRAINER_H_
