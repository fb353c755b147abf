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

#ifndef CONCEPTVEC_REPORTING_H_
#define CONCEPTVEC_REPORTING_H_

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "conceptvec/dataset.h"
#include "conceptvec/mask.h"
#include "conceptvec/seg_trainer.h"
#include "conceptvec/weights.h"

namespace conceptvec {

struct ConceptMetric {
  std::string concept_id;
  Category category = Category::kOther;
  double value = 0.0;
};

struct CategoryAggregate {
  Category category = Category::kOther;
  Task task = Task::kSegmentation;
  int n_concepts = 0;
  double mean_metric = 0.0;
  double standard_error = 0.0;  // sample stddev / sqrt(n); 0 when n == 1
};

/// Mean and standard error of a per-concept metric within each category, in
/// category enum order. Independent of input order.
std::vector<CategoryAggregate> category_aggregates(Task task,
                                                   std::span<const ConceptMetric> metrics);

/// Single-filter and multi-filter validation metric of one concept.
struct ComboPair {
  std::string concept_id;
  double single = 0.0;
  double multi = 0.0;
};

/// Pairs the two metric maps; throws if a concept appears in only one.
std::vector<ComboPair> PairMetrics(const std::map<std::string, double>& single,
                                   const std::map<std::string, double>& multi);

/// Fraction of concepts whose multi-filter metric is >= the single-filter one.
double combo_vs_single(std::span<const ComboPair> pairs);

struct SharingBin {
  int lo = 0;
  int hi = -1;  // inclusive; -1 means unbounded
  int count = 0;
};

struct SharingHistogram {
  std::vector<int> per_filter;  // concepts selecting each filter
  std::vector<SharingBin> bins;
  int zero_filters = 0;
};

/// Default bins: 0, 1, 2, 3, 4-5, 6-10, 11+.
std::vector<SharingBin> DefaultSharingBins();

SharingHistogram filter_sharing_histogram(const std::map<std::string, int>& best_filters,
                                          int filters, std::vector<SharingBin> bins);

inline constexpr int kSmallDatasetMin = 10;
inline constexpr int kSmallDatasetMax = 100;
inline constexpr double kSmallObjectFraction = 0.01;

struct FailureRecord {
  std::string concept_id;
  double single = 0.0;
  double multi = 0.0;
  int n_train = 0;
  std::optional<double> mean_size;  // foreground fraction; segmentation only
  bool small_dataset = false;
  bool small_object = false;
};

FailureRecord DiagnoseConcept(std::string concept_id, int n_train,
                              std::optional<double> mean_size);

/// Mean over a concept's training masks of |L| / (h * w); empty when the
/// concept has no training masks.
std::optional<double> MeanConceptSize(const ProbeDataset& dataset, int concept_idx);

/// Records for every concept where multi < single. For segmentation n_train
/// counts X_train,c; for classification it counts the positive training
/// images.
std::vector<FailureRecord> failure_diagnostics(Task task, std::span<const ComboPair> pairs,
                                               const ProbeDataset& dataset);

struct DecileSelection {
  std::string concept_id;
  std::vector<ImageScore> ranked;
  int n_zero = 0;
  std::optional<std::string> warning;
};

/// Picks the examples at each decile of the non-zero IoU values: sorted
/// ascending (ties by image id), slot i takes rank ceil(i * n / 10) - 1.
/// Fewer than 10 non-zero values returns all of them with a warning.
DecileSelection decile_examples(const std::string& concept_id,
                                const std::map<std::string, double>& per_image_ious);

struct SweepPoint {
  int f = 0;
  int n_concepts = 0;
  double mean_metric = 0.0;
  double standard_error = 0.0;
};

struct SweepRow {
  std::string concept_id;
  int f = 0;
  double metric = 0.0;
};

/// Mean metric per F, ascending F.
std::vector<SweepPoint> f_sweep_curve(std::span<const SweepRow> rows);

/// Binary PGM (P5, maxval 255): foreground 255, background 0.
void export_mask_raster(const BinaryMask& mask, const std::filesystem::path& path);

}  // namespace conceptvec

#endif  // CONCEPTVEC_REPORTING_H_
