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

#include "conceptvec/reporting.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "conceptvec/error.h"

namespace conceptvec {
namespace {

// Mean and standard error of values sorted ascending (so the result does not
// depend on input order).
std::pair<double, double> MeanAndStandardError(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n;
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

}  // namespace

std::vector<CategoryAggregate> category_aggregates(Task task,
                                                   std::span<const ConceptMetric> metrics) {
  std::map<Category, std::vector<double>> groups;
  for (const auto& m : metrics) groups[m.category].push_back(m.value);
  std::vector<CategoryAggregate> out;
  for (auto& [category, values] : groups) {
    const auto [mean, se] = MeanAndStandardError(values);
    out.push_back({category, task, static_cast<int>(values.size()), mean, se});
  }
  return out;
}

std::vector<ComboPair> PairMetrics(const std::map<std::string, double>& single,
                                   const std::map<std::string, double>& multi) {
  std::vector<ComboPair> out;
  for (const auto& [id, s] : single) {
    auto it = multi.find(id);
    if (it == multi.end()) {
      throw Error(ErrorCode::kDanglingReference, id, "no multi-filter metric");
    }
    out.push_back({id, s, it->second});
  }
  for (const auto& [id, m] : multi) {
    if (!single.count(id)) {
      throw Error(ErrorCode::kDanglingReference, id, "no single-filter metric");
    }
  }
  return out;
}

double combo_vs_single(std::span<const ComboPair> pairs) {
  if (pairs.empty()) throw Error(ErrorCode::kEmptySplit, "combo_vs_single", "no concepts");
  std::size_t wins = 0;
  for (const auto& p : pairs) wins += p.multi >= p.single ? 1 : 0;
  return static_cast<double>(wins) / static_cast<double>(pairs.size());
}

std::vector<SharingBin> DefaultSharingBins() {
  return {{0, 0, 0}, {1, 1, 0}, {2, 2, 0}, {3, 3, 0}, {4, 5, 0}, {6, 10, 0}, {11, -1, 0}};
}

SharingHistogram filter_sharing_histogram(const std::map<std::string, int>& best_filters,
                                          int filters, std::vector<SharingBin> bins) {
  SharingHistogram h;
  h.per_filter.assign(filters, 0);
  for (const auto& [id, k] : best_filters) {
    if (k < 0 || k >= filters) {
      throw Error(ErrorCode::kInvalidArgument, id, "best filter index out of range");
    }
    ++h.per_filter[k];
  }
  h.bins = std::move(bins);
  for (auto& b : h.bins) b.count = 0;
  for (int count : h.per_filter) {
    if (count == 0) ++h.zero_filters;
    for (auto& b : h.bins) {
      if (count >= b.lo && (b.hi < 0 || count <= b.hi)) {
        ++b.count;
        break;
      }
    }
  }
  return h;
}

FailureRecord DiagnoseConcept(std::string concept_id, int n_train,
                              std::optional<double> mean_size) {
  FailureRecord r;
  r.concept_id = std::move(concept_id);
  r.n_train = n_train;
  r.mean_size = mean_size;
  r.small_dataset = n_train >= kSmallDatasetMin && n_train <= kSmallDatasetMax;
  r.small_object = mean_size && *mean_size < kSmallObjectFraction;
  return r;
}

std::optional<double> MeanConceptSize(const ProbeDataset& dataset, int concept_idx) {
  const std::vector<int> train = dataset.segmentation_images(concept_idx, Split::kTrain);
  if (train.empty()) return std::nullopt;
  double sum = 0.0;
  for (int i : train) {
    const BinaryMask& m = *dataset.annotation(i, concept_idx)->mask;
    sum += static_cast<double>(m.count()) / static_cast<double>(m.size());
  }
  return sum / static_cast<double>(train.size());
}

std::vector<FailureRecord> failure_diagnostics(Task task, std::span<const ComboPair> pairs,
                                               const ProbeDataset& dataset) {
  std::vector<FailureRecord> out;
  for (const auto& p : pairs) {
    if (!(p.multi < p.single)) continue;
    const int c = dataset.concept_index(p.concept_id);
    const int n_train =
        task == Task::kSegmentation
            ? static_cast<int>(dataset.segmentation_images(c, Split::kTrain).size())
            : static_cast<int>(dataset.classification_split(c, Split::kTrain).first.size());
    FailureRecord r = DiagnoseConcept(p.concept_id, n_train, MeanConceptSize(dataset, c));
    r.single = p.single;
    r.multi = p.multi;
    out.push_back(std::move(r));
  }
  return out;
}

DecileSelection decile_examples(const std::string& concept_id,
                                const std::map<std::string, double>& per_image_ious) {
  DecileSelection sel;
  sel.concept_id = concept_id;
  std::vector<ImageScore> nonzero;
  for (const auto& [image, iou] : per_image_ious) {
    if (iou > 0.0) {
      nonzero.push_back({image, iou});
    } else {
      ++sel.n_zero;
    }
  }
  std::sort(nonzero.begin(), nonzero.end(), [](const ImageScore& a, const ImageScore& b) {
    return a.iou != b.iou ? a.iou < b.iou : a.image < b.image;
  });
  const std::size_t n = nonzero.size();
  if (n < 10) {
    sel.warning = "only " + std::to_string(n) + " examples with non-zero IoU";
    sel.ranked = std::move(nonzero);
    return sel;
  }
  for (std::size_t i = 1; i <= 10; ++i) {
    const std::size_t rank = (i * n + 9) / 10 - 1;
    sel.ranked.push_back(nonzero[rank]);
  }
  return sel;
}

std::vector<SweepPoint> f_sweep_curve(std::span<const SweepRow> rows) {
  std::map<int, std::vector<double>> by_f;
  for (const auto& r : rows) by_f[r.f].push_back(r.metric);
  std::vector<SweepPoint> out;
  for (auto& [f, values] : by_f) {
    const auto [mean, se] = MeanAndStandardError(values);
    out.push_back({f, static_cast<int>(values.size()), mean, se});
  }
  return out;
}

void export_mask_raster(const BinaryMask& mask, const std::filesystem::path& path) {
  if (mask.height < 1 || mask.width < 1 || mask.bits.size() != mask.size()) {
    throw Error(ErrorCode::kInvalidShape, path.string(), "invalid mask");
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << "P5\n" << mask.width << " " << mask.height << "\n255\n";
  for (std::uint8_t b : mask.bits) out.put(static_cast<char>(b ? 0xFF : 0x00));
  if (!out) throw Error(ErrorCode::kIo, path.string(), "write failed");
}

}  // namespace conceptvec
