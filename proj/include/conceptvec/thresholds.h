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

#ifndef CONCEPTVEC_THRESHOLDS_H_
#define CONCEPTVEC_THRESHOLDS_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "conceptvec/dataset.h"

namespace conceptvec {

inline constexpr double kDefaultTau = 0.005;

/// Which probe images contribute observations to the activation quantiles.
enum class ThresholdScope { kAllImages, kTrainOnly };

/// Per-filter activation cutoffs T_k of one layer.
struct ThresholdTable {
  std::string layer;
  double tau = kDefaultTau;
  std::vector<float> thresholds;
  std::uint64_t sample_count = 0;  // observations per filter
  ThresholdScope scope = ThresholdScope::kAllImages;
};

/// m = floor(tau * n), the number of observations allowed strictly above
/// the cutoff. Clamped to n - 1.
std::uint64_t ExceedanceCount(std::uint64_t n, double tau);

/// The (m+1)-th largest value of `values` with m = ExceedanceCount. Exact
/// order statistic, no interpolation. Reorders `values`.
float QuantileThreshold(std::span<float> values, double tau);

/// Computes T_k for every filter of `layer`. Output is independent of image
/// order and of `threads`.
ThresholdTable compute_thresholds(const ProbeDataset& dataset,
                                  std::string_view layer, double tau,
                                  ThresholdScope scope = ThresholdScope::kAllImages,
                                  int threads = 1);

/// Writes `<stem>.n2vt` (shape [K]) and the `<stem>.json` sidecar.
void save_thresholds(const ThresholdTable& table, const std::filesystem::path& stem);
/// Reads a table from its JSON sidecar path.
ThresholdTable load_thresholds(const std::filesystem::path& sidecar);

}  // namespace conceptvec

#endif  // CONCEPTVEC_THRESHOLDS_H_
