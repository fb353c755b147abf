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

#ifndef CONCEPTVEC_SYNTH_H_
#define CONCEPTVEC_SYNTH_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "conceptvec/dataset.h"
#include "json.hpp"

namespace conceptvec {

enum class Combine { kUnion, kIntersection };

struct PlantedConcept {
  std::string id;
  std::vector<int> support;
  Combine combine = Combine::kUnion;
  double noise_sigma = 0.0;
  double area_fraction = 0.1;  // target ground-truth foreground fraction
  // Support filters firing in each positive image; 0 means all of them.
  // Union concepts only.
  int active_per_image = 0;
  Category category = Category::kObject;
};

/// A synthetic probe dataset with known concept encodings. Images are dealt
/// round-robin to concepts within each split, so every image is positive
/// for exactly one concept.
struct PlantSpec {
  std::string layer = "synth";
  int filters = 32;
  int grid_h = 8;
  int grid_w = 8;
  int gt_h = 29;  // 29 = 4 * (8 - 1) + 1: an exact align-corners scale of 4
  int gt_w = 29;
  std::vector<PlantedConcept> concepts;
  int n_train = 200;
  int n_val = 50;
  std::uint64_t seed = 0;
  // Regions must stay inside the top-tau tail of every filter so that the
  // dissection threshold separates them; checked by generate().
  double tau = 0.005;

  /// Throws kInvalidArgument.
  void Validate() const;
};

nlohmann::json PlantSpecToJson(const PlantSpec& spec);
PlantSpec PlantSpecFromJson(const nlohmann::json& j);

/// K = 32, 8x8 grid, 16 disjoint two-filter union concepts, 200/50 images.
PlantSpec DefaultSuite(std::uint64_t seed);
/// K = 32, eight support-4 union concepts with two of four filters firing
/// per positive image.
PlantSpec TopFSuite(std::uint64_t seed);
/// K = 32, 16x16 grid; filter 5 is the whole encoding of three concepts,
/// seven further concepts own one filter each.
PlantSpec SharedFilterSuite(std::uint64_t seed);

/// Axis-aligned cell rectangle, inclusive bounds.
struct CellRect {
  int r0 = 0, c0 = 0, r1 = 0, c1 = 0;
  int area() const { return (r1 - r0 + 1) * (c1 - c0 + 1); }
};

struct PlantedImage {
  std::string id;
  Split split = Split::kTrain;
  int concept_idx = 0;
  std::vector<int> active;         // firing support filters, ascending
  std::vector<CellRect> regions;   // parallel to `active`
};

/// Geometry of every image; deterministic in the spec.
std::vector<PlantedImage> PlanImages(const PlantSpec& spec);

/// Full in-memory dataset. Throws kInfeasible when a filter's planted cells
/// exceed the exceedance count of its threshold, or regions cannot be placed.
DatasetContents GenerateContents(const PlantSpec& spec);

/// Writes the dataset plus a plant_spec.json echo; returns the manifest path.
std::filesystem::path generate(const PlantSpec& spec, const std::filesystem::path& out_dir);

struct ConceptOracle {
  std::string concept_id;
  int best_single_filter = -1;
  double best_single_iou_train = 0.0;
  double best_single_iou_val = 0.0;
  // IoU_set on val attainable by a linear combination of the support
  // filters' indicator masks (positive decision strictly above 0).
  double attainable_iou_val = 0.0;
  bool approximate = false;  // noisy spec: bounds ignore spurious cells
};

/// Exact set-IoU bounds from region geometry.
std::vector<ConceptOracle> oracle_metrics(const PlantSpec& spec);

}  // namespace conceptvec

#endif  // CONCEPTVEC_SYNTH_H_
