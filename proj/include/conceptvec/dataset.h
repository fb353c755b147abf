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

#ifndef CONCEPTVEC_DATASET_H_
#define CONCEPTVEC_DATASET_H_

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "conceptvec/mask.h"

namespace conceptvec {

enum class Split { kTrain, kVal };
enum class Category { kObject, kPart, kMaterial, kColor, kScene, kTexture, kOther };

std::string_view SplitName(Split split);
std::optional<Split> ParseSplit(std::string_view name);
std::string_view CategoryName(Category category);
std::optional<Category> ParseCategory(std::string_view name);

struct ImageRecord {
  std::string id;
  int height = 0;  // ground-truth raster size
  int width = 0;
  Split split = Split::kTrain;
};

struct ConceptRecord {
  std::string id;
  std::string name;
  Category category = Category::kOther;
  bool has_segmentation = false;
};

struct LayerRecord {
  std::string name;
  int filters = 0;
  int height = 0;
  int width = 0;

  std::size_t map_size() const { return static_cast<std::size_t>(height) * width; }
};

/// K activation maps of one image at one layer, stored [K, H_l, W_l].
struct ActivationBundle {
  std::string layer;
  std::string image;
  int filters = 0;
  int height = 0;
  int width = 0;
  bool post_relu = true;
  std::vector<float> values;

  std::size_t map_size() const { return static_cast<std::size_t>(height) * width; }
  std::span<const float> map(int k) const {
    return std::span<const float>(values).subspan(k * map_size(), map_size());
  }
};

/// A mask, an image-level label, or both, for one (image, concept) pair.
struct Annotation {
  std::string image;
  std::string concept_id;
  std::optional<BinaryMask> mask;
  std::optional<int> label;

  /// Label when given, otherwise presence of a mask.
  bool positive() const { return label ? *label == 1 : mask.has_value(); }
};

/// Everything a dataset holds, before validation. Used both by the manifest
/// loader and by in-memory builders (tests, the synthetic generator).
struct DatasetContents {
  std::vector<ImageRecord> images;
  std::vector<ConceptRecord> concepts;
  std::vector<LayerRecord> layers;
  std::vector<ActivationBundle> activations;
  std::vector<Annotation> annotations;
};

/// Immutable, validated probe dataset. All collections are ordered by id so
/// that every downstream iteration and tie-break is deterministic.
class ProbeDataset {
 public:
  /// Validates every invariant eagerly; throws Error naming the entity.
  static ProbeDataset Create(DatasetContents contents);

  const std::vector<ImageRecord>& images() const { return images_; }
  const std::vector<ConceptRecord>& concepts() const { return concepts_; }
  const std::vector<LayerRecord>& layers() const { return layers_; }

  int image_index(std::string_view id) const;
  int concept_index(std::string_view id) const;
  const ConceptRecord& concept_by_id(std::string_view id) const;
  const LayerRecord& layer(std::string_view name) const;

  bool has_bundle(std::string_view layer, int image) const;
  /// Throws kMissingBundle.
  const ActivationBundle& bundle(std::string_view layer, int image) const;

  /// nullptr when the pair has no annotation.
  const Annotation* annotation(int image, int concept_idx) const;

  /// X_{s,c} for segmentation: images of the split holding a mask for c.
  std::vector<int> segmentation_images(int concept_idx, Split split) const;
  /// Positive and negative image indices of a split for classification.
  std::pair<std::vector<int>, std::vector<int>> classification_split(
      int concept_idx, Split split) const;
  /// Images of a split, or of both splits when `split` is empty.
  std::vector<int> images_in(std::optional<Split> split) const;

  /// Non-fatal findings, e.g. concepts with no validation examples.
  const std::vector<std::string>& warnings() const { return warnings_; }

  const DatasetContents& contents() const { return contents_; }

 private:
  ProbeDataset() = default;

  std::vector<ImageRecord> images_;
  std::vector<ConceptRecord> concepts_;
  std::vector<LayerRecord> layers_;
  std::map<std::string, int, std::less<>> image_ids_;
  std::map<std::string, int, std::less<>> concept_ids_;
  std::map<std::string, int, std::less<>> layer_ids_;
  // (layer index, image index) -> position in contents_.activations
  std::map<std::pair<int, int>, int> bundles_;
  // (image index, concept index) -> position in contents_.annotations
  std::map<std::pair<int, int>, int> annotations_;
  std::vector<std::string> warnings_;
  DatasetContents contents_;
};

/// Parses and validates a JSON manifest; tensor paths are relative to the
/// manifest's directory.
ProbeDataset load_dataset(const std::filesystem::path& manifest);

/// Writes contents as a manifest plus tensor files under `dir`; returns the
/// manifest path. Layout: activations/<layer>/<image>.n2vt and
/// masks/<concept>/<image>.n2vt.
std::filesystem::path write_dataset(const DatasetContents& contents,
                                    const std::filesystem::path& dir);

}  // namespace conceptvec

#endif  // CONCEPTVEC_DATASET_H_
