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

#include "conceptvec/dataset.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "conceptvec/error.h"
#include "conceptvec/tensor_file.h"
#include "json.hpp"

namespace conceptvec {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kManifestVersion = 1;

const json& Require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw Error(ErrorCode::kSchema, where, std::string("missing field '") + key + "'");
  }
  return *it;
}

std::string RequireString(const json& obj, const char* key, const std::string& where) {
  const json& v = Require(obj, key, where);
  if (!v.is_string()) {
    throw Error(ErrorCode::kSchema, where, std::string("'") + key + "' must be a string");
  }
  return v.get<std::string>();
}

int RequirePositiveInt(const json& obj, const char* key, const std::string& where) {
  const json& v = Require(obj, key, where);
  if (!v.is_number_integer() || v.get<long long>() < 1 ||
      v.get<long long>() > (1LL << 30)) {
    throw Error(ErrorCode::kSchema, where,
                std::string("'") + key + "' must be a positive integer");
  }
  return v.get<int>();
}

bool RequireBool(const json& obj, const char* key, const std::string& where) {
  const json& v = Require(obj, key, where);
  if (!v.is_boolean()) {
    throw Error(ErrorCode::kSchema, where, std::string("'") + key + "' must be a boolean");
  }
  return v.get<bool>();
}

const json& RequireArray(const json& obj, const char* key) {
  const json& v = Require(obj, key, "manifest");
  if (!v.is_array()) {
    throw Error(ErrorCode::kSchema, "manifest", std::string("'") + key + "' must be an array");
  }
  return v;
}

std::string SafeName(std::string_view id) {
  std::string out(id);
  for (char& c : out) {
    if (c == '/' || c == '\\' || c == ':') c = '_';
  }
  return out;
}

template <typename T, typename Key>
void SortById(std::vector<T>& v, Key key) {
  std::sort(v.begin(), v.end(),
            [&](const T& a, const T& b) { return key(a) < key(b); });
}

}  // namespace

std::string_view SplitName(Split split) {
  return split == Split::kTrain ? "train" : "val";
}

std::optional<Split> ParseSplit(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kVal;
  return std::nullopt;
}

std::string_view CategoryName(Category category) {
  switch (category) {
    case Category::kObject: return "object";
    case Category::kPart: return "part";
    case Category::kMaterial: return "material";
    case Category::kColor: return "color";
    case Category::kScene: return "scene";
    case Category::kTexture: return "texture";
    case Category::kOther: return "other";
  }
  return "other";
}

std::optional<Category> ParseCategory(std::string_view name) {
  for (Category c : {Category::kObject, Category::kPart, Category::kMaterial,
                     Category::kColor, Category::kScene, Category::kTexture,
                     Category::kOther}) {
    if (CategoryName(c) == name) return c;
  }
  return std::nullopt;
}

ProbeDataset ProbeDataset::Create(DatasetContents contents) {
  ProbeDataset ds;
  SortById(contents.images, [](const ImageRecord& r) -> const std::string& { return r.id; });
  SortById(contents.concepts, [](const ConceptRecord& r) -> const std::string& { return r.id; });
  SortById(contents.layers, [](const LayerRecord& r) -> const std::string& { return r.name; });
  std::sort(contents.activations.begin(), contents.activations.end(),
            [](const ActivationBundle& a, const ActivationBundle& b) {
              return std::tie(a.layer, a.image) < std::tie(b.layer, b.image);
            });
  std::sort(contents.annotations.begin(), contents.annotations.end(),
            [](const Annotation& a, const Annotation& b) {
              return std::tie(a.image, a.concept_id) < std::tie(b.image, b.concept_id);
            });

  for (std::size_t i = 0; i < contents.images.size(); ++i) {
    const ImageRecord& img = contents.images[i];
    if (img.id.empty()) throw Error(ErrorCode::kSchema, "images", "empty image id");
    if (img.height < 1 || img.width < 1) {
      throw Error(ErrorCode::kSchema, img.id, "image raster size must be >= 1");
    }
    if (!ds.image_ids_.emplace(img.id, static_cast<int>(i)).second) {
      throw Error(ErrorCode::kDuplicateId, img.id, "duplicate image id");
    }
  }
  for (std::size_t i = 0; i < contents.concepts.size(); ++i) {
    const ConceptRecord& c = contents.concepts[i];
    if (c.id.empty()) throw Error(ErrorCode::kSchema, "concepts", "empty concept id");
    if (!ds.concept_ids_.emplace(c.id, static_cast<int>(i)).second) {
      throw Error(ErrorCode::kDuplicateId, c.id, "duplicate concept id");
    }
  }
  for (std::size_t i = 0; i < contents.layers.size(); ++i) {
    const LayerRecord& l = contents.layers[i];
    if (l.name.empty()) throw Error(ErrorCode::kSchema, "layers", "empty layer name");
    if (l.filters < 1 || l.height < 1 || l.width < 1) {
      throw Error(ErrorCode::kSchema, l.name, "layer dimensions must be >= 1");
    }
    if (!ds.layer_ids_.emplace(l.name, static_cast<int>(i)).second) {
      throw Error(ErrorCode::kDuplicateId, l.name, "duplicate layer name");
    }
  }

  for (std::size_t i = 0; i < contents.activations.size(); ++i) {
    const ActivationBundle& b = contents.activations[i];
    const std::string where = b.layer + "/" + b.image;
    auto li = ds.layer_ids_.find(b.layer);
    if (li == ds.layer_ids_.end()) {
      throw Error(ErrorCode::kDanglingReference, where, "unknown layer '" + b.layer + "'");
    }
    auto ii = ds.image_ids_.find(b.image);
    if (ii == ds.image_ids_.end()) {
      throw Error(ErrorCode::kDanglingReference, where, "unknown image '" + b.image + "'");
    }
    const LayerRecord& l = contents.layers[li->second];
    if (b.filters != l.filters || b.height != l.height || b.width != l.width ||
        b.values.size() != static_cast<std::size_t>(l.filters) * l.map_size()) {
      throw Error(ErrorCode::kShapeMismatch, where,
                  "bundle shape does not match layer record " + l.name);
    }
    for (float v : b.values) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kNonFinite, where, "non-finite activation");
      }
      if (b.post_relu && v < 0.0f) {
        throw Error(ErrorCode::kSchema, where, "negative value in a post-ReLU bundle");
      }
    }
    if (!ds.bundles_.emplace(std::pair(li->second, ii->second), static_cast<int>(i)).second) {
      throw Error(ErrorCode::kDuplicateId, where, "duplicate activation bundle");
    }
  }

  for (std::size_t i = 0; i < contents.annotations.size(); ++i) {
    const Annotation& a = contents.annotations[i];
    const std::string where = a.image + "/" + a.concept_id;
    auto ii = ds.image_ids_.find(a.image);
    if (ii == ds.image_ids_.end()) {
      throw Error(ErrorCode::kDanglingReference, where, "unknown image '" + a.image + "'");
    }
    auto ci = ds.concept_ids_.find(a.concept_id);
    if (ci == ds.concept_ids_.end()) {
      throw Error(ErrorCode::kDanglingReference, where,
                  "unknown concept '" + a.concept_id + "'");
    }
    if (!a.mask && !a.label) {
      throw Error(ErrorCode::kSchema, where, "annotation has neither mask nor label");
    }
    if (a.label && *a.label != 0 && *a.label != 1) {
      throw Error(ErrorCode::kSchema, where, "label must be 0 or 1");
    }
    if (a.mask) {
      const ImageRecord& img = contents.images[ii->second];
      if (!contents.concepts[ci->second].has_segmentation) {
        throw Error(ErrorCode::kSchema, where,
                    "mask given for a concept without segmentation");
      }
      if (a.mask->height != img.height || a.mask->width != img.width) {
        throw Error(ErrorCode::kShapeMismatch, where,
                    "mask is " + std::to_string(a.mask->height) + "x" +
                        std::to_string(a.mask->width) + ", image raster is " +
                        std::to_string(img.height) + "x" + std::to_string(img.width));
      }
      if (a.label && *a.label == 0 && a.mask->count() > 0) {
        throw Error(ErrorCode::kSchema, where, "label 0 contradicts a non-empty mask");
      }
    }
    if (!ds.annotations_.emplace(std::pair(ii->second, ci->second), static_cast<int>(i)).second) {
      throw Error(ErrorCode::kDuplicateId, where, "duplicate annotation");
    }
  }

  ds.images_ = contents.images;
  ds.concepts_ = contents.concepts;
  ds.layers_ = contents.layers;
  ds.contents_ = std::move(contents);

  for (std::size_t c = 0; c < ds.concepts_.size(); ++c) {
    const int ci = static_cast<int>(c);
    const bool has_val = ds.concepts_[c].has_segmentation
                             ? !ds.segmentation_images(ci, Split::kVal).empty()
                             : !ds.classification_split(ci, Split::kVal).first.empty();
    if (!has_val) {
      ds.warnings_.push_back("concept '" + ds.concepts_[c].id +
                             "' has no validation examples");
    }
  }
  return ds;
}

int ProbeDataset::image_index(std::string_view id) const {
  auto it = image_ids_.find(id);
  if (it == image_ids_.end()) {
    throw Error(ErrorCode::kDanglingReference, std::string(id), "unknown image");
  }
  return it->second;
}

int ProbeDataset::concept_index(std::string_view id) const {
  auto it = concept_ids_.find(id);
  if (it == concept_ids_.end()) {
    throw Error(ErrorCode::kUnknownConcept, std::string(id), "unknown concept");
  }
  return it->second;
}

const ConceptRecord& ProbeDataset::concept_by_id(std::string_view id) const {
  return concepts_[concept_index(id)];
}

const LayerRecord& ProbeDataset::layer(std::string_view name) const {
  auto it = layer_ids_.find(name);
  if (it == layer_ids_.end()) {
    throw Error(ErrorCode::kInvalidArgument, std::string(name), "unknown layer");
  }
  return layers_[it->second];
}

bool ProbeDataset::has_bundle(std::string_view layer_name, int image) const {
  auto li = layer_ids_.find(layer_name);
  return li != layer_ids_.end() && bundles_.count({li->second, image}) > 0;
}

const ActivationBundle& ProbeDataset::bundle(std::string_view layer_name, int image) const {
  auto li = layer_ids_.find(layer_name);
  if (li != layer_ids_.end()) {
    auto it = bundles_.find({li->second, image});
    if (it != bundles_.end()) return contents_.activations[it->second];
  }
  throw Error(ErrorCode::kMissingBundle,
              std::string(layer_name) + "/" + images_.at(image).id,
              "no activation bundle");
}

const Annotation* ProbeDataset::annotation(int image, int concept_idx) const {
  auto it = annotations_.find({image, concept_idx});
  return it == annotations_.end() ? nullptr : &contents_.annotations[it->second];
}

std::vector<int> ProbeDataset::segmentation_images(int concept_idx, Split split) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < images_.size(); ++i) {
    if (images_[i].split != split) continue;
    const Annotation* a = annotation(static_cast<int>(i), concept_idx);
    if (a && a->mask) out.push_back(static_cast<int>(i));
  }
  return out;
}

std::pair<std::vector<int>, std::vector<int>> ProbeDataset::classification_split(
    int concept_idx, Split split) const {
  std::pair<std::vector<int>, std::vector<int>> out;
  for (std::size_t i = 0; i < images_.size(); ++i) {
    if (images_[i].split != split) continue;
    const Annotation* a = annotation(static_cast<int>(i), concept_idx);
    (a && a->positive() ? out.first : out.second).push_back(static_cast<int>(i));
  }
  return out;
}

std::vector<int> ProbeDataset::images_in(std::optional<Split> split) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < images_.size(); ++i) {
    if (!split || images_[i].split == *split) out.push_back(static_cast<int>(i));
  }
  return out;
}

ProbeDataset load_dataset(const fs::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw Error(ErrorCode::kIo, manifest.string(), "cannot open manifest");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kSchema, manifest.string(), e.what());
  }
  if (!doc.is_object()) {
    throw Error(ErrorCode::kSchema, "manifest", "top level must be an object");
  }
  static const std::set<std::string> kKnownKeys = {
      "version", "images", "concepts", "layers", "activations", "annotations",
      "preprocessing", "skipped_images", "generator"};
  for (const auto& [key, value] : doc.items()) {
    if (!kKnownKeys.count(key)) {
      throw Error(ErrorCode::kSchema, "manifest", "unknown top-level key '" + key + "'");
    }
  }
  if (doc.contains("version") &&
      (!doc["version"].is_number_integer() || doc["version"].get<int>() != kManifestVersion)) {
    throw Error(ErrorCode::kSchema, "manifest:version", "unsupported manifest version");
  }
  const fs::path root = manifest.parent_path();
  DatasetContents contents;

  for (const json& j : RequireArray(doc, "images")) {
    ImageRecord r;
    r.id = RequireString(j, "id", "images[]");
    r.height = RequirePositiveInt(j, "height", r.id);
    r.width = RequirePositiveInt(j, "width", r.id);
    const std::string split = RequireString(j, "split", r.id);
    auto s = ParseSplit(split);
    if (!s) throw Error(ErrorCode::kSchema, r.id, "split must be 'train' or 'val'");
    r.split = *s;
    contents.images.push_back(std::move(r));
  }
  for (const json& j : RequireArray(doc, "concepts")) {
    ConceptRecord r;
    r.id = RequireString(j, "id", "concepts[]");
    r.name = j.contains("name") ? RequireString(j, "name", r.id) : r.id;
    auto cat = ParseCategory(RequireString(j, "category", r.id));
    if (!cat) throw Error(ErrorCode::kSchema, r.id, "unknown category");
    r.category = *cat;
    r.has_segmentation = RequireBool(j, "has_segmentation", r.id);
    contents.concepts.push_back(std::move(r));
  }
  for (const json& j : RequireArray(doc, "layers")) {
    LayerRecord r;
    r.name = RequireString(j, "name", "layers[]");
    r.filters = RequirePositiveInt(j, "filters", r.name);
    r.height = RequirePositiveInt(j, "height", r.name);
    r.width = RequirePositiveInt(j, "width", r.name);
    contents.layers.push_back(std::move(r));
  }
  std::map<std::string, LayerRecord, std::less<>> layers;
  for (const auto& l : contents.layers) layers.emplace(l.name, l);

  for (const json& j : RequireArray(doc, "activations")) {
    ActivationBundle b;
    b.layer = RequireString(j, "layer", "activations[]");
    b.image = RequireString(j, "image", "activations[]");
    const std::string where = b.layer + "/" + b.image;
    const std::string rel = RequireString(j, "path", where);
    b.post_relu = j.contains("post_relu") ? RequireBool(j, "post_relu", where) : true;
    const fs::path path = root / rel;
    if (!fs::exists(path)) {
      throw Error(ErrorCode::kDanglingReference, where, "missing file " + rel);
    }
    const TensorFile t = read_tensor(path);
    if (t.dtype != DType::kF32 || t.shape.size() != 3) {
      throw Error(ErrorCode::kShapeMismatch, where, "activation must be f32 [K,H,W]");
    }
    b.filters = static_cast<int>(t.shape[0]);
    b.height = static_cast<int>(t.shape[1]);
    b.width = static_cast<int>(t.shape[2]);
    b.values = t.ToF32();
    contents.activations.push_back(std::move(b));
  }
  for (const json& j : RequireArray(doc, "annotations")) {
    Annotation a;
    a.image = RequireString(j, "image", "annotations[]");
    a.concept_id = RequireString(j, "concept", "annotations[]");
    const std::string where = a.image + "/" + a.concept_id;
    if (j.contains("label")) {
      if (!j["label"].is_number_integer()) {
        throw Error(ErrorCode::kSchema, where, "label must be 0 or 1");
      }
      a.label = j["label"].get<int>();
    }
    if (j.contains("mask")) {
      const std::string rel = RequireString(j, "mask", where);
      const fs::path path = root / rel;
      if (!fs::exists(path)) {
        throw Error(ErrorCode::kDanglingReference, where, "missing mask file " + rel);
      }
      const TensorFile t = read_tensor(path);
      if (t.dtype != DType::kU8 || t.shape.size() != 2) {
        throw Error(ErrorCode::kShapeMismatch, where, "mask must be u8 [h,w]");
      }
      a.mask = BinaryMask(static_cast<int>(t.shape[0]), static_cast<int>(t.shape[1]),
                          t.ToU8());
    }
    contents.annotations.push_back(std::move(a));
  }
  return ProbeDataset::Create(std::move(contents));
}

fs::path write_dataset(const DatasetContents& contents, const fs::path& dir) {
  fs::create_directories(dir);
  json doc;
  doc["version"] = kManifestVersion;
  doc["images"] = json::array();
  for (const auto& r : contents.images) {
    doc["images"].push_back({{"id", r.id},
                             {"height", r.height},
                             {"width", r.width},
                             {"split", SplitName(r.split)}});
  }
  doc["concepts"] = json::array();
  for (const auto& r : contents.concepts) {
    doc["concepts"].push_back({{"id", r.id},
                               {"name", r.name},
                               {"category", CategoryName(r.category)},
                               {"has_segmentation", r.has_segmentation}});
  }
  doc["layers"] = json::array();
  for (const auto& r : contents.layers) {
    doc["layers"].push_back({{"name", r.name},
                             {"filters", r.filters},
                             {"height", r.height},
                             {"width", r.width}});
  }
  doc["activations"] = json::array();
  for (const auto& b : contents.activations) {
    const std::string rel =
        "activations/" + SafeName(b.layer) + "/" + SafeName(b.image) + ".n2vt";
    write_tensor(TensorFile::FromF32({static_cast<std::uint64_t>(b.filters),
                                      static_cast<std::uint64_t>(b.height),
                                      static_cast<std::uint64_t>(b.width)},
                                     b.values),
                 dir / rel);
    doc["activations"].push_back(
        {{"layer", b.layer}, {"image", b.image}, {"path", rel}, {"post_relu", b.post_relu}});
  }
  doc["annotations"] = json::array();
  for (const auto& a : contents.annotations) {
    json j = {{"image", a.image}, {"concept", a.concept_id}};
    if (a.mask) {
      const std::string rel =
          "masks/" + SafeName(a.concept_id) + "/" + SafeName(a.image) + ".n2vt";
      write_tensor(TensorFile::FromU8({static_cast<std::uint64_t>(a.mask->height),
                                       static_cast<std::uint64_t>(a.mask->width)},
                                      a.mask->bits),
                   dir / rel);
      j["mask"] = rel;
    }
    if (a.label) j["label"] = *a.label;
    doc["annotations"].push_back(std::move(j));
  }
  const fs::path manifest = dir / "manifest.json";
  std::ofstream out(manifest, std::ios::trunc);
  out << doc.dump(1) << "\n";
  if (!out) throw Error(ErrorCode::kIo, manifest.string(), "write failed");
  return manifest;
}

}  // namespace conceptvec
