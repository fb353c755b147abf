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

#include "conceptvec/synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "conceptvec/dissection.h"
#include "conceptvec/error.h"
#include "conceptvec/rng.h"
#include "conceptvec/thresholds.h"

namespace conceptvec {
namespace {

constexpr int kPlacementAttempts = 10000;
constexpr int kMaxEnumeratedSupport = 5;

std::string ImageId(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "i%05d", i);
  return buf;
}

std::pair<int, int> RectShape(double cells, int grid_h, int grid_w) {
  int h = std::max(1, static_cast<int>(std::lround(std::sqrt(cells))));
  h = std::min(h, grid_h);
  int w = std::max(1, static_cast<int>(std::lround(cells / h)));
  w = std::min(w, grid_w);
  return {h, w};
}

CellRect RandomRect(Rng& rng, int h, int w, int grid_h, int grid_w) {
  CellRect r;
  r.r0 = static_cast<int>(rng.Below(grid_h - h + 1));
  r.c0 = static_cast<int>(rng.Below(grid_w - w + 1));
  r.r1 = r.r0 + h - 1;
  r.c1 = r.c0 + w - 1;
  return r;
}

// True when the rectangles overlap or touch (one-cell gap required).
bool Crowded(const CellRect& a, const CellRect& b) {
  return a.r0 <= b.r1 + 1 && b.r0 <= a.r1 + 1 && a.c0 <= b.c1 + 1 && b.c0 <= a.c1 + 1;
}

bool Inside(const CellRect& r, int y, int x) {
  return y >= r.r0 && y <= r.r1 && x >= r.c0 && x <= r.c1;
}

// All `size`-subsets of `items` in lexicographic order.
std::vector<std::vector<int>> Subsets(const std::vector<int>& items, int size) {
  std::vector<std::vector<int>> out;
  std::vector<int> pick;
  auto rec = [&](auto&& self, std::size_t from) -> void {
    if (static_cast<int>(pick.size()) == size) {
      out.push_back(pick);
      return;
    }
    for (std::size_t i = from; i < items.size(); ++i) {
      pick.push_back(items[i]);
      self(self, i + 1);
      pick.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

// Draws the geometry of one image from its own stream. `ordinal` counts the
// concept's earlier positives in the split; partial-support concepts rotate
// through their filter subsets with it so every filter fires equally often.
PlantedImage PlanImage(const PlantSpec& spec, int index, int concept_idx, int ordinal,
                       Split split, Rng& rng) {
  const PlantedConcept& c = spec.concepts[concept_idx];
  PlantedImage img;
  img.id = ImageId(index);
  img.split = split;
  img.concept_idx = concept_idx;
  img.active = c.support;
  std::sort(img.active.begin(), img.active.end());
  const int n_support = static_cast<int>(img.active.size());
  const int cells = spec.grid_h * spec.grid_w;

  if (c.combine == Combine::kUnion) {
    if (c.active_per_image > 0 && c.active_per_image < n_support) {
      const auto subsets = Subsets(img.active, c.active_per_image);
      img.active = subsets[ordinal % subsets.size()];
    }
    const auto [h, w] =
        RectShape(c.area_fraction * cells / img.active.size(), spec.grid_h, spec.grid_w);
    for (std::size_t j = 0; j < img.active.size(); ++j) {
      bool placed = false;
      for (int attempt = 0; attempt < kPlacementAttempts && !placed; ++attempt) {
        const CellRect r = RandomRect(rng, h, w, spec.grid_h, spec.grid_w);
        placed = std::none_of(img.regions.begin(), img.regions.end(),
                              [&](const CellRect& o) { return Crowded(r, o); });
        if (placed) img.regions.push_back(r);
      }
      if (!placed) {
        throw Error(ErrorCode::kInfeasible, c.id,
                    "cannot place disjoint regions; lower area_fraction");
      }
    }
  } else {
    // Shifted copies of one base rectangle; the shifts stay below the
    // rectangle size so the intersection is never empty.
    const auto [h, w] = RectShape(2.0 * c.area_fraction * cells, spec.grid_h, spec.grid_w);
    const CellRect base = RandomRect(rng, h, w, spec.grid_h, spec.grid_w);
    for (std::size_t j = 0; j < img.active.size(); ++j) {
      const int dr = static_cast<int>(rng.Below(h / 2 + 1)) * (rng.Below(2) ? 1 : -1);
      const int dc = static_cast<int>(rng.Below(w / 2 + 1)) * (rng.Below(2) ? 1 : -1);
      CellRect r = base;
      r.r0 = std::clamp(base.r0 + dr, 0, spec.grid_h - h);
      r.c0 = std::clamp(base.c0 + dc, 0, spec.grid_w - w);
      r.r1 = r.r0 + h - 1;
      r.c1 = r.c0 + w - 1;
      img.regions.push_back(r);
    }
  }
  return img;
}

std::vector<PlantedImage> PlanAll(const PlantSpec& spec, std::vector<Rng>* streams) {
  const int n_concepts = static_cast<int>(spec.concepts.size());
  std::vector<PlantedImage> out;
  const int total = spec.n_train + spec.n_val;
  for (int i = 0; i < total; ++i) {
    const bool train = i < spec.n_train;
    const int j = train ? i : i - spec.n_train;
    Rng rng(DeriveSeed(spec.seed, ImageId(i)));
    out.push_back(PlanImage(spec, i, j % n_concepts, j / n_concepts,
                           train ? Split::kTrain : Split::kVal, rng));
    if (streams) streams->push_back(rng);
  }
  return out;
}

BinaryMask RegionIndicator(const PlantSpec& spec, const CellRect& r) {
  BinaryMask m(spec.grid_h, spec.grid_w);
  for (int y = r.r0; y <= r.r1; ++y) {
    for (int x = r.c0; x <= r.c1; ++x) m.bits[y * spec.grid_w + x] = 1;
  }
  return m;
}

BinaryMask UpsampledRegion(const PlantSpec& spec, const CellRect& r) {
  return ResizeBinary(RegionIndicator(spec, r), spec.gt_h, spec.gt_w);
}

BinaryMask TruthMask(const PlantSpec& spec, const PlantedImage& img) {
  const bool is_union = spec.concepts[img.concept_idx].combine == Combine::kUnion;
  BinaryMask truth(spec.gt_h, spec.gt_w);
  for (std::size_t j = 0; j < img.regions.size(); ++j) {
    const BinaryMask up = UpsampledRegion(spec, img.regions[j]);
    for (std::size_t p = 0; p < truth.bits.size(); ++p) {
      if (is_union) {
        truth.bits[p] |= up.bits[p];
      } else {
        truth.bits[p] = j == 0 ? up.bits[p] : (truth.bits[p] & up.bits[p]);
      }
    }
  }
  return truth;
}

std::string_view CombineName(Combine c) {
  return c == Combine::kUnion ? "union" : "intersection";
}

}  // namespace

void PlantSpec::Validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kInvalidArgument, "plant spec", what);
  };
  if (filters < 1 || grid_h < 1 || grid_w < 1 || gt_h < 1 || gt_w < 1) {
    fail("filters, grid and gt sizes must be >= 1");
  }
  if (n_train < 1 || n_val < 1) fail("n_train and n_val must be >= 1");
  if (!(tau > 0.0 && tau < 1.0)) fail("tau must lie in (0, 1)");
  if (concepts.empty()) fail("no concepts");
  if (layer.empty()) fail("empty layer name");
  std::set<std::string> ids;
  for (const auto& c : concepts) {
    if (c.id.empty() || !ids.insert(c.id).second) fail("concept ids must be unique and non-empty");
    if (c.support.empty()) fail(c.id + ": empty support");
    std::set<int> seen;
    for (int k : c.support) {
      if (k < 0 || k >= filters) fail(c.id + ": support filter out of range");
      if (!seen.insert(k).second) fail(c.id + ": duplicate support filter");
    }
    if (!(c.area_fraction > 0.0 && c.area_fraction < 1.0)) fail(c.id + ": area_fraction not in (0, 1)");
    if (!(c.noise_sigma >= 0.0) || !std::isfinite(c.noise_sigma)) fail(c.id + ": bad noise_sigma");
    if (c.active_per_image < 0 || c.active_per_image > static_cast<int>(c.support.size())) {
      fail(c.id + ": active_per_image outside [0, |support|]");
    }
  }
}

nlohmann::json PlantSpecToJson(const PlantSpec& spec) {
  nlohmann::json concepts = nlohmann::json::array();
  for (const auto& c : spec.concepts) {
    concepts.push_back({{"id", c.id},
                        {"support", c.support},
                        {"combine", CombineName(c.combine)},
                        {"noise_sigma", c.noise_sigma},
                        {"area_fraction", c.area_fraction},
                        {"active_per_image", c.active_per_image},
                        {"category", CategoryName(c.category)}});
  }
  return {{"layer", spec.layer},       {"filters", spec.filters}, {"grid", {spec.grid_h, spec.grid_w}},
          {"gt", {spec.gt_h, spec.gt_w}}, {"concepts", concepts}, {"n_train", spec.n_train},
          {"n_val", spec.n_val},       {"seed", spec.seed},       {"tau", spec.tau}};
}

namespace {

void RejectUnknownKeys(const nlohmann::json& j, const std::set<std::string>& allowed,
                       const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::kSchema, where, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw Error(ErrorCode::kSchema, where + "." + key, "unknown key");
  }
}

}  // namespace

PlantSpec PlantSpecFromJson(const nlohmann::json& j) {
  PlantSpec spec;
  RejectUnknownKeys(j, {"layer", "filters", "grid", "gt", "concepts", "n_train", "n_val", "seed",
                        "tau"},
                    "plant spec");
  try {
    spec.layer = j.value("layer", spec.layer);
    spec.filters = j.value("filters", spec.filters);
    if (j.contains("grid")) {
      spec.grid_h = j.at("grid").at(0).get<int>();
      spec.grid_w = j.at("grid").at(1).get<int>();
    }
    if (j.contains("gt")) {
      spec.gt_h = j.at("gt").at(0).get<int>();
      spec.gt_w = j.at("gt").at(1).get<int>();
    }
    spec.n_train = j.value("n_train", spec.n_train);
    spec.n_val = j.value("n_val", spec.n_val);
    spec.seed = j.value("seed", spec.seed);
    spec.tau = j.value("tau", spec.tau);
    for (const auto& cj : j.at("concepts")) {
      RejectUnknownKeys(cj, {"id", "support", "combine", "noise_sigma", "area_fraction",
                             "active_per_image", "category"},
                        "plant spec.concepts");
      PlantedConcept c;
      c.id = cj.at("id").get<std::string>();
      c.support = cj.at("support").get<std::vector<int>>();
      const std::string combine = cj.value("combine", "union");
      if (combine == "union") {
        c.combine = Combine::kUnion;
      } else if (combine == "intersection") {
        c.combine = Combine::kIntersection;
      } else {
        throw Error(ErrorCode::kSchema, c.id, "combine must be union or intersection");
      }
      c.noise_sigma = cj.value("noise_sigma", c.noise_sigma);
      c.area_fraction = cj.value("area_fraction", c.area_fraction);
      c.active_per_image = cj.value("active_per_image", c.active_per_image);
      const std::string category = cj.value("category", "object");
      const auto parsed = ParseCategory(category);
      if (!parsed) throw Error(ErrorCode::kSchema, c.id, "unknown category '" + category + "'");
      c.category = *parsed;
      spec.concepts.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchema, "plant spec", e.what());
  }
  spec.Validate();
  return spec;
}

PlantSpec DefaultSuite(std::uint64_t seed) {
  PlantSpec spec;
  spec.seed = seed;
  for (int i = 0; i < 16; ++i) {
    PlantedConcept c;
    char id[8];
    std::snprintf(id, sizeof(id), "u%02d", i);
    c.id = id;
    c.support = {2 * i, 2 * i + 1};
    c.area_fraction = 0.125;  // one 2x2 block per filter
    c.noise_sigma = 0.1;
    spec.concepts.push_back(c);
  }
  return spec;
}

PlantSpec TopFSuite(std::uint64_t seed) {
  PlantSpec spec;
  spec.seed = seed;
  for (int i = 0; i < 8; ++i) {
    PlantedConcept c;
    char id[8];
    std::snprintf(id, sizeof(id), "d%02d", i);
    c.id = id;
    c.support = {4 * i, 4 * i + 1, 4 * i + 2, 4 * i + 3};
    c.active_per_image = 2;
    c.area_fraction = 0.125;
    c.noise_sigma = 0.1;
    spec.concepts.push_back(c);
  }
  return spec;
}

PlantSpec SharedFilterSuite(std::uint64_t seed) {
  PlantSpec spec;
  spec.seed = seed;
  spec.grid_h = spec.grid_w = 16;
  spec.gt_h = spec.gt_w = 61;  // 4 * 15 + 1
  const int owners[] = {5, 5, 5, 10, 11, 12, 13, 14, 15, 16};
  for (int i = 0; i < 10; ++i) {
    PlantedConcept c;
    char id[8];
    std::snprintf(id, sizeof(id), "s%02d", i);
    c.id = id;
    c.support = {owners[i]};
    c.area_fraction = 4.0 / 256.0;
    spec.concepts.push_back(c);
  }
  return spec;
}

std::vector<PlantedImage> PlanImages(const PlantSpec& spec) {
  spec.Validate();
  return PlanAll(spec, nullptr);
}

DatasetContents GenerateContents(const PlantSpec& spec) {
  spec.Validate();
  std::vector<Rng> streams;
  const std::vector<PlantedImage> plan = PlanAll(spec, &streams);

  // Every filter's planted cells must fit inside its exceedance count.
  const std::size_t cells = static_cast<std::size_t>(spec.grid_h) * spec.grid_w;
  const std::size_t budget = ExceedanceCount(plan.size() * cells, spec.tau);
  std::vector<std::size_t> planted(spec.filters, 0);
  for (const auto& img : plan) {
    for (std::size_t j = 0; j < img.active.size(); ++j) {
      planted[img.active[j]] += img.regions[j].area();
    }
  }
  for (int k = 0; k < spec.filters; ++k) {
    if (planted[k] > budget) {
      throw Error(ErrorCode::kInfeasible, "filter " + std::to_string(k),
                  std::to_string(planted[k]) + " planted cells exceed the " +
                      std::to_string(budget) + " cells above the tau threshold");
    }
  }

  DatasetContents out;
  out.layers.push_back({spec.layer, spec.filters, spec.grid_h, spec.grid_w});
  for (const auto& c : spec.concepts) {
    out.concepts.push_back({c.id, c.id, c.category, true});
  }
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const PlantedImage& img = plan[i];
    Rng& rng = streams[i];
    out.images.push_back({img.id, spec.gt_h, spec.gt_w, img.split});

    ActivationBundle b;
    b.layer = spec.layer;
    b.image = img.id;
    b.filters = spec.filters;
    b.height = spec.grid_h;
    b.width = spec.grid_w;
    b.post_relu = true;
    b.values.assign(spec.filters * cells, 0.0f);
    const double sigma = spec.concepts[img.concept_idx].noise_sigma;
    for (int k = 0; k < spec.filters; ++k) {
      const auto it = std::find(img.active.begin(), img.active.end(), k);
      const CellRect* region =
          it == img.active.end() ? nullptr : &img.regions[it - img.active.begin()];
      for (int y = 0; y < spec.grid_h; ++y) {
        for (int x = 0; x < spec.grid_w; ++x) {
          double v = 0.0;
          if (region && Inside(*region, y, x)) {
            v = 2.0 + rng.Uniform();
          } else if (sigma > 0.0) {
            v = std::clamp(sigma * rng.Gaussian(), 0.0, 0.5);
          }
          b.values[k * cells + y * spec.grid_w + x] = static_cast<float>(v);
        }
      }
    }
    out.activations.push_back(std::move(b));

    for (std::size_t c = 0; c < spec.concepts.size(); ++c) {
      Annotation a;
      a.image = img.id;
      a.concept_id = spec.concepts[c].id;
      if (static_cast<int>(c) == img.concept_idx) {
        a.mask = TruthMask(spec, img);
        a.label = 1;
      } else {
        a.label = 0;
      }
      out.annotations.push_back(std::move(a));
    }
  }
  return out;
}

std::filesystem::path generate(const PlantSpec& spec, const std::filesystem::path& out_dir) {
  const DatasetContents contents = GenerateContents(spec);
  const std::filesystem::path manifest = write_dataset(contents, out_dir);
  std::ofstream echo(out_dir / "plant_spec.json", std::ios::trunc);
  echo << PlantSpecToJson(spec).dump(1) << "\n";
  if (!echo) throw Error(ErrorCode::kIo, (out_dir / "plant_spec.json").string(), "write failed");
  return manifest;
}

std::vector<ConceptOracle> oracle_metrics(const PlantSpec& spec) {
  const std::vector<PlantedImage> plan = PlanImages(spec);
  std::vector<ConceptOracle> out;
  for (std::size_t c = 0; c < spec.concepts.size(); ++c) {
    const PlantedConcept& pc = spec.concepts[c];
    std::vector<int> support = pc.support;
    std::sort(support.begin(), support.end());
    const int s = static_cast<int>(support.size());

    // Per image: truth and the upsampled region of every support filter
    // (empty when the filter does not fire).
    struct Entry {
      Split split;
      BinaryMask truth;
      std::vector<BinaryMask> filter_masks;
    };
    std::vector<Entry> entries;
    for (const auto& img : plan) {
      if (img.concept_idx != static_cast<int>(c)) continue;
      Entry e{img.split, TruthMask(spec, img), {}};
      for (int k : support) {
        const auto it = std::find(img.active.begin(), img.active.end(), k);
        e.filter_masks.push_back(it == img.active.end()
                                     ? BinaryMask(spec.gt_h, spec.gt_w)
                                     : UpsampledRegion(spec, img.regions[it - img.active.begin()]));
      }
      entries.push_back(std::move(e));
    }

    auto set_iou = [&](Split split, auto&& predicted) {
      OverlapCounts total;
      for (const auto& e : entries) {
        if (e.split != split) continue;
        total += CountOverlap(predicted(e), e.truth);
      }
      return IoUFromCounts(total);
    };

    ConceptOracle o;
    o.concept_id = pc.id;
    o.approximate = pc.noise_sigma > 0.0;
    o.best_single_iou_train = -1.0;
    for (int j = 0; j < s; ++j) {
      auto single = [j](const Entry& e) -> const BinaryMask& { return e.filter_masks[j]; };
      const double train = set_iou(Split::kTrain, single);
      if (train > o.best_single_iou_train) {
        o.best_single_iou_train = train;
        o.best_single_filter = support[j];
        o.best_single_iou_val = set_iou(Split::kVal, single);
      }
    }

    if (pc.combine == Combine::kUnion) {
      // All-positive weights reproduce the union exactly.
      o.attainable_iou_val = 1.0;
    } else if (s <= kMaxEnumeratedSupport) {
      // Integer weights in {-2..2}^s: exhaustive over the sign patterns of
      // two filters, a lower bound beyond that.
      std::vector<int> w(s, -2);
      double best = 0.0;
      while (true) {
        auto combo = [&](const Entry& e) {
          BinaryMask m(spec.gt_h, spec.gt_w);
          for (std::size_t p = 0; p < m.bits.size(); ++p) {
            int z = 0;
            for (int j = 0; j < s; ++j) z += w[j] * e.filter_masks[j].bits[p];
            m.bits[p] = z > 0 ? 1 : 0;
          }
          return m;
        };
        best = std::max(best, set_iou(Split::kVal, combo));
        int j = 0;
        while (j < s && w[j] == 2) w[j++] = -2;
        if (j == s) break;
        ++w[j];
      }
      o.attainable_iou_val = best;
      o.approximate = o.approximate || s > 2;
    } else {
      o.attainable_iou_val = o.best_single_iou_val;
      o.approximate = true;
    }
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace conceptvec
