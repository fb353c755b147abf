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

#include "conceptvec/embedding.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>

#include "conceptvec/error.h"
#include "conceptvec/rng.h"
#include "conceptvec/tensor_file.h"
#include "json.hpp"

namespace conceptvec {
namespace {

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double Norm(std::span<const double> v) { return std::sqrt(Dot(v, v)); }

double Degrees(double radians) { return radians * 180.0 / std::numbers::pi; }

// Ranks every row against the unit vector of `query`, skipping `excluded`.
std::vector<Neighbor> Rank(const EmbeddingSpace& space, std::vector<double> query,
                           const std::vector<std::uint8_t>& excluded, int n) {
  const double norm = Norm(query);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw Error(ErrorCode::kZeroVector, "query", "query vector cannot be normalized");
  }
  for (double& q : query) q /= norm;
  std::vector<Neighbor> all;
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (excluded[i]) continue;
    all.push_back({space.concepts[i], Dot(query, space.row(i))});
  }
  // Rows are in id order, so a stable sort keeps ties lexicographic.
  std::stable_sort(all.begin(), all.end(),
                   [](const Neighbor& a, const Neighbor& b) { return a.cosine > b.cosine; });
  if (static_cast<std::size_t>(n) < all.size()) all.resize(n);
  return all;
}

double Pearson(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

bool ZeroVariance(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; });
}

}  // namespace

std::size_t EmbeddingSpace::index(std::string_view concept_id) const {
  auto it = std::lower_bound(concepts.begin(), concepts.end(), concept_id);
  if (it == concepts.end() || *it != concept_id) {
    throw Error(ErrorCode::kUnknownConcept, std::string(concept_id), "not in embedding space");
  }
  return static_cast<std::size_t>(it - concepts.begin());
}

EmbeddingSpace BuildEmbeddingSpace(std::string task, std::string layer,
                                   std::vector<std::string> concepts, int dims,
                                   std::span<const double> raw_rows,
                                   std::vector<std::string>* warnings) {
  if (dims < 1 || raw_rows.size() != concepts.size() * static_cast<std::size_t>(dims)) {
    throw Error(ErrorCode::kShapeMismatch, "embedding space", "rows vs concepts x dims");
  }
  std::vector<std::size_t> order(concepts.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return concepts[a] < concepts[b]; });
  EmbeddingSpace space;
  space.task = std::move(task);
  space.layer = std::move(layer);
  space.dims = dims;
  for (std::size_t j = 0; j < order.size(); ++j) {
    const std::size_t i = order[j];
    if (j > 0 && concepts[i] == concepts[order[j - 1]]) {
      throw Error(ErrorCode::kDuplicateId, concepts[i], "concept appears twice");
    }
    const auto raw = raw_rows.subspan(i * dims, dims);
    const double norm = Norm(raw);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      if (warnings) warnings->push_back("concept '" + concepts[i] + "' has a zero embedding");
      continue;
    }
    space.concepts.push_back(concepts[i]);
    for (double v : raw) space.rows.push_back(v / norm);
  }
  return space;
}

EmbeddingSpace BuildEmbeddingSpace(std::span<const ConceptWeights> weights,
                                   std::vector<std::string>* warnings) {
  if (weights.empty()) return EmbeddingSpace{};
  const int dims = static_cast<int>(weights[0].w.size());
  std::vector<std::string> ids;
  std::vector<double> raw;
  for (const auto& cw : weights) {
    if (static_cast<int>(cw.w.size()) != dims || cw.task != weights[0].task ||
        cw.layer != weights[0].layer) {
      throw Error(ErrorCode::kShapeMismatch, cw.concept_id,
                  "weights differ in task, layer or length");
    }
    ids.push_back(cw.concept_id);
    raw.insert(raw.end(), cw.w.begin(), cw.w.end());
  }
  return BuildEmbeddingSpace(std::string(TaskName(weights[0].task)), weights[0].layer,
                             std::move(ids), dims, raw, warnings);
}

RelationMatrix relation_matrix(const EmbeddingSpace& space) {
  RelationMatrix m;
  m.size = space.size();
  m.values.resize(m.size * m.size);
  for (std::size_t i = 0; i < m.size; ++i) {
    for (std::size_t j = 0; j < m.size; ++j) {
      m.values[i * m.size + j] = Dot(space.row(i), space.row(j));
    }
  }
  return m;
}

std::vector<Neighbor> nearest(const EmbeddingSpace& space, std::string_view concept_id, int n) {
  const std::size_t q = space.index(concept_id);
  if (n < 1 || static_cast<std::size_t>(n) >= space.size()) {
    throw Error(ErrorCode::kInvalidArgument, "n", "need 1 <= n < number of concepts");
  }
  std::vector<std::uint8_t> excluded(space.size(), 0);
  excluded[q] = 1;
  const auto r = space.row(q);
  return Rank(space, std::vector<double>(r.begin(), r.end()), excluded, n);
}

std::vector<Neighbor> arithmetic(const EmbeddingSpace& space, std::span<const std::string> plus,
                                 std::span<const std::string> minus, int n) {
  if (plus.empty() && minus.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "arithmetic", "no operands");
  }
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "n", "need n >= 1");
  std::map<std::size_t, int> coefficient;
  for (const auto& id : plus) coefficient[space.index(id)] += 1;
  for (const auto& id : minus) coefficient[space.index(id)] -= 1;
  std::vector<double> v(space.dims, 0.0);
  std::vector<std::uint8_t> excluded(space.size(), 0);
  bool any = false;
  for (const auto& [i, coef] : coefficient) {
    if (coef == 0) continue;
    any = true;
    excluded[i] = 1;
    const auto r = space.row(i);
    for (int k = 0; k < space.dims; ++k) v[k] += coef * r[k];
  }
  if (!any) {
    throw Error(ErrorCode::kZeroVector, "arithmetic", "operands cancel to the zero vector");
  }
  return Rank(space, std::move(v), excluded, n);
}

Correlation weight_iou_correlation(const ConceptWeights& weights,
                                   std::span<const double> per_filter_ious, int permutations,
                                   std::uint64_t seed) {
  if (per_filter_ious.size() != weights.w.size()) {
    throw Error(ErrorCode::kShapeMismatch, weights.concept_id,
                "per-filter IoU count differs from K");
  }
  if (weights.w.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, weights.concept_id, "need K >= 2");
  }
  std::vector<double> x(weights.w.size());
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = std::max(weights.w[k], 0.0);
  std::vector<double> y(per_filter_ious.begin(), per_filter_ious.end());
  Correlation out;
  out.permutations = permutations;
  if (ZeroVariance(x) || ZeroVariance(y)) return out;
  const double r = Pearson(x, y);
  out.r = r;
  // Relative slack so permutations that reproduce |r| up to rounding count.
  const double bar = std::abs(r) * (1.0 - 1e-12);
  Rng rng(seed);
  std::vector<double> shuffled = y;
  int hits = 0;
  for (int i = 0; i < permutations; ++i) {
    rng.Shuffle(shuffled);
    if (std::abs(Pearson(x, shuffled)) >= bar) ++hits;
  }
  out.p = static_cast<double>(hits + 1) / static_cast<double>(permutations + 1);
  return out;
}

double contribution(const ConceptWeights& weights, int k) {
  if (k < 0 || static_cast<std::size_t>(k) >= weights.w.size()) {
    throw Error(ErrorCode::kInvalidArgument, "k", "filter index out of range");
  }
  double l1 = 0.0;
  for (double v : weights.w) l1 += std::abs(v);
  if (!(l1 > 0.0)) throw Error(ErrorCode::kZeroVector, weights.concept_id, "all-zero weights");
  return std::abs(weights.w[k]) / l1;
}

SpaceDistance space_distance(const EmbeddingSpace& a, const EmbeddingSpace& b) {
  SpaceDistance out;
  std::set_intersection(a.concepts.begin(), a.concepts.end(), b.concepts.begin(),
                        b.concepts.end(), std::back_inserter(out.concepts));
  if (out.concepts.empty()) {
    throw Error(ErrorCode::kEmptySplit, "space_distance", "no shared concepts");
  }
  const std::size_t c = out.concepts.size();
  std::vector<std::size_t> ia(c);
  std::vector<std::size_t> ib(c);
  for (std::size_t i = 0; i < c; ++i) {
    ia[i] = a.index(out.concepts[i]);
    ib[i] = b.index(out.concepts[i]);
  }
  out.per_concept.assign(c, 0.0);
  for (std::size_t i = 0; i < c; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      const double diff = Dot(a.row(ia[i]), a.row(ia[j])) - Dot(b.row(ib[i]), b.row(ib[j]));
      row += diff * diff;
    }
    out.per_concept[i] = row;
  }
  for (double v : out.per_concept) out.total += v;
  return out;
}

double hhot_min_angle(int h) {
  if (h < 1) throw Error(ErrorCode::kInvalidArgument, "H", "H must be >= 1");
  return Degrees(std::acos(static_cast<double>(h - 1) / static_cast<double>(h)));
}

double hhot_cross_min_angle(int h1, int h2) {
  if (h2 < 1 || h1 < h2) {
    throw Error(ErrorCode::kInvalidArgument, "H", "need 1 <= H2 <= H1");
  }
  // Best overlap is H2 shared ones: cos = H2 / sqrt(H1 * H2), written in the
  // same dot-over-norms form as a direct evaluation.
  return Degrees(std::acos(static_cast<double>(h2) /
                           std::sqrt(static_cast<double>(h1) * static_cast<double>(h2))));
}

void save_space(const EmbeddingSpace& space, const std::filesystem::path& path) {
  if (space.size() == 0) {
    throw Error(ErrorCode::kInvalidArgument, path.string(), "empty embedding space");
  }
  std::filesystem::path tensor_path = path;
  tensor_path += ".n2vt";
  std::vector<float> rows32(space.rows.begin(), space.rows.end());
  write_tensor(TensorFile::FromF32({space.size(), static_cast<std::uint64_t>(space.dims)},
                                   rows32),
               tensor_path);
  nlohmann::json j = {{"task", space.task},
                      {"layer", space.layer},
                      {"concepts", space.concepts},
                      {"tensor", tensor_path.filename().string()}};
  std::ofstream out(path, std::ios::trunc);
  out << j.dump(1) << "\n";
  if (!out) throw Error(ErrorCode::kIo, path.string(), "write failed");
}

EmbeddingSpace load_space(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, path.string(), "cannot open embedding space");
  try {
    const nlohmann::json j = nlohmann::json::parse(in);
    const auto concepts = j.at("concepts").get<std::vector<std::string>>();
    const TensorFile t = read_tensor(path.parent_path() / j.at("tensor").get<std::string>());
    if (t.shape.size() != 2 || t.shape[0] != concepts.size()) {
      throw Error(ErrorCode::kShapeMismatch, path.string(), "tensor must be [C, K]");
    }
    const std::vector<float> raw32 = t.ToF32();
    const std::vector<double> raw(raw32.begin(), raw32.end());
    std::vector<std::string> warnings;
    EmbeddingSpace s = BuildEmbeddingSpace(j.value("task", std::string("external")),
                                           j.value("layer", std::string()), concepts,
                                           static_cast<int>(t.shape[1]), raw, &warnings);
    if (!warnings.empty()) throw Error(ErrorCode::kZeroVector, path.string(), warnings[0]);
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchema, path.string(), e.what());
  }
}

}  // namespace conceptvec
