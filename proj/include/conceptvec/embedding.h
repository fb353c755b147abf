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

#ifndef CONCEPTVEC_EMBEDDING_H_
#define CONCEPTVEC_EMBEDDING_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "conceptvec/weights.h"

namespace conceptvec {

/// Unit-normalized concept embeddings, one row per concept, rows ordered by
/// concept id. `task` is "seg", "cls", or a free label for spaces imported
/// from elsewhere (e.g. word vectors).
struct EmbeddingSpace {
  std::string task;
  std::string layer;
  std::vector<std::string> concepts;
  int dims = 0;
  std::vector<double> rows;  // concepts.size() x dims

  std::size_t size() const { return concepts.size(); }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(rows).subspan(i * dims, dims);
  }
  /// Row index of a concept; throws kUnknownConcept.
  std::size_t index(std::string_view concept_id) const;
};

/// Normalizes each raw w to unit length. Zero vectors cannot be normalized;
/// they are left out and reported through `warnings`.
EmbeddingSpace BuildEmbeddingSpace(std::span<const ConceptWeights> weights,
                                   std::vector<std::string>* warnings = nullptr);

/// Same, from raw rows (any source). Rows are reordered by id.
EmbeddingSpace BuildEmbeddingSpace(std::string task, std::string layer,
                                   std::vector<std::string> concepts, int dims,
                                   std::span<const double> raw_rows,
                                   std::vector<std::string>* warnings = nullptr);

/// W W^T, the pairwise cosine similarities of a space.
struct RelationMatrix {
  std::size_t size = 0;
  std::vector<double> values;
  double at(std::size_t i, std::size_t j) const { return values[i * size + j]; }
};

RelationMatrix relation_matrix(const EmbeddingSpace& space);

struct Neighbor {
  std::string concept_id;
  double cosine = 0.0;
};

/// The n concepts most cosine-similar to `concept_id`, excluding itself.
/// Ties go to the lexicographically smaller id. Requires n < C.
std::vector<Neighbor> nearest(const EmbeddingSpace& space, std::string_view concept_id, int n);

/// Nearest neighbors of normalize(sum(plus) - sum(minus)). Operands named in
/// both lists cancel pairwise before summation; concepts with a non-zero net
/// coefficient are excluded from the result.
std::vector<Neighbor> arithmetic(const EmbeddingSpace& space,
                                 std::span<const std::string> plus,
                                 std::span<const std::string> minus, int n);

struct Correlation {
  std::optional<double> r;  // empty when either input has zero variance
  std::optional<double> p;  // two-sided permutation p-value
  int permutations = 0;
};

inline constexpr int kDefaultPermutations = 10000;
inline constexpr std::uint64_t kDefaultPermutationSeed = 20180601;

/// Pearson r between max(w_k, 0) and per-filter IoU values, with a
/// permutation-test p-value (b + 1) / (permutations + 1).
Correlation weight_iou_correlation(const ConceptWeights& weights,
                                   std::span<const double> per_filter_ious,
                                   int permutations = kDefaultPermutations,
                                   std::uint64_t seed = kDefaultPermutationSeed);

/// |w_k| / ||w||_1.
double contribution(const ConceptWeights& weights, int k);

struct SpaceDistance {
  double total = 0.0;
  std::vector<std::string> concepts;  // shared concepts, id order
  std::vector<double> per_concept;
};

/// ||d(A) - d(B)||^2 over the shared concepts, with the per-concept row
/// terms; total is their sum.
SpaceDistance space_distance(const EmbeddingSpace& a, const EmbeddingSpace& b);

/// Smallest angle (degrees) between two distinct H-hot binary vectors.
double hhot_min_angle(int h);
/// Smallest angle (degrees) between an H1-hot and an H2-hot vector, H2 <= H1.
double hhot_cross_min_angle(int h1, int h2);

/// Writes `<path>` (JSON: task, layer, concepts, tensor) and the [C, K] f32
/// tensor next to it.
void save_space(const EmbeddingSpace& space, const std::filesystem::path& path);
/// Rows are renormalized in double precision after loading.
EmbeddingSpace load_space(const std::filesystem::path& path);

}  // namespace conceptvec

#endif  // CONCEPTVEC_EMBEDDING_H_
