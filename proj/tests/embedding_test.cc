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

#include <gtest/gtest.h>

#include "conceptvec/error.h"
#include "test_util.h"

namespace conceptvec {
namespace {

EmbeddingSpace Space(std::vector<std::string> ids, int dims, std::vector<double> raw) {
  return BuildEmbeddingSpace("seg", "L", std::move(ids), dims, raw);
}

EmbeddingSpace RandomSpace(Rng& rng, int c, int dims) {
  std::vector<std::string> ids;
  std::vector<double> raw;
  for (int i = 0; i < c; ++i) {
    ids.push_back("c" + std::to_string(100 + i));
    for (int k = 0; k < dims; ++k) raw.push_back(rng.Gaussian());
  }
  return Space(ids, dims, raw);
}

ConceptWeights Weights(std::vector<double> w) {
  ConceptWeights cw;
  cw.concept_id = "c";
  cw.layer = "L";
  cw.w = std::move(w);
  return cw;
}

TEST(EmbeddingSpace, RowsAreUnitAndSortedById) {
  std::vector<std::string> warnings;
  const EmbeddingSpace s =
      BuildEmbeddingSpace("seg", "L", {"b", "a", "z"}, 2, std::vector<double>{3, 4, 0, 2, 0, 0},
                          &warnings);
  ASSERT_EQ(s.concepts, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(s.rows, (std::vector<double>{0, 1, 0.6, 0.8}));
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("'z'"), std::string::npos);
  EXPECT_THROW(s.index("nope"), Error);
}

TEST(EmbeddingSpace, ScaleInvariance) {
  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> raw(5 * 4);
    for (auto& x : raw) x = rng.Gaussian();
    std::vector<double> scaled = raw;
    const int row = static_cast<int>(rng.Below(5));
    const double s = std::ldexp(1.0, static_cast<int>(rng.Below(20)) - 10);
    for (int k = 0; k < 4; ++k) scaled[row * 4 + k] *= s;
    const std::vector<std::string> ids = {"a", "b", "c", "d", "e"};
    const EmbeddingSpace x = Space(ids, 4, raw);
    const EmbeddingSpace y = Space(ids, 4, scaled);
    EXPECT_EQ(x.rows, y.rows);
    EXPECT_EQ(nearest(x, "a", 4)[0].concept_id, nearest(y, "a", 4)[0].concept_id);
    // Non power-of-two scale: equal up to rounding.
    for (int k = 0; k < 4; ++k) scaled[row * 4 + k] *= 3.7;
    const EmbeddingSpace z = Space(ids, 4, scaled);
    for (std::size_t i = 0; i < x.rows.size(); ++i) EXPECT_NEAR(z.rows[i], x.rows[i], 1e-15);
  }
}

TEST(RelationMatrix, SymmetricUnitDiagonal) {
  Rng rng(2);
  const EmbeddingSpace s = RandomSpace(rng, 7, 5);
  const RelationMatrix m = relation_matrix(s);
  for (std::size_t i = 0; i < m.size; ++i) {
    EXPECT_NEAR(m.at(i, i), 1.0, 1e-12);
    for (std::size_t j = 0; j < m.size; ++j) {
      EXPECT_EQ(m.at(i, j), m.at(j, i));
      EXPECT_LE(std::abs(m.at(i, j)), 1.0 + 1e-12);
    }
  }
}

TEST(Nearest, DuplicateAndOrthogonal) {
  const EmbeddingSpace s =
      Space({"a", "b", "c", "d"}, 3, {1, 0, 0, 0, 1, 0, 2, 0, 0, 0, 0, 1});
  const auto n = nearest(s, "a", 3);
  ASSERT_EQ(n.size(), 3u);
  EXPECT_EQ(n[0].concept_id, "c");
  EXPECT_EQ(n[0].cosine, 1.0);
  // b and d tie at 0: lexicographic order.
  EXPECT_EQ(n[1].concept_id, "b");
  EXPECT_EQ(n[1].cosine, 0.0);
  EXPECT_EQ(n[2].concept_id, "d");
  EXPECT_THROW(nearest(s, "a", 4), Error);
}

TEST(Nearest, NeverReturnsQuery) {
  Rng rng(3);
  const EmbeddingSpace s = RandomSpace(rng, 12, 6);
  for (const auto& id : s.concepts) {
    const auto n = nearest(s, id, 11);
    for (const auto& x : n) EXPECT_NE(x.concept_id, id);
    for (std::size_t i = 1; i < n.size(); ++i) EXPECT_GE(n[i - 1].cosine, n[i].cosine);
  }
}

TEST(Arithmetic, IdentitiesWithNearest) {
  Rng rng(4);
  const EmbeddingSpace s = RandomSpace(rng, 10, 6);
  const std::vector<std::string> a = {"c103"};
  const std::vector<std::string> ab = {"c103", "c105"};
  const std::vector<std::string> b = {"c105"};
  const auto ref = nearest(s, "c103", 5);
  const auto one = arithmetic(s, a, {}, 5);
  const auto cancel = arithmetic(s, ab, b, 5);
  ASSERT_EQ(one.size(), ref.size());
  ASSERT_EQ(cancel.size(), ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) {
    EXPECT_EQ(one[i].concept_id, ref[i].concept_id);
    EXPECT_EQ(one[i].cosine, ref[i].cosine);
    EXPECT_EQ(cancel[i].concept_id, ref[i].concept_id);
    EXPECT_EQ(cancel[i].cosine, ref[i].cosine);
  }
}

TEST(Arithmetic, ZeroResultantIsAnError) {
  const EmbeddingSpace s = Space({"a", "b", "c"}, 2, {1, 0, 1, 0, 0, 1});
  const std::vector<std::string> a = {"a"};
  const std::vector<std::string> b = {"b"};
  try {
    arithmetic(s, a, b, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroVector);
  }
  EXPECT_THROW(arithmetic(s, a, a, 1), Error);
}

TEST(Correlation, PerfectlyAlignedIsSignificant) {
  Rng rng(5);
  std::vector<double> w(32);
  for (auto& x : w) x = rng.Gaussian();
  std::vector<double> ious(32);
  for (int k = 0; k < 32; ++k) ious[k] = std::max(w[k], 0.0);
  const Correlation c = weight_iou_correlation(Weights(w), ious);
  ASSERT_TRUE(c.r.has_value());
  EXPECT_NEAR(*c.r, 1.0, 1e-12);
  ASSERT_TRUE(c.p.has_value());
  EXPECT_LE(*c.p, 1e-4);
  EXPECT_EQ(c.permutations, kDefaultPermutations);
}

TEST(Correlation, ZeroVarianceIsUndefined) {
  const Correlation c = weight_iou_correlation(Weights({0.5, -1, 2}), std::vector<double>(3, 0.2));
  EXPECT_FALSE(c.r.has_value());
  EXPECT_FALSE(c.p.has_value());
  const Correlation d = weight_iou_correlation(Weights({-1, -2, -3}), std::vector<double>{1, 2, 3});
  EXPECT_FALSE(d.r.has_value());
}

// 200 seeds rather than 20: with a calibrated test, two or more of 20 seeds
// fall below 0.01 about 1.7% of the time, which says nothing about the code.
TEST(Correlation, IndependentInputsRarelySignificant) {
  const int seeds = 200;
  int below_01 = 0, below_05 = 0;
  for (int seed = 0; seed < seeds; ++seed) {
    Rng rng(1000 + seed);
    std::vector<double> w(64), ious(64);
    for (auto& x : w) x = rng.Gaussian();
    for (auto& x : ious) x = rng.Uniform();
    const Correlation c = weight_iou_correlation(Weights(w), ious, 2000, seed);
    ASSERT_TRUE(c.p.has_value());
    below_01 += *c.p < 0.01;
    below_05 += *c.p < 0.05;
  }
  EXPECT_LE(below_01, 0.05 * seeds);
  // Roughly uniform p-values under the null.
  EXPECT_GE(below_05, 0.01 * seeds);
  EXPECT_LE(below_05, 0.10 * seeds);
}

TEST(Correlation, DeterministicInSeed) {
  Rng rng(6);
  std::vector<double> w(16), ious(16);
  for (auto& x : w) x = rng.Gaussian();
  for (auto& x : ious) x = rng.Uniform();
  const auto a = weight_iou_correlation(Weights(w), ious, 500, 3);
  const auto b = weight_iou_correlation(Weights(w), ious, 500, 3);
  EXPECT_EQ(a.p, b.p);
  EXPECT_EQ(a.r, b.r);
}

TEST(Contribution, Examples) {
  EXPECT_EQ(contribution(Weights({1, 1, 2}), 0), 0.25);
  EXPECT_EQ(contribution(Weights({1, 1, 2}), 1), 0.25);
  EXPECT_EQ(contribution(Weights({1, 1, 2}), 2), 0.5);
  EXPECT_EQ(contribution(Weights({0, -3, 0}), 1), 1.0);
  EXPECT_EQ(contribution(Weights({0, -3, 0}), 0), 0.0);
  EXPECT_THROW(contribution(Weights({0, 0}), 0), Error);
}

TEST(SpaceDistance, HandExample) {
  const EmbeddingSpace a = Space({"x", "y"}, 2, {1, 0, 0, 1});
  const EmbeddingSpace b = Space({"x", "y"}, 2, {1, 0, 1, 0});
  const SpaceDistance d = space_distance(a, b);
  EXPECT_EQ(d.total, 2.0);
  EXPECT_EQ(d.per_concept, (std::vector<double>{1.0, 1.0}));
}

TEST(SpaceDistance, SelfSymmetryDecomposition) {
  Rng rng(7);
  for (int t = 0; t < 10; ++t) {
    const EmbeddingSpace a = RandomSpace(rng, 6, 8);
    const EmbeddingSpace b = RandomSpace(rng, 6, 5);  // different K is fine
    EXPECT_LE(space_distance(a, a).total, 1e-12);
    const SpaceDistance ab = space_distance(a, b);
    const SpaceDistance ba = space_distance(b, a);
    EXPECT_NEAR(ab.total, ba.total, 1e-12);
    double sum = 0.0;
    for (double v : ab.per_concept) sum += v;
    EXPECT_EQ(sum, ab.total);
  }
}

TEST(SpaceDistance, UsesSharedConceptsOnly) {
  const EmbeddingSpace a = Space({"x", "y", "z"}, 2, {1, 0, 0, 1, 1, 1});
  const EmbeddingSpace b = Space({"w", "x", "y"}, 2, {1, 0, 1, 0, 0, 1});
  const SpaceDistance d = space_distance(a, b);
  EXPECT_EQ(d.concepts, (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(d.total, 0.0);
}

TEST(Hhot, Examples) {
  EXPECT_EQ(hhot_min_angle(1), 90.0);
  EXPECT_NEAR(hhot_min_angle(2), 60.0, 1e-12);
  EXPECT_NEAR(hhot_cross_min_angle(4, 1), 60.0, 1e-12);
  EXPECT_THROW(hhot_cross_min_angle(1, 2), Error);
}

TEST(Hhot, MatchesBruteForceSmall) {
  for (int k = 2; k <= 8; ++k) {
    for (int h = 1; h < k && h <= 4; ++h) {
      EXPECT_EQ(testing::BruteForceHhotAngle(k, h, h), hhot_min_angle(h)) << k << " " << h;
      for (int h2 = 1; h2 < h; ++h2) {
        EXPECT_EQ(testing::BruteForceHhotAngle(k, h, h2), hhot_cross_min_angle(h, h2));
      }
    }
  }
}

TEST(SpaceFile, RoundTrip) {
  testing::TempDir dir;
  Rng rng(8);
  const EmbeddingSpace s = RandomSpace(rng, 5, 7);
  save_space(s, dir.path() / "cls_L.space.json");
  const EmbeddingSpace back = load_space(dir.path() / "cls_L.space.json");
  EXPECT_EQ(back.task, "seg");
  EXPECT_EQ(back.concepts, s.concepts);
  ASSERT_EQ(back.rows.size(), s.rows.size());
  for (std::size_t i = 0; i < s.rows.size(); ++i) EXPECT_NEAR(back.rows[i], s.rows[i], 1e-7);
}

}  // namespace
}  // namespace conceptvec
