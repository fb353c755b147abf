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

#include <gtest/gtest.h>

#include "conceptvec/error.h"
#include "conceptvec/synth.h"
#include "test_util.h"

namespace conceptvec {
namespace {

using testing::TempDir;

TEST(CategoryAggregates, MeanAndStandardError) {
  const std::vector<ConceptMetric> m = {{"a", Category::kPart, 0.2},
                                        {"b", Category::kObject, 0.5},
                                        {"c", Category::kPart, 0.4},
                                        {"d", Category::kPart, 0.6}};
  const auto agg = category_aggregates(Task::kSegmentation, m);
  ASSERT_EQ(agg.size(), 2u);
  EXPECT_EQ(agg[0].category, Category::kObject);
  EXPECT_EQ(agg[0].n_concepts, 1);
  EXPECT_EQ(agg[0].standard_error, 0.0);
  EXPECT_EQ(agg[1].category, Category::kPart);
  EXPECT_NEAR(agg[1].mean_metric, 0.4, 1e-15);
  // sample sd 0.2, n = 3
  EXPECT_NEAR(agg[1].standard_error, 0.2 / std::sqrt(3.0), 1e-15);
}

TEST(CategoryAggregates, OrderInvariant) {
  Rng rng(1);
  std::vector<ConceptMetric> m;
  for (int i = 0; i < 40; ++i) {
    m.push_back({"c" + std::to_string(i), static_cast<Category>(rng.Below(7)), rng.Uniform()});
  }
  const auto ref = category_aggregates(Task::kClassification, m);
  for (int t = 0; t < 10; ++t) {
    rng.Shuffle(m);
    const auto again = category_aggregates(Task::kClassification, m);
    ASSERT_EQ(again.size(), ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
      EXPECT_EQ(again[i].mean_metric, ref[i].mean_metric);
      EXPECT_EQ(again[i].standard_error, ref[i].standard_error);
    }
  }
}

TEST(ComboVsSingle, Counting) {
  const std::vector<ComboPair> all = {{"a", 0.1, 0.2}, {"b", 0.3, 0.9}};
  EXPECT_EQ(combo_vs_single(all), 1.0);
  const std::vector<ComboPair> three = {
      {"a", 0.1, 0.2}, {"b", 0.3, 0.3}, {"c", 0.5, 0.4}, {"d", 0.0, 0.7}};
  EXPECT_EQ(combo_vs_single(three), 0.75);
  EXPECT_THROW(combo_vs_single(std::vector<ComboPair>{}), Error);
}

TEST(ComboVsSingle, MonotoneInMulti) {
  Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    std::vector<ComboPair> p(8);
    for (auto& x : p) x = {"c", rng.Uniform(), rng.Uniform()};
    const double before = combo_vs_single(p);
    EXPECT_GE(before, 0.0);
    EXPECT_LE(before, 1.0);
    p[rng.Below(8)].multi += rng.Uniform();
    EXPECT_GE(combo_vs_single(p), before);
  }
}

TEST(PairMetrics, DanglingConcept) {
  EXPECT_EQ(PairMetrics({{"a", 0.1}}, {{"a", 0.2}}).size(), 1u);
  EXPECT_THROW(PairMetrics({{"a", 0.1}}, {{"b", 0.2}}), Error);
}

TEST(FilterSharing, Examples) {
  const auto all_zero = filter_sharing_histogram({{"a", 0}, {"b", 0}, {"c", 0}}, 4,
                                                 DefaultSharingBins());
  EXPECT_EQ(all_zero.per_filter, (std::vector<int>{3, 0, 0, 0}));
  EXPECT_EQ(all_zero.zero_filters, 3);
  EXPECT_EQ(all_zero.bins[0].count, 3);  // bin "0"
  EXPECT_EQ(all_zero.bins[3].count, 1);  // bin "3"

  const auto bijective =
      filter_sharing_histogram({{"a", 2}, {"b", 0}, {"c", 1}}, 3, DefaultSharingBins());
  EXPECT_EQ(bijective.per_filter, (std::vector<int>{1, 1, 1}));
  EXPECT_EQ(bijective.bins[1].count, 3);
  EXPECT_EQ(bijective.zero_filters, 0);

  std::map<std::string, int> many;
  for (int i = 0; i < 12; ++i) many["c" + std::to_string(i)] = i < 7 ? 1 : 2;
  const auto h = filter_sharing_histogram(many, 3, DefaultSharingBins());
  EXPECT_EQ(h.bins[5].count, 1);  // 6-10
  EXPECT_EQ(h.bins[4].count, 1);  // 4-5
  EXPECT_THROW(filter_sharing_histogram({{"a", 3}}, 3, DefaultSharingBins()), Error);
}

TEST(FailureDiagnostics, Flags) {
  EXPECT_TRUE(DiagnoseConcept("a", 12, 0.3).small_dataset);
  EXPECT_FALSE(DiagnoseConcept("a", 12, 0.3).small_object);
  const FailureRecord big = DiagnoseConcept("b", 10000, 0.5);
  EXPECT_FALSE(big.small_dataset);
  EXPECT_FALSE(big.small_object);
  EXPECT_TRUE(DiagnoseConcept("c", 500, 0.005).small_object);
  EXPECT_FALSE(DiagnoseConcept("d", 500, std::nullopt).small_object);
}

TEST(FailureDiagnostics, PlantedTinyObject) {
  PlantSpec spec = SharedFilterSuite(0);
  spec.concepts.resize(1);
  spec.concepts[0].support = {3};
  spec.concepts[0].area_fraction = 0.005;
  const ProbeDataset ds = ProbeDataset::Create(GenerateContents(spec));
  const auto size = MeanConceptSize(ds, 0);
  ASSERT_TRUE(size.has_value());
  EXPECT_LT(*size, kSmallObjectFraction);
  const std::vector<ComboPair> pairs = {{spec.concepts[0].id, 0.5, 0.4}};
  const auto records = failure_diagnostics(Task::kSegmentation, pairs, ds);
  ASSERT_EQ(records.size(), 1u);
  EXPECT_TRUE(records[0].small_object);
  EXPECT_EQ(records[0].n_train, spec.n_train);
}

TEST(Deciles, TenDistinct) {
  std::map<std::string, double> m;
  for (int i = 0; i < 10; ++i) m["img" + std::to_string(i)] = 0.05 * (10 - i);
  const auto d = decile_examples("c", m);
  ASSERT_EQ(d.ranked.size(), 10u);
  EXPECT_FALSE(d.warning.has_value());
  for (int i = 0; i < 10; ++i) EXPECT_DOUBLE_EQ(d.ranked[i].iou, 0.05 * (i + 1));
}

TEST(Deciles, TwentyValuesTakeOddRanks) {
  std::map<std::string, double> m;
  for (int i = 1; i <= 20; ++i) m["i" + std::to_string(100 + i)] = i / 20.0;
  m["zero"] = 0.0;
  const auto d = decile_examples("c", m);
  ASSERT_EQ(d.ranked.size(), 10u);
  EXPECT_EQ(d.n_zero, 1);
  for (int s = 0; s < 10; ++s) EXPECT_EQ(d.ranked[s].iou, (2 * s + 2) / 20.0);
}

TEST(Deciles, AllZeroWarns) {
  const auto d = decile_examples("c", {{"a", 0.0}, {"b", 0.0}});
  EXPECT_TRUE(d.ranked.empty());
  EXPECT_TRUE(d.warning.has_value());
  EXPECT_EQ(d.n_zero, 2);
}

TEST(Deciles, NonDecreasingPositiveDeterministic) {
  Rng rng(3);
  for (int t = 0; t < 30; ++t) {
    std::map<std::string, double> m;
    const int n = static_cast<int>(rng.Below(60));
    for (int i = 0; i < n; ++i) {
      m["x" + std::to_string(i)] = rng.Uniform() < 0.3 ? 0.0 : std::floor(rng.Uniform() * 5) / 5;
    }
    const auto d = decile_examples("c", m);
    for (std::size_t i = 0; i < d.ranked.size(); ++i) {
      EXPECT_GT(d.ranked[i].iou, 0.0);
      if (i) {
        EXPECT_GE(d.ranked[i].iou, d.ranked[i - 1].iou);
      }
    }
    const auto again = decile_examples("c", m);
    ASSERT_EQ(again.ranked.size(), d.ranked.size());
    for (std::size_t i = 0; i < d.ranked.size(); ++i) {
      EXPECT_EQ(again.ranked[i].image, d.ranked[i].image);
    }
  }
}

TEST(FSweep, CurvePerF) {
  const std::vector<SweepRow> rows = {{"a", 2, 0.5}, {"b", 1, 0.1}, {"a", 1, 0.3}, {"b", 2, 0.7}};
  const auto curve = f_sweep_curve(rows);
  ASSERT_EQ(curve.size(), 2u);
  EXPECT_EQ(curve[0].f, 1);
  EXPECT_NEAR(curve[0].mean_metric, 0.2, 1e-15);
  EXPECT_EQ(curve[1].n_concepts, 2);
  EXPECT_NEAR(curve[1].mean_metric, 0.6, 1e-15);
}

TEST(MaskRaster, HeaderBytes) {
  TempDir dir;
  export_mask_raster(BinaryMask(1, 1, {1}), dir.path() / "one.pgm");
  const std::string expect = "P5\n1 1\n255\n\xFF";
  const auto bytes = testing::ReadBytes(dir.path() / "one.pgm");
  EXPECT_EQ(std::string(bytes.begin(), bytes.end()), expect);

  export_mask_raster(BinaryMask(2, 2), dir.path() / "deep" / "zero.pgm");
  const auto zero = testing::ReadBytes(dir.path() / "deep" / "zero.pgm");
  const std::string header = "P5\n2 2\n255\n";
  ASSERT_EQ(zero.size(), header.size() + 4);
  for (std::size_t i = header.size(); i < zero.size(); ++i) EXPECT_EQ(zero[i], 0);
}

TEST(MaskRaster, RoundTripThroughReferenceReader) {
  TempDir dir;
  Rng rng(4);
  for (int t = 0; t < 10; ++t) {
    const BinaryMask m = testing::RandomMask(rng, 1 + rng.Below(20), 1 + rng.Below(20), 0.5);
    const auto path = dir.path() / ("m" + std::to_string(t) + ".pgm");
    export_mask_raster(m, path);
    EXPECT_EQ(testing::ReadPgm(path), m);
  }
}

}  // namespace
}  // namespace conceptvec
