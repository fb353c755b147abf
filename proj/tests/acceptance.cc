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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Built alongside the unit tests and registered with ctest.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "conceptvec/cls_trainer.h"
#include "conceptvec/config.h"
#include "conceptvec/dissection.h"
#include "conceptvec/embedding.h"
#include "conceptvec/error.h"
#include "conceptvec/reporting.h"
#include "conceptvec/seg_trainer.h"
#include "conceptvec/synth.h"
#include "conceptvec/thresholds.h"
#include "json.hpp"
#include "test_util.h"

namespace conceptvec {
namespace {

using testing::BruteCounts;
using testing::RandomMask;
using testing::SortOracleThreshold;
using testing::TempDir;
using testing::TinyBuilder;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Fmt(const char* format, auto... values) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, values...);
  return buf;
}

ConceptWeights OneHotSeg(const std::string& concept_id, const std::string& layer, int k, int f) {
  ConceptWeights cw;
  cw.concept_id = concept_id;
  cw.task = Task::kSegmentation;
  cw.layer = layer;
  cw.w.assign(k, 0.0);
  cw.w[f] = 1.0;
  return cw;
}

// 1. Thresholds equal the full-sort order statistic.
Outcome Quantiles() {
  Rng rng(20260101);
  const double taus[] = {0.005, 0.001, 0.01, 0.05, 0.25, 0.5};
  int mismatches = 0;
  std::uint64_t largest = 0;
  double elapsed = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 1 + static_cast<int>(rng.Below(3));
    const std::uint64_t n =
        trial == 0 ? 1000000 : static_cast<std::uint64_t>(std::exp(rng.Uniform(0.0, std::log(1e6))));
    const int images = 1 + static_cast<int>(rng.Below(8));
    const int cells = static_cast<int>((std::max<std::uint64_t>(n, 2) + images - 1) / images);
    const double tau = trial % 7 == 6 ? rng.Uniform(0.0001, 0.9999) : taus[rng.Below(6)];
    const bool train_only = trial % 3 == 2;
    const int zero_pct = static_cast<int>(rng.Below(60));
    const bool coarse = rng.Uniform() < 0.3;  // many exact ties

    TinyBuilder b(k, 1, cells, 1, 1);
    std::vector<std::vector<float>> oracle(k);
    for (int i = 0; i < images; ++i) {
      const Split split = (i % 2 == 0 || images == 1) ? Split::kTrain : Split::kVal;
      std::vector<float> vals(static_cast<std::size_t>(k) * cells);
      for (auto& x : vals) {
        if (static_cast<int>(rng.Below(100)) < zero_pct) {
          x = 0.0f;
        } else {
          const double g = std::abs(rng.Gaussian()) * 3.0;
          x = static_cast<float>(coarse ? std::floor(g * 4.0) : g);
        }
      }
      if (!train_only || split == Split::kTrain) {
        for (int f = 0; f < k; ++f) {
          oracle[f].insert(oracle[f].end(), vals.begin() + static_cast<std::ptrdiff_t>(f) * cells,
                           vals.begin() + static_cast<std::ptrdiff_t>(f + 1) * cells);
        }
      }
      b.Image("i" + std::to_string(i), split, std::move(vals));
    }
    const ProbeDataset ds = b.Build();
    const auto start = Clock::now();
    const ThresholdTable t = compute_thresholds(
        ds, "L", tau, train_only ? ThresholdScope::kTrainOnly : ThresholdScope::kAllImages);
    elapsed += Seconds(start);
    largest = std::max<std::uint64_t>(largest, t.sample_count);
    for (int f = 0; f < k; ++f) {
      if (t.thresholds[f] != SortOracleThreshold(oracle[f], tau)) ++mismatches;
    }
  }
  return {mismatches == 0 && elapsed < 30.0,
          Fmt("100 tensors (largest N=%llu), %d mismatches, %.2f s in compute_thresholds",
              static_cast<unsigned long long>(largest), mismatches, elapsed)};
}

// 2. IoU equals brute-force per-pixel counting.
Outcome IoUOracle() {
  Rng rng(7);
  int mismatches = 0;
  std::vector<BinaryMask> preds, truths;
  for (int i = 0; i < 1000; ++i) {
    const int h = 1 + static_cast<int>(rng.Below(40));
    const int w = 1 + static_cast<int>(rng.Below(40));
    const double densities[] = {0.0, 0.02, 0.3, 0.7, 1.0};
    const BinaryMask p = RandomMask(rng, h, w, i % 4 ? rng.Uniform() : densities[rng.Below(5)]);
    const BinaryMask q = RandomMask(rng, h, w, i % 4 ? rng.Uniform() : densities[rng.Below(5)]);
    const auto [inter, uni] = BruteCounts(p, q);
    const double expect = uni ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
    if (iou_individual(p, q) != expect) ++mismatches;
    preds.push_back(p);
    truths.push_back(q);
  }
  // Pooled IoU over random groups of the same pairs.
  int groups = 0;
  for (std::size_t start = 0; start < preds.size(); ++groups) {
    const std::size_t len = 1 + rng.Below(8);
    std::vector<MaskPair> pairs;
    std::uint64_t inter = 0, uni = 0;
    for (std::size_t i = start; i < std::min(preds.size(), start + len); ++i) {
      pairs.push_back({std::cref(preds[i]), std::cref(truths[i])});
      const auto [a, b] = BruteCounts(preds[i], truths[i]);
      inter += a;
      uni += b;
    }
    const double expect = uni ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
    if (iou_set(pairs) != expect) ++mismatches;
    start += len;
  }
  return {mismatches == 0, Fmt("1000 pairs + %d pooled groups, %d mismatches", groups, mismatches)};
}

// 3. One-hot weights reproduce the single-filter segmenter.
Outcome OneHot() {
  const std::pair<const char*, PlantSpec> suites[] = {
      {"default", DefaultSuite(0)}, {"topf", TopFSuite(0)}, {"shared", SharedFilterSuite(0)}};
  std::uint64_t masks = 0, ious = 0;
  int bad_masks = 0, bad_ious = 0;
  for (const auto& [name, spec] : suites) {
    const ProbeDataset ds = ProbeDataset::Create(GenerateContents(spec));
    const ThresholdTable t = compute_thresholds(ds, spec.layer, spec.tau);
    const int k = spec.filters;
    for (std::size_t i = 0; i < ds.images().size(); ++i) {
      const auto& img = ds.images()[i];
      const ActivationBundle& b = ds.bundle(spec.layer, static_cast<int>(i));
      for (int f = 0; f < k; ++f) {
        const SegPrediction p =
            predict_seg(b, t, OneHotSeg("x", spec.layer, k, f), img.height, img.width);
        ++masks;
        if (p.mask != filter_mask(b.map(f), b.height, b.width, t.thresholds[f], img.height,
                                  img.width)) {
          ++bad_masks;
        }
      }
    }
    for (const auto& id : TrainableSegConcepts(ds)) {
      for (Split split : {Split::kTrain, Split::kVal}) {
        const auto single = filter_set_ious(ds, spec.layer, id, t, split);
        for (int f = 0; f < k; ++f) {
          const double multi =
              eval_seg(ds, spec.layer, id, t, OneHotSeg(id, spec.layer, k, f), split).iou_set;
          ++ious;
          if (std::memcmp(&multi, &single[f], sizeof(double)) != 0) ++bad_ious;
        }
      }
    }
  }
  return {bad_masks == 0 && bad_ious == 0,
          Fmt("3 suites: %llu masks (%d differ), %llu IoU_set values (%d differ)",
              static_cast<unsigned long long>(masks), bad_masks,
              static_cast<unsigned long long>(ious), bad_ious)};
}

SegExample RandomSegExample(Rng& rng, int k) {
  SegExample ex;
  const int groups = 1 + static_cast<int>(rng.Below(8));
  for (int g = 0; g < groups; ++g) {
    PatternGroup pg;
    for (int f = 0; f < k; ++f) {
      if (rng.Uniform() < 0.4) pg.filters.push_back(f);
    }
    pg.foreground = static_cast<std::uint32_t>(rng.Below(50));
    pg.background = static_cast<std::uint32_t>(rng.Below(50));
    ex.pixels += pg.foreground + pg.background;
    ex.foreground += pg.foreground;
    ex.groups.push_back(std::move(pg));
  }
  ex.pixels += 1;
  ex.groups.push_back({{}, 0, 1});
  return ex;
}

// 4. Analytic gradients against central differences (h = 1e-3).
Outcome Gradients() {
  Rng rng(4);
  double worst_seg = 0.0, worst_cls = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 2 + static_cast<int>(rng.Below(15));
    std::vector<SegExample> examples;
    const int n = 1 + static_cast<int>(rng.Below(4));
    for (int i = 0; i < n; ++i) examples.push_back(RandomSegExample(rng, k));
    std::vector<const SegExample*> batch;
    for (const auto& e : examples) batch.push_back(&e);
    std::vector<double> w(k);
    for (auto& x : w) x = rng.Uniform(-1.5, 1.5);
    const double alpha = rng.Uniform(0.05, 0.95);
    std::vector<double> grad;
    SegObjective(batch, w, alpha, LossForm::kBce, &grad);
    worst_seg = std::max(
        worst_seg, testing::MaxGradientError(
                       [&](const std::vector<double>& x) {
                         return SegObjective(batch, x, alpha, LossForm::kBce, nullptr);
                       },
                       w, grad, 1e-3));
  }
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 1 + static_cast<int>(rng.Below(16));
    const int n = 2 + static_cast<int>(rng.Below(30));
    std::vector<std::vector<double>> rows(n, std::vector<double>(k));
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) {
      for (auto& x : rows[i]) x = rng.Uniform(0.0, 2.0);
      labels[i] = rng.Uniform() < 0.5;
    }
    std::vector<const std::vector<double>*> ptrs;
    for (const auto& r : rows) ptrs.push_back(&r);
    std::vector<double> x(k + 1);  // (w..., b)
    for (auto& v : x) v = rng.Uniform(-1.0, 1.0);
    std::vector<double> gw;
    double gb = 0.0;
    ClsObjective(ptrs, labels, std::span<const double>(x.data(), k), x[k], &gw, &gb);
    gw.push_back(gb);
    worst_cls = std::max(
        worst_cls, testing::MaxGradientError(
                       [&](const std::vector<double>& p) {
                         return ClsObjective(ptrs, labels, std::span<const double>(p.data(), k),
                                             p[k], nullptr, nullptr);
                       },
                       x, gw, 1e-3));
  }
  return {worst_seg < 1e-5 && worst_cls < 1e-5,
          Fmt("max normwise relative error: seg %.2e, cls %.2e (100 instances each)", worst_seg,
              worst_cls)};
}

// 5. Learned weights recover planted two-filter concepts and beat the best
// single filter by at least 20% relative.
Outcome PlantedRecovery() {
  const auto start = Clock::now();
  int runs_passed = 0;
  double worst_ratio = 1e300;
  std::string failures;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const PlantSpec spec = DefaultSuite(seed);
    const ProbeDataset ds = ProbeDataset::Create(GenerateContents(spec));
    const ThresholdTable t = compute_thresholds(ds, spec.layer, spec.tau);
    const IndicatorCache cache(ds, spec.layer, t, EvalResolution::kGroundTruth, 1);
    std::map<std::string, double> single;
    for (const auto& s : dissect_all(ds, spec.layer, t, EvalResolution::kGroundTruth, 1)) {
      single[s.concept_id] = s.iou_val;
    }
    bool ok = true;
    for (const auto& c : spec.concepts) {
      const ConceptWeights w =
          train_seg(ds, spec.layer, c.id, t, TrainConfig{}, std::nullopt, &cache);
      const double multi = eval_seg(ds, spec.layer, c.id, t, w, Split::kVal).iou_set;
      const double ratio = single[c.id] > 0 ? multi / single[c.id] : 1e300;
      worst_ratio = std::min(worst_ratio, ratio);
      if (restrict_top_f(w, 2) != c.support || ratio < 1.2) {
        ok = false;
        failures += Fmt(" seed%llu/%s", static_cast<unsigned long long>(seed), c.id.c_str());
      }
    }
    runs_passed += ok;
  }
  const double elapsed = Seconds(start);
  return {runs_passed >= 19 && elapsed < 120.0,
          Fmt("%d/20 seeds fully recovered, worst multi/single = %.3f, %.1f s%s", runs_passed,
              worst_ratio, elapsed, failures.c_str())};
}

// 6. Top-F saturation on support-4 classification concepts.
Outcome TopF() {
  TrainConfig config;
  config.lr = 1e-2;  // see the learning-rate entry in the decisions ledger
  bool ok = true;
  double sum1 = 0, sum4 = 0, sumk = 0;
  std::string per_seed;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const PlantSpec spec = TopFSuite(seed);
    const ProbeDataset ds = ProbeDataset::Create(GenerateContents(spec));
    const PooledFeatureTable table(ds, spec.layer);
    double a1 = 0, a4 = 0, ak = 0;
    for (const auto& c : spec.concepts) {
      const ConceptWeights base = train_cls(ds, spec.layer, c.id, config, std::nullopt, &table);
      const auto acc = [&](int f) {
        const ConceptWeights w = train_cls_topf(ds, spec.layer, c.id, f, base, config, &table);
        return eval_cls(ds, spec.layer, c.id, w, std::nullopt, &table);
      };
      a1 += acc(1);
      a4 += acc(4);
      ak += acc(spec.filters);
    }
    const double n = static_cast<double>(spec.concepts.size());
    a1 /= n;
    a4 /= n;
    ak /= n;
    ok = ok && std::abs(a4 - ak) <= 0.02 && ak - a1 >= 0.05;
    sum1 += a1;
    sum4 += a4;
    sumk += ak;
    per_seed += Fmt(" [%.3f %.3f %.3f]", a1, a4, ak);
  }
  return {ok, Fmt("mean balanced accuracy F=1 %.3f, F=4 %.3f, F=K %.3f; per seed (F=1 F=4 F=K):%s",
                  sum1 / 10, sum4 / 10, sumk / 10, per_seed.c_str())};
}

// 7. Filter-sharing histogram on a suite with one filter shared by 3 concepts.
Outcome Sharing() {
  bool ok = true;
  std::string detail;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const PlantSpec spec = SharedFilterSuite(seed);
    std::vector<int> expected(spec.filters, 0);
    for (const auto& c : spec.concepts) ++expected[c.support.at(0)];
    const int expected_zero =
        static_cast<int>(std::count(expected.begin(), expected.end(), 0));
    const ProbeDataset ds = ProbeDataset::Create(GenerateContents(spec));
    const ThresholdTable t = compute_thresholds(ds, spec.layer, spec.tau);
    std::map<std::string, int> best;
    for (const auto& s : dissect_all(ds, spec.layer, t, EvalResolution::kGroundTruth, 1)) {
      best[s.concept_id] = s.filter;
    }
    const SharingHistogram h = filter_sharing_histogram(best, spec.filters, DefaultSharingBins());
    const int threes = static_cast<int>(std::count(h.per_filter.begin(), h.per_filter.end(), 3));
    ok = ok && threes == 1 && h.zero_filters == expected_zero && h.per_filter == expected;
    detail += Fmt("%sseed%llu: %d filter(s) with count 3, zero bin %d (expected %d)",
                  detail.empty() ? "" : "; ",
                  static_cast<unsigned long long>(seed), threes, h.zero_filters, expected_zero);
  }
  return {ok, detail};
}

EmbeddingSpace RandomSpace(Rng& rng, int c, int dims) {
  std::vector<std::string> ids;
  std::vector<double> raw;
  for (int i = 0; i < c; ++i) {
    ids.push_back("c" + std::to_string(100 + i));
    for (int k = 0; k < dims; ++k) raw.push_back(rng.Gaussian());
  }
  return BuildEmbeddingSpace("seg", "L", std::move(ids), dims, raw);
}

// 8. Embedding-space distance, H-hot angles and arithmetic cancellation.
Outcome EmbeddingMath() {
  Rng rng(8);
  double worst_self = 0.0, worst_sym = 0.0;
  int bad_sum = 0, bad_hhot = 0, hhot_cases = 0, bad_arith = 0;
  for (int t = 0; t < 50; ++t) {
    const int c = 3 + static_cast<int>(rng.Below(20));
    const EmbeddingSpace a = RandomSpace(rng, c, 2 + static_cast<int>(rng.Below(40)));
    const EmbeddingSpace b = RandomSpace(rng, c, 2 + static_cast<int>(rng.Below(40)));
    worst_self = std::max(worst_self, space_distance(a, a).total);
    const SpaceDistance ab = space_distance(a, b);
    worst_sym = std::max(worst_sym, std::abs(ab.total - space_distance(b, a).total));
    double sum = 0.0;
    for (double v : ab.per_concept) sum += v;
    if (sum != ab.total) ++bad_sum;

    const std::string x = a.concepts[rng.Below(c)];
    std::string y = a.concepts[rng.Below(c)];
    if (y == x) y = a.concepts[(a.index(x) + 1) % c];
    const int n = std::min(5, c - 2);
    const std::vector<std::string> plus = {x, y}, minus = {y}, only = {x};
    const auto ref = nearest(a, x, n);
    const auto got = arithmetic(a, plus, minus, n);
    const auto direct = arithmetic(a, only, {}, n);
    for (std::size_t i = 0; i < ref.size(); ++i) {
      if (got.size() != ref.size() || got[i].concept_id != ref[i].concept_id ||
          got[i].cosine != ref[i].cosine || direct[i].cosine != ref[i].cosine) {
        ++bad_arith;
        break;
      }
    }
  }
  for (int k = 2; k <= 12; ++k) {
    for (int h = 1; h < k && h <= 4; ++h) {
      ++hhot_cases;
      if (testing::BruteForceHhotAngle(k, h, h) != hhot_min_angle(h)) ++bad_hhot;
      for (int h2 = 1; h2 < h; ++h2) {
        ++hhot_cases;
        if (testing::BruteForceHhotAngle(k, h, h2) != hhot_cross_min_angle(h, h2)) ++bad_hhot;
      }
    }
  }
  const bool ok = worst_self <= 1e-12 && worst_sym <= 1e-12 && bad_sum == 0 && bad_hhot == 0 &&
                  bad_arith == 0;
  return {ok, Fmt("self %.1e, asymmetry %.1e, decomposition mismatches %d, H-hot %d/%d exact, "
                  "arithmetic mismatches %d",
                  worst_self, worst_sym, bad_sum, hhot_cases - bad_hhot, hhot_cases, bad_arith)};
}

// Shared CLI fixture for criteria 9 and 10: a full pipeline at one thread.
struct CliRun {
  TempDir dir;
  std::vector<std::string> steps;
  std::string failure;

  std::filesystem::path Out() const { return dir.path() / "a"; }

  int Cli(const std::string& args) const {
    return testing::RunCommand(std::string(CONCEPTVEC_CLI_PATH) + " " + args + " >>" +
                               (dir.path() / "log.txt").string() + " 2>&1");
  }

  bool Run() {
    const auto data = dir.path() / "data";
    if (Cli("synth --suite default --seed 5 --out " + data.string()) != 0) {
      failure = "synth failed";
      return false;
    }
    const nlohmann::json config = {{"dataset", (data / "manifest.json").string()},
                                   {"layer", "synth"},
                                   {"out", Out().string()}};
    std::ofstream(dir.path() / "config.json") << config.dump(1);
    const std::string cfg = " --config " + (dir.path() / "config.json").string() + " --threads 1";
    const std::string seg_space = (Out() / "embeddings" / "seg_synth.space.json").string();
    const std::string cls_space = (Out() / "embeddings" / "cls_synth.space.json").string();
    const std::vector<std::pair<std::string, std::string>> pipeline = {
        {"thresholds", ""},
        {"dissect", ""},
        {"train-seg", "--all"},
        {"eval-seg", "--all"},
        {"train-cls", "--all"},
        {"eval-cls", "--all"},
        {"topf", "--all --epochs 5"},
        {"correlate", "--all --permutations 2000"},
        {"deciles", "--all"},
        {"embed-nn", "--concept u03"},
        {"embed-arith", "--plus u00,u01 --minus u01"},
        {"embed-dist", "--a " + seg_space + " --b " + cls_space},
        {"report", ""},
    };
    for (const auto& [cmd, extra] : pipeline) {
      if (Cli(cmd + cfg + " " + extra) != 0) {
        failure = cmd + " failed; see " + (dir.path() / "log.txt").string();
        return false;
      }
      steps.push_back(cmd);
    }
    return true;
  }
};

// 9. Every pipeline rerun from its echo at 8 threads is byte-identical.
Outcome Determinism(CliRun& run) {
  if (!run.failure.empty()) return {false, run.failure};
  const auto b = run.dir.path() / "b";
  for (const auto& cmd : run.steps) {
    const auto echo = run.Out() / ("run_" + cmd + ".config.json");
    if (run.Cli("rerun " + echo.string() + " --threads 8 --out " + b.string()) != 0) {
      return {false, "rerun of " + cmd + " failed"};
    }
  }
  // Echoes differ by design: they record --out and --threads.
  const auto left = testing::SnapshotTree(run.Out(), "run_");
  const auto right = testing::SnapshotTree(b, "run_");
  std::string differing;
  for (const auto& [path, bytes] : left) {
    const auto it = right.find(path);
    if (it == right.end() || it->second != bytes) differing += " " + path;
  }
  for (const auto& [path, bytes] : right) {
    if (!left.count(path)) differing += " +" + path;
  }
  return {differing.empty() && !left.empty(),
          Fmt("%zu commands rerun from echo at 8 threads, %zu output files compared%s%s",
              run.steps.size(), left.size(), differing.empty() ? "" : "; differing:",
              differing.c_str())};
}

// 10. Default hyperparameters appear in the echo.
Outcome DefaultEcho(const CliRun& run) {
  if (!run.failure.empty()) return {false, run.failure};
  std::ifstream in(run.Out() / "run_train-seg.config.json");
  const nlohmann::json echo = nlohmann::json::parse(in);
  const auto& t = echo.at("training");
  const bool ok = echo.at("tau") == 0.005 && t.at("lr") == 1e-4 && t.at("momentum") == 0.9 &&
                  t.at("batch") == 64 && t.at("epochs") == 30;
  return {ok, Fmt("tau=%s lr=%s momentum=%s batch=%s epochs=%s", echo["tau"].dump().c_str(),
                  t["lr"].dump().c_str(), t["momentum"].dump().c_str(),
                  t["batch"].dump().c_str(), t["epochs"].dump().c_str())};
}

}  // namespace
}  // namespace conceptvec

int main() {
  using namespace conceptvec;
  CliRun cli;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"quantile oracle", Quantiles},
      {"IoU oracle", IoUOracle},
      {"one-hot unification", OneHot},
      {"gradient checks", Gradients},
      {"planted distributed concepts", PlantedRecovery},
      {"top-F saturation", TopF},
      {"filter sharing", Sharing},
      {"embedding math", EmbeddingMath},
      {"determinism", [&] {
         cli.Run();
         return Determinism(cli);
       }},
      {"default echo", [&] { return DefaultEcho(cli); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << "criterion " << (i + 1) << " [" << criteria[i].first
              << "]: " << (o.pass ? "PASS" : "FAIL") << " - " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed ? 1 : 0;
}
