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

#include "commands.h"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include "conceptvec/cls_trainer.h"
#include "conceptvec/csv.h"
#include "conceptvec/dataset.h"
#include "conceptvec/dissection.h"
#include "conceptvec/embedding.h"
#include "conceptvec/error.h"
#include "conceptvec/parallel.h"
#include "conceptvec/reporting.h"
#include "conceptvec/seg_trainer.h"
#include "conceptvec/thresholds.h"

namespace conceptvec::cli {
namespace fs = std::filesystem;
namespace {

[[noreturn]] void Usage(const std::string& subject, const std::string& what) {
  throw Error(ErrorCode::kInvalidArgument, subject, what);
}

fs::path Out(const RunConfig& c) { return fs::path(c.out); }

void RequireDatasetAndLayer(const RunConfig& c) {
  if (c.dataset.empty()) Usage("dataset", "no dataset manifest in config or flags");
  if (c.layer.empty()) Usage("layer", "no layer in config or flags");
}

ProbeDataset LoadDataset(const RunConfig& c) {
  RequireDatasetAndLayer(c);
  ProbeDataset ds = load_dataset(c.dataset);
  ds.layer(c.layer);  // fail early on an unknown layer
  for (const auto& w : ds.warnings()) std::cerr << "warning: " << w << "\n";
  return ds;
}

fs::path ThresholdStem(const RunConfig& c) { return Out(c) / "thresholds" / c.layer; }

ThresholdTable LoadThresholds(const RunConfig& c) {
  fs::path sidecar = ThresholdStem(c);
  sidecar += ".json";
  if (!fs::exists(sidecar)) {
    throw Error(ErrorCode::kDanglingReference, sidecar.string(),
                "no threshold table; run `thresholds` first");
  }
  return load_thresholds(sidecar);
}

fs::path WeightStem(const RunConfig& c, Task task, const std::string& id,
                    bool single = false) {
  fs::path dir = Out(c) / "weights" / std::string(TaskName(task)) / c.layer;
  if (single) dir /= "single";
  return dir / id;
}

ConceptWeights LoadWeights(const RunConfig& c, Task task, const std::string& id,
                           bool single = false) {
  fs::path sidecar = WeightStem(c, task, id, single);
  sidecar += ".json";
  if (!fs::exists(sidecar)) {
    throw Error(ErrorCode::kDanglingReference, sidecar.string(),
                "no trained weights; run the training command first");
  }
  return load_weights(sidecar);
}

fs::path SpacePath(const RunConfig& c, Task task) {
  return Out(c) / "embeddings" / (std::string(TaskName(task)) + "_" + c.layer + ".space.json");
}

// --concept picks one concept, --all every trainable one.
std::vector<std::string> SelectConcepts(const ProbeDataset& ds, const Args& args,
                                        const std::vector<std::string>& trainable) {
  if (!args.concept_id.empty() && args.all) Usage("concept", "--concept and --all are exclusive");
  if (!args.concept_id.empty()) {
    ds.concept_index(args.concept_id);
    return {args.concept_id};
  }
  if (!args.all) Usage("concept", "pass --concept ID or --all");
  return trainable;
}

std::string Category(const ProbeDataset& ds, const std::string& id) {
  return std::string(CategoryName(ds.concept_by_id(id).category));
}

void WriteJson(const fs::path& path, const nlohmann::json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << j.dump(1) << "\n";
  if (!out) throw Error(ErrorCode::kIo, path.string(), "write failed");
}

void SaveSpace(const RunConfig& c, Task task, const std::vector<ConceptWeights>& weights) {
  std::vector<std::string> warnings;
  const EmbeddingSpace space = BuildEmbeddingSpace(weights, &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  save_space(space, SpacePath(c, task));
}

std::string OptionalNumber(const std::optional<double>& v) {
  return v ? FormatNumber(*v) : std::string();
}

}  // namespace

nlohmann::json Args::ToJson() const {
  return {{"concept", concept_id},   {"all", all},
          {"n", n},                  {"space", space},
          {"a", space_a},            {"b", space_b},
          {"plus", plus},            {"minus", minus},
          {"permutations", permutations}, {"permutation_seed", permutation_seed}};
}

Args Args::FromJson(const nlohmann::json& j) {
  Args a;
  try {
    a.concept_id = j.at("concept").get<std::string>();
    a.all = j.at("all").get<bool>();
    a.n = j.at("n").get<int>();
    a.space = j.at("space").get<std::string>();
    a.space_a = j.at("a").get<std::string>();
    a.space_b = j.at("b").get<std::string>();
    a.plus = j.at("plus").get<std::vector<std::string>>();
    a.minus = j.at("minus").get<std::vector<std::string>>();
    a.permutations = j.at("permutations").get<int>();
    a.permutation_seed = j.at("permutation_seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchema, "run.args", e.what());
  }
  return a;
}

void WriteEcho(const std::string& name, const RunConfig& config, const Args& args) {
  nlohmann::json j = RunConfigToJson(config);
  j["run"] = {{"command", name}, {"args", args.ToJson()}};
  WriteJson(Out(config) / ("run_" + name + ".config.json"), j);
}

void RunThresholds(const RunConfig& c) {
  const ProbeDataset ds = LoadDataset(c);
  const ThresholdTable table = compute_thresholds(ds, c.layer, c.tau, c.threshold_scope, c.threads);
  save_thresholds(table, ThresholdStem(c));
  std::cout << "thresholds: " << table.thresholds.size() << " filters, N="
            << table.sample_count << "\n";
}

void RunDissect(const RunConfig& c) {
  const ProbeDataset ds = LoadDataset(c);
  const ThresholdTable th = LoadThresholds(c);
  const auto scores = dissect_all(ds, c.layer, th, c.training.resolution, c.threads);
  CsvTable t{{"concept_id", "category", "best_filter", "iou_train", "iou_val"}, {}};
  for (const auto& s : scores) {
    t.rows.push_back({s.concept_id, Category(ds, s.concept_id), std::to_string(s.filter),
                      FormatNumber(s.iou_train), FormatNumber(s.iou_val)});
  }
  WriteCsv(Out(c) / "dissect" / (c.layer + ".csv"), t);
  std::cout << "dissect: " << scores.size() << " concepts\n";
}

void RunTrainSeg(const RunConfig& c, const Args& args) {
  const ProbeDataset ds = LoadDataset(c);
  const ThresholdTable th = LoadThresholds(c);
  const auto ids = SelectConcepts(ds, args, TrainableSegConcepts(ds));
  const IndicatorCache cache(ds, c.layer, th, c.training.resolution, c.threads);
  std::vector<ConceptWeights> weights(ids.size());
  ParallelFor(ids.size(), c.threads, [&](std::size_t i) {
    weights[i] = train_seg(ds, c.layer, ids[i], th, c.training, std::nullopt, &cache);
  });
  for (const auto& w : weights) save_weights(w, WeightStem(c, Task::kSegmentation, w.concept_id));
  if (args.all && !weights.empty()) SaveSpace(c, Task::kSegmentation, weights);
  std::cout << "train-seg: " << weights.size() << " concepts\n";
}

void RunEvalSeg(const RunConfig& c, const Args& args) {
  const ProbeDataset ds = LoadDataset(c);
  const ThresholdTable th = LoadThresholds(c);
  const auto ids = SelectConcepts(ds, args, TrainableSegConcepts(ds));
  struct Row {
    FilterConceptScore single;
    SegEvaluation multi;
  };
  std::vector<Row> rows(ids.size());
  ParallelFor(ids.size(), c.threads, [&](std::size_t i) {
    const ConceptWeights w = LoadWeights(c, Task::kSegmentation, ids[i]);
    rows[i].single = best_filter(ds, c.layer, ids[i], th, c.training.resolution);
    rows[i].multi = eval_seg(ds, c.layer, ids[i], th, w, Split::kVal, c.training.resolution);
  });
  CsvTable summary{{"concept_id", "category", "single_filter", "single_iou_val", "multi_iou_val"},
                   {}};
  CsvTable per_image{{"concept_id", "image", "iou"}, {}};
  for (std::size_t i = 0; i < ids.size(); ++i) {
    summary.rows.push_back({ids[i], Category(ds, ids[i]), std::to_string(rows[i].single.filter),
                            FormatNumber(rows[i].single.iou_val),
                            FormatNumber(rows[i].multi.iou_set)});
    for (const auto& s : rows[i].multi.per_image) {
      per_image.rows.push_back({ids[i], s.image, FormatNumber(s.iou)});
    }
  }
  WriteCsv(Out(c) / "eval" / ("seg_" + c.layer + ".csv"), summary);
  WriteCsv(Out(c) / "eval" / ("seg_" + c.layer + "_per_image.csv"), per_image);
  std::cout << "eval-seg: " << ids.size() << " concepts\n";
}

void RunTrainCls(const RunConfig& c, const Args& args) {
  const ProbeDataset ds = LoadDataset(c);
  const auto ids = SelectConcepts(ds, args, TrainableClsConcepts(ds));
  const PooledFeatureTable table(ds, c.layer);
  std::vector<ConceptWeights> full(ids.size());
  std::vector<ConceptWeights> single(ids.size());
  ParallelFor(ids.size(), c.threads, [&](std::size_t i) {
    full[i] = train_cls(ds, c.layer, ids[i], c.training, std::nullopt, &table);
    single[i] = train_cls_topf(ds, c.layer, ids[i], 1, full[i], c.training, &table);
  });
  for (std::size_t i = 0; i < ids.size(); ++i) {
    save_weights(full[i], WeightStem(c, Task::kClassification, ids[i]));
    save_weights(single[i], WeightStem(c, Task::kClassification, ids[i], /*single=*/true));
  }
  if (args.all && !full.empty()) SaveSpace(c, Task::kClassification, full);
  std::cout << "train-cls: " << ids.size() << " concepts\n";
}

void RunEvalCls(const RunConfig& c, const Args& args) {
  const ProbeDataset ds = LoadDataset(c);
  const auto ids = SelectConcepts(ds, args, TrainableClsConcepts(ds));
  const PooledFeatureTable table(ds, c.layer);
  std::vector<std::pair<ConceptWeights, double>> single(ids.size());
  std::vector<double> multi(ids.size());
  ParallelFor(ids.size(), c.threads, [&](std::size_t i) {
    const ConceptWeights w = LoadWeights(c, Task::kClassification, ids[i]);
    ConceptWeights s = LoadWeights(c, Task::kClassification, ids[i], /*single=*/true);
    multi[i] = eval_cls(ds, c.layer, ids[i], w, c.resample_seed, &table);
    const double acc = eval_cls(ds, c.layer, ids[i], s, c.resample_seed, &table);
    single[i] = {std::move(s), acc};
  });
  CsvTable t{{"concept_id", "category", "single_filter", "single_accuracy", "multi_accuracy"},
             {}};
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto& support = single[i].first.restricted_support;
    const std::string filter = support && support->size() == 1 ? std::to_string((*support)[0]) : "";
    t.rows.push_back({ids[i], Category(ds, ids[i]), filter, FormatNumber(single[i].second),
                      FormatNumber(multi[i])});
  }
  WriteCsv(Out(c) / "eval" / ("cls_" + c.layer + ".csv"), t);
  std::cout << "eval-cls: " << ids.size() << " concepts\n";
}

void RunTopF(const RunConfig& c, const Args& args) {
  const ProbeDataset ds = LoadDataset(c);
  const int filters = ds.layer(c.layer).filters;
  const std::vector<int> sweep = c.EffectiveSweep(filters);
  for (int f : sweep) {
    if (f > filters) Usage("f_sweep", "F=" + std::to_string(f) + " exceeds K=" + std::to_string(filters));
  }
  const bool seg = c.task == Task::kSegmentation;
  const auto ids = SelectConcepts(ds, args, seg ? TrainableSegConcepts(ds) : TrainableClsConcepts(ds));

  std::optional<ThresholdTable> th;
  std::optional<IndicatorCache> cache;
  std::optional<PooledFeatureTable> table;
  if (seg) {
    th = LoadThresholds(c);
    cache.emplace(ds, c.layer, *th, c.training.resolution, c.threads);
  } else {
    table.emplace(ds, c.layer);
  }
  std::vector<std::vector<double>> metrics(ids.size(), std::vector<double>(sweep.size()));
  ParallelFor(ids.size(), c.threads, [&](std::size_t i) {
    const ConceptWeights base = LoadWeights(c, c.task, ids[i]);
    for (std::size_t j = 0; j < sweep.size(); ++j) {
      if (seg) {
        const auto w = train_seg_topf(ds, c.layer, ids[i], sweep[j], base, *th, c.training, &*cache);
        metrics[i][j] = eval_seg(ds, c.layer, ids[i], *th, w, Split::kVal, c.training.resolution).iou_set;
      } else {
        const auto w = train_cls_topf(ds, c.layer, ids[i], sweep[j], base, c.training, &*table);
        metrics[i][j] = eval_cls(ds, c.layer, ids[i], w, c.resample_seed, &*table);
      }
    }
  });
  CsvTable t{{"concept_id", "F", "metric"}, {}};
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = 0; j < sweep.size(); ++j) {
      t.rows.push_back({ids[i], std::to_string(sweep[j]), FormatNumber(metrics[i][j])});
    }
  }
  WriteCsv(Out(c) / "topf" / (std::string(TaskName(c.task)) + "_" + c.layer + ".csv"), t);
  std::cout << "topf: " << ids.size() << " concepts x " << sweep.size() << " values of F\n";
}

namespace {

EmbeddingSpace LoadSpaceFor(const RunConfig& c, const std::string& explicit_path) {
  if (!explicit_path.empty()) return load_space(explicit_path);
  if (c.layer.empty()) Usage("layer", "no layer in config or flags (or pass --space)");
  return load_space(SpacePath(c, c.task));
}

CsvTable NeighborTable(const std::vector<Neighbor>& neighbors) {
  CsvTable t{{"rank", "concept_id", "cosine"}, {}};
  for (std::size_t i = 0; i < neighbors.size(); ++i) {
    t.rows.push_back({std::to_string(i + 1), neighbors[i].concept_id,
                      FormatNumber(neighbors[i].cosine)});
    std::cout << i + 1 << "\t" << neighbors[i].concept_id << "\t"
              << FormatNumber(neighbors[i].cosine) << "\n";
  }
  return t;
}

}  // namespace

void RunEmbedNearest(const RunConfig& c, const Args& args) {
  if (args.concept_id.empty()) Usage("concept", "embed-nn needs --concept");
  const EmbeddingSpace space = LoadSpaceFor(c, args.space);
  WriteCsv(Out(c) / "embed" / ("nn_" + args.concept_id + ".csv"),
           NeighborTable(nearest(space, args.concept_id, args.n)));
}

void RunEmbedArithmetic(const RunConfig& c, const Args& args) {
  if (args.plus.empty() && args.minus.empty()) Usage("arithmetic", "pass --plus and/or --minus");
  const EmbeddingSpace space = LoadSpaceFor(c, args.space);
  WriteCsv(Out(c) / "embed" / "arith.csv",
           NeighborTable(arithmetic(space, args.plus, args.minus, args.n)));
}

void RunEmbedDistance(const RunConfig& c, const Args& args) {
  if (args.space_a.empty() || args.space_b.empty()) Usage("space", "embed-dist needs --a and --b");
  const SpaceDistance d = space_distance(load_space(args.space_a), load_space(args.space_b));
  CsvTable t{{"concept_id", "term"}, {}};
  for (std::size_t i = 0; i < d.concepts.size(); ++i) {
    t.rows.push_back({d.concepts[i], FormatNumber(d.per_concept[i])});
  }
  t.rows.push_back({"total", FormatNumber(d.total)});
  WriteCsv(Out(c) / "embed" / "dist.csv", t);
  std::cout << "distance " << FormatNumber(d.total) << " over " << d.concepts.size()
            << " shared concepts\n";
}

void RunCorrelate(const RunConfig& c, const Args& args) {
  const ProbeDataset ds = LoadDataset(c);
  const ThresholdTable th = LoadThresholds(c);
  const auto ids = SelectConcepts(ds, args, TrainableSegConcepts(ds));
  if (args.permutations < 1) Usage("permutations", "must be >= 1");
  std::vector<Correlation> results(ids.size());
  ParallelFor(ids.size(), c.threads, [&](std::size_t i) {
    const ConceptWeights w = LoadWeights(c, Task::kSegmentation, ids[i]);
    const auto ious =
        filter_set_ious(ds, c.layer, ids[i], th, Split::kTrain, c.training.resolution);
    results[i] = weight_iou_correlation(w, ious, args.permutations, args.permutation_seed);
  });
  CsvTable t{{"concept_id", "r", "p", "permutations"}, {}};
  int significant = 0;
  int defined = 0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto& r = results[i];
    t.rows.push_back({ids[i], OptionalNumber(r.r), OptionalNumber(r.p),
                      std::to_string(r.permutations)});
    if (r.p) {
      ++defined;
      if (*r.p < 0.01) ++significant;
    }
  }
  WriteCsv(Out(c) / "correlate" / (c.layer + ".csv"), t);
  std::cout << "correlate: " << significant << " of " << defined
            << " concepts significant at p < 0.01\n";
}

void RunDeciles(const RunConfig& c, const Args& args) {
  const ProbeDataset ds = LoadDataset(c);
  const ThresholdTable th = LoadThresholds(c);
  const CsvTable per_image = ReadCsv(Out(c) / "eval" / ("seg_" + c.layer + "_per_image.csv"));
  std::map<std::string, std::map<std::string, double>> by_concept;
  const std::size_t ci = per_image.column("concept_id");
  const std::size_t ii = per_image.column("image");
  const std::size_t vi = per_image.column("iou");
  for (const auto& row : per_image.rows) by_concept[row[ci]][row[ii]] = ParseNumber(row[vi]);

  std::vector<std::string> ids;
  for (const auto& [id, m] : by_concept) ids.push_back(id);
  ids = SelectConcepts(ds, args, ids);
  const LayerRecord& layer = ds.layer(c.layer);
  for (const auto& id : ids) {
    auto it = by_concept.find(id);
    if (it == by_concept.end()) {
      throw Error(ErrorCode::kDanglingReference, id, "no per-image IoUs; run `eval-seg` first");
    }
    const DecileSelection sel = decile_examples(id, it->second);
    const ConceptWeights w = LoadWeights(c, Task::kSegmentation, id);
    const int concept_idx = ds.concept_index(id);
    nlohmann::json examples = nlohmann::json::array();
    for (std::size_t slot = 0; slot < sel.ranked.size(); ++slot) {
      const auto& ex = sel.ranked[slot];
      const int image = ds.image_index(ex.image);
      const BinaryMask truth =
          TruthAt(*ds.annotation(image, concept_idx)->mask, layer, c.training.resolution);
      const SegPrediction pred =
          predict_seg(ds.bundle(c.layer, image), th, w, truth.height, truth.width);
      const std::string stem = std::to_string(slot + 1) + "_" + ex.image;
      const fs::path rel_pred = fs::path("masks") / id / (stem + "_pred.pgm");
      const fs::path rel_truth = fs::path("masks") / id / (stem + "_truth.pgm");
      export_mask_raster(pred.mask, Out(c) / "deciles" / rel_pred);
      export_mask_raster(truth, Out(c) / "deciles" / rel_truth);
      examples.push_back({{"slot", slot + 1},
                          {"image", ex.image},
                          {"iou", ex.iou},
                          {"prediction", rel_pred.generic_string()},
                          {"truth", rel_truth.generic_string()}});
    }
    nlohmann::json j = {{"concept", id}, {"n_zero", sel.n_zero}, {"examples", examples}};
    j["warning"] = sel.warning ? nlohmann::json(*sel.warning) : nlohmann::json();
    if (sel.warning) std::cerr << "warning: " << id << ": " << *sel.warning << "\n";
    WriteJson(Out(c) / "deciles" / (id + ".json"), j);
  }
  std::cout << "deciles: " << ids.size() << " concepts\n";
}

void RunReport(const RunConfig& c) {
  const ProbeDataset ds = LoadDataset(c);
  const fs::path report = Out(c) / "report";
  bool any = false;

  CsvTable aggregates{{"task", "category", "n_concepts", "mean_metric", "standard_error"}, {}};
  CsvTable combos{{"task", "n_concepts", "fraction_multi_ge_single"}, {}};
  CsvTable failures{{"task", "concept_id", "single", "multi", "n_train", "mean_size",
                     "small_dataset", "small_object"},
                    {}};
  auto add_task = [&](Task task, const fs::path& csv, const char* single_col,
                      const char* multi_col) {
    if (!fs::exists(csv)) return;
    any = true;
    const CsvTable t = ReadCsv(csv);
    std::vector<ConceptMetric> metrics;
    std::map<std::string, double> single, multi;
    for (const auto& row : t.rows) {
      const std::string& id = row[t.column("concept_id")];
      const double m = ParseNumber(row[t.column(multi_col)]);
      metrics.push_back({id, ds.concept_by_id(id).category, m});
      single[id] = ParseNumber(row[t.column(single_col)]);
      multi[id] = m;
    }
    for (const auto& a : category_aggregates(task, metrics)) {
      aggregates.rows.push_back({std::string(TaskName(task)), std::string(CategoryName(a.category)),
                                 std::to_string(a.n_concepts), FormatNumber(a.mean_metric),
                                 FormatNumber(a.standard_error)});
    }
    const auto pairs = PairMetrics(single, multi);
    if (!pairs.empty()) {
      combos.rows.push_back({std::string(TaskName(task)), std::to_string(pairs.size()),
                             FormatNumber(combo_vs_single(pairs))});
    }
    for (const auto& f : failure_diagnostics(task, pairs, ds)) {
      failures.rows.push_back({std::string(TaskName(task)), f.concept_id, FormatNumber(f.single),
                               FormatNumber(f.multi), std::to_string(f.n_train),
                               OptionalNumber(f.mean_size), f.small_dataset ? "1" : "0",
                               f.small_object ? "1" : "0"});
    }
  };
  add_task(Task::kSegmentation, Out(c) / "eval" / ("seg_" + c.layer + ".csv"), "single_iou_val",
           "multi_iou_val");
  add_task(Task::kClassification, Out(c) / "eval" / ("cls_" + c.layer + ".csv"),
           "single_accuracy", "multi_accuracy");

  CsvTable sweep{{"task", "F", "n_concepts", "mean_metric", "standard_error"}, {}};
  for (Task task : {Task::kSegmentation, Task::kClassification}) {
    const fs::path csv = Out(c) / "topf" / (std::string(TaskName(task)) + "_" + c.layer + ".csv");
    if (!fs::exists(csv)) continue;
    any = true;
    const CsvTable t = ReadCsv(csv);
    std::vector<SweepRow> rows;
    for (const auto& row : t.rows) {
      rows.push_back({row[t.column("concept_id")],
                      static_cast<int>(ParseNumber(row[t.column("F")])),
                      ParseNumber(row[t.column("metric")])});
    }
    for (const auto& p : f_sweep_curve(rows)) {
      sweep.rows.push_back({std::string(TaskName(task)), std::to_string(p.f),
                            std::to_string(p.n_concepts), FormatNumber(p.mean_metric),
                            FormatNumber(p.standard_error)});
    }
  }

  const fs::path dissect_csv = Out(c) / "dissect" / (c.layer + ".csv");
  if (fs::exists(dissect_csv)) {
    any = true;
    const CsvTable t = ReadCsv(dissect_csv);
    std::map<std::string, int> best;
    for (const auto& row : t.rows) {
      best[row[t.column("concept_id")]] = static_cast<int>(ParseNumber(row[t.column("best_filter")]));
    }
    const SharingHistogram h =
        filter_sharing_histogram(best, ds.layer(c.layer).filters, DefaultSharingBins());
    CsvTable bins{{"bin_lo", "bin_hi", "filters"}, {}};
    for (const auto& b : h.bins) {
      bins.rows.push_back({std::to_string(b.lo), b.hi < 0 ? "inf" : std::to_string(b.hi),
                           std::to_string(b.count)});
    }
    CsvTable per_filter{{"filter", "concepts"}, {}};
    for (std::size_t k = 0; k < h.per_filter.size(); ++k) {
      per_filter.rows.push_back({std::to_string(k), std::to_string(h.per_filter[k])});
    }
    WriteCsv(report / "filter_sharing.csv", bins);
    WriteCsv(report / "filter_sharing_per_filter.csv", per_filter);
  }
  if (!any) {
    throw Error(ErrorCode::kDanglingReference, Out(c).string(),
                "nothing to report; run dissect, eval-seg, eval-cls or topf first");
  }
  WriteCsv(report / "category_aggregates.csv", aggregates);
  WriteCsv(report / "combo_vs_single.csv", combos);
  WriteCsv(report / "failures.csv", failures);
  WriteCsv(report / "f_sweep.csv", sweep);
  std::cout << "report: written to " << report.string() << "\n";
}

}  // namespace conceptvec::cli
