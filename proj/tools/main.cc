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

// conceptvec: command-line entry point.
//
// Exit codes: 0 success, 2 unknown subcommand, 3 config or usage error,
// 4 data error. Errors are also printed to stderr as one JSON line.

#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <tuple>
#include <utility>

#include "CLI11.hpp"
#include "commands.h"
#include "conceptvec/config.h"
#include "conceptvec/dataset.h"
#include "conceptvec/error.h"
#include "conceptvec/synth.h"
#include "json.hpp"

namespace {

using conceptvec::Error;
using conceptvec::RunConfig;
namespace cli = conceptvec::cli;

constexpr int kExitUnknownCommand = 2;
constexpr int kExitConfig = 3;
constexpr int kExitData = 4;

void PrintError(const std::string& kind, const std::string& subject, const std::string& message) {
  nlohmann::json j = {{"error", kind}, {"subject", subject}, {"message", message}};
  std::cerr << j.dump() << "\n";
}

// Flags shared by the pipeline commands. They override the config file.
struct CommonFlags {
  std::string config;
  std::string dataset, layer, out, task, threshold_scope, resolution;
  double tau = 0, lr = 0, momentum = 0;
  int batch = 0, epochs = 0, threads = 0;
  std::uint64_t seed = 0;
  std::map<std::string, CLI::Option*> opts;

  void Attach(CLI::App* sub) {
    opts["config"] = sub->add_option("--config", config, "Run config JSON (required)");
    opts["dataset"] = sub->add_option("--dataset", dataset, "Dataset manifest");
    opts["layer"] = sub->add_option("--layer", layer, "Layer name");
    opts["out"] = sub->add_option("--out", out, "Output directory");
    opts["task"] = sub->add_option("--task", task, "seg or cls");
    opts["tau"] = sub->add_option("--tau", tau, "Exceedance fraction");
    opts["threshold_scope"] =
        sub->add_option("--threshold-scope", threshold_scope, "all or train");
    opts["resolution"] =
        sub->add_option("--eval-resolution", resolution, "ground_truth or activation");
    opts["lr"] = sub->add_option("--lr", lr, "Learning rate");
    opts["momentum"] = sub->add_option("--momentum", momentum, "SGD momentum");
    opts["batch"] = sub->add_option("--batch", batch, "Batch size");
    opts["epochs"] = sub->add_option("--epochs", epochs, "Epochs");
    opts["seed"] = sub->add_option("--seed", seed, "Training seed");
    opts["threads"] = sub->add_option("--threads", threads, "Worker threads (results unaffected)");
  }

  bool Set(const std::string& name) const { return opts.at(name)->count() > 0; }

  RunConfig Resolve() const {
    RunConfig c = conceptvec::LoadRunConfig(config);
    nlohmann::json over = nlohmann::json::object();
    if (Set("dataset")) over["dataset"] = dataset;
    if (Set("layer")) over["layer"] = layer;
    if (Set("out")) over["out"] = out;
    if (Set("task")) over["task"] = task;
    if (Set("tau")) over["tau"] = tau;
    if (Set("threshold_scope")) over["threshold_scope"] = threshold_scope;
    if (Set("resolution")) over["eval_resolution"] = resolution;
    if (Set("seed")) over["seed"] = seed;
    if (Set("threads")) over["threads"] = threads;
    nlohmann::json training = nlohmann::json::object();
    if (Set("lr")) training["lr"] = lr;
    if (Set("momentum")) training["momentum"] = momentum;
    if (Set("batch")) training["batch"] = batch;
    if (Set("epochs")) training["epochs"] = epochs;
    if (!training.empty()) over["training"] = training;
    return conceptvec::ParseRunConfig(over, c);
  }
};

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

void Dispatch(const std::string& name, const RunConfig& config, const cli::Args& args) {
  const std::map<std::string, std::function<void()>> run = {
      {"thresholds", [&] { cli::RunThresholds(config); }},
      {"dissect", [&] { cli::RunDissect(config); }},
      {"train-seg", [&] { cli::RunTrainSeg(config, args); }},
      {"eval-seg", [&] { cli::RunEvalSeg(config, args); }},
      {"train-cls", [&] { cli::RunTrainCls(config, args); }},
      {"eval-cls", [&] { cli::RunEvalCls(config, args); }},
      {"topf", [&] { cli::RunTopF(config, args); }},
      {"embed-nn", [&] { cli::RunEmbedNearest(config, args); }},
      {"embed-arith", [&] { cli::RunEmbedArithmetic(config, args); }},
      {"embed-dist", [&] { cli::RunEmbedDistance(config, args); }},
      {"correlate", [&] { cli::RunCorrelate(config, args); }},
      {"deciles", [&] { cli::RunDeciles(config, args); }},
      {"report", [&] { cli::RunReport(config); }},
  };
  const auto it = run.find(name);
  if (it == run.end()) throw Error(conceptvec::ErrorCode::kSchema, name, "not a pipeline command");
  cli::WriteEcho(name, config, args);
  it->second();
}

// Reads a run_<cmd>.config.json echo back into a command, config and args.
std::pair<std::string, RunConfig> LoadEcho(const std::string& path, cli::Args* args) {
  std::ifstream in(path);
  if (!in) throw Error(conceptvec::ErrorCode::kSchema, path, "cannot open echo");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(conceptvec::ErrorCode::kSchema, path, e.what());
  }
  if (!j.is_object() || !j.contains("run") || !j["run"].contains("command") ||
      !j["run"].contains("args")) {
    throw Error(conceptvec::ErrorCode::kSchema, path, "not a config echo");
  }
  const std::string command = j["run"]["command"].get<std::string>();
  *args = cli::Args::FromJson(j["run"]["args"]);
  return {command, conceptvec::ParseRunConfig(j)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conceptvec: concept embeddings from filter activations"};
  app.require_subcommand(1);

  // synth
  std::string synth_spec, synth_suite, synth_out;
  std::uint64_t synth_seed = 0;
  CLI::App* synth = app.add_subcommand("synth", "Generate a planted synthetic dataset");
  synth->add_option("--spec", synth_spec, "Plant spec JSON");
  synth->add_option("--suite", synth_suite, "Built-in suite: default, topf, shared");
  synth->add_option("--seed", synth_seed, "Seed for a built-in suite");
  synth->add_option("--out", synth_out, "Output directory")->required();

  // validate
  std::string manifest;
  CLI::App* validate = app.add_subcommand("validate", "Validate a dataset manifest");
  validate->add_option("manifest", manifest, "manifest.json")->required();

  // rerun
  std::string echo_path, rerun_out;
  int rerun_threads = 0;
  CLI::App* rerun = app.add_subcommand("rerun", "Replay a pipeline command from its config echo");
  rerun->add_option("echo", echo_path, "run_<command>.config.json")->required();
  CLI::Option* rerun_out_opt = rerun->add_option("--out", rerun_out, "Output directory");
  CLI::Option* rerun_threads_opt =
      rerun->add_option("--threads", rerun_threads, "Worker threads (results unaffected)");

  struct Pipeline {
    CLI::App* app;
    CommonFlags flags;
    cli::Args args;
    std::string plus, minus;
  };
  std::map<std::string, Pipeline> pipelines;
  auto add = [&](const std::string& name, const std::string& help) -> Pipeline& {
    Pipeline& p = pipelines[name];
    p.app = app.add_subcommand(name, help);
    p.flags.Attach(p.app);
    return p;
  };
  auto selection = [](Pipeline& p) {
    p.app->add_option("--concept", p.args.concept_id, "One concept id");
    p.app->add_flag("--all", p.args.all, "Every eligible concept");
  };
  add("thresholds", "Per-filter activation thresholds");
  add("dissect", "Best single filter per concept");
  selection(add("train-seg", "Train segmentation concept weights"));
  selection(add("eval-seg", "Evaluate segmentation weights on val"));
  selection(add("train-cls", "Train classification concept weights"));
  selection(add("eval-cls", "Evaluate classification weights on val"));
  selection(add("topf", "Retrain on the top-F filters for each F in the sweep"));
  selection(add("deciles", "Decile example selection and mask export"));
  {
    Pipeline& p = add("correlate", "Correlate weights with single-filter IoU");
    selection(p);
    p.app->add_option("--permutations", p.args.permutations, "Permutation count");
    p.app->add_option("--permutation-seed", p.args.permutation_seed, "Permutation seed");
  }
  {
    Pipeline& p = add("embed-nn", "Nearest concepts in an embedding space");
    p.app->add_option("--concept", p.args.concept_id, "Query concept")->required();
    p.app->add_option("--n", p.args.n, "Number of neighbors");
    p.app->add_option("--space", p.args.space, "Space file (default: from config)");
  }
  {
    Pipeline& p = add("embed-arith", "Vector arithmetic over concepts");
    p.app->add_option("--plus", p.plus, "Comma-separated concepts to add");
    p.app->add_option("--minus", p.minus, "Comma-separated concepts to subtract");
    p.app->add_option("--n", p.args.n, "Number of results");
    p.app->add_option("--space", p.args.space, "Space file (default: from config)");
  }
  {
    Pipeline& p = add("embed-dist", "Distance between two embedding spaces");
    p.app->add_option("--a", p.args.space_a, "First space file")->required();
    p.app->add_option("--b", p.args.space_b, "Second space file")->required();
  }
  add("report", "Aggregate tables from earlier outputs");

  // Unknown subcommands get their own exit code.
  if (argc >= 2 && argv[1][0] != '-') {
    const std::string name = argv[1];
    if (name != "synth" && name != "validate" && name != "rerun" && !pipelines.count(name)) {
      PrintError("unknown_subcommand", name, "unknown subcommand");
      std::cerr << app.help();
      return kExitUnknownCommand;
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    PrintError("usage", e.get_name(), e.what());
    std::cerr << app.help();
    return kExitConfig;
  }

  try {
    if (synth->parsed()) {
      conceptvec::PlantSpec spec;
      if (!synth_spec.empty() == !synth_suite.empty()) {
        PrintError("usage", "synth", "pass exactly one of --spec or --suite");
        std::cerr << synth->help();
        return kExitConfig;
      }
      try {
        if (!synth_spec.empty()) {
          std::ifstream in(synth_spec);
          if (!in) throw Error(conceptvec::ErrorCode::kSchema, synth_spec, "cannot open spec");
          nlohmann::json j;
          try {
            in >> j;
          } catch (const nlohmann::json::exception& e) {
            throw Error(conceptvec::ErrorCode::kSchema, synth_spec, e.what());
          }
          spec = conceptvec::PlantSpecFromJson(j);
        } else if (synth_suite == "default") {
          spec = conceptvec::DefaultSuite(synth_seed);
        } else if (synth_suite == "topf") {
          spec = conceptvec::TopFSuite(synth_seed);
        } else if (synth_suite == "shared") {
          spec = conceptvec::SharedFilterSuite(synth_seed);
        } else {
          throw Error(conceptvec::ErrorCode::kInvalidArgument, synth_suite, "unknown suite");
        }
      } catch (const Error& e) {
        PrintError(std::string(conceptvec::ErrorCodeName(e.code())), e.subject(), e.what());
        return kExitConfig;
      }
      const auto path = conceptvec::generate(spec, synth_out);
      std::cout << path.string() << "\n";
      return 0;
    }
    if (validate->parsed()) {
      const auto ds = conceptvec::load_dataset(manifest);
      for (const auto& w : ds.warnings()) std::cerr << "warning: " << w << "\n";
      std::cout << "ok: " << ds.images().size() << " images, " << ds.concepts().size()
                << " concepts, " << ds.layers().size() << " layers\n";
      return 0;
    }

    if (rerun->parsed()) {
      cli::Args args;
      std::string command;
      RunConfig config;
      try {
        std::tie(command, config) = LoadEcho(echo_path, &args);
        nlohmann::json over = nlohmann::json::object();
        if (rerun_out_opt->count()) over["out"] = rerun_out;
        if (rerun_threads_opt->count()) over["threads"] = rerun_threads;
        config = conceptvec::ParseRunConfig(over, config);
      } catch (const Error& e) {
        PrintError(std::string(conceptvec::ErrorCodeName(e.code())), e.subject(), e.what());
        return kExitConfig;
      }
      Dispatch(command, config, args);
      return 0;
    }

    for (auto& [name, p] : pipelines) {
      if (!p.app->parsed()) continue;
      if (!p.flags.Set("config")) {
        PrintError("usage", "--config", "missing --config");
        std::cerr << p.app->help();
        return kExitConfig;
      }
      RunConfig config;
      try {
        config = p.flags.Resolve();
      } catch (const Error& e) {
        PrintError(std::string(conceptvec::ErrorCodeName(e.code())), e.subject(), e.what());
        return kExitConfig;
      }
      p.args.plus = SplitList(p.plus);
      p.args.minus = SplitList(p.minus);
      Dispatch(name, config, p.args);
      return 0;
    }
  } catch (const Error& e) {
    PrintError(std::string(conceptvec::ErrorCodeName(e.code())), e.subject(), e.what());
    return e.is_data_error() ? kExitData : kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    PrintError("io", e.path1().string(), e.what());
    return kExitData;
  }
  return kExitConfig;
}
