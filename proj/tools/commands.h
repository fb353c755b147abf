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

#ifndef CONCEPTVEC_TOOLS_COMMANDS_H_
#define CONCEPTVEC_TOOLS_COMMANDS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "conceptvec/config.h"
#include "json.hpp"

namespace conceptvec::cli {

/// Subcommand-specific flags; unused fields keep their defaults.
struct Args {
  std::string concept_id;
  bool all = false;
  int n = 5;
  std::string space;
  std::string space_a;
  std::string space_b;
  std::vector<std::string> plus;
  std::vector<std::string> minus;
  int permutations = 10000;
  std::uint64_t permutation_seed = 20180601;

  nlohmann::json ToJson() const;
  static Args FromJson(const nlohmann::json& j);
};

/// Every pipeline command writes `<out>/run_<name>.config.json` first.
void WriteEcho(const std::string& name, const RunConfig& config, const Args& args);

void RunThresholds(const RunConfig& config);
void RunDissect(const RunConfig& config);
void RunTrainSeg(const RunConfig& config, const Args& args);
void RunEvalSeg(const RunConfig& config, const Args& args);
void RunTrainCls(const RunConfig& config, const Args& args);
void RunEvalCls(const RunConfig& config, const Args& args);
void RunTopF(const RunConfig& config, const Args& args);
void RunEmbedNearest(const RunConfig& config, const Args& args);
void RunEmbedArithmetic(const RunConfig& config, const Args& args);
void RunEmbedDistance(const RunConfig& config, const Args& args);
void RunCorrelate(const RunConfig& config, const Args& args);
void RunDeciles(const RunConfig& config, const Args& args);
void RunReport(const RunConfig& config);

}  // namespace conceptvec::cli

#endif  // CONCEPTVEC_TOOLS_COMMANDS_H_
