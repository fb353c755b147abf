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

#ifndef CONCEPTVEC_CSV_H_
#define CONCEPTVEC_CSV_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace conceptvec {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws kSchema.
  std::size_t column(std::string_view name) const;
};

/// Shortest decimal form that round-trips to the same double.
std::string FormatNumber(double value);

/// Throws kSchema on malformed numbers.
double ParseNumber(std::string_view text);

/// RFC 4180 quoting where needed; "\n" line ends.
void WriteCsv(const std::filesystem::path& path, const CsvTable& table);
CsvTable ReadCsv(const std::filesystem::path& path);

}  // namespace conceptvec

#endif  // CONCEPTVEC_CSV_H_
