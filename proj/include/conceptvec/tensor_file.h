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

#ifndef CONCEPTVEC_TENSOR_FILE_H_
#define CONCEPTVEC_TENSOR_FILE_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace conceptvec {

// On-disk layout, all integers little-endian:
//
//   "N2VT" | version u32 (=1) | dtype u32 (1=f32, 2=u8) | ndim u32 |
//   ndim x u64 dims | row-major payload
//
// No padding, no footer.
inline constexpr char kTensorMagic[4] = {'N', '2', 'V', 'T'};
inline constexpr std::uint32_t kTensorFormatVersion = 1;

enum class DType : std::uint32_t { kF32 = 1, kU8 = 2 };

std::size_t DTypeSize(DType dtype);

/// A typed n-dimensional array held as its raw little-endian payload.
struct TensorFile {
  DType dtype = DType::kF32;
  std::vector<std::uint64_t> shape;
  std::vector<std::uint8_t> data;

  std::uint64_t element_count() const;

  static TensorFile FromF32(std::vector<std::uint64_t> shape,
                            std::span<const float> values);
  static TensorFile FromU8(std::vector<std::uint64_t> shape,
                           std::span<const std::uint8_t> values);

  /// Decodes the payload; the dtype must match.
  std::vector<float> ToF32() const;
  std::vector<std::uint8_t> ToU8() const;

  /// Throws kInvalidShape / kShapeMismatch if the invariants do not hold.
  void Validate() const;

  friend bool operator==(const TensorFile&, const TensorFile&) = default;
};

std::vector<std::uint8_t> EncodeTensor(const TensorFile& tensor);

/// `source` names the origin in error messages.
TensorFile DecodeTensor(std::span<const std::uint8_t> bytes,
                        const std::string& source = "<memory>");

TensorFile read_tensor(const std::filesystem::path& path);
void write_tensor(const TensorFile& tensor, const std::filesystem::path& path);

}  // namespace conceptvec

#endif  // CONCEPTVEC_TENSOR_FILE_H_
