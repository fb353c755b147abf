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

#ifndef CONCEPTVEC_MASK_H_
#define CONCEPTVEC_MASK_H_

#include <cstdint>
#include <span>
#include <vector>

namespace conceptvec {

/// Row-major binary raster, one byte per pixel holding 0 or 1.
struct BinaryMask {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> bits;

  BinaryMask() = default;
  BinaryMask(int h, int w);
  BinaryMask(int h, int w, std::vector<std::uint8_t> values);

  std::size_t size() const { return bits.size(); }
  std::uint8_t at(int y, int x) const { return bits[static_cast<std::size_t>(y) * width + x]; }
  std::uint64_t count() const;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;
};

/// Sampling plan for one axis of an align-corners bilinear resize: output
/// index i reads input coordinate i * (in - 1) / (out - 1). A length-1 input
/// is replicated; a length-1 output samples coordinate 0.
struct AxisPlan {
  std::vector<int> lo;
  std::vector<int> hi;
  std::vector<double> frac;

  AxisPlan(int in, int out);
};

/// Bilinear resize of a real-valued field (align-corners convention).
std::vector<double> ResizeBilinear(std::span<const double> field, int in_h,
                                   int in_w, int out_h, int out_w);

/// Bilinearly resizes a {0,1} field and re-binarizes with value > 0.5.
/// Identity when the shape is unchanged.
BinaryMask ResizeBinary(const BinaryMask& mask, int out_h, int out_w);

}  // namespace conceptvec

#endif  // CONCEPTVEC_MASK_H_
