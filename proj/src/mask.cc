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

#include "conceptvec/mask.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "conceptvec/error.h"

namespace conceptvec {

BinaryMask::BinaryMask(int h, int w) : height(h), width(w) {
  if (h < 1 || w < 1) {
    throw Error(ErrorCode::kInvalidShape, "mask",
                std::to_string(h) + "x" + std::to_string(w));
  }
  bits.assign(static_cast<std::size_t>(h) * w, 0);
}

BinaryMask::BinaryMask(int h, int w, std::vector<std::uint8_t> values)
    : BinaryMask(h, w) {
  if (values.size() != bits.size()) {
    throw Error(ErrorCode::kShapeMismatch, "mask",
                "expected " + std::to_string(bits.size()) + " values, got " +
                    std::to_string(values.size()));
  }
  for (std::uint8_t v : values) {
    if (v > 1) throw Error(ErrorCode::kSchema, "mask", "values must be 0 or 1");
  }
  bits = std::move(values);
}

std::uint64_t BinaryMask::count() const {
  return std::accumulate(bits.begin(), bits.end(), std::uint64_t{0});
}

AxisPlan::AxisPlan(int in, int out) : lo(out), hi(out), frac(out) {
  for (int i = 0; i < out; ++i) {
    if (in == 1 || out == 1) {
      lo[i] = hi[i] = 0;
      frac[i] = 0.0;
      continue;
    }
    // Exact rational i*(in-1)/(out-1): integer part and remainder.
    const long long num = static_cast<long long>(i) * (in - 1);
    const long long den = out - 1;
    const long long base = num / den;
    lo[i] = static_cast<int>(base);
    hi[i] = static_cast<int>(std::min<long long>(base + 1, in - 1));
    frac[i] = static_cast<double>(num - base * den) / static_cast<double>(den);
  }
}

std::vector<double> ResizeBilinear(std::span<const double> field, int in_h,
                                   int in_w, int out_h, int out_w) {
  if (in_h < 1 || in_w < 1 || out_h < 1 || out_w < 1) {
    throw Error(ErrorCode::kInvalidShape, "resize", "dimensions must be >= 1");
  }
  if (field.size() != static_cast<std::size_t>(in_h) * in_w) {
    throw Error(ErrorCode::kShapeMismatch, "resize", "field size mismatch");
  }
  if (in_h == out_h && in_w == out_w) {
    return {field.begin(), field.end()};
  }
  const AxisPlan ys(in_h, out_h);
  const AxisPlan xs(in_w, out_w);
  std::vector<double> out(static_cast<std::size_t>(out_h) * out_w);
  for (int y = 0; y < out_h; ++y) {
    const double ty = ys.frac[y];
    const double* r0 = field.data() + static_cast<std::size_t>(ys.lo[y]) * in_w;
    const double* r1 = field.data() + static_cast<std::size_t>(ys.hi[y]) * in_w;
    for (int x = 0; x < out_w; ++x) {
      const double tx = xs.frac[x];
      const double top = (1.0 - tx) * r0[xs.lo[x]] + tx * r0[xs.hi[x]];
      const double bottom = (1.0 - tx) * r1[xs.lo[x]] + tx * r1[xs.hi[x]];
      out[static_cast<std::size_t>(y) * out_w + x] = (1.0 - ty) * top + ty * bottom;
    }
  }
  return out;
}

BinaryMask ResizeBinary(const BinaryMask& mask, int out_h, int out_w) {
  if (out_h < 1 || out_w < 1) {
    throw Error(ErrorCode::kInvalidShape, "resize",
                "output " + std::to_string(out_h) + "x" + std::to_string(out_w));
  }
  if (mask.height == out_h && mask.width == out_w) return mask;
  std::vector<double> field(mask.bits.begin(), mask.bits.end());
  const std::vector<double> up =
      ResizeBilinear(field, mask.height, mask.width, out_h, out_w);
  BinaryMask out(out_h, out_w);
  for (std::size_t i = 0; i < up.size(); ++i) out.bits[i] = up[i] > 0.5 ? 1 : 0;
  return out;
}

}  // namespace conceptvec
