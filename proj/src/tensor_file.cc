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

#include "conceptvec/tensor_file.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

#include "conceptvec/error.h"

namespace conceptvec {
namespace {

void PutU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void PutU64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t GetLE(const std::uint8_t* p, int bytes) {
  std::uint64_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

// Product of dims, or nullopt-like max() on overflow.
std::uint64_t CheckedProduct(const std::vector<std::uint64_t>& shape) {
  std::uint64_t n = 1;
  for (std::uint64_t d : shape) {
    if (d != 0 && n > std::numeric_limits<std::uint64_t>::max() / d) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    n *= d;
  }
  return n;
}

}  // namespace

std::size_t DTypeSize(DType dtype) {
  switch (dtype) {
    case DType::kF32: return 4;
    case DType::kU8: return 1;
  }
  return 0;
}

std::uint64_t TensorFile::element_count() const { return CheckedProduct(shape); }

TensorFile TensorFile::FromF32(std::vector<std::uint64_t> shape,
                               std::span<const float> values) {
  TensorFile t;
  t.dtype = DType::kF32;
  t.shape = std::move(shape);
  t.data.reserve(values.size() * 4);
  for (float f : values) PutU32(t.data, std::bit_cast<std::uint32_t>(f));
  t.Validate();
  return t;
}

TensorFile TensorFile::FromU8(std::vector<std::uint64_t> shape,
                              std::span<const std::uint8_t> values) {
  TensorFile t;
  t.dtype = DType::kU8;
  t.shape = std::move(shape);
  t.data.assign(values.begin(), values.end());
  t.Validate();
  return t;
}

std::vector<float> TensorFile::ToF32() const {
  if (dtype != DType::kF32) {
    throw Error(ErrorCode::kUnsupportedDtype, "dtype", "tensor is not f32");
  }
  std::vector<float> out(data.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::bit_cast<float>(
        static_cast<std::uint32_t>(GetLE(data.data() + 4 * i, 4)));
  }
  return out;
}

std::vector<std::uint8_t> TensorFile::ToU8() const {
  if (dtype != DType::kU8) {
    throw Error(ErrorCode::kUnsupportedDtype, "dtype", "tensor is not u8");
  }
  return data;
}

void TensorFile::Validate() const {
  if (shape.empty()) {
    throw Error(ErrorCode::kInvalidShape, "ndim", "tensor must have ndim >= 1");
  }
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (shape[i] == 0) {
      throw Error(ErrorCode::kInvalidShape, "shape[" + std::to_string(i) + "]",
                  "dimension must be >= 1");
    }
  }
  const std::uint64_t n = CheckedProduct(shape);
  const std::size_t elem = DTypeSize(dtype);
  if (elem == 0) {
    throw Error(ErrorCode::kUnsupportedDtype, "dtype", "unknown dtype");
  }
  if (n == std::numeric_limits<std::uint64_t>::max() ||
      n * elem != data.size()) {
    throw Error(ErrorCode::kShapeMismatch, "payload",
                "shape implies " + std::to_string(n) + " elements but payload has " +
                    std::to_string(data.size()) + " bytes");
  }
}

std::vector<std::uint8_t> EncodeTensor(const TensorFile& tensor) {
  tensor.Validate();
  std::vector<std::uint8_t> out;
  out.reserve(16 + 8 * tensor.shape.size() + tensor.data.size());
  out.insert(out.end(), std::begin(kTensorMagic), std::end(kTensorMagic));
  PutU32(out, kTensorFormatVersion);
  PutU32(out, static_cast<std::uint32_t>(tensor.dtype));
  PutU32(out, static_cast<std::uint32_t>(tensor.shape.size()));
  for (std::uint64_t d : tensor.shape) PutU64(out, d);
  out.insert(out.end(), tensor.data.begin(), tensor.data.end());
  return out;
}

TensorFile DecodeTensor(std::span<const std::uint8_t> bytes,
                        const std::string& source) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kTensorMagic, 4) != 0) {
    throw Error(ErrorCode::kBadMagic, source + ":magic",
                "file does not start with N2VT");
  }
  if (bytes.size() < 16) {
    throw Error(ErrorCode::kTruncatedPayload, source + ":header",
                "header shorter than 16 bytes");
  }
  const auto version = static_cast<std::uint32_t>(GetLE(bytes.data() + 4, 4));
  if (version != kTensorFormatVersion) {
    throw Error(ErrorCode::kUnsupportedVersion, source + ":version",
                "format version " + std::to_string(version));
  }
  const auto dtype_code = static_cast<std::uint32_t>(GetLE(bytes.data() + 8, 4));
  if (dtype_code != 1 && dtype_code != 2) {
    throw Error(ErrorCode::kUnsupportedDtype, source + ":dtype",
                "dtype code " + std::to_string(dtype_code));
  }
  const auto ndim = static_cast<std::uint32_t>(GetLE(bytes.data() + 12, 4));
  if (ndim == 0) {
    throw Error(ErrorCode::kInvalidShape, source + ":ndim", "ndim must be >= 1");
  }
  const std::size_t header = 16 + 8 * static_cast<std::size_t>(ndim);
  if (bytes.size() < header) {
    throw Error(ErrorCode::kTruncatedPayload, source + ":dims",
                "file ends inside the dimension list");
  }
  TensorFile t;
  t.dtype = static_cast<DType>(dtype_code);
  t.shape.resize(ndim);
  for (std::uint32_t i = 0; i < ndim; ++i) {
    t.shape[i] = GetLE(bytes.data() + 16 + 8 * i, 8);
    if (t.shape[i] == 0) {
      throw Error(ErrorCode::kInvalidShape,
                  source + ":shape[" + std::to_string(i) + "]",
                  "dimension must be >= 1");
    }
  }
  const std::uint64_t n = CheckedProduct(t.shape);
  const std::size_t payload = bytes.size() - header;
  const std::uint64_t expected =
      n == std::numeric_limits<std::uint64_t>::max()
          ? n
          : n * DTypeSize(t.dtype);
  if (payload < expected) {
    throw Error(ErrorCode::kTruncatedPayload, source + ":payload",
                "expected " + std::to_string(expected) + " payload bytes, found " +
                    std::to_string(payload));
  }
  if (payload > expected) {
    throw Error(ErrorCode::kShapeMismatch, source + ":payload",
                "expected " + std::to_string(expected) + " payload bytes, found " +
                    std::to_string(payload));
  }
  t.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(header), bytes.end());
  return t;
}

TensorFile read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, path.string(), "cannot open tensor file");
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return DecodeTensor(bytes, path.string());
}

void write_tensor(const TensorFile& tensor, const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = EncodeTensor(tensor);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw Error(ErrorCode::kIo, path.string(), "write failed");
  }
}

}  // namespace conceptvec
