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

#include <cstring>

#include <gtest/gtest.h>

#include "conceptvec/error.h"
#include "test_util.h"

namespace conceptvec {
namespace {

using testing::TempDir;

// Independent byte-level writer: little-endian fields appended one by one.
struct ByteWriter {
  std::vector<std::uint8_t> bytes;
  void U32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void U64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void F32(float f) {
    std::uint32_t u;
    std::memcpy(&u, &f, 4);
    U32(u);
  }
  void Header(std::uint32_t dtype, std::vector<std::uint64_t> dims) {
    bytes.insert(bytes.end(), {'N', '2', 'V', 'T'});
    U32(1);
    U32(dtype);
    U32(static_cast<std::uint32_t>(dims.size()));
    for (auto d : dims) U64(d);
  }
};

ErrorCode DecodeError(const std::vector<std::uint8_t>& bytes) {
  try {
    DecodeTensor(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "decode succeeded";
  return ErrorCode::kIo;
}

TEST(TensorFile, ZeroScalarDecodes) {
  ByteWriter w;
  w.Header(1, {1});
  w.U32(0);
  const TensorFile t = DecodeTensor(w.bytes);
  EXPECT_EQ(t.shape, (std::vector<std::uint64_t>{1}));
  EXPECT_EQ(t.ToF32(), std::vector<float>{0.0f});
}

TEST(TensorFile, RowMajorFromReferenceWriter) {
  ByteWriter w;
  w.Header(1, {2, 3});
  for (int i = 0; i < 6; ++i) w.F32(static_cast<float>(i) * 1.5f - 2.0f);
  const TensorFile t = DecodeTensor(w.bytes);
  ASSERT_EQ(t.shape, (std::vector<std::uint64_t>{2, 3}));
  const auto v = t.ToF32();
  for (int i = 0; i < 6; ++i) EXPECT_EQ(v[i], static_cast<float>(i) * 1.5f - 2.0f);
  EXPECT_EQ(EncodeTensor(t), w.bytes);
}

TEST(TensorFile, ShortPayloadIsTruncated) {
  ByteWriter w;
  w.Header(1, {2, 3});
  for (int i = 0; i < 5; ++i) w.F32(1.0f);  // 20 bytes instead of 24
  EXPECT_EQ(DecodeError(w.bytes), ErrorCode::kTruncatedPayload);
}

TEST(TensorFile, ScalarEncodingSize) {
  // 4 magic + 3 * u32 + 1 * u64 dims = 24 header bytes, then 4 payload bytes.
  const float zero = 0.0f;
  const auto bytes = EncodeTensor(TensorFile::FromF32({1}, std::span<const float>(&zero, 1)));
  EXPECT_EQ(bytes.size(), 28u);
}

TEST(TensorFile, EmptyShapeRejected) {
  TensorFile t;
  t.dtype = DType::kF32;
  EXPECT_THROW(t.Validate(), Error);
  ByteWriter w;
  w.Header(1, {});
  EXPECT_EQ(DecodeError(w.bytes), ErrorCode::kInvalidShape);
}

TEST(TensorFile, HeaderErrors) {
  ByteWriter bad_magic;
  bad_magic.bytes = {'N', '2', 'V', 'X'};
  bad_magic.U32(1);
  bad_magic.U32(1);
  bad_magic.U32(1);
  bad_magic.U64(1);
  bad_magic.U32(0);
  EXPECT_EQ(DecodeError(bad_magic.bytes), ErrorCode::kBadMagic);

  ByteWriter version;
  version.bytes = {'N', '2', 'V', 'T'};
  version.U32(2);
  version.U32(1);
  version.U32(1);
  version.U64(1);
  version.U32(0);
  EXPECT_EQ(DecodeError(version.bytes), ErrorCode::kUnsupportedVersion);

  ByteWriter dtype;
  dtype.Header(7, {1});
  dtype.U32(0);
  EXPECT_EQ(DecodeError(dtype.bytes), ErrorCode::kUnsupportedDtype);

  ByteWriter zero_dim;
  zero_dim.Header(1, {2, 0});
  EXPECT_EQ(DecodeError(zero_dim.bytes), ErrorCode::kInvalidShape);

  ByteWriter extra;
  extra.Header(2, {2});
  extra.bytes.insert(extra.bytes.end(), {1, 0, 9});
  EXPECT_EQ(DecodeError(extra.bytes), ErrorCode::kShapeMismatch);

  EXPECT_EQ(DecodeError({'N', '2'}), ErrorCode::kBadMagic);
  EXPECT_EQ(DecodeError({'N', '2', 'V', 'T', 1, 0}), ErrorCode::kTruncatedPayload);
}

TEST(TensorFile, RandomRoundTripThroughDisk) {
  TempDir dir;
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<float> v(64);
    for (auto& x : v) x = static_cast<float>(rng.Gaussian() * 100.0);
    const TensorFile t = TensorFile::FromF32({8, 8}, v);
    const auto path = dir.path() / "sub" / ("t" + std::to_string(trial) + ".n2vt");
    write_tensor(t, path);
    const TensorFile back = read_tensor(path);
    EXPECT_EQ(back, t);
    EXPECT_EQ(testing::ReadBytes(path), EncodeTensor(t));
  }
}

TEST(TensorFile, U8RoundTrip) {
  const std::vector<std::uint8_t> v = {0, 1, 1, 0, 255, 3};
  const TensorFile t = TensorFile::FromU8({3, 2}, v);
  const TensorFile back = DecodeTensor(EncodeTensor(t));
  EXPECT_EQ(back.ToU8(), v);
  EXPECT_THROW(back.ToF32(), Error);
}

TEST(TensorFile, MissingFileIsIoError) {
  try {
    read_tensor("/nonexistent/dir/x.n2vt");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

}  // namespace
}  // namespace conceptvec
