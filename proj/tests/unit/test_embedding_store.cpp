// Copyright 2026 The structprobe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstring>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "structprobe/embedding_store.hpp"
#include "structprobe/error.hpp"
#include "structprobe/random.hpp"

namespace sp = structprobe;

namespace {

std::string bytes_of(const sp::EmbeddingSet& set) {
  std::ostringstream out;
  sp::write_store(set, out);
  return out.str();
}

sp::EmbeddingSet from_bytes(const std::string& bytes) {
  std::istringstream in(bytes);
  return sp::read_store(in);
}

sp::ErrorKind read_error(const std::string& bytes) {
  try {
    from_bytes(bytes);
  } catch (const sp::Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "read unexpectedly succeeded";
  return sp::ErrorKind::invalid_argument;
}

sp::EmbeddingSet random_set(sp::Rng& rng, int sentences, int dim) {
  sp::EmbeddingSet set("m", 3, dim);
  for (int s = 0; s < sentences; ++s) {
    sp::EmbeddingMatrix mat(1 + rng.below(12), dim);
    for (Eigen::Index i = 0; i < mat.size(); ++i) mat.data()[i] = static_cast<float>(rng.normal() * 10.0);
    set.add("s" + std::to_string(s), mat);
  }
  return set;
}

constexpr std::size_t kPreamble = 12;  // magic + version + header length

}  // namespace

TEST(EmbeddingStore, EmptySetIsHeaderOnly) {
  const sp::EmbeddingSet set("m", 0, 4);
  const auto bytes = bytes_of(set);
  EXPECT_EQ(bytes.substr(0, 4), "SPEB");
  const auto header = bytes.substr(kPreamble);
  EXPECT_EQ(nlohmann::json::parse(header).at("count"), 0);
  EXPECT_EQ(from_bytes(bytes), set);
}

TEST(EmbeddingStore, ZeroMatrixPayloadIs24Bytes) {
  sp::EmbeddingSet empty("m", 0, 3);
  sp::EmbeddingSet set("m", 0, 3);
  set.add("s0", sp::EmbeddingMatrix::Zero(2, 3));
  const auto full = bytes_of(set);
  // Headers "count":0 and "count":1 have equal width; the record header is
  // u16 key length + "s0" + u32 row count.
  EXPECT_EQ(full.size() - bytes_of(empty).size() - (2 + 2 + 4), 24u);
  EXPECT_EQ(full.substr(full.size() - 24), std::string(24, '\0'));
}

TEST(EmbeddingStore, LittleEndianLayout) {
  sp::EmbeddingSet set("m", 0, 1);
  set.add("k", (sp::EmbeddingMatrix(1, 1) << 1.0f).finished());
  const auto b = bytes_of(set);
  EXPECT_EQ(static_cast<unsigned char>(b[4]), 1u);  // version low byte
  EXPECT_EQ(b.substr(b.size() - 4), std::string("\x00\x00\x80\x3f", 4));
}

TEST(EmbeddingStore, RoundTripHundredRandomSentences) {
  sp::Rng rng(21);
  const auto set = random_set(rng, 100, 7);
  const auto back = from_bytes(bytes_of(set));
  ASSERT_EQ(back, set);
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& a = set.records()[i].matrix;
    const auto& b = back.records()[i].matrix;
    EXPECT_EQ(std::memcmp(a.data(), b.data(), sizeof(float) * a.size()), 0);
  }
  EXPECT_EQ(back.model_name(), "m");
  EXPECT_EQ(back.layer(), 3);
}

TEST(EmbeddingStore, DeterministicBytes) {
  sp::Rng a(4), b(4);
  EXPECT_EQ(bytes_of(random_set(a, 10, 3)), bytes_of(random_set(b, 10, 3)));
}

TEST(EmbeddingStore, DistinctReadErrors) {
  sp::EmbeddingSet set("m", 0, 2);
  set.add("s", sp::EmbeddingMatrix::Ones(2, 2));
  const auto good = bytes_of(set);

  auto bad_magic = good;
  bad_magic[0] = 'X';
  EXPECT_EQ(read_error(bad_magic), sp::ErrorKind::bad_magic);

  auto bad_version = good;
  bad_version[4] = 2;
  EXPECT_EQ(read_error(bad_version), sp::ErrorKind::version_mismatch);

  EXPECT_EQ(read_error(good.substr(0, good.size() - 1)), sp::ErrorKind::truncated);
  EXPECT_EQ(read_error(good.substr(0, 6)), sp::ErrorKind::truncated);

  auto nan = good;
  const std::uint32_t bits = 0x7fc00000u;
  std::memcpy(&nan[nan.size() - 4], &bits, 4);
  EXPECT_EQ(read_error(nan), sp::ErrorKind::non_finite);

  EXPECT_EQ(read_error(good + "x"), sp::ErrorKind::parse);
}

TEST(EmbeddingStore, AddValidatesInvariants) {
  sp::EmbeddingSet set("m", 0, 2);
  set.add("a", sp::EmbeddingMatrix::Zero(1, 2));
  auto kind = [&](auto&& fn) {
    try {
      fn();
    } catch (const sp::Error& e) {
      return e.kind();
    }
    return sp::ErrorKind::invalid_argument;
  };
  EXPECT_EQ(kind([&] { set.add("a", sp::EmbeddingMatrix::Zero(1, 2)); }), sp::ErrorKind::duplicate_key);
  EXPECT_EQ(kind([&] { set.add("b", sp::EmbeddingMatrix::Zero(1, 3)); }), sp::ErrorKind::dimension_mismatch);
  sp::EmbeddingMatrix inf = sp::EmbeddingMatrix::Zero(1, 2);
  inf(0, 1) = std::numeric_limits<float>::infinity();
  EXPECT_EQ(kind([&] { set.add("c", inf); }), sp::ErrorKind::non_finite);
  EXPECT_EQ(set.size(), 1u);
}

TEST(EmbeddingStoreProperty, SingleByteFlipIsDetectedOrVisible) {
  sp::Rng rng(99);
  const auto set = random_set(rng, 5, 3);
  const auto good = bytes_of(set);
  const std::size_t header_len = static_cast<unsigned char>(good[8]) | static_cast<unsigned char>(good[9]) << 8;
  for (std::size_t pos = kPreamble + header_len; pos < good.size(); ++pos) {
    for (unsigned char mask : {0x01, 0x80, 0xff}) {
      auto flipped = good;
      flipped[pos] = static_cast<char>(flipped[pos] ^ mask);
      try {
        const auto back = from_bytes(flipped);
        ASSERT_FALSE(back == set) << "byte " << pos << " flip went unnoticed";
      } catch (const sp::Error& e) {
        SUCCEED();
      }
    }
  }
}

TEST(Alignment, MatchedMismatchedMissing) {
  std::vector<sp::DepStructure> parses(3);
  for (int i = 0; i < 3; ++i) {
    parses[i].sentence_id = "p" + std::to_string(i);
    parses[i].tokens.resize(3);
  }
  sp::EmbeddingSet set("m", 0, 2);
  set.add("p0", sp::EmbeddingMatrix::Zero(3, 2));
  set.add("p1", sp::EmbeddingMatrix::Zero(4, 2));
  const auto report = sp::validate_alignment(set, parses);
  EXPECT_EQ(report.matched, std::vector<std::string>{"p0"});
  ASSERT_EQ(report.mismatches.size(), 1u);
  EXPECT_EQ(report.mismatches[0].key, "p1");
  EXPECT_EQ(report.mismatches[0].tokens, 3u);
  EXPECT_EQ(report.mismatches[0].rows, 4u);
  EXPECT_EQ(report.missing, std::vector<std::string>{"p2"});
  EXPECT_FALSE(report.clean());
  EXPECT_EQ(sp::to_json(report).at("clean"), false);
}
