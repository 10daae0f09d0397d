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

#include "structprobe/embedding_store.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "structprobe/error.hpp"

namespace structprobe {
namespace {

constexpr std::array<char, 4> kMagic = {'S', 'P', 'E', 'B'};

class LeWriter {
 public:
  explicit LeWriter(std::ostream& out) : out_(out) {}

  void bytes(const void* data, std::size_t len) {
    out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(len));
    if (!out_) throw Error(ErrorKind::io, "write failed");
    count_ += len;
  }
  template <typename UInt>
  void uint(UInt v) {
    std::array<unsigned char, sizeof(UInt)> buf;
    for (std::size_t i = 0; i < sizeof(UInt); ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(buf.data(), buf.size());
  }
  void f32(float v) { uint(std::bit_cast<std::uint32_t>(v)); }

  std::size_t count() const { return count_; }

 private:
  std::ostream& out_;
  std::size_t count_ = 0;
};

class LeReader {
 public:
  explicit LeReader(std::istream& in) : in_(in) {}

  void bytes(void* data, std::size_t len, const char* what) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(len));
    if (static_cast<std::size_t>(in_.gcount()) != len) {
      throw Error(ErrorKind::truncated, std::string("truncated SPEB stream while reading ") + what);
    }
  }
  template <typename UInt>
  UInt uint(const char* what) {
    std::array<unsigned char, sizeof(UInt)> buf;
    bytes(buf.data(), buf.size(), what);
    UInt v = 0;
    for (std::size_t i = 0; i < sizeof(UInt); ++i) v |= static_cast<UInt>(buf[i]) << (8 * i);
    return v;
  }
  bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

 private:
  std::istream& in_;
};

}  // namespace

EmbeddingSet::EmbeddingSet(std::string model_name, int layer, int dim)
    : model_name_(std::move(model_name)), layer_(layer), dim_(dim) {
  if (dim <= 0) throw Error(ErrorKind::invalid_argument, "embedding dim must be positive");
}

void EmbeddingSet::add(std::string key, EmbeddingMatrix matrix) {
  if (matrix.cols() != dim_) {
    throw Error(ErrorKind::dimension_mismatch, "record '" + key + "' has " + std::to_string(matrix.cols()) +
                                                   " columns, store dim is " + std::to_string(dim_));
  }
  if (!matrix.allFinite()) throw Error(ErrorKind::non_finite, "record '" + key + "' contains NaN or Inf");
  if (key.size() > 0xFFFF) throw Error(ErrorKind::invalid_argument, "record key longer than 65535 bytes");
  if (index_.contains(key)) throw Error(ErrorKind::duplicate_key, "duplicate embedding key '" + key + "'");
  index_.emplace(key, records_.size());
  records_.push_back(EmbeddingRecord{std::move(key), std::move(matrix)});
}

const EmbeddingMatrix* EmbeddingSet::find(std::string_view key) const {
  const auto it = index_.find(std::string(key));
  return it == index_.end() ? nullptr : &records_[it->second].matrix;
}

const EmbeddingMatrix& EmbeddingSet::at(std::string_view key) const {
  if (const auto* m = find(key)) return *m;
  throw Error(ErrorKind::missing_input, "no embedding for key '" + std::string(key) + "'");
}

std::size_t write_store(const EmbeddingSet& set, std::ostream& sink) {
  LeWriter w(sink);
  w.bytes(kMagic.data(), kMagic.size());
  w.uint<std::uint32_t>(kSpebVersion);
  const nlohmann::json header = {
      {"model_name", set.model_name()}, {"layer", set.layer()}, {"dim", set.dim()}, {"count", set.size()}};
  const auto header_text = header.dump();
  w.uint<std::uint32_t>(static_cast<std::uint32_t>(header_text.size()));
  w.bytes(header_text.data(), header_text.size());
  for (const auto& rec : set.records()) {
    w.uint<std::uint16_t>(static_cast<std::uint16_t>(rec.key.size()));
    w.bytes(rec.key.data(), rec.key.size());
    w.uint<std::uint32_t>(static_cast<std::uint32_t>(rec.matrix.rows()));
    const float* data = rec.matrix.data();
    for (Eigen::Index i = 0; i < rec.matrix.size(); ++i) w.f32(data[i]);
  }
  return w.count();
}

EmbeddingSet read_store(std::istream& source) {
  LeReader r(source);
  std::array<char, 4> magic{};
  r.bytes(magic.data(), magic.size(), "magic");
  if (magic != kMagic) throw Error(ErrorKind::bad_magic, "not an SPEB stream (bad magic)");
  const auto version = r.uint<std::uint32_t>("version");
  if (version != kSpebVersion) {
    throw Error(ErrorKind::version_mismatch, "unsupported SPEB version " + std::to_string(version));
  }
  const auto header_len = r.uint<std::uint32_t>("header length");
  std::string header_text(header_len, '\0');
  r.bytes(header_text.data(), header_len, "header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, std::string("malformed SPEB header: ") + e.what());
  }
  std::string model_name;
  int layer = 0, dim = 0;
  std::uint64_t count = 0;
  try {
    model_name = header.at("model_name").get<std::string>();
    layer = header.at("layer").get<int>();
    dim = header.at("dim").get<int>();
    count = header.at("count").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, std::string("incomplete SPEB header: ") + e.what());
  }
  EmbeddingSet set(std::move(model_name), layer, dim);

  for (std::uint64_t rec = 0; rec < count; ++rec) {
    const auto key_len = r.uint<std::uint16_t>("key length");
    std::string key(key_len, '\0');
    r.bytes(key.data(), key_len, "key");
    const auto rows = r.uint<std::uint32_t>("row count");
    // Read row by row so a corrupted row count fails as truncation instead of
    // attempting one huge allocation.
    std::vector<float> values;
    std::vector<unsigned char> raw(static_cast<std::size_t>(dim) * 4);
    for (std::uint32_t row = 0; row < rows; ++row) {
      r.bytes(raw.data(), raw.size(), "matrix payload");
      for (int c = 0; c < dim; ++c) {
        const auto* p = &raw[4 * static_cast<std::size_t>(c)];
        const std::uint32_t bits = static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
                                   static_cast<std::uint32_t>(p[2]) << 16 |
                                   static_cast<std::uint32_t>(p[3]) << 24;
        const float v = std::bit_cast<float>(bits);
        if (!std::isfinite(v)) throw Error(ErrorKind::non_finite, "record '" + key + "' contains NaN or Inf");
        values.push_back(v);
      }
    }
    set.add(std::move(key), Eigen::Map<const EmbeddingMatrix>(values.data(), rows, dim));
  }
  if (!r.at_end()) throw Error(ErrorKind::parse, "trailing bytes after last SPEB record");
  return set;
}

std::size_t write_store_file(const EmbeddingSet& set, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot open " + path.string() + " for writing");
  return write_store(set, out);
}

EmbeddingSet read_store_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::missing_input, "cannot open SPEB file " + path.string());
  return read_store(in);
}

AlignmentReport validate_alignment(const EmbeddingSet& set, std::span<const DepStructure> structures) {
  AlignmentReport report;
  for (const auto& s : structures) {
    const auto* m = set.find(s.sentence_id);
    if (m == nullptr) {
      report.missing.push_back(s.sentence_id);
    } else if (static_cast<std::size_t>(m->rows()) != s.size()) {
      report.mismatches.push_back({s.sentence_id, s.size(), static_cast<std::size_t>(m->rows())});
    } else {
      report.matched.push_back(s.sentence_id);
    }
  }
  return report;
}

nlohmann::json to_json(const AlignmentReport& report) {
  auto mismatches = nlohmann::json::array();
  for (const auto& m : report.mismatches) {
    mismatches.push_back({{"key", m.key}, {"tokens", m.tokens}, {"rows", m.rows}});
  }
  return {{"clean", report.clean()},
          {"matched", report.matched.size()},
          {"missing", report.missing},
          {"mismatches", mismatches}};
}

}  // namespace structprobe
