// Copyright 2026 The mtforge Authors.
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

#include "mtforge/vocab.h"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <limits>

#include "mtforge/io.h"
#include "mtforge/kernels/kernels.h"
#include "mtforge/unicode.h"

namespace mtforge {

VocabMap::VocabMap(std::vector<std::string> tokens) {
  tokens_.reserve(tokens.size());
  for (std::string& t : tokens) {
    std::string normalized = unicode::nfc(t);
    const auto id = static_cast<std::uint32_t>(tokens_.size());
    if (!index_.emplace(normalized, id).second) {
      throw DataError("duplicate token at id " + std::to_string(id));
    }
    tokens_.push_back(std::move(normalized));
  }
}

namespace {

std::string unescape_token(std::string_view line) {
  std::string out;
  out.reserve(line.size());
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '\\' && i + 1 < line.size()) {
      const char next = line[i + 1];
      if (next == 't') { out += '\t'; ++i; continue; }
      if (next == 'n') { out += '\n'; ++i; continue; }
      if (next == '\\') { out += '\\'; ++i; continue; }
    }
    out += line[i];
  }
  return out;
}

std::string escape_token(std::string_view token) {
  std::string out;
  for (char c : token) {
    if (c == '\\') out += "\\\\";
    else if (c == '\t') out += "\\t";
    else if (c == '\n') out += "\\n";
    else out += c;
  }
  return out;
}

}  // namespace

VocabMap VocabMap::parse(std::string_view content) {
  std::vector<std::string> tokens;
  for (const std::string& line : io::split_lines(content)) {
    tokens.push_back(unescape_token(line));
  }
  return VocabMap(std::move(tokens));
}

VocabMap VocabMap::read(const std::string& path) {
  return parse(io::read_file(path));
}

std::string VocabMap::serialize() const {
  std::string out;
  for (const std::string& t : tokens_) {
    out += escape_token(t);
    out += '\n';
  }
  return out;
}

std::optional<std::uint32_t> VocabMap::id(std::string_view token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<double> column_mean(const EmbeddingMatrix& matrix) {
  if (matrix.rows == 0) throw DataError("column mean of an empty matrix");
  const kernels::KernelTable& k = kernels::active();
  std::vector<double> acc(matrix.dim, 0.0);
  for (std::uint32_t r = 0; r < matrix.rows; ++r) {
    k.accumulate_f32(acc.data(), matrix.row(r).data(), matrix.dim);
  }
  for (double& v : acc) v /= static_cast<double>(matrix.rows);
  return acc;
}

EmbeddingMatrix adapt_embeddings(const VocabMap& old_vocab,
                                 const EmbeddingMatrix& old_emb,
                                 const VocabMap& new_vocab) {
  if (old_emb.dim == 0) throw DataError("embedding dimension is 0");
  if (old_emb.rows != old_vocab.size()) {
    throw DataError("embedding has " + std::to_string(old_emb.rows) +
                    " rows but the vocabulary has " +
                    std::to_string(old_vocab.size()) + " tokens");
  }
  if (old_emb.values.size() != static_cast<std::size_t>(old_emb.rows) * old_emb.dim) {
    throw DataError("embedding payload does not match its shape");
  }
  if (new_vocab.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw DataError("new vocabulary too large");
  }

  EmbeddingMatrix out(static_cast<std::uint32_t>(new_vocab.size()), old_emb.dim);
  std::vector<float> mean_row;
  const auto fill_mean = [&]() -> const std::vector<float>& {
    if (mean_row.empty()) {
      if (old_emb.rows == 0) throw DataError("no existing embeddings to average");
      const kernels::KernelTable& k = kernels::active();
      std::vector<double> acc(old_emb.dim, 0.0);
      for (std::uint32_t r = 0; r < old_emb.rows; ++r) {
        k.accumulate_f32(acc.data(), old_emb.row(r).data(), old_emb.dim);
      }
      mean_row.resize(old_emb.dim);
      k.divide_to_f32(mean_row.data(), acc.data(), static_cast<double>(old_emb.rows),
                      old_emb.dim);
    }
    return mean_row;
  };

  for (std::uint32_t i = 0; i < out.rows; ++i) {
    std::span<float> dst = out.row(i);
    if (auto old_id = old_vocab.id(new_vocab.token(i))) {
      std::span<const float> src = old_emb.row(*old_id);
      std::memcpy(dst.data(), src.data(), src.size_bytes());
    } else {
      const auto& mean = fill_mean();
      std::memcpy(dst.data(), mean.data(), mean.size() * sizeof(float));
    }
  }
  return out;
}

OverlapReport overlap_report(const VocabMap& old_vocab, const VocabMap& new_vocab) {
  if (old_vocab.empty() || new_vocab.empty()) throw DataError("empty vocabulary");
  OverlapReport report;
  for (const std::string& t : new_vocab.tokens()) {
    if (old_vocab.contains(t)) ++report.intersection;
  }
  report.old_size = old_vocab.size();
  report.new_size = new_vocab.size();
  report.fraction_of_new =
      static_cast<double>(report.intersection) / static_cast<double>(report.new_size);
  report.fraction_of_old =
      static_cast<double>(report.intersection) / static_cast<double>(report.old_size);
  return report;
}

double vocab_overlap(const VocabMap& old_vocab, const VocabMap& new_vocab) {
  return overlap_report(old_vocab, new_vocab).fraction_of_new;
}

namespace {

constexpr char kMagic[4] = {'E', 'M', 'B', 'B'};
constexpr unsigned char kVersion = 1;
constexpr std::size_t kHeaderSize = 4 + 1 + 4 + 4;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out += static_cast<char>((v >> (8 * i)) & 0xFF);
}

std::uint32_t get_u32(std::string_view bytes, std::size_t pos) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
  }
  return v;
}

void check_finite(float v) {
  if (!std::isfinite(v)) {
    throw EmbeddingCodecError(CodecError::kNonFinite, "non-finite embedding value");
  }
}

}  // namespace

std::string encode_binary(const EmbeddingMatrix& matrix) {
  std::string out;
  out.reserve(kHeaderSize + matrix.values.size() * 4);
  out.append(kMagic, 4);
  out += static_cast<char>(kVersion);
  put_u32(out, matrix.rows);
  put_u32(out, matrix.dim);
  for (float v : matrix.values) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

EmbeddingMatrix decode_binary(std::string_view bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw EmbeddingCodecError(CodecError::kBadMagic, "bad magic (expected EMBB)");
  }
  if (bytes.size() < 5) {
    throw EmbeddingCodecError(CodecError::kTruncatedHeader, "truncated header");
  }
  if (static_cast<unsigned char>(bytes[4]) != kVersion) {
    throw EmbeddingCodecError(CodecError::kBadVersion,
                              "unsupported version " +
                                  std::to_string(static_cast<unsigned char>(bytes[4])));
  }
  if (bytes.size() < kHeaderSize) {
    throw EmbeddingCodecError(CodecError::kTruncatedHeader, "truncated header");
  }
  const std::uint32_t rows = get_u32(bytes, 5);
  const std::uint32_t dim = get_u32(bytes, 9);
  const std::uint64_t count = static_cast<std::uint64_t>(rows) * dim;
  if (count > (std::numeric_limits<std::uint64_t>::max() - kHeaderSize) / 4 ||
      count > std::vector<float>().max_size()) {
    throw EmbeddingCodecError(CodecError::kDimensionOverflow,
                              "dimension overflow: " + std::to_string(rows) + " x " +
                                  std::to_string(dim));
  }
  const std::uint64_t expected = kHeaderSize + count * 4;
  if (bytes.size() < expected) {
    throw EmbeddingCodecError(CodecError::kTruncatedPayload, "truncated payload");
  }
  if (bytes.size() > expected) {
    throw EmbeddingCodecError(CodecError::kTrailingData, "trailing data after payload");
  }
  EmbeddingMatrix m(rows, dim);
  for (std::size_t i = 0; i < m.values.size(); ++i) {
    const float v = std::bit_cast<float>(get_u32(bytes, kHeaderSize + 4 * i));
    check_finite(v);
    m.values[i] = v;
  }
  return m;
}

std::string encode_text(const EmbeddingMatrix& matrix) {
  std::string out = "EMB 1 " + std::to_string(matrix.rows) + " " +
                    std::to_string(matrix.dim) + "\n";
  char buf[32];
  for (std::uint32_t r = 0; r < matrix.rows; ++r) {
    const auto row = matrix.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out += ' ';
      auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), row[c]);
      out.append(buf, end);
    }
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && line[pos] == ' ') ++pos;
    const std::size_t start = pos;
    while (pos < line.size() && line[pos] != ' ') ++pos;
    if (pos > start) fields.push_back(line.substr(start, pos - start));
  }
  return fields;
}

template <typename T>
bool parse_number(std::string_view field, T& out) {
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size();
}

}  // namespace

EmbeddingMatrix decode_text(std::string_view text) {
  const auto lines = io::split_lines(text);
  if (lines.empty() || !lines[0].starts_with("EMB")) {
    throw EmbeddingCodecError(CodecError::kBadMagic, "bad magic (expected EMB header)");
  }
  const auto header = split_spaces(lines[0]);
  if (header.size() != 4 || header[0] != "EMB") {
    throw EmbeddingCodecError(CodecError::kMalformedText, "malformed EMB header");
  }
  if (header[1] != "1") {
    throw EmbeddingCodecError(CodecError::kBadVersion,
                              "unsupported version " + std::string(header[1]));
  }
  std::uint64_t rows64 = 0, dim64 = 0;
  if (!parse_number(header[2], rows64) || !parse_number(header[3], dim64)) {
    throw EmbeddingCodecError(CodecError::kMalformedText, "malformed EMB header");
  }
  if (rows64 > std::numeric_limits<std::uint32_t>::max() ||
      dim64 > std::numeric_limits<std::uint32_t>::max()) {
    throw EmbeddingCodecError(CodecError::kDimensionOverflow, "dimension overflow");
  }
  const auto rows = static_cast<std::uint32_t>(rows64);
  const auto dim = static_cast<std::uint32_t>(dim64);
  if (lines.size() - 1 < rows) {
    throw EmbeddingCodecError(CodecError::kTruncatedPayload, "truncated payload");
  }
  if (lines.size() - 1 > rows) {
    throw EmbeddingCodecError(CodecError::kTrailingData, "trailing data after payload");
  }
  EmbeddingMatrix m(rows, dim);
  for (std::uint32_t r = 0; r < rows; ++r) {
    const auto fields = split_spaces(lines[r + 1]);
    if (fields.size() != dim) {
      throw EmbeddingCodecError(CodecError::kMalformedText,
                                "row " + std::to_string(r) + " has " +
                                    std::to_string(fields.size()) + " values, expected " +
                                    std::to_string(dim));
    }
    auto row = m.row(r);
    for (std::uint32_t c = 0; c < dim; ++c) {
      if (!parse_number(fields[c], row[c])) {
        throw EmbeddingCodecError(CodecError::kMalformedText,
                                  "bad number '" + std::string(fields[c]) + "' in row " +
                                      std::to_string(r));
      }
      check_finite(row[c]);
    }
  }
  return m;
}

EmbeddingMatrix read_embeddings(const std::string& path) {
  const std::string bytes = io::read_file(path);
  if (bytes.starts_with("EMBB")) return decode_binary(bytes);
  if (bytes.starts_with("EMB ")) return decode_text(bytes);
  throw EmbeddingCodecError(CodecError::kBadMagic, "bad magic in " + path);
}

void write_embeddings(const std::string& path, const EmbeddingMatrix& matrix,
                      EmbeddingFormat format) {
  io::write_file(path, format == EmbeddingFormat::kBinary ? encode_binary(matrix)
                                                          : encode_text(matrix));
}

}  // namespace mtforge
