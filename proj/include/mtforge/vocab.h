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

#ifndef MTFORGE_VOCAB_H_
#define MTFORGE_VOCAB_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mtforge/error.h"

namespace mtforge {

// Token <-> id table with dense ids 0..n-1. Tokens are NFC-normalized on
// construction and compared byte-exactly.
class VocabMap {
 public:
  VocabMap() = default;
  // Throws DataError on a duplicate token (after normalization).
  explicit VocabMap(std::vector<std::string> tokens);

  // One token per line, id = zero-based line number. "\t", "\n" and "\\"
  // escapes decode to tab, newline and backslash.
  static VocabMap parse(std::string_view content);
  static VocabMap read(const std::string& path);
  std::string serialize() const;

  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }
  bool contains(std::string_view token) const { return index_.contains(token); }
  std::optional<std::uint32_t> id(std::string_view token) const;
  const std::string& token(std::uint32_t id) const { return tokens_.at(id); }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::map<std::string, std::uint32_t, std::less<>> index_;
};

// rows x dim row-major float matrix.
struct EmbeddingMatrix {
  std::uint32_t rows = 0;
  std::uint32_t dim = 0;
  std::vector<float> values;

  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::uint32_t r, std::uint32_t d)
      : rows(r), dim(d), values(static_cast<std::size_t>(r) * d, 0.0f) {}

  std::span<float> row(std::uint32_t i) {
    return {values.data() + static_cast<std::size_t>(i) * dim, dim};
  }
  std::span<const float> row(std::uint32_t i) const {
    return {values.data() + static_cast<std::size_t>(i) * dim, dim};
  }

  friend bool operator==(const EmbeddingMatrix&, const EmbeddingMatrix&) = default;
};

// Column means accumulated in double precision in row order.
std::vector<double> column_mean(const EmbeddingMatrix& matrix);

// Rows of tokens shared with `old_vocab` are copied bit-exactly; every other
// row is the column mean over all old rows, rounded once to float.
EmbeddingMatrix adapt_embeddings(const VocabMap& old_vocab,
                                 const EmbeddingMatrix& old_emb,
                                 const VocabMap& new_vocab);

struct OverlapReport {
  std::size_t intersection = 0;
  std::size_t old_size = 0;
  std::size_t new_size = 0;
  double fraction_of_new = 0.0;  // intersection / new_size
  double fraction_of_old = 0.0;  // intersection / old_size
};

OverlapReport overlap_report(const VocabMap& old_vocab, const VocabMap& new_vocab);

// |old ∩ new| / |new|. Throws DataError when either vocabulary is empty.
double vocab_overlap(const VocabMap& old_vocab, const VocabMap& new_vocab);

enum class CodecError {
  kBadMagic,
  kBadVersion,
  kTruncatedHeader,
  kTruncatedPayload,
  kDimensionOverflow,
  kTrailingData,
  kMalformedText,
  kNonFinite,
};

class EmbeddingCodecError : public DataError {
 public:
  EmbeddingCodecError(CodecError code, const std::string& what)
      : DataError(what), code_(code) {}
  CodecError code() const noexcept { return code_; }

 private:
  CodecError code_;
};

enum class EmbeddingFormat { kBinary, kText };

// Binary: "EMBB", version byte 1, u32 rows, u32 dim (little-endian), then
// rows*dim little-endian IEEE-754 binary32 values, row-major.
std::string encode_binary(const EmbeddingMatrix& matrix);
EmbeddingMatrix decode_binary(std::string_view bytes);

// Text: "EMB 1 <rows> <dim>" then one row per line, space-separated, printed
// with enough digits to round-trip exactly.
std::string encode_text(const EmbeddingMatrix& matrix);
EmbeddingMatrix decode_text(std::string_view text);

// Detects the format from the leading bytes.
EmbeddingMatrix read_embeddings(const std::string& path);
void write_embeddings(const std::string& path, const EmbeddingMatrix& matrix,
                      EmbeddingFormat format = EmbeddingFormat::kBinary);

}  // namespace mtforge

#endif  // MTFORGE_VOCAB_H_
