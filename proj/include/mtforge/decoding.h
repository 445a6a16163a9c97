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

#ifndef MTFORGE_DECODING_H_
#define MTFORGE_DECODING_H_

#include <chrono>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mtforge/scorer.h"

namespace mtforge::decoding {

struct CandidatePool {
  std::string id;
  std::string source;
  std::string source_lang;
  std::string target_lang;
  std::vector<std::string> candidates;  // ingestion order
};

// values[i * n + j] = utility(hypothesis = candidates[i],
//                             pseudo-reference = candidates[j]).
struct UtilityMatrix {
  std::size_t n = 0;
  std::vector<double> values;

  double at(std::size_t i, std::size_t j) const { return values[i * n + j]; }
};

enum class Strategy { kMbr, kTrr };

std::string_view strategy_name(Strategy s);

struct SelectionResult {
  std::size_t chosen_index = 0;
  std::string chosen_text;
  std::vector<double> per_candidate_scores;
  Strategy strategy = Strategy::kMbr;

  friend bool operator==(const SelectionResult&, const SelectionResult&) = default;
};

// Index of the maximum; ties go to the lowest index.
std::size_t argmax_lowest(std::span<const double> scores);

// Full N x N matrix, diagonal included. Request ids are "<i>:<j>"; a scorer
// failure is rethrown as ScoreError naming the cell.
UtilityMatrix utility_matrix(const CandidatePool& pool, scoring::Scorer& scorer);

struct MbrOptions {
  // Score each distinct candidate once and weight pseudo-references by their
  // multiplicity. Mathematically the same expected utilities, but the
  // summation differs, so values can move in the last bits.
  bool collapse_duplicates = false;
};

// Expected utility of candidate i against the whole pool (itself included,
// uniform weights): (1/N) * sum_j u(i, j).
std::vector<double> expected_utilities(const UtilityMatrix& matrix);

SelectionResult mbr_select(const CandidatePool& pool, scoring::Scorer& scorer,
                           const MbrOptions& options = {});

// Selection by reference-free quality estimation of every candidate.
SelectionResult trr_select(const CandidatePool& pool, scoring::Scorer& qe_scorer);

// Document split on a delimiter. Joining `chunks` with `delimiter` is the
// original document; empty chunks mark leading, trailing or repeated
// delimiters.
struct ChunkPlan {
  std::string delimiter;
  std::vector<std::string> chunks;

  std::string reassemble() const;
  std::string reassemble(std::span<const std::string> transformed) const;
};

ChunkPlan chunk_document(std::string_view document, std::string_view delimiter = "\n\n");

// Maps a batch of inputs to the same number of outputs, order-preserving.
using BatchTransformer =
    std::function<std::vector<std::string>(const std::vector<std::string>&)>;

// Transforms every non-empty chunk in one batch and reassembles with the
// original delimiters; empty chunks stay empty. Throws DataError("chunk count
// mismatch") if the transformer returns the wrong number of outputs.
std::string chunked_transform(std::string_view document,
                              const BatchTransformer& transformer,
                              std::string_view delimiter = "\n\n");

// Runs `command` as a line filter, one input per line. Inputs are escaped
// with escape_line() and outputs unescaped with unescape_line().
BatchTransformer command_transformer(std::string command,
                                     std::chrono::milliseconds timeout =
                                         std::chrono::hours(24));

}  // namespace mtforge::decoding

#endif  // MTFORGE_DECODING_H_
