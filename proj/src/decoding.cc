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

#include "mtforge/decoding.h"

#include <algorithm>
#include <charconv>
#include <map>

#include "mtforge/error.h"
#include "mtforge/subprocess.h"

namespace mtforge::decoding {

std::string_view strategy_name(Strategy s) { return s == Strategy::kMbr ? "mbr" : "trr"; }

std::size_t argmax_lowest(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

namespace {

void check_pool(const CandidatePool& pool) {
  if (pool.candidates.empty()) throw DataError("empty candidate pool");
}

std::string cell_id(std::size_t i, std::size_t j) {
  return std::to_string(i) + ":" + std::to_string(j);
}

UtilityMatrix score_matrix(const std::string& source,
                           std::span<const std::string> candidates,
                           scoring::Scorer& scorer) {
  scoring::require_mode(scorer, scoring::ScoreMode::kUtility);
  const std::size_t n = candidates.size();
  std::vector<scoring::ScoreRequest> requests;
  requests.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      requests.push_back({cell_id(i, j), source, candidates[i], candidates[j]});
    }
  }
  UtilityMatrix m{n, std::vector<double>(n * n)};
  try {
    const auto responses = scorer.score_batch(requests);
    for (std::size_t k = 0; k < responses.size(); ++k) m.values[k] = responses[k].score;
  } catch (const scoring::ScoreError& e) {
    throw scoring::ScoreError(e.request_id(), "scorer failed at cell (" +
                                                  e.request_id() + "): " + e.what());
  }
  return m;
}

}  // namespace

UtilityMatrix utility_matrix(const CandidatePool& pool, scoring::Scorer& scorer) {
  check_pool(pool);
  return score_matrix(pool.source, pool.candidates, scorer);
}

std::vector<double> expected_utilities(const UtilityMatrix& matrix) {
  std::vector<double> out(matrix.n);
  for (std::size_t i = 0; i < matrix.n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < matrix.n; ++j) sum += matrix.at(i, j);
    out[i] = sum / static_cast<double>(matrix.n);
  }
  return out;
}

SelectionResult mbr_select(const CandidatePool& pool, scoring::Scorer& scorer,
                           const MbrOptions& options) {
  check_pool(pool);
  SelectionResult result;
  result.strategy = Strategy::kMbr;
  if (!options.collapse_duplicates) {
    result.per_candidate_scores = expected_utilities(utility_matrix(pool, scorer));
  } else {
    std::vector<std::string> unique;
    std::vector<double> weight;
    std::vector<std::size_t> slot(pool.candidates.size());
    std::map<std::string_view, std::size_t> seen;
    for (std::size_t i = 0; i < pool.candidates.size(); ++i) {
      auto [it, inserted] = seen.emplace(pool.candidates[i], unique.size());
      if (inserted) {
        unique.push_back(pool.candidates[i]);
        weight.push_back(0.0);
      }
      slot[i] = it->second;
      weight[it->second] += 1.0;
    }
    const UtilityMatrix m = score_matrix(pool.source, unique, scorer);
    const double n = static_cast<double>(pool.candidates.size());
    std::vector<double> unique_scores(m.n);
    for (std::size_t i = 0; i < m.n; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < m.n; ++j) sum += weight[j] * m.at(i, j);
      unique_scores[i] = sum / n;
    }
    result.per_candidate_scores.resize(pool.candidates.size());
    for (std::size_t i = 0; i < slot.size(); ++i) {
      result.per_candidate_scores[i] = unique_scores[slot[i]];
    }
  }
  result.chosen_index = argmax_lowest(result.per_candidate_scores);
  result.chosen_text = pool.candidates[result.chosen_index];
  return result;
}

SelectionResult trr_select(const CandidatePool& pool, scoring::Scorer& qe_scorer) {
  check_pool(pool);
  scoring::require_mode(qe_scorer, scoring::ScoreMode::kQe);
  std::vector<scoring::ScoreRequest> requests;
  requests.reserve(pool.candidates.size());
  for (std::size_t i = 0; i < pool.candidates.size(); ++i) {
    requests.push_back({std::to_string(i), pool.source, pool.candidates[i], std::nullopt});
  }
  SelectionResult result;
  result.strategy = Strategy::kTrr;
  try {
    for (const auto& r : qe_scorer.score_batch(requests)) {
      result.per_candidate_scores.push_back(r.score);
    }
  } catch (const scoring::ScoreError& e) {
    throw scoring::ScoreError(e.request_id(), "scorer failed on candidate " +
                                                  e.request_id() + ": " + e.what());
  }
  result.chosen_index = argmax_lowest(result.per_candidate_scores);
  result.chosen_text = pool.candidates[result.chosen_index];
  return result;
}

std::string ChunkPlan::reassemble() const { return reassemble(chunks); }

std::string ChunkPlan::reassemble(std::span<const std::string> transformed) const {
  if (transformed.size() != chunks.size()) throw DataError("chunk count mismatch");
  std::string out;
  for (std::size_t i = 0; i < transformed.size(); ++i) {
    if (i > 0) out += delimiter;
    out += transformed[i];
  }
  return out;
}

ChunkPlan chunk_document(std::string_view document, std::string_view delimiter) {
  if (delimiter.empty()) throw UsageError("chunk delimiter is empty");
  ChunkPlan plan{std::string(delimiter), {}};
  std::size_t start = 0;
  for (;;) {
    const std::size_t hit = document.find(delimiter, start);
    if (hit == std::string_view::npos) {
      plan.chunks.emplace_back(document.substr(start));
      break;
    }
    plan.chunks.emplace_back(document.substr(start, hit - start));
    start = hit + delimiter.size();
  }
  return plan;
}

std::string chunked_transform(std::string_view document,
                              const BatchTransformer& transformer,
                              std::string_view delimiter) {
  const ChunkPlan plan = chunk_document(document, delimiter);
  std::vector<std::string> inputs;
  for (const std::string& c : plan.chunks) {
    if (!c.empty()) inputs.push_back(c);
  }
  std::vector<std::string> outputs;
  if (!inputs.empty()) outputs = transformer(inputs);
  if (outputs.size() != inputs.size()) throw DataError("chunk count mismatch");
  std::vector<std::string> merged;
  merged.reserve(plan.chunks.size());
  std::size_t k = 0;
  for (const std::string& c : plan.chunks) {
    merged.push_back(c.empty() ? std::string() : std::move(outputs[k++]));
  }
  return plan.reassemble(merged);
}

BatchTransformer command_transformer(std::string command,
                                     std::chrono::milliseconds timeout) {
  return [command = std::move(command), timeout](const std::vector<std::string>& in) {
    std::vector<std::string> lines;
    lines.reserve(in.size());
    for (const std::string& s : in) lines.push_back(escape_line(s));
    std::vector<std::string> out = run_line_filter(command, lines, timeout);
    for (std::string& s : out) s = unescape_line(s);
    return out;
  };
}

}  // namespace mtforge::decoding
