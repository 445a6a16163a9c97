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

#ifndef MTFORGE_NOISE_H_
#define MTFORGE_NOISE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mtforge/decoding.h"
#include "mtforge/textmetrics.h"

namespace mtforge::noise {

enum class NoiseKind { kAdjacentSwap, kDuplication, kDeletion };

// Accepts "swap", "dup", "del" and the long names.
NoiseKind parse_kind(std::string_view name);
std::string_view kind_name(NoiseKind kind);

struct NoiseSpec {
  NoiseKind kind = NoiseKind::kDeletion;
  double level = 0.0;  // probability per eligible position, in [0, 1]
  std::uint64_t seed = 0;
};

struct PerturbResult {
  std::string text;
  std::size_t eligible = 0;  // non-whitespace scalars in the input
  std::size_t events = 0;    // swaps, duplications or deletions applied
};

// Character-level corruption. Every non-whitespace scalar is an eligible
// position; positions are visited in order and each draws one
// SplitMix64(spec.seed).uniform() value, selected when it is < level.
//   deletion:     selected scalars are removed.
//   duplication:  selected scalars are written twice.
//   swap:         a selected scalar trades places with the next eligible
//                 scalar (possibly across whitespace). Both are then marked
//                 swapped and skipped; at the last eligible position the
//                 swap is a no-op.
// Whitespace is never moved, removed or duplicated.
PerturbResult perturb_with_stats(std::string_view text, const NoiseSpec& spec);
std::string perturb(std::string_view text, const NoiseSpec& spec);

// Seed for the sentence at ordinal `index`: seed ^ mix64(index).
std::uint64_t sentence_seed(std::uint64_t seed, std::uint64_t index);

// Perturbs sentence i with sentence_seed(spec.seed, first_index + i).
// Output does not depend on `threads`.
std::vector<std::string> perturb_corpus(std::span<const std::string> sentences,
                                        const NoiseSpec& spec,
                                        std::uint64_t first_index = 0,
                                        std::size_t threads = 1);

enum class CurveMetric { kBleu, kChrf };

CurveMetric parse_metric(std::string_view name);
std::string_view metric_name(CurveMetric metric);

struct CurvePoint {
  double level = 0.0;
  double score = 0.0;
  double relative_change = 0.0;  // percent vs the zero-noise score
};

struct RobustnessCurve {
  std::vector<double> levels;
  textmetrics::MetricScore baseline;
  std::vector<CurvePoint> per_level;
};

// Corpus score of the translation at every noise level, relative to the
// score of translating the clean sources. Levels must be strictly
// increasing within [0, 1].
RobustnessCurve robustness_curve(std::span<const std::string> sources,
                                 std::span<const std::string> references,
                                 const decoding::BatchTransformer& translator,
                                 std::span<const double> levels, NoiseKind kind,
                                 std::uint64_t seed, CurveMetric metric,
                                 std::size_t threads = 1);

textmetrics::MetricScore corpus_score(std::span<const std::string> hypotheses,
                                      std::span<const std::string> references,
                                      CurveMetric metric);

// "level\tscore\trelative_change" header plus one row per level.
std::string format_curve_table(const RobustnessCurve& curve);
// Single-line JSON summary.
std::string format_curve_summary(const RobustnessCurve& curve, NoiseKind kind,
                                 std::uint64_t seed, CurveMetric metric);

}  // namespace mtforge::noise

#endif  // MTFORGE_NOISE_H_
