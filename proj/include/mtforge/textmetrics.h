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

#ifndef MTFORGE_TEXTMETRICS_H_
#define MTFORGE_TEXTMETRICS_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mtforge {
class VocabMap;
}

namespace mtforge::textmetrics {

// A score on the 0-100 scale.
struct MetricScore {
  double value = 0.0;
  std::string metric_name;
  std::size_t segment_count = 0;
};

// BLEU smoothing. kAddK adds `k` to numerator and denominator of every
// order above 1 whose clipped match count is zero.
struct Smoothing {
  enum class Kind { kNone, kAddK };
  Kind kind = Kind::kNone;
  double k = 0.0;

  static Smoothing none() { return {}; }
  static Smoothing add_k(double k) { return {Kind::kAddK, k}; }
};

struct BleuConfig {
  int max_order = 4;
  Smoothing smoothing;

  static BleuConfig sentence_default() { return {4, Smoothing::add_k(1.0)}; }
  static BleuConfig corpus_default() { return {4, Smoothing::none()}; }
};

struct ChrfConfig {
  int char_order = 6;
  double beta = 2.0;
};

// Sufficient statistics for BLEU; corpus BLEU sums them over segments.
struct BleuStats {
  std::vector<std::uint64_t> matches;  // clipped, per order
  std::vector<std::uint64_t> totals;   // hypothesis n-grams, per order
  std::uint64_t hyp_length = 0;
  std::uint64_t ref_length = 0;

  BleuStats& operator+=(const BleuStats& other);
};

struct ChrfStats {
  std::vector<std::uint64_t> matches;
  std::vector<std::uint64_t> hyp_totals;
  std::vector<std::uint64_t> ref_totals;

  ChrfStats& operator+=(const ChrfStats& other);
};

// NFC, then split on Unicode whitespace.
std::vector<std::string> bleu_tokenize(std::string_view text);

// Reference length is the one closest to the hypothesis length, preferring
// the shorter reference on ties.
BleuStats bleu_stats(std::string_view hypothesis,
                     std::span<const std::string> references, int max_order);
double bleu_from_stats(const BleuStats& stats, const BleuConfig& config);

// Orders longer than the hypothesis are left out of the geometric mean, so
// sentence_bleu(h, {h}) is 100 for every non-empty h. Throws DataError on an
// empty reference list; an empty hypothesis scores 0.
MetricScore sentence_bleu(std::string_view hypothesis,
                          std::span<const std::string> references,
                          const BleuConfig& config = BleuConfig::sentence_default());

struct SegmentRefs {
  std::string hypothesis;
  std::vector<std::string> references;
};

// Pools n-gram statistics over all segments before the geometric mean.
MetricScore corpus_bleu(std::span<const SegmentRefs> pairs,
                        const BleuConfig& config = BleuConfig::corpus_default());

// Character n-gram statistics over NFC text with whitespace removed.
ChrfStats chrf_stats(std::string_view hypothesis, std::string_view reference,
                     int char_order);
double chrf_from_stats(const ChrfStats& stats, double beta);

// Character F-score: precision and recall are averaged over the orders that
// have n-grams on at least one side, then combined as F-beta. Two empty
// strings score 0.
MetricScore chrf(std::string_view hypothesis, std::string_view reference,
                 const ChrfConfig& config = {});

struct SegmentRef {
  std::string hypothesis;
  std::string reference;
};

MetricScore corpus_chrf(std::span<const SegmentRef> pairs,
                        const ChrfConfig& config = {});

// Tokenizer used for fertility. kVocab splits every word greedily into the
// longest vocabulary entries; a scalar that starts no entry is one token.
// kCommand runs an external process: one sentence per input line, one line
// of tab-separated tokens per output line.
class TokenizerSpec {
 public:
  enum class Rule { kWhitespace, kCharacter, kCommand };

  static TokenizerSpec whitespace();
  static TokenizerSpec character();
  static TokenizerSpec command(std::string command);
  static TokenizerSpec vocab(std::shared_ptr<const VocabMap> vocab);

  // "whitespace", "character", "vocab:<file>" or "cmd:<command>".
  static TokenizerSpec parse(std::string_view spec);

  bool is_vocab() const { return std::holds_alternative<VocabSource>(source_); }
  std::size_t count_tokens(std::span<const std::string> sentences) const;

 private:
  struct VocabSource {
    std::shared_ptr<const VocabMap> vocab;
  };
  struct RuleSource {
    Rule rule;
    std::string command;
  };
  std::variant<VocabSource, RuleSource> source_;
};

struct FertilityReport {
  std::uint64_t token_count = 0;
  std::uint64_t word_count = 0;
  double fertility = 0.0;
};

// Tokens per word; words are maximal runs of non-whitespace scalars. Throws
// DataError("empty corpus") when there are no words.
FertilityReport fertility(const TokenizerSpec& tokenizer,
                          std::span<const std::string> sentences);

// 100 * (perturbed - baseline) / baseline.
double relative_change(const MetricScore& baseline, const MetricScore& perturbed);

}  // namespace mtforge::textmetrics

#endif  // MTFORGE_TEXTMETRICS_H_
