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

#include "mtforge/textmetrics.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <unordered_map>

#include "mtforge/error.h"
#include "mtforge/subprocess.h"
#include "mtforge/unicode.h"
#include "mtforge/vocab.h"

namespace mtforge::textmetrics {
namespace {

using NgramCounts = std::unordered_map<std::string, std::uint64_t>;

// Counts n-grams of every order 1..max_order over `units`; `sep` is placed
// between units inside a key.
std::vector<NgramCounts> count_ngrams(std::span<const std::string> units,
                                      int max_order, std::string_view sep) {
  std::vector<NgramCounts> counts(static_cast<std::size_t>(max_order));
  for (std::size_t i = 0; i < units.size(); ++i) {
    std::string key;
    for (int n = 1; n <= max_order && i + n <= units.size(); ++n) {
      if (n > 1) key += sep;
      key += units[i + n - 1];
      ++counts[n - 1][key];
    }
  }
  return counts;
}

std::uint64_t total(const NgramCounts& counts) {
  std::uint64_t t = 0;
  for (const auto& [_, c] : counts) t += c;
  return t;
}

void check_order(int order, const char* what) {
  if (order <= 0) throw DataError(std::string(what) + " must be positive");
}

}  // namespace

BleuStats& BleuStats::operator+=(const BleuStats& other) {
  if (matches.size() < other.matches.size()) {
    matches.resize(other.matches.size());
    totals.resize(other.totals.size());
  }
  for (std::size_t n = 0; n < other.matches.size(); ++n) {
    matches[n] += other.matches[n];
    totals[n] += other.totals[n];
  }
  hyp_length += other.hyp_length;
  ref_length += other.ref_length;
  return *this;
}

ChrfStats& ChrfStats::operator+=(const ChrfStats& other) {
  if (matches.size() < other.matches.size()) {
    matches.resize(other.matches.size());
    hyp_totals.resize(other.hyp_totals.size());
    ref_totals.resize(other.ref_totals.size());
  }
  for (std::size_t n = 0; n < other.matches.size(); ++n) {
    matches[n] += other.matches[n];
    hyp_totals[n] += other.hyp_totals[n];
    ref_totals[n] += other.ref_totals[n];
  }
  return *this;
}

std::vector<std::string> bleu_tokenize(std::string_view text) {
  const std::string normalized = unicode::nfc(text);
  std::vector<std::string> tokens;
  for (std::string_view w : unicode::split_whitespace(normalized)) {
    tokens.emplace_back(w);
  }
  return tokens;
}

BleuStats bleu_stats(std::string_view hypothesis,
                     std::span<const std::string> references, int max_order) {
  check_order(max_order, "max_order");
  if (references.empty()) throw DataError("no references");
  const auto hyp_tokens = bleu_tokenize(hypothesis);
  const auto hyp_counts = count_ngrams(hyp_tokens, max_order, " ");

  std::vector<NgramCounts> max_ref(static_cast<std::size_t>(max_order));
  const auto hyp_len = static_cast<std::uint64_t>(hyp_tokens.size());
  std::uint64_t best_len = 0;
  bool have_len = false;
  for (const std::string& ref : references) {
    const auto ref_tokens = bleu_tokenize(ref);
    const auto len = static_cast<std::uint64_t>(ref_tokens.size());
    const auto dist = [&](std::uint64_t l) {
      return l > hyp_len ? l - hyp_len : hyp_len - l;
    };
    if (!have_len || dist(len) < dist(best_len) ||
        (dist(len) == dist(best_len) && len < best_len)) {
      best_len = len;
      have_len = true;
    }
    const auto ref_counts = count_ngrams(ref_tokens, max_order, " ");
    for (int n = 0; n < max_order; ++n) {
      for (const auto& [gram, c] : ref_counts[n]) {
        auto& slot = max_ref[n][gram];
        slot = std::max(slot, c);
      }
    }
  }

  BleuStats stats;
  stats.matches.assign(static_cast<std::size_t>(max_order), 0);
  stats.totals.assign(static_cast<std::size_t>(max_order), 0);
  for (int n = 0; n < max_order; ++n) {
    for (const auto& [gram, c] : hyp_counts[n]) {
      stats.totals[n] += c;
      auto it = max_ref[n].find(gram);
      if (it != max_ref[n].end()) stats.matches[n] += std::min(c, it->second);
    }
  }
  stats.hyp_length = hyp_len;
  stats.ref_length = best_len;
  return stats;
}

double bleu_from_stats(const BleuStats& stats, const BleuConfig& config) {
  check_order(config.max_order, "max_order");
  if (stats.hyp_length == 0) return 0.0;
  double log_sum = 0.0;
  int orders = 0;
  const auto limit = std::min<std::size_t>(stats.totals.size(),
                                           static_cast<std::size_t>(config.max_order));
  for (std::size_t n = 0; n < limit; ++n) {
    const auto t = static_cast<double>(stats.totals[n]);
    if (stats.totals[n] == 0) continue;
    double p;
    if (stats.matches[n] > 0) {
      p = static_cast<double>(stats.matches[n]) / t;
    } else if (n > 0 && config.smoothing.kind == Smoothing::Kind::kAddK &&
               config.smoothing.k > 0.0) {
      p = config.smoothing.k / (t + config.smoothing.k);
    } else {
      return 0.0;
    }
    log_sum += std::log(p);
    ++orders;
  }
  if (orders == 0) return 0.0;
  const double c = static_cast<double>(stats.hyp_length);
  const double r = static_cast<double>(stats.ref_length);
  const double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
  return std::clamp(100.0 * bp * std::exp(log_sum / orders), 0.0, 100.0);
}

MetricScore sentence_bleu(std::string_view hypothesis,
                          std::span<const std::string> references,
                          const BleuConfig& config) {
  const BleuStats stats = bleu_stats(hypothesis, references, config.max_order);
  return {bleu_from_stats(stats, config), "bleu", 1};
}

MetricScore corpus_bleu(std::span<const SegmentRefs> pairs,
                        const BleuConfig& config) {
  if (pairs.empty()) throw DataError("corpus_bleu: empty input");
  BleuStats pooled;
  for (const SegmentRefs& seg : pairs) {
    pooled += bleu_stats(seg.hypothesis, seg.references, config.max_order);
  }
  return {bleu_from_stats(pooled, config), "bleu", pairs.size()};
}

namespace {

std::vector<std::string> chrf_units(std::string_view text) {
  const std::string normalized = unicode::nfc(text);
  std::vector<std::string> units;
  for (std::string_view u : unicode::split_scalars(normalized)) {
    if (!unicode::is_whitespace(unicode::decode_unit(u))) units.emplace_back(u);
  }
  return units;
}

}  // namespace

ChrfStats chrf_stats(std::string_view hypothesis, std::string_view reference,
                     int char_order) {
  check_order(char_order, "char_order");
  const auto hyp = count_ngrams(chrf_units(hypothesis), char_order, "");
  const auto ref = count_ngrams(chrf_units(reference), char_order, "");
  ChrfStats stats;
  const auto orders = static_cast<std::size_t>(char_order);
  stats.matches.assign(orders, 0);
  stats.hyp_totals.assign(orders, 0);
  stats.ref_totals.assign(orders, 0);
  for (std::size_t n = 0; n < orders; ++n) {
    stats.hyp_totals[n] = total(hyp[n]);
    stats.ref_totals[n] = total(ref[n]);
    for (const auto& [gram, c] : hyp[n]) {
      auto it = ref[n].find(gram);
      if (it != ref[n].end()) stats.matches[n] += std::min(c, it->second);
    }
  }
  return stats;
}

double chrf_from_stats(const ChrfStats& stats, double beta) {
  double precision = 0.0;
  double recall = 0.0;
  int orders = 0;
  for (std::size_t n = 0; n < stats.matches.size(); ++n) {
    const std::uint64_t h = stats.hyp_totals[n];
    const std::uint64_t r = stats.ref_totals[n];
    if (h == 0 && r == 0) continue;
    const auto m = static_cast<double>(stats.matches[n]);
    if (h > 0) precision += m / static_cast<double>(h);
    if (r > 0) recall += m / static_cast<double>(r);
    ++orders;
  }
  if (orders == 0) return 0.0;
  precision /= orders;
  recall /= orders;
  if (precision + recall == 0.0) return 0.0;
  const double b2 = beta * beta;
  const double f = (1.0 + b2) * precision * recall / (b2 * precision + recall);
  return std::clamp(100.0 * f, 0.0, 100.0);
}

MetricScore chrf(std::string_view hypothesis, std::string_view reference,
                 const ChrfConfig& config) {
  const ChrfStats stats = chrf_stats(hypothesis, reference, config.char_order);
  return {chrf_from_stats(stats, config.beta), "chrf", 1};
}

MetricScore corpus_chrf(std::span<const SegmentRef> pairs,
                        const ChrfConfig& config) {
  if (pairs.empty()) throw DataError("corpus_chrf: empty input");
  ChrfStats pooled;
  for (const SegmentRef& seg : pairs) {
    pooled += chrf_stats(seg.hypothesis, seg.reference, config.char_order);
  }
  return {chrf_from_stats(pooled, config.beta), "chrf", pairs.size()};
}

TokenizerSpec TokenizerSpec::whitespace() {
  TokenizerSpec t;
  t.source_ = RuleSource{Rule::kWhitespace, {}};
  return t;
}

TokenizerSpec TokenizerSpec::character() {
  TokenizerSpec t;
  t.source_ = RuleSource{Rule::kCharacter, {}};
  return t;
}

TokenizerSpec TokenizerSpec::command(std::string command) {
  if (command.empty()) throw UsageError("tokenizer command is empty");
  TokenizerSpec t;
  t.source_ = RuleSource{Rule::kCommand, std::move(command)};
  return t;
}

TokenizerSpec TokenizerSpec::vocab(std::shared_ptr<const VocabMap> vocab) {
  if (!vocab) throw UsageError("tokenizer vocabulary is null");
  TokenizerSpec t;
  t.source_ = VocabSource{std::move(vocab)};
  return t;
}

TokenizerSpec TokenizerSpec::parse(std::string_view spec) {
  if (spec == "whitespace") return whitespace();
  if (spec == "character") return character();
  if (spec.starts_with("cmd:")) return command(std::string(spec.substr(4)));
  if (spec.starts_with("vocab:")) {
    return vocab(std::make_shared<const VocabMap>(
        VocabMap::read(std::string(spec.substr(6)))));
  }
  throw UsageError("unknown tokenizer spec '" + std::string(spec) +
                   "' (expected whitespace, character, vocab:<file> or cmd:<command>)");
}

namespace {

std::uint64_t greedy_vocab_tokens(const VocabMap& vocab, std::string_view word) {
  const auto units = unicode::split_scalars(word);
  std::uint64_t tokens = 0;
  std::size_t i = 0;
  while (i < units.size()) {
    std::size_t best = 1;
    std::size_t byte_len = 0;
    for (std::size_t j = i; j < units.size(); ++j) byte_len += units[j].size();
    const char* begin = units[i].data();
    // Longest match first.
    for (std::size_t j = units.size(); j > i; --j) {
      if (vocab.contains(std::string_view(begin, byte_len))) {
        best = j - i;
        break;
      }
      byte_len -= units[j - 1].size();
    }
    ++tokens;
    i += best;
  }
  return tokens;
}

}  // namespace

std::size_t TokenizerSpec::count_tokens(std::span<const std::string> sentences) const {
  if (const auto* v = std::get_if<VocabSource>(&source_)) {
    std::size_t tokens = 0;
    for (const std::string& s : sentences) {
      const std::string normalized = unicode::nfc(s);
      for (std::string_view w : unicode::split_whitespace(normalized)) {
        tokens += greedy_vocab_tokens(*v->vocab, w);
      }
    }
    return tokens;
  }
  const auto& rule = std::get<RuleSource>(source_);
  std::size_t tokens = 0;
  switch (rule.rule) {
    case Rule::kWhitespace:
      for (const std::string& s : sentences) tokens += unicode::split_whitespace(s).size();
      return tokens;
    case Rule::kCharacter:
      for (const std::string& s : sentences) {
        for (std::string_view u : unicode::split_scalars(s)) {
          if (!unicode::is_whitespace(unicode::decode_unit(u))) ++tokens;
        }
      }
      return tokens;
    case Rule::kCommand: {
      std::vector<std::string> lines;
      lines.reserve(sentences.size());
      for (const std::string& s : sentences) lines.push_back(escape_line(s));
      const auto out =
          run_line_filter(rule.command, lines, std::chrono::minutes(10));
      if (out.size() != sentences.size()) {
        throw ProtocolError("tokenizer command returned " +
                            std::to_string(out.size()) + " lines for " +
                            std::to_string(sentences.size()) + " sentences");
      }
      for (const std::string& line : out) {
        if (!line.empty()) tokens += std::count(line.begin(), line.end(), '\t') + 1;
      }
      return tokens;
    }
  }
  return tokens;
}

FertilityReport fertility(const TokenizerSpec& tokenizer,
                          std::span<const std::string> sentences) {
  FertilityReport report;
  for (const std::string& s : sentences) {
    report.word_count += unicode::split_whitespace(s).size();
  }
  if (report.word_count == 0) throw DataError("empty corpus");
  report.token_count = tokenizer.count_tokens(sentences);
  report.fertility = static_cast<double>(report.token_count) /
                     static_cast<double>(report.word_count);
  return report;
}

double relative_change(const MetricScore& baseline, const MetricScore& perturbed) {
  if (!(baseline.value > 0.0)) throw DataError("undefined relative change");
  return 100.0 * (perturbed.value - baseline.value) / baseline.value;
}

}  // namespace mtforge::textmetrics
