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

#ifndef MTFORGE_CORPUS_H_
#define MTFORGE_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

namespace mtforge::corpus {

struct ParallelRecord {
  std::string source;
  std::string target;
  std::string source_lang;
  std::string target_lang;
  std::optional<double> quality;
  std::optional<std::string> provenance;

  friend bool operator==(const ParallelRecord&, const ParallelRecord&) = default;
};

// Throws DataError unless both tags are non-empty and distinct and quality,
// when present, is finite.
void validate(const ParallelRecord& record);

struct MultiParallelRecord {
  std::string segment_id;
  std::map<std::string, std::string> translations;  // language tag -> text
};

enum class Role { kSystem, kUser, kAssistant };
std::string_view role_name(Role role);

struct Message {
  Role role;
  std::string content;

  friend bool operator==(const Message&, const Message&) = default;
};

struct InstructionRecord {
  std::vector<Message> messages;
  std::string task_tag;
  std::pair<std::string, std::string> lang_pair;

  friend bool operator==(const InstructionRecord&, const InstructionRecord&) = default;
};

// Language tag -> display name used in prompt templates.
using LanguageNames = std::map<std::string, std::string, std::less<>>;

const LanguageNames& default_language_names();
// "tag\tname" per line; entries override the defaults.
LanguageNames read_language_names(const std::string& path);

// ---- normalization ------------------------------------------------------

inline constexpr std::string_view kPunctuationTableVersion = "mtforge-punct/1";

struct PunctuationEntry {
  char32_t from;
  std::string_view to;
};

// The punctuation-equivalence table applied by normalize_text().
std::span<const PunctuationEntry> punctuation_table();

// NFC, punctuation table, NFC again, runs of spaces collapsed to one, and
// leading/trailing whitespace trimmed. Idempotent.
std::string normalize_text(std::string_view text);
ParallelRecord normalize(const ParallelRecord& record);

// ---- streaming stages ---------------------------------------------------

// Keeps the first record of every (source, target, source_lang, target_lang)
// class, comparing normalized text. admit() is safe to call concurrently.
class Deduplicator {
 public:
  bool admit(const ParallelRecord& record);
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::unordered_set<std::string> seen_;
};

std::vector<ParallelRecord> dedup(std::span<const ParallelRecord> records);

// One language tag per input text, in order.
using LanguageDetector =
    std::function<std::vector<std::string>(const std::vector<std::string>&)>;

// Wraps an external line-protocol command: one text per input line (escaped),
// one language tag per output line.
LanguageDetector command_detector(std::string command);

// Keeps a record iff detect(source) == source_lang and
// detect(target) == target_lang.
std::vector<ParallelRecord> filter_offtarget(std::span<const ParallelRecord> records,
                                             const LanguageDetector& detect);

enum class MissingQuality { kDrop, kPass };

inline constexpr double kDefaultQualityThreshold = 0.75;

// Keeps a record iff quality >= threshold; records without a quality field
// follow `missing`.
std::vector<ParallelRecord> filter_quality(std::span<const ParallelRecord> records,
                                           double threshold,
                                           MissingQuality missing = MissingQuality::kDrop);

enum class Step { kNormalize, kDedup, kOfftarget, kQuality };

Step parse_step(std::string_view name);
// Comma-separated list, e.g. "normalize,dedup,offtarget,quality".
std::vector<Step> parse_steps(std::string_view list);

struct PipelineConfig {
  std::vector<Step> steps;
  double threshold = kDefaultQualityThreshold;
  MissingQuality missing_quality = MissingQuality::kDrop;
  LanguageDetector detector;  // required by kOfftarget
};

std::vector<ParallelRecord> run_pipeline(std::vector<ParallelRecord> records,
                                         const PipelineConfig& config);

// ---- templates ----------------------------------------------------------

// "<SourceName>: <source>\n<TargetName>: <target>", no trailing newline.
std::string format_cpt(const ParallelRecord& record, const LanguageNames& names);

inline constexpr std::string_view kTranslationTaskTag = "translation";

// user:      "Translate the following text from <S> to <T>: \n<S>: <source>\n<T>:"
// assistant: target text
InstructionRecord format_instruction(const ParallelRecord& record,
                                     const LanguageNames& names);

// ---- pivot instruction builder -------------------------------------------

struct PivotConfig {
  std::set<std::string> pivots;
  std::size_t cap_per_pair = 1;
  std::uint64_t seed = 0;
};

// One translation direction drawn from a multi-parallel record.
struct PivotCandidate {
  std::size_t order = 0;  // enumeration index
  ParallelRecord record;
};

// All (pivot -> x) and (x -> pivot) directions for non-pivot x, enumerated in
// record order, then pivot tag order, then x tag order, pivot -> x first.
// Candidates repeating the (source text, target text) of an earlier
// candidate are dropped. Grouped by ordered language pair.
std::map<std::pair<std::string, std::string>, std::vector<PivotCandidate>>
enumerate_pivot_candidates(std::span<const MultiParallelRecord> records,
                           const std::set<std::string>& pivots);

// Seed used to sample the given direction.
std::uint64_t pair_seed(std::uint64_t seed, std::string_view source_lang,
                        std::string_view target_lang);

// Indices of a uniform sample of min(k, n) out of n, ascending; partial
// Fisher-Yates with SplitMix64(seed).bounded().
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, std::uint64_t seed);

// For every ordered pair, min(cap, available) candidates sampled uniformly,
// emitted in pair order and then enumeration order.
std::vector<InstructionRecord> build_pivot_instructions(
    std::span<const MultiParallelRecord> records, const PivotConfig& config,
    const LanguageNames& names);

}  // namespace mtforge::corpus

#endif  // MTFORGE_CORPUS_H_
