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

#include "mtforge/corpus.h"

#include <algorithm>
#include <cmath>

#include "mtforge/decoding.h"
#include "mtforge/error.h"
#include "mtforge/io.h"
#include "mtforge/rng.h"
#include "mtforge/unicode.h"

namespace mtforge::corpus {

void validate(const ParallelRecord& record) {
  if (record.source_lang.empty() || record.target_lang.empty()) {
    throw DataError("record has an empty language tag");
  }
  if (record.source_lang == record.target_lang) {
    throw DataError("record has identical source and target language " +
                    record.source_lang);
  }
  if (record.quality && !std::isfinite(*record.quality)) {
    throw DataError("record has a non-finite quality score");
  }
}

std::string_view role_name(Role role) {
  switch (role) {
    case Role::kSystem: return "system";
    case Role::kUser: return "user";
    case Role::kAssistant: return "assistant";
  }
  return "?";
}

const LanguageNames& default_language_names() {
  static const LanguageNames names = {
      {"an", "Aragonese"},   {"ar", "Arabic"},      {"ar_EG", "Egyptian Arabic"},
      {"ast", "Asturian"},   {"bg", "Bulgarian"},   {"bho", "Bhojpuri"},
      {"ca", "Catalan"},     {"cs", "Czech"},       {"cy", "Welsh"},
      {"da", "Danish"},      {"de", "German"},      {"el", "Greek"},
      {"en", "English"},     {"es", "Spanish"},     {"et", "Estonian"},
      {"eu", "Basque"},      {"fi", "Finnish"},     {"fr", "French"},
      {"ga", "Irish"},       {"gl", "Galician"},    {"hi", "Hindi"},
      {"hr", "Croatian"},
      {"hu", "Hungarian"},   {"is", "Icelandic"},   {"it", "Italian"},
      {"ja", "Japanese"},    {"ko", "Korean"},      {"lt", "Lithuanian"},
      {"lv", "Latvian"},     {"mas", "Maasai"},     {"mt", "Maltese"},
      {"nl", "Dutch"},       {"no", "Norwegian"},   {"oc", "Occitan"},
      {"pl", "Polish"},      {"pt", "Portuguese"},  {"ro", "Romanian"},
      {"ru", "Russian"},     {"sk", "Slovak"},      {"sl", "Slovenian"},
      {"sr", "Serbian"},     {"sr_Cyrl", "Serbian"}, {"sr_Latn", "Serbian"},
      {"sv", "Swedish"},     {"uk", "Ukrainian"},   {"zh", "Chinese"},
  };
  return names;
}

LanguageNames read_language_names(const std::string& path) {
  LanguageNames names = default_language_names();
  std::size_t line_no = 0;
  for (const std::string& line : io::read_lines(path)) {
    ++line_no;
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size()) {
      throw DataError(path + ":" + std::to_string(line_no) + ": expected tag<TAB>name");
    }
    names[line.substr(0, tab)] = line.substr(tab + 1);
  }
  return names;
}

namespace {

constexpr PunctuationEntry kPunctuation[] = {
    // Spaces.
    {0x0009, " "}, {0x00A0, " "}, {0x1680, " "}, {0x2000, " "}, {0x2001, " "},
    {0x2002, " "}, {0x2003, " "}, {0x2004, " "}, {0x2005, " "}, {0x2006, " "},
    {0x2007, " "}, {0x2008, " "}, {0x2009, " "}, {0x200A, " "}, {0x202F, " "},
    {0x205F, " "}, {0x3000, " "},
    // Invisible characters.
    {0x00AD, ""}, {0x200B, ""}, {0xFEFF, ""},
    // Single quotes and primes.
    {0x2018, "'"}, {0x2019, "'"}, {0x201A, "'"}, {0x201B, "'"}, {0x2032, "'"},
    // Double quotes and double primes.
    {0x201C, "\""}, {0x201D, "\""}, {0x201E, "\""}, {0x201F, "\""}, {0x2033, "\""},
    // Hyphen variants. En dash (U+2013) and em dash (U+2014) are kept.
    {0x2010, "-"}, {0x2011, "-"}, {0x2012, "-"}, {0x2212, "-"}, {0xFE63, "-"},
    {0xFF0D, "-"},
    // Ellipsis.
    {0x2026, "..."},
};

const PunctuationEntry* find_entry(char32_t cp) {
  for (const PunctuationEntry& e : kPunctuation) {
    if (e.from == cp) return &e;
  }
  return nullptr;
}

std::string apply_table(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::string_view unit : unicode::split_scalars(text)) {
    if (const PunctuationEntry* e = find_entry(unicode::decode_unit(unit))) {
      out += e->to;
    } else {
      out += unit;
    }
  }
  return out;
}

std::string collapse_and_trim(std::string_view text) {
  std::string collapsed;
  collapsed.reserve(text.size());
  for (char c : text) {
    if (c == ' ' && !collapsed.empty() && collapsed.back() == ' ') continue;
    collapsed += c;
  }
  const auto units = unicode::split_scalars(collapsed);
  std::size_t first = 0;
  std::size_t last = units.size();
  while (first < last && unicode::is_whitespace(unicode::decode_unit(units[first]))) ++first;
  while (last > first && unicode::is_whitespace(unicode::decode_unit(units[last - 1]))) --last;
  std::string out;
  for (std::size_t i = first; i < last; ++i) out += units[i];
  return out;
}

}  // namespace

std::span<const PunctuationEntry> punctuation_table() { return kPunctuation; }

std::string normalize_text(std::string_view text) {
  return collapse_and_trim(unicode::nfc(apply_table(unicode::nfc(text))));
}

ParallelRecord normalize(const ParallelRecord& record) {
  ParallelRecord out = record;
  out.source = normalize_text(record.source);
  out.target = normalize_text(record.target);
  return out;
}

bool Deduplicator::admit(const ParallelRecord& record) {
  std::string key = normalize_text(record.source);
  key += '\x1f';
  key += normalize_text(record.target);
  key += '\x1f';
  key += record.source_lang;
  key += '\x1f';
  key += record.target_lang;
  std::lock_guard<std::mutex> lock(mu_);
  return seen_.insert(std::move(key)).second;
}

std::size_t Deduplicator::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return seen_.size();
}

std::vector<ParallelRecord> dedup(std::span<const ParallelRecord> records) {
  Deduplicator d;
  std::vector<ParallelRecord> out;
  for (const ParallelRecord& r : records) {
    if (d.admit(r)) out.push_back(r);
  }
  return out;
}

LanguageDetector command_detector(std::string command) {
  auto transform = decoding::command_transformer(std::move(command));
  return [transform](const std::vector<std::string>& texts) {
    std::vector<std::string> tags = transform(texts);
    for (std::string& t : tags) {
      const auto b = t.find_first_not_of(" \t\r");
      const auto e = t.find_last_not_of(" \t\r");
      t = b == std::string::npos ? std::string() : t.substr(b, e - b + 1);
    }
    return tags;
  };
}

std::vector<ParallelRecord> filter_offtarget(std::span<const ParallelRecord> records,
                                             const LanguageDetector& detect) {
  if (!detect) throw UsageError("off-target filter needs a language detector");
  if (records.empty()) return {};
  std::vector<std::string> texts;
  texts.reserve(records.size() * 2);
  for (const ParallelRecord& r : records) texts.push_back(r.source);
  for (const ParallelRecord& r : records) texts.push_back(r.target);
  const std::vector<std::string> tags = detect(texts);
  if (tags.size() != texts.size()) {
    throw ProtocolError("language detector returned " + std::to_string(tags.size()) +
                        " tags for " + std::to_string(texts.size()) + " texts");
  }
  std::vector<ParallelRecord> out;
  const std::size_t n = records.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (tags[i] == records[i].source_lang && tags[n + i] == records[i].target_lang) {
      out.push_back(records[i]);
    }
  }
  return out;
}

std::vector<ParallelRecord> filter_quality(std::span<const ParallelRecord> records,
                                           double threshold, MissingQuality missing) {
  std::vector<ParallelRecord> out;
  for (const ParallelRecord& r : records) {
    const bool keep = r.quality ? *r.quality >= threshold : missing == MissingQuality::kPass;
    if (keep) out.push_back(r);
  }
  return out;
}

Step parse_step(std::string_view name) {
  if (name == "normalize") return Step::kNormalize;
  if (name == "dedup") return Step::kDedup;
  if (name == "offtarget") return Step::kOfftarget;
  if (name == "quality") return Step::kQuality;
  throw UsageError("unknown pipeline step '" + std::string(name) +
                   "' (normalize, dedup, offtarget, quality)");
}

std::vector<Step> parse_steps(std::string_view list) {
  std::vector<Step> steps;
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t comma = std::min(list.find(',', start), list.size());
    const std::string_view name = list.substr(start, comma - start);
    if (!name.empty()) steps.push_back(parse_step(name));
    start = comma + 1;
  }
  if (steps.empty()) throw UsageError("no pipeline steps");
  return steps;
}

std::vector<ParallelRecord> run_pipeline(std::vector<ParallelRecord> records,
                                         const PipelineConfig& config) {
  for (Step step : config.steps) {
    switch (step) {
      case Step::kNormalize:
        for (ParallelRecord& r : records) r = normalize(r);
        break;
      case Step::kDedup:
        records = dedup(records);
        break;
      case Step::kOfftarget:
        records = filter_offtarget(records, config.detector);
        break;
      case Step::kQuality:
        records = filter_quality(records, config.threshold, config.missing_quality);
        break;
    }
  }
  return records;
}

namespace {

const std::string& name_of(const LanguageNames& names, const std::string& tag) {
  auto it = names.find(tag);
  if (it == names.end()) throw DataError("unknown language tag " + tag);
  return it->second;
}

}  // namespace

std::string format_cpt(const ParallelRecord& record, const LanguageNames& names) {
  validate(record);
  return name_of(names, record.source_lang) + ": " + record.source + "\n" +
         name_of(names, record.target_lang) + ": " + record.target;
}

InstructionRecord format_instruction(const ParallelRecord& record,
                                     const LanguageNames& names) {
  validate(record);
  const std::string& src = name_of(names, record.source_lang);
  const std::string& tgt = name_of(names, record.target_lang);
  if (record.target.empty()) throw DataError("empty assistant content");
  InstructionRecord out;
  out.messages.push_back({Role::kUser, "Translate the following text from " + src +
                                           " to " + tgt + ": \n" + src + ": " +
                                           record.source + "\n" + tgt + ":"});
  out.messages.push_back({Role::kAssistant, record.target});
  out.task_tag = std::string(kTranslationTaskTag);
  out.lang_pair = {record.source_lang, record.target_lang};
  return out;
}

std::map<std::pair<std::string, std::string>, std::vector<PivotCandidate>>
enumerate_pivot_candidates(std::span<const MultiParallelRecord> records,
                           const std::set<std::string>& pivots) {
  std::map<std::pair<std::string, std::string>, std::vector<PivotCandidate>> groups;
  std::set<std::pair<std::string, std::string>> seen_content;
  std::size_t order = 0;
  const auto add = [&](const MultiParallelRecord& rec, const std::string& from,
                       const std::string& to) {
    const std::string& s = rec.translations.at(from);
    const std::string& t = rec.translations.at(to);
    if (!seen_content.emplace(s, t).second) return;
    ParallelRecord pr{s, t, from, to, std::nullopt, rec.segment_id};
    groups[{from, to}].push_back({order++, std::move(pr)});
  };
  for (const MultiParallelRecord& rec : records) {
    for (const std::string& p : pivots) {
      auto pit = rec.translations.find(p);
      if (pit == rec.translations.end() || pit->second.empty()) continue;
      for (const auto& [x, text] : rec.translations) {
        if (pivots.contains(x) || text.empty()) continue;
        add(rec, p, x);
        add(rec, x, p);
      }
    }
  }
  return groups;
}

std::uint64_t pair_seed(std::uint64_t seed, std::string_view source_lang,
                        std::string_view target_lang) {
  std::string key(source_lang);
  key += '\x1f';
  key += target_lang;
  return seed ^ fnv1a64(key);
}

std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, std::uint64_t seed) {
  k = std::min(k, n);
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.bounded(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::vector<InstructionRecord> build_pivot_instructions(
    std::span<const MultiParallelRecord> records, const PivotConfig& config,
    const LanguageNames& names) {
  if (config.cap_per_pair < 1) throw UsageError("cap per pair must be at least 1");
  if (config.pivots.empty()) throw UsageError("no pivot languages");
  for (const MultiParallelRecord& r : records) {
    if (r.translations.size() < 2) {
      throw DataError("segment " + r.segment_id + " has fewer than two translations");
    }
  }
  std::vector<InstructionRecord> out;
  for (const auto& [pair, candidates] : enumerate_pivot_candidates(records, config.pivots)) {
    const auto chosen =
        sample_indices(candidates.size(), config.cap_per_pair,
                       pair_seed(config.seed, pair.first, pair.second));
    for (std::size_t i : chosen) {
      out.push_back(format_instruction(candidates[i].record, names));
    }
  }
  return out;
}

}  // namespace mtforge::corpus
