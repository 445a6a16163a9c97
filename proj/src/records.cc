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

#include "mtforge/records.h"

#include <charconv>
#include <cmath>

#include "mtforge/error.h"
#include "mtforge/io.h"

namespace mtforge::records {
namespace {

std::string where(std::size_t line_no) { return "line " + std::to_string(line_no) + ": "; }

Json parse_object(std::string_view line, std::size_t line_no) {
  Json j = Json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw DataError(where(line_no) + "expected a JSON object");
  }
  return j;
}

std::string get_string(const Json& j, const char* key, std::size_t line_no) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw DataError(where(line_no) + "missing string field '" + key + "'");
  }
  return it->get<std::string>();
}

bool blank(std::string_view line) {
  return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

}  // namespace

std::string dump(const Json& j) {
  return j.dump(-1, ' ', false, Json::error_handler_t::replace);
}

std::vector<PoolRecord> parse_pools(std::string_view content) {
  std::vector<PoolRecord> out;
  std::size_t line_no = 0;
  for (const std::string& line : io::split_lines(content)) {
    ++line_no;
    if (blank(line)) continue;
    PoolRecord rec;
    rec.raw = parse_object(line, line_no);
    rec.pool.id = get_string(rec.raw, "id", line_no);
    rec.pool.source = get_string(rec.raw, "source", line_no);
    rec.pool.source_lang = get_string(rec.raw, "source_lang", line_no);
    rec.pool.target_lang = get_string(rec.raw, "target_lang", line_no);
    auto it = rec.raw.find("candidates");
    if (it == rec.raw.end() || !it->is_array()) {
      throw DataError(where(line_no) + "missing array field 'candidates'");
    }
    for (const Json& c : *it) {
      if (!c.is_string()) throw DataError(where(line_no) + "candidate is not a string");
      rec.pool.candidates.push_back(c.get<std::string>());
    }
    if (rec.pool.candidates.empty()) {
      throw DataError(where(line_no) + "empty candidate pool");
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::string selection_line(const PoolRecord& record,
                           const decoding::SelectionResult& result) {
  Json j = record.raw;
  j["chosen_index"] = result.chosen_index;
  j["chosen_text"] = result.chosen_text;
  j["scores"] = result.per_candidate_scores;
  j["strategy"] = decoding::strategy_name(result.strategy);
  return dump(j);
}

RecordFormat format_from_path(std::string_view path) {
  if (path.ends_with(".jsonl") || path.ends_with(".json")) return RecordFormat::kJsonl;
  return RecordFormat::kTsv;
}

std::optional<std::pair<std::string, std::string>> pair_from_filename(std::string_view path) {
  const std::size_t slash = path.find_last_of('/');
  std::string_view name = slash == std::string_view::npos ? path : path.substr(slash + 1);
  const std::size_t ext = name.find_last_of('.');
  if (ext == std::string_view::npos) return std::nullopt;
  name = name.substr(0, ext);
  const std::size_t dot = name.find_last_of('.');
  if (dot == std::string_view::npos) return std::nullopt;
  const std::string_view pair = name.substr(dot + 1);
  const std::size_t dash = pair.find('-');
  if (dash == std::string_view::npos || dash == 0 || dash + 1 == pair.size() ||
      pair.find('-', dash + 1) != std::string_view::npos) {
    return std::nullopt;
  }
  return std::make_pair(std::string(pair.substr(0, dash)), std::string(pair.substr(dash + 1)));
}

std::vector<corpus::ParallelRecord> parse_tsv(
    std::string_view content,
    const std::optional<std::pair<std::string, std::string>>& pair) {
  auto lines = io::split_lines(content);
  std::optional<std::pair<std::string, std::string>> lang = pair;
  std::size_t first = 0;
  if (!lines.empty() && lines[0].starts_with("#pair\t")) {
    const auto& h = lines[0];
    const std::size_t t1 = h.find('\t');
    const std::size_t t2 = h.find('\t', t1 + 1);
    if (t2 == std::string::npos || h.find('\t', t2 + 1) != std::string::npos) {
      throw DataError(where(1) + "malformed #pair header");
    }
    if (!lang) lang = std::make_pair(h.substr(t1 + 1, t2 - t1 - 1), h.substr(t2 + 1));
    first = 1;
  }
  if (!lang) throw UsageError("TSV input needs a language pair (header, filename or --pair)");
  std::vector<corpus::ParallelRecord> out;
  for (std::size_t i = first; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      const std::size_t tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab == std::string::npos ? std::string::npos
                                                                   : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() < 2 || fields.size() > 3) {
      throw DataError(where(i + 1) + "expected 2 or 3 tab-separated fields");
    }
    corpus::ParallelRecord r{fields[0], fields[1], lang->first, lang->second,
                             std::nullopt, std::nullopt};
    if (fields.size() == 3 && !fields[2].empty()) {
      double q = 0.0;
      const char* b = fields[2].data();
      const char* e = b + fields[2].size();
      auto [ptr, ec] = std::from_chars(b, e, q);
      if (ec != std::errc() || ptr != e || !std::isfinite(q)) {
        throw DataError(where(i + 1) + "bad quality value '" + fields[2] + "'");
      }
      r.quality = q;
    }
    corpus::validate(r);
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_tsv(std::span<const corpus::ParallelRecord> records, bool with_header) {
  std::string out;
  if (with_header && !records.empty()) {
    out += "#pair\t" + records[0].source_lang + "\t" + records[0].target_lang + "\n";
  }
  for (const corpus::ParallelRecord& r : records) {
    for (const std::string* f : {&r.source, &r.target}) {
      if (f->find_first_of("\t\n") != std::string::npos) {
        throw DataError("field contains a tab or newline; use the JSONL format");
      }
    }
    out += r.source + "\t" + r.target;
    if (r.quality) out += "\t" + io::format_double(*r.quality);
    out += "\n";
  }
  return out;
}

std::vector<corpus::ParallelRecord> parse_parallel_jsonl(std::string_view content) {
  std::vector<corpus::ParallelRecord> out;
  std::size_t line_no = 0;
  for (const std::string& line : io::split_lines(content)) {
    ++line_no;
    if (blank(line)) continue;
    const Json j = parse_object(line, line_no);
    corpus::ParallelRecord r;
    r.source = get_string(j, "source", line_no);
    r.target = get_string(j, "target", line_no);
    r.source_lang = get_string(j, "source_lang", line_no);
    r.target_lang = get_string(j, "target_lang", line_no);
    if (auto it = j.find("quality"); it != j.end() && !it->is_null()) {
      if (!it->is_number()) throw DataError(where(line_no) + "quality is not a number");
      r.quality = it->get<double>();
    }
    if (auto it = j.find("provenance"); it != j.end() && !it->is_null()) {
      if (!it->is_string()) throw DataError(where(line_no) + "provenance is not a string");
      r.provenance = it->get<std::string>();
    }
    try {
      corpus::validate(r);
    } catch (const DataError& e) {
      throw DataError(where(line_no) + e.what());
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_parallel_jsonl(std::span<const corpus::ParallelRecord> records) {
  std::string out;
  for (const corpus::ParallelRecord& r : records) {
    Json j;
    j["source"] = r.source;
    j["target"] = r.target;
    j["source_lang"] = r.source_lang;
    j["target_lang"] = r.target_lang;
    if (r.quality) j["quality"] = *r.quality;
    if (r.provenance) j["provenance"] = *r.provenance;
    out += dump(j);
    out += '\n';
  }
  return out;
}

std::vector<corpus::MultiParallelRecord> parse_multiparallel_jsonl(std::string_view content) {
  std::vector<corpus::MultiParallelRecord> out;
  std::size_t line_no = 0;
  for (const std::string& line : io::split_lines(content)) {
    ++line_no;
    if (blank(line)) continue;
    const Json j = parse_object(line, line_no);
    corpus::MultiParallelRecord r;
    r.segment_id = get_string(j, "segment_id", line_no);
    auto it = j.find("translations");
    if (it == j.end() || !it->is_object()) {
      throw DataError(where(line_no) + "missing object field 'translations'");
    }
    for (const auto& [tag, text] : it->items()) {
      if (!text.is_string()) throw DataError(where(line_no) + "translation is not a string");
      if (tag.empty()) throw DataError(where(line_no) + "empty language tag");
      if (!r.translations.emplace(tag, text.get<std::string>()).second) {
        throw DataError(where(line_no) + "duplicate language " + tag);
      }
    }
    if (r.translations.size() < 2) {
      throw DataError(where(line_no) + "fewer than two translations");
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string instruction_line(const corpus::InstructionRecord& record) {
  Json j;
  j["messages"] = Json::array();
  for (const corpus::Message& m : record.messages) {
    Json msg;
    msg["role"] = corpus::role_name(m.role);
    msg["content"] = m.content;
    j["messages"].push_back(std::move(msg));
  }
  j["task_tag"] = record.task_tag;
  j["lang_pair"] = Json::array({record.lang_pair.first, record.lang_pair.second});
  return dump(j);
}

corpus::InstructionRecord parse_instruction_line(std::string_view line) {
  const Json j = parse_object(line, 1);
  corpus::InstructionRecord r;
  for (const Json& m : j.at("messages")) {
    const std::string role = m.at("role").get<std::string>();
    corpus::Role parsed;
    if (role == "system") parsed = corpus::Role::kSystem;
    else if (role == "user") parsed = corpus::Role::kUser;
    else if (role == "assistant") parsed = corpus::Role::kAssistant;
    else throw DataError("unknown role " + role);
    r.messages.push_back({parsed, m.at("content").get<std::string>()});
  }
  r.task_tag = j.at("task_tag").get<std::string>();
  r.lang_pair = {j.at("lang_pair").at(0).get<std::string>(),
                 j.at("lang_pair").at(1).get<std::string>()};
  return r;
}

}  // namespace mtforge::records
