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

#ifndef MTFORGE_RECORDS_H_
#define MTFORGE_RECORDS_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mtforge/corpus.h"
#include "mtforge/decoding.h"

// File formats shared by the CLI and its tests. Object records are
// newline-delimited single-line JSON.
namespace mtforge::records {

using Json = nlohmann::ordered_json;

// Single-line dump; invalid UTF-8 is replaced rather than rejected.
std::string dump(const Json& j);

// ---- candidate pools ----------------------------------------------------

struct PoolRecord {
  decoding::CandidatePool pool;
  Json raw;  // the input object, echoed back on output
};

// Fields: id, source, source_lang, target_lang, candidates (array of strings).
std::vector<PoolRecord> parse_pools(std::string_view content);

// The input object plus chosen_index, chosen_text, scores and strategy.
std::string selection_line(const PoolRecord& record,
                           const decoding::SelectionResult& result);

// ---- parallel records ---------------------------------------------------

enum class RecordFormat { kTsv, kJsonl };

// ".jsonl"/".json" -> kJsonl, anything else kTsv.
RecordFormat format_from_path(std::string_view path);

// Language pair from "<name>.<src>-<tgt>.tsv", if present.
std::optional<std::pair<std::string, std::string>> pair_from_filename(std::string_view path);

// Lines "source\ttarget[\tquality]". An optional first line
// "#pair\t<src>\t<tgt>" names the pair; otherwise `pair` must be given.
std::vector<corpus::ParallelRecord> parse_tsv(
    std::string_view content,
    const std::optional<std::pair<std::string, std::string>>& pair);
// Writes the "#pair" header when `with_header` is set. Throws DataError when
// a field contains a tab or newline.
std::string format_tsv(std::span<const corpus::ParallelRecord> records, bool with_header);

// Fields: source, target, source_lang, target_lang, optional quality and
// provenance.
std::vector<corpus::ParallelRecord> parse_parallel_jsonl(std::string_view content);
std::string format_parallel_jsonl(std::span<const corpus::ParallelRecord> records);

// Fields: segment_id, translations (object tag -> text).
std::vector<corpus::MultiParallelRecord> parse_multiparallel_jsonl(std::string_view content);

// {"messages":[{"role":...,"content":...},...],"task_tag":...,"lang_pair":[src,tgt]}
std::string instruction_line(const corpus::InstructionRecord& record);
corpus::InstructionRecord parse_instruction_line(std::string_view line);

}  // namespace mtforge::records

#endif  // MTFORGE_RECORDS_H_
