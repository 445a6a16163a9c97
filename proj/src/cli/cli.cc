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

#include "mtforge/cli.h"

#include <unicode/uvernum.h>

#include <algorithm>
#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "mtforge/corpus.h"
#include "mtforge/decoding.h"
#include "mtforge/error.h"
#include "mtforge/io.h"
#include "mtforge/kernels/kernels.h"
#include "mtforge/noise.h"
#include "mtforge/parallel.h"
#include "mtforge/records.h"
#include "mtforge/scorer.h"
#include "mtforge/textmetrics.h"
#include "mtforge/translit.h"
#include "mtforge/vocab.h"

namespace mtforge::cli {
namespace {

using records::Json;

struct Common {
  std::size_t threads = default_thread_count();
  std::string output;
  std::string manifest;
  bool verbose = false;
};

struct ScoreArgs {
  std::string metric;
  std::string hyp;
  std::vector<std::string> refs;
  bool sentence = false;
  int max_order = 4;
  int char_order = 6;
  double beta = 2.0;
};

struct BridgeArgs {
  int timeout_ms = 60000;
  std::size_t max_in_flight = 16;
};

struct Args {
  Common common;
  ScoreArgs score;
  BridgeArgs bridge;
  std::string tokenizer;
  std::string input;
  std::string pools;
  std::string scorer;
  std::string qe_scorer;
  bool dedup = false;
  std::string cmd;
  std::string delimiter = "\\n\\n";
  std::string kind;
  double level = 0.0;
  std::optional<std::uint64_t> seed;
  std::uint64_t first_index = 0;
  std::string src;
  std::string ref;
  std::string levels = "0,0.1,0.25,0.5,0.75,1.0";
  std::string metric = "bleu";
  std::string steps = "normalize,dedup,offtarget,quality";
  double threshold = corpus::kDefaultQualityThreshold;
  std::string langid_cmd;
  std::string missing_quality = "drop";
  std::string format;
  std::string src_lang;
  std::string tgt_lang;
  std::string emit = "records";
  std::string pivots;
  std::size_t cap = 0;
  std::string names;
  std::string old_vocab;
  std::string old_emb;
  std::string new_vocab;
  std::string out_path;
  std::string emb_format = "bin";
  std::string vocab_a;
  std::string vocab_b;
};

std::vector<std::string> split_list(std::string_view list) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t comma = std::min(list.find(',', start), list.size());
    if (comma > start) out.emplace_back(list.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

std::vector<double> parse_levels(std::string_view list) {
  std::vector<double> levels;
  for (const std::string& item : split_list(list)) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw UsageError("bad noise level '" + item + "'");
    levels.push_back(v);
  }
  return levels;
}

scoring::ExternalScorerOptions bridge_options(const BridgeArgs& b) {
  scoring::ExternalScorerOptions o;
  o.timeout = std::chrono::milliseconds(b.timeout_ms);
  o.max_in_flight = b.max_in_flight;
  return o;
}

corpus::LanguageNames load_names(const std::string& path) {
  return path.empty() ? corpus::default_language_names() : corpus::read_language_names(path);
}

// ---- subcommand bodies: each returns the data written to the output ------

std::string run_score(const Args& a) {
  const auto hyps = io::read_lines(a.score.hyp);
  std::vector<std::vector<std::string>> refs;
  for (const std::string& path : a.score.refs) {
    refs.push_back(io::read_lines(path));
    if (refs.back().size() != hyps.size()) {
      throw DataError("reference file " + path + " has " +
                      std::to_string(refs.back().size()) + " lines, hypothesis file has " +
                      std::to_string(hyps.size()));
    }
  }
  if (hyps.empty()) throw DataError("empty hypothesis file");
  std::string out;
  if (a.score.metric == "bleu") {
    std::vector<textmetrics::SegmentRefs> segs;
    for (std::size_t i = 0; i < hyps.size(); ++i) {
      textmetrics::SegmentRefs seg{hyps[i], {}};
      for (const auto& r : refs) seg.references.push_back(r[i]);
      segs.push_back(std::move(seg));
    }
    if (a.score.sentence) {
      auto cfg = textmetrics::BleuConfig::sentence_default();
      cfg.max_order = a.score.max_order;
      for (const auto& seg : segs) {
        out += io::format_double(
                   textmetrics::sentence_bleu(seg.hypothesis, seg.references, cfg).value) +
               "\n";
      }
    } else {
      auto cfg = textmetrics::BleuConfig::corpus_default();
      cfg.max_order = a.score.max_order;
      out = io::format_double(textmetrics::corpus_bleu(segs, cfg).value) + "\n";
    }
    return out;
  }
  if (refs.size() != 1) throw UsageError("chrf takes exactly one --ref");
  const textmetrics::ChrfConfig cfg{a.score.char_order, a.score.beta};
  if (a.score.sentence) {
    for (std::size_t i = 0; i < hyps.size(); ++i) {
      out += io::format_double(textmetrics::chrf(hyps[i], refs[0][i], cfg).value) + "\n";
    }
    return out;
  }
  std::vector<textmetrics::SegmentRef> segs;
  for (std::size_t i = 0; i < hyps.size(); ++i) segs.push_back({hyps[i], refs[0][i]});
  return io::format_double(textmetrics::corpus_chrf(segs, cfg).value) + "\n";
}

std::string run_fertility(const Args& a) {
  const auto tokenizer = textmetrics::TokenizerSpec::parse(a.tokenizer);
  const auto report = textmetrics::fertility(tokenizer, io::read_lines(a.input));
  Json j;
  j["tokens"] = report.token_count;
  j["words"] = report.word_count;
  j["fertility"] = report.fertility;
  return records::dump(j) + "\n";
}

std::string run_selection(const Args& a, bool mbr) {
  const auto pools = records::parse_pools(io::read_file(a.pools));
  auto scorer = scoring::make_scorer(mbr ? a.scorer : a.qe_scorer, bridge_options(a.bridge),
                                     a.common.threads);
  scoring::require_mode(*scorer, mbr ? scoring::ScoreMode::kUtility : scoring::ScoreMode::kQe);
  std::string out;
  for (const auto& rec : pools) {
    const auto result = mbr ? decoding::mbr_select(rec.pool, *scorer, {a.dedup})
                            : decoding::trr_select(rec.pool, *scorer);
    out += records::selection_line(rec, result) + "\n";
  }
  return out;
}

std::string run_chunk_translate(const Args& a) {
  return decoding::chunked_transform(io::read_file(a.input),
                                     decoding::command_transformer(a.cmd),
                                     unescape_line(a.delimiter));
}

std::string run_perturb(const Args& a) {
  const noise::NoiseSpec spec{noise::parse_kind(a.kind), a.level, *a.seed};
  return io::join_lines(
      noise::perturb_corpus(io::read_lines(a.input), spec, a.first_index, a.common.threads));
}

std::string run_robustness(const Args& a) {
  const auto sources = io::read_lines(a.src);
  const auto refs = io::read_lines(a.ref);
  const auto levels = parse_levels(a.levels);
  const auto kind = noise::parse_kind(a.kind);
  const auto metric = noise::parse_metric(a.metric);
  const auto curve =
      noise::robustness_curve(sources, refs, decoding::command_transformer(a.cmd), levels,
                              kind, *a.seed, metric, a.common.threads);
  return noise::format_curve_table(curve) +
         noise::format_curve_summary(curve, kind, *a.seed, metric) + "\n";
}

std::string run_pipeline(const Args& a) {
  const std::string content = io::read_file(a.input);
  const auto fmt = a.format.empty() ? records::format_from_path(a.input)
                   : a.format == "jsonl" ? records::RecordFormat::kJsonl
                   : a.format == "tsv"   ? records::RecordFormat::kTsv
                                         : throw UsageError("unknown format " + a.format);
  std::vector<corpus::ParallelRecord> recs;
  if (fmt == records::RecordFormat::kJsonl) {
    recs = records::parse_parallel_jsonl(content);
  } else {
    std::optional<std::pair<std::string, std::string>> pair;
    if (!a.src_lang.empty() || !a.tgt_lang.empty()) {
      if (a.src_lang.empty() || a.tgt_lang.empty()) {
        throw UsageError("--src-lang and --tgt-lang go together");
      }
      pair = std::make_pair(a.src_lang, a.tgt_lang);
    } else if (!content.starts_with("#pair\t")) {
      pair = records::pair_from_filename(a.input);
    }
    recs = records::parse_tsv(content, pair);
  }

  corpus::PipelineConfig cfg;
  cfg.steps = corpus::parse_steps(a.steps);
  cfg.threshold = a.threshold;
  if (a.missing_quality == "drop") {
    cfg.missing_quality = corpus::MissingQuality::kDrop;
  } else if (a.missing_quality == "pass") {
    cfg.missing_quality = corpus::MissingQuality::kPass;
  } else {
    throw UsageError("--missing-quality must be drop or pass");
  }
  if (std::find(cfg.steps.begin(), cfg.steps.end(), corpus::Step::kOfftarget) !=
      cfg.steps.end()) {
    if (a.langid_cmd.empty()) throw UsageError("the offtarget step needs --langid-cmd");
    cfg.detector = corpus::command_detector(a.langid_cmd);
  }
  const auto kept = corpus::run_pipeline(std::move(recs), cfg);

  if (a.emit == "records") {
    return fmt == records::RecordFormat::kJsonl ? records::format_parallel_jsonl(kept)
                                                : records::format_tsv(kept, true);
  }
  const auto names = load_names(a.names);
  std::string out;
  for (const auto& r : kept) {
    if (a.emit == "cpt") {
      Json j;
      j["text"] = corpus::format_cpt(r, names);
      out += records::dump(j) + "\n";
    } else if (a.emit == "instruction") {
      out += records::instruction_line(corpus::format_instruction(r, names)) + "\n";
    } else {
      throw UsageError("--emit must be records, cpt or instruction");
    }
  }
  return out;
}

std::string run_build_instructions(const Args& a) {
  const auto recs = records::parse_multiparallel_jsonl(io::read_file(a.input));
  corpus::PivotConfig cfg;
  for (const std::string& p : split_list(a.pivots)) cfg.pivots.insert(p);
  cfg.cap_per_pair = a.cap;
  cfg.seed = *a.seed;
  std::string out;
  for (const auto& inst : corpus::build_pivot_instructions(recs, cfg, load_names(a.names))) {
    out += records::instruction_line(inst) + "\n";
  }
  return out;
}

std::string run_translit(const Args& a) {
  return corpus::transliterate_sr_cyrl_to_latn(io::read_file(a.input));
}

std::string run_vocab_adapt(const Args& a) {
  const VocabMap old_vocab = VocabMap::read(a.old_vocab);
  const VocabMap new_vocab = VocabMap::read(a.new_vocab);
  const EmbeddingMatrix old_emb = read_embeddings(a.old_emb);
  const EmbeddingMatrix adapted = adapt_embeddings(old_vocab, old_emb, new_vocab);
  if (a.emb_format != "bin" && a.emb_format != "text") {
    throw UsageError("--format must be bin or text");
  }
  write_embeddings(a.out_path, adapted,
                   a.emb_format == "bin" ? EmbeddingFormat::kBinary : EmbeddingFormat::kText);
  const auto report = overlap_report(old_vocab, new_vocab);
  Json j;
  j["rows"] = adapted.rows;
  j["dim"] = adapted.dim;
  j["retained"] = report.intersection;
  j["mean_initialized"] = adapted.rows - report.intersection;
  return records::dump(j) + "\n";
}

std::string run_vocab_overlap(const Args& a) {
  const auto report = overlap_report(VocabMap::read(a.vocab_a), VocabMap::read(a.vocab_b));
  Json j;
  j["intersection"] = report.intersection;
  j["a_size"] = report.old_size;
  j["b_size"] = report.new_size;
  j["overlap"] = report.fraction_of_new;
  j["overlap_of_a"] = report.fraction_of_old;
  return records::dump(j) + "\n";
}

void write_manifest(const Args& a, const std::string& subcommand,
                    const std::vector<std::string>& argv) {
  Json j;
  j["tool"] = "mtforge";
  j["version"] = kVersion;
  j["subcommand"] = subcommand;
  j["args"] = argv;
  if (a.seed) j["seed"] = *a.seed;
  j["threads"] = a.common.threads;
  j["isa"] = kernels::isa_name(kernels::active().isa);
  j["icu"] = U_ICU_VERSION;
  io::write_file(a.common.manifest, records::dump(j) + "\n");
}

}  // namespace

int dispatch(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  Args a;
  CLI::App app{"mtforge: quality-aware selection, metrics, noise, corpus and vocabulary tools"};
  app.name("mtforge");
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kVersion);
  app.add_option("--threads", a.common.threads, "Worker threads")
      ->check(CLI::PositiveNumber);
  app.add_option("-o,--output", a.common.output, "Write data here instead of stdout");
  app.add_option("--manifest", a.common.manifest,
                 "Write a single-line provenance object to this file");
  app.add_flag("-v,--verbose", a.common.verbose, "Log progress to stderr");

  const auto add_bridge = [&](CLI::App* sub) {
    sub->add_option("--timeout-ms", a.bridge.timeout_ms, "Per-request scorer timeout")
        ->check(CLI::PositiveNumber);
    sub->add_option("--max-in-flight", a.bridge.max_in_flight,
                    "Pipelined requests for concurrent scorers")
        ->check(CLI::PositiveNumber);
  };

  std::map<CLI::App*, std::function<std::string()>> handlers;

  auto* score = app.add_subcommand("score", "Corpus or sentence BLEU/ChrF");
  score->add_option("--metric", a.score.metric)->required()->check(CLI::IsMember({"bleu", "chrf"}));
  score->add_option("--hyp", a.score.hyp)->required()->check(CLI::ExistingFile);
  score->add_option("--ref", a.score.refs)->required()->check(CLI::ExistingFile);
  score->add_flag("--sentence", a.score.sentence, "One score per line");
  score->add_option("--max-order", a.score.max_order)->check(CLI::PositiveNumber);
  score->add_option("--char-order", a.score.char_order)->check(CLI::PositiveNumber);
  score->add_option("--beta", a.score.beta)->check(CLI::PositiveNumber);
  handlers[score] = [&] { return run_score(a); };

  auto* fert = app.add_subcommand("fertility", "Tokens per word of a tokenizer");
  fert->add_option("--tokenizer", a.tokenizer,
                   "whitespace | character | vocab:<file> | cmd:<command>")
      ->required();
  fert->add_option("--input", a.input)->required()->check(CLI::ExistingFile);
  handlers[fert] = [&] { return run_fertility(a); };

  auto* mbr = app.add_subcommand("mbr", "Minimum Bayes risk selection over candidate pools");
  mbr->add_option("--pools", a.pools)->required()->check(CLI::ExistingFile);
  mbr->add_option("--scorer", a.scorer, "builtin:chrf|bleu|exact or cmd:<command>")->required();
  mbr->add_flag("--dedup", a.dedup, "Collapse duplicate candidates, weighted by count");
  add_bridge(mbr);
  handlers[mbr] = [&] { return run_selection(a, true); };

  auto* rerank = app.add_subcommand("rerank", "Quality-estimation re-ranking");
  rerank->add_option("--pools", a.pools)->required()->check(CLI::ExistingFile);
  rerank->add_option("--qe-scorer", a.qe_scorer, "cmd:<command> speaking mtscore/1 in qe mode")
      ->required();
  add_bridge(rerank);
  handlers[rerank] = [&] { return run_selection(a, false); };

  auto* chunk = app.add_subcommand("chunk-translate", "Translate a document chunk by chunk");
  chunk->add_option("--input", a.input)->required()->check(CLI::ExistingFile);
  chunk->add_option("--cmd", a.cmd, "Line-filter translator command")->required();
  chunk->add_option("--delimiter", a.delimiter, "Chunk delimiter (escapes allowed)");
  handlers[chunk] = [&] { return run_chunk_translate(a); };

  auto* perturb = app.add_subcommand("perturb", "Character-level noise");
  perturb->add_option("--kind", a.kind)->required()->check(CLI::IsMember({"swap", "dup", "del"}));
  perturb->add_option("--level", a.level)->required()->check(CLI::Range(0.0, 1.0));
  perturb->add_option("--seed", a.seed)->required();
  perturb->add_option("--input", a.input)->required()->check(CLI::ExistingFile);
  perturb->add_option("--first-index", a.first_index, "Ordinal of the first input line");
  handlers[perturb] = [&] { return run_perturb(a); };

  auto* robust = app.add_subcommand("robustness", "Score degradation under input noise");
  robust->add_option("--src", a.src)->required()->check(CLI::ExistingFile);
  robust->add_option("--ref", a.ref)->required()->check(CLI::ExistingFile);
  robust->add_option("--cmd", a.cmd, "Line-filter translator command")->required();
  robust->add_option("--levels", a.levels, "Comma-separated noise levels");
  robust->add_option("--kind", a.kind)->required()->check(CLI::IsMember({"swap", "dup", "del"}));
  robust->add_option("--seed", a.seed)->required();
  robust->add_option("--metric", a.metric)->check(CLI::IsMember({"bleu", "chrf"}));
  handlers[robust] = [&] { return run_robustness(a); };

  auto* pipe = app.add_subcommand("pipeline", "Parallel-corpus curation");
  pipe->add_option("--input", a.input)->required()->check(CLI::ExistingFile);
  pipe->add_option("--steps", a.steps, "Comma-separated: normalize,dedup,offtarget,quality");
  pipe->add_option("--threshold", a.threshold, "Minimum quality score");
  pipe->add_option("--langid-cmd", a.langid_cmd, "Language identification command");
  pipe->add_option("--missing-quality", a.missing_quality, "drop | pass");
  pipe->add_option("--format", a.format, "tsv | jsonl (default: from extension)");
  pipe->add_option("--src-lang", a.src_lang, "Source tag for TSV input");
  pipe->add_option("--tgt-lang", a.tgt_lang, "Target tag for TSV input");
  pipe->add_option("--emit", a.emit, "records | cpt | instruction");
  pipe->add_option("--names", a.names, "Language display names (tag<TAB>name)")
      ->check(CLI::ExistingFile);
  handlers[pipe] = [&] { return run_pipeline(a); };

  auto* build = app.add_subcommand("build-instructions", "Balanced pivot instructions");
  build->add_option("--input", a.input)->required()->check(CLI::ExistingFile);
  build->add_option("--pivots", a.pivots, "Comma-separated pivot tags")->required();
  build->add_option("--cap", a.cap, "Instructions per language pair")
      ->required()
      ->check(CLI::PositiveNumber);
  build->add_option("--seed", a.seed)->required();
  build->add_option("--names", a.names)->check(CLI::ExistingFile);
  handlers[build] = [&] { return run_build_instructions(a); };

  auto* translit = app.add_subcommand("translit-sr", "Serbian Cyrillic to Latin");
  translit->add_option("--input", a.input)->required()->check(CLI::ExistingFile);
  handlers[translit] = [&] { return run_translit(a); };

  auto* adapt = app.add_subcommand("vocab-adapt", "Embedding surgery for a new vocabulary");
  adapt->add_option("--old-vocab", a.old_vocab)->required()->check(CLI::ExistingFile);
  adapt->add_option("--old-emb", a.old_emb)->required()->check(CLI::ExistingFile);
  adapt->add_option("--new-vocab", a.new_vocab)->required()->check(CLI::ExistingFile);
  adapt->add_option("--out", a.out_path)->required();
  adapt->add_option("--format", a.emb_format, "bin | text");
  handlers[adapt] = [&] { return run_vocab_adapt(a); };

  auto* overlap = app.add_subcommand("vocab-overlap", "Shared-token fraction of two vocabularies");
  overlap->add_option("--a", a.vocab_a, "Old vocabulary")->required()->check(CLI::ExistingFile);
  overlap->add_option("--b", a.vocab_b, "New vocabulary")->required()->check(CLI::ExistingFile);
  handlers[overlap] = [&] { return run_vocab_overlap(a); };

  try {
    std::vector<std::string> reversed(argv.rbegin(), argv.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    if (code == 0) return kExitOk;
    return kExitUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  try {
    if (a.common.verbose) err << "mtforge: running " << chosen->get_name() << "\n";
    const std::string data = handlers.at(chosen)();
    if (a.common.output.empty()) {
      out << data;
      out.flush();
    } else {
      io::write_file(a.common.output, data);
    }
    if (!a.common.manifest.empty()) write_manifest(a, chosen->get_name(), argv);
    return kExitOk;
  } catch (const Error& e) {
    err << "mtforge " << chosen->get_name() << ": " << e.what() << "\n";
    return e.kind() == ErrorKind::kUsage ? kExitUsage : kExitData;
  } catch (const std::exception& e) {
    err << "mtforge " << chosen->get_name() << ": " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace mtforge::cli
