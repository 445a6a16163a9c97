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

#include "mtforge/noise.h"

#include <cmath>
#include <utility>

#include "json.hpp"
#include "mtforge/error.h"
#include "mtforge/io.h"
#include "mtforge/parallel.h"
#include "mtforge/rng.h"
#include "mtforge/unicode.h"

namespace mtforge::noise {

NoiseKind parse_kind(std::string_view name) {
  if (name == "swap" || name == "adjacent_swap") return NoiseKind::kAdjacentSwap;
  if (name == "dup" || name == "duplication") return NoiseKind::kDuplication;
  if (name == "del" || name == "deletion") return NoiseKind::kDeletion;
  throw UsageError("unknown noise kind '" + std::string(name) + "' (swap, dup, del)");
}

std::string_view kind_name(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kAdjacentSwap: return "swap";
    case NoiseKind::kDuplication: return "dup";
    case NoiseKind::kDeletion: return "del";
  }
  return "?";
}

namespace {

void check_level(double level) {
  if (!(level >= 0.0 && level <= 1.0)) {
    throw UsageError("noise level must be in [0, 1]");
  }
}

}  // namespace

PerturbResult perturb_with_stats(std::string_view text, const NoiseSpec& spec) {
  check_level(spec.level);
  std::vector<std::string_view> units = unicode::split_scalars(text);
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (!unicode::is_whitespace(unicode::decode_unit(units[i]))) eligible.push_back(i);
  }
  PerturbResult result;
  result.eligible = eligible.size();
  if (spec.level == 0.0) {
    result.text = std::string(text);
    return result;
  }

  SplitMix64 rng(spec.seed);
  std::vector<bool> selected(units.size(), false);
  for (std::size_t pos : eligible) selected[pos] = rng.uniform() < spec.level;

  if (spec.kind == NoiseKind::kAdjacentSwap) {
    std::vector<bool> swapped(units.size(), false);
    for (std::size_t k = 0; k + 1 < eligible.size(); ++k) {
      const std::size_t a = eligible[k];
      const std::size_t b = eligible[k + 1];
      if (!selected[a] || swapped[a]) continue;
      std::swap(units[a], units[b]);
      swapped[a] = swapped[b] = true;
      ++result.events;
    }
    result.text.reserve(text.size());
    for (std::string_view u : units) result.text += u;
    return result;
  }

  result.text.reserve(text.size() * 2);
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (!selected[i]) {
      result.text += units[i];
      continue;
    }
    ++result.events;
    if (spec.kind == NoiseKind::kDuplication) {
      result.text += units[i];
      result.text += units[i];
    }
  }
  return result;
}

std::string perturb(std::string_view text, const NoiseSpec& spec) {
  return perturb_with_stats(text, spec).text;
}

std::uint64_t sentence_seed(std::uint64_t seed, std::uint64_t index) {
  return seed ^ mix64(index);
}

std::vector<std::string> perturb_corpus(std::span<const std::string> sentences,
                                        const NoiseSpec& spec,
                                        std::uint64_t first_index,
                                        std::size_t threads) {
  check_level(spec.level);
  std::vector<std::string> out(sentences.size());
  parallel_for(sentences.size(), threads, [&](std::size_t i) {
    NoiseSpec local = spec;
    local.seed = sentence_seed(spec.seed, first_index + i);
    out[i] = perturb(sentences[i], local);
  });
  return out;
}

CurveMetric parse_metric(std::string_view name) {
  if (name == "bleu") return CurveMetric::kBleu;
  if (name == "chrf") return CurveMetric::kChrf;
  throw UsageError("unknown metric '" + std::string(name) + "' (bleu, chrf)");
}

std::string_view metric_name(CurveMetric metric) {
  return metric == CurveMetric::kBleu ? "bleu" : "chrf";
}

textmetrics::MetricScore corpus_score(std::span<const std::string> hypotheses,
                                      std::span<const std::string> references,
                                      CurveMetric metric) {
  if (hypotheses.size() != references.size()) {
    throw DataError("hypothesis/reference line count mismatch");
  }
  if (metric == CurveMetric::kBleu) {
    std::vector<textmetrics::SegmentRefs> segs;
    segs.reserve(hypotheses.size());
    for (std::size_t i = 0; i < hypotheses.size(); ++i) {
      segs.push_back({hypotheses[i], {references[i]}});
    }
    return textmetrics::corpus_bleu(segs);
  }
  std::vector<textmetrics::SegmentRef> segs;
  segs.reserve(hypotheses.size());
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    segs.push_back({hypotheses[i], references[i]});
  }
  return textmetrics::corpus_chrf(segs);
}

namespace {

std::vector<std::string> translate_checked(const decoding::BatchTransformer& translator,
                                           const std::vector<std::string>& inputs,
                                           double level) {
  std::vector<std::string> out = translator(inputs);
  if (out.size() != inputs.size()) {
    throw DataError("translator returned " + std::to_string(out.size()) +
                    " lines for " + std::to_string(inputs.size()) +
                    " sources at level " + io::format_double(level));
  }
  return out;
}

}  // namespace

RobustnessCurve robustness_curve(std::span<const std::string> sources,
                                 std::span<const std::string> references,
                                 const decoding::BatchTransformer& translator,
                                 std::span<const double> levels, NoiseKind kind,
                                 std::uint64_t seed, CurveMetric metric,
                                 std::size_t threads) {
  if (sources.empty()) throw DataError("no source sentences");
  if (sources.size() != references.size()) {
    throw DataError("source/reference line count mismatch");
  }
  if (levels.empty()) throw UsageError("no noise levels");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    check_level(levels[i]);
    if (i > 0 && !(levels[i] > levels[i - 1])) {
      throw UsageError("noise levels must be strictly increasing");
    }
  }

  RobustnessCurve curve;
  curve.levels.assign(levels.begin(), levels.end());
  std::vector<textmetrics::MetricScore> scores;
  for (double level : levels) {
    const NoiseSpec spec{kind, level, seed};
    const auto noisy = perturb_corpus(sources, spec, 0, threads);
    const auto hyps = translate_checked(translator, noisy, level);
    scores.push_back(corpus_score(hyps, references, metric));
  }
  if (levels.front() == 0.0) {
    curve.baseline = scores.front();
  } else {
    const std::vector<std::string> clean(sources.begin(), sources.end());
    curve.baseline =
        corpus_score(translate_checked(translator, clean, 0.0), references, metric);
  }
  for (std::size_t i = 0; i < levels.size(); ++i) {
    curve.per_level.push_back(
        {levels[i], scores[i].value, textmetrics::relative_change(curve.baseline, scores[i])});
  }
  return curve;
}

std::string format_curve_table(const RobustnessCurve& curve) {
  std::string out = "level\tscore\trelative_change\n";
  for (const CurvePoint& p : curve.per_level) {
    out += io::format_double(p.level) + "\t" + io::format_double(p.score) + "\t" +
           io::format_double(p.relative_change) + "\n";
  }
  return out;
}

std::string format_curve_summary(const RobustnessCurve& curve, NoiseKind kind,
                                 std::uint64_t seed, CurveMetric metric) {
  nlohmann::ordered_json j;
  j["metric"] = metric_name(metric);
  j["kind"] = kind_name(kind);
  j["seed"] = seed;
  j["baseline"] = curve.baseline.value;
  j["segments"] = curve.baseline.segment_count;
  j["levels"] = curve.levels;
  const CurvePoint& last = curve.per_level.back();
  j["max_level"] = last.level;
  j["max_level_relative_change"] = last.relative_change;
  return j.dump();
}

}  // namespace mtforge::noise
