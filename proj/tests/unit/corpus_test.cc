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

#include <gtest/gtest.h>

#include <atomic>
#include <fstream>
#include <numeric>
#include <random>
#include <tuple>
#include <sstream>
#include <thread>

#include "mtforge/error.h"
#include "mtforge/io.h"
#include "mtforge/unicode.h"
#include "support/test_support.h"

namespace mtforge::corpus {
namespace {

ParallelRecord rec(std::string s, std::string t, std::string sl = "en", std::string tl = "de",
                   std::optional<double> q = std::nullopt) {
  return {std::move(s), std::move(t), std::move(sl), std::move(tl), q, std::nullopt};
}

TEST(Validate, Tags) {
  EXPECT_NO_THROW(validate(rec("a", "b")));
  EXPECT_THROW(validate(rec("a", "b", "en", "en")), DataError);
  EXPECT_THROW(validate(rec("a", "b", "", "de")), DataError);
  EXPECT_THROW(validate(rec("a", "b", "en", "de", std::nan(""))), DataError);
}

TEST(Normalize, Examples) {
  EXPECT_EQ(normalize_text("  Hello\xC2\xA0\xC2\xA0world \t"), "Hello world");
  EXPECT_EQ(normalize_text("\xE2\x80\x9Cquoted\xE2\x80\x9D it\xE2\x80\x99s"), "\"quoted\" it's");
  EXPECT_EQ(normalize_text("wait\xE2\x80\xA6"), "wait...");
  EXPECT_EQ(normalize_text("co\xC2\xADop\xE2\x80\x8B"), "coop");
  EXPECT_EQ(normalize_text("cafe\xCC\x81"), "caf\xC3\xA9");
  EXPECT_EQ(normalize_text("a\xE2\x80\x91" "b"), "a-b");
  // Dashes with their own meaning survive.
  EXPECT_EQ(normalize_text("a \xE2\x80\x94 b \xE2\x80\x93 c"), "a \xE2\x80\x94 b \xE2\x80\x93 c");
}

TEST(Normalize, TableMatchesDataFile) {
  std::ifstream in(std::string(MTFORGE_DATA_DIR) + "/punctuation-v1.tsv");
  ASSERT_TRUE(in);
  std::vector<std::pair<char32_t, std::u32string>> file;
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "# " + std::string(kPunctuationTableVersion));
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    const char32_t from = std::stoul(line.substr(2, tab - 2), nullptr, 16);
    std::u32string to;
    std::istringstream rest(line.substr(tab + 1));
    for (std::string cp; rest >> cp;) to += static_cast<char32_t>(std::stoul(cp.substr(2), nullptr, 16));
    file.emplace_back(from, to);
  }
  const auto table = punctuation_table();
  ASSERT_EQ(file.size(), table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    EXPECT_EQ(file[i].first, table[i].from) << i;
    EXPECT_EQ(unicode::encode(file[i].second), table[i].to) << i;
  }
}

TEST(Normalize, Idempotent) {
  for (const char* s : {"  a  b ", "\xE2\x80\x9C x \xE2\x80\x9D", "\xEF\xBB\xBF\xC2\xA0x\xE2\x80\x83",
                        "e\xCC\x81\xE2\x80\xA6", ""}) {
    const std::string once = normalize_text(s);
    EXPECT_EQ(normalize_text(once), once);
  }
}

TEST(Dedup, KeepsFirstOriginal) {
  const std::vector<ParallelRecord> in = {
      rec("Hello  world", "Hallo Welt", "en", "de", 0.1), rec("Hello world", "Hallo Welt"),
      rec("Hello world", "Hallo Welt", "en", "nl"), rec("hello world", "Hallo Welt")};
  const auto out = dedup(in);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0], in[0]);
  EXPECT_EQ(out[1], in[2]);
  EXPECT_EQ(out[2], in[3]);
}

TEST(Deduplicator, ConcurrentAdmission) {
  Deduplicator d;
  std::atomic<int> admitted = 0;
  std::vector<std::jthread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 500; ++i) admitted += d.admit(rec(std::to_string(i % 100), "x"));
    });
  }
  threads.clear();
  EXPECT_EQ(admitted.load(), 100);
  EXPECT_EQ(d.size(), 100u);
}

TEST(Filters, Quality) {
  const std::vector<ParallelRecord> in = {rec("a", "b", "en", "de", 0.9),
                                          rec("c", "d", "en", "de", 0.75),
                                          rec("e", "f", "en", "de", 0.2), rec("g", "h")};
  EXPECT_EQ(filter_quality(in, kDefaultQualityThreshold).size(), 2u);
  EXPECT_EQ(filter_quality(in, 0.75, MissingQuality::kPass).size(), 3u);
  EXPECT_EQ(filter_quality(in, 0.0, MissingQuality::kPass).size(), 4u);
}

TEST(Filters, Offtarget) {
  const LanguageDetector detect = [](const std::vector<std::string>& texts) {
    std::vector<std::string> out;
    for (const auto& t : texts) out.push_back(t.substr(0, 2));
    return out;
  };
  const std::vector<ParallelRecord> in = {rec("en one", "de eins"), rec("en two", "en two"),
                                          rec("fr x", "de y")};
  const auto out = filter_offtarget(in, detect);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0], in[0]);
  const LanguageDetector wrong = [](const std::vector<std::string>&) {
    return std::vector<std::string>{"en"};
  };
  EXPECT_THROW(filter_offtarget(in, wrong), ProtocolError);
}

TEST(Filters, CommandDetector) {
  const auto detect = command_detector(MTFORGE_MOCK_LANGID);
  EXPECT_EQ(detect({"Hello", "Здраво свете", "Grüße\nzwei"}),
            (std::vector<std::string>{"en", "sr", "de"}));
}

TEST(Pipeline, StepsInOrder) {
  EXPECT_EQ(parse_steps("normalize,dedup"), (std::vector<Step>{Step::kNormalize, Step::kDedup}));
  EXPECT_THROW(parse_steps("normalize,shuffle"), UsageError);
  PipelineConfig cfg;
  cfg.steps = {Step::kOfftarget};
  EXPECT_THROW(run_pipeline({rec("a", "b")}, cfg), UsageError);
  cfg.steps = {Step::kNormalize, Step::kDedup, Step::kQuality};
  const auto out = run_pipeline({rec(" a ", "b", "en", "de", 0.8), rec("a", "b", "en", "de", 0.9),
                                 rec("c", "d", "en", "de", 0.1)},
                                cfg);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].source, "a");
  EXPECT_EQ(out[0].quality, 0.8);
}

TEST(Templates, Cpt) {
  EXPECT_EQ(format_cpt(rec("Hello", "Hola", "en", "es"), default_language_names()),
            "English: Hello\nSpanish: Hola");
  EXPECT_THROW(format_cpt(rec("a", "b", "en", "xx-unknown"), default_language_names()), DataError);
}

TEST(Templates, Instruction) {
  const auto inst = format_instruction(rec("Hello", "Hola", "en", "es"), default_language_names());
  ASSERT_EQ(inst.messages.size(), 2u);
  EXPECT_EQ(inst.messages[0].role, Role::kUser);
  EXPECT_EQ(inst.messages[0].content,
            "Translate the following text from English to Spanish: \nEnglish: Hello\nSpanish:");
  EXPECT_EQ(inst.messages[1].role, Role::kAssistant);
  EXPECT_EQ(inst.messages[1].content, "Hola");
  EXPECT_EQ(inst.task_tag, kTranslationTaskTag);
  EXPECT_EQ(inst.lang_pair, std::make_pair(std::string("en"), std::string("es")));
  EXPECT_THROW(format_instruction(rec("Hello", "", "en", "es"), default_language_names()),
               DataError);
}

TEST(Templates, NamesFile) {
  support::TempDir dir;
  io::write_file(dir.file("n.tsv"), "bho\tBhojpuri\nen\tEnglish (US)\n");
  const auto names = read_language_names(dir.file("n.tsv"));
  EXPECT_EQ(names.at("bho"), "Bhojpuri");
  EXPECT_EQ(names.at("en"), "English (US)");
  EXPECT_EQ(names.at("de"), "German");
}

MultiParallelRecord multi(std::string id, std::map<std::string, std::string> t) {
  return {std::move(id), std::move(t)};
}

TEST(Pivot, EnumerationOrderAndExclusions) {
  const std::vector<MultiParallelRecord> recs = {
      multi("1", {{"en", "E1"}, {"de", "D1"}, {"sr", "S1"}, {"hi", "H1"}}),
      multi("2", {{"de", "D2"}, {"sr", "S2"}})};
  const auto groups = enumerate_pivot_candidates(recs, {"en", "de"});
  // en<->de is pivot-pivot and never produced.
  EXPECT_FALSE(groups.contains({"en", "de"}));
  EXPECT_FALSE(groups.contains({"sr", "hi"}));
  ASSERT_TRUE(groups.contains({"de", "sr"}));
  const auto& de_sr = groups.at({"de", "sr"});
  ASSERT_EQ(de_sr.size(), 2u);
  EXPECT_EQ(de_sr[0].record.source, "D1");
  EXPECT_EQ(de_sr[1].record.source, "D2");
  EXPECT_LT(de_sr[0].order, de_sr[1].order);
  // Record 1: de->hi, hi->de, de->sr, sr->de, en->hi, hi->en, en->sr, sr->en.
  EXPECT_EQ(groups.at({"de", "hi"})[0].order, 0u);
  EXPECT_EQ(groups.at({"hi", "de"})[0].order, 1u);
  EXPECT_EQ(groups.at({"sr", "en"})[0].order, 7u);
  EXPECT_EQ(groups.size(), 8u);
}

TEST(Pivot, DuplicateContentCountsOnce) {
  const std::vector<MultiParallelRecord> recs = {multi("1", {{"en", "E"}, {"sr", "S"}}),
                                                 multi("2", {{"en", "E"}, {"sr", "S"}}),
                                                 multi("3", {{"en", "E"}, {"sr", "T"}})};
  const auto groups = enumerate_pivot_candidates(recs, {"en"});
  EXPECT_EQ(groups.at({"en", "sr"}).size(), 2u);
  EXPECT_EQ(groups.at({"sr", "en"}).size(), 2u);
}

TEST(Pivot, SampleIndices) {
  EXPECT_EQ(sample_indices(5, 10, 1), (std::vector<std::size_t>{0, 1, 2, 3, 4}));
  EXPECT_TRUE(sample_indices(0, 3, 1).empty());
  const auto s = sample_indices(100, 10, 77);
  EXPECT_EQ(s.size(), 10u);
  EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
  EXPECT_EQ(std::set<std::size_t>(s.begin(), s.end()).size(), 10u);
  EXPECT_EQ(sample_indices(100, 10, 77), s);
  EXPECT_NE(sample_indices(100, 10, 78), s);
}

TEST(Pivot, SampleIndicesUniform) {
  std::vector<int> hits(20, 0);
  for (std::uint64_t seed = 0; seed < 4000; ++seed) {
    for (std::size_t i : sample_indices(20, 5, seed)) ++hits[i];
  }
  // Expected 1000 each; sd about 27.
  for (int h : hits) EXPECT_NEAR(h, 1000, 150);
}

TEST(Pivot, BuildCapsAndSeeds) {
  std::vector<MultiParallelRecord> recs;
  for (int i = 0; i < 30; ++i) {
    recs.push_back(multi(std::to_string(i), {{"en", "E" + std::to_string(i)},
                                             {"sr", "S" + std::to_string(i)},
                                             {"hi", "H" + std::to_string(i % 3)}}));
  }
  const auto built = build_pivot_instructions(recs, {{"en"}, 5, 11}, default_language_names());
  std::map<std::pair<std::string, std::string>, int> counts;
  for (const auto& b : built) ++counts[b.lang_pair];
  EXPECT_EQ(counts[std::make_pair(std::string("en"), std::string("sr"))], 5);
  EXPECT_EQ(counts[std::make_pair(std::string("en"), std::string("hi"))], 5);
  EXPECT_EQ(build_pivot_instructions(recs, {{"en"}, 5, 11}, default_language_names()), built);
  EXPECT_NE(build_pivot_instructions(recs, {{"en"}, 5, 12}, default_language_names()), built);
  EXPECT_EQ(pair_seed(11, "en", "sr"), pair_seed(11, "en", "sr"));
  EXPECT_NE(pair_seed(11, "en", "sr"), pair_seed(11, "sr", "en"));
}

// Enumerates and samples without touching the library's helpers.
std::vector<std::tuple<std::string, std::string, std::string, std::string>> pivot_oracle(
    const std::vector<MultiParallelRecord>& recs, const std::set<std::string>& pivots,
    std::size_t cap, std::uint64_t seed) {
  using Cand = std::pair<std::string, std::string>;
  std::map<std::pair<std::string, std::string>, std::vector<Cand>> groups;
  std::set<Cand> seen;
  for (const auto& r : recs) {
    for (const auto& p : pivots) {
      if (!r.translations.contains(p)) continue;
      const std::string& pt = r.translations.at(p);
      for (const auto& [x, xt] : r.translations) {
        if (pivots.contains(x)) continue;
        if (seen.insert({pt, xt}).second) groups[{p, x}].push_back({pt, xt});
        if (seen.insert({xt, pt}).second) groups[{x, p}].push_back({xt, pt});
      }
    }
  }
  std::vector<std::tuple<std::string, std::string, std::string, std::string>> out;
  for (const auto& [pair, cands] : groups) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : pair.first + '\x1f' + pair.second) {
      h = (h ^ c) * 1099511628211ULL;
    }
    std::uint64_t state = seed ^ h;
    const auto next = [&state] {
      state += 0x9E3779B97F4A7C15ULL;
      std::uint64_t z = state;
      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
      z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
      return z ^ (z >> 31);
    };
    const std::size_t n = cands.size(), k = std::min(cap, n);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < k; ++i) {
      const std::uint64_t bound = n - i;
      std::uint64_t r;
      do {
        r = next();
      } while (r < (0 - bound) % bound);
      std::swap(idx[i], idx[i + r % bound]);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    for (std::size_t i : idx) {
      out.emplace_back(pair.first, pair.second, cands[i].first, cands[i].second);
    }
  }
  return out;
}

TEST(Pivot, MatchesIndependentOracle) {
  std::mt19937_64 rng(8);
  const std::vector<std::string> tags = {"ca", "de", "en", "es", "gl"};
  std::uniform_int_distribution<int> coin(0, 2), word(0, 300);
  std::vector<MultiParallelRecord> recs;
  for (int i = 0; i < 1000; ++i) {
    MultiParallelRecord m{std::to_string(i), {}};
    for (const auto& t : tags) {
      if (coin(rng) != 0) m.translations[t] = t + std::to_string(word(rng));
    }
    if (m.translations.size() < 2) m.translations = {{"en", "e"}, {"gl", "g"}};
    recs.push_back(std::move(m));
  }
  const std::set<std::string> pivots = {"en", "ca"};
  const auto built = build_pivot_instructions(recs, {pivots, 50, 2024}, default_language_names());
  const auto expected = pivot_oracle(recs, pivots, 50, 2024);
  ASSERT_EQ(built.size(), expected.size());
  for (std::size_t i = 0; i < built.size(); ++i) {
    const auto& [s, t, src, tgt] = expected[i];
    EXPECT_EQ(built[i].lang_pair, std::make_pair(s, t)) << i;
    EXPECT_NE(built[i].messages[0].content.find("\n" + default_language_names().at(s) + ": " +
                                                src + "\n"),
              std::string::npos)
        << i;
    EXPECT_EQ(built[i].messages[1].content, tgt) << i;
  }
}

TEST(Pivot, NoPivotsIsUsageError) {
  const std::vector<MultiParallelRecord> recs = {multi("1", {{"en", "E"}, {"sr", "S"}})};
  EXPECT_THROW(build_pivot_instructions(recs, {{}, 5, 1}, default_language_names()), UsageError);
}

}  // namespace
}  // namespace mtforge::corpus
