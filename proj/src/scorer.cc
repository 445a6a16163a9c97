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

#include "mtforge/scorer.h"

#include <cmath>
#include <deque>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "mtforge/parallel.h"
#include "mtforge/textmetrics.h"

namespace mtforge::scoring {

using nlohmann::json;

std::string_view mode_name(ScoreMode mode) {
  return mode == ScoreMode::kUtility ? "utility" : "qe";
}

void require_mode(const Scorer& scorer, ScoreMode required) {
  if (scorer.mode() != required) {
    throw ProtocolError("scorer " + scorer.name() + " runs in " +
                        std::string(mode_name(scorer.mode())) + " mode but " +
                        std::string(mode_name(required)) + " mode is required");
  }
}

std::vector<ScoreResponse> Scorer::score_batch(std::span<const ScoreRequest> requests) {
  std::unordered_set<std::string_view> ids;
  for (const ScoreRequest& r : requests) {
    if (r.mode() != mode()) {
      throw UsageError("request " + r.id + " is a " + std::string(mode_name(r.mode())) +
                       " request but scorer " + name() + " runs in " +
                       std::string(mode_name(mode())) + " mode");
    }
    if (!ids.insert(r.id).second) throw UsageError("duplicate request id " + r.id);
  }
  const std::vector<double> scores = score_impl(requests);
  std::vector<ScoreResponse> out;
  out.reserve(requests.size());
  for (std::size_t i = 0; i < requests.size(); ++i) {
    if (!std::isfinite(scores[i])) {
      throw ScoreError(requests[i].id, "non-finite score for request " + requests[i].id);
    }
    out.push_back({requests[i].id, scores[i]});
  }
  return out;
}

BuiltinScorer::BuiltinScorer(Kind kind, std::size_t threads)
    : kind_(kind), threads_(threads) {}

std::string BuiltinScorer::name() const {
  switch (kind_) {
    case Kind::kChrf: return "builtin:chrf";
    case Kind::kBleu: return "builtin:bleu";
    case Kind::kExact: return "builtin:exact";
  }
  return "builtin";
}

double BuiltinScorer::score_one(const ScoreRequest& request) const {
  const std::string& ref = request.reference.value();
  switch (kind_) {
    case Kind::kChrf:
      return textmetrics::chrf(request.hypothesis, ref).value;
    case Kind::kBleu: {
      const std::string refs[] = {ref};
      return textmetrics::sentence_bleu(request.hypothesis, refs).value;
    }
    case Kind::kExact:
      return request.hypothesis == ref ? 1.0 : 0.0;
  }
  return 0.0;
}

std::vector<double> BuiltinScorer::score_impl(std::span<const ScoreRequest> requests) {
  std::vector<double> scores(requests.size());
  parallel_for(requests.size(), threads_, [&](std::size_t i) {
    try {
      scores[i] = score_one(requests[i]);
    } catch (const Error& e) {
      throw ScoreError(requests[i].id, e.what());
    }
  });
  return scores;
}

FunctionScorer::FunctionScorer(ScoreMode mode, Fn fn, bool concurrent,
                               std::size_t threads, std::string name)
    : mode_(mode),
      fn_(std::move(fn)),
      concurrent_(concurrent),
      threads_(concurrent ? threads : 1),
      name_(std::move(name)) {}

std::vector<double> FunctionScorer::score_impl(std::span<const ScoreRequest> requests) {
  std::vector<double> scores(requests.size());
  parallel_for(requests.size(), threads_, [&](std::size_t i) {
    try {
      scores[i] = fn_(requests[i]);
    } catch (const ScoreError&) {
      throw;
    } catch (const std::exception& e) {
      throw ScoreError(requests[i].id, e.what());
    }
  });
  return scores;
}

Handshake parse_handshake(std::string_view line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw ProtocolError("bad handshake: not a JSON object");
  }
  Handshake h;
  if (!j.contains("protocol") || !j["protocol"].is_string()) {
    throw ProtocolError("bad handshake: missing protocol");
  }
  h.protocol = j["protocol"].get<std::string>();
  if (h.protocol != kProtocolVersion) {
    throw ProtocolError("bad handshake: unsupported protocol " + h.protocol);
  }
  if (!j.contains("mode") || !j["mode"].is_string()) {
    throw ProtocolError("bad handshake: missing mode");
  }
  const std::string mode = j["mode"].get<std::string>();
  if (mode == "utility") {
    h.mode = ScoreMode::kUtility;
  } else if (mode == "qe") {
    h.mode = ScoreMode::kQe;
  } else {
    throw ProtocolError("bad handshake: unknown mode " + mode);
  }
  if (!j.contains("concurrent") || !j["concurrent"].is_boolean()) {
    throw ProtocolError("bad handshake: missing concurrent flag");
  }
  h.concurrent = j["concurrent"].get<bool>();
  return h;
}

std::string encode_request(const ScoreRequest& request) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  j["id"] = request.id;
  if (request.source) j["source"] = *request.source;
  j["hypothesis"] = request.hypothesis;
  if (request.reference) j["reference"] = *request.reference;
  return j.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace);
}

ScoreResponse decode_response(std::string_view line, std::size_t line_number) {
  const std::string where = " at line " + std::to_string(line_number);
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw ProtocolError("malformed response" + where);
  }
  if (!j.contains("id") || !j["id"].is_string()) {
    throw ProtocolError("response without id" + where);
  }
  ScoreResponse r;
  r.id = j["id"].get<std::string>();
  if (!j.contains("score") || !j["score"].is_number()) {
    throw ScoreError(r.id, "response without numeric score" + where);
  }
  r.score = j["score"].get<double>();
  if (!std::isfinite(r.score)) {
    throw ScoreError(r.id, "non-finite score" + where);
  }
  return r;
}

ExternalScorer::ExternalScorer(const std::string& command,
                               ExternalScorerOptions options)
    : options_(options), process_(command) {
  std::string line;
  const auto status = process_.read_line(line, Clock::now() + options_.timeout);
  if (status == Subprocess::ReadStatus::kTimeout) {
    throw ProtocolError("no handshake from scorer: " + command);
  }
  if (status == Subprocess::ReadStatus::kEof) {
    throw ProtocolError("scorer exited before handshake: " + command);
  }
  lines_read_ = 1;
  handshake_ = parse_handshake(line);
}

std::size_t ExternalScorer::in_flight_limit() const {
  return handshake_.concurrent ? std::max<std::size_t>(1, options_.max_in_flight) : 1;
}

std::vector<double> ExternalScorer::score_impl(std::span<const ScoreRequest> requests) {
  if (broken_) throw ProtocolError("scorer " + name() + " failed earlier");
  // Any failure leaves unanswered requests in the pipe.
  broken_ = true;

  std::unordered_map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < requests.size(); ++i) index.emplace(requests[i].id, i);

  std::vector<double> scores(requests.size());
  std::vector<bool> done(requests.size(), false);
  // Sent but unanswered, oldest first.
  std::deque<std::pair<std::size_t, Clock::time_point>> pending;
  std::unordered_set<std::size_t> pending_set;
  const std::size_t cap = in_flight_limit();
  std::size_t next = 0;
  std::size_t completed = 0;
  std::string line;

  while (completed < requests.size()) {
    while (next < requests.size() && pending_set.size() < cap) {
      process_.send(encode_request(requests[next]) + "\n");
      pending.emplace_back(next, Clock::now() + options_.timeout);
      pending_set.insert(next);
      ++next;
    }
    while (!pending.empty() && done[pending.front().first]) pending.pop_front();
    const auto [oldest, deadline] = pending.front();

    const auto status = process_.read_line(line, deadline);
    if (status == Subprocess::ReadStatus::kTimeout) {
      throw ScoreError(requests[oldest].id,
                       "timeout waiting for score of request " + requests[oldest].id);
    }
    if (status == Subprocess::ReadStatus::kEof) {
      throw ScoreError(requests[oldest].id, "scorer exited with request " +
                                                requests[oldest].id + " pending");
    }
    ++lines_read_;
    ScoreResponse r = decode_response(line, lines_read_);
    auto it = index.find(r.id);
    if (it == index.end() || !pending_set.contains(it->second)) {
      throw ProtocolError("unexpected response id " + r.id + " at line " +
                          std::to_string(lines_read_));
    }
    scores[it->second] = r.score;
    done[it->second] = true;
    pending_set.erase(it->second);
    ++completed;
  }
  broken_ = false;
  return scores;
}

std::unique_ptr<Scorer> make_scorer(std::string_view spec,
                                    const ExternalScorerOptions& options,
                                    std::size_t threads) {
  if (spec == "builtin:chrf") {
    return std::make_unique<BuiltinScorer>(BuiltinScorer::Kind::kChrf, threads);
  }
  if (spec == "builtin:bleu") {
    return std::make_unique<BuiltinScorer>(BuiltinScorer::Kind::kBleu, threads);
  }
  if (spec == "builtin:exact") {
    return std::make_unique<BuiltinScorer>(BuiltinScorer::Kind::kExact, threads);
  }
  if (spec.starts_with("cmd:") && spec.size() > 4) {
    return std::make_unique<ExternalScorer>(std::string(spec.substr(4)), options);
  }
  throw UsageError("unknown scorer spec '" + std::string(spec) +
                   "' (expected builtin:chrf, builtin:bleu, builtin:exact or cmd:<command>)");
}

}  // namespace mtforge::scoring
