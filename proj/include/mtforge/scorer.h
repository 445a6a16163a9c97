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

#ifndef MTFORGE_SCORER_H_
#define MTFORGE_SCORER_H_

#include <chrono>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mtforge/error.h"
#include "mtforge/subprocess.h"

namespace mtforge::scoring {

// kUtility scorers compare a hypothesis with a reference; kQe scorers judge
// a hypothesis against its source alone.
enum class ScoreMode { kUtility, kQe };

std::string_view mode_name(ScoreMode mode);

struct ScoreRequest {
  std::string id;
  std::optional<std::string> source;
  std::string hypothesis;
  std::optional<std::string> reference;

  ScoreMode mode() const {
    return reference ? ScoreMode::kUtility : ScoreMode::kQe;
  }
};

struct ScoreResponse {
  std::string id;
  double score = 0.0;
};

// A failure attributable to one request.
class ScoreError : public ProtocolError {
 public:
  ScoreError(std::string request_id, const std::string& what)
      : ProtocolError(what), request_id_(std::move(request_id)) {}
  const std::string& request_id() const noexcept { return request_id_; }

 private:
  std::string request_id_;
};

class Scorer {
 public:
  virtual ~Scorer() = default;

  virtual ScoreMode mode() const = 0;
  // Whether more than one request may be in flight at a time.
  virtual bool concurrent() const = 0;
  virtual std::string name() const = 0;

  // One response per request, aligned with the request order. Requests must
  // match mode() and carry distinct ids.
  std::vector<ScoreResponse> score_batch(std::span<const ScoreRequest> requests);

 protected:
  virtual std::vector<double> score_impl(std::span<const ScoreRequest> requests) = 0;
};

// In-process lexical utilities: chrf (default config), sentence BLEU
// (sentence defaults) and exact match (1 if equal else 0).
class BuiltinScorer final : public Scorer {
 public:
  enum class Kind { kChrf, kBleu, kExact };

  explicit BuiltinScorer(Kind kind, std::size_t threads = 1);

  ScoreMode mode() const override { return ScoreMode::kUtility; }
  bool concurrent() const override { return true; }
  std::string name() const override;

  double score_one(const ScoreRequest& request) const;

 protected:
  std::vector<double> score_impl(std::span<const ScoreRequest> requests) override;

 private:
  Kind kind_;
  std::size_t threads_;
};

// Scorer backed by a callable; the callable must be thread-safe when
// `concurrent` is true and threads > 1.
class FunctionScorer final : public Scorer {
 public:
  using Fn = std::function<double(const ScoreRequest&)>;

  FunctionScorer(ScoreMode mode, Fn fn, bool concurrent = true,
                 std::size_t threads = 1, std::string name = "function");

  ScoreMode mode() const override { return mode_; }
  bool concurrent() const override { return concurrent_; }
  std::string name() const override { return name_; }

 protected:
  std::vector<double> score_impl(std::span<const ScoreRequest> requests) override;

 private:
  ScoreMode mode_;
  Fn fn_;
  bool concurrent_;
  std::size_t threads_;
  std::string name_;
};

inline constexpr std::string_view kProtocolVersion = "mtscore/1";

struct Handshake {
  std::string protocol;
  ScoreMode mode = ScoreMode::kUtility;
  bool concurrent = false;
};

// Parses {"protocol":"mtscore/1","mode":"utility"|"qe","concurrent":bool}.
Handshake parse_handshake(std::string_view line);

std::string encode_request(const ScoreRequest& request);
// Parses {"id":...,"score":...}; `line_number` is used in error messages.
ScoreResponse decode_response(std::string_view line, std::size_t line_number);

struct ExternalScorerOptions {
  std::chrono::milliseconds timeout{60000};
  std::size_t max_in_flight = 16;
};

// A scorer process speaking the mtscore/1 line protocol on stdin/stdout. The
// first output line is the handshake; afterwards every request line gets one
// response line, possibly out of order. Serial scorers see strict
// request/response alternation.
class ExternalScorer final : public Scorer {
 public:
  explicit ExternalScorer(const std::string& command,
                          ExternalScorerOptions options = {});

  ScoreMode mode() const override { return handshake_.mode; }
  bool concurrent() const override { return handshake_.concurrent; }
  std::string name() const override { return "cmd:" + process_.command(); }
  const Handshake& handshake() const { return handshake_; }
  std::size_t in_flight_limit() const;

 protected:
  std::vector<double> score_impl(std::span<const ScoreRequest> requests) override;

 private:
  ExternalScorerOptions options_;
  Subprocess process_;
  Handshake handshake_;
  std::size_t lines_read_ = 0;
  bool broken_ = false;
};

// "builtin:chrf", "builtin:bleu", "builtin:exact" or "cmd:<shell command>".
std::unique_ptr<Scorer> make_scorer(std::string_view spec,
                                    const ExternalScorerOptions& options = {},
                                    std::size_t threads = 1);

// Throws ProtocolError unless `scorer` runs in `required` mode.
void require_mode(const Scorer& scorer, ScoreMode required);

}  // namespace mtforge::scoring

#endif  // MTFORGE_SCORER_H_
