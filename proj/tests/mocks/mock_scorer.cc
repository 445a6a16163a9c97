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

// Stand-in scorer process speaking mtscore/1 on stdin/stdout.
//
//   mock_scorer [--metric chrf|length|qe-length] [--serial] [--reverse]
//               [--hang] [--bad-handshake] [--fail-after N] [--log FILE]
//
// --reverse answers every burst of pending requests back to front.
// --log records "overlap" whenever a new request was already waiting while
// the previous one was being answered.

#include <poll.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "mtforge/textmetrics.h"

namespace {

using Json = nlohmann::json;

struct Options {
  std::string metric = "chrf";
  bool serial = false;
  bool reverse = false;
  bool hang = false;
  bool bad_handshake = false;
  long fail_after = -1;
  std::string log;
};

bool stdin_ready(int timeout_ms) {
  pollfd p{STDIN_FILENO, POLLIN, 0};
  return ::poll(&p, 1, timeout_ms) > 0;
}

// std::getline on cin may hold data in its buffer that poll cannot see.
bool buffered_line_ready() { return std::cin.rdbuf()->in_avail() > 0; }

double score(const Options& o, const Json& req) {
  const std::string hyp = req.at("hypothesis").get<std::string>();
  if (o.metric == "chrf") {
    return mtforge::textmetrics::chrf(hyp, req.at("reference").get<std::string>()).value;
  }
  if (o.metric == "length") {
    const std::string ref = req.at("reference").get<std::string>();
    return -std::abs(static_cast<double>(hyp.size()) - static_cast<double>(ref.size()));
  }
  return static_cast<double>(hyp.size());
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--metric" && i + 1 < argc) o.metric = argv[++i];
    else if (a == "--serial") o.serial = true;
    else if (a == "--reverse") o.reverse = true;
    else if (a == "--hang") o.hang = true;
    else if (a == "--bad-handshake") o.bad_handshake = true;
    else if (a == "--fail-after" && i + 1 < argc) o.fail_after = std::stol(argv[++i]);
    else if (a == "--log" && i + 1 < argc) o.log = argv[++i];
    else {
      std::cerr << "mock_scorer: unknown argument " << a << "\n";
      return 64;
    }
  }
  std::ios::sync_with_stdio(false);
  std::ofstream log;
  if (!o.log.empty()) log.open(o.log, std::ios::app);

  if (o.bad_handshake) {
    std::cout << "{\"protocol\":\"mtscore/0\",\"mode\":\"utility\"}" << std::endl;
  } else {
    Json hs{{"protocol", "mtscore/1"},
            {"mode", o.metric == "qe-length" ? "qe" : "utility"},
            {"concurrent", !o.serial}};
    std::cout << hs.dump() << std::endl;
  }

  long answered = 0;
  std::string line;
  std::vector<Json> pending;
  while (std::getline(std::cin, line)) {
    pending.push_back(Json::parse(line));
    if (o.hang) continue;
    if (o.reverse) {
      while (buffered_line_ready() || stdin_ready(20)) {
        if (!std::getline(std::cin, line)) break;
        pending.push_back(Json::parse(line));
      }
    } else if (!o.log.empty()) {
      std::this_thread::sleep_for(std::chrono::milliseconds(2));
      if (buffered_line_ready() || stdin_ready(0)) log << "overlap" << std::endl;
    }
    std::vector<Json> batch;
    batch.swap(pending);
    if (o.reverse) std::reverse(batch.begin(), batch.end());
    for (const Json& req : batch) {
      if (o.fail_after >= 0 && answered >= o.fail_after) {
        std::cout << "not json" << std::endl;
        return 0;
      }
      Json resp{{"id", req.at("id")}, {"score", score(o, req)}};
      std::cout << resp.dump() << "\n";
      ++answered;
    }
    std::cout.flush();
    if (!o.log.empty()) log << "answered " << batch.size() << std::endl;
  }
  return 0;
}
