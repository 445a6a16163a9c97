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

#ifndef MTFORGE_SUBPROCESS_H_
#define MTFORGE_SUBPROCESS_H_

#include <sys/types.h>

#include <chrono>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mtforge {

using Clock = std::chrono::steady_clock;

// A child process run through `/bin/sh -c`, with pipes on stdin and stdout.
// Stderr is inherited. Output written through send() is buffered and drained
// while read_line() waits, so a child that writes before it reads everything
// cannot deadlock the parent.
class Subprocess {
 public:
  enum class ReadStatus { kLine, kEof, kTimeout };

  explicit Subprocess(const std::string& command);
  ~Subprocess();

  Subprocess(const Subprocess&) = delete;
  Subprocess& operator=(const Subprocess&) = delete;

  // Queues bytes for the child's stdin.
  void send(std::string_view data);

  // Closes stdin once every queued byte has been written.
  void close_stdin_when_flushed();

  // Reads one '\n'-terminated line (terminator stripped). A final line
  // without terminator is returned before kEof.
  ReadStatus read_line(std::string& line, Clock::time_point deadline);

  // Flushes queued input, closes stdin and waits for exit. Returns the exit
  // status, or -1 when the child was killed after `deadline`.
  int finish(Clock::time_point deadline);

  const std::string& command() const { return command_; }
  pid_t pid() const { return pid_; }

 private:
  // One poll round: writes pending input and reads available output.
  void pump(int timeout_ms);
  void close_stdin();
  void kill_and_reap();

  std::string command_;
  pid_t pid_ = -1;
  int stdin_fd_ = -1;
  int stdout_fd_ = -1;
  bool close_when_flushed_ = false;
  bool stdout_eof_ = false;
  bool reaped_ = false;
  std::string outgoing_;
  std::string incoming_;
};

// Runs `command` as a line filter: every element of `lines` is written as one
// input line and the child's stdout is split into lines. Throws DataError on
// timeout or a non-zero exit status.
std::vector<std::string> run_line_filter(const std::string& command,
                                         std::span<const std::string> lines,
                                         std::chrono::milliseconds timeout);

// Escaping used when text containing newlines crosses a line protocol:
// '\\' -> "\\\\", '\n' -> "\\n", '\t' -> "\\t", '\r' -> "\\r".
std::string escape_line(std::string_view text);
std::string unescape_line(std::string_view text);

}  // namespace mtforge

#endif  // MTFORGE_SUBPROCESS_H_
