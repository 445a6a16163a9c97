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

#include "mtforge/subprocess.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <mutex>
#include <thread>

#include "mtforge/error.h"

namespace mtforge {
namespace {

void ignore_sigpipe_once() {
  static std::once_flag flag;
  std::call_once(flag, [] { ::signal(SIGPIPE, SIG_IGN); });
}

int remaining_ms(Clock::time_point deadline) {
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
      deadline - Clock::now());
  return static_cast<int>(std::clamp<long long>(left.count(), 0, 1000));
}

}  // namespace

Subprocess::Subprocess(const std::string& command) : command_(command) {
  ignore_sigpipe_once();
  int in_pipe[2];
  int out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) {
    throw DataError("pipe failed: " + std::string(std::strerror(errno)));
  }
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw DataError("pipe failed: " + std::string(std::strerror(errno)));
  }
  pid_ = ::fork();
  if (pid_ < 0) {
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
    throw DataError("fork failed: " + std::string(std::strerror(errno)));
  }
  if (pid_ == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::signal(SIGPIPE, SIG_DFL);
    ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  stdin_fd_ = in_pipe[1];
  stdout_fd_ = out_pipe[0];
  ::fcntl(stdin_fd_, F_SETFL, ::fcntl(stdin_fd_, F_GETFL) | O_NONBLOCK);
  ::fcntl(stdout_fd_, F_SETFL, ::fcntl(stdout_fd_, F_GETFL) | O_NONBLOCK);
}

Subprocess::~Subprocess() {
  close_stdin();
  if (stdout_fd_ >= 0) ::close(stdout_fd_);
  if (reaped_) return;
  // Give a well-behaved child a moment to exit on EOF.
  for (int i = 0; i < 20; ++i) {
    int status;
    if (::waitpid(pid_, &status, WNOHANG) == pid_) return;
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  kill_and_reap();
}

void Subprocess::kill_and_reap() {
  if (reaped_) return;
  ::kill(pid_, SIGKILL);
  int status;
  while (::waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
  }
  reaped_ = true;
}

void Subprocess::close_stdin() {
  if (stdin_fd_ >= 0) {
    ::close(stdin_fd_);
    stdin_fd_ = -1;
  }
}

void Subprocess::send(std::string_view data) {
  if (stdin_fd_ < 0) throw ProtocolError("write to closed stdin of: " + command_);
  outgoing_.append(data);
  pump(0);
}

void Subprocess::close_stdin_when_flushed() {
  close_when_flushed_ = true;
  if (outgoing_.empty()) close_stdin();
}

void Subprocess::pump(int timeout_ms) {
  pollfd fds[2];
  nfds_t n = 0;
  int in_idx = -1, out_idx = -1;
  if (stdin_fd_ >= 0 && !outgoing_.empty()) {
    fds[n] = {stdin_fd_, POLLOUT, 0};
    in_idx = static_cast<int>(n++);
  }
  if (stdout_fd_ >= 0 && !stdout_eof_) {
    fds[n] = {stdout_fd_, POLLIN, 0};
    out_idx = static_cast<int>(n++);
  }
  if (n == 0) return;
  int rc = ::poll(fds, n, timeout_ms);
  if (rc < 0) {
    if (errno == EINTR) return;
    throw DataError("poll failed: " + std::string(std::strerror(errno)));
  }
  if (in_idx >= 0 && fds[in_idx].revents != 0) {
    ssize_t w = ::write(stdin_fd_, outgoing_.data(), outgoing_.size());
    if (w > 0) {
      outgoing_.erase(0, static_cast<std::size_t>(w));
    } else if (w < 0 && errno != EAGAIN && errno != EINTR) {
      // The child stopped reading; drop what it will never consume.
      outgoing_.clear();
      close_stdin();
    }
    if (outgoing_.empty() && close_when_flushed_) close_stdin();
  }
  if (out_idx >= 0 && fds[out_idx].revents != 0) {
    char buf[65536];
    for (;;) {
      ssize_t r = ::read(stdout_fd_, buf, sizeof(buf));
      if (r > 0) {
        incoming_.append(buf, static_cast<std::size_t>(r));
        continue;
      }
      if (r == 0) stdout_eof_ = true;
      break;
    }
  }
}

Subprocess::ReadStatus Subprocess::read_line(std::string& line,
                                             Clock::time_point deadline) {
  for (;;) {
    const std::size_t nl = incoming_.find('\n');
    if (nl != std::string::npos) {
      line.assign(incoming_, 0, nl);
      incoming_.erase(0, nl + 1);
      return ReadStatus::kLine;
    }
    if (stdout_eof_) {
      if (!incoming_.empty()) {
        line = std::move(incoming_);
        incoming_.clear();
        return ReadStatus::kLine;
      }
      return ReadStatus::kEof;
    }
    if (Clock::now() >= deadline) return ReadStatus::kTimeout;
    pump(std::max(1, remaining_ms(deadline)));
  }
}

int Subprocess::finish(Clock::time_point deadline) {
  close_stdin_when_flushed();
  while (stdin_fd_ >= 0 && Clock::now() < deadline) pump(remaining_ms(deadline));
  close_stdin();
  for (;;) {
    int status;
    pid_t r = ::waitpid(pid_, &status, WNOHANG);
    if (r == pid_) {
      reaped_ = true;
      return WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
    }
    if (Clock::now() >= deadline) {
      kill_and_reap();
      return -1;
    }
    // Keep draining stdout so the child cannot block on a full pipe.
    if (!stdout_eof_) {
      pump(5);
    } else {
      std::this_thread::sleep_for(std::chrono::milliseconds(1));
    }
  }
}

std::vector<std::string> run_line_filter(const std::string& command,
                                         std::span<const std::string> lines,
                                         std::chrono::milliseconds timeout) {
  const auto deadline = Clock::now() + timeout;
  Subprocess child(command);
  std::string payload;
  for (const std::string& l : lines) {
    payload += l;
    payload += '\n';
  }
  child.send(payload);
  child.close_stdin_when_flushed();
  std::vector<std::string> out;
  std::string line;
  for (;;) {
    auto status = child.read_line(line, deadline);
    if (status == Subprocess::ReadStatus::kLine) {
      out.push_back(std::move(line));
      continue;
    }
    if (status == Subprocess::ReadStatus::kTimeout) {
      throw DataError("command timed out: " + command);
    }
    break;
  }
  const int code = child.finish(deadline);
  if (code != 0) {
    throw DataError("command exited with status " + std::to_string(code) +
                    ": " + command);
  }
  return out;
}

std::string escape_line(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape_line(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '\\' || i + 1 == text.size()) {
      out += text[i];
      continue;
    }
    switch (text[i + 1]) {
      case '\\': out += '\\'; ++i; break;
      case 'n': out += '\n'; ++i; break;
      case 't': out += '\t'; ++i; break;
      case 'r': out += '\r'; ++i; break;
      default: out += '\\';
    }
  }
  return out;
}

}  // namespace mtforge
