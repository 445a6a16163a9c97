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

#include <gtest/gtest.h>

#include "mtforge/error.h"

namespace mtforge {
namespace {

TEST(Escape, RoundTrip) {
  const std::string s = "a\\b\nc\td\re";
  EXPECT_EQ(escape_line(s), "a\\\\b\\nc\\td\\re");
  EXPECT_EQ(unescape_line(escape_line(s)), s);
  EXPECT_EQ(escape_line(s).find('\n'), std::string::npos);
}

TEST(LineFilter, Basic) {
  const std::vector<std::string> in = {"b", "a", ""};
  EXPECT_EQ(run_line_filter("cat", in, std::chrono::seconds(10)), in);
  EXPECT_EQ(run_line_filter("sort", in, std::chrono::seconds(10)),
            (std::vector<std::string>{"", "a", "b"}));
}

TEST(LineFilter, LargeInputDoesNotDeadlock) {
  std::vector<std::string> in(20000, std::string(100, 'x'));
  EXPECT_EQ(run_line_filter("cat", in, std::chrono::seconds(30)).size(), in.size());
}

TEST(LineFilter, FailuresAreDataErrors) {
  const std::vector<std::string> in = {"x"};
  EXPECT_THROW(run_line_filter("exit 4", in, std::chrono::seconds(10)), DataError);
  EXPECT_THROW(run_line_filter("sleep 5", in, std::chrono::milliseconds(200)), DataError);
}

TEST(Subprocess, ReadLineTimeout) {
  Subprocess p("sleep 5");
  std::string line;
  EXPECT_EQ(p.read_line(line, Clock::now() + std::chrono::milliseconds(100)),
            Subprocess::ReadStatus::kTimeout);
}

TEST(Subprocess, FinalLineWithoutNewline) {
  Subprocess p("printf 'a\\nb'");
  std::string line;
  const auto deadline = Clock::now() + std::chrono::seconds(5);
  ASSERT_EQ(p.read_line(line, deadline), Subprocess::ReadStatus::kLine);
  EXPECT_EQ(line, "a");
  ASSERT_EQ(p.read_line(line, deadline), Subprocess::ReadStatus::kLine);
  EXPECT_EQ(line, "b");
  EXPECT_EQ(p.read_line(line, deadline), Subprocess::ReadStatus::kEof);
  EXPECT_EQ(p.finish(deadline), 0);
}

}  // namespace
}  // namespace mtforge
