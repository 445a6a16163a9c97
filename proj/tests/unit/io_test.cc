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

#include "mtforge/io.h"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "mtforge/error.h"
#include "support/test_support.h"

namespace mtforge::io {
namespace {

TEST(Lines, SplitAndJoin) {
  EXPECT_EQ(split_lines("a\nb\n"), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(split_lines("a\n\nb"), (std::vector<std::string>{"a", "", "b"}));
  EXPECT_TRUE(split_lines("").empty());
  EXPECT_EQ(split_lines("\n"), (std::vector<std::string>{""}));
  EXPECT_EQ(join_lines({"a", ""}), "a\n\n");
}

TEST(Files, WriteThenRead) {
  support::TempDir dir;
  write_file(dir.file("x"), std::string("a\0b", 3));
  EXPECT_EQ(read_file(dir.file("x")), std::string("a\0b", 3));
  write_file(dir.file("x"), "new");
  EXPECT_EQ(read_file(dir.file("x")), "new");
  EXPECT_THROW(read_file(dir.file("missing")), DataError);
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(100.0), "100.0");
  EXPECT_EQ(format_double(0.0), "0.0");
  EXPECT_EQ(format_double(-20.0), "-20.0");
  EXPECT_EQ(format_double(38.94003915357024), "38.94003915357024");
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
  EXPECT_EQ(format_double(1e300), "1e+300");
}

}  // namespace
}  // namespace mtforge::io
