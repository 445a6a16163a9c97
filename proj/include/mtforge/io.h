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

#ifndef MTFORGE_IO_H_
#define MTFORGE_IO_H_

#include <string>
#include <string_view>
#include <vector>

namespace mtforge::io {

std::string read_file(const std::string& path);

// Splits on '\n'. A trailing newline does not produce an empty last line.
std::vector<std::string> split_lines(std::string_view content);
std::vector<std::string> read_lines(const std::string& path);

// Each line followed by '\n'.
std::string join_lines(const std::vector<std::string>& lines);

// Writes through a temporary sibling file renamed into place.
void write_file(const std::string& path, std::string_view content);

// Shortest decimal that round-trips, always containing '.' or an exponent
// ("100.0", "38.94003915357024").
std::string format_double(double value);

}  // namespace mtforge::io

#endif  // MTFORGE_IO_H_
