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

#ifndef MTFORGE_UNICODE_H_
#define MTFORGE_UNICODE_H_

#include <string>
#include <string_view>
#include <vector>

namespace mtforge::unicode {

inline constexpr char32_t kReplacement = 0xFFFD;

// Splits UTF-8 text into scalar-value units. A byte that does not start a
// well-formed sequence becomes a unit of its own, so joining the units
// always reproduces the input bytes.
std::vector<std::string_view> split_scalars(std::string_view text);

// Code point of a single unit produced by split_scalars; ill-formed units
// decode to U+FFFD.
char32_t decode_unit(std::string_view unit);

std::u32string decode(std::string_view text);
std::string encode(char32_t cp);
std::string encode(std::u32string_view cps);

// Unicode White_Space property.
bool is_whitespace(char32_t cp);

// Maximal runs of non-whitespace scalars.
std::vector<std::string_view> split_whitespace(std::string_view text);

// Canonical composition (NFC). Ill-formed input is repaired with U+FFFD.
std::string nfc(std::string_view text);
bool is_nfc(std::string_view text);

}  // namespace mtforge::unicode

#endif  // MTFORGE_UNICODE_H_
