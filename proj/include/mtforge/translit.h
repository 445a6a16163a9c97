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

#ifndef MTFORGE_TRANSLIT_H_
#define MTFORGE_TRANSLIT_H_

#include <string>
#include <string_view>

namespace mtforge::corpus {

// Serbian Cyrillic -> Latin with the standard 30-letter correspondence
// (Љ -> Lj, Њ -> Nj, Џ -> Dž, Ђ -> Đ, ...). An uppercase letter that maps to
// a digraph is written fully uppercase ("LJ") when the neighbouring letter
// (the next one, or the previous one at a word end) is uppercase, and in
// title case ("Lj") otherwise.
//
// Other Cyrillic letters get a scholarly fallback (я -> ja, щ -> šč, ь -> ʹ,
// ...); Cyrillic combining marks are dropped and any remaining Cyrillic code
// point becomes '?', so the output never contains Cyrillic. Everything else
// passes through byte-for-byte.
std::string transliterate_sr_cyrl_to_latn(std::string_view text);

bool is_cyrillic(char32_t cp);

}  // namespace mtforge::corpus

#endif  // MTFORGE_TRANSLIT_H_
