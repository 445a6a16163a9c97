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

#include "mtforge/translit.h"

#include <unicode/uchar.h>

#include <optional>
#include <span>
#include <vector>

#include "mtforge/unicode.h"

namespace mtforge::corpus {
namespace {

struct Letter {
  char32_t upper;
  char32_t lower;
  std::u32string_view latin;  // lowercase
};

// Serbian alphabet, Azbuka order.
constexpr Letter kSerbian[] = {
    {U'А', U'а', U"a"}, {U'Б', U'б', U"b"}, {U'В', U'в', U"v"}, {U'Г', U'г', U"g"},
    {U'Д', U'д', U"d"}, {U'Ђ', U'ђ', U"đ"}, {U'Е', U'е', U"e"}, {U'Ж', U'ж', U"ž"},
    {U'З', U'з', U"z"}, {U'И', U'и', U"i"}, {U'Ј', U'ј', U"j"}, {U'К', U'к', U"k"},
    {U'Л', U'л', U"l"}, {U'Љ', U'љ', U"lj"}, {U'М', U'м', U"m"}, {U'Н', U'н', U"n"},
    {U'Њ', U'њ', U"nj"}, {U'О', U'о', U"o"}, {U'П', U'п', U"p"}, {U'Р', U'р', U"r"},
    {U'С', U'с', U"s"}, {U'Т', U'т', U"t"}, {U'Ћ', U'ћ', U"ć"}, {U'У', U'у', U"u"},
    {U'Ф', U'ф', U"f"}, {U'Х', U'х', U"h"}, {U'Ц', U'ц', U"c"}, {U'Ч', U'ч', U"č"},
    {U'Џ', U'џ', U"dž"}, {U'Ш', U'ш', U"š"},
};
static_assert(std::size(kSerbian) == 30);

// Letters outside the Serbian alphabet.
constexpr Letter kFallback[] = {
    {U'Ѐ', U'ѐ', U"è"},  {U'Ѝ', U'ѝ', U"ì"},  {U'Ё', U'ё', U"ë"},  {U'Й', U'й', U"j"},
    {U'Ы', U'ы', U"y"},  {U'Э', U'э', U"e"},  {U'Ю', U'ю', U"ju"}, {U'Я', U'я', U"ja"},
    {U'Щ', U'щ', U"šč"}, {U'Ъ', U'ъ', U"ʺ"},  {U'Ь', U'ь', U"ʹ"},  {U'Є', U'є', U"je"},
    {U'І', U'і', U"i"},  {U'Ї', U'ї', U"ji"}, {U'Ґ', U'ґ', U"g"},  {U'Ў', U'ў', U"ŭ"},
    {U'Ѓ', U'ѓ', U"ǵ"},  {U'Ќ', U'ќ', U"ḱ"},  {U'Ѕ', U'ѕ', U"dz"},
};

struct Match {
  const Letter* letter;
  bool uppercase;
};

std::optional<Match> lookup(char32_t cp) {
  for (std::span<const Letter> table :
       {std::span<const Letter>(kSerbian), std::span<const Letter>(kFallback)}) {
    for (const Letter& l : table) {
      if (l.upper == cp) return Match{&l, true};
      if (l.lower == cp) return Match{&l, false};
    }
  }
  return std::nullopt;
}

bool is_cyrillic_mark(char32_t cp) {
  return (cp >= 0x0483 && cp <= 0x0489) || (cp >= 0x2DE0 && cp <= 0x2DFF) ||
         (cp >= 0xA66F && cp <= 0xA67D) || cp == 0xA69E || cp == 0xA69F;
}

char32_t to_upper(char32_t cp) {
  return static_cast<char32_t>(u_toupper(static_cast<UChar32>(cp)));
}

bool is_letter(char32_t cp) { return u_isalpha(static_cast<UChar32>(cp)); }
bool is_upper(char32_t cp) { return u_isupper(static_cast<UChar32>(cp)); }

// Whether an uppercase digraph letter at `i` sits in an all-caps context.
bool all_caps_context(const std::u32string& text, std::size_t i) {
  if (i + 1 < text.size() && is_letter(text[i + 1])) return is_upper(text[i + 1]);
  if (i > 0 && is_letter(text[i - 1])) return is_upper(text[i - 1]);
  return false;
}

}  // namespace

bool is_cyrillic(char32_t cp) {
  return (cp >= 0x0400 && cp <= 0x052F) || (cp >= 0x1C80 && cp <= 0x1C8F) ||
         (cp >= 0x2DE0 && cp <= 0x2DFF) || (cp >= 0xA640 && cp <= 0xA69F);
}

std::string transliterate_sr_cyrl_to_latn(std::string_view text) {
  const auto units = unicode::split_scalars(text);
  std::u32string cps;
  cps.reserve(units.size());
  for (std::string_view u : units) cps += unicode::decode_unit(u);

  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < units.size(); ++i) {
    const char32_t cp = cps[i];
    if (!is_cyrillic(cp)) {
      out += units[i];
      continue;
    }
    if (is_cyrillic_mark(cp)) continue;
    const auto m = lookup(cp);
    if (!m) {
      out += '?';
      continue;
    }
    std::u32string latin(m->letter->latin);
    if (m->uppercase) {
      const bool whole = latin.size() == 1 || all_caps_context(cps, i);
      for (std::size_t k = 0; k < latin.size() && (whole || k == 0); ++k) {
        latin[k] = to_upper(latin[k]);
      }
    }
    out += unicode::encode(latin);
  }
  return out;
}

}  // namespace mtforge::corpus
