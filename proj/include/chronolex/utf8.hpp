// Copyright 2026 The chronolex Authors.
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

#ifndef CHRONOLEX_UTF8_HPP_
#define CHRONOLEX_UTF8_HPP_

#include <cstddef>
#include <string>
#include <string_view>

namespace chronolex::utf8 {

// Decodes UTF-8 into scalar values. Throws ValidationError on malformed
// sequences, overlong encodings, surrogates and values above U+10FFFF.
std::u32string decode(std::string_view text);

std::string encode(std::u32string_view text);

void append(std::string& out, char32_t cp);

// Number of scalar values; same validation as decode.
std::size_t length(std::string_view text);

enum class CharClass { kHan, kLetter, kDigit, kSpace, kPunct };

CharClass classify(char32_t cp);

inline bool is_han(char32_t cp) { return classify(cp) == CharClass::kHan; }

}  // namespace chronolex::utf8

#endif  // CHRONOLEX_UTF8_HPP_
