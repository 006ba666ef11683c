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

#ifndef CHRONOLEX_IO_HPP_
#define CHRONOLEX_IO_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace chronolex {

// Whole-file read; throws IoError if the file cannot be opened.
std::string read_file(const std::filesystem::path& path);

// Writes atomically enough for our purposes (temp file + rename), creating
// parent directories. Throws IoError.
void write_file(const std::filesystem::path& path, std::string_view content);

// Splits on '\n', dropping a trailing '\r' from each line. A final newline
// does not produce an empty last line.
std::vector<std::string_view> split_lines(std::string_view content);

std::string_view trim(std::string_view s);

// Quotes a CSV field when it holds a comma, quote or newline.
std::string csv_field(std::string_view s);

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

// Fixed significant-digit formatting ("%.*g").
std::string format_double(double value, int significant_digits);

}  // namespace chronolex

#endif  // CHRONOLEX_IO_HPP_
