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

#ifndef CHRONOLEX_NORMALIZER_HPP_
#define CHRONOLEX_NORMALIZER_HPP_

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace chronolex {

// A code point -> code point substitution table, used both for character
// variant standardization and for traditional -> simplified conversion.
//
// Valid tables never map a code point to itself and their image contains no
// key, so applying a table twice is the same as applying it once. Tables are
// immutable once built.
class MappingTable {
 public:
  MappingTable() = default;

  // Validates and builds a table. Throws ValidationError on a self-mapping,
  // a duplicate source, or a key that also appears as a target.
  static MappingTable from_entries(std::string name,
                                  std::span<const std::pair<char32_t, char32_t>> entries);

  const std::string& name() const { return name_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::map<char32_t, char32_t>& entries() const { return entries_; }

  // Replaces every key code point by its target. Output has the same number
  // of scalar values as the input.
  std::string apply(std::string_view text) const;
  char32_t apply(char32_t cp) const;

 private:
  std::string name_;
  std::map<char32_t, char32_t> entries_;
};

// Loads a `source<TAB>target` TSV; blank lines and lines starting with '#'
// are skipped. The table name is the file stem.
MappingTable load_mapping(const std::filesystem::path& path);

// Parses TSV content already in memory. `origin` is used in error messages.
MappingTable parse_mapping(std::string_view content, std::string name,
                           std::string_view origin);

// Table equivalent to applying `first` then `second`. Throws
// ValidationError if the composition is not idempotent.
MappingTable compose(const MappingTable& first, const MappingTable& second);

// Folds a sequence of tables left to right; empty input gives the identity.
MappingTable compose_all(std::span<const MappingTable> tables);

}  // namespace chronolex

#endif  // CHRONOLEX_NORMALIZER_HPP_
