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

#include "chronolex/normalizer.hpp"

#include <cstdio>

#include "chronolex/error.hpp"
#include "chronolex/io.hpp"
#include "chronolex/utf8.hpp"

namespace chronolex {

namespace {

std::string show(char32_t cp) {
  char hex[16];
  std::snprintf(hex, sizeof(hex), "U+%04X", static_cast<unsigned>(cp));
  std::string s;
  utf8::append(s, cp);
  return s + " (" + hex + ")";
}

}  // namespace

MappingTable MappingTable::from_entries(
    std::string name, std::span<const std::pair<char32_t, char32_t>> entries) {
  MappingTable table;
  table.name_ = std::move(name);
  for (const auto& [src, dst] : entries) {
    if (src == dst) {
      throw ValidationError("mapping table '" + table.name_ + "': self-mapping " + show(src));
    }
    if (!table.entries_.emplace(src, dst).second) {
      throw ValidationError("mapping table '" + table.name_ + "': duplicate source " + show(src));
    }
  }
  for (const auto& [src, dst] : table.entries_) {
    if (table.entries_.contains(dst)) {
      throw ValidationError("mapping table '" + table.name_ + "': target " + show(dst) +
                            " of " + show(src) + " is also a source (not idempotent)");
    }
  }
  return table;
}

char32_t MappingTable::apply(char32_t cp) const {
  auto it = entries_.find(cp);
  return it == entries_.end() ? cp : it->second;
}

std::string MappingTable::apply(std::string_view text) const {
  if (entries_.empty()) return std::string(text);
  std::u32string cps = utf8::decode(text);
  for (char32_t& cp : cps) cp = apply(cp);
  return utf8::encode(cps);
}

MappingTable parse_mapping(std::string_view content, std::string name, std::string_view origin) {
  std::vector<std::pair<char32_t, char32_t>> entries;
  std::size_t line_no = 0;
  for (std::string_view line : split_lines(content)) {
    ++line_no;
    if (trim(line).empty() || line.front() == '#') continue;
    const auto where = [&] { return std::string(origin) + ":" + std::to_string(line_no) + ": "; };
    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos) throw ValidationError(where() + "expected source<TAB>target");
    std::u32string src, dst;
    try {
      src = utf8::decode(trim(line.substr(0, tab)));
      dst = utf8::decode(trim(line.substr(tab + 1)));
    } catch (const ValidationError& e) {
      throw ValidationError(where() + e.what());
    }
    if (src.size() != 1 || dst.size() != 1) {
      throw ValidationError(where() + "source and target must each be one character");
    }
    entries.emplace_back(src[0], dst[0]);
  }
  try {
    return MappingTable::from_entries(std::move(name), entries);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(origin) + ": " + e.what());
  }
}

MappingTable load_mapping(const std::filesystem::path& path) {
  return parse_mapping(read_file(path), path.stem().string(), path.string());
}

MappingTable compose(const MappingTable& first, const MappingTable& second) {
  std::vector<std::pair<char32_t, char32_t>> entries;
  entries.reserve(first.size() + second.size());
  for (const auto& [src, mid] : first.entries()) {
    const char32_t dst = second.apply(mid);
    if (dst != src) entries.emplace_back(src, dst);
  }
  for (const auto& [src, dst] : second.entries()) {
    if (!first.entries().contains(src)) entries.emplace_back(src, dst);
  }
  std::string name = first.name().empty() ? second.name()
                     : second.name().empty() ? first.name()
                                             : first.name() + "+" + second.name();
  return MappingTable::from_entries(std::move(name), entries);
}

MappingTable compose_all(std::span<const MappingTable> tables) {
  MappingTable out;
  for (const auto& t : tables) out = compose(out, t);
  return out;
}

}  // namespace chronolex
