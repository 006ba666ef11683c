#!/usr/bin/env python3
# Copyright 2026 The chronolex Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Builds data/tables/t2s.tsv from OpenCC's TSCharacters.txt.

OpenCC lists the candidate simplified forms of each traditional character,
most common first. Only the first candidate is kept. Chains (a target that is
itself a traditional key) are followed to their end so the table is
idempotent, and entries that collapse to a self-mapping are dropped.

Usage: make_t2s_table.py TSCharacters.txt > data/tables/t2s.tsv
"""
import sys


def main(path):
    raw = {}
    ambiguous = 0
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            src, targets = line.split("\t", 1)
            cands = targets.split(" ")
            if len(src) != 1 or len(cands[0]) != 1:
                continue
            if len(cands) > 1:
                ambiguous += 1
            raw[src] = cands[0]

    table = {}
    for src, dst in raw.items():
        seen = {src}
        while dst in raw and dst not in seen:
            seen.add(dst)
            dst = raw[dst]
        if dst != src:
            table[src] = dst
    # A key may still appear as an image after chain resolution only through
    # a cycle; drop those keys.
    image = set(table.values())
    table = {k: v for k, v in table.items() if k not in image}

    out = sys.stdout
    out.write("# Traditional -> simplified, one code point to one code point.\n")
    out.write("# Generated by tools/make_t2s_table.py from OpenCC TSCharacters.txt\n")
    out.write("# (Apache-2.0). Characters with several simplified forms use the\n")
    out.write("# first (most common) candidate; %d such entries.\n" % ambiguous)
    for src in sorted(table):
        out.write("%s\t%s\n" % (src, table[src]))


if __name__ == "__main__":
    main(sys.argv[1])
