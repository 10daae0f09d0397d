// Copyright 2026 The structprobe Authors
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

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace structprobe {

/// Which column drives the gold structure: HEAD (tree) or DEPS (graph).
enum class ParseMode { syntactic, semantic };

std::string_view to_string(ParseMode mode) noexcept;
ParseMode parse_mode_from_string(std::string_view text);

/// Undirected edge between 1-based token indices, normalized so first < second.
using Edge = std::pair<int, int>;

inline Edge make_edge(int a, int b) noexcept {
  return a < b ? Edge{a, b} : Edge{b, a};
}

/// One (head, label) entry of the DEPS column.
struct DepArc {
  int head = 0;
  std::string label;

  bool operator==(const DepArc&) const = default;
};

struct Token {
  int index = 0;                ///< 1-based position in the sentence
  std::string form;
  std::string lemma = "_";
  std::string upos = "_";
  std::string xpos = "_";
  std::string feats = "_";
  std::optional<int> head;      ///< HEAD column; 0 = virtual root, empty for "_"
  std::string deprel = "_";
  std::vector<DepArc> deps;     ///< DEPS column; empty for "_"
  std::string misc = "_";

  bool operator==(const Token&) const = default;
};

/// Gold dependency structure of one sentence: a tree (syntactic) or a graph (semantic).
struct DepStructure {
  std::string sentence_id;                 ///< key; see sentence_key()
  std::optional<std::string> explicit_id;  ///< value of a "# sent_id" comment
  std::size_t ordinal = 0;                 ///< 0-based block position in its file
  std::vector<std::string> comments;       ///< other comment lines, verbatim
  std::vector<Token> tokens;
  std::set<Edge> edges;
  std::set<int> roots;
  ParseMode mode = ParseMode::syntactic;
  bool is_tree = false;

  std::size_t size() const noexcept { return tokens.size(); }

  bool operator==(const DepStructure&) const = default;
};

/// Parses a CoNLL-U document. Multiword-token ranges and empty nodes are skipped.
/// Throws ParseError (with a line number) on malformed lines, Error{structure} on
/// cyclic or disconnected syntactic trees and Error{duplicate_key} on repeated ids.
std::vector<DepStructure> parse_conllu(std::string_view text, ParseMode mode);
std::vector<DepStructure> read_conllu_file(const std::filesystem::path& path, ParseMode mode);

/// Builds edges, roots and the tree flag from already-populated tokens.
DepStructure assemble_structure(std::vector<Token> tokens, ParseMode mode,
                                std::optional<std::string> explicit_id,
                                std::size_t ordinal);

/// Explicit "# sent_id" if present, otherwise the ordinal zero-padded to six digits.
std::string sentence_key(const DepStructure& structure);

std::string write_conllu(std::span<const DepStructure> structures);

/// A token is punctuation iff its UPOS is PUNCT or its form has no alphanumeric character.
bool is_punctuation(const Token& token);
std::vector<bool> punctuation_mask(const DepStructure& structure);

}  // namespace structprobe
