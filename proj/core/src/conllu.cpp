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

#include "structprobe/conllu.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "structprobe/error.hpp"

namespace structprobe {
namespace {

constexpr std::size_t kColumns = 10;

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::optional<int> to_int(std::string_view s) {
  int value = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return value;
}

/// Returns the id of a "# sent_id = X" comment, if the line is one.
std::optional<std::string> sent_id_of(std::string_view line) {
  auto body = trim(line.substr(1));
  constexpr std::string_view tag = "sent_id";
  if (body.substr(0, tag.size()) != tag) return std::nullopt;
  body = trim(body.substr(tag.size()));
  if (body.empty() || body.front() != '=') return std::nullopt;
  return std::string(trim(body.substr(1)));
}

struct PendingBlock {
  std::vector<Token> tokens;
  std::vector<std::size_t> lines;
  std::vector<std::string> comments;
  std::optional<std::string> explicit_id;

  bool empty() const { return tokens.empty() && comments.empty() && !explicit_id; }
};

Token parse_token_line(std::string_view line, std::size_t line_no, ParseMode mode) {
  const auto cols = split(line, '\t');
  if (cols.size() != kColumns) {
    throw ParseError(line_no, "expected " + std::to_string(kColumns) + " tab-separated columns, got " +
                                  std::to_string(cols.size()));
  }
  Token tok;
  const auto index = to_int(cols[0]);
  if (!index || *index < 1) throw ParseError(line_no, "invalid token id '" + std::string(cols[0]) + "'");
  tok.index = *index;
  tok.form = cols[1];
  tok.lemma = cols[2];
  tok.upos = cols[3];
  tok.xpos = cols[4];
  tok.feats = cols[5];
  if (cols[6] != "_") {
    const auto head = to_int(cols[6]);
    if (!head || *head < 0) throw ParseError(line_no, "invalid HEAD '" + std::string(cols[6]) + "'");
    tok.head = *head;
  } else if (mode == ParseMode::syntactic) {
    throw ParseError(line_no, "HEAD is required in syntactic mode");
  }
  tok.deprel = cols[7];
  if (cols[8] != "_") {
    for (const auto entry : split(cols[8], '|')) {
      const auto colon = entry.find(':');
      if (colon == std::string_view::npos) {
        throw ParseError(line_no, "DEPS entry without label '" + std::string(entry) + "'");
      }
      const auto head_text = entry.substr(0, colon);
      // Arcs to empty nodes ("3.1") are not materialized.
      if (head_text.find('.') != std::string_view::npos) continue;
      const auto head = to_int(head_text);
      if (!head || *head < 0) throw ParseError(line_no, "invalid DEPS head '" + std::string(head_text) + "'");
      tok.deps.push_back(DepArc{*head, std::string(entry.substr(colon + 1))});
    }
  }
  tok.misc = cols[9];
  return tok;
}

/// Follows HEAD pointers from every token; fails on cycles and multiple roots.
void check_tree(const std::vector<Token>& tokens, const std::string& key) {
  const auto n = tokens.size();
  std::vector<int> state(n + 1, 0);  // 0 unvisited, 1 on current path, 2 reaches root
  state[0] = 2;
  for (std::size_t start = 1; start <= n; ++start) {
    std::vector<int> path;
    int cur = static_cast<int>(start);
    while (state[cur] == 0) {
      state[cur] = 1;
      path.push_back(cur);
      cur = *tokens[cur - 1].head;
    }
    if (state[cur] == 1) {
      throw Error(ErrorKind::structure, "sentence " + key + ": cyclic HEAD structure through token " +
                                            std::to_string(cur));
    }
    for (const int node : path) state[node] = 2;
  }
}

bool is_spanning_tree(std::size_t n, const std::set<Edge>& edges) {
  if (n == 0 || edges.size() != n - 1) return false;
  std::vector<int> parent(n + 1);
  for (std::size_t i = 0; i <= n; ++i) parent[i] = static_cast<int>(i);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& [a, b] : edges) {
    const int ra = find(a), rb = find(b);
    if (ra == rb) return false;
    parent[ra] = rb;
  }
  return true;
}

DepStructure assemble_checked(PendingBlock block, ParseMode mode, std::size_t ordinal) {
  const int n = static_cast<int>(block.tokens.size());
  const std::string key = block.explicit_id ? *block.explicit_id : [&] {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%06zu", ordinal);
    return std::string(buf);
  }();
  auto check_range = [&](std::size_t i, int head) {
    if (head > n) {
      throw ParseError(block.lines[i], "head " + std::to_string(head) + " out of range for sentence of " +
                                           std::to_string(n) + " tokens");
    }
    if (head == block.tokens[i].index) {
      throw Error(ErrorKind::structure, "sentence " + key + ": self-loop on token " + std::to_string(head));
    }
  };
  for (std::size_t i = 0; i < block.tokens.size(); ++i) {
    const auto& tok = block.tokens[i];
    if (tok.head) check_range(i, *tok.head);
    for (const auto& arc : tok.deps) check_range(i, arc.head);
  }
  auto structure = assemble_structure(std::move(block.tokens), mode, std::move(block.explicit_id), ordinal);
  structure.comments = std::move(block.comments);
  return structure;
}

}  // namespace

std::string_view to_string(ParseMode mode) noexcept {
  return mode == ParseMode::syntactic ? "syntactic" : "semantic";
}

ParseMode parse_mode_from_string(std::string_view text) {
  if (text == "syntactic") return ParseMode::syntactic;
  if (text == "semantic") return ParseMode::semantic;
  throw Error(ErrorKind::invalid_argument, "unknown parse mode '" + std::string(text) + "'");
}

DepStructure assemble_structure(std::vector<Token> tokens, ParseMode mode,
                                std::optional<std::string> explicit_id, std::size_t ordinal) {
  DepStructure s;
  s.explicit_id = std::move(explicit_id);
  s.ordinal = ordinal;
  s.mode = mode;
  s.tokens = std::move(tokens);
  s.sentence_id = sentence_key(s);
  const int n = static_cast<int>(s.tokens.size());

  auto add_arc = [&](int dependent, int head) {
    if (head < 0 || head > n) {
      throw Error(ErrorKind::structure,
                  "sentence " + s.sentence_id + ": head " + std::to_string(head) + " out of range");
    }
    if (head == dependent) {
      throw Error(ErrorKind::structure,
                  "sentence " + s.sentence_id + ": self-loop on token " + std::to_string(head));
    }
    if (head == 0) {
      s.roots.insert(dependent);
    } else {
      s.edges.insert(make_edge(dependent, head));
    }
  };

  if (mode == ParseMode::syntactic) {
    for (const auto& tok : s.tokens) {
      if (!tok.head) {
        throw Error(ErrorKind::structure, "sentence " + s.sentence_id + ": token " +
                                              std::to_string(tok.index) + " has no HEAD");
      }
      add_arc(tok.index, *tok.head);
    }
    if (s.roots.size() != 1) {
      check_tree(s.tokens, s.sentence_id);  // a cycle is the more specific diagnosis
      throw Error(ErrorKind::structure, "sentence " + s.sentence_id + ": expected exactly one root, found " +
                                            std::to_string(s.roots.size()) + " (disconnected HEAD structure)");
    }
    check_tree(s.tokens, s.sentence_id);
    s.is_tree = true;
  } else {
    const bool use_deps =
        std::any_of(s.tokens.begin(), s.tokens.end(), [](const Token& t) { return !t.deps.empty(); });
    for (const auto& tok : s.tokens) {
      if (use_deps) {
        for (const auto& arc : tok.deps) add_arc(tok.index, arc.head);
      } else if (tok.head) {
        add_arc(tok.index, *tok.head);
      }
    }
    s.is_tree = s.roots.size() == 1 && is_spanning_tree(s.tokens.size(), s.edges);
  }
  return s;
}

std::vector<DepStructure> parse_conllu(std::string_view text, ParseMode mode) {
  std::vector<DepStructure> out;
  std::unordered_set<std::string> seen;
  PendingBlock block;
  std::size_t line_no = 0;

  auto flush = [&] {
    if (!block.tokens.empty()) {
      auto s = assemble_checked(std::move(block), mode, out.size());
      if (!seen.insert(s.sentence_id).second) {
        throw Error(ErrorKind::duplicate_key, "duplicate sentence key '" + s.sentence_id + "'");
      }
      out.push_back(std::move(s));
    }
    block = PendingBlock{};
  };

  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (trim(line).empty()) {
      flush();
      continue;
    }
    if (line.front() == '#') {
      if (auto id = sent_id_of(line)) {
        block.explicit_id = std::move(*id);
      } else {
        block.comments.emplace_back(line);
      }
      continue;
    }
    const auto id_col = line.substr(0, line.find('\t'));
    if (id_col.find('-') != std::string_view::npos || id_col.find('.') != std::string_view::npos) {
      if (split(line, '\t').size() != kColumns) {
        throw ParseError(line_no, "expected " + std::to_string(kColumns) + " tab-separated columns");
      }
      continue;
    }
    auto tok = parse_token_line(line, line_no, mode);
    const auto expected = static_cast<int>(block.tokens.size()) + 1;
    if (tok.index != expected) {
      const bool dup = std::any_of(block.tokens.begin(), block.tokens.end(),
                                   [&](const Token& t) { return t.index == tok.index; });
      throw ParseError(line_no, (dup ? "duplicate token index " : "non-sequential token index ") +
                                    std::to_string(tok.index));
    }
    block.tokens.push_back(std::move(tok));
    block.lines.push_back(line_no);
  }
  flush();
  return out;
}

std::vector<DepStructure> read_conllu_file(const std::filesystem::path& path, ParseMode mode) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::missing_input, "cannot open CoNLL-U file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_conllu(buf.str(), mode);
}

std::string sentence_key(const DepStructure& structure) {
  if (structure.explicit_id) return *structure.explicit_id;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06zu", structure.ordinal);
  return buf;
}

std::string write_conllu(std::span<const DepStructure> structures) {
  std::string out;
  for (const auto& s : structures) {
    if (s.explicit_id) out += "# sent_id = " + *s.explicit_id + "\n";
    for (const auto& c : s.comments) out += c + "\n";
    for (const auto& t : s.tokens) {
      out += std::to_string(t.index);
      for (const auto* field : {&t.form, &t.lemma, &t.upos, &t.xpos, &t.feats}) {
        out += '\t';
        out += *field;
      }
      out += '\t';
      out += t.head ? std::to_string(*t.head) : "_";
      out += '\t';
      out += t.deprel;
      out += '\t';
      if (t.deps.empty()) {
        out += '_';
      } else {
        for (std::size_t i = 0; i < t.deps.size(); ++i) {
          if (i) out += '|';
          out += std::to_string(t.deps[i].head) + ":" + t.deps[i].label;
        }
      }
      out += '\t';
      out += t.misc;
      out += '\n';
    }
    out += '\n';
  }
  return out;
}

bool is_punctuation(const Token& token) {
  if (token.upos == "PUNCT") return true;
  return std::none_of(token.form.begin(), token.form.end(),
                      [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }) &&
         std::all_of(token.form.begin(), token.form.end(),
                     [](char c) { return static_cast<unsigned char>(c) < 0x80; });
}

std::vector<bool> punctuation_mask(const DepStructure& structure) {
  std::vector<bool> mask;
  mask.reserve(structure.size());
  for (const auto& t : structure.tokens) mask.push_back(is_punctuation(t));
  return mask;
}

}  // namespace structprobe
