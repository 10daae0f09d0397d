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

#include <string>

#include <gtest/gtest.h>

#include "structprobe/conllu.hpp"
#include "structprobe/error.hpp"
#include "structprobe/random.hpp"
#include "structprobe/synth.hpp"

namespace sp = structprobe;

namespace {

std::string line(int id, const std::string& form, const std::string& head, const std::string& deps = "_",
                 const std::string& upos = "X") {
  return std::to_string(id) + "\t" + form + "\t_\t" + upos + "\t_\t_\t" + head + "\tdep\t" + deps + "\t_\n";
}

const std::string kThree = line(1, "a", "2") + line(2, "b", "0") + line(3, "c", "2") + "\n";

sp::ErrorKind kind_of(const std::string& text, sp::ParseMode mode) {
  try {
    sp::parse_conllu(text, mode);
  } catch (const sp::Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an error";
  return sp::ErrorKind::invalid_argument;
}

}  // namespace

TEST(Conllu, SmallestSyntacticTree) {
  const auto out = sp::parse_conllu(kThree, sp::ParseMode::syntactic);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].edges, (std::set<sp::Edge>{{1, 2}, {2, 3}}));
  EXPECT_EQ(out[0].roots, std::set<int>{2});
  EXPECT_TRUE(out[0].is_tree);
  EXPECT_EQ(out[0].sentence_id, "000000");
}

TEST(Conllu, SemanticReadsDepsUnion) {
  const std::string text = line(1, "a", "2", "2:ARG1|3:ARG2") + line(2, "b", "0", "0:root") + line(3, "c", "2") + "\n";
  const auto out = sp::parse_conllu(text, sp::ParseMode::semantic);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].edges, (std::set<sp::Edge>{{1, 2}, {1, 3}}));
  EXPECT_EQ(out[0].roots, std::set<int>{2});
  ASSERT_EQ(out[0].tokens[0].deps.size(), 2u);
  EXPECT_EQ(out[0].tokens[0].deps[1], (sp::DepArc{3, "ARG2"}));
}

TEST(Conllu, SemanticFallsBackToHeadWithoutDeps) {
  const auto out = sp::parse_conllu(kThree, sp::ParseMode::semantic);
  EXPECT_EQ(out[0].edges, (std::set<sp::Edge>{{1, 2}, {2, 3}}));
  EXPECT_TRUE(out[0].is_tree);
}

TEST(Conllu, SemanticGraphNeedNotBeTree) {
  const std::string text = line(1, "a", "_", "0:root") + line(2, "b", "_", "0:root") + line(3, "c", "_", "1:x|2:y") +
                           line(4, "d", "_") + "\n";
  const auto out = sp::parse_conllu(text, sp::ParseMode::semantic);
  EXPECT_EQ(out[0].roots, (std::set<int>{1, 2}));
  EXPECT_EQ(out[0].edges, (std::set<sp::Edge>{{1, 3}, {2, 3}}));
  EXPECT_FALSE(out[0].is_tree);
}

TEST(Conllu, TwoCycleIsStructuralError) {
  const std::string text = line(1, "a", "2") + line(2, "b", "1") + line(3, "c", "0") + "\n";
  EXPECT_EQ(kind_of(text, sp::ParseMode::syntactic), sp::ErrorKind::structure);
}

TEST(Conllu, TwoRootsIsStructuralError) {
  const std::string text = line(1, "a", "0") + line(2, "b", "0") + "\n";
  EXPECT_EQ(kind_of(text, sp::ParseMode::syntactic), sp::ErrorKind::structure);
}

TEST(Conllu, StructuralErrorNamesSentence) {
  const std::string text = "# sent_id = broken7\n" + line(1, "a", "2") + line(2, "b", "1") + "\n";
  try {
    sp::parse_conllu(text, sp::ParseMode::syntactic);
    FAIL();
  } catch (const sp::Error& e) {
    EXPECT_NE(std::string(e.what()).find("broken7"), std::string::npos);
  }
}

TEST(Conllu, ColumnCountErrorCarriesLineNumber) {
  const std::string text = "# c\n" + line(1, "a", "0") + "2\tb\t_\n\n";
  try {
    sp::parse_conllu(text, sp::ParseMode::syntactic);
    FAIL();
  } catch (const sp::ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.kind(), sp::ErrorKind::parse);
  }
}

TEST(Conllu, DuplicateTokenIndexIsParseError) {
  const std::string text = line(1, "a", "0") + line(1, "b", "1") + "\n";
  try {
    sp::parse_conllu(text, sp::ParseMode::syntactic);
    FAIL();
  } catch (const sp::ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("duplicate"), std::string::npos);
  }
}

TEST(Conllu, HeadOutOfRangeIsParseError) {
  const std::string text = line(1, "a", "0") + line(2, "b", "5") + "\n";
  EXPECT_EQ(kind_of(text, sp::ParseMode::syntactic), sp::ErrorKind::parse);
}

TEST(Conllu, SelfLoopIsStructuralError) {
  EXPECT_EQ(kind_of(line(1, "a", "0") + line(2, "b", "2") + "\n", sp::ParseMode::syntactic),
            sp::ErrorKind::structure);
  EXPECT_EQ(kind_of(line(1, "a", "_", "1:x") + "\n", sp::ParseMode::semantic), sp::ErrorKind::structure);
}

TEST(Conllu, MultiwordRangesAndEmptyNodesAreSkipped) {
  const std::string text = "1-2\tab\t_\t_\t_\t_\t_\t_\t_\t_\n" + line(1, "a", "2") + line(2, "b", "0", "0:root|2.1:e") +
                           "2.1\te\t_\t_\t_\t_\t_\t_\t2:x\t_\n" + line(3, "c", "2") + "\n";
  const auto out = sp::parse_conllu(text, sp::ParseMode::syntactic);
  ASSERT_EQ(out[0].size(), 3u);
  EXPECT_EQ(out[0].tokens[1].deps, (std::vector<sp::DepArc>{{0, "root"}}));
}

TEST(Conllu, SentenceKeys) {
  const std::string text = "# sent_id = s42\n" + kThree + kThree + kThree;
  const auto out = sp::parse_conllu(text, sp::ParseMode::syntactic);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(sp::sentence_key(out[0]), "s42");
  EXPECT_EQ(sp::sentence_key(out[1]), "000001");
  EXPECT_EQ(sp::sentence_key(out[2]), "000002");
}

TEST(Conllu, DuplicateExplicitIdIsError) {
  const std::string text = "# sent_id = s1\n" + kThree + "# sent_id = s1\n" + kThree;
  EXPECT_EQ(kind_of(text, sp::ParseMode::syntactic), sp::ErrorKind::duplicate_key);
}

TEST(Conllu, CrlfAndTrailingBlankLines) {
  std::string text;
  for (char c : kThree) {
    if (c == '\n') text += '\r';
    text += c;
  }
  text += "\n\n";
  const auto out = sp::parse_conllu(text, sp::ParseMode::syntactic);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].tokens[2].misc, "_");
}

TEST(Conllu, FileOrderIsOutputOrder) {
  std::string text;
  for (int i = 0; i < 5; ++i) text += "# sent_id = k" + std::to_string(4 - i) + "\n" + kThree;
  const auto out = sp::parse_conllu(text, sp::ParseMode::syntactic);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(out[i].sentence_id, "k" + std::to_string(4 - i));
}

TEST(Conllu, PunctuationRule) {
  sp::Token t;
  t.form = "hello";
  EXPECT_FALSE(sp::is_punctuation(t));
  t.form = "--";
  EXPECT_TRUE(sp::is_punctuation(t));
  t.form = "a.";
  EXPECT_FALSE(sp::is_punctuation(t));
  t.upos = "PUNCT";
  EXPECT_TRUE(sp::is_punctuation(t));
  t.upos = "NOUN";
  t.form = "\xd0\xb4\xd0\xb0";  // Cyrillic word
  EXPECT_FALSE(sp::is_punctuation(t));
}

TEST(Conllu, RoundTripHandWritten) {
  const std::string text = "# sent_id = r1\n# text = a b c\n" + line(1, "a", "2", "2:ARG1|3:ARG2", "NOUN") +
                           line(2, "b", "0", "0:root", "VERB") + line(3, ",", "2", "_", "PUNCT") + "\n";
  for (auto mode : {sp::ParseMode::syntactic, sp::ParseMode::semantic}) {
    const auto first = sp::parse_conllu(text, mode);
    const auto again = sp::parse_conllu(sp::write_conllu(first), mode);
    EXPECT_EQ(first, again);
  }
}

TEST(ConlluProperty, RoundTripRandomTrees) {
  sp::Rng rng(11);
  std::vector<sp::DepStructure> corpus;
  for (int s = 0; s < 50; ++s) {
    const int n = 1 + static_cast<int>(rng.below(15));
    const int root = 1 + static_cast<int>(rng.below(n));
    auto tree = sp::tree_structure(n == 1 ? std::set<sp::Edge>{} : sp::random_tree(n, rng), n, root,
                                   "t" + std::to_string(s), s);
    corpus.push_back(tree);
  }
  const auto text = sp::write_conllu(corpus);
  const auto parsed = sp::parse_conllu(text, sp::ParseMode::syntactic);
  ASSERT_EQ(parsed.size(), corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    EXPECT_EQ(parsed[i].edges, corpus[i].edges);
    EXPECT_EQ(parsed[i].roots, corpus[i].roots);
    EXPECT_EQ(parsed[i].edges.size(), parsed[i].size() - 1);
    EXPECT_EQ(sp::write_conllu(std::span(&parsed[i], 1)), sp::write_conllu(std::span(&corpus[i], 1)));
  }
}
