// Copyright 2026 The artlang Authors. All Rights Reserved.
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
// =============================================================================
#include <sstream>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "artlang/corpus.hpp"
#include "artlang/error.hpp"
#include "artlang/io.hpp"
#include "artlang/table_model.hpp"
#include "support/test_support.hpp"

namespace artlang {
namespace {

using ::testing::ElementsAre;
using nlohmann::json;

TEST(TaggingTest, TagsWholeWordsAndSkipsPieces) {
  const TableModel m(json{{"vocabulary", {"[CLS]", "good", "##ly", "reason", "the"}},
                          {"special_tokens", {"[CLS]"}}});
  const LexiconTagger tagger({{"good", "ADJ"}, {"reason", "NOUN"}, {"the", "DET"}, {"##ly", "ADV"}});
  const auto tagged = tag_vocabulary(m, tagger);
  ASSERT_EQ(tagged.size(), 3u);
  EXPECT_EQ(tagged[0].token, "good");
  EXPECT_EQ(tagged[0].pos, "ADJ");
  EXPECT_EQ(tagged[0].rank, 1);
  EXPECT_EQ(tagged[1].pos, "NOUN");
  EXPECT_EQ(tagger.Tag("unknown"), "X");
}

TEST(TaggingTest, LexiconFileRoundTripAndMissingFile) {
  const auto dir = testing::ScratchDir("tagger");
  WriteFileAtomic(dir / "lex.tsv", "# token\tlabel\ngood\tADJ\nreason\tNOUN\n");
  const auto t = LexiconTagger::FromFile(dir / "lex.tsv");
  EXPECT_EQ(t.size(), 2u);
  EXPECT_EQ(t.Tag("good"), "ADJ");
  EXPECT_THROW(LexiconTagger::FromFile(dir / "absent.tsv"), EnvironmentError);
}

TEST(PosSetsTest, TakesMostFrequentFirstAndCaps) {
  const std::vector<TaggedToken> tagged{{"a", "NOUN", 0}, {"b", "ADJ", 1}, {"c", "NOUN", 2},
                                        {"d", "ADJ", 3},  {"e", "NOUN", 4}, {"f", "VERB", 5}};
  const auto s = select_pos_sets(tagged, 2, 5);
  EXPECT_THAT(s.nouns, ElementsAre("a", "c"));
  EXPECT_THAT(s.adjectives, ElementsAre("b", "d"));
}

TEST(GradabilityTest, RatioOfSeedModifiedOccurrences) {
  const std::vector<std::string> adjs{"good"};
  GradabilityCounter c(adjs, DefaultGradabilitySeeds());
  c.AddLine("very good . good .");
  EXPECT_EQ(c.modified("good"), 1);
  EXPECT_EQ(c.total("good"), 2);
  const auto r = rank_gradable(adjs, c);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].ratio, 0.5);
}

TEST(GradabilityTest, RanksByRatioAndKeepsTopN) {
  const std::vector<std::string> adjs{"red", "good", "tall", "rare"};
  GradabilityCounter c(adjs, DefaultGradabilitySeeds());
  std::istringstream corpus(
      "The house is red. A red car.\n"
      "Very GOOD food, really good!\n"
      "He is somewhat tall. Tall trees. Tall towers.\n");
  c.AddStream(corpus);
  const auto r = rank_gradable(adjs, c, 3);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[0].adjective, "good");
  EXPECT_EQ(r[0].ratio, 1.0);
  EXPECT_EQ(r[1].adjective, "tall");
  EXPECT_EQ(r[1].ratio, 1.0 / 3.0);
  // Ties keep the original order: red (0/2) before rare (0/0).
  EXPECT_EQ(r[2].adjective, "red");
}

TEST(BaseSentenceTest, NounMajorWithBothCopulas) {
  const std::vector<std::string> nouns{"reason", "idea"}, adjs{"simple", "good", "real"};
  const auto s = generate_base_sentences(nouns, adjs);
  ASSERT_EQ(s.size(), 12u);
  EXPECT_EQ(s[0].text, "The reason is simple.");
  EXPECT_EQ(s[1].text, "The reason are simple.");
  EXPECT_EQ(s[11].text, "The idea are real.");
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(s[i].id, i);
}

TEST(PerplexityFilterTest, KeepsLowestPerplexity) {
  // Per-token probabilities chosen so the perplexities are 3, 1 and 2.
  const TableModel m(json{{"vocabulary", {"x"}},
                          {"causal",
                           {{"The a is x.", {1.0 / 3, 1.0 / 3, 1.0 / 3, 1.0 / 3}},
                            {"The b is x.", {1.0, 1.0, 1.0, 1.0}},
                            {"The c is x.", {0.5, 0.5, 0.5, 0.5}}}}});
  std::vector<TemplateSentence> s;
  for (const char* n : {"a", "b", "c"}) {
    s.push_back({s.size(), n, "x", Copula::kIs, RenderSentence(n, Copula::kIs, "x"), std::nullopt});
  }
  const auto kept = filter_by_perplexity(s, m, 2);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0].id, 1u);
  EXPECT_EQ(kept[1].id, 2u);
  EXPECT_NEAR(*kept[0].perplexity, 1.0, 1e-12);
  EXPECT_NEAR(*kept[1].perplexity, 2.0, 1e-12);
  EXPECT_EQ(filter_by_perplexity(s, m, 10).size(), 3u);
}

TEST(BaseSentenceTest, TsvRoundTrip) {
  const auto dir = testing::ScratchDir("base");
  std::vector<TemplateSentence> s{{3, "names", "real", Copula::kAre, "The names are real.", 12.5},
                                  {7, "idea", "good", Copula::kIs, "The idea is good.", std::nullopt}};
  WriteBaseSentences(dir / "b.tsv", s);
  const auto back = ReadBaseSentences(dir / "b.tsv");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].id, 3u);
  EXPECT_EQ(back[0].copula, Copula::kAre);
  EXPECT_EQ(*back[0].perplexity, 12.5);
  EXPECT_FALSE(back[1].perplexity.has_value());
  EXPECT_EQ(back[1].text, "The idea is good.");
}

TEST(BaseSentenceTest, RejectsTextThatDoesNotMatchTemplate) {
  const auto dir = testing::ScratchDir("badbase");
  WriteFileAtomic(dir / "b.tsv",
                  "id\tnoun\tadjective\tcopula\ttext\tperplexity\n0\tidea\tgood\tis\tThe idea is bad.\t\n");
  EXPECT_THROW(ReadBaseSentences(dir / "b.tsv"), FormatError);
}

}  // namespace
}  // namespace artlang
