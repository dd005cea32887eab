#include "semdrift/collocates.hpp"

#include <algorithm>
#include <map>
#include <random>

#include <gtest/gtest.h>

namespace sd = semdrift;

using Words = std::vector<std::string>;

namespace {

std::map<std::string, int> multiset(const Words& w) {
  std::map<std::string, int> m;
  for (const auto& x : w) ++m[x];
  return m;
}

// Random sentence over a small vocabulary so that targets repeat and
// neighbors collide.
Words random_sentence(std::mt19937_64& rng, const std::string& target) {
  const Words vocab = {"a", "b", "c", "d", "e", "f", target};
  Words s(1 + rng() % 30);
  for (auto& w : s) w = vocab[rng() % vocab.size()];
  return s;
}

}  // namespace

TEST(ExtractCollocates, Examples) {
  EXPECT_EQ(sd::extract_collocates(Words{"a", "b", "T", "c", "d"}, "T", 5),
            (Words{"a", "b", "c", "d"}));
  EXPECT_TRUE(sd::extract_collocates(Words{"T"}, "T", 5).empty());
  EXPECT_EQ(sd::extract_collocates(Words{"x", "T", "y", "T", "z"}, "T", 1),
            (Words{"x", "y", "y", "z"}));
}

TEST(ExtractCollocates, WindowBoundsAndOrder) {
  const Words s = {"a", "b", "c", "d", "T", "e", "f", "g"};
  EXPECT_EQ(sd::extract_collocates(s, "T", 2), (Words{"c", "d", "e", "f"}));
  EXPECT_THROW(sd::extract_collocates(s, "T", 0), std::invalid_argument);
}

TEST(ExtractCollocates, SurfaceSpaceCountsStopwordPositions) {
  const sd::WordSet stop = {"the", "of"};
  const Words s = {"fear", "the", "of", "T", "the", "stigma", "care"};
  EXPECT_EQ(sd::extract_collocates_surface(s, "T", 1, stop), Words{});
  EXPECT_EQ(sd::extract_collocates_surface(s, "T", 2, stop), Words{"stigma"});
  EXPECT_EQ(sd::extract_collocates_surface(s, "T", 3, stop), (Words{"fear", "stigma", "care"}));
}

TEST(WindowProperties, Monotonicity) {
  std::mt19937_64 rng(101);
  for (int i = 0; i < 1000; ++i) {
    const auto s = random_sentence(rng, "T");
    for (int w = 1; w < 8; ++w) {
      auto small = multiset(sd::extract_collocates(s, "T", w));
      auto big = multiset(sd::extract_collocates(s, "T", w + 1));
      for (const auto& [k, n] : small) EXPECT_GE(big[k], n);
    }
  }
}

TEST(WindowProperties, ReversalSymmetry) {
  std::mt19937_64 rng(202);
  for (int i = 0; i < 1000; ++i) {
    auto s = random_sentence(rng, "T");
    const auto fwd = multiset(sd::extract_collocates(s, "T", 3));
    std::reverse(s.begin(), s.end());
    EXPECT_EQ(multiset(sd::extract_collocates(s, "T", 3)), fwd);
  }
}

TEST(WindowProperties, AdjacentOccurrencesDoubleCount) {
  // A neighbor within reach of two occurrences is counted once per occurrence.
  std::mt19937_64 rng(303);
  for (int i = 0; i < 1000; ++i) {
    const auto s = random_sentence(rng, "T");
    const int w = 1 + static_cast<int>(rng() % 5);
    std::map<std::string, int> expect;
    for (std::size_t p = 0; p < s.size(); ++p) {
      if (s[p] != "T") continue;
      for (std::size_t q = 0; q < s.size(); ++q) {
        const auto d = static_cast<long>(q) - static_cast<long>(p);
        if (q == p || std::labs(d) > w || s[q] == "T") continue;
        ++expect[s[q]];
      }
    }
    EXPECT_EQ(multiset(sd::extract_collocates(s, "T", w)), expect);
  }
}

TEST(AnnualCounts, SingleSentence) {
  std::vector<sd::LemmaSentence> c = {{"d", 1995, {"a", "T", "b"}}};
  auto r = sd::annual_collocate_counts(c, "T", 5);
  ASSERT_EQ(r.per_year.size(), 1u);
  EXPECT_EQ(r.per_year[1995]["a"], 1);
  EXPECT_EQ(r.per_year[1995]["b"], 1);
  EXPECT_EQ(r.totals[1995], 2);
}

TEST(AnnualCounts, YearPartition) {
  std::vector<sd::LemmaSentence> c = {{"d", 1995, {"a", "T", "b"}}, {"e", 1996, {"a", "T", "b"}}};
  auto r = sd::annual_collocate_counts(c, "T", 5);
  ASSERT_EQ(r.per_year.size(), 2u);
  EXPECT_EQ(r.per_year[1995], r.per_year[1996]);
}

TEST(AnnualCounts, TotalsEqualEmittedPairs) {
  std::mt19937_64 rng(404);
  std::vector<sd::LemmaSentence> c;
  std::size_t emitted = 0;
  for (int i = 0; i < 200; ++i) {
    auto s = random_sentence(rng, "T");
    emitted += sd::extract_collocates(s, "T", 5).size();
    c.push_back({"d", 1990 + static_cast<int>(rng() % 5), s});
  }
  auto r = sd::annual_collocate_counts(c, "T", 5);
  EXPECT_EQ(static_cast<std::size_t>(r.grand_total()), emitted);
  for (const auto& [y, terms] : r.per_year) {
    std::int64_t sum = 0;
    for (const auto& [t, n] : terms) sum += n;
    EXPECT_EQ(sum, r.totals.at(y));
  }
}

TEST(AnnualCounts, TenSentenceBruteForce) {
  const std::vector<sd::LemmaSentence> c = {
      {"1", 1990, {"fear", "T", "stigma", "care"}},
      {"2", 1990, {"T", "T", "hope"}},
      {"3", 1991, {"a", "b", "c", "d", "e", "f", "T"}},
      {"4", 1991, {"T"}},
      {"5", 1992, {"x", "y"}},
      {"6", 1992, {"T", "x", "x", "x", "x", "x", "x", "y"}},
      {"7", 1993, {"care", "T", "care"}},
      {"8", 1993, {"T", "other", "T"}},
      {"9", 1990, {"stigma", "T"}},
      {"10", 1991, {"g", "T", "h", "T", "i"}},
  };
  std::map<int, std::map<std::string, std::int64_t>> expect;
  for (const auto& s : c) {
    const auto& w = s.lemmas;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i] != "T") continue;
      for (std::size_t j = 0; j < w.size(); ++j) {
        if (j == i || w[j] == "T") continue;
        if (std::labs(static_cast<long>(j) - static_cast<long>(i)) <= 5) ++expect[s.year][w[j]];
      }
    }
  }
  auto r = sd::annual_collocate_counts(c, "T", 5);
  ASSERT_EQ(r.per_year.size(), expect.size());
  for (const auto& [y, terms] : expect) {
    for (const auto& [t, n] : terms) EXPECT_EQ(r.per_year[y][t], n) << y << " " << t;
    EXPECT_EQ(r.per_year[y].size(), terms.size());
  }
}

TEST(AnnualCounts, MergeIsCommutative) {
  sd::AnnualCollocateCounts a{"T", {}, {}}, b{"T", {}, {}};
  a.add(1990, "x", 2);
  b.add(1990, "x", 1);
  b.add(1991, "y", 4);
  auto ab = a, ba = b;
  ab.merge(b);
  ba.merge(a);
  EXPECT_EQ(ab.per_year, ba.per_year);
  EXPECT_EQ(ab.totals, ba.totals);
  sd::AnnualCollocateCounts other{"U", {}, {}};
  EXPECT_THROW(a.merge(other), std::invalid_argument);
}

TEST(Counter, TracksSeveralTargets) {
  sd::CollocateCounter counter({"mental_health", "mental_illness"}, 2);
  counter.add({"d", 2000, {"poor", "mental_health", "mental_illness", "stigma"}});
  EXPECT_EQ(counter.counts("mental_health").per_year.at(2000).at("mental_illness"), 1);
  EXPECT_EQ(counter.counts("mental_illness").per_year.at(2000).at("poor"), 1);
  EXPECT_THROW(counter.counts("nope"), std::out_of_range);
}

TEST(Modifiers, AmodOfTarget) {
  sd::ParsedDocument d{"d", 1995, {}};
  d.sentences.push_back({{"severe", "severe", "ADJ", 3, "amod"},
                         {"and", "and", "CCONJ", 3, "cc"},
                         {"mental_illness", "mental_illness", "NOUN", 0, "root"},
                         {"Serious", "Serious", "ADJ", 5, "amod"},
                         {"cost", "cost", "NOUN", 3, "conj"}});
  std::vector<sd::ParsedDocument> corpus{d};
  auto m = sd::annual_modifier_counts(corpus, "mental_illness");
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[1995].size(), 1u);
  EXPECT_EQ(m[1995]["severe"], 1);
}

TEST(TopK, Examples) {
  sd::PeriodCounts p;
  p[1990]["severe"] = 10;
  p[1990]["serious"] = 8;
  auto r = sd::top_k(p, 2);
  ASSERT_EQ(r[1990].size(), 2u);
  EXPECT_EQ(r[1990][0].term, "severe");
  EXPECT_EQ(r[1990][1].term, "serious");
  EXPECT_DOUBLE_EQ(r[1990][0].relative, 10.0 / 18.0);
  EXPECT_TRUE(sd::top_k(sd::PeriodCounts{}, 10).empty());
}

TEST(TopK, TiesAreLexicographicAndTruncated) {
  sd::PeriodCounts p;
  p[2000] = {{"b", 3}, {"a", 3}, {"c", 1}, {"d", 5}};
  auto r = sd::top_k(p, 3);
  ASSERT_EQ(r[2000].size(), 3u);
  EXPECT_EQ(r[2000][0].term, "d");
  EXPECT_EQ(r[2000][1].term, "a");
  EXPECT_EQ(r[2000][2].term, "b");
}

TEST(TopK, BinsYearsIntoDecades) {
  sd::PeriodCounts annual;
  annual[1991]["severe"] = 2;
  annual[1999]["severe"] = 2;
  annual[1995]["serious"] = 3;
  annual[2003]["great"] = 1;
  auto r = sd::top_k(annual, 10, 10);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[1990][0].term, "severe");
  EXPECT_EQ(r[1990][0].count, 4);
  EXPECT_EQ(r[2000][0].term, "great");
  EXPECT_EQ(sd::period_start(1999, 10), 1990);
  EXPECT_EQ(sd::period_start(-1, 10), -10);
}
