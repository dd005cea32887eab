#include "semdrift/breadth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "semdrift/common.hpp"

namespace sd = semdrift;

namespace {

std::vector<sd::TargetSentence> pool_of(int n) {
  std::vector<sd::TargetSentence> p;
  for (int i = 0; i < n; ++i) p.push_back({"d", 1990, "sentence " + std::to_string(i) + " T."});
  return p;
}

sd::EmbeddingVector vec(std::vector<double> v) { return sd::EmbeddingVector(std::move(v)); }

}  // namespace

TEST(Intervals, DefaultWindow) {
  const auto s = sd::interval_starts({1970, 2014}, 5);
  ASSERT_EQ(s.size(), 9u);
  EXPECT_EQ(s.front(), 1970);
  EXPECT_EQ(s.back(), 2010);
  EXPECT_EQ(sd::interval_starts({1970, 2016}, 5).size(), 9u);  // 2015-2016 partial
}

TEST(CollectSentences, IntervalAssignment) {
  std::vector<sd::Document> docs = {
      {"a", 1972, sd::Genre::kNews, "About T here. Nothing. T again!"},
      {"b", 2015, sd::Genre::kNews, "Late T."},
      {"c", 1969, sd::Genre::kNews, "Early T."}};
  auto pools = sd::collect_target_sentences(docs, "T", {1970, 2014}, 5);
  EXPECT_EQ(pools.size(), 9u);
  ASSERT_EQ(pools[1970].size(), 2u);
  EXPECT_EQ(pools[1970][0].text, "About T here.");
  EXPECT_EQ(pools[1970][1].text, "T again!");
  for (const auto& [start, p] : pools) {
    if (start != 1970) EXPECT_TRUE(p.empty());
  }
}

TEST(CollectSentences, SevenSentencesTwoIntervals) {
  std::vector<sd::Document> docs = {
      {"a", 1990, sd::Genre::kNews, "x T. T y. z."},
      {"b", 1993, sd::Genre::kNews, "T one. T two."},
      {"c", 1996, sd::Genre::kNews, "T three. (T) four. T, five."}};
  auto pools = sd::collect_target_sentences(docs, "T", {1990, 1999}, 5);
  ASSERT_EQ(pools.size(), 2u);
  EXPECT_EQ(pools[1990].size(), 4u);
  EXPECT_EQ(pools[1995].size(), 3u);
}

TEST(Sampling, SmallPoolTakesAll) {
  auto p = pool_of(30);
  auto samples = sd::sample_sentences(p, 50, 10, 1, 1970);
  ASSERT_EQ(samples.size(), 10u);
  for (const auto& s : samples) {
    ASSERT_EQ(s.sentences.size(), 30u);
    for (std::size_t i = 0; i < 30; ++i) EXPECT_EQ(s.sentences[i].text, p[i].text);
  }
}

TEST(Sampling, SizeContractWithoutReplacement) {
  auto p = pool_of(100);
  auto samples = sd::sample_sentences(p, 50, 10, 99, 1980);
  ASSERT_EQ(samples.size(), 10u);
  std::set<std::string> firsts;
  for (const auto& s : samples) {
    EXPECT_EQ(s.sentences.size(), 50u);
    EXPECT_TRUE(s.usable);
    std::set<std::string> uniq;
    for (const auto& t : s.sentences) uniq.insert(t.text);
    EXPECT_EQ(uniq.size(), 50u);
    firsts.insert(s.sentences[0].text + s.sentences[1].text + s.sentences[2].text);
  }
  EXPECT_GT(firsts.size(), 1u);
}

TEST(Sampling, Deterministic) {
  auto p = pool_of(80);
  auto a = sd::sample_sentences(p, 50, 10, 7, 1990);
  auto b = sd::sample_sentences(p, 50, 10, 7, 1990);
  for (std::size_t r = 0; r < a.size(); ++r) {
    ASSERT_EQ(a[r].sentences.size(), b[r].sentences.size());
    for (std::size_t i = 0; i < a[r].sentences.size(); ++i) {
      EXPECT_EQ(a[r].sentences[i].text, b[r].sentences[i].text);
    }
  }
  auto c = sd::sample_sentences(p, 50, 10, 8, 1990);
  bool differs = false;
  for (std::size_t i = 0; i < 50; ++i) differs |= a[0].sentences[i].text != c[0].sentences[i].text;
  EXPECT_TRUE(differs);
}

TEST(Sampling, IntervalsIndependent) {
  auto p = pool_of(80);
  auto a = sd::sample_sentences(p, 10, 3, 7, 1990);
  auto b = sd::sample_sentences(p, 10, 3, 7, 1995);
  bool differs = false;
  for (std::size_t i = 0; i < 10; ++i) differs |= a[0].sentences[i].text != b[0].sentences[i].text;
  EXPECT_TRUE(differs);
}

TEST(Sampling, Preconditions) {
  auto p = pool_of(5);
  EXPECT_THROW(sd::sample_sentences(p, 1, 10, 0, 1970), std::invalid_argument);
  EXPECT_THROW(sd::sample_sentences(p, 50, 0, 0, 1970), std::invalid_argument);
  auto one = pool_of(1);
  EXPECT_FALSE(sd::sample_sentences(one, 50, 1, 0, 1970)[0].usable);
}

TEST(PairwiseDistance, Examples) {
  std::vector<sd::EmbeddingVector> same = {vec({0.3, -1.2, 4.0}), vec({0.3, -1.2, 4.0})};
  EXPECT_EQ(sd::mean_pairwise_distance(same).mean, 0.0);

  std::vector<sd::EmbeddingVector> ortho = {vec({1, 0}), vec({0, 1})};
  EXPECT_DOUBLE_EQ(sd::mean_pairwise_distance(ortho).mean, 1.0);

  const double r = 1.0 / std::sqrt(2.0);
  std::vector<sd::EmbeddingVector> diag = {vec({1, 0}), vec({r, r})};
  EXPECT_NEAR(sd::mean_pairwise_distance(diag).mean, 1.0 - std::sqrt(2.0) / 2.0, 1e-15);
  EXPECT_NEAR(sd::mean_pairwise_distance(diag).mean, 0.29289, 1e-5);
}

TEST(PairwiseDistance, FiftyVectorsBruteForce) {
  std::vector<sd::EmbeddingVector> v;
  std::vector<std::vector<double>> raw;
  for (int i = 0; i < 50; ++i) {
    raw.push_back(sd::StubProvider::project("sentence " + std::to_string(i), 32, 5));
    v.emplace_back(raw.back());
  }
  auto d = sd::mean_pairwise_distance(v);
  EXPECT_EQ(d.pairs, 1225u);
  long pairs = 0;
  EXPECT_NEAR(d.mean, oracle::mean_pairwise_distance(raw, &pairs), 1e-12);
  EXPECT_EQ(pairs, 1225);
}

TEST(PairwiseDistance, PermutationAndScaleInvariant) {
  std::mt19937_64 rng(4);
  std::vector<sd::EmbeddingVector> v;
  for (int i = 0; i < 12; ++i) v.emplace_back(sd::StubProvider::project(std::to_string(i), 8, 1));
  const double base = sd::mean_pairwise_distance(v).mean;
  std::shuffle(v.begin(), v.end(), rng);
  EXPECT_NEAR(sd::mean_pairwise_distance(v).mean, base, 1e-12);
  auto scaled = v[3].values;
  for (auto& x : scaled) x *= 17.5;
  v[3] = sd::EmbeddingVector(scaled);
  EXPECT_NEAR(sd::mean_pairwise_distance(v).mean, base, 1e-12);
}

TEST(PairwiseDistance, ZeroNormNamesSentence) {
  std::vector<sd::EmbeddingVector> v = {vec({1, 0}), vec({0, 0})};
  std::vector<std::string> labels = {"ok", "the bad one"};
  try {
    sd::mean_pairwise_distance(v, labels);
    FAIL();
  } catch (const sd::NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("the bad one"), std::string::npos);
  }
  std::vector<sd::EmbeddingVector> single = {vec({1, 0})};
  EXPECT_THROW(sd::mean_pairwise_distance(single), std::invalid_argument);
}

TEST(BreadthSeries, IdenticalSentencesGiveZero) {
  std::vector<sd::Document> docs;
  for (int y = 1970; y < 1980; ++y) {
    docs.push_back({"d", y, sd::Genre::kNews, "The T is here. The T is here."});
  }
  sd::StubProvider stub(16, 3);
  sd::EmbeddingCache cache;
  sd::Embedder emb(stub, cache);
  sd::BreadthParams p;
  p.window = {1970, 1979};
  auto s = sd::breadth_series(docs, "T", emb, p);
  ASSERT_EQ(s.points.size(), 2u);
  for (const auto& pt : s.points) EXPECT_EQ(pt.value, 0.0);
  EXPECT_EQ(s.points[0].n, 10);
}

TEST(BreadthSeries, SingleRepeatEqualsDirectDistance) {
  std::vector<sd::Document> docs;
  for (int i = 0; i < 30; ++i) {
    docs.push_back({"d", 1990 + i % 5, sd::Genre::kNews, "T number " + std::to_string(i) + "."});
  }
  sd::StubProvider stub(16, 3);
  sd::EmbeddingCache cache;
  sd::Embedder emb(stub, cache);
  sd::BreadthParams p{{1990, 1994}, 5, 20, 1, 11};
  auto s = sd::breadth_series(docs, "T", emb, p);
  ASSERT_EQ(s.points.size(), 1u);

  auto pools = sd::collect_target_sentences(docs, "T", p.window, 5);
  auto sample = sd::sample_sentences(pools[1990], 20, 1, 11, 1990)[0];
  std::vector<sd::EmbeddingVector> v;
  for (const auto& t : sample.sentences) v.emplace_back(sd::StubProvider::project(t.text, 16, 3));
  EXPECT_EQ(s.points[0].value, sd::mean_pairwise_distance(v).mean);
}

TEST(BreadthSeries, TwoIntervalsBruteForce) {
  std::vector<sd::Document> docs;
  for (int i = 0; i < 140; ++i) {
    const int y = 2000 + (i * 7) % 10;
    docs.push_back({"d" + std::to_string(i), y, sd::Genre::kNews,
                    "Filler words. The T case " + std::to_string(i) + " is notable. More filler."});
  }
  sd::StubProvider stub(24, 9);
  sd::EmbeddingCache cache;
  sd::Embedder emb(stub, cache);
  sd::BreadthParams p{{2000, 2009}, 5, 50, 10, 77};
  auto s = sd::breadth_series(docs, "T", emb, p);
  ASSERT_EQ(s.points.size(), 2u);

  // Oracle: pool sentences by interval in document order, redo the seeded
  // draws, embed with an independent stub implementation.
  for (const auto& pt : s.points) {
    std::vector<std::string> pool;
    for (const auto& d : docs) {
      if (d.year >= pt.time_unit && d.year < pt.time_unit + 5) {
        pool.push_back("The T case " + d.doc_id.substr(1) + " is notable.");
      }
    }
    double acc = 0;
    for (int r = 1; r <= 10; ++r) {
      std::vector<std::size_t> idx(pool.size());
      std::iota(idx.begin(), idx.end(), 0);
      std::mt19937_64 rng(sd::derive_seed(77, pt.time_unit, r));
      for (std::size_t i = 0; i < 50; ++i) {
        const std::uint64_t range = pool.size() - i;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
        std::uint64_t x;
        do x = rng(); while (x >= limit);
        std::swap(idx[i], idx[i + x % range]);
      }
      std::vector<std::size_t> chosen(idx.begin(), idx.begin() + 50);
      std::sort(chosen.begin(), chosen.end());
      std::vector<std::vector<double>> vs;
      for (auto c : chosen) vs.push_back(oracle::stub_vector(pool[c], 24, 9));
      acc += oracle::mean_pairwise_distance(vs);
    }
    EXPECT_NEAR(pt.value, acc / 10, 1e-12) << pt.time_unit;
    EXPECT_EQ(pt.n, static_cast<std::int64_t>(pool.size()));
  }
}

TEST(BreadthSeries, FlagsValuesAboveOne) {
  // Opposite vectors: distance 2, kept and flagged.
  sd::EmbeddingTable t{"opp", 2, {}};
  t.rows[sd::sentence_hash("T up.")] = {1, 0};
  t.rows[sd::sentence_hash("T down.")] = {-1, 0};
  sd::FileProvider fp(t);
  sd::EmbeddingCache cache;
  sd::Embedder emb(fp, cache);
  std::vector<sd::Document> docs = {{"a", 1970, sd::Genre::kNews, "T up. T down."}};
  sd::BreadthParams p{{1970, 1974}, 5, 50, 2, 0};
  auto s = sd::breadth_series(docs, "T", emb, p);
  ASSERT_EQ(s.points.size(), 1u);
  EXPECT_DOUBLE_EQ(s.points[0].value, 2.0);
  EXPECT_TRUE(s.points[0].flagged);
}

TEST(BreadthSeries, BitReproducible) {
  std::vector<sd::Document> docs;
  for (int i = 0; i < 200; ++i) {
    docs.push_back({"d", 1970 + i % 45, sd::Genre::kNews, "T " + std::to_string(i * 31 % 97) + "."});
  }
  sd::BreadthParams p;
  p.seed = 5;
  auto run = [&] {
    sd::StubProvider stub(32, 5);
    sd::EmbeddingCache cache;
    sd::Embedder emb(stub, cache);
    return sd::breadth_series(docs, "T", emb, p);
  };
  auto a = run(), b = run();
  ASSERT_EQ(a.points.size(), b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) EXPECT_EQ(a.points[i].value, b.points[i].value);
}
