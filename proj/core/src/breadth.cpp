#include "semdrift/breadth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "semdrift/common.hpp"
#include "semdrift/random.hpp"

namespace semdrift {

std::vector<int> interval_starts(const YearRange& window, int interval_len) {
  if (interval_len < 1) throw std::invalid_argument("interval_len must be >= 1");
  std::vector<int> out;
  for (int s = window.first; s + interval_len - 1 <= window.last;
       s += interval_len) {
    out.push_back(s);
  }
  return out;
}

std::map<int, std::vector<TargetSentence>> collect_target_sentences(
    std::span<const Document> fused_docs, std::string_view target,
    const YearRange& window, int interval_len) {
  const auto starts = interval_starts(window, interval_len);
  std::map<int, std::vector<TargetSentence>> out;
  for (int s : starts) out[s];
  if (starts.empty()) return out;
  const int last = starts.back() + interval_len - 1;
  for (const auto& d : fused_docs) {
    if (d.year < window.first || d.year > last) continue;
    const int start = window.first + (d.year - window.first) / interval_len * interval_len;
    auto& bucket = out[start];
    for (auto& sent : split_sentences(d.text)) {
      const auto toks = split_ws(sent);
      const bool has = std::any_of(toks.begin(), toks.end(), [&](auto t) {
        return token_is_target(t, target);
      });
      if (has) bucket.push_back({d.doc_id, d.year, std::move(sent)});
    }
  }
  return out;
}

std::vector<SentenceSample> sample_sentences(std::span<const TargetSentence> pool,
                                             int sample_size, int repeats,
                                             std::uint64_t seed,
                                             int interval_start) {
  if (sample_size < 2) throw std::invalid_argument("sample size must be >= 2");
  if (repeats < 1) throw std::invalid_argument("repeats must be >= 1");
  const std::size_t take =
      std::min(pool.size(), static_cast<std::size_t>(sample_size));
  std::vector<SentenceSample> out;
  out.reserve(static_cast<std::size_t>(repeats));
  std::vector<std::size_t> idx(pool.size());
  for (int r = 1; r <= repeats; ++r) {
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(derive_seed(seed, interval_start, r));
    partial_shuffle(idx, take, rng);
    std::vector<std::size_t> chosen(idx.begin(), idx.begin() + take);
    std::sort(chosen.begin(), chosen.end());
    SentenceSample s{interval_start, r, {}, take >= 2};
    s.sentences.reserve(take);
    for (auto i : chosen) s.sentences.push_back(pool[i]);
    out.push_back(std::move(s));
  }
  return out;
}

double cosine_similarity(const EmbeddingVector& u, const EmbeddingVector& v) {
  if (u.values.size() != v.values.size()) {
    throw std::invalid_argument("embedding dimensions differ");
  }
  double dot = 0, uu = 0, vv = 0;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    dot += u.values[i] * v.values[i];
    uu += u.values[i] * u.values[i];
    vv += v.values[i] * v.values[i];
  }
  // For u == v, dot == uu == vv and sqrt(uu * uu) == uu, so cos is exactly 1.
  return dot / std::sqrt(uu * vv);
}

PairwiseDistance mean_pairwise_distance(std::span<const EmbeddingVector> vectors,
                                        std::span<const std::string> labels) {
  const std::size_t n = vectors.size();
  if (n < 2) throw std::invalid_argument("need at least two vectors");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(vectors[i].norm > 0) || !std::isfinite(vectors[i].norm)) {
      std::string what = "zero-norm embedding at position " + std::to_string(i);
      if (i < labels.size()) what += " (sentence: \"" + labels[i] + "\")";
      throw NumericError(what);
    }
  }
  double sum = 0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      sum += 1.0 - cosine_similarity(vectors[i], vectors[j]);
      ++pairs;
    }
  }
  return {sum / static_cast<double>(pairs), pairs};
}

IndexSeries breadth_series(std::span<const Document> fused_docs,
                           std::string_view target, Embedder& embedder,
                           const BreadthParams& params) {
  IndexSeries series{std::string(target), "breadth",
                     nominal_scale(IndexKind::kBreadth), {}};
  const auto pools = collect_target_sentences(fused_docs, target, params.window,
                                              params.interval_len);
  for (const auto& [start, pool] : pools) {
    if (pool.size() < 2) continue;
    const auto samples = sample_sentences(pool, params.sample_size,
                                          params.repeats, params.seed, start);
    double acc = 0;
    for (const auto& s : samples) {
      std::vector<std::string> texts;
      texts.reserve(s.sentences.size());
      for (const auto& t : s.sentences) texts.push_back(t.text);
      const auto vecs = embedder.embed(texts);
      acc += mean_pairwise_distance(vecs, texts).mean;
    }
    const double value = acc / static_cast<double>(samples.size());
    series.points.push_back({start, value, static_cast<std::int64_t>(pool.size()),
                             value > series.scale.hi});
  }
  return series;
}

}  // namespace semdrift
