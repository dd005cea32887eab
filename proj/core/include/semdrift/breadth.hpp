#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semdrift/corpus.hpp"
#include "semdrift/embedding.hpp"
#include "semdrift/indices.hpp"

namespace semdrift {

struct TargetSentence {
  std::string doc_id;
  int year = 0;
  std::string text;
};

struct BreadthParams {
  YearRange window{1970, 2014};
  int interval_len = 5;
  int sample_size = 50;  // S
  int repeats = 10;      // R
  std::uint64_t seed = 0;
};

// Interval starts partitioning the window: 1970, 1975, ..., 2010 by default.
// A trailing partial interval is dropped.
std::vector<int> interval_starts(const YearRange& window, int interval_len);

// Sentences (from split_sentences over each document's fused raw text) that
// contain the target token, grouped by interval start. Every interval of the
// window appears, possibly empty; years outside the window are ignored.
std::map<int, std::vector<TargetSentence>> collect_target_sentences(
    std::span<const Document> fused_docs, std::string_view target,
    const YearRange& window, int interval_len);

struct SentenceSample {
  int interval_start = 0;
  int repeat_id = 0;  // 1..R
  std::vector<TargetSentence> sentences;
  bool usable = false;  // at least two sentences
};

// R uniform samples without replacement of min(S, |pool|) sentences. Repeat r
// draws from Rng(derive_seed(seed, interval_start, r)); selected sentences
// keep pool order. Throws std::invalid_argument unless S >= 2 and R >= 1.
std::vector<SentenceSample> sample_sentences(std::span<const TargetSentence> pool,
                                             int sample_size, int repeats,
                                             std::uint64_t seed,
                                             int interval_start);

double cosine_similarity(const EmbeddingVector& u, const EmbeddingVector& v);

struct PairwiseDistance {
  double mean = 0;
  std::size_t pairs = 0;
};

// Mean of (1 - cos) over the n(n-1)/2 unordered pairs. Needs n >= 2 and no
// zero-norm vector; `labels`, when given, names the offending input in the
// NumericError.
PairwiseDistance mean_pairwise_distance(std::span<const EmbeddingVector> vectors,
                                        std::span<const std::string> labels = {});

// Per interval: mean over repeats of the sample's mean pairwise distance.
// Intervals with fewer than two sentences are absent; n is the pool size.
// Values above 1 are kept and flagged.
IndexSeries breadth_series(std::span<const Document> fused_docs,
                           std::string_view target, Embedder& embedder,
                           const BreadthParams& params);

}  // namespace semdrift
