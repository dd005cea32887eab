#include "semdrift/collocates.hpp"

#include <algorithm>
#include <stdexcept>

#include "semdrift/common.hpp"

namespace semdrift {

void AnnualCollocateCounts::add(int year, std::string_view lemma,
                                std::int64_t n) {
  auto& bucket = per_year[year];
  auto it = bucket.find(lemma);
  if (it == bucket.end()) {
    bucket.emplace(std::string(lemma), n);
  } else {
    it->second += n;
  }
  totals[year] += n;
}

void AnnualCollocateCounts::merge(const AnnualCollocateCounts& other) {
  if (other.target != target) {
    throw std::invalid_argument("merging counts of different targets");
  }
  for (const auto& [year, terms] : other.per_year) {
    for (const auto& [lemma, n] : terms) add(year, lemma, n);
  }
}

std::int64_t AnnualCollocateCounts::grand_total() const {
  std::int64_t t = 0;
  for (const auto& [y, n] : totals) t += n;
  return t;
}

std::vector<std::string> extract_collocates(std::span<const std::string> lemmas,
                                            std::string_view target,
                                            int window) {
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  std::vector<std::string> out;
  const auto n = static_cast<std::ptrdiff_t>(lemmas.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    if (lemmas[i] != target) continue;
    const auto lo = std::max<std::ptrdiff_t>(0, i - window);
    const auto hi = std::min<std::ptrdiff_t>(n - 1, i + window);
    for (auto j = lo; j <= hi; ++j) {
      if (j == i || lemmas[j] == target) continue;
      out.push_back(lemmas[j]);
    }
  }
  return out;
}

std::vector<std::string> extract_collocates_surface(
    std::span<const std::string> lemmas, std::string_view target, int window,
    const WordSet& stopwords) {
  auto all = extract_collocates(lemmas, target, window);
  std::erase_if(all, [&](const std::string& w) { return stopwords.contains(w); });
  return all;
}

CollocateCounter::CollocateCounter(std::vector<std::string> targets, int window,
                                   WindowSpace space, const WordSet* stopwords)
    : window_(window),
      space_(space),
      stopwords_(stopwords ? stopwords : &default_stopwords()) {
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  for (auto& t : targets) {
    counts_.push_back(AnnualCollocateCounts{std::move(t), {}, {}});
  }
}

void CollocateCounter::add(const LemmaSentence& sentence) {
  for (auto& c : counts_) {
    const auto words =
        space_ == WindowSpace::kLemma
            ? extract_collocates(sentence.lemmas, c.target, window_)
            : extract_collocates_surface(sentence.lemmas, c.target, window_,
                                         *stopwords_);
    for (const auto& w : words) c.add(sentence.year, w);
  }
}

const AnnualCollocateCounts& CollocateCounter::counts(
    std::string_view target) const {
  for (const auto& c : counts_) {
    if (c.target == target) return c;
  }
  throw std::out_of_range("target not tracked: " + std::string(target));
}

AnnualCollocateCounts annual_collocate_counts(
    std::span<const LemmaSentence> corpus, std::string_view target, int window,
    WindowSpace space, const WordSet* stopwords) {
  CollocateCounter counter({std::string(target)}, window, space, stopwords);
  for (const auto& s : corpus) counter.add(s);
  return counter.all().front();
}

PeriodCounts annual_modifier_counts(std::span<const ParsedDocument> corpus,
                                    std::string_view target,
                                    std::string_view relation) {
  PeriodCounts out;
  for (const auto& doc : corpus) {
    for (const auto& sent : doc.sentences) {
      for (const auto& tok : sent) {
        if (tok.deprel != relation || tok.head < 1) continue;
        const auto& head = sent[static_cast<std::size_t>(tok.head - 1)];
        if (head.form != target && head.lemma != target) continue;
        out[doc.year][ascii_lower(tok.lemma)] += 1;
      }
    }
  }
  return out;
}

int period_start(int year, int period_length) {
  // floor division, so negative years bin consistently
  int q = year / period_length;
  if (year % period_length != 0 && year < 0) --q;
  return q * period_length;
}

PeriodCounts bin_periods(const PeriodCounts& annual, int period_length) {
  if (period_length < 1) throw std::invalid_argument("period_length must be >= 1");
  PeriodCounts out;
  for (const auto& [year, terms] : annual) {
    auto& bucket = out[period_start(year, period_length)];
    for (const auto& [t, n] : terms) bucket[t] += n;
  }
  return out;
}

std::map<int, std::vector<RankedTerm>> top_k(const PeriodCounts& periods,
                                             int k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  std::map<int, std::vector<RankedTerm>> out;
  for (const auto& [period, terms] : periods) {
    std::int64_t total = 0;
    for (const auto& [t, n] : terms) total += n;
    auto& ranked = out[period];
    if (total <= 0) continue;
    for (const auto& [t, n] : terms) {
      if (n <= 0) continue;
      ranked.push_back({t, static_cast<double>(n) / static_cast<double>(total), n});
    }
    // Same denominator within a period, so ranking by count is ranking by
    // relative count without rounding ties.
    std::sort(ranked.begin(), ranked.end(),
              [](const RankedTerm& a, const RankedTerm& b) {
                if (a.count != b.count) return a.count > b.count;
                return a.term < b.term;
              });
    if (ranked.size() > static_cast<std::size_t>(k)) ranked.resize(k);
  }
  return out;
}

std::map<int, std::vector<RankedTerm>> top_k(const PeriodCounts& annual, int k,
                                             int period_length) {
  return top_k(bin_periods(annual, period_length), k);
}

}  // namespace semdrift
