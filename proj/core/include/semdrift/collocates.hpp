#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semdrift/corpus.hpp"

namespace semdrift {

using TermCounts = std::map<std::string, std::int64_t, std::less<>>;
// year (or period start) -> term -> count
using PeriodCounts = std::map<int, TermCounts>;

// Unfiltered collocate counts of one target, by calendar year.
struct AnnualCollocateCounts {
  std::string target;
  PeriodCounts per_year;
  std::map<int, std::int64_t> totals;

  void add(int year, std::string_view lemma, std::int64_t n = 1);
  // Associative, commutative; targets must match.
  void merge(const AnnualCollocateCounts& other);
  std::int64_t grand_total() const;
};

// Where "+/- window words" is measured.
enum class WindowSpace {
  kLemma,    // positions in the stop-word-free lemma stream (default)
  kSurface,  // positions in the full token stream; stop words dropped after
};

// Up to `window` lemmas either side of each target occurrence, within the
// sentence. Occurrences contribute independently; other target tokens are
// never emitted. Output order: occurrence by occurrence, left then right.
std::vector<std::string> extract_collocates(std::span<const std::string> lemmas,
                                            std::string_view target,
                                            int window);

// Surface-space variant: lemmas still contain stop words, which occupy window
// positions but are not emitted.
std::vector<std::string> extract_collocates_surface(
    std::span<const std::string> lemmas, std::string_view target, int window,
    const WordSet& stopwords);

// Incremental counter for several targets over one pass of a lemma stream.
class CollocateCounter {
 public:
  CollocateCounter(std::vector<std::string> targets, int window,
                   WindowSpace space = WindowSpace::kLemma,
                   const WordSet* stopwords = nullptr);

  void add(const LemmaSentence& sentence);
  const AnnualCollocateCounts& counts(std::string_view target) const;
  const std::vector<AnnualCollocateCounts>& all() const { return counts_; }

 private:
  std::vector<AnnualCollocateCounts> counts_;
  int window_;
  WindowSpace space_;
  const WordSet* stopwords_;
};

// Throws std::invalid_argument when window < 1.
AnnualCollocateCounts annual_collocate_counts(
    std::span<const LemmaSentence> corpus, std::string_view target, int window,
    WindowSpace space = WindowSpace::kLemma,
    const WordSet* stopwords = nullptr);

// Adjectival-modifier dependents of a target, by year: lowercase lemma of
// every token whose deprel is `relation` and whose head is a target token.
PeriodCounts annual_modifier_counts(std::span<const ParsedDocument> corpus,
                                    std::string_view target,
                                    std::string_view relation = "amod");

// Sums annual counts into periods starting at multiples of period_length
// (1990..1999 -> 1990 for period_length 10).
PeriodCounts bin_periods(const PeriodCounts& annual, int period_length);

int period_start(int year, int period_length);

struct RankedTerm {
  std::string term;
  double relative = 0;  // count / period total
  std::int64_t count = 0;
};

// Per period, terms by relative count descending, ties lexicographic, at most
// k. Periods with no counts map to an empty list.
std::map<int, std::vector<RankedTerm>> top_k(const PeriodCounts& periods,
                                             int k);

// Annual counts -> binned -> ranked.
std::map<int, std::vector<RankedTerm>> top_k(const PeriodCounts& annual, int k,
                                             int period_length);

}  // namespace semdrift
