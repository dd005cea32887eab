#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semdrift/collocates.hpp"
#include "semdrift/corpus.hpp"
#include "semdrift/lexicon.hpp"

namespace semdrift {

enum class IndexKind {
  kValence,
  kArousal,
  kBreadth,
  kIntensifier,
  kTheme,
  kSalience,
};

// An index name as it appears in outputs: "valence", "theme:pathologization".
struct IndexId {
  IndexKind kind = IndexKind::kValence;
  std::string theme;  // only for kTheme

  std::string name() const;
  // Throws ConfigError on an unknown name. "theme" alone means
  // "theme:pathologization".
  static IndexId parse(std::string_view name);

  friend bool operator==(const IndexId&, const IndexId&) = default;
};

struct Scale {
  double lo = 0;
  double hi = 1;
};

Scale nominal_scale(IndexKind kind);

struct SeriesPoint {
  int time_unit = 0;  // calendar year, or interval start
  double value = 0;
  std::int64_t n = 0;  // support count behind the value
  bool flagged = false;  // outside the nominal scale (breadth only)
};

// Points sorted by time; missing periods are absent, not zero.
struct IndexSeries {
  std::string target;
  std::string index_name;
  Scale scale;
  std::vector<SeriesPoint> points;

  const SeriesPoint* at(int time_unit) const;
};

// Per year: sum(rating * count) / sum(count) over norm-matched collocates.
// Years whose matched total is below min_matched are absent.
IndexSeries weighted_norm_index(const AnnualCollocateCounts& counts,
                                const AffectNorms& norms, AffectDimension dim,
                                std::int64_t min_matched = 1);

// Per year: dictionary-term collocates / all collocates.
IndexSeries theme_index(const AnnualCollocateCounts& counts,
                        const ThemeDictionary& dict);

// Per year: share of target occurrences with at least one dependent whose
// deprel is `relation` and whose lowercase lemma is an intensifier. A token is
// a target occurrence when its form or lemma equals the fused target.
IndexSeries intensifier_index(std::span<const ParsedDocument> parsed,
                              std::string_view target,
                              const IntensifierSet& intensifiers,
                              std::string_view relation = "amod");

// True when a whitespace token denotes the target once leading and trailing
// ASCII punctuation is stripped ("mental_health," counts).
bool token_is_target(std::string_view token, std::string_view target);

// Per year: target tokens / all whitespace tokens of the cleaned, fused raw
// text. Years with no tokens are absent.
IndexSeries salience(std::span<const Document> docs, std::string_view target);

// Drops points whose time unit falls in any of the ranges.
IndexSeries apply_year_mask(IndexSeries series,
                            std::span<const YearRange> excluded);

// CSV: target,index,time_unit,value,n
void write_series_csv(std::ostream& out, std::span<const IndexSeries> series);
// Groups rows by (target, index) in first-seen order. Throws FormatError.
std::vector<IndexSeries> read_series_csv(std::istream& in);

}  // namespace semdrift
