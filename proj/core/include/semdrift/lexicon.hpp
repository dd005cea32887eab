#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "semdrift/corpus.hpp"

namespace semdrift {

struct AnnualCollocateCounts;

// Mean ratings on the 1-9 scale. Arousal is taken as oriented
// 1 = calm, 9 = aroused; files are never reverse-coded on load.
struct AffectRating {
  double valence = 0;
  double arousal = 0;
};

enum class AffectDimension { kValence, kArousal };

constexpr double kNormMin = 1.0;
constexpr double kNormMax = 9.0;

class AffectNorms {
 public:
  // Throws FormatError on a duplicate lemma or a value outside [1,9].
  void insert(std::string lemma, AffectRating rating);

  const AffectRating* find(std::string_view lemma) const;
  std::optional<double> rating(std::string_view lemma,
                               AffectDimension dim) const;

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::map<std::string, AffectRating, std::less<>>& entries() const {
    return entries_;
  }

 private:
  std::map<std::string, AffectRating, std::less<>> entries_;
};

// CSV with a header row. Canonical columns: word, valence_mean, arousal_mean.
// The published column names (Word, V.Mean.Sum, A.Mean.Sum) are accepted as
// well; extra columns are ignored. Missing column, duplicate lemma or an
// out-of-range value is fatal (FormatError naming the rows).
AffectNorms load_norms(const std::filesystem::path& path);
AffectNorms parse_norms(std::istream& in, const std::string& source = "<stream>");

// Writes the canonical three-column CSV, lemmas sorted.
void write_norms(std::ostream& out, const AffectNorms& norms);

struct ThemeDictionary {
  std::string name;
  WordSet terms;

  // The 17-term pathologization dictionary.
  static ThemeDictionary pathologization();
};

struct IntensifierSet {
  WordSet adjectives;

  // great, intense, severe, harsh, major, extreme, powerful, serious,
  // devastating, destructive, debilitating
  static IntensifierSet standard();
};

// One term per line, '#' comments. Throws FormatError if empty or if a term
// contains whitespace.
ThemeDictionary load_theme_dictionary(const std::filesystem::path& path,
                                      std::string name);
IntensifierSet load_intensifiers(const std::filesystem::path& path);

// Share of collocate tokens (pooled over all years) whose lemma has a norm.
// nullopt when there are no collocate tokens at all.
std::optional<double> coverage(const AffectNorms& norms,
                               const AnnualCollocateCounts& counts);

}  // namespace semdrift
