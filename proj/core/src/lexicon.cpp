#include "semdrift/lexicon.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>

#include "semdrift/collocates.hpp"
#include "semdrift/common.hpp"
#include "semdrift/csv.hpp"

namespace semdrift {

namespace {

bool in_scale(double v) { return std::isfinite(v) && v >= kNormMin && v <= kNormMax; }

std::string trimmed(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

int find_column(const std::vector<std::string>& header,
                std::initializer_list<std::string_view> names) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    for (auto n : names) {
      if (header[i] == n) return static_cast<int>(i);
    }
  }
  return -1;
}

}  // namespace

void AffectNorms::insert(std::string lemma, AffectRating rating) {
  if (!in_scale(rating.valence) || !in_scale(rating.arousal)) {
    throw FormatError("rating for '" + lemma + "' outside [1,9]");
  }
  auto [it, inserted] = entries_.emplace(std::move(lemma), rating);
  if (!inserted) throw FormatError("duplicate lemma '" + it->first + "'");
}

const AffectRating* AffectNorms::find(std::string_view lemma) const {
  auto it = entries_.find(lemma);
  return it == entries_.end() ? nullptr : &it->second;
}

std::optional<double> AffectNorms::rating(std::string_view lemma,
                                          AffectDimension dim) const {
  const auto* r = find(lemma);
  if (!r) return std::nullopt;
  return dim == AffectDimension::kValence ? r->valence : r->arousal;
}

AffectNorms parse_norms(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) {
    throw FormatError(source + ": missing header row");
  }
  auto header = csv::split_line(line);
  for (auto& h : header) h = trimmed(h);
  const int word_col = find_column(header, {"word", "Word"});
  const int val_col = find_column(header, {"valence_mean", "V.Mean.Sum"});
  const int aro_col = find_column(header, {"arousal_mean", "A.Mean.Sum"});
  if (word_col < 0 || val_col < 0 || aro_col < 0) {
    std::string missing;
    if (word_col < 0) missing += " word";
    if (val_col < 0) missing += " valence_mean";
    if (aro_col < 0) missing += " arousal_mean";
    throw FormatError(source + ": missing column(s):" + missing);
  }
  const auto need = static_cast<std::size_t>(std::max({word_col, val_col, aro_col}));

  AffectNorms norms;
  std::unordered_map<std::string, std::size_t> first_row;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trimmed(line).empty()) continue;
    const auto f = csv::split_line(line);
    const std::string at = source + ": row " + std::to_string(row);
    if (f.size() <= need) throw FormatError(at + ": too few columns");
    std::string lemma = ascii_lower(trimmed(f[word_col]));
    const auto v = csv::parse_double(f[val_col]);
    const auto a = csv::parse_double(f[aro_col]);
    if (lemma.empty()) throw FormatError(at + ": empty word");
    if (!v || !a) throw FormatError(at + ": non-numeric rating");
    if (!in_scale(*v) || !in_scale(*a)) {
      throw FormatError(at + ": rating for '" + lemma + "' outside [1,9]");
    }
    auto [it, fresh] = first_row.emplace(lemma, row);
    if (!fresh) {
      throw FormatError(source + ": duplicate lemma '" + lemma + "' at rows " +
                        std::to_string(it->second) + " and " +
                        std::to_string(row));
    }
    norms.insert(std::move(lemma), {*v, *a});
  }
  return norms;
}

AffectNorms load_norms(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open norms file " + path.string());
  return parse_norms(in, path.string());
}

void write_norms(std::ostream& out, const AffectNorms& norms) {
  out << "word,valence_mean,arousal_mean\n";
  for (const auto& [w, r] : norms.entries()) {
    out << csv::escape(w) << ',' << csv::format_double(r.valence) << ','
        << csv::format_double(r.arousal) << '\n';
  }
}

ThemeDictionary ThemeDictionary::pathologization() {
  return {"pathologization",
          {"ailment", "clinical", "clinic", "cure", "diagnosis", "disease",
           "disorder", "ill", "illness", "medical", "medicine", "pathology",
           "prognosis", "sick", "sickness", "symptom", "treatment"}};
}

IntensifierSet IntensifierSet::standard() {
  return {{"great", "intense", "severe", "harsh", "major", "extreme",
           "powerful", "serious", "devastating", "destructive",
           "debilitating"}};
}

namespace {

WordSet load_single_token_list(const std::filesystem::path& path) {
  WordSet out;
  for (auto& w : load_word_list(path)) {
    if (w.find_first_of(" \t") != std::string::npos) {
      throw FormatError(path.string() + ": multi-word entry '" + w + "'");
    }
    out.insert(std::move(w));
  }
  if (out.empty()) throw FormatError(path.string() + ": no entries");
  return out;
}

}  // namespace

ThemeDictionary load_theme_dictionary(const std::filesystem::path& path,
                                      std::string name) {
  return {std::move(name), load_single_token_list(path)};
}

IntensifierSet load_intensifiers(const std::filesystem::path& path) {
  return {load_single_token_list(path)};
}

std::optional<double> coverage(const AffectNorms& norms,
                               const AnnualCollocateCounts& counts) {
  std::int64_t matched = 0;
  std::int64_t total = 0;
  for (const auto& [year, terms] : counts.per_year) {
    for (const auto& [lemma, n] : terms) {
      total += n;
      if (norms.find(lemma)) matched += n;
    }
  }
  if (total == 0) return std::nullopt;
  return static_cast<double>(matched) / static_cast<double>(total);
}

}  // namespace semdrift
