#include "semdrift/indices.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <map>
#include <ostream>

#include "semdrift/common.hpp"
#include "semdrift/csv.hpp"

namespace semdrift {

std::string IndexId::name() const {
  switch (kind) {
    case IndexKind::kValence: return "valence";
    case IndexKind::kArousal: return "arousal";
    case IndexKind::kBreadth: return "breadth";
    case IndexKind::kIntensifier: return "intensifier";
    case IndexKind::kTheme: return "theme:" + theme;
    case IndexKind::kSalience: return "salience";
  }
  return {};
}

IndexId IndexId::parse(std::string_view name) {
  if (name == "valence") return {IndexKind::kValence, {}};
  if (name == "arousal") return {IndexKind::kArousal, {}};
  if (name == "breadth") return {IndexKind::kBreadth, {}};
  if (name == "intensifier") return {IndexKind::kIntensifier, {}};
  if (name == "salience") return {IndexKind::kSalience, {}};
  if (name == "theme") return {IndexKind::kTheme, "pathologization"};
  if (name.starts_with("theme:") && name.size() > 6) {
    return {IndexKind::kTheme, std::string(name.substr(6))};
  }
  throw ConfigError("unknown index '" + std::string(name) + "'");
}

Scale nominal_scale(IndexKind kind) {
  switch (kind) {
    case IndexKind::kValence:
    case IndexKind::kArousal:
      return {kNormMin, kNormMax};
    default:
      return {0.0, 1.0};
  }
}

const SeriesPoint* IndexSeries::at(int time_unit) const {
  auto it = std::lower_bound(
      points.begin(), points.end(), time_unit,
      [](const SeriesPoint& p, int t) { return p.time_unit < t; });
  return (it != points.end() && it->time_unit == time_unit) ? &*it : nullptr;
}

IndexSeries weighted_norm_index(const AnnualCollocateCounts& counts,
                                const AffectNorms& norms, AffectDimension dim,
                                std::int64_t min_matched) {
  if (min_matched < 1) min_matched = 1;
  const auto kind = dim == AffectDimension::kValence ? IndexKind::kValence
                                                     : IndexKind::kArousal;
  IndexSeries s{counts.target, IndexId{kind, {}}.name(), nominal_scale(kind), {}};
  for (const auto& [year, terms] : counts.per_year) {
    double weighted = 0;
    std::int64_t matched = 0;
    for (const auto& [lemma, n] : terms) {
      const auto r = norms.rating(lemma, dim);
      if (!r) continue;
      weighted += *r * static_cast<double>(n);
      matched += n;
    }
    if (matched < min_matched) continue;
    s.points.push_back({year, weighted / static_cast<double>(matched), matched});
  }
  return s;
}

IndexSeries theme_index(const AnnualCollocateCounts& counts,
                        const ThemeDictionary& dict) {
  IndexSeries s{counts.target, IndexId{IndexKind::kTheme, dict.name}.name(),
                nominal_scale(IndexKind::kTheme), {}};
  for (const auto& [year, terms] : counts.per_year) {
    std::int64_t hits = 0;
    std::int64_t total = 0;
    for (const auto& [lemma, n] : terms) {
      total += n;
      if (dict.terms.contains(lemma)) hits += n;
    }
    if (total == 0) continue;
    s.points.push_back(
        {year, static_cast<double>(hits) / static_cast<double>(total), total});
  }
  return s;
}

IndexSeries intensifier_index(std::span<const ParsedDocument> parsed,
                              std::string_view target,
                              const IntensifierSet& intensifiers,
                              std::string_view relation) {
  std::map<int, std::pair<std::int64_t, std::int64_t>> by_year;  // hits, occ
  std::vector<char> hit;
  for (const auto& doc : parsed) {
    for (const auto& sent : doc.sentences) {
      hit.assign(sent.size(), 0);
      for (const auto& tok : sent) {
        if (tok.head < 1 || tok.deprel != relation) continue;
        if (!intensifiers.adjectives.contains(ascii_lower(tok.lemma))) continue;
        hit[static_cast<std::size_t>(tok.head - 1)] = 1;
      }
      for (std::size_t i = 0; i < sent.size(); ++i) {
        if (sent[i].form != target && sent[i].lemma != target) continue;
        auto& [h, occ] = by_year[doc.year];
        ++occ;
        h += hit[i];
      }
    }
  }
  IndexSeries s{std::string(target), "intensifier",
                nominal_scale(IndexKind::kIntensifier), {}};
  for (const auto& [year, ho] : by_year) {
    s.points.push_back({year,
                        static_cast<double>(ho.first) /
                            static_cast<double>(ho.second),
                        ho.second});
  }
  return s;
}

bool token_is_target(std::string_view token, std::string_view target) {
  auto strip = [](char c) {
    const auto u = static_cast<unsigned char>(c);
    return u < 0x80 && c != '_' && std::ispunct(u);
  };
  while (!token.empty() && strip(token.front())) token.remove_prefix(1);
  while (!token.empty() && strip(token.back())) token.remove_suffix(1);
  return token == target;
}

IndexSeries salience(std::span<const Document> docs, std::string_view target) {
  std::map<int, std::pair<std::int64_t, std::int64_t>> by_year;  // hits, tokens
  for (const auto& d : docs) {
    auto& [hits, tokens] = by_year[d.year];
    for (auto tok : split_ws(d.text)) {
      ++tokens;
      if (token_is_target(tok, target)) ++hits;
    }
  }
  IndexSeries s{std::string(target), "salience",
                nominal_scale(IndexKind::kSalience), {}};
  for (const auto& [year, ht] : by_year) {
    if (ht.second == 0) continue;
    s.points.push_back({year,
                        static_cast<double>(ht.first) /
                            static_cast<double>(ht.second),
                        ht.second});
  }
  return s;
}

IndexSeries apply_year_mask(IndexSeries series,
                            std::span<const YearRange> excluded) {
  std::erase_if(series.points, [&](const SeriesPoint& p) {
    return std::any_of(excluded.begin(), excluded.end(),
                       [&](const YearRange& r) { return r.contains(p.time_unit); });
  });
  return series;
}

void write_series_csv(std::ostream& out, std::span<const IndexSeries> series) {
  out << "target,index,time_unit,value,n\n";
  for (const auto& s : series) {
    for (const auto& p : s.points) {
      out << csv::escape(s.target) << ',' << csv::escape(s.index_name) << ','
          << p.time_unit << ',' << csv::format_double(p.value) << ',' << p.n
          << '\n';
    }
  }
}

std::vector<IndexSeries> read_series_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("series CSV: empty input");
  const auto header = csv::split_line(line);
  auto col = [&](std::string_view name) -> int {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    throw FormatError("series CSV: missing column '" + std::string(name) + "'");
  };
  const int ct = col("target"), ci = col("index"), cu = col("time_unit"),
            cv = col("value"), cn = col("n");
  const auto need = static_cast<std::size_t>(std::max({ct, ci, cu, cv, cn}));

  std::vector<IndexSeries> out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto f = csv::split_line(line);
    const std::string at = "series CSV row " + std::to_string(row);
    if (f.size() <= need) throw FormatError(at + ": too few columns");
    const auto t = csv::parse_double(f[cu]);
    const auto v = csv::parse_double(f[cv]);
    const auto n = csv::parse_double(f[cn]);
    if (!t || !v || !n) throw FormatError(at + ": non-numeric field");

    auto it = std::find_if(out.begin(), out.end(), [&](const IndexSeries& s) {
      return s.target == f[ct] && s.index_name == f[ci];
    });
    if (it == out.end()) {
      Scale sc{0, 1};
      try {
        sc = nominal_scale(IndexId::parse(f[ci]).kind);
      } catch (const ConfigError&) {
      }
      out.push_back({f[ct], f[ci], sc, {}});
      it = std::prev(out.end());
    }
    it->points.push_back({static_cast<int>(*t), *v, static_cast<std::int64_t>(*n)});
  }
  for (auto& s : out) {
    std::stable_sort(s.points.begin(), s.points.end(),
                     [](const SeriesPoint& a, const SeriesPoint& b) {
                       return a.time_unit < b.time_unit;
                     });
  }
  return out;
}

}  // namespace semdrift
