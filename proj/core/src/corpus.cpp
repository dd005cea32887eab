#include "semdrift/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <string>

#include <json.hpp>

#include "semdrift/common.hpp"

namespace semdrift {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool is_word_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c == '_';
}

std::string collapse_ws(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending = false;
  for (char c : s) {
    if (is_space(c)) {
      pending = !out.empty();
      continue;
    }
    if (pending) out.push_back(' ');
    pending = false;
    out.push_back(c);
  }
  return out;
}

bool replace_all_with_space(std::string& s, std::string_view lit) {
  if (lit.empty()) return false;
  std::size_t pos = s.find(lit);
  if (pos == std::string::npos) return false;
  std::string out;
  out.reserve(s.size());
  std::size_t from = 0;
  while (pos != std::string::npos) {
    out.append(s, from, pos - from);
    out.push_back(' ');
    from = pos + lit.size();
    pos = s.find(lit, from);
  }
  out.append(s, from, std::string::npos);
  s = std::move(out);
  return true;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::optional<int> parse_int(std::string_view s) {
  s = trim(s);
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) {
    return std::nullopt;
  }
  return v;
}

WarningSink effective_sink(const LoadOptions& o) {
  if (o.warn) return o.warn;
  return [](const std::string& msg) { std::clog << "warning: " << msg << '\n'; };
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

std::optional<int> json_year(const nlohmann::json& j) {
  if (j.is_number_integer()) {
    const auto v = j.get<long long>();
    if (v < INT32_MIN || v > INT32_MAX) return std::nullopt;
    return static_cast<int>(v);
  }
  if (j.is_string()) return parse_int(j.get_ref<const std::string&>());
  return std::nullopt;
}

std::string where(const std::filesystem::path& p, std::size_t line) {
  return p.string() + ":" + std::to_string(line);
}

}  // namespace

Genre parse_genre(std::string_view tag) {
  const std::string t = ascii_lower(trim(tag));
  if (t == "fiction" || t == "fic") return Genre::kFiction;
  if (t == "magazine" || t == "mag") return Genre::kMagazine;
  if (t == "news" || t == "newspaper") return Genre::kNews;
  if (t == "nonfiction" || t == "nf") return Genre::kNonfiction;
  if (t == "spoken" || t == "spok") return Genre::kSpoken;
  if (t == "tv") return Genre::kTv;
  if (t == "abstract") return Genre::kAbstract;
  return Genre::kOther;
}

std::string_view genre_name(Genre g) {
  switch (g) {
    case Genre::kFiction: return "fiction";
    case Genre::kMagazine: return "magazine";
    case Genre::kNews: return "news";
    case Genre::kNonfiction: return "nonfiction";
    case Genre::kSpoken: return "spoken";
    case Genre::kTv: return "tv";
    case Genre::kAbstract: return "abstract";
    case Genre::kOther: return "other";
  }
  return "other";
}

CleaningRuleSet CleaningRuleSet::standard() {
  CleaningRuleSet r;
  r.literals = {"@",    "&c?;", "q!",  "|p130",     "NUL", "( STAR )",
                "<p>",  "<>",   " // ", " | ",      " -- ", "*",
                "..",   "PHOTO", "( COLOR )", "ILLUSTRATION", "/"};
  std::stable_sort(r.literals.begin(), r.literals.end(),
                   [](const std::string& a, const std::string& b) {
                     return a.size() > b.size();
                   });
  return r;
}

std::string clean_text(std::string_view text, const CleaningRuleSet& rules) {
  std::string cur = collapse_ws(text);
  for (;;) {
    bool changed = false;
    for (const auto& lit : rules.literals) {
      changed |= replace_all_with_space(cur, lit);
    }
    std::string next = collapse_ws(cur);
    changed |= next != cur;
    cur = std::move(next);
    if (!changed) return cur;
  }
}

TargetPhrase::TargetPhrase(std::string phrase, std::vector<std::string> surface)
    : canonical(std::move(phrase)), variants(std::move(surface)) {
  if (variants.empty()) variants.push_back(canonical);
}

std::string TargetPhrase::fused() const { return fused_token(canonical); }

std::string fused_token(std::string_view phrase) {
  std::string out;
  for (auto tok : split_ws(phrase)) {
    if (!out.empty()) out.push_back('_');
    out.append(tok);
  }
  return out;
}

std::string fuse_targets(std::string_view text,
                         const std::vector<TargetPhrase>& targets) {
  struct Pattern {
    std::string_view surface;
    std::string replacement;
  };
  std::vector<Pattern> patterns;
  for (const auto& t : targets) {
    for (const auto& v : t.variants) {
      if (!v.empty()) patterns.push_back({v, t.fused()});
    }
  }
  std::stable_sort(patterns.begin(), patterns.end(),
                   [](const Pattern& a, const Pattern& b) {
                     return a.surface.size() > b.surface.size();
                   });

  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const bool at_boundary = i == 0 || !is_word_char(text[i - 1]);
    bool matched = false;
    if (at_boundary) {
      for (const auto& p : patterns) {
        if (text.compare(i, p.surface.size(), p.surface) != 0) continue;
        const std::size_t end = i + p.surface.size();
        if (end < text.size() && is_word_char(text[end])) continue;
        out += p.replacement;
        i = end;
        matched = true;
        break;
      }
    }
    if (!matched) out.push_back(text[i++]);
  }
  return out;
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  auto flush = [&](std::size_t end) {
    auto piece = trim(text.substr(start, end - start));
    if (!piece.empty()) out.emplace_back(piece);
    start = end;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') {
      flush(i);
      start = i + 1;
    } else if ((c == '.' || c == '!' || c == '?') &&
               (i + 1 == text.size() || is_space(text[i + 1]))) {
      flush(i + 1);
    }
  }
  flush(text.size());
  return out;
}

std::vector<std::string_view> split_ws(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    const std::size_t b = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > b) out.push_back(text.substr(b, i - b));
  }
  return out;
}

const WordSet& default_stopwords() {
  static const WordSet words = {
      "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you",
      "you're", "you've", "you'll", "you'd", "your", "yours", "yourself",
      "yourselves", "he", "him", "his", "himself", "she", "she's", "her",
      "hers", "herself", "it", "it's", "its", "itself", "they", "them",
      "their", "theirs", "themselves", "what", "which", "who", "whom", "this",
      "that", "that'll", "these", "those", "am", "is", "are", "was", "were",
      "be", "been", "being", "have", "has", "had", "having", "do", "does",
      "did", "doing", "a", "an", "the", "and", "but", "if", "or", "because",
      "as", "until", "while", "of", "at", "by", "for", "with", "about",
      "against", "between", "into", "through", "during", "before", "after",
      "above", "below", "to", "from", "up", "down", "in", "out", "on", "off",
      "over", "under", "again", "further", "then", "once", "here", "there",
      "when", "where", "why", "how", "all", "any", "both", "each", "few",
      "more", "most", "other", "some", "such", "no", "nor", "not", "only",
      "own", "same", "so", "than", "too", "very", "s", "t", "can", "will",
      "just", "don", "don't", "should", "should've", "now", "d", "ll", "m",
      "o", "re", "ve", "y", "ain", "aren", "aren't", "couldn", "couldn't",
      "didn", "didn't", "doesn", "doesn't", "hadn", "hadn't", "hasn",
      "hasn't", "haven", "haven't", "isn", "isn't", "ma", "mightn",
      "mightn't", "mustn", "mustn't", "needn", "needn't", "shan", "shan't",
      "shouldn", "shouldn't", "wasn", "wasn't", "weren", "weren't", "won",
      "won't", "wouldn", "wouldn't"};
  return words;
}

std::vector<std::string> load_word_list(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    out.push_back(ascii_lower(t));
  }
  return out;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

bool is_punctuation(std::string_view token) {
  if (token.empty()) return false;
  return std::all_of(token.begin(), token.end(), [](char c) {
    const auto u = static_cast<unsigned char>(c);
    return u < 0x80 && !is_word_char(c) && !is_space(c);
  });
}

bool is_numeric(std::string_view token) {
  bool digit = false;
  for (char c : token) {
    if (c >= '0' && c <= '9') {
      digit = true;
    } else if (std::string_view(".,:-/%+").find(c) == std::string_view::npos) {
      return false;
    }
  }
  return digit;
}

RawFormat raw_format_for(const std::filesystem::path& path) {
  const auto ext = ascii_lower(path.extension().string());
  return (ext == ".tsv" || ext == ".tab") ? RawFormat::kTsv : RawFormat::kJsonl;
}

LoadStats read_raw_corpus(const std::filesystem::path& path, RawFormat format,
                          const LoadOptions& options,
                          const std::function<void(Document&&)>& sink) {
  auto in = open_or_throw(path);
  const auto warn = effective_sink(options);
  LoadStats st;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    ++st.records;

    Document doc;
    std::optional<int> year;
    bool ok = false;
    if (format == RawFormat::kJsonl) {
      auto j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_object() && j.contains("doc_id") && j.contains("text") &&
          j["text"].is_string() && j.contains("year")) {
        const auto& id = j["doc_id"];
        doc.doc_id = id.is_string() ? id.get<std::string>() : id.dump();
        doc.text = j["text"].get<std::string>();
        if (j.contains("genre") && j["genre"].is_string()) {
          doc.genre = parse_genre(j["genre"].get<std::string>());
        }
        year = json_year(j["year"]);
        ok = true;
      }
    } else {
      std::string_view rest = line;
      std::string_view cols[3];
      int c = 0;
      for (; c < 3; ++c) {
        const auto tab = rest.find('\t');
        if (tab == std::string_view::npos) break;
        cols[c] = rest.substr(0, tab);
        rest.remove_prefix(tab + 1);
      }
      if (c == 3) {
        doc.doc_id = std::string(cols[0]);
        year = parse_int(cols[1]);
        doc.genre = parse_genre(cols[2]);
        doc.text = std::string(rest);
        ok = true;
      }
    }

    if (!ok) {
      ++st.skipped;
      warn(where(path, lineno) + ": malformed record skipped");
      continue;
    }
    if (!year) {
      ++st.skipped;
      warn(where(path, lineno) + ": unparseable year, record skipped");
      continue;
    }
    doc.year = *year;
    if (options.study_window && !options.study_window->contains(doc.year)) {
      ++st.out_of_window;
      continue;
    }
    if (options.cleaning) {
      doc.text = clean_text(doc.text, *options.cleaning);
      if (doc.text.empty()) {
        ++st.empty;
        continue;
      }
    }
    ++st.loaded;
    sink(std::move(doc));
  }
  return st;
}

std::vector<Document> load_raw_corpus(const std::filesystem::path& path,
                                      RawFormat format,
                                      const LoadOptions& options,
                                      LoadStats* stats) {
  std::vector<Document> docs;
  auto st = read_raw_corpus(path, format, options,
                            [&](Document&& d) { docs.push_back(std::move(d)); });
  if (stats) *stats = st;
  return docs;
}

LoadStats read_lemma_corpus(const std::filesystem::path& path,
                            const LoadOptions& options,
                            const std::function<void(LemmaSentence&&)>& sink) {
  auto in = open_or_throw(path);
  const auto warn = effective_sink(options);
  const WordSet& stop =
      options.stopwords ? *options.stopwords : default_stopwords();
  LoadStats st;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    ++st.records;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (!j.is_object() || !j.contains("doc_id") || !j.contains("year") ||
        !j.contains("sentences") || !j["sentences"].is_array()) {
      ++st.skipped;
      warn(where(path, lineno) + ": malformed record skipped");
      continue;
    }
    const auto year = json_year(j["year"]);
    if (!year) {
      ++st.skipped;
      warn(where(path, lineno) + ": unparseable year, record skipped");
      continue;
    }
    if (options.study_window && !options.study_window->contains(*year)) {
      ++st.out_of_window;
      continue;
    }
    const auto& id = j["doc_id"];
    const std::string doc_id = id.is_string() ? id.get<std::string>() : id.dump();

    bool malformed = false;
    std::vector<LemmaSentence> out;
    for (const auto& sent : j["sentences"]) {
      if (!sent.is_array()) {
        malformed = true;
        break;
      }
      LemmaSentence ls{doc_id, *year, {}};
      for (const auto& lem : sent) {
        if (!lem.is_string()) {
          malformed = true;
          break;
        }
        std::string w = ascii_lower(trim(lem.get_ref<const std::string&>()));
        if (w.empty() || is_punctuation(w) || is_numeric(w)) continue;
        if (!options.keep_stopwords && stop.contains(w)) continue;
        ls.lemmas.push_back(std::move(w));
      }
      if (malformed) break;
      if (!ls.lemmas.empty()) out.push_back(std::move(ls));
    }
    if (malformed) {
      ++st.skipped;
      warn(where(path, lineno) + ": non-string lemma, record skipped");
      continue;
    }
    ++st.loaded;
    for (auto& s : out) sink(std::move(s));
  }
  return st;
}

std::vector<LemmaSentence> load_lemma_corpus(const std::filesystem::path& path,
                                             const LoadOptions& options,
                                             LoadStats* stats) {
  std::vector<LemmaSentence> out;
  auto st = read_lemma_corpus(
      path, options, [&](LemmaSentence&& s) { out.push_back(std::move(s)); });
  if (stats) *stats = st;
  return out;
}

namespace {

struct ConlluState {
  const std::filesystem::path& path;
  const LoadOptions& options;
  const WarningSink& warn;
  const std::function<void(ParsedDocument&&)>& sink;
  LoadStats st{};

  bool have_doc = false;
  std::size_t doc_line = 0;
  std::optional<int> year{};
  ParsedDocument doc{};

  ParsedSentence sentence{};
  bool sentence_bad = false;
  bool sentence_open = false;
  std::size_t sentence_line = 0;

  void end_sentence() {
    if (!sentence_open) return;
    if (!sentence_bad) {
      for (const auto& t : sentence) {
        if (t.head < 0 || t.head > static_cast<int>(sentence.size()) ||
            t.deprel.empty()) {
          sentence_bad = true;
          break;
        }
      }
    }
    if (sentence_bad || sentence.empty()) {
      ++st.sentences_skipped;
      warn(where(path, sentence_line) + ": malformed sentence skipped");
    } else if (!have_doc) {
      ++st.sentences_skipped;
      warn(where(path, sentence_line) + ": sentence outside any document");
    } else {
      doc.sentences.push_back(std::move(sentence));
    }
    sentence.clear();
    sentence_bad = false;
    sentence_open = false;
  }

  void end_document() {
    end_sentence();
    if (!have_doc) return;
    ++st.records;
    have_doc = false;
    if (!year) {
      ++st.skipped;
      warn(where(path, doc_line) + ": document " + doc.doc_id +
           " has no year metadata, skipped");
    } else if (options.study_window && !options.study_window->contains(*year)) {
      ++st.out_of_window;
    } else {
      doc.year = *year;
      ++st.loaded;
      sink(std::move(doc));
    }
    doc = ParsedDocument{};
    year.reset();
  }
};

std::optional<std::string_view> comment_value(std::string_view line,
                                              std::string_view key) {
  // "# key = value"
  line.remove_prefix(1);
  line = trim(line);
  if (line.substr(0, key.size()) != key) return std::nullopt;
  line.remove_prefix(key.size());
  line = trim(line);
  if (line.empty() || line.front() != '=') return std::nullopt;
  line.remove_prefix(1);
  return trim(line);
}

}  // namespace

LoadStats read_conllu(const std::filesystem::path& path,
                      const LoadOptions& options,
                      const std::function<void(ParsedDocument&&)>& sink) {
  auto in = open_or_throw(path);
  const auto warn = effective_sink(options);
  ConlluState s{path, options, warn, sink};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) {
      s.end_sentence();
      continue;
    }
    if (line.front() == '#') {
      if (auto v = comment_value(line, "doc_id")) {
        s.end_document();
        s.have_doc = true;
        s.doc_line = lineno;
        s.doc.doc_id = std::string(*v);
      } else if (auto y = comment_value(line, "year")) {
        if (s.have_doc) s.year = parse_int(*y);
      }
      continue;
    }

    if (!s.sentence_open) {
      s.sentence_open = true;
      s.sentence_line = lineno;
    }
    if (s.sentence_bad) continue;

    std::vector<std::string_view> cols;
    std::string_view rest = line;
    for (;;) {
      const auto tab = rest.find('\t');
      cols.push_back(rest.substr(0, tab));
      if (tab == std::string_view::npos) break;
      rest.remove_prefix(tab + 1);
    }
    if (cols.size() != 10) {
      s.sentence_bad = true;
      continue;
    }
    const std::string_view id = cols[0];
    if (id.find('-') != std::string_view::npos ||
        id.find('.') != std::string_view::npos) {
      continue;
    }
    const auto idx = parse_int(id);
    const auto head = parse_int(cols[6]);
    if (!idx || *idx != static_cast<int>(s.sentence.size()) + 1 || !head) {
      s.sentence_bad = true;
      continue;
    }
    ParsedToken tok;
    tok.form = std::string(cols[1]);
    tok.lemma = std::string(cols[2]);
    tok.upos = std::string(cols[3]);
    tok.head = *head;
    tok.deprel = cols[7] == "_" ? std::string() : std::string(cols[7]);
    s.sentence.push_back(std::move(tok));
  }
  s.end_document();
  return s.st;
}

std::vector<ParsedDocument> load_conllu(const std::filesystem::path& path,
                                        const LoadOptions& options,
                                        LoadStats* stats) {
  std::vector<ParsedDocument> out;
  auto st = read_conllu(path, options,
                        [&](ParsedDocument&& d) { out.push_back(std::move(d)); });
  if (stats) *stats = st;
  return out;
}

}  // namespace semdrift
