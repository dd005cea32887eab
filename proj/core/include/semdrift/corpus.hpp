#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace semdrift {

enum class Genre {
  kFiction,
  kMagazine,
  kNews,
  kNonfiction,
  kSpoken,
  kTv,
  kAbstract,
  kOther,
};

// Unknown tags map to kOther.
Genre parse_genre(std::string_view tag);
std::string_view genre_name(Genre g);

// Inclusive calendar-year range.
struct YearRange {
  int first = 1970;
  int last = 2016;

  bool contains(int year) const { return year >= first && year <= last; }
  bool empty() const { return last < first; }
  int span() const { return last - first + 1; }
};

struct Document {
  std::string doc_id;
  int year = 0;
  Genre genre = Genre::kOther;
  std::string text;
};

struct ParsedToken {
  std::string form;
  std::string lemma;
  std::string upos;
  int head = 0;  // 1-based; 0 = root
  std::string deprel;
};

using ParsedSentence = std::vector<ParsedToken>;

struct ParsedDocument {
  std::string doc_id;
  int year = 0;
  std::vector<ParsedSentence> sentences;
};

struct LemmaSentence {
  std::string doc_id;
  int year = 0;
  std::vector<std::string> lemmas;
};

using WordSet = std::unordered_set<std::string>;

// --- cleaning and target fusion -------------------------------------------

// Ordered literal removals applied to raw text.
struct CleaningRuleSet {
  std::vector<std::string> literals;

  // The corpus-dump literal list (web-interface debris, escaped HTML, layout
  // symbols), ordered multi-character first.
  static CleaningRuleSet standard();
};

// Removes every rule literal (each occurrence becomes a space), collapses
// whitespace runs to one space and trims. Repeats until a fixpoint, so the
// result is idempotent. Case is preserved.
std::string clean_text(std::string_view text, const CleaningRuleSet& rules);

// A multiword concept and the case-sensitive surface strings that denote it.
struct TargetPhrase {
  std::string canonical;              // lowercase, single spaces
  std::vector<std::string> variants;  // defaults to {canonical}

  explicit TargetPhrase(std::string phrase,
                        std::vector<std::string> surface = {});

  // "mental health" -> "mental_health"
  std::string fused() const;
};

// Replaces each matched variant with its fused token. Matches are whole-word
// (not flanked by letters, digits or '_'), longest variant first, taken
// left-to-right without overlap.
std::string fuse_targets(std::string_view text,
                         const std::vector<TargetPhrase>& targets);

// Fused token for a phrase given in any spacing ("mental  health" ->
// "mental_health"); single words are returned unchanged.
std::string fused_token(std::string_view phrase);

// Splits running text into sentences after '.', '!' or '?' followed by
// whitespace, and at newlines. Empty pieces are dropped.
std::vector<std::string> split_sentences(std::string_view text);

// Whitespace tokenization.
std::vector<std::string_view> split_ws(std::string_view text);

// --- word lists -----------------------------------------------------------

// The classic 179-entry English stop-word list.
const WordSet& default_stopwords();

// One entry per line; blank lines and '#' comments ignored; entries are
// trimmed and lowercased. Throws IoError if unreadable.
std::vector<std::string> load_word_list(const std::filesystem::path& path);

// ASCII lowercase; other bytes untouched.
std::string ascii_lower(std::string_view s);

// True for tokens made only of punctuation/symbol bytes.
bool is_punctuation(std::string_view token);
// True for tokens made only of digits and numeric separators (.,:-/%+).
bool is_numeric(std::string_view token);

// --- loaders --------------------------------------------------------------

using WarningSink = std::function<void(const std::string&)>;

struct LoadOptions {
  std::optional<YearRange> study_window;
  // When set, raw text is cleaned at load and empty documents are dropped.
  const CleaningRuleSet* cleaning = nullptr;
  // Lemma view: stop words to drop. nullptr = default_stopwords().
  const WordSet* stopwords = nullptr;
  // Lemma view: keep stop words (surface window space).
  bool keep_stopwords = false;
  // Defaults to printing on std::clog.
  WarningSink warn;
};

struct LoadStats {
  std::size_t records = 0;      // records (lines / document blocks) seen
  std::size_t loaded = 0;       // documents delivered
  std::size_t skipped = 0;      // malformed records
  std::size_t out_of_window = 0;
  std::size_t empty = 0;        // dropped as empty after cleaning
  std::size_t sentences_skipped = 0;  // CoNLL-U only
};

enum class RawFormat { kJsonl, kTsv };

// Picks kTsv for ".tsv"/".tab", kJsonl otherwise.
RawFormat raw_format_for(const std::filesystem::path& path);

// Streams documents in file order. Malformed records are counted and
// skipped; an unreadable file throws IoError.
LoadStats read_raw_corpus(const std::filesystem::path& path, RawFormat format,
                          const LoadOptions& options,
                          const std::function<void(Document&&)>& sink);

std::vector<Document> load_raw_corpus(const std::filesystem::path& path,
                                      RawFormat format,
                                      const LoadOptions& options = {},
                                      LoadStats* stats = nullptr);

// Lemma view: JSONL {doc_id, year, sentences: [[lemma, ...], ...]}. Lemmas
// are lowercased; punctuation, numbers and (unless keep_stopwords) stop
// words are removed. One LemmaSentence per input sentence, empty ones kept
// out.
LoadStats read_lemma_corpus(const std::filesystem::path& path,
                            const LoadOptions& options,
                            const std::function<void(LemmaSentence&&)>& sink);

std::vector<LemmaSentence> load_lemma_corpus(const std::filesystem::path& path,
                                             const LoadOptions& options = {},
                                             LoadStats* stats = nullptr);

// CoNLL-U with "# doc_id = ..." and "# year = ..." comments opening each
// document. Multiword ranges and empty nodes are ignored. A document without
// a parsable year is skipped; a sentence with a token line that does not
// have 10 columns (or has an out-of-range head / empty deprel) is skipped.
LoadStats read_conllu(const std::filesystem::path& path,
                      const LoadOptions& options,
                      const std::function<void(ParsedDocument&&)>& sink);

std::vector<ParsedDocument> load_conllu(const std::filesystem::path& path,
                                        const LoadOptions& options = {},
                                        LoadStats* stats = nullptr);

}  // namespace semdrift
