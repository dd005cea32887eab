#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "semdrift/breadth.hpp"
#include "semdrift/collocates.hpp"
#include "semdrift/corpus.hpp"
#include "semdrift/indices.hpp"
#include "semdrift/stats.hpp"

namespace semdrift {

struct CorpusPaths {
  std::string name;
  std::filesystem::path raw;
  std::filesystem::path lemma;
  std::filesystem::path conllu;
};

enum class ProviderKind { kFile, kHttp, kStub };

ProviderKind parse_provider(std::string_view name);
std::string_view provider_name(ProviderKind kind);

struct MaskEntry {
  std::string corpus;  // "*" matches every corpus
  std::string index;   // index name, "*" matches every index
  YearRange range;
};

struct AnalysisConfig {
  std::vector<CorpusPaths> corpora;
  std::vector<std::string> targets;          // phrases, e.g. "mental health"
  std::vector<std::string> control_targets;  // analyzed like targets
  std::vector<std::string> indices{"valence",     "arousal",
                                   "breadth",     "intensifier",
                                   "theme:pathologization", "salience"};
  int window = 5;
  WindowSpace window_space = WindowSpace::kLemma;
  YearRange study_window{1970, 2016};
  std::int64_t min_matched = 1;
  std::string amod_relation = "amod";

  int breadth_interval = 5;
  int breadth_samples = 50;
  int breadth_repeats = 10;
  YearRange breadth_window{1970, 2014};

  std::uint64_t seed = 0;
  ProviderKind provider = ProviderKind::kStub;
  std::filesystem::path embeddings;  // file provider
  std::string endpoint;              // http provider
  int stub_dim = 32;
  std::filesystem::path cache_dir;
  int embed_retries = 3;
  std::size_t embed_in_flight = 1;

  std::filesystem::path norms;
  std::filesystem::path stopwords;     // empty = bundled list
  std::filesystem::path intensifiers;  // empty = bundled set
  std::map<std::string, std::filesystem::path> themes;  // empty path = bundled

  std::vector<MaskEntry> year_mask;
  std::vector<std::string> quadratic_indices{"intensifier"};
  int top_k = 10;
  int top_period = 10;
  int dw_permutations = 10000;
  double gls_threshold = 0.05;
  unsigned threads = 0;  // 0 = hardware concurrency
  bool overlay = false;  // also plot every corpus on shared axes

  std::filesystem::path out_dir = "out";

  std::vector<std::string> all_targets() const;
  // Throws ConfigError describing the first problem found.
  void validate() const;
  // Canonical JSON of every field, used for the config hash.
  std::string to_canonical_json() const;
};

// INI-style file:
//   [run]      seed, out, targets, control_targets, indices, window,
//              window_space, study_window, min_matched, amod, quadratic,
//              top_k, top_period, threads, overlay
//   [lexicon]  norms, stopwords, intensifiers, theme:<name>
//   [breadth]  interval, samples, repeats, window, provider, embeddings,
//              endpoint, stub_dim, cache_dir, retries, in_flight
//   [stats]    dw_permutations, gls_threshold
//   [corpus:<name>]  raw, lemma, conllu
//   [mask]     <corpus>:<index> = <first>-<last>[, <first>-<last>...]
// Lists are comma separated; year ranges are "1970-2016". Relative paths
// resolve against the file's directory. Throws ConfigError.
AnalysisConfig load_config(const std::filesystem::path& path);
AnalysisConfig parse_config(const std::string& text,
                            const std::filesystem::path& base_dir);

YearRange parse_year_range(std::string_view text);

enum class CellStatus { kOk, kSkipped, kError };
std::string_view cell_status_name(CellStatus s);

struct CellResult {
  std::string corpus;
  std::string target;  // fused token
  std::string index;
  CellStatus status = CellStatus::kOk;
  std::string message;
  IndexSeries series;
  std::vector<stats::TrendFit> fits;
};

struct ReportBundle {
  std::vector<CellResult> cells;
  std::string manifest_json;
  std::string manifest_hash;
  int exit_code = 0;  // 0 ok, 2 partial cell failures
};

// Exit codes shared by the CLI.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitPartial = 2;
constexpr int kExitFatal = 3;

// Runs every (corpus x target x index) cell and writes, under out_dir:
//   <corpus>/series.csv, <corpus>/counts.csv, <corpus>/top_modifiers.csv,
//   <corpus>/top_collocates.csv, <corpus>/plots/<target>__<index>.svg,
//   regression.csv, manifest.json
// A failing cell is recorded and the others proceed. Throws ConfigError on
// validation failure and IoError when outputs cannot be written.
ReportBundle run_pipeline(const AnalysisConfig& config);

// Wide rank x period table: target,rank,<period>,...
void write_top_table(std::ostream& out,
                     const std::map<std::string, std::map<int, std::vector<RankedTerm>>>&
                         by_target,
                     int k);

}  // namespace semdrift
