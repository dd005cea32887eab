#include <algorithm>
#include <fstream>
#include <future>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <thread>
#include <utility>

#include <json.hpp>

#include "semdrift/common.hpp"
#include "semdrift/csv.hpp"
#include "semdrift/lexicon.hpp"
#include "semdrift/plot.hpp"
#include "semdrift/report.hpp"

namespace semdrift {

namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";

struct Lexicons {
  AffectNorms norms;
  WordSet stopwords;
  IntensifierSet intensifiers;
  std::map<std::string, ThemeDictionary> themes;
};

struct CorpusData {
  const CorpusPaths* paths = nullptr;
  std::vector<Document> raw;  // cleaned + fused
  std::vector<ParsedDocument> parsed;
  std::unique_ptr<CollocateCounter> collocates;
  LoadStats raw_stats, lemma_stats, conllu_stats;
  std::string raw_error, lemma_error, conllu_error;
};

ojson stats_json(const LoadStats& s) {
  return {{"records", s.records},         {"loaded", s.loaded},
          {"skipped", s.skipped},         {"out_of_window", s.out_of_window},
          {"empty", s.empty},             {"sentences_skipped", s.sentences_skipped}};
}

std::string file_fingerprint(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return "unreadable";
  std::uint64_t h = kFnvOffset;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    h = fnv1a64(std::string_view(buf, static_cast<std::size_t>(in.gcount())), h);
  }
  return to_hex64(h);
}

std::size_t count_rows(const std::string& csv_text) {
  const auto lines = static_cast<std::size_t>(
      std::count(csv_text.begin(), csv_text.end(), '\n'));
  return lines > 0 ? lines - 1 : 0;
}

void write_text(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + p.string());
  out << text;
  if (!out) throw IoError("write failed: " + p.string());
}

std::string safe_name(std::string_view s) {
  std::string out;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_';
    out.push_back(ok ? c : '_');
  }
  return out;
}

Lexicons load_lexicons(const AnalysisConfig& cfg) {
  Lexicons lx;
  try {
    lx.norms = load_norms(cfg.norms);
    if (cfg.stopwords.empty()) {
      lx.stopwords = default_stopwords();
    } else {
      for (auto& w : load_word_list(cfg.stopwords)) lx.stopwords.insert(std::move(w));
    }
    lx.intensifiers = cfg.intensifiers.empty() ? IntensifierSet::standard()
                                               : load_intensifiers(cfg.intensifiers);
    for (const auto& [name, path] : cfg.themes) {
      lx.themes[name] = path.empty() ? ThemeDictionary::pathologization()
                                     : load_theme_dictionary(path, name);
    }
    if (!lx.themes.contains("pathologization")) {
      lx.themes["pathologization"] = ThemeDictionary::pathologization();
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("lexicon: ") + e.what());
  }
  return lx;
}

bool masked(const MaskEntry& m, const std::string& corpus, const std::string& index) {
  return (m.corpus == "*" || m.corpus == corpus) && (m.index == "*" || m.index == index);
}

struct CellTask {
  std::size_t corpus;
  std::string target;
  IndexId index;
};

class Pipeline {
 public:
  explicit Pipeline(const AnalysisConfig& cfg) : cfg_(cfg) {}

  ReportBundle run();

 private:
  bool needs(IndexKind k) const {
    return std::any_of(indices_.begin(), indices_.end(),
                       [&](const IndexId& i) { return i.kind == k; });
  }
  void load_corpus(CorpusData& data);
  void setup_provider();
  CellResult run_cell(const CellTask& task);
  IndexSeries compute_series(const CorpusData& data, const std::string& target,
                             const IndexId& index);

  const AnalysisConfig& cfg_;
  std::vector<IndexId> indices_;
  std::vector<TargetPhrase> phrases_;
  Lexicons lex_;
  std::vector<CorpusData> corpora_;

  std::unique_ptr<EmbeddingProvider> provider_;
  std::unique_ptr<EmbeddingCache> cache_;
  std::unique_ptr<Embedder> embedder_;
  std::string provider_error_;
};

void Pipeline::load_corpus(CorpusData& d) {
  const auto& p = *d.paths;
  LoadOptions opts;
  opts.study_window = cfg_.study_window;
  opts.stopwords = &lex_.stopwords;
  opts.keep_stopwords = cfg_.window_space == WindowSpace::kSurface;
  const auto rules = CleaningRuleSet::standard();
  opts.cleaning = &rules;

  if (needs(IndexKind::kSalience) || needs(IndexKind::kBreadth)) {
    try {
      d.raw_stats = read_raw_corpus(p.raw, raw_format_for(p.raw), opts,
                                    [&](Document&& doc) {
                                      doc.text = fuse_targets(doc.text, phrases_);
                                      d.raw.push_back(std::move(doc));
                                    });
    } catch (const Error& e) {
      d.raw_error = e.what();
    }
  }

  std::vector<std::string> fused;
  for (const auto& t : phrases_) fused.push_back(t.fused());
  d.collocates = std::make_unique<CollocateCounter>(fused, cfg_.window, cfg_.window_space,
                                                    &lex_.stopwords);
  try {
    d.lemma_stats = read_lemma_corpus(p.lemma, opts, [&](LemmaSentence&& s) {
      d.collocates->add(s);
    });
  } catch (const Error& e) {
    d.lemma_error = e.what();
  }

  try {
    d.conllu_stats = read_conllu(p.conllu, opts, [&](ParsedDocument&& doc) {
      d.parsed.push_back(std::move(doc));
    });
  } catch (const Error& e) {
    d.conllu_error = e.what();
  }
}

void Pipeline::setup_provider() {
  if (!needs(IndexKind::kBreadth)) return;
  try {
    switch (cfg_.provider) {
      case ProviderKind::kStub:
        provider_ = std::make_unique<StubProvider>(cfg_.stub_dim, cfg_.seed);
        break;
      case ProviderKind::kFile:
        provider_ = std::make_unique<FileProvider>(cfg_.embeddings);
        break;
      case ProviderKind::kHttp:
        provider_ = std::make_unique<HttpProvider>(cfg_.endpoint);
        break;
    }
    cache_ = std::make_unique<EmbeddingCache>(cfg_.cache_dir);
    cache_->load(provider_->id());
    embedder_ = std::make_unique<Embedder>(
        *provider_, *cache_, EmbedOptions{cfg_.embed_retries, cfg_.embed_in_flight});
  } catch (const Error& e) {
    provider_error_ = e.what();
    provider_.reset();
  }
}

IndexSeries Pipeline::compute_series(const CorpusData& d, const std::string& target,
                                     const IndexId& index) {
  auto need = [](const std::string& err, const char* view) {
    if (!err.empty()) throw Error(std::string(view) + " view unavailable: " + err);
  };
  switch (index.kind) {
    case IndexKind::kValence:
    case IndexKind::kArousal:
      need(d.lemma_error, "lemma");
      return weighted_norm_index(d.collocates->counts(target), lex_.norms,
                                 index.kind == IndexKind::kValence
                                     ? AffectDimension::kValence
                                     : AffectDimension::kArousal,
                                 cfg_.min_matched);
    case IndexKind::kTheme:
      need(d.lemma_error, "lemma");
      return theme_index(d.collocates->counts(target), lex_.themes.at(index.theme));
    case IndexKind::kIntensifier:
      need(d.conllu_error, "parsed");
      return intensifier_index(d.parsed, target, lex_.intensifiers, cfg_.amod_relation);
    case IndexKind::kSalience:
      need(d.raw_error, "raw");
      return salience(d.raw, target);
    case IndexKind::kBreadth: {
      need(d.raw_error, "raw");
      if (!embedder_) throw Error("embedding provider unavailable: " + provider_error_);
      BreadthParams bp;
      bp.window = cfg_.breadth_window;
      bp.interval_len = cfg_.breadth_interval;
      bp.sample_size = cfg_.breadth_samples;
      bp.repeats = cfg_.breadth_repeats;
      bp.seed = cfg_.seed;
      return breadth_series(d.raw, target, *embedder_, bp);
    }
  }
  throw Error("unhandled index");
}

CellResult Pipeline::run_cell(const CellTask& task) {
  const auto& d = corpora_[task.corpus];
  CellResult r;
  r.corpus = d.paths->name;
  r.target = task.target;
  r.index = task.index.name();
  try {
    auto series = compute_series(d, task.target, task.index);
    std::vector<YearRange> mask;
    for (const auto& m : cfg_.year_mask) {
      if (masked(m, r.corpus, r.index)) mask.push_back(m.range);
    }
    r.series = apply_year_mask(std::move(series), mask);

    stats::TrendOptions to;
    to.seed = derive_seed(cfg_.seed,
                          static_cast<std::int64_t>(fnv1a64(r.corpus + '\x1f' + r.target +
                                                            '\x1f' + r.index)),
                          0);
    to.dw_permutations = cfg_.dw_permutations;
    to.gls_threshold = cfg_.gls_threshold;

    std::vector<stats::TrendModel> models{stats::TrendModel::kLinear};
    if (std::find(cfg_.quadratic_indices.begin(), cfg_.quadratic_indices.end(), r.index) !=
        cfg_.quadratic_indices.end()) {
      models.push_back(stats::TrendModel::kQuadratic);
    }
    std::vector<std::string> notes;
    for (auto m : models) {
      const std::size_t need = m == stats::TrendModel::kLinear ? 3 : 4;
      if (r.series.points.size() < need) {
        notes.push_back(std::string(stats::model_name(m)) + " fit skipped: " +
                        std::to_string(r.series.points.size()) + " points");
        continue;
      }
      r.fits.push_back(stats::fit_trend(r.series, m, to));
    }
    if (r.fits.empty()) r.status = CellStatus::kSkipped;
    for (const auto& p : r.series.points) {
      if (p.flagged) {
        notes.push_back("value above nominal scale at " + std::to_string(p.time_unit));
      }
    }
    for (std::size_t i = 0; i < notes.size(); ++i) {
      r.message += (i ? "; " : "") + notes[i];
    }
  } catch (const std::exception& e) {
    r.status = CellStatus::kError;
    r.message = e.what();
    r.fits.clear();
  }
  return r;
}

ReportBundle Pipeline::run() {
  cfg_.validate();
  for (const auto& i : cfg_.indices) indices_.push_back(IndexId::parse(i));
  for (const auto& t : cfg_.all_targets()) phrases_.emplace_back(t);
  lex_ = load_lexicons(cfg_);
  for (const auto& i : indices_) {
    if (i.kind == IndexKind::kTheme && !lex_.themes.contains(i.theme)) {
      throw ConfigError("no dictionary for theme " + i.theme);
    }
  }
  setup_provider();

  corpora_.resize(cfg_.corpora.size());
  for (std::size_t c = 0; c < cfg_.corpora.size(); ++c) {
    corpora_[c].paths = &cfg_.corpora[c];
    load_corpus(corpora_[c]);
  }

  std::vector<CellTask> tasks;
  for (std::size_t c = 0; c < corpora_.size(); ++c) {
    for (const auto& t : phrases_) {
      for (const auto& i : indices_) tasks.push_back({c, t.fused(), i});
    }
  }

  ReportBundle bundle;
  bundle.cells.resize(tasks.size());
  unsigned threads = cfg_.threads ? cfg_.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, threads);
  if (threads == 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) bundle.cells[i] = run_cell(tasks[i]);
  } else {
    for (std::size_t w = 0; w < tasks.size(); w += threads) {
      std::vector<std::future<CellResult>> wave;
      const std::size_t end = std::min(tasks.size(), w + threads);
      for (std::size_t i = w; i < end; ++i) {
        wave.push_back(std::async(std::launch::async,
                                  [this, &tasks, i] { return run_cell(tasks[i]); }));
      }
      for (std::size_t i = w; i < end; ++i) bundle.cells[i] = wave[i - w].get();
    }
  }
  if (cache_) cache_->flush();

  // Outputs and manifest.
  const fs::path out = cfg_.out_dir;
  ojson files = ojson::object();
  auto emit = [&](const std::string& rel, const std::string& text) {
    write_text(out / rel, text);
    files[rel] = {{"rows", count_rows(text)},
                  {"fnv1a64", to_hex64(fnv1a64(text))}};
  };

  ojson load = ojson::object();
  ojson coverage_json = ojson::object();
  ojson plots = ojson::array();
  std::vector<stats::RegressionRow> reg_rows;

  for (std::size_t c = 0; c < corpora_.size(); ++c) {
    const auto& d = corpora_[c];
    const std::string& name = d.paths->name;

    std::vector<IndexSeries> series;
    for (const auto& cell : bundle.cells) {
      if (cell.corpus != name) continue;
      if (cell.status != CellStatus::kError) series.push_back(cell.series);
      for (const auto& f : cell.fits) reg_rows.push_back({cell.index, cell.target, name, f});
    }
    std::ostringstream ss;
    write_series_csv(ss, series);
    emit(name + "/series.csv", ss.str());

    std::ostringstream counts;
    counts << "target,year,lemma,count\n";
    for (const auto& acc : d.collocates->all()) {
      for (const auto& [year, terms] : acc.per_year) {
        for (const auto& [lemma, n] : terms) {
          counts << csv::escape(acc.target) << ',' << year << ','
                 << csv::escape(lemma) << ',' << n << '\n';
        }
      }
    }
    emit(name + "/counts.csv", counts.str());

    std::map<std::string, std::map<int, std::vector<RankedTerm>>> top_mod, top_col;
    for (const auto& t : phrases_) {
      const auto fused = t.fused();
      top_mod[fused] = top_k(annual_modifier_counts(d.parsed, fused, cfg_.amod_relation),
                             cfg_.top_k, cfg_.top_period);
      PeriodCounts matched;
      const auto& acc = d.collocates->counts(fused);
      for (const auto& [year, terms] : acc.per_year) {
        for (const auto& [lemma, n] : terms) {
          if (lex_.norms.find(lemma)) matched[year][lemma] += n;
        }
      }
      top_col[fused] = top_k(matched, cfg_.top_k, cfg_.top_period);
      const auto cov = coverage(lex_.norms, acc);
      coverage_json[name][fused] = cov ? ojson(*cov) : ojson(nullptr);
    }
    std::ostringstream tm, tc;
    write_top_table(tm, top_mod, cfg_.top_k);
    write_top_table(tc, top_col, cfg_.top_k);
    emit(name + "/top_modifiers.csv", tm.str());
    emit(name + "/top_collocates.csv", tc.str());

    for (const auto& cell : bundle.cells) {
      if (cell.corpus != name || cell.series.points.empty()) continue;
      std::optional<stats::TrendFit> fit;
      if (!cell.fits.empty()) fit = cell.fits.back();
      const std::string rel = name + "/plots/" + safe_name(cell.target) + "__" +
                              safe_name(cell.index) + ".svg";
      fs::create_directories((out / rel).parent_path());
      emit_plot(cell.series, fit, out / rel,
                cell.target + " (" + name + ") - " + cell.index);
      plots.push_back(rel);
    }

    load[name] = {{"raw", stats_json(d.raw_stats)},
                  {"lemma", stats_json(d.lemma_stats)},
                  {"conllu", stats_json(d.conllu_stats)}};
    for (auto [key, err] : {std::pair{"raw_error", &d.raw_error},
                            std::pair{"lemma_error", &d.lemma_error},
                            std::pair{"conllu_error", &d.conllu_error}}) {
      if (!err->empty()) load[name][key] = *err;
    }
  }

  if (cfg_.overlay) {
    // One plot per (target, index) with a line per corpus; cells are ordered
    // by corpus first, so collect across the whole bundle.
    std::map<std::pair<std::string, std::string>,
             std::pair<std::vector<IndexSeries>, std::vector<std::string>>>
        groups;
    std::vector<std::pair<std::string, std::string>> order;
    for (const auto& cell : bundle.cells) {
      if (cell.series.points.empty()) continue;
      auto key = std::pair{cell.target, cell.index};
      auto [it, fresh] = groups.try_emplace(key);
      if (fresh) order.push_back(key);
      it->second.first.push_back(cell.series);
      it->second.second.push_back(cell.corpus);
    }
    for (const auto& key : order) {
      const auto& [series, labels] = groups.at(key);
      const std::string rel =
          "plots/" + safe_name(key.first) + "__" + safe_name(key.second) + ".svg";
      fs::create_directories((out / rel).parent_path());
      emit_overlay_plot(series, labels, out / rel, key.first + " - " + key.second);
      plots.push_back(rel);
    }
  }

  std::ostringstream reg;
  stats::write_regression_csv(reg, reg_rows);
  emit("regression.csv", reg.str());

  ojson inputs = ojson::object();
  inputs["norms"] = file_fingerprint(cfg_.norms);
  for (const auto& c : cfg_.corpora) {
    inputs[c.name + "/raw"] = file_fingerprint(c.raw);
    inputs[c.name + "/lemma"] = file_fingerprint(c.lemma);
    inputs[c.name + "/conllu"] = file_fingerprint(c.conllu);
  }
  if (cfg_.provider == ProviderKind::kFile && !cfg_.embeddings.empty()) {
    inputs["embeddings"] = file_fingerprint(cfg_.embeddings);
  }

  ojson cells = ojson::array();
  std::size_t errors = 0;
  for (const auto& cell : bundle.cells) {
    ojson fits = ojson::array();
    for (const auto& f : cell.fits) {
      fits.push_back({{"model", stats::model_name(f.model)},
                      {"estimator", stats::estimator_name(f.estimator)}});
    }
    cells.push_back({{"corpus", cell.corpus},
                     {"target", cell.target},
                     {"index", cell.index},
                     {"status", cell_status_name(cell.status)},
                     {"points", cell.series.points.size()},
                     {"fits", fits},
                     {"message", cell.message}});
    if (cell.status == CellStatus::kError) ++errors;
  }

  ojson m;
  m["tool"] = "semdrift";
  m["version"] = kVersion;
  m["config_hash"] = to_hex64(fnv1a64(cfg_.to_canonical_json()));
  m["seed"] = cfg_.seed;
  m["provider"] = provider_name(cfg_.provider);
  m["provider_id"] = provider_ ? ojson(provider_->id()) : ojson(nullptr);
  if (!provider_error_.empty()) m["provider_error"] = provider_error_;
  m["inputs"] = inputs;
  m["load"] = load;
  m["coverage"] = coverage_json;
  m["cells"] = cells;
  m["files"] = files;
  m["plots"] = plots;
  bundle.manifest_hash = to_hex64(fnv1a64(m.dump()));
  m["manifest_hash"] = bundle.manifest_hash;
  bundle.manifest_json = m.dump(2) + "\n";
  write_text(out / "manifest.json", bundle.manifest_json);

  bundle.exit_code = errors ? kExitPartial : kExitOk;
  return bundle;
}

}  // namespace

std::string_view cell_status_name(CellStatus s) {
  switch (s) {
    case CellStatus::kOk: return "ok";
    case CellStatus::kSkipped: return "skipped";
    case CellStatus::kError: return "error";
  }
  return "error";
}

void write_top_table(std::ostream& out,
                     const std::map<std::string, std::map<int, std::vector<RankedTerm>>>&
                         by_target,
                     int k) {
  std::set<int> periods;
  for (const auto& [t, table] : by_target) {
    for (const auto& [p, ranked] : table) periods.insert(p);
  }
  out << "target,rank";
  for (int p : periods) out << ',' << p;
  out << '\n';
  for (const auto& [t, table] : by_target) {
    for (int r = 0; r < k; ++r) {
      out << csv::escape(t) << ',' << (r + 1);
      for (int p : periods) {
        out << ',';
        auto it = table.find(p);
        if (it != table.end() && static_cast<std::size_t>(r) < it->second.size()) {
          out << csv::escape(it->second[static_cast<std::size_t>(r)].term);
        }
      }
      out << '\n';
    }
  }
}

ReportBundle run_pipeline(const AnalysisConfig& config) {
  return Pipeline(config).run();
}

}  // namespace semdrift
