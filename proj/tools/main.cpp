#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "semdrift/collocates.hpp"
#include "semdrift/common.hpp"
#include "semdrift/indices.hpp"
#include "semdrift/lexicon.hpp"
#include "semdrift/report.hpp"
#include "semdrift/stats.hpp"
#include "semdrift/synthetic.hpp"

namespace sd = semdrift;

namespace {

struct AnalyzeArgs {
  std::string config;
  std::vector<std::string> targets;
  std::vector<std::string> indices;
  std::optional<std::uint64_t> seed;
  std::string provider;
  std::string out;
  std::optional<unsigned> threads;
  bool overlay = false;
};

int run_analyze(const AnalyzeArgs& a) {
  auto cfg = sd::load_config(a.config);
  if (!a.targets.empty()) {
    cfg.targets = a.targets;
    cfg.control_targets.clear();
  }
  if (!a.indices.empty()) cfg.indices = a.indices;
  if (a.seed) cfg.seed = *a.seed;
  if (!a.provider.empty()) cfg.provider = sd::parse_provider(a.provider);
  if (!a.out.empty()) cfg.out_dir = a.out;
  if (a.threads) cfg.threads = *a.threads;
  if (a.overlay) cfg.overlay = true;

  const auto bundle = sd::run_pipeline(cfg);
  std::size_t ok = 0, skipped = 0, failed = 0;
  for (const auto& c : bundle.cells) {
    switch (c.status) {
      case sd::CellStatus::kOk: ++ok; break;
      case sd::CellStatus::kSkipped: ++skipped; break;
      case sd::CellStatus::kError:
        ++failed;
        std::cerr << "cell " << c.corpus << '/' << c.target << '/' << c.index
                  << " failed: " << c.message << '\n';
        break;
    }
  }
  std::cout << bundle.cells.size() << " cells: " << ok << " ok, " << skipped
            << " skipped, " << failed << " error\n"
            << "output: " << cfg.out_dir.string() << '\n'
            << "manifest hash: " << bundle.manifest_hash << '\n';
  return bundle.exit_code;
}

struct TopArgs {
  std::string config;
  std::string what = "modifiers";
  int decade = 0;
  int k = 10;
  std::vector<std::string> targets;
  std::string corpus;
};

int run_top(const TopArgs& a) {
  auto cfg = sd::load_config(a.config);
  if (!a.targets.empty()) cfg.targets = a.targets;
  cfg.validate();
  if (a.what != "modifiers" && a.what != "collocates") {
    throw sd::ConfigError("--what must be modifiers or collocates");
  }

  const sd::WordSet* stopwords = &sd::default_stopwords();
  sd::WordSet custom;
  if (!cfg.stopwords.empty()) {
    for (auto& w : sd::load_word_list(cfg.stopwords)) custom.insert(std::move(w));
    stopwords = &custom;
  }
  sd::LoadOptions opts;
  opts.study_window = cfg.study_window;
  opts.stopwords = stopwords;
  opts.keep_stopwords = cfg.window_space == sd::WindowSpace::kSurface;
  opts.warn = [](const std::string&) {};

  std::vector<std::string> fused;
  for (const auto& t : cfg.all_targets()) fused.push_back(sd::fused_token(t));

  const auto norms = a.what == "collocates" ? sd::load_norms(cfg.norms) : sd::AffectNorms{};
  for (const auto& corpus : cfg.corpora) {
    if (!a.corpus.empty() && corpus.name != a.corpus) continue;
    std::map<std::string, std::map<int, std::vector<sd::RankedTerm>>> tables;
    if (a.what == "modifiers") {
      const auto parsed = sd::load_conllu(corpus.conllu, opts);
      for (const auto& t : fused) {
        tables[t] = sd::top_k(sd::annual_modifier_counts(parsed, t, cfg.amod_relation), a.k,
                              cfg.top_period);
      }
    } else {
      sd::CollocateCounter counter(fused, cfg.window, cfg.window_space, stopwords);
      sd::read_lemma_corpus(corpus.lemma, opts,
                            [&](sd::LemmaSentence&& s) { counter.add(s); });
      for (const auto& t : fused) {
        sd::PeriodCounts matched;
        for (const auto& [year, terms] : counter.counts(t).per_year) {
          for (const auto& [lemma, n] : terms) {
            if (norms.find(lemma)) matched[year][lemma] += n;
          }
        }
        tables[t] = sd::top_k(matched, a.k, cfg.top_period);
      }
    }
    if (a.decade != 0) {
      const int start = sd::period_start(a.decade, cfg.top_period);
      std::cout << "corpus,target,rank,term,relative,count\n";
      for (const auto& [t, table] : tables) {
        auto it = table.find(start);
        if (it == table.end()) continue;
        for (std::size_t r = 0; r < it->second.size(); ++r) {
          const auto& e = it->second[r];
          std::cout << corpus.name << ',' << t << ',' << (r + 1) << ',' << e.term << ','
                    << e.relative << ',' << e.count << '\n';
        }
      }
    } else {
      std::cout << "# " << corpus.name << '\n';
      sd::write_top_table(std::cout, tables, a.k);
    }
  }
  return sd::kExitOk;
}

int run_fit(const std::string& series_path, const std::string& model,
            std::uint64_t seed, int permutations) {
  std::ifstream in(series_path);
  if (!in) throw sd::IoError("cannot open " + series_path);
  const auto all = sd::read_series_csv(in);
  sd::stats::TrendOptions opts;
  opts.seed = seed;
  opts.dw_permutations = permutations;
  const auto m = sd::stats::parse_model(model);
  std::vector<sd::stats::RegressionRow> rows;
  for (const auto& s : all) {
    rows.push_back({s.index_name, s.target, "", sd::stats::fit_trend(s, m, opts)});
  }
  sd::stats::write_regression_csv(std::cout, rows);
  return sd::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semdrift: track semantic change of target terms across a dated corpus"};
  app.require_subcommand(1);

  AnalyzeArgs analyze;
  auto* a = app.add_subcommand("analyze", "run every corpus x target x index cell");
  a->add_option("--config", analyze.config, "config file")->required();
  a->add_option("--target", analyze.targets, "target phrase (repeatable)");
  a->add_option("--index", analyze.indices, "index name (repeatable)");
  a->add_option("--seed", analyze.seed, "master seed");
  a->add_option("--provider", analyze.provider, "embedding provider")
      ->check(CLI::IsMember({"file", "http", "stub"}));
  a->add_option("--out", analyze.out, "output directory");
  a->add_option("--threads", analyze.threads, "worker threads (0 = all cores)");
  a->add_flag("--overlay", analyze.overlay, "also plot all corpora on shared axes");

  TopArgs top;
  auto* t = app.add_subcommand("top", "top-k modifier or collocate table");
  t->add_option("--config", top.config, "config file")->required();
  t->add_option("--what", top.what, "modifiers or collocates")
      ->check(CLI::IsMember({"modifiers", "collocates"}));
  t->add_option("--decade", top.decade, "print one decade as a long table");
  t->add_option("--k", top.k, "rows per period")->check(CLI::PositiveNumber);
  t->add_option("--target", top.targets, "target phrase (repeatable)");
  t->add_option("--corpus", top.corpus, "restrict to one corpus");

  std::string series_path, model = "linear";
  std::uint64_t fit_seed = 0;
  int permutations = 10000;
  auto* f = app.add_subcommand("fit", "fit trends to a series CSV");
  f->add_option("--series", series_path, "series CSV")->required();
  f->add_option("--model", model, "linear or quadratic")
      ->check(CLI::IsMember({"linear", "quadratic"}));
  f->add_option("--seed", fit_seed, "Durbin-Watson permutation seed");
  f->add_option("--dw-permutations", permutations, "permutation count")
      ->check(CLI::PositiveNumber);

  sd::synthetic::Spec spec;
  std::string synth_out;
  auto* s = app.add_subcommand("synth", "write a synthetic corpus");
  s->add_option("--out", synth_out, "directory")->required();
  s->add_option("--docs", spec.documents, "documents")->check(CLI::PositiveNumber);
  s->add_option("--seed", spec.seed, "seed");
  s->add_option("--valence", spec.valence_start, "collocate valence at the first year");
  s->add_option("--valence-end", spec.valence_end, "collocate valence at the last year");
  s->add_option("--intensifier", spec.intensifier_start, "intensifier rate at the first year");
  s->add_option("--intensifier-end", spec.intensifier_end, "intensifier rate at the last year");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? sd::kExitOk : sd::kExitConfig;
  }

  try {
    if (*a) return run_analyze(analyze);
    if (*t) return run_top(top);
    if (*f) return run_fit(series_path, model, fit_seed, permutations);
    if (*s) {
      sd::synthetic::write(sd::synthetic::generate(spec), synth_out);
      std::cout << "wrote " << spec.documents << " documents to " << synth_out << '\n';
      return sd::kExitOk;
    }
  } catch (const sd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return sd::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << '\n';
    return sd::kExitFatal;
  }
  return sd::kExitOk;
}
