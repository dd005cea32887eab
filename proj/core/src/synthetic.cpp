#include "semdrift/synthetic.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "semdrift/common.hpp"
#include "semdrift/random.hpp"

namespace semdrift::synthetic {

namespace {

struct Rated {
  const char* word;
  double valence;
  double arousal;
};

// Synthetic ratings; not taken from any published norm set.
constexpr Rated kPositive[] = {
    {"hope", 7.9, 5.1},     {"support", 7.4, 4.2},  {"care", 7.6, 3.9},
    {"recovery", 7.8, 4.6}, {"wellness", 8.0, 3.4}, {"friend", 8.2, 4.8},
    {"joy", 8.4, 6.2},      {"peace", 8.1, 2.6},    {"success", 8.3, 6.0},
    {"comfort", 7.7, 2.9},  {"growth", 7.2, 4.4},   {"community", 7.0, 3.8},
};
constexpr Rated kNegative[] = {
    {"fear", 2.1, 6.8},    {"stigma", 2.6, 5.2},   {"crisis", 2.2, 6.9},
    {"shame", 2.0, 5.5},   {"pain", 1.9, 6.3},     {"loss", 2.3, 5.0},
    {"despair", 1.7, 5.6}, {"danger", 2.7, 7.1},   {"abuse", 1.6, 6.4},
    {"poverty", 2.4, 4.5}, {"violence", 1.8, 7.3}, {"failure", 2.5, 5.4},
};
constexpr const char* kUnrated[] = {"zorble", "quindle", "marplot", "vexel",
                                    "tribune", "ledger",  "parish",  "quota"};
constexpr const char* kTheme[] = {"illness", "treatment", "clinic",  "diagnosis",
                                  "symptom", "disorder",  "medical", "cure"};
constexpr const char* kIntensifiers[] = {"severe", "serious", "major",
                                         "extreme", "intense"};
constexpr const char* kPlainModifiers[] = {"poor", "public", "general",
                                           "maternal", "positive"};
constexpr const char* kLinkers[] = {"of", "and", "with", "for"};
constexpr const char* kFiller[] = {"weather", "city", "river", "market",
                                   "season",  "harvest", "road", "bridge"};
constexpr const char* kGenres[] = {"fiction", "magazine", "news", "nonfiction",
                                   "spoken", "tv"};

template <typename T, std::size_t N>
const T& pick(const T (&arr)[N], Rng& rng) {
  return arr[uniform_below(rng, N)];
}

struct Tok {
  std::string form;
  std::string lemma;
  std::string upos;
  int head = 0;
  std::string deprel;
};

}  // namespace

Corpus generate(const Spec& spec) {
  if (spec.years.empty() || spec.documents < 1 || spec.targets.empty()) {
    throw std::invalid_argument("synthetic spec needs years, documents, targets");
  }
  Corpus c;
  for (const auto& r : kPositive) c.norms.insert(r.word, {r.valence, r.arousal});
  for (const auto& r : kNegative) c.norms.insert(r.word, {r.valence, r.arousal});

  double pos_mean = 0, neg_mean = 0;
  for (const auto& r : kPositive) pos_mean += r.valence;
  for (const auto& r : kNegative) neg_mean += r.valence;
  pos_mean /= std::size(kPositive);
  neg_mean /= std::size(kNegative);

  Rng rng(mix64(spec.seed));
  const int span = spec.years.span();
  for (int d = 0; d < spec.documents; ++d) {
    const int year = spec.years.first + d % span;
    const double frac = span > 1 ? static_cast<double>(year - spec.years.first) /
                                       (span - 1)
                                 : 0.0;
    const double valence =
        spec.valence_start + (spec.valence_end - spec.valence_start) * frac;
    const double p_pos = std::clamp((valence - neg_mean) / (pos_mean - neg_mean), 0.0, 1.0);
    const double p_int = spec.intensifier_start +
                         (spec.intensifier_end - spec.intensifier_start) * frac;

    Document raw;
    raw.doc_id = "syn" + std::to_string(d + 1);
    raw.year = year;
    raw.genre = parse_genre(kGenres[d % std::size(kGenres)]);
    LemmaRecord lem{raw.doc_id, year, {}};
    ParsedDocument parsed{raw.doc_id, year, {}};

    const int n_sent = spec.target_sentences + spec.filler_sentences;
    // Target sentences at random positions among the fillers.
    std::vector<int> kinds(static_cast<std::size_t>(n_sent), 0);
    std::fill(kinds.begin(), kinds.begin() + spec.target_sentences, 1);
    partial_shuffle(kinds, kinds.size(), rng);

    for (int s = 0; s < n_sent; ++s) {
      std::vector<Tok> toks;
      std::vector<std::string> surface;  // raw-text words for this sentence
      toks.push_back({"The", "the", "DET", 0, "det"});
      surface.push_back("The");

      if (kinds[static_cast<std::size_t>(s)] == 1) {
        const auto& phrase = spec.targets[uniform_below(rng, spec.targets.size())];
        const std::string fused = fused_token(phrase);
        std::vector<std::string> mods;
        if (uniform01(rng) < p_int) mods.push_back(pick(kIntensifiers, rng));
        if (uniform01(rng) < 0.35) mods.push_back(pick(kPlainModifiers, rng));
        for (const auto& m : mods) {
          toks.push_back({m, m, "ADJ", 0, "amod"});
          surface.push_back(m);
        }
        const int target_id = static_cast<int>(toks.size()) + 1;
        toks.push_back({fused, fused, "NOUN", 0, "root"});
        for (auto w : split_ws(phrase)) surface.emplace_back(w);

        for (int k = 0; k < spec.collocates; ++k) {
          if (uniform01(rng) < 0.5) {
            const std::string l = pick(kLinkers, rng);
            toks.push_back({l, l, "ADP", target_id, "case"});
            surface.push_back(l);
          }
          std::string word;
          const double u = uniform01(rng);
          if (u < spec.theme_rate) {
            word = pick(kTheme, rng);
          } else if (u < spec.theme_rate + spec.unmatched_rate) {
            word = pick(kUnrated, rng);
          } else {
            word = uniform01(rng) < p_pos ? pick(kPositive, rng).word
                                          : pick(kNegative, rng).word;
          }
          // Occasionally an intensifier on a non-target noun.
          if (uniform01(rng) < 0.05) {
            const std::string adj = pick(kIntensifiers, rng);
            const int noun_id = static_cast<int>(toks.size()) + 2;
            toks.push_back({adj, adj, "ADJ", noun_id, "amod"});
            surface.push_back(adj);
          }
          toks.push_back({word, word, "NOUN", target_id, "nmod"});
          surface.push_back(word);
        }
        for (auto& t : toks) {
          if (t.head == 0 && t.deprel != "root") t.head = target_id;
        }
      } else {
        const int root = 2;
        for (int k = 0; k < 4; ++k) {
          const std::string w = pick(kFiller, rng);
          toks.push_back({w, w, "NOUN", k == 0 ? 0 : root, k == 0 ? "root" : "dep"});
          surface.push_back(w);
        }
        toks[0].head = root;
      }
      toks.push_back({".", ".", "PUNCT", 0, "punct"});
      for (auto& t : toks) {
        if (t.deprel == "punct") {
          for (std::size_t i = 0; i < toks.size(); ++i) {
            if (toks[i].deprel == "root") t.head = static_cast<int>(i) + 1;
          }
        }
      }

      std::string sentence_text;
      for (std::size_t i = 0; i < surface.size(); ++i) {
        if (i) sentence_text.push_back(' ');
        sentence_text += surface[i];
      }
      sentence_text.push_back('.');
      if (!raw.text.empty()) {
        raw.text.push_back(' ');
        if (spec.debris && uniform01(rng) < 0.15) raw.text += "@ @ @ ";
        if (spec.debris && uniform01(rng) < 0.10) raw.text += "<p> ";
      }
      raw.text += sentence_text;

      std::vector<std::string> lemmas;
      ParsedSentence ps;
      for (const auto& t : toks) {
        lemmas.push_back(t.lemma);
        ps.push_back({t.form, t.lemma, t.upos, t.head, t.deprel});
      }
      lem.sentences.push_back(std::move(lemmas));
      parsed.sentences.push_back(std::move(ps));
    }
    c.raw.push_back(std::move(raw));
    c.lemmas.push_back(std::move(lem));
    c.parsed.push_back(std::move(parsed));
  }
  return c;
}

void write_raw_jsonl(const std::filesystem::path& path,
                     const std::vector<Document>& docs) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& d : docs) {
    nlohmann::ordered_json j;
    j["doc_id"] = d.doc_id;
    j["year"] = d.year;
    j["genre"] = std::string(genre_name(d.genre));
    j["text"] = d.text;
    out << j.dump() << '\n';
  }
}

void write_lemma_jsonl(const std::filesystem::path& path,
                       const std::vector<LemmaRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["doc_id"] = r.doc_id;
    j["year"] = r.year;
    j["sentences"] = r.sentences;
    out << j.dump() << '\n';
  }
}

void write_conllu(const std::filesystem::path& path,
                  const std::vector<ParsedDocument>& docs) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& d : docs) {
    out << "# doc_id = " << d.doc_id << '\n' << "# year = " << d.year << '\n';
    for (const auto& s : d.sentences) {
      for (std::size_t i = 0; i < s.size(); ++i) {
        const auto& t = s[i];
        out << (i + 1) << '\t' << t.form << '\t' << t.lemma << '\t' << t.upos
            << "\t_\t_\t" << t.head << '\t' << t.deprel << "\t_\t_\n";
      }
      out << '\n';
    }
  }
}

void write(const Corpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_raw_jsonl(dir / "raw.jsonl", corpus.raw);
  write_lemma_jsonl(dir / "lemmas.jsonl", corpus.lemmas);
  write_conllu(dir / "parsed.conllu", corpus.parsed);
  std::ofstream norms(dir / "norms.csv", std::ios::binary | std::ios::trunc);
  if (!norms) throw IoError("cannot write norms.csv in " + dir.string());
  write_norms(norms, corpus.norms);
}

}  // namespace semdrift::synthetic
