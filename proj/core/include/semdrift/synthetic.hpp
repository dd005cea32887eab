#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "semdrift/corpus.hpp"
#include "semdrift/lexicon.hpp"

namespace semdrift::synthetic {

// Generator settings for a year-tagged corpus with controllable drift. The
// three views (raw text, lemma JSONL, CoNLL-U) describe the same sentences.
struct Spec {
  YearRange years{1970, 2016};
  std::vector<std::string> targets{"mental health", "mental illness"};
  int documents = 200;
  int target_sentences = 4;  // per document
  int filler_sentences = 2;  // per document, no target
  int collocates = 6;        // content words per target sentence
  std::uint64_t seed = 1;

  // Mean valence of target collocates drifts linearly between these values
  // over the year range (norm-matched words only).
  double valence_start = 5.0;
  double valence_end = 5.0;
  // Probability that a target occurrence carries an intensifying amod.
  double intensifier_start = 0.1;
  double intensifier_end = 0.1;
  // Probability that a collocate is drawn from the theme dictionary.
  double theme_rate = 0.08;
  // Probability that a collocate has no norm entry.
  double unmatched_rate = 0.15;
  // Sprinkle cleaning-rule debris ("@ @ @", "<p>") into raw text.
  bool debris = true;
};

struct LemmaRecord {
  std::string doc_id;
  int year = 0;
  std::vector<std::vector<std::string>> sentences;
};

struct Corpus {
  std::vector<Document> raw;  // unfused, uncleaned
  std::vector<LemmaRecord> lemmas;
  std::vector<ParsedDocument> parsed;
  AffectNorms norms;
};

Corpus generate(const Spec& spec);

// Writes raw.jsonl, lemmas.jsonl, parsed.conllu and norms.csv into dir.
void write(const Corpus& corpus, const std::filesystem::path& dir);

void write_raw_jsonl(const std::filesystem::path& path,
                     const std::vector<Document>& docs);
void write_lemma_jsonl(const std::filesystem::path& path,
                       const std::vector<LemmaRecord>& records);
void write_conllu(const std::filesystem::path& path,
                  const std::vector<ParsedDocument>& docs);

}  // namespace semdrift::synthetic
