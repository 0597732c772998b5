#ifndef NORMLEX_EVAL_H_
#define NORMLEX_EVAL_H_

#include <array>
#include <filesystem>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "normlex/pipeline.h"

namespace normlex {

struct GoldMention {
  Mention mention;
  std::string type;
  std::set<ConceptId> gold_cuis;
};

struct GoldDocument {
  std::string doc_id;
  std::string text;
  std::string subcorpus;
  std::string language;
  std::vector<GoldMention> mentions;
  // Text-bound annotations that carried no normalization line.
  std::size_t unnormalized = 0;
};

// Parses standoff annotations against their text. Reads
//   T<id>\t<type> <start> <end>[;<start> <end>]*\t<surface>
//   N<id>\tReference T<id> <db>:<cui>[\t<text>]
// and ignores every other line. Offsets are UTF-8 byte offsets. Throws
// ParseError on malformed lines and OffsetMismatch when the spans do not
// reproduce the surface text.
GoldDocument read_gold_standoff(const std::filesystem::path &ann_path,
                                const std::filesystem::path &txt_path);
GoldDocument parse_gold_standoff(std::string_view ann, std::string text, std::string doc_id,
                                 const std::string &ann_name = "<ann>");

struct Metrics {
  std::size_t tp = 0, fp = 0, fn = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0;

  static Metrics from_counts(std::size_t tp, std::size_t fp, std::size_t fn);
};

// Micro-averaged (mention, cui) pair scoring. Throws UnknownMention for a
// prediction that names no gold mention.
Metrics score(const std::vector<GoldDocument> &gold, const std::vector<Prediction> &preds);

struct CorpusEntry {
  std::string name;
  std::string subcorpus;
  std::string language;
};

// Reads `<dir>/manifest.tsv` (`name<TAB>subcorpus<TAB>lang`) and every
// `<name>.ann` / `<name>.txt` pair it lists.
std::vector<GoldDocument> load_corpus(const std::filesystem::path &dir);

struct EvalConfig {
  FuzzyConfig fuzzy;
  DisambiguationConfig disambiguation;
  // Documents are independent and may be processed by several threads. The
  // report does not depend on the worker count.
  std::size_t workers = 1;
};

struct ReportRow {
  SearchLevel method = SearchLevel::kML;
  std::string subcorpus;
  Metrics metrics;
  std::array<std::size_t, 3> resolved{};  // mentions resolved at ML, CL, BTM
};

struct EvaluationReport {
  std::vector<ReportRow> rows;  // method-major, subcorpora in manifest order
};

// Runs the pipeline at depths ML, CL and BTM over `docs` and scores every
// (depth, subcorpus) pair.
EvaluationReport evaluate_documents(const std::vector<GoldDocument> &docs,
                                    const Lexicon &lexicon, const RelationGraph &relations,
                                    const Translator *translator, const EvalConfig &cfg);

EvaluationReport run_evaluation(const std::filesystem::path &corpus_dir, const Lexicon &lexicon,
                                const RelationGraph &relations, const Translator *translator,
                                const EvalConfig &cfg);

// `method<TAB>subcorpus<TAB>P<TAB>R<TAB>F1<TAB>resolved_ML<TAB>resolved_CL<TAB>resolved_BTM`
void write_report_tsv(const EvaluationReport &report, std::ostream &out);
// Human-readable table, one block of P/R/F1 columns per subcorpus.
void print_report_table(const EvaluationReport &report, std::ostream &out);

}  // namespace normlex

#endif  // NORMLEX_EVAL_H_
