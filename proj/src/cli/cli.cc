#include "normlex/cli.h"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "normlex/errors.h"
#include "normlex/eval.h"
#include "normlex/index.h"
#include "normlex/nmt/model_io.h"
#include "normlex/nmt/trainer.h"
#include "normlex/service.h"
#include "normlex/text.h"
#include "normlex/translator.h"

namespace normlex {

namespace {

namespace fs = std::filesystem;

class UsageError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  std::string lexicon;
  std::string relations;
  std::string lang;
  std::string languages;
  std::string translator = "none";
  std::string model;
  std::string dict;
  std::string max_level = "BTM";
  std::string sem_groups;
  bool no_preferred = false;
  bool no_graph = false;
  int max_edit = 1;
  int long_token = 5;
  std::size_t workers = 1;
};

std::vector<std::string> split_list(const std::string &s) {
  std::vector<std::string> out;
  for (std::string_view f : text::split(s, ',')) {
    std::string_view t = text::trim(f);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

void require_file(const std::string &path, const std::string &what) {
  std::error_code ec;
  if (path.empty()) throw UsageError("missing " + what);
  if (!fs::is_regular_file(path, ec)) throw Error(what + " not found: " + path);
}

std::set<std::string> expected_languages(const RunConfig &rc) {
  if (rc.languages.empty()) return default_languages();
  auto list = split_list(rc.languages);
  return {list.begin(), list.end()};
}

SearchLevel max_level_of(const RunConfig &rc) {
  auto level = parse_search_level(rc.max_level);
  if (!level || *level == SearchLevel::kNone) {
    throw UsageError("--max-level must be ML, CL or BTM");
  }
  return *level;
}

FuzzyConfig fuzzy_of(const RunConfig &rc) {
  FuzzyConfig f;
  f.max_edit_per_long_token = rc.max_edit;
  f.long_token_min_len = rc.long_token;
  try {
    f.validate();
  } catch (const Error &e) {
    throw UsageError(e.what());
  }
  return f;
}

DisambiguationConfig disambiguation_of(const RunConfig &rc) {
  DisambiguationConfig d;
  if (!rc.sem_groups.empty()) {
    auto groups = split_list(rc.sem_groups);
    d.allowed_sem_groups = std::set<std::string>(groups.begin(), groups.end());
  }
  d.use_preferred_step = !rc.no_preferred;
  d.use_graph_step = !rc.no_graph;
  return d;
}

// Checks every input path named by the translator choice without loading.
struct TranslatorChoice {
  std::string kind;
  std::string path;
};

TranslatorChoice translator_choice(const RunConfig &rc) {
  TranslatorChoice c;
  const std::size_t colon = rc.translator.find(':');
  c.kind = rc.translator.substr(0, colon);
  if (colon != std::string::npos) c.path = rc.translator.substr(colon + 1);
  if (c.kind == "none") return c;
  if (c.kind == "dictionary") {
    if (c.path.empty()) c.path = rc.dict;
    require_file(c.path, "dictionary (--dict)");
  } else if (c.kind == "neural") {
    if (c.path.empty()) c.path = rc.model;
    require_file(c.path, "model (--model)");
  } else {
    throw UsageError("--translator must be none, dictionary[:path] or neural[:path]");
  }
  return c;
}

std::shared_ptr<const Translator> make_translator(const TranslatorChoice &c) {
  if (c.kind == "dictionary") {
    return std::make_shared<const DictionaryTranslator>(DictionaryTranslator::load(c.path));
  }
  if (c.kind == "neural") {
    auto model = std::make_shared<const nmt::TranslationModel>(nmt::load_model(c.path));
    return std::make_shared<const NeuralTranslator>(std::move(model));
  }
  return nullptr;
}

Lexicon load_lexicon_checked(const RunConfig &rc, std::ostream &err) {
  LexiconLoadResult loaded = load_lexicon(rc.lexicon, expected_languages(rc));
  for (const MalformedRow &row : loaded.malformed) {
    err << "warning: " << rc.lexicon << ":" << row.line_no << ": " << row.reason << '\n';
  }
  return std::move(loaded.lexicon);
}

RelationGraph load_relations_checked(const RunConfig &rc, const Lexicon &lexicon,
                                     std::ostream &err) {
  if (rc.relations.empty()) return {};
  RelationsLoadResult loaded = load_relations(rc.relations, lexicon);
  for (const MalformedRow &row : loaded.malformed) {
    err << "warning: " << rc.relations << ":" << row.line_no << ": " << row.reason << '\n';
  }
  return std::move(loaded.graph);
}

std::optional<fs::path> cache_dir() {
  const char *dir = std::getenv("NORMLEX_CACHE_DIR");
  if (dir == nullptr || *dir == '\0') return std::nullopt;
  return fs::path(dir);
}

// Loads an index from the cache when it was built from this lexicon,
// otherwise builds it and refreshes the cache.
TermIndex cached_index(const Lexicon &lexicon, const std::string &lang) {
  auto dir = cache_dir();
  if (!dir) return build_index(lexicon, lang);
  const fs::path path = *dir / (lang + ".nlx");
  std::error_code ec;
  if (fs::exists(path, ec)) {
    try {
      TermIndex index = load_index(path);
      if (index.lexicon_fingerprint() == lexicon.fingerprint()) return index;
    } catch (const Error &) {
      // Stale or damaged cache entries are rebuilt.
    }
  }
  TermIndex index = build_index(lexicon, lang);
  fs::create_directories(*dir, ec);
  save_index(index, path);
  return index;
}

void validate_lang(const std::string &lang, const std::set<std::string> &langs) {
  if (lang.empty()) throw UsageError("missing --lang");
  if (!langs.count(lang)) throw UsageError("unknown language '" + lang + "'");
}

std::ostream &output_stream(const std::string &path, std::ofstream &file, std::ostream &fallback) {
  if (path.empty() || path == "-") return fallback;
  file.open(path, std::ios::binary);
  if (!file) throw Error("cannot write " + path);
  return file;
}

void add_lexicon_options(CLI::App *cmd, RunConfig &rc) {
  cmd->add_option("--lexicon", rc.lexicon, "Lexicon TSV")->required();
  cmd->add_option("--languages", rc.languages, "Comma-separated expected languages");
}

void add_pipeline_options(CLI::App *cmd, RunConfig &rc) {
  add_lexicon_options(cmd, rc);
  cmd->add_option("--relations", rc.relations, "Concept relation pairs TSV");
  cmd->add_option("--translator", rc.translator,
                  "none, dictionary[:path] or neural[:path]");
  cmd->add_option("--model", rc.model, "Translation model file");
  cmd->add_option("--dict", rc.dict, "Bilingual dictionary TSV");
  cmd->add_option("--max-level", rc.max_level, "ML, CL or BTM");
  cmd->add_option("--sem-groups", rc.sem_groups, "Comma-separated allowed semantic groups");
  cmd->add_flag("--no-preferred", rc.no_preferred, "Skip the preferred-label step");
  cmd->add_flag("--no-graph", rc.no_graph, "Skip the densest-subgraph step");
  cmd->add_option("--max-edit", rc.max_edit, "Edit budget per long token");
  cmd->add_option("--long-token", rc.long_token, "Minimum length of a long token");
}

int cmd_build_index(const RunConfig &rc, const std::string &out_dir, std::ostream &out,
                    std::ostream &err) {
  const auto langs = expected_languages(rc);
  if (!rc.lang.empty()) validate_lang(rc.lang, langs);
  require_file(rc.lexicon, "lexicon (--lexicon)");
  const Lexicon lexicon = load_lexicon_checked(rc, err);

  std::optional<fs::path> dir;
  if (!out_dir.empty()) dir = fs::path(out_dir);
  else dir = cache_dir();
  if (dir) fs::create_directories(*dir);

  out << "lang\tterms\tconcepts\n";
  for (const std::string &lang : lexicon.languages()) {
    if (!rc.lang.empty() && lang != rc.lang) continue;
    const TermIndex index = build_index(lexicon, lang);
    if (dir) save_index(index, *dir / (lang + ".nlx"));
    out << lang << '\t' << index.entries().size() << '\t' << index.concept_count() << '\n';
  }
  if (!rc.lang.empty() && !lexicon.languages().count(rc.lang)) {
    throw Error("lexicon has no terms in language '" + rc.lang + "'");
  }
  return kExitOk;
}

std::shared_ptr<const NormalizationEngine> make_engine(const RunConfig &rc, std::ostream &err) {
  require_file(rc.lexicon, "lexicon (--lexicon)");
  if (!rc.relations.empty()) require_file(rc.relations, "relations (--relations)");
  const TranslatorChoice choice = translator_choice(rc);
  auto lexicon = std::make_shared<const Lexicon>(load_lexicon_checked(rc, err));
  auto relations = std::make_shared<const RelationGraph>(load_relations_checked(rc, *lexicon, err));
  std::map<std::string, TermIndex> indexes;
  for (const std::string &lang : lexicon->languages()) {
    indexes.emplace(lang, cached_index(*lexicon, lang));
  }
  if (!indexes.count("en")) throw Error("lexicon has no English terms");
  EngineConfig cfg{fuzzy_of(rc), disambiguation_of(rc)};
  return std::make_shared<const NormalizationEngine>(lexicon, relations, std::move(indexes),
                                                     make_translator(choice), cfg);
}

int cmd_normalize(const RunConfig &rc, const std::vector<std::string> &terms,
                  const std::string &input, const std::string &out_path, std::istream &in,
                  std::ostream &out, std::ostream &err) {
  validate_lang(rc.lang, expected_languages(rc));
  const SearchLevel max_level = max_level_of(rc);
  fuzzy_of(rc);
  if (!input.empty() && input != "-") require_file(input, "input file (--input)");

  std::vector<std::string> batch = terms;
  if (!input.empty()) {
    std::ifstream file;
    std::istream *src = &in;
    if (input != "-") {
      file.open(input, std::ios::binary);
      src = &file;
    }
    std::string line;
    while (std::getline(*src, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!text::trim(line).empty()) batch.push_back(line);
    }
  }
  if (batch.empty()) throw UsageError("no terms given");

  auto engine = make_engine(rc, err);
  if (!engine->supports(rc.lang)) {
    throw UsageError("lexicon has no terms in language '" + rc.lang + "'");
  }
  std::ofstream file;
  std::ostream &dst = output_stream(out_path, file, out);
  dst << "term\tlevel\tmatched\tcandidates\tcui\n";
  for (const std::string &term : batch) {
    const TermOutcome o = engine->normalize(term, rc.lang, max_level);
    std::string matched, candidates;
    for (const std::string &m : o.matched_terms) matched += (matched.empty() ? "" : "|") + m;
    for (ConceptId c : o.candidates) candidates += (candidates.empty() ? "" : ",") + c.str();
    dst << term << '\t' << to_string(o.level) << '\t' << matched << '\t' << candidates << '\t'
        << (o.cui ? o.cui->str() : "") << '\n';
  }
  return kExitOk;
}

struct TrainArgs {
  std::string train;
  std::string dev;
  std::string out;
  std::string log;
  std::string preset = "full";
  int epochs = 50;
  uint64_t seed = 1;
};

int cmd_train_mt(const TrainArgs &a, std::ostream &out) {
  if (a.preset != "full" && a.preset != "small") throw UsageError("--preset must be full or small");
  if (a.out.empty()) throw UsageError("missing --out");
  if (a.epochs < 1) throw UsageError("--epochs must be positive");
  require_file(a.train, "training corpus (--train)");
  require_file(a.dev, "dev corpus (--dev)");

  const auto train = nmt::read_parallel_corpus(a.train);
  const auto dev = nmt::read_parallel_corpus(a.dev);
  nmt::ModelConfig cfg = a.preset == "small" ? nmt::small_config() : nmt::ModelConfig{};
  cfg.seed = a.seed;

  std::ofstream log_file;
  const std::string log_path = a.log.empty() ? a.out + ".log.tsv" : a.log;
  log_file.open(log_path, std::ios::binary);
  if (!log_file) throw Error("cannot write " + log_path);
  log_file << "epoch\ttrain_loss\tdev_loss\tlr\n";

  nmt::TrainOptions opts;
  opts.max_epochs = a.epochs;
  opts.on_epoch_end = [&](const nmt::EpochStats &s, const nmt::TranslationModel &) {
    char line[160];
    std::snprintf(line, sizeof(line), "%d\t%.6f\t%.6f\t%.3g\n", s.epoch, s.train_loss, s.dev_loss,
                  s.lr);
    log_file << line << std::flush;
    out << "epoch " << line << std::flush;
    return true;
  };
  nmt::TrainResult result = nmt::train(train, dev, cfg, opts);
  nmt::save_model(result.model, a.out);
  out << "best epoch " << result.best_epoch << ", dev loss " << result.best_dev_loss
      << ", model " << a.out << '\n';
  return kExitOk;
}

int cmd_translate(const std::string &model_path, const std::vector<std::string> &terms,
                  std::istream &in, std::ostream &out) {
  require_file(model_path, "model (--model)");
  const NeuralTranslator translator(
      std::make_shared<const nmt::TranslationModel>(nmt::load_model(model_path)));
  auto emit = [&](const std::string &term) {
    out << translator.translate(term).value_or("") << '\n';
  };
  if (!terms.empty()) {
    for (const std::string &t : terms) emit(t);
    return kExitOk;
  }
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    emit(line);
  }
  return kExitOk;
}

int cmd_evaluate(const RunConfig &rc, const std::string &corpus, const std::string &out_path,
                 std::ostream &out, std::ostream &err) {
  if (corpus.empty()) throw UsageError("missing --corpus");
  max_level_of(rc);
  require_file(rc.lexicon, "lexicon (--lexicon)");
  if (!rc.relations.empty()) require_file(rc.relations, "relations (--relations)");
  const TranslatorChoice choice = translator_choice(rc);
  std::error_code ec;
  if (!fs::is_directory(corpus, ec)) throw Error("corpus directory not found: " + corpus);

  const Lexicon lexicon = load_lexicon_checked(rc, err);
  const RelationGraph relations = load_relations_checked(rc, lexicon, err);
  const auto translator = make_translator(choice);
  EvalConfig cfg{fuzzy_of(rc), disambiguation_of(rc), rc.workers};
  const EvaluationReport report =
      run_evaluation(corpus, lexicon, relations, translator.get(), cfg);

  if (out_path.empty() || out_path == "-") {
    write_report_tsv(report, out);
    return kExitOk;
  }
  std::ofstream file(out_path, std::ios::binary);
  if (!file) throw Error("cannot write " + out_path);
  write_report_tsv(report, file);
  print_report_table(report, out);
  return kExitOk;
}

int cmd_serve(const RunConfig &rc, const std::string &host, int port, std::ostream &out,
              std::ostream &err) {
  if (port < 0 || port > 65535) throw UsageError("--port must be in 0..65535");
  if (rc.workers < 1) throw UsageError("--workers must be positive");
  max_level_of(rc);
  auto engine = make_engine(rc, err);
  NormalizationServer server(engine, ServerOptions{host, port, rc.workers});
  const int bound = server.bind();
  out << "listening on " << host << ":" << bound << std::endl;
  server.serve();
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string> &args, std::istream &in, std::ostream &out,
            std::ostream &err) {
  CLI::App app{"Multilingual biomedical concept normalization", "normlex"};
  app.require_subcommand(1);

  RunConfig rc;
  std::string out_path, input, corpus, host = "127.0.0.1";
  std::vector<std::string> terms;
  int port = 8080;
  TrainArgs train_args;

  auto *build = app.add_subcommand("build-index", "Build per-language term indexes");
  add_lexicon_options(build, rc);
  build->add_option("--lang", rc.lang, "Build only this language");
  build->add_option("--out", out_path, "Index directory (default: $NORMLEX_CACHE_DIR)");

  auto *normalize = app.add_subcommand("normalize", "Normalize terms to concepts");
  add_pipeline_options(normalize, rc);
  normalize->add_option("--lang", rc.lang, "Language of the terms")->required();
  normalize->add_option("--input", input, "File with one term per line ('-' for stdin)");
  normalize->add_option("--out", out_path, "Output TSV");
  normalize->add_option("terms", terms, "Terms");

  auto *train = app.add_subcommand("train-mt", "Train a character-level translation model");
  train->add_option("--train", train_args.train, "Parallel training TSV")->required();
  train->add_option("--dev", train_args.dev, "Parallel dev TSV")->required();
  train->add_option("--out", train_args.out, "Model file")->required();
  train->add_option("--log", train_args.log, "Per-epoch loss log (default: <out>.log.tsv)");
  train->add_option("--epochs", train_args.epochs, "Maximum epochs");
  train->add_option("--preset", train_args.preset, "full or small");
  train->add_option("--seed", train_args.seed, "Random seed");

  auto *translate = app.add_subcommand("translate", "Translate terms (arguments or stdin lines)");
  translate->add_option("--model", rc.model, "Model file")->required();
  translate->add_option("terms", terms, "Terms");

  auto *evaluate = app.add_subcommand("evaluate", "Evaluate on an annotated corpus");
  add_pipeline_options(evaluate, rc);
  evaluate->add_option("--corpus", corpus, "Corpus directory with manifest.tsv")->required();
  evaluate->add_option("--out", out_path, "Report TSV (default: stdout)");
  evaluate->add_option("--workers", rc.workers, "Documents processed in parallel");

  auto *serve = app.add_subcommand("serve", "Serve normalization over local HTTP");
  add_pipeline_options(serve, rc);
  serve->add_option("--host", host, "Listen address");
  serve->add_option("--port", port, "Listen port (0 picks one)");
  serve->add_option("--workers", rc.workers, "Concurrent requests");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError &e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*build) return cmd_build_index(rc, out_path, out, err);
    if (*normalize) return cmd_normalize(rc, terms, input, out_path, in, out, err);
    if (*train) return cmd_train_mt(train_args, out);
    if (*translate) return cmd_translate(rc.model, terms, in, out);
    if (*evaluate) return cmd_evaluate(rc, corpus, out_path, out, err);
    if (*serve) return cmd_serve(rc, host, port, out, err);
  } catch (const UsageError &e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace normlex
