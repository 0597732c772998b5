#ifndef NORMLEX_SERVICE_H_
#define NORMLEX_SERVICE_H_

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "normlex/index.h"
#include "normlex/pipeline.h"
#include "normlex/terminology.h"
#include "normlex/translator.h"

namespace normlex {

struct EngineConfig {
  FuzzyConfig fuzzy;
  DisambiguationConfig disambiguation;
};

struct TermOutcome {
  std::string term;
  SearchLevel level = SearchLevel::kNone;
  std::vector<std::string> matched_terms;   // distinct, in candidate order
  std::vector<ConceptId> candidates;        // before disambiguation, ascending
  std::optional<ConceptId> cui;
  std::optional<std::string> translated_query;
};

// Normalizes free-standing terms over immutable indexes. Each term is its
// own single-mention document. Safe to share between threads as long as the
// translator is.
class NormalizationEngine {
 public:
  // `indexes` must contain "en". `relations` and `translator` may be null.
  NormalizationEngine(std::shared_ptr<const Lexicon> lexicon,
                      std::shared_ptr<const RelationGraph> relations,
                      std::map<std::string, TermIndex> indexes,
                      std::shared_ptr<const Translator> translator, EngineConfig cfg);

  bool supports(const std::string &lang) const { return indexes_.count(lang) != 0; }
  std::vector<std::string> languages() const;

  // Throws UnknownLanguage when no index exists for `lang`.
  TermOutcome normalize(std::string_view term, const std::string &lang,
                        SearchLevel max_level = SearchLevel::kBTM) const;

 private:
  std::shared_ptr<const Lexicon> lexicon_;
  std::shared_ptr<const RelationGraph> relations_;
  std::map<std::string, TermIndex> indexes_;
  std::shared_ptr<const Translator> translator_;
  EngineConfig cfg_;
};

struct HttpReply {
  int status = 200;
  std::string body;  // JSON
};

// Body of POST /normalize:
//   {"terms": [...], "lang": "fr", "max_level": "BTM"}
// `max_level` is optional. 400 on malformed input, 422 on an unknown
// language, 500 with a generic message on anything else.
HttpReply handle_normalize(const NormalizationEngine &engine, std::string_view body);
HttpReply handle_health();

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;        // 0 picks a free port
  std::size_t workers = 4;
};

// Local HTTP front end for an engine. Opens a listening socket and nothing
// else.
class NormalizationServer {
 public:
  NormalizationServer(std::shared_ptr<const NormalizationEngine> engine, ServerOptions opts);
  ~NormalizationServer();
  NormalizationServer(const NormalizationServer &) = delete;
  NormalizationServer &operator=(const NormalizationServer &) = delete;

  // Binds the socket and returns the port. Throws Error when binding fails.
  int bind();
  // Blocks until stop() is called.
  void serve();
  // Blocks until serve() is accepting connections.
  void wait_until_ready() const;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace normlex

#endif  // NORMLEX_SERVICE_H_
