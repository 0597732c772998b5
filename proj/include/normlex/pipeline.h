#ifndef NORMLEX_PIPELINE_H_
#define NORMLEX_PIPELINE_H_

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "normlex/index.h"
#include "normlex/terminology.h"
#include "normlex/translator.h"

namespace normlex {

struct Span {
  std::size_t start = 0;  // byte offsets, end exclusive
  std::size_t end = 0;

  friend bool operator==(const Span &, const Span &) = default;
};

struct Mention {
  std::string doc_id;
  std::string mention_id;
  std::vector<Span> spans;
  std::string surface;  // span texts joined by single spaces
  std::string language;
};

// Search depth, in the order the levels are tried: the target-language
// lexicon (ML), the English lexicon with the untranslated term (CL), and
// the English lexicon with the translated term (BTM).
enum class SearchLevel { kML = 0, kCL = 1, kBTM = 2, kNone = 3 };

std::string_view to_string(SearchLevel level);
std::optional<SearchLevel> parse_search_level(std::string_view s);

struct CandidateResult {
  std::string doc_id;
  std::string mention_id;
  std::vector<Candidate> candidates;
  SearchLevel level = SearchLevel::kNone;
  std::optional<std::string> translated_query;  // set only for kBTM
};

// Runs the levels in order and stops at the first one with candidates.
// Within a level, fuzzy matching runs only when exact matching finds
// nothing. `translator` may be null, which disables the BTM level.
CandidateResult sequential_search(const Mention &mention, const TermIndex &target_index,
                                  const TermIndex &english_index, const Translator *translator,
                                  const FuzzyConfig &fuzzy);

// sequential_search truncated after `max_level`.
CandidateResult search_mode_restricted(const Mention &mention, const TermIndex &target_index,
                                       const TermIndex &english_index,
                                       const Translator *translator, const FuzzyConfig &fuzzy,
                                       SearchLevel max_level);

struct DisambiguationConfig {
  std::optional<std::set<std::string>> allowed_sem_groups;
  bool use_preferred_step = true;
  bool use_graph_step = true;
};

// A candidate concept of one mention; `preferred` is set when any matched
// term of the concept is a preferred label.
struct CandidateConcept {
  ConceptId cui;
  bool preferred = false;

  friend bool operator==(const CandidateConcept &, const CandidateConcept &) = default;
};

// Collapses term-level candidates to concepts, ascending by cui.
std::vector<CandidateConcept> collapse_candidates(const std::vector<Candidate> &candidates);

// Keeps concepts with a semantic group in `allowed`. Returns the input when
// `allowed` is absent or nothing would survive.
std::vector<CandidateConcept> filter_semantic(const std::vector<CandidateConcept> &candidates,
                                              const Lexicon &lexicon,
                                              const std::optional<std::set<std::string>> &allowed);

// Keeps preferred-label candidates if there are any.
std::vector<CandidateConcept> prefer_preferred(const std::vector<CandidateConcept> &candidates);

// mention id -> candidate concepts of one document.
using DocumentCandidates = std::map<std::string, std::set<ConceptId>>;

// Greedy minimum-degree peeling over the (mention, concept) graph whose
// edges join related concepts of different mentions. Only mentions with at
// least two candidates lose nodes; ties remove the largest cui, then the
// largest mention id. Stops once no mention has two candidates or every
// removable node is isolated. Mentions in `pinned` contribute edges but are
// never pruned.
DocumentCandidates densest_subgraph_step(const DocumentCandidates &doc_candidates,
                                         const RelationGraph &relations,
                                         const std::set<std::string> &pinned = {});

struct Prediction {
  std::string doc_id;
  std::string mention_id;
  ConceptId cui;
  SearchLevel level = SearchLevel::kNone;

  friend bool operator==(const Prediction &, const Prediction &) = default;
};

// Semantic filter, preferred labels, densest subgraph, smallest cui, in
// that order. The graph step runs once per search level: mentions resolved
// at a level are pruned with the mentions of lower levels as fixed context,
// so raising the search depth never changes earlier predictions. Mentions
// without candidates get no prediction.
std::vector<Prediction> disambiguate_document(const std::vector<CandidateResult> &doc_results,
                                              const Lexicon &lexicon,
                                              const RelationGraph &relations,
                                              const DisambiguationConfig &cfg);

}  // namespace normlex

#endif  // NORMLEX_PIPELINE_H_
