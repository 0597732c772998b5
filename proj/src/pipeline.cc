#include "normlex/pipeline.h"

#include <algorithm>
#include <cctype>
#include <iterator>
#include <tuple>

#include "normlex/errors.h"

namespace normlex {

std::string_view to_string(SearchLevel level) {
  switch (level) {
    case SearchLevel::kML:
      return "ML";
    case SearchLevel::kCL:
      return "CL";
    case SearchLevel::kBTM:
      return "BTM";
    case SearchLevel::kNone:
      return "None";
  }
  return "None";
}

std::optional<SearchLevel> parse_search_level(std::string_view s) {
  std::string upper(s);
  for (char &c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (upper == "ML") return SearchLevel::kML;
  if (upper == "CL") return SearchLevel::kCL;
  if (upper == "BTM") return SearchLevel::kBTM;
  if (upper == "NONE") return SearchLevel::kNone;
  return std::nullopt;
}

namespace {

std::vector<Candidate> lookup(const TermIndex &index, const NormalizedTerm &query,
                              const FuzzyConfig &fuzzy) {
  std::vector<Candidate> found = exact_lookup(index, query);
  if (found.empty()) found = fuzzy_lookup(index, query, fuzzy);
  return found;
}

}  // namespace

CandidateResult search_mode_restricted(const Mention &mention, const TermIndex &target_index,
                                       const TermIndex &english_index,
                                       const Translator *translator, const FuzzyConfig &fuzzy,
                                       SearchLevel max_level) {
  CandidateResult result;
  result.doc_id = mention.doc_id;
  result.mention_id = mention.mention_id;
  if (max_level == SearchLevel::kNone) return result;

  const NormalizedTerm query = normalize_term(mention.surface);
  if (query.text.empty()) return result;

  result.candidates = lookup(target_index, query, fuzzy);
  if (!result.candidates.empty()) {
    result.level = SearchLevel::kML;
    return result;
  }
  if (max_level == SearchLevel::kML) return result;

  result.candidates = lookup(english_index, query, fuzzy);
  if (!result.candidates.empty()) {
    result.level = SearchLevel::kCL;
    return result;
  }
  if (max_level == SearchLevel::kCL || translator == nullptr) return result;

  std::optional<std::string> translated = translator->translate(query.text);
  if (!translated) return result;
  const NormalizedTerm translated_query = normalize_term(*translated);
  if (translated_query.text.empty()) return result;
  result.candidates = lookup(english_index, translated_query, fuzzy);
  if (!result.candidates.empty()) {
    result.level = SearchLevel::kBTM;
    result.translated_query = std::move(*translated);
  }
  return result;
}

CandidateResult sequential_search(const Mention &mention, const TermIndex &target_index,
                                  const TermIndex &english_index, const Translator *translator,
                                  const FuzzyConfig &fuzzy) {
  return search_mode_restricted(mention, target_index, english_index, translator, fuzzy,
                                SearchLevel::kBTM);
}

std::vector<CandidateConcept> collapse_candidates(const std::vector<Candidate> &candidates) {
  std::map<ConceptId, bool> merged;
  for (const Candidate &c : candidates) merged[c.cui] = merged[c.cui] || c.preferred;
  std::vector<CandidateConcept> out;
  out.reserve(merged.size());
  for (const auto &[cui, preferred] : merged) out.push_back({cui, preferred});
  return out;
}

std::vector<CandidateConcept> filter_semantic(const std::vector<CandidateConcept> &candidates,
                                              const Lexicon &lexicon,
                                              const std::optional<std::set<std::string>> &allowed) {
  if (!allowed) return candidates;
  std::vector<CandidateConcept> kept;
  for (const CandidateConcept &c : candidates) {
    const Lexicon::ConceptView *view = lexicon.find(c.cui);
    if (!view) continue;
    const bool match = std::any_of(view->sem_groups.begin(), view->sem_groups.end(),
                                   [&](const std::string &g) { return allowed->count(g) != 0; });
    if (match) kept.push_back(c);
  }
  return kept.empty() ? candidates : kept;
}

std::vector<CandidateConcept> prefer_preferred(const std::vector<CandidateConcept> &candidates) {
  std::vector<CandidateConcept> kept;
  std::copy_if(candidates.begin(), candidates.end(), std::back_inserter(kept),
               [](const CandidateConcept &c) { return c.preferred; });
  return kept.empty() ? candidates : kept;
}

DocumentCandidates densest_subgraph_step(const DocumentCandidates &doc_candidates,
                                         const RelationGraph &relations,
                                         const std::set<std::string> &pinned) {
  struct Node {
    const std::string *mention;
    ConceptId cui;
    bool alive = true;
    int degree = 0;
    std::vector<std::size_t> neighbors;
  };
  std::vector<Node> nodes;
  std::map<std::string, int> alive_per_mention;
  for (const auto &[mention, cuis] : doc_candidates) {
    for (ConceptId cui : cuis) nodes.push_back(Node{&mention, cui, true, 0, {}});
    alive_per_mention[mention] = static_cast<int>(cuis.size());
  }
  if (relations.empty()) return doc_candidates;

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      if (*nodes[i].mention == *nodes[j].mention) continue;
      if (relations.related(nodes[i].cui, nodes[j].cui)) {
        nodes[i].neighbors.push_back(j);
        nodes[j].neighbors.push_back(i);
      }
    }
  }
  for (Node &n : nodes) n.degree = static_cast<int>(n.neighbors.size());

  while (true) {
    // Removal candidate: minimum degree, then largest cui, then largest mention id.
    Node *victim = nullptr;
    bool any_connected = false;
    for (Node &n : nodes) {
      if (!n.alive || pinned.count(*n.mention) || alive_per_mention[*n.mention] < 2) continue;
      any_connected = any_connected || n.degree > 0;
      if (victim == nullptr ||
          std::make_tuple(-n.degree, n.cui, std::string_view(*n.mention)) >
              std::make_tuple(-victim->degree, victim->cui, std::string_view(*victim->mention))) {
        victim = &n;
      }
    }
    if (victim == nullptr || !any_connected) break;
    victim->alive = false;
    --alive_per_mention[*victim->mention];
    for (std::size_t j : victim->neighbors) {
      if (nodes[j].alive) --nodes[j].degree;
    }
  }

  DocumentCandidates out;
  for (const auto &[mention, cuis] : doc_candidates) out[mention];
  for (const Node &n : nodes) {
    if (n.alive) out[*n.mention].insert(n.cui);
  }
  return out;
}

std::vector<Prediction> disambiguate_document(const std::vector<CandidateResult> &doc_results,
                                              const Lexicon &lexicon,
                                              const RelationGraph &relations,
                                              const DisambiguationConfig &cfg) {
  DocumentCandidates sets;
  std::map<std::string, SearchLevel> levels;
  for (const CandidateResult &r : doc_results) {
    if (r.level == SearchLevel::kNone || r.candidates.empty()) continue;
    if (levels.count(r.mention_id)) throw Error("duplicate mention id " + r.mention_id);
    std::vector<CandidateConcept> concepts = collapse_candidates(r.candidates);
    concepts = filter_semantic(concepts, lexicon, cfg.allowed_sem_groups);
    if (cfg.use_preferred_step) concepts = prefer_preferred(concepts);
    auto &set = sets[r.mention_id];
    for (const CandidateConcept &c : concepts) set.insert(c.cui);
    levels[r.mention_id] = r.level;
  }

  if (cfg.use_graph_step) {
    for (SearchLevel level : {SearchLevel::kML, SearchLevel::kCL, SearchLevel::kBTM}) {
      DocumentCandidates active;
      std::set<std::string> pinned;
      bool has_level = false;
      for (const auto &[mention, cuis] : sets) {
        const SearchLevel l = levels[mention];
        if (l > level) continue;
        active[mention] = cuis;
        if (l < level) {
          pinned.insert(mention);
        } else {
          has_level = true;
        }
      }
      if (!has_level) continue;
      for (auto &[mention, cuis] : densest_subgraph_step(active, relations, pinned)) {
        if (levels[mention] == level) sets[mention] = std::move(cuis);
      }
    }
  }

  std::vector<Prediction> out;
  for (const CandidateResult &r : doc_results) {
    auto it = sets.find(r.mention_id);
    if (it == sets.end()) continue;
    out.push_back(Prediction{r.doc_id, r.mention_id, smallest_cui(it->second), r.level});
  }
  return out;
}

}  // namespace normlex
