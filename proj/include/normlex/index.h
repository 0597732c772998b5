#ifndef NORMLEX_INDEX_H_
#define NORMLEX_INDEX_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "normlex/terminology.h"

namespace normlex {

// Lookup key: lowercased, whitespace-collapsed text plus the maximal
// alphanumeric runs of that text. Diacritics are kept as-is.
struct NormalizedTerm {
  std::string text;
  std::vector<std::string> tokens;

  friend bool operator==(const NormalizedTerm &, const NormalizedTerm &) = default;
};

NormalizedTerm normalize_term(std::string_view raw);

struct FuzzyConfig {
  int max_edit_per_long_token = 1;
  // Tokens with at least this many codepoints get the edit budget.
  int long_token_min_len = 5;

  void validate() const;
};

// Edit budget of one query token: `max_edit_per_long_token` when the token
// has at least `long_token_min_len` codepoints, otherwise 0.
int token_edit_budget(std::string_view token, const FuzzyConfig &cfg);

// Unit-cost Levenshtein distance over codepoints.
int levenshtein(std::string_view a, std::string_view b);
int levenshtein(std::u32string_view a, std::u32string_view b);

// True iff levenshtein(a, b) <= bound. Runs in O(bound * min(|a|,|b|)).
bool within_edit_distance(std::u32string_view a, std::u32string_view b, int bound);

enum class MatchKind { kExact, kFuzzy };

struct Candidate {
  ConceptId cui;
  NormalizedTerm matched_term;
  bool preferred = false;
  MatchKind match_kind = MatchKind::kExact;
  std::string source_lang;
};

// Immutable term index for one language.
class TermIndex {
 public:
  struct Entry {
    NormalizedTerm term;
    std::vector<std::u32string> token_codepoints;
    ConceptId cui;
    bool preferred = false;
  };

  TermIndex() = default;

  const std::string &lang() const { return lang_; }
  // One entry per distinct (normalized text, cui), sorted by (cui, text).
  const std::vector<Entry> &entries() const { return entries_; }
  std::size_t key_count() const { return exact_.size(); }
  std::size_t concept_count() const;

  // Entry indices sharing a normalized text, in entry order.
  const std::vector<uint32_t> *exact_entries(const std::string &text) const;
  // Entry indices with `count` tokens, in entry order.
  const std::vector<uint32_t> *bucket(std::size_t count) const;

  uint64_t lexicon_fingerprint() const { return fingerprint_; }

 private:
  friend TermIndex build_index(const Lexicon &lexicon, const std::string &lang);
  friend TermIndex load_index(const std::filesystem::path &path);

  void add_entry(NormalizedTerm term, ConceptId cui, bool preferred);
  void finalize();

  std::string lang_;
  uint64_t fingerprint_ = 0;
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::vector<uint32_t>> exact_;
  std::map<std::size_t, std::vector<uint32_t>> token_count_buckets_;
};

// Throws UnknownLanguage when no lexicon term has language `lang`.
TermIndex build_index(const Lexicon &lexicon, const std::string &lang);

// Candidates whose normalized text equals query.text, ascending by cui.
std::vector<Candidate> exact_lookup(const TermIndex &index, const NormalizedTerm &query);

// Entries with the query's token count whose tokens are pairwise within the
// query token's edit budget, ascending by (cui, matched text). A query with
// no tokens only matches entries with identical text.
std::vector<Candidate> fuzzy_lookup(const TermIndex &index, const NormalizedTerm &query,
                                    const FuzzyConfig &cfg);

// Binary cache: "NLX1" followed by length-prefixed named sections.
void save_index(const TermIndex &index, const std::filesystem::path &path);
TermIndex load_index(const std::filesystem::path &path);

}  // namespace normlex

#endif  // NORMLEX_INDEX_H_
