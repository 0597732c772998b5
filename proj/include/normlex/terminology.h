#ifndef NORMLEX_TERMINOLOGY_H_
#define NORMLEX_TERMINOLOGY_H_

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace normlex {

// Concept identifier of the form "C" + 7 decimal digits. Ordering is numeric
// on the digit suffix.
class ConceptId {
 public:
  ConceptId() = default;
  explicit ConceptId(uint32_t value);

  // Returns nullopt unless `raw` matches ^C[0-9]{7}$.
  static std::optional<ConceptId> parse(std::string_view raw);

  uint32_t value() const { return value_; }
  std::string str() const;

  friend auto operator<=>(ConceptId a, ConceptId b) = default;

 private:
  uint32_t value_ = 0;
};

inline constexpr uint32_t kMaxConceptValue = 9'999'999;

struct TermRecord {
  ConceptId cui;
  std::string lang;
  std::string term;
  bool preferred = false;
  std::string sem_group;

  friend bool operator==(const TermRecord &, const TermRecord &) = default;
};

struct MalformedRow {
  std::size_t line_no = 0;
  std::string reason;
};

class Lexicon {
 public:
  struct ConceptView {
    std::vector<std::size_t> records;  // indices into Lexicon::records()
    std::set<std::string> sem_groups;  // non-empty tags only
  };

  Lexicon() = default;
  // Sorts records by (cui, lang, term) and drops exact duplicates.
  explicit Lexicon(std::vector<TermRecord> records);

  const std::vector<TermRecord> &records() const { return records_; }
  const std::map<ConceptId, ConceptView> &concepts() const { return by_cui_; }
  const std::set<std::string> &languages() const { return languages_; }

  const ConceptView *find(ConceptId cui) const;
  bool contains(ConceptId cui) const { return by_cui_.count(cui) != 0; }
  std::size_t concept_count() const { return by_cui_.size(); }

  // Preferred terms of a concept in one language.
  std::vector<std::string> preferred_terms(ConceptId cui, std::string_view lang) const;

  // Order-sensitive hash of the record set; identifies a lexicon build.
  uint64_t fingerprint() const;

 private:
  std::vector<TermRecord> records_;
  std::map<ConceptId, ConceptView> by_cui_;
  std::set<std::string> languages_;
};

struct LexiconLoadResult {
  Lexicon lexicon;
  std::vector<MalformedRow> malformed;
};

inline const std::set<std::string> &default_languages() {
  static const std::set<std::string> langs = {"de", "en", "es", "fr", "nl"};
  return langs;
}

// Reads a `cui<TAB>lang<TAB>term<TAB>preferred<TAB>sem_group` file. Bad rows
// are collected in `malformed` while they stay at or below 1% of the data
// rows; above that, or for an unreadable or empty file, throws LexiconError.
LexiconLoadResult load_lexicon(const std::filesystem::path &path,
                               const std::set<std::string> &expected_langs);
LexiconLoadResult parse_lexicon(std::string_view contents,
                                const std::set<std::string> &expected_langs);

// Undirected concept relations. Pairs are stored smaller value first.
class RelationGraph {
 public:
  using Edge = std::pair<ConceptId, ConceptId>;

  RelationGraph() = default;

  // Returns false for self-loops and duplicates.
  bool add(ConceptId a, ConceptId b);
  bool related(ConceptId a, ConceptId b) const;

  const std::set<Edge> &edges() const { return edges_; }
  std::size_t size() const { return edges_.size(); }
  bool empty() const { return edges_.empty(); }

 private:
  std::set<Edge> edges_;
};

struct RelationsLoadResult {
  RelationGraph graph;
  std::size_t dropped_self_loops = 0;
  std::size_t dropped_duplicates = 0;
  std::size_t dropped_unknown = 0;
  std::vector<MalformedRow> malformed;
};

RelationsLoadResult load_relations(const std::filesystem::path &path,
                                   const Lexicon &lexicon);
RelationsLoadResult parse_relations(std::string_view contents, const Lexicon &lexicon);

// Minimal numeric concept id. Throws EmptyCandidates on empty input.
ConceptId smallest_cui(std::span<const ConceptId> candidates);
ConceptId smallest_cui(const std::set<ConceptId> &candidates);

}  // namespace normlex

#endif  // NORMLEX_TERMINOLOGY_H_
