#include "normlex/terminology.h"

#include <algorithm>
#include <cstdio>
#include <tuple>

#include "file_util.h"
#include "normlex/errors.h"
#include "normlex/text.h"

namespace normlex {

ConceptId::ConceptId(uint32_t value) : value_(value) {
  if (value > kMaxConceptValue) throw Error("concept id out of range");
}

std::optional<ConceptId> ConceptId::parse(std::string_view raw) {
  if (raw.size() != 8 || raw[0] != 'C') return std::nullopt;
  uint32_t value = 0;
  for (char c : raw.substr(1)) {
    if (c < '0' || c > '9') return std::nullopt;
    value = value * 10 + static_cast<uint32_t>(c - '0');
  }
  return ConceptId(value);
}

std::string ConceptId::str() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "C%07u", value_);
  return buf;
}

Lexicon::Lexicon(std::vector<TermRecord> records) : records_(std::move(records)) {
  std::sort(records_.begin(), records_.end(), [](const TermRecord &a, const TermRecord &b) {
    return std::tie(a.cui, a.lang, a.term, a.preferred, a.sem_group) <
           std::tie(b.cui, b.lang, b.term, b.preferred, b.sem_group);
  });
  records_.erase(std::unique(records_.begin(), records_.end()), records_.end());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const TermRecord &r = records_[i];
    ConceptView &view = by_cui_[r.cui];
    view.records.push_back(i);
    if (!r.sem_group.empty()) view.sem_groups.insert(r.sem_group);
    languages_.insert(r.lang);
  }
}

const Lexicon::ConceptView *Lexicon::find(ConceptId cui) const {
  auto it = by_cui_.find(cui);
  return it == by_cui_.end() ? nullptr : &it->second;
}

std::vector<std::string> Lexicon::preferred_terms(ConceptId cui, std::string_view lang) const {
  std::vector<std::string> out;
  if (const ConceptView *view = find(cui)) {
    for (std::size_t i : view->records) {
      const TermRecord &r = records_[i];
      if (r.preferred && r.lang == lang) out.push_back(r.term);
    }
  }
  return out;
}

uint64_t Lexicon::fingerprint() const {
  // FNV-1a over the canonical TSV serialization.
  uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
  };
  for (const TermRecord &r : records_) {
    mix(r.cui.str());
    mix("\t");
    mix(r.lang);
    mix("\t");
    mix(r.term);
    mix(r.preferred ? "\t1\t" : "\t0\t");
    mix(r.sem_group);
    mix("\n");
  }
  return h;
}

namespace {

bool is_comment_or_blank(std::string_view line) {
  std::string_view t = text::trim(line);
  return t.empty() || t.front() == '#';
}

}  // namespace

LexiconLoadResult parse_lexicon(std::string_view contents,
                                const std::set<std::string> &expected_langs) {
  std::vector<TermRecord> records;
  std::vector<MalformedRow> malformed;
  std::size_t data_rows = 0;

  internal::for_each_line(contents, [&](std::size_t line_no, std::string_view line) {
    if (is_comment_or_blank(line)) return;
    ++data_rows;
    auto fields = text::split(line, '\t');
    if (fields.size() != 4 && fields.size() != 5) {
      malformed.push_back({line_no, "expected 5 tab-separated fields"});
      return;
    }
    auto cui = ConceptId::parse(fields[0]);
    if (!cui) {
      malformed.push_back({line_no, "bad cui"});
      return;
    }
    std::string lang(fields[1]);
    if (!expected_langs.count(lang)) {
      malformed.push_back({line_no, "unexpected language '" + lang + "'"});
      return;
    }
    std::string_view term = text::trim(fields[2]);
    if (term.empty()) {
      malformed.push_back({line_no, "empty term"});
      return;
    }
    if (fields[3] != "0" && fields[3] != "1") {
      malformed.push_back({line_no, "preferred flag must be 0 or 1"});
      return;
    }
    TermRecord record;
    record.cui = *cui;
    record.lang = std::move(lang);
    record.term = std::string(term);
    record.preferred = fields[3] == "1";
    if (fields.size() == 5) record.sem_group = std::string(text::trim(fields[4]));
    records.push_back(std::move(record));
  });

  if (records.empty()) {
    if (data_rows == 0) throw LexiconError("empty lexicon");
    throw LexiconError("no well-formed rows in lexicon (first error on line " +
                       std::to_string(malformed.front().line_no) + ": " +
                       malformed.front().reason + ")");
  }
  // More than 1% bad rows is treated as the wrong file or a broken export.
  if (malformed.size() * 100 > data_rows) {
    throw LexiconError(std::to_string(malformed.size()) + " of " + std::to_string(data_rows) +
                       " rows malformed (first on line " +
                       std::to_string(malformed.front().line_no) + ": " +
                       malformed.front().reason + ")");
  }
  return {Lexicon(std::move(records)), std::move(malformed)};
}

LexiconLoadResult load_lexicon(const std::filesystem::path &path,
                               const std::set<std::string> &expected_langs) {
  auto contents = internal::read_file(path);
  if (!contents) throw LexiconError("cannot read lexicon file " + path.string());
  try {
    return parse_lexicon(*contents, expected_langs);
  } catch (const LexiconError &e) {
    throw LexiconError(path.string() + ": " + e.what());
  }
}

bool RelationGraph::add(ConceptId a, ConceptId b) {
  if (a == b) return false;
  if (b < a) std::swap(a, b);
  return edges_.emplace(a, b).second;
}

bool RelationGraph::related(ConceptId a, ConceptId b) const {
  if (b < a) std::swap(a, b);
  return edges_.count({a, b}) != 0;
}

RelationsLoadResult parse_relations(std::string_view contents, const Lexicon &lexicon) {
  RelationsLoadResult result;
  internal::for_each_line(contents, [&](std::size_t line_no, std::string_view line) {
    if (is_comment_or_blank(line)) return;
    auto fields = text::split(line, '\t');
    if (fields.size() < 2) {
      result.malformed.push_back({line_no, "expected 2 tab-separated fields"});
      return;
    }
    auto a = ConceptId::parse(text::trim(fields[0]));
    auto b = ConceptId::parse(text::trim(fields[1]));
    if (!a || !b) {
      result.malformed.push_back({line_no, "bad cui"});
      return;
    }
    if (*a == *b) {
      ++result.dropped_self_loops;
    } else if (!lexicon.contains(*a) || !lexicon.contains(*b)) {
      ++result.dropped_unknown;
    } else if (!result.graph.add(*a, *b)) {
      ++result.dropped_duplicates;
    }
  });
  return result;
}

RelationsLoadResult load_relations(const std::filesystem::path &path, const Lexicon &lexicon) {
  auto contents = internal::read_file(path);
  if (!contents) throw RelationsError("cannot read relations file " + path.string());
  return parse_relations(*contents, lexicon);
}

ConceptId smallest_cui(std::span<const ConceptId> candidates) {
  if (candidates.empty()) throw EmptyCandidates();
  return *std::min_element(candidates.begin(), candidates.end());
}

ConceptId smallest_cui(const std::set<ConceptId> &candidates) {
  if (candidates.empty()) throw EmptyCandidates();
  return *candidates.begin();
}

}  // namespace normlex
