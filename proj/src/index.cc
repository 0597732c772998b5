#include "normlex/index.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <tuple>

#include "binary_io.h"
#include "file_util.h"
#include "normlex/errors.h"
#include "normlex/text.h"

namespace normlex {

NormalizedTerm normalize_term(std::string_view raw) {
  NormalizedTerm out;
  std::string token;
  bool pending_space = false;
  for (char32_t c : text::decode_utf8(raw)) {
    if (text::is_space(c)) {
      pending_space = !out.text.empty();
      if (!token.empty()) out.tokens.push_back(std::move(token)), token.clear();
      continue;
    }
    if (pending_space) {
      out.text.push_back(' ');
      pending_space = false;
    }
    char32_t lower = text::to_lower(c);
    text::append_utf8(lower, &out.text);
    if (text::is_alnum(lower)) {
      text::append_utf8(lower, &token);
    } else if (!token.empty()) {
      out.tokens.push_back(std::move(token));
      token.clear();
    }
  }
  if (!token.empty()) out.tokens.push_back(std::move(token));
  return out;
}

void FuzzyConfig::validate() const {
  if (max_edit_per_long_token < 0) throw Error("max_edit_per_long_token must be >= 0");
  if (long_token_min_len < 1) throw Error("long_token_min_len must be >= 1");
}

int token_edit_budget(std::string_view token, const FuzzyConfig &cfg) {
  return text::codepoint_length(token) >= static_cast<std::size_t>(cfg.long_token_min_len)
             ? cfg.max_edit_per_long_token
             : 0;
}

int levenshtein(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<int> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    int diag = row[0];
    row[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= b.size(); ++j) {
      int up = row[j];
      row[j] = std::min({up + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

int levenshtein(std::string_view a, std::string_view b) {
  return levenshtein(text::decode_utf8(a), text::decode_utf8(b));
}

bool within_edit_distance(std::u32string_view a, std::u32string_view b, int bound) {
  if (bound < 0) return false;
  const std::size_t la = a.size(), lb = b.size();
  const std::size_t diff = la > lb ? la - lb : lb - la;
  if (diff > static_cast<std::size_t>(bound)) return false;
  if (bound == 0) return a == b;
  if (a == b) return true;

  // Banded DP: cells outside |i - j| <= bound can never be within bound.
  const int kInf = bound + 1;
  std::vector<int> prev(lb + 1, kInf), cur(lb + 1, kInf);
  for (std::size_t j = 0; j <= lb && j <= static_cast<std::size_t>(bound); ++j) {
    prev[j] = static_cast<int>(j);
  }
  for (std::size_t i = 1; i <= la; ++i) {
    const std::size_t lo = i > static_cast<std::size_t>(bound) ? i - bound : 0;
    const std::size_t hi = std::min(lb, i + bound);
    std::fill(cur.begin(), cur.end(), kInf);
    if (lo == 0) cur[0] = static_cast<int>(i);
    int row_min = lo == 0 ? cur[0] : kInf;
    for (std::size_t j = std::max<std::size_t>(lo, 1); j <= hi; ++j) {
      int v = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      v = std::min(v, prev[j] + 1);
      v = std::min(v, cur[j - 1] + 1);
      cur[j] = std::min(v, kInf);
      row_min = std::min(row_min, cur[j]);
    }
    if (row_min > bound) return false;
    std::swap(prev, cur);
  }
  return prev[lb] <= bound;
}

std::size_t TermIndex::concept_count() const {
  std::set<ConceptId> cuis;
  for (const Entry &e : entries_) cuis.insert(e.cui);
  return cuis.size();
}

const std::vector<uint32_t> *TermIndex::exact_entries(const std::string &text) const {
  auto it = exact_.find(text);
  return it == exact_.end() ? nullptr : &it->second;
}

const std::vector<uint32_t> *TermIndex::bucket(std::size_t count) const {
  auto it = token_count_buckets_.find(count);
  return it == token_count_buckets_.end() ? nullptr : &it->second;
}

void TermIndex::add_entry(NormalizedTerm term, ConceptId cui, bool preferred) {
  Entry e;
  e.token_codepoints.reserve(term.tokens.size());
  for (const std::string &tok : term.tokens) e.token_codepoints.push_back(text::decode_utf8(tok));
  e.term = std::move(term);
  e.cui = cui;
  e.preferred = preferred;
  entries_.push_back(std::move(e));
}

void TermIndex::finalize() {
  std::sort(entries_.begin(), entries_.end(), [](const Entry &a, const Entry &b) {
    return std::tie(a.cui, a.term.text) < std::tie(b.cui, b.term.text);
  });
  // Merge (cui, text) duplicates: the entry is preferred if any source term was.
  std::vector<Entry> merged;
  for (Entry &e : entries_) {
    if (!merged.empty() && merged.back().cui == e.cui && merged.back().term.text == e.term.text) {
      merged.back().preferred = merged.back().preferred || e.preferred;
    } else {
      merged.push_back(std::move(e));
    }
  }
  entries_ = std::move(merged);
  exact_.clear();
  token_count_buckets_.clear();
  for (uint32_t i = 0; i < entries_.size(); ++i) {
    exact_[entries_[i].term.text].push_back(i);
    token_count_buckets_[entries_[i].term.tokens.size()].push_back(i);
  }
}

TermIndex build_index(const Lexicon &lexicon, const std::string &lang) {
  if (!lexicon.languages().count(lang)) throw UnknownLanguage(lang);
  TermIndex index;
  index.lang_ = lang;
  index.fingerprint_ = lexicon.fingerprint();
  for (const TermRecord &r : lexicon.records()) {
    if (r.lang != lang) continue;
    NormalizedTerm term = normalize_term(r.term);
    if (term.text.empty()) continue;
    index.add_entry(std::move(term), r.cui, r.preferred);
  }
  index.finalize();
  return index;
}

namespace {

Candidate make_candidate(const TermIndex &index, const TermIndex::Entry &e, MatchKind kind) {
  return Candidate{e.cui, e.term, e.preferred, kind, index.lang()};
}

}  // namespace

std::vector<Candidate> exact_lookup(const TermIndex &index, const NormalizedTerm &query) {
  std::vector<Candidate> out;
  if (const auto *ids = index.exact_entries(query.text)) {
    for (uint32_t id : *ids) out.push_back(make_candidate(index, index.entries()[id], MatchKind::kExact));
  }
  return out;
}

std::vector<Candidate> fuzzy_lookup(const TermIndex &index, const NormalizedTerm &query,
                                    const FuzzyConfig &cfg) {
  std::vector<Candidate> out;
  if (query.tokens.empty()) {
    for (Candidate &c : exact_lookup(index, query)) {
      c.match_kind = MatchKind::kFuzzy;
      out.push_back(std::move(c));
    }
    return out;
  }
  const auto *ids = index.bucket(query.tokens.size());
  if (!ids) return out;

  std::vector<std::u32string> q;
  std::vector<int> budget;
  for (const std::string &tok : query.tokens) {
    q.push_back(text::decode_utf8(tok));
    budget.push_back(token_edit_budget(tok, cfg));
  }
  for (uint32_t id : *ids) {
    const TermIndex::Entry &e = index.entries()[id];
    bool match = true;
    for (std::size_t i = 0; i < q.size() && match; ++i) {
      match = within_edit_distance(q[i], e.token_codepoints[i], budget[i]);
    }
    if (match) out.push_back(make_candidate(index, e, MatchKind::kFuzzy));
  }
  // Bucket order already follows entry order, which is (cui, text).
  return out;
}

void save_index(const TermIndex &index, const std::filesystem::path &path) {
  auto section = [](internal::BinaryWriter &w, std::string_view name, const std::string &payload) {
    w.put_string(name);
    w.put_string(payload);
  };
  internal::BinaryWriter out;
  out.put_bytes("NLX1");
  {
    internal::BinaryWriter s;
    s.put_string(index.lang());
    section(out, "lang", s.take());
  }
  {
    internal::BinaryWriter s;
    s.put<uint64_t>(index.lexicon_fingerprint());
    section(out, "fingerprint", s.take());
  }
  {
    internal::BinaryWriter s;
    s.put<uint64_t>(index.entries().size());
    for (const auto &e : index.entries()) {
      s.put_string(e.term.text);
      s.put<uint32_t>(e.cui.value());
      s.put<uint8_t>(e.preferred ? 1 : 0);
    }
    section(out, "entries", s.take());
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f.write(out.data().data(), static_cast<std::streamsize>(out.data().size()));
  if (!f) throw Error("cannot write index cache " + path.string());
}

TermIndex load_index(const std::filesystem::path &path) {
  auto contents = internal::read_file(path);
  if (!contents) throw CorruptFile("cannot read index cache " + path.string());
  internal::BinaryReader in(*contents);
  if (in.remaining() < 4 || in.get_bytes(4) != "NLX1") {
    throw CorruptFile("bad magic in index cache " + path.string());
  }
  TermIndex index;
  bool have_entries = false;
  while (!in.done()) {
    std::string name = in.get_string();
    std::string payload = in.get_string();
    internal::BinaryReader s(payload);
    if (name == "lang") {
      index.lang_ = s.get_string();
    } else if (name == "fingerprint") {
      index.fingerprint_ = s.get<uint64_t>();
    } else if (name == "entries") {
      uint64_t n = s.get<uint64_t>();
      for (uint64_t i = 0; i < n; ++i) {
        std::string text = s.get_string();
        uint32_t cui = s.get<uint32_t>();
        bool preferred = s.get<uint8_t>() != 0;
        if (cui > kMaxConceptValue) throw CorruptFile("bad cui in index cache");
        index.add_entry(normalize_term(text), ConceptId(cui), preferred);
      }
      have_entries = true;
    }
    // Unknown sections are skipped.
  }
  if (!have_entries || index.lang_.empty()) {
    throw CorruptFile("incomplete index cache " + path.string());
  }
  index.finalize();
  return index;
}

}  // namespace normlex
