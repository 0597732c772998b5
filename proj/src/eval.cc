#include "normlex/eval.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <exception>
#include <map>
#include <thread>

#include "file_util.h"
#include "normlex/errors.h"
#include "normlex/text.h"

namespace normlex {

namespace {

bool parse_offset(std::string_view s, std::size_t *out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), *out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::vector<std::string_view> split_spaces(std::string_view s) {
  std::vector<std::string_view> out;
  for (std::string_view f : text::split(s, ' ')) {
    if (!f.empty()) out.push_back(f);
  }
  return out;
}

}  // namespace

GoldDocument parse_gold_standoff(std::string_view ann, std::string text, std::string doc_id,
                                 const std::string &ann_name) {
  GoldDocument doc;
  doc.doc_id = std::move(doc_id);
  doc.text = std::move(text);

  struct TextBound {
    std::size_t line_no;
    GoldMention mention;
  };
  std::map<std::string, TextBound> textbounds;
  std::vector<std::string> order;
  struct NormLine {
    std::size_t line_no;
    std::string target;
    ConceptId cui;
  };
  std::vector<NormLine> norms;

  internal::for_each_line(ann, [&](std::size_t line_no, std::string_view line) {
    if (text::trim(line).empty()) return;
    auto fail = [&](const std::string &reason) { throw ParseError(ann_name, line_no, reason); };
    if (line.front() == 'T') {
      auto fields = text::split(line, '\t');
      if (fields.size() < 3) fail("text-bound annotation needs 3 tab-separated fields");
      const std::string id(fields[0]);
      std::string_view type_spans = fields[1];
      const std::size_t space = type_spans.find(' ');
      if (space == std::string_view::npos) fail("missing offsets");
      GoldMention gm;
      gm.type = std::string(type_spans.substr(0, space));
      std::string joined;
      std::size_t prev_end = 0;
      for (std::string_view frag : text::split(type_spans.substr(space + 1), ';')) {
        auto parts = split_spaces(frag);
        Span span;
        if (parts.size() != 2 || !parse_offset(parts[0], &span.start) ||
            !parse_offset(parts[1], &span.end)) {
          fail("bad span '" + std::string(frag) + "'");
        }
        if (span.start >= span.end) fail("empty or inverted span");
        if (!gm.mention.spans.empty() && span.start < prev_end) fail("overlapping or unordered spans");
        if (span.end > doc.text.size()) {
          throw OffsetMismatch(ann_name, line_no, "span end beyond text length");
        }
        prev_end = span.end;
        if (!joined.empty()) joined.push_back(' ');
        joined.append(doc.text, span.start, span.end - span.start);
        gm.mention.spans.push_back(span);
      }
      if (joined != fields[2]) {
        throw OffsetMismatch(ann_name, line_no,
                             "surface '" + std::string(fields[2]) + "' does not match text '" +
                                 joined + "'");
      }
      gm.mention.doc_id = doc.doc_id;
      gm.mention.mention_id = id;
      gm.mention.surface = std::move(joined);
      if (textbounds.count(id)) fail("duplicate annotation id " + id);
      order.push_back(id);
      textbounds.emplace(id, TextBound{line_no, std::move(gm)});
    } else if (line.front() == 'N') {
      auto fields = text::split(line, '\t');
      if (fields.size() < 2) fail("normalization needs at least 2 tab-separated fields");
      auto parts = split_spaces(fields[1]);
      if (parts.size() != 3 || parts[0] != "Reference") fail("expected 'Reference T<id> <db>:<cui>'");
      const std::size_t colon = parts[2].rfind(':');
      if (colon == std::string_view::npos) fail("missing '<db>:' prefix before cui");
      auto cui = ConceptId::parse(parts[2].substr(colon + 1));
      if (!cui) fail("bad cui '" + std::string(parts[2].substr(colon + 1)) + "'");
      norms.push_back(NormLine{line_no, std::string(parts[1]), *cui});
    }
  });

  for (const NormLine &n : norms) {
    auto it = textbounds.find(n.target);
    if (it == textbounds.end()) {
      throw ParseError(ann_name, n.line_no, "reference to unknown annotation " + n.target);
    }
    it->second.mention.gold_cuis.insert(n.cui);
  }
  for (const std::string &id : order) {
    GoldMention &gm = textbounds.at(id).mention;
    if (gm.gold_cuis.empty()) {
      ++doc.unnormalized;
      continue;
    }
    doc.mentions.push_back(std::move(gm));
  }
  return doc;
}

GoldDocument read_gold_standoff(const std::filesystem::path &ann_path,
                                const std::filesystem::path &txt_path) {
  auto ann = internal::read_file(ann_path);
  if (!ann) throw CorpusError("cannot read annotation file " + ann_path.string());
  auto txt = internal::read_file(txt_path);
  if (!txt) throw CorpusError("cannot read text file " + txt_path.string());
  return parse_gold_standoff(*ann, std::move(*txt), ann_path.stem().string(), ann_path.string());
}

Metrics Metrics::from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  Metrics m;
  m.tp = tp;
  m.fp = fp;
  m.fn = fn;
  m.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  m.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  m.f1 = m.precision + m.recall == 0.0
             ? 0.0
             : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

Metrics score(const std::vector<GoldDocument> &gold, const std::vector<Prediction> &preds) {
  using Key = std::pair<std::string, std::string>;
  std::map<Key, const std::set<ConceptId> *> gold_sets;
  for (const GoldDocument &doc : gold) {
    for (const GoldMention &gm : doc.mentions) {
      gold_sets[{doc.doc_id, gm.mention.mention_id}] = &gm.gold_cuis;
    }
  }
  std::map<Key, std::set<ConceptId>> predicted;
  for (const Prediction &p : preds) {
    Key key{p.doc_id, p.mention_id};
    if (!gold_sets.count(key)) {
      throw UnknownMention("prediction for unknown mention " + p.doc_id + "/" + p.mention_id);
    }
    predicted[key].insert(p.cui);
  }
  std::size_t tp = 0, fp = 0, fn = 0;
  for (const auto &[key, gold_cuis] : gold_sets) {
    auto it = predicted.find(key);
    const std::set<ConceptId> empty;
    const std::set<ConceptId> &pred = it == predicted.end() ? empty : it->second;
    for (ConceptId c : pred) (gold_cuis->count(c) ? tp : fp) += 1;
    for (ConceptId c : *gold_cuis) {
      if (!pred.count(c)) ++fn;
    }
  }
  return Metrics::from_counts(tp, fp, fn);
}

std::vector<GoldDocument> load_corpus(const std::filesystem::path &dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw CorpusError("corpus directory not found: " + dir.string());
  }
  const auto manifest_path = dir / "manifest.tsv";
  auto manifest = internal::read_file(manifest_path);
  if (!manifest) throw CorpusError("missing manifest.tsv in " + dir.string());

  std::vector<CorpusEntry> entries;
  internal::for_each_line(*manifest, [&](std::size_t line_no, std::string_view line) {
    std::string_view trimmed = text::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') return;
    auto fields = text::split(line, '\t');
    if (fields.size() != 3) {
      throw ParseError(manifest_path.string(), line_no, "expected name<TAB>subcorpus<TAB>lang");
    }
    std::string name(text::trim(fields[0]));
    for (std::string_view ext : {".txt", ".ann"}) {
      if (name.size() > ext.size() && name.ends_with(ext)) name.resize(name.size() - ext.size());
    }
    entries.push_back({name, std::string(text::trim(fields[1])), std::string(text::trim(fields[2]))});
  });
  if (entries.empty()) throw CorpusError("empty corpus: " + manifest_path.string());

  std::vector<GoldDocument> docs;
  for (const CorpusEntry &e : entries) {
    GoldDocument doc = read_gold_standoff(dir / (e.name + ".ann"), dir / (e.name + ".txt"));
    doc.subcorpus = e.subcorpus;
    doc.language = e.language;
    for (GoldMention &gm : doc.mentions) gm.mention.language = e.language;
    docs.push_back(std::move(doc));
  }
  return docs;
}

namespace {

struct DocumentOutcome {
  std::vector<Prediction> preds;
  std::array<std::size_t, 3> resolved{};
};

DocumentOutcome run_document(const GoldDocument &doc, const TermIndex &target,
                             const TermIndex &english, const Lexicon &lexicon,
                             const RelationGraph &relations, const Translator *translator,
                             const EvalConfig &cfg, SearchLevel method) {
  DocumentOutcome out;
  std::vector<CandidateResult> results;
  results.reserve(doc.mentions.size());
  for (const GoldMention &gm : doc.mentions) {
    results.push_back(
        search_mode_restricted(gm.mention, target, english, translator, cfg.fuzzy, method));
    const SearchLevel level = results.back().level;
    if (level != SearchLevel::kNone) ++out.resolved[static_cast<int>(level)];
  }
  out.preds = disambiguate_document(results, lexicon, relations, cfg.disambiguation);
  return out;
}

}  // namespace

EvaluationReport evaluate_documents(const std::vector<GoldDocument> &docs,
                                    const Lexicon &lexicon, const RelationGraph &relations,
                                    const Translator *translator, const EvalConfig &cfg) {
  // Indexes are built up front so the workers only read shared state.
  std::map<std::string, TermIndex> indexes;
  indexes.emplace("en", build_index(lexicon, "en"));
  for (const GoldDocument &doc : docs) {
    if (!indexes.count(doc.language)) indexes.emplace(doc.language, build_index(lexicon, doc.language));
  }
  const TermIndex &english = indexes.at("en");

  std::vector<std::string> subcorpora;
  for (const GoldDocument &doc : docs) {
    if (std::find(subcorpora.begin(), subcorpora.end(), doc.subcorpus) == subcorpora.end()) {
      subcorpora.push_back(doc.subcorpus);
    }
  }

  EvaluationReport report;
  for (SearchLevel method : {SearchLevel::kML, SearchLevel::kCL, SearchLevel::kBTM}) {
    std::vector<DocumentOutcome> outcomes(docs.size());
    std::vector<std::exception_ptr> errors(docs.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (std::size_t i = next++; i < docs.size(); i = next++) {
        try {
          outcomes[i] = run_document(docs[i], indexes.at(docs[i].language), english, lexicon,
                                     relations, translator, cfg, method);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    const std::size_t workers = std::clamp<std::size_t>(cfg.workers, 1, std::max<std::size_t>(docs.size(), 1));
    if (workers == 1) {
      work();
    } else {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    for (const std::exception_ptr &e : errors) {
      if (e) std::rethrow_exception(e);
    }

    for (const std::string &sub : subcorpora) {
      ReportRow row;
      row.method = method;
      row.subcorpus = sub;
      std::vector<GoldDocument> gold;
      std::vector<Prediction> preds;
      for (std::size_t i = 0; i < docs.size(); ++i) {
        if (docs[i].subcorpus != sub) continue;
        for (int l = 0; l < 3; ++l) row.resolved[l] += outcomes[i].resolved[l];
        preds.insert(preds.end(), outcomes[i].preds.begin(), outcomes[i].preds.end());
        gold.push_back(docs[i]);
      }
      row.metrics = score(gold, preds);
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

EvaluationReport run_evaluation(const std::filesystem::path &corpus_dir, const Lexicon &lexicon,
                                const RelationGraph &relations, const Translator *translator,
                                const EvalConfig &cfg) {
  std::vector<GoldDocument> docs = load_corpus(corpus_dir);
  try {
    return evaluate_documents(docs, lexicon, relations, translator, cfg);
  } catch (const UnknownLanguage &e) {
    throw CorpusError(corpus_dir.string() + ": corpus language '" + e.lang() +
                      "' has no terms in the lexicon");
  }
}

namespace {

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace

void write_report_tsv(const EvaluationReport &report, std::ostream &out) {
  out << "method\tsubcorpus\tP\tR\tF1\tresolved_ML\tresolved_CL\tresolved_BTM\n";
  for (const ReportRow &r : report.rows) {
    out << to_string(r.method) << '\t' << r.subcorpus << '\t' << fixed4(r.metrics.precision)
        << '\t' << fixed4(r.metrics.recall) << '\t' << fixed4(r.metrics.f1) << '\t'
        << r.resolved[0] << '\t' << r.resolved[1] << '\t' << r.resolved[2] << '\n';
  }
}

void print_report_table(const EvaluationReport &report, std::ostream &out) {
  std::vector<std::string> subcorpora;
  for (const ReportRow &r : report.rows) {
    if (std::find(subcorpora.begin(), subcorpora.end(), r.subcorpus) == subcorpora.end()) {
      subcorpora.push_back(r.subcorpus);
    }
  }
  char buf[64];
  out << "        ";
  for (const std::string &s : subcorpora) {
    std::snprintf(buf, sizeof(buf), "| %-22s ", s.c_str());
    out << buf;
  }
  out << "\nMethod  ";
  for (std::size_t i = 0; i < subcorpora.size(); ++i) out << "|   P      R      F1     ";
  out << '\n';
  for (SearchLevel method : {SearchLevel::kML, SearchLevel::kCL, SearchLevel::kBTM}) {
    std::snprintf(buf, sizeof(buf), "%-8s", std::string(to_string(method)).c_str());
    out << buf;
    for (const std::string &s : subcorpora) {
      for (const ReportRow &r : report.rows) {
        if (r.method != method || r.subcorpus != s) continue;
        std::snprintf(buf, sizeof(buf), "| %.3f  %.3f  %.3f  ", r.metrics.precision,
                      r.metrics.recall, r.metrics.f1);
        out << buf;
      }
    }
    out << '\n';
  }
}

}  // namespace normlex
