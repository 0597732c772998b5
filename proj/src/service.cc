#include "normlex/service.h"

#include <httplib.h>

#include <algorithm>
#include <json.hpp>
#include <set>

#include "normlex/errors.h"

namespace normlex {

using json = nlohmann::json;

NormalizationEngine::NormalizationEngine(std::shared_ptr<const Lexicon> lexicon,
                                         std::shared_ptr<const RelationGraph> relations,
                                         std::map<std::string, TermIndex> indexes,
                                         std::shared_ptr<const Translator> translator,
                                         EngineConfig cfg)
    : lexicon_(std::move(lexicon)),
      relations_(relations ? std::move(relations) : std::make_shared<const RelationGraph>()),
      indexes_(std::move(indexes)),
      translator_(std::move(translator)),
      cfg_(std::move(cfg)) {
  if (!lexicon_) throw Error("engine needs a lexicon");
  if (!indexes_.count("en")) throw UnknownLanguage("en");
  cfg_.fuzzy.validate();
}

std::vector<std::string> NormalizationEngine::languages() const {
  std::vector<std::string> out;
  for (const auto &[lang, index] : indexes_) out.push_back(lang);
  return out;
}

TermOutcome NormalizationEngine::normalize(std::string_view term, const std::string &lang,
                                           SearchLevel max_level) const {
  auto it = indexes_.find(lang);
  if (it == indexes_.end()) throw UnknownLanguage(lang);

  Mention mention;
  mention.doc_id = "term";
  mention.mention_id = "T1";
  mention.surface = std::string(term);
  mention.language = lang;
  CandidateResult result = search_mode_restricted(mention, it->second, indexes_.at("en"),
                                                  translator_.get(), cfg_.fuzzy, max_level);

  TermOutcome out;
  out.term = std::string(term);
  out.level = result.level;
  out.translated_query = result.translated_query;
  std::set<ConceptId> cuis;
  for (const Candidate &c : result.candidates) {
    cuis.insert(c.cui);
    if (std::find(out.matched_terms.begin(), out.matched_terms.end(), c.matched_term.text) ==
        out.matched_terms.end()) {
      out.matched_terms.push_back(c.matched_term.text);
    }
  }
  out.candidates.assign(cuis.begin(), cuis.end());
  auto preds = disambiguate_document({result}, *lexicon_, *relations_, cfg_.disambiguation);
  if (!preds.empty()) out.cui = preds.front().cui;
  return out;
}

namespace {

HttpReply error_reply(int status, const std::string &message) {
  return HttpReply{status, json{{"error", message}}.dump()};
}

json outcome_json(const TermOutcome &o) {
  json candidates = json::array();
  for (ConceptId c : o.candidates) candidates.push_back(c.str());
  json j{{"term", o.term},
         {"level", std::string(to_string(o.level))},
         {"cui", o.cui ? json(o.cui->str()) : json(nullptr)},
         {"candidates", std::move(candidates)},
         {"matched_terms", o.matched_terms}};
  j["translation"] = o.translated_query ? json(*o.translated_query) : json(nullptr);
  return j;
}

}  // namespace

HttpReply handle_normalize(const NormalizationEngine &engine, std::string_view body) {
  json request = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (request.is_discarded() || !request.is_object()) {
    return error_reply(400, "request body must be a JSON object");
  }
  auto terms = request.find("terms");
  if (terms == request.end() || !terms->is_array()) {
    return error_reply(400, "'terms' must be an array of strings");
  }
  for (const json &t : *terms) {
    if (!t.is_string()) return error_reply(400, "'terms' must be an array of strings");
  }
  auto lang = request.find("lang");
  if (lang == request.end() || !lang->is_string()) {
    return error_reply(400, "'lang' must be a string");
  }
  SearchLevel max_level = SearchLevel::kBTM;
  if (auto level = request.find("max_level"); level != request.end()) {
    std::optional<SearchLevel> parsed;
    if (level->is_string()) parsed = parse_search_level(level->get<std::string>());
    if (!parsed) return error_reply(400, "'max_level' must be one of ML, CL, BTM");
    max_level = *parsed;
  }
  const std::string language = lang->get<std::string>();
  if (!engine.supports(language)) return error_reply(422, "unknown language '" + language + "'");

  try {
    json out = json::array();
    for (const json &t : *terms) {
      out.push_back(outcome_json(engine.normalize(t.get<std::string>(), language, max_level)));
    }
    return HttpReply{200, out.dump()};
  } catch (const std::exception &) {
    return error_reply(500, "internal error");
  }
}

HttpReply handle_health() { return HttpReply{200, json{{"status", "ok"}}.dump()}; }

struct NormalizationServer::Impl {
  std::shared_ptr<const NormalizationEngine> engine;
  ServerOptions opts;
  httplib::Server server;
};

NormalizationServer::NormalizationServer(std::shared_ptr<const NormalizationEngine> engine,
                                         ServerOptions opts)
    : impl_(std::make_unique<Impl>()) {
  if (!engine) throw Error("server needs an engine");
  impl_->engine = std::move(engine);
  impl_->opts = std::move(opts);
  const std::size_t workers = std::max<std::size_t>(impl_->opts.workers, 1);
  impl_->server.new_task_queue = [workers] { return new httplib::ThreadPool(workers); };

  const NormalizationEngine *eng = impl_->engine.get();
  auto send = [](httplib::Response &res, const HttpReply &reply) {
    res.status = reply.status;
    res.set_content(reply.body, "application/json");
  };
  impl_->server.Post("/normalize", [eng, send](const httplib::Request &req, httplib::Response &res) {
    send(res, handle_normalize(*eng, req.body));
  });
  impl_->server.Get("/health", [send](const httplib::Request &, httplib::Response &res) {
    send(res, handle_health());
  });
  impl_->server.set_exception_handler(
      [send](const httplib::Request &, httplib::Response &res, std::exception_ptr) {
        send(res, error_reply(500, "internal error"));
      });
}

NormalizationServer::~NormalizationServer() { stop(); }

int NormalizationServer::bind() {
  const ServerOptions &o = impl_->opts;
  if (o.port == 0) {
    const int port = impl_->server.bind_to_any_port(o.host);
    if (port <= 0) throw Error("cannot bind " + o.host);
    return port;
  }
  if (!impl_->server.bind_to_port(o.host, o.port)) {
    throw Error("cannot bind " + o.host + ":" + std::to_string(o.port));
  }
  return o.port;
}

void NormalizationServer::serve() { impl_->server.listen_after_bind(); }

void NormalizationServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

void NormalizationServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace normlex
