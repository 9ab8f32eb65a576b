#include "acal/service.hpp"

#include <functional>

#include <httplib.h>

#include "acal/contestation.hpp"
#include "acal/document.hpp"
#include "acal/error.hpp"

namespace acal {

int http_status_for(const std::string& code) {
  if (code == errc::kCaseNotFound || code == errc::kSessionNotFound ||
      code == errc::kProposalNotFound || code == errc::kUnknownNode) {
    return 404;
  }
  if (code == errc::kCaseConflict) return 409;
  if (code == errc::kBadDocument || code == errc::kConfig || code == errc::kInvalidParams ||
      code == errc::kEmptyText || code == errc::kDuplicatePassage) {
    return 400;
  }
  if (code.starts_with("EDIT_")) return 422;
  if (code == errc::kBackendUnavailable || code == errc::kFixtureMissing) return 502;
  return 500;
}

struct Service::Impl {
  CaseStore& store;
  PipelineConfig config;
  PipelineResources resources;
  httplib::Server server;

  using Handler = std::function<nlohmann::json(const httplib::Request&, httplib::Response&)>;

  Impl(CaseStore& s, PipelineConfig c, PipelineResources r)
      : store(s), config(std::move(c)), resources(std::move(r)) {
    routes();
  }

  static void send(httplib::Response& res, int status, const nlohmann::json& body) {
    res.status = status;
    res.set_content(to_document(body), "application/json");
  }

  // Wraps a handler: JSON in the 2xx body, {code, message} otherwise.
  httplib::Server::Handler wrap(Handler h, int ok_status = 200) {
    return [h = std::move(h), ok_status](const httplib::Request& req, httplib::Response& res) {
      try {
        auto body = h(req, res);
        if (!res.body.empty()) return;  // handler wrote a non-JSON body
        send(res, ok_status, body);
      } catch (const Error& e) {
        send(res, http_status_for(e.code()), {{"code", e.code()}, {"message", e.what()}});
      } catch (const nlohmann::json::exception& e) {
        send(res, 400, {{"code", errc::kBadDocument}, {"message", e.what()}});
      } catch (const std::exception& e) {
        send(res, 500, {{"code", "INTERNAL"}, {"message", e.what()}});
      }
    };
  }

  static nlohmann::json body_of(const httplib::Request& req) {
    if (req.body.empty()) return nlohmann::json::object();
    return parse_document(req.body);
  }

  static std::string actor_of(const httplib::Request& req, const nlohmann::json& body) {
    if (auto it = body.find("actor"); it != body.end() && it->is_string() && !it->empty()) {
      return it->get<std::string>();
    }
    const auto h = req.get_header_value("X-Actor");
    return h.empty() ? "anonymous" : h;
  }

  template <typename F>
  nlohmann::json with_session(const httplib::Request& req, bool write, F&& f) {
    const std::string case_id = req.matches[1];
    const std::string sid = req.matches[2];
    std::unique_lock guard(store.lock_for(case_id), std::defer_lock);
    if (write) guard.lock();
    auto session = store.load_session(case_id, sid);
    auto out = f(session);
    if (write) store.save_session(session);
    return out;
  }

  static nlohmann::json session_view(const ContestationSession& s) {
    auto j = s.state_document();
    j["claim_strength"] = s.strengths().claim();
    return j;
  }

  nlohmann::json edit_result(const ContestationSession& s, const AuditEntry& e) {
    return {{"entry", e},
            {"claim_strength", s.strengths().claim()},
            {"strengths", s.strengths()},
            {"decision", s.decision()},
            {"review_required", s.review_required()}};
  }

  void routes() {
    const std::string c = R"(/v1/cases/([A-Za-z0-9._-]+))";
    const std::string s = c + R"(/sessions/([A-Za-z0-9._-]+))";

    server.Get("/v1/health", wrap([](auto&, auto&) { return nlohmann::json{{"status", "ok"}}; }));

    server.Get("/v1/cases", wrap([this](auto&, auto&) { return nlohmann::json{{"cases", store.list()}}; }));

    server.Post("/v1/cases", wrap([this](const httplib::Request& req, httplib::Response& res) {
      auto body = body_of(req);
      const auto overrides = body.contains("config") ? body["config"] : nlohmann::json(nullptr);
      body.erase("config");
      const auto input = document_as<TaskInput>(body);
      const PipelineConfig cfg = merge_config(config, overrides);
      const bool own_resources =
          overrides.is_object() && (overrides.contains("backend") || overrides.contains("routes") ||
                                    overrides.contains("corpus_dir") || overrides.contains("chunking"));
      const PipelineResources res_for_case = own_resources ? make_resources(cfg) : resources;
      auto record = run_case(input, cfg, res_for_case);
      const auto put = store.put(record);
      if (put == CaseStore::PutResult::Existing) record = store.get(record.case_id);
      res.status = put == CaseStore::PutResult::Created ? 201 : 200;
      send(res, res.status,
           {{"case_id", record.case_id},
            {"created", put == CaseStore::PutResult::Created},
            {"claim_strength", record.strengths.claim()},
            {"decision", record.decision}});
      return nlohmann::json{};
    }));

    server.Get(c, wrap([this](const httplib::Request& req, auto&) {
      return nlohmann::json(store.get(req.matches[1]));
    }));
    server.Get(c + "/graph", wrap([this](const httplib::Request& req, auto&) {
      return nlohmann::json(store.get(req.matches[1]).graph);
    }));
    server.Get(c + "/strengths", wrap([this](const httplib::Request& req, auto&) {
      return nlohmann::json(store.get(req.matches[1]).strengths);
    }));
    server.Get(c + "/decision", wrap([this](const httplib::Request& req, auto&) {
      return nlohmann::json(store.get(req.matches[1]).decision);
    }));
    server.Get(c + "/dashboard", wrap([this](const httplib::Request& req, auto&) {
      return dashboard(store.get(req.matches[1]));
    }));
    server.Get(c + R"(/cards/([A-Za-z0-9._-]+))", wrap([this](const httplib::Request& req, auto&) {
      return nlohmann::json(argument_card(store.get(req.matches[1]), NodeId{req.matches[2]}));
    }));

    server.Post(c + "/sessions", wrap([this](const httplib::Request& req, httplib::Response& res) {
      auto session = store.open_session(req.matches[1]);
      send(res, 201, session_view(session));
      return nlohmann::json{};
    }));
    server.Get(s, wrap([this](const httplib::Request& req, auto&) {
      return with_session(req, false, [](ContestationSession& ss) { return session_view(ss); });
    }));
    server.Post(s + "/edits", wrap([this](const httplib::Request& req, auto&) {
      const auto body = body_of(req);
      auto op = document_as<EditOp>(body);
      op.actor = actor_of(req, body);
      return with_session(req, true, [&](ContestationSession& ss) {
        const auto& entry = ss.apply(op, resources.backend.get());
        return edit_result(ss, entry);
      });
    }));
    server.Post(s + "/preview", wrap([this](const httplib::Request& req, auto&) {
      const auto body = body_of(req);
      auto op = document_as<EditOp>(body);
      op.actor = actor_of(req, body);
      return with_session(req, false, [&](ContestationSession& ss) {
        return nlohmann::json(ss.preview(op, resources.backend.get()));
      });
    }));
    server.Post(s + "/contestations", wrap([this](const httplib::Request& req, auto&) {
      const auto body = body_of(req);
      const auto type = document_as<ContestationType>(body.at("type"));
      const auto claim = body.value("claim", std::string{});
      const auto materials = body.value("materials", std::vector<std::string>{});
      const auto actor = actor_of(req, body);
      return with_session(req, true, [&](ContestationSession& ss) {
        auto r = ss.contest(type, claim, materials, actor, *resources.backend);
        return nlohmann::json{{"proposals", r.proposals}, {"warnings", r.warnings}};
      });
    }));
    server.Get(s + "/proposals", wrap([this](const httplib::Request& req, auto&) {
      return with_session(req, false, [](ContestationSession& ss) {
        return nlohmann::json{{"proposals", ss.pending_proposals()}};
      });
    }));
    server.Post(s + R"(/proposals/([A-Za-z0-9]+)/accept)", wrap([this](const httplib::Request& req, auto&) {
      const std::string pid = req.matches[3];
      const auto actor = actor_of(req, body_of(req));
      return with_session(req, true, [&](ContestationSession& ss) {
        const auto& entry = ss.accept_proposal(pid, actor, resources.backend.get());
        return edit_result(ss, entry);
      });
    }));
    server.Post(s + R"(/proposals/([A-Za-z0-9]+)/reject)", wrap([this](const httplib::Request& req, auto&) {
      const std::string pid = req.matches[3];
      return with_session(req, true, [&](ContestationSession& ss) {
        ss.reject_proposal(pid);
        return nlohmann::json{{"id", pid}, {"status", ProposalStatus::Rejected}};
      });
    }));
    server.Get(s + "/audit", wrap([this](const httplib::Request& req, httplib::Response& res) {
      return with_session(req, false, [&](ContestationSession& ss) {
        if (req.get_param_value("format") == "jsonl") {
          res.status = 200;
          res.set_content(audit_to_jsonl(ss.audit_log()), "application/x-ndjson");
          return nlohmann::json{};
        }
        return nlohmann::json{{"entries", ss.audit_log()}};
      });
    }));
    server.Get(s + "/decision", wrap([this](const httplib::Request& req, auto&) {
      return with_session(req, false, [](ContestationSession& ss) {
        return nlohmann::json{{"claim_strength", ss.strengths().claim()},
                              {"base_claim_strength", ss.base().strengths.claim()},
                              {"decision", ss.decision()},
                              {"review_required", ss.review_required()},
                              {"strengths", ss.strengths()}};
      });
    }));
    server.Get(s + R"(/cards/([A-Za-z0-9._-]+))", wrap([this](const httplib::Request& req, auto&) {
      const NodeId id{req.matches[3]};
      return with_session(req, false, [&](ContestationSession& ss) { return nlohmann::json(ss.card(id)); });
    }));

    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (res.body.empty() && res.status == 404) {
        send(res, 404, {{"code", "NOT_FOUND"}, {"message", "no such endpoint"}});
      }
    });
  }
};

Service::Service(CaseStore& store, PipelineConfig config, PipelineResources resources)
    : impl_(std::make_unique<Impl>(store, std::move(config), std::move(resources))) {}

Service::~Service() { stop(); }

bool Service::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }
int Service::bind_to_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }
bool Service::bind(const std::string& host, int port) { return impl_->server.bind_to_port(host, port); }
bool Service::listen_after_bind() { return impl_->server.listen_after_bind(); }
void Service::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}
bool Service::is_running() const { return impl_->server.is_running(); }

}  // namespace acal
