#pragma once

#include <memory>
#include <string>

#include "acal/config.hpp"
#include "acal/pipeline.hpp"
#include "acal/store.hpp"

namespace acal {

/// Status code for an error code: 404 for unknown ids, 409 for conflicts,
/// 400 for malformed documents, 422 for rejected edits, 502 when a backend
/// is unreachable, 500 otherwise.
int http_status_for(const std::string& code);

/// JSON API under /v1. Requests may carry an X-Actor header; it is used as
/// the actor of edits that do not name one.
///
///   GET  /v1/health
///   GET  /v1/cases                                   POST /v1/cases
///   GET  /v1/cases/{id}[/graph|/strengths|/decision|/dashboard]
///   GET  /v1/cases/{id}/cards/{argument}
///   POST /v1/cases/{id}/sessions                     GET /v1/cases/{id}/sessions/{sid}
///   POST .../sessions/{sid}/edits                    POST .../sessions/{sid}/preview
///   POST .../sessions/{sid}/contestations            GET  .../sessions/{sid}/proposals
///   POST .../sessions/{sid}/proposals/{pid}/accept   POST .../proposals/{pid}/reject
///   GET  .../sessions/{sid}/audit[?format=jsonl]     GET  .../sessions/{sid}/decision
///   GET  .../sessions/{sid}/cards/{argument}
class Service {
 public:
  Service(CaseStore& store, PipelineConfig config, PipelineResources resources);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Blocks until stop().
  bool listen(const std::string& host, int port);
  /// Binds an ephemeral port and returns it; follow with listen_after_bind().
  int bind_to_any_port(const std::string& host);
  bool bind(const std::string& host, int port);
  bool listen_after_bind();
  void stop();
  bool is_running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace acal
