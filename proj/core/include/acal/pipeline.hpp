#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "acal/agents.hpp"
#include "acal/config.hpp"
#include "acal/decision.hpp"
#include "acal/error.hpp"
#include "acal/qbaf.hpp"
#include "acal/retrieval.hpp"

namespace acal {

/// Stage names in pipeline order. clash_resolution is absent when disabled.
namespace stage {
inline constexpr std::string_view kRetrieval = "retrieval";
inline constexpr std::string_view kTeamSelection = "team_selection";
inline constexpr std::string_view kGeneration = "generation";
inline constexpr std::string_view kScoring = "scoring";
inline constexpr std::string_view kRelations = "relations";
inline constexpr std::string_view kClashResolution = "clash_resolution";
inline constexpr std::string_view kGraphConstruction = "graph_construction";
inline constexpr std::string_view kSolver = "solver";
inline constexpr std::string_view kDecision = "decision";
}  // namespace stage

struct StageEntry {
  std::string stage;
  nlohmann::json details = nlohmann::json::object();
  std::vector<std::string> warnings;

  friend bool operator==(const StageEntry&, const StageEntry&) = default;
};

/// What a caller submits for one case.
struct TaskInput {
  std::string task_id;
  std::string claim;
  std::map<std::string, std::string> metadata;
  // Passages supplied with the case; stored as UserSubmitted.
  std::vector<EvidencePassage> passages;

  friend bool operator==(const TaskInput&, const TaskInput&) = default;
};

struct CaseRecord {
  std::string case_id;
  LegalTask task;
  QbafGraph graph;
  StrengthMap strengths;
  Decision decision;
  std::vector<StageEntry> trace;
  std::string created_at;  // the only field excluded from canonical_form
  PipelineConfig config;

  const StageEntry* find_stage(std::string_view name) const;
};

/// Aborts run_case when a backend is unreachable (or a fixture is missing)
/// in a stage that cannot degrade.
class PipelineError : public Error {
 public:
  PipelineError(std::string stage, const Error& cause)
      : Error(cause.code(), "[" + stage + "] " + cause.what()), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

struct PipelineResources {
  std::shared_ptr<TextModelBackend> backend;
  std::shared_ptr<const CorpusIndex> corpus;  // null: no local corpus
  std::shared_ptr<const WebSearch> web;       // null: no web search
  AgentPool pool = default_pool();
};

/// Backend from the config's spec and routes, corpus from corpus_dir.
PipelineResources make_resources(const PipelineConfig& config);

/// "case-" + 12 hex digits of SHA-256 over the input and config documents.
std::string case_id_for(const TaskInput& input, const PipelineConfig& config);

using Clock = std::function<std::string()>;

/// ISO-8601 UTC, second resolution.
std::string utc_now();

CaseRecord run_case(const TaskInput& input, const PipelineConfig& config,
                    const PipelineResources& resources, const Clock& clock = utc_now);

/// The record document without created_at.
nlohmann::json canonical_form(const CaseRecord& record);

void to_json(nlohmann::json& j, const StageEntry& s);
void from_json(const nlohmann::json& j, StageEntry& s);
void to_json(nlohmann::json& j, const TaskInput& t);
void from_json(const nlohmann::json& j, TaskInput& t);
void to_json(nlohmann::json& j, const CaseRecord& r);
void from_json(const nlohmann::json& j, CaseRecord& r);

}  // namespace acal
