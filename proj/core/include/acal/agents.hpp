#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "acal/backend.hpp"
#include "acal/qbaf.hpp"
#include "acal/retrieval.hpp"

namespace acal {

enum class AgentCategory {
  Adjudication,
  LitigationAdvocacy,
  AdvisoryTransactional,
  ResearchSupport,
};

std::string_view to_string(AgentCategory c);

struct AgentProfile {
  std::string role;
  std::vector<std::string> expertise_areas;
  std::vector<std::string> focus_priorities;  // highest priority first
  std::string argument_style;

  friend bool operator==(const AgentProfile&, const AgentProfile&) = default;
};

class AgentPool {
 public:
  struct Entry {
    AgentProfile profile;
    AgentCategory category;
  };

  AgentPool() = default;
  /// Throws on duplicate roles or empty expertise.
  explicit AgentPool(std::vector<Entry> entries);

  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const AgentProfile* find(std::string_view role) const;
  std::vector<std::string> roles_in(AgentCategory category) const;

 private:
  std::vector<Entry> entries_;
};

/// The ten legal roles in four functional categories.
AgentPool default_pool();

struct LegalTask {
  std::string task_id;
  std::string claim;
  EvidenceContext context;
  std::map<std::string, std::string> metadata;

  friend bool operator==(const LegalTask&, const LegalTask&) = default;
};

/// Roles used when the selector returns nobody.
std::vector<std::string> fallback_roles(Stance stance);

struct TeamSelection {
  Stance stance = Stance::Support;
  std::vector<AgentProfile> team;  // sorted by role
  bool used_fallback = false;
};

/// Asks the backend which pool members suit the stance for this case.
/// Unknown role names raise AGENT_UNKNOWN_ROLE.
TeamSelection select_team(const AgentPool& pool, const LegalTask& task, Stance stance,
                          TextModelBackend& backend);

inline constexpr std::size_t kMaxArgumentsPerAgent = 5;

struct GenerationResult {
  std::vector<Argument> arguments;
  std::vector<std::string> warnings;
};

/// 1-5 arguments stamped with the agent's role and requested stance. Ids are
/// "<role-slug>.<s|a><n>". Evidence refs not present in the task context are
/// dropped with a warning.
GenerationResult generate_arguments(const AgentProfile& agent, const LegalTask& task, Stance stance,
                                    TextModelBackend& backend);

inline constexpr double kRubricFloor = 0.1;
inline constexpr double kRubricCeiling = 1.0;

/// The five scoring bands, embedded verbatim in every scoring prompt.
std::string_view scoring_rubric();

struct ScoreResult {
  double value = 0.0;
  bool clamped = false;
  std::vector<std::string> warnings;
};

ScoreResult score_argument(const Argument& argument, const LegalTask& task,
                           TextModelBackend& backend);

std::string role_slug(std::string_view role);

void to_json(nlohmann::json& j, const AgentProfile& p);
void from_json(const nlohmann::json& j, AgentProfile& p);
void to_json(nlohmann::json& j, const LegalTask& t);
void from_json(const nlohmann::json& j, LegalTask& t);
void to_json(nlohmann::json& j, const TeamSelection& s);

}  // namespace acal
