#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "acal/agents.hpp"
#include "acal/backend.hpp"
#include "acal/qbaf.hpp"

namespace acal {

struct ArenaParams {
  double delta = 0.2;   // clash gap threshold
  double beta = 0.15;   // base adjustment magnitude
  std::size_t max_concurrency = 1;

  friend bool operator==(const ArenaParams&, const ArenaParams&) = default;
};

/// A supporter/attacker pair whose base strengths differ by less than delta.
struct Clash {
  NodeId supporter;
  NodeId attacker;
  double score_gap = 0.0;

  friend bool operator==(const Clash&, const Clash&) = default;
};

enum class ClashWinner { Supporter, Attacker, Tie };

std::string_view to_string(ClashWinner w);

struct ClashOutcome {
  Clash clash;
  ClashWinner winner = ClashWinner::Tie;
  std::string rationale;
  std::vector<std::string> warnings;
};

/// All supporter x attacker pairs with |tau_s - tau_a| < delta, ordered by
/// (supporter id, attacker id).
std::vector<Clash> detect_clashes(const std::vector<Argument>& arguments, double delta);

/// Asks the backend which of the two arguments is stronger. An unusable
/// verdict becomes a Tie with a warning.
ClashOutcome adjudicate(const Clash& clash, const std::vector<Argument>& arguments,
                        const LegalTask& task, TextModelBackend& backend);

/// (wins + 0.5 ties) / participations. Throws ARENA_NO_PARTICIPATION.
double win_rate(const NodeId& argument, const std::vector<ClashOutcome>& outcomes);

/// clamp(tau + beta (2w - 1), 0.1, 1.0)
double adjust_strength(double tau, double w, double beta);

struct StrengthAdjustment {
  NodeId argument;
  std::size_t clashes = 0;
  std::size_t wins = 0;
  std::size_t ties = 0;
  double win_rate = 0.5;
  double before = 0.0;
  double after = 0.0;
};

struct ArenaResult {
  std::vector<Argument> arguments;
  std::vector<ClashOutcome> outcomes;
  std::vector<StrengthAdjustment> adjustments;  // one per participating argument
  std::vector<std::string> warnings;
};

/// One arena round: detect, adjudicate every clash, then adjust each
/// participant once from its aggregate win rate.
ArenaResult apply_clash_resolution(const std::vector<Argument>& arguments, const LegalTask& task,
                                   const ArenaParams& params, TextModelBackend& backend);

void to_json(nlohmann::json& j, const ArenaParams& p);
void from_json(const nlohmann::json& j, ArenaParams& p);
void to_json(nlohmann::json& j, const Clash& c);
void from_json(const nlohmann::json& j, Clash& c);
void to_json(nlohmann::json& j, const ClashWinner& w);
void from_json(const nlohmann::json& j, ClashWinner& w);
void to_json(nlohmann::json& j, const ClashOutcome& o);
void from_json(const nlohmann::json& j, ClashOutcome& o);
void to_json(nlohmann::json& j, const StrengthAdjustment& a);
void from_json(const nlohmann::json& j, StrengthAdjustment& a);
void to_json(nlohmann::json& j, const ArenaResult& r);

}  // namespace acal
