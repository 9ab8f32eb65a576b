#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "acal/agents.hpp"
#include "acal/backend.hpp"
#include "acal/qbaf.hpp"

namespace acal {

enum class Answer { Yes, No };
enum class DecidedBy { Threshold, FinalJudge, HumanReview };

std::string_view to_string(Answer a);
std::string_view to_string(DecidedBy d);

struct DecisionParams {
  double threshold = 0.5;
  double band_low = 0.49;   // escalation band, inclusive at both ends
  double band_high = 0.51;
  bool uae_enabled = true;

  bool in_band(double strength) const { return strength >= band_low && strength <= band_high; }

  friend bool operator==(const DecisionParams&, const DecisionParams&) = default;
};

struct Decision {
  Answer answer = Answer::No;
  double claim_strength = 0.0;
  bool escalated = false;
  std::optional<std::string> judge_rationale;
  DecidedBy decided_by = DecidedBy::Threshold;
  std::vector<std::string> warnings;

  friend bool operator==(const Decision&, const Decision&) = default;
};

/// Yes iff strength >= threshold.
Answer threshold_answer(double strength, double threshold);

/// Claim text plus the strongest arguments by propagated strength, used as
/// the judge's view of the graph.
std::string summarize_for_judge(const QbafGraph& graph, const StrengthMap& strengths,
                                std::size_t max_arguments = 6);

/// Threshold rule, except that with UAE enabled a strength inside the band is
/// sent to the Final Judge, whose answer is binding. A judge failure (or a
/// null backend) falls back to the threshold rule with a warning.
Decision decide(double strength, const DecisionParams& params, const LegalTask& task,
                TextModelBackend* judge, std::string_view case_summary = {});

void validate_params(const DecisionParams& params);

void to_json(nlohmann::json& j, const Answer& a);
void from_json(const nlohmann::json& j, Answer& a);
void to_json(nlohmann::json& j, const DecidedBy& d);
void from_json(const nlohmann::json& j, DecidedBy& d);
void to_json(nlohmann::json& j, const DecisionParams& p);
void from_json(const nlohmann::json& j, DecisionParams& p);
void to_json(nlohmann::json& j, const Decision& d);
void from_json(const nlohmann::json& j, Decision& d);

}  // namespace acal
