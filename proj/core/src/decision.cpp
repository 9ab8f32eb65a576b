#include "acal/decision.hpp"

#include <algorithm>
#include <cctype>
#include <iomanip>
#include <sstream>

#include "acal/error.hpp"
#include "prompt_text.hpp"

namespace acal {

std::string_view to_string(Answer a) { return a == Answer::Yes ? "Yes" : "No"; }

std::string_view to_string(DecidedBy d) {
  switch (d) {
    case DecidedBy::Threshold: return "Threshold";
    case DecidedBy::FinalJudge: return "FinalJudge";
    case DecidedBy::HumanReview: return "HumanReview";
  }
  return "Threshold";
}

Answer threshold_answer(double strength, double threshold) {
  return strength >= threshold ? Answer::Yes : Answer::No;
}

void validate_params(const DecisionParams& p) {
  if (!(p.threshold > 0.0 && p.threshold < 1.0)) {
    throw Error(errc::kInvalidParams, "decision threshold must lie in (0,1)");
  }
  if (!(p.band_low >= 0.0 && p.band_low <= p.band_high && p.band_high <= 1.0)) {
    throw Error(errc::kInvalidParams, "escalation band must be a sub-interval of [0,1]");
  }
}

std::string summarize_for_judge(const QbafGraph& graph, const StrengthMap& strengths,
                                std::size_t max_arguments) {
  std::vector<const Argument*> ranked;
  for (const auto& a : graph.arguments) ranked.push_back(&a);
  std::stable_sort(ranked.begin(), ranked.end(), [&](const Argument* x, const Argument* y) {
    const double sx = strengths.at(x->id);
    const double sy = strengths.at(y->id);
    if (sx != sy) return sx > sy;
    return x->id < y->id;
  });
  if (ranked.size() > max_arguments) ranked.resize(max_arguments);

  std::ostringstream os;
  os << std::fixed << std::setprecision(3);
  os << "Propagated claim strength: " << strengths.claim() << "\n";
  os << "Strongest arguments:\n";
  for (const auto* a : ranked) {
    os << "- [" << a->id.str() << "] " << to_string(a->stance) << ", strength "
       << strengths.at(a->id) << ": " << a->text << "\n";
  }
  return os.str();
}

namespace {

Decision by_threshold(double strength, const DecisionParams& params) {
  Decision d;
  d.answer = threshold_answer(strength, params.threshold);
  d.claim_strength = strength;
  d.decided_by = DecidedBy::Threshold;
  return d;
}

}  // namespace

Decision decide(double strength, const DecisionParams& params, const LegalTask& task,
                TextModelBackend* judge, std::string_view case_summary) {
  if (!(strength >= 0.0 && strength <= 1.0)) {
    throw Error(errc::kStrengthRange, "claim strength outside [0,1]");
  }
  validate_params(params);
  if (!params.uae_enabled || !params.in_band(strength)) return by_threshold(strength, params);

  std::string failure;
  if (judge == nullptr) {
    failure = "no judge backend configured";
  } else {
    std::ostringstream os;
    os << kPromptVersion << " judge\n"
       << "You are the Final Judge. The argumentation outcome for this case is too close to "
          "call. Perform an independent legal analysis of the case: re-evaluate the evidence, "
          "apply the governing legal standard, and resolve the key conflicts between the "
          "arguments. Your decision is binding.\n";
    append_task(os, task);
    if (!case_summary.empty()) os << case_summary;
    os << "Reply with {\"answer\": \"Yes\"|\"No\", \"rationale\": string}.\n";
    try {
      const auto response = judge->complete(make_request(Purpose::Judge, os.str()));
      std::string answer = response.fields.at("answer").get<std::string>();
      std::transform(answer.begin(), answer.end(), answer.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      if (answer == "yes" || answer == "no") {
        Decision d;
        d.answer = answer == "yes" ? Answer::Yes : Answer::No;
        d.claim_strength = strength;
        d.escalated = true;
        d.decided_by = DecidedBy::FinalJudge;
        if (auto r = response.fields.find("rationale"); r != response.fields.end() && r->is_string()) {
          d.judge_rationale = r->get<std::string>();
        } else {
          d.judge_rationale = std::string{};
        }
        return d;
      }
      failure = "judge answered '" + answer + "'";
    } catch (const Error& e) {
      failure = e.what();
    }
  }
  Decision d = by_threshold(strength, params);
  d.warnings.push_back("final judge unavailable, threshold rule applied: " + failure);
  return d;
}

void to_json(nlohmann::json& j, const Answer& a) { j = std::string(to_string(a)); }

void from_json(const nlohmann::json& j, Answer& a) {
  const auto s = j.get<std::string>();
  if (s == "Yes") a = Answer::Yes;
  else if (s == "No") a = Answer::No;
  else throw Error(errc::kBadDocument, "unknown answer '" + s + "'");
}

void to_json(nlohmann::json& j, const DecidedBy& d) { j = std::string(to_string(d)); }

void from_json(const nlohmann::json& j, DecidedBy& d) {
  const auto s = j.get<std::string>();
  if (s == "Threshold") d = DecidedBy::Threshold;
  else if (s == "FinalJudge") d = DecidedBy::FinalJudge;
  else if (s == "HumanReview") d = DecidedBy::HumanReview;
  else throw Error(errc::kBadDocument, "unknown decided_by '" + s + "'");
}

void to_json(nlohmann::json& j, const DecisionParams& p) {
  j = nlohmann::json{{"threshold", p.threshold},
                     {"band", {p.band_low, p.band_high}},
                     {"uae_enabled", p.uae_enabled}};
}

void from_json(const nlohmann::json& j, DecisionParams& p) {
  p.threshold = j.value("threshold", p.threshold);
  if (auto b = j.find("band"); b != j.end()) {
    p.band_low = b->at(0).get<double>();
    p.band_high = b->at(1).get<double>();
  }
  p.uae_enabled = j.value("uae_enabled", p.uae_enabled);
}

void to_json(nlohmann::json& j, const Decision& d) {
  j = nlohmann::json{{"answer", d.answer},
                     {"claim_strength", d.claim_strength},
                     {"escalated", d.escalated},
                     {"judge_rationale", nullptr},
                     {"decided_by", d.decided_by},
                     {"warnings", d.warnings}};
  if (d.judge_rationale) j["judge_rationale"] = *d.judge_rationale;
}

void from_json(const nlohmann::json& j, Decision& d) {
  j.at("answer").get_to(d.answer);
  j.at("claim_strength").get_to(d.claim_strength);
  j.at("escalated").get_to(d.escalated);
  if (auto r = j.find("judge_rationale"); r != j.end() && !r->is_null()) {
    d.judge_rationale = r->get<std::string>();
  } else {
    d.judge_rationale.reset();
  }
  j.at("decided_by").get_to(d.decided_by);
  d.warnings = j.value("warnings", std::vector<std::string>{});
}

}  // namespace acal
