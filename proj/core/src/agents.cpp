#include "acal/agents.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include "acal/error.hpp"
#include "prompt_text.hpp"

namespace acal {

std::string_view to_string(AgentCategory c) {
  switch (c) {
    case AgentCategory::Adjudication: return "Adjudication";
    case AgentCategory::LitigationAdvocacy: return "Litigation & Advocacy";
    case AgentCategory::AdvisoryTransactional: return "Advisory & Transactional";
    case AgentCategory::ResearchSupport: return "Research & Support";
  }
  return "Research & Support";
}

AgentPool::AgentPool(std::vector<Entry> entries) : entries_(std::move(entries)) {
  std::set<std::string> roles;
  for (const auto& e : entries_) {
    if (!roles.insert(e.profile.role).second) {
      throw Error(errc::kInvalidParams, "duplicate role '" + e.profile.role + "' in agent pool");
    }
    if (e.profile.expertise_areas.empty()) {
      throw Error(errc::kInvalidParams, "role '" + e.profile.role + "' has no expertise areas");
    }
  }
}

const AgentProfile* AgentPool::find(std::string_view role) const {
  for (const auto& e : entries_) {
    if (e.profile.role == role) return &e.profile;
  }
  return nullptr;
}

std::vector<std::string> AgentPool::roles_in(AgentCategory category) const {
  std::vector<std::string> out;
  for (const auto& e : entries_) {
    if (e.category == category) out.push_back(e.profile.role);
  }
  return out;
}

AgentPool default_pool() {
  using C = AgentCategory;
  std::vector<AgentPool::Entry> entries = {
      {{"Judge",
        {"evidence law", "procedural rules", "constitutional law", "judicial reasoning"},
        {"apply the governing legal test faithfully", "weigh both sides impartially",
         "identify the dispositive issue"},
        "Measured and impartial; states the rule, applies it to the facts, reaches a holding"},
       C::Adjudication},
      {{"Law Clerk / Judicial Clerk",
        {"legal research", "precedent analysis", "evidence law", "opinion drafting"},
        {"locate controlling authority", "test each element against the record",
         "flag gaps in the reasoning"},
        "Thorough and citation-driven; builds element-by-element memoranda"},
       C::Adjudication},
      {{"Private Practice Lawyer",
        {"civil litigation", "contract disputes", "torts", "client advocacy"},
        {"advance the client's position", "frame facts persuasively",
         "anticipate opposing counsel"},
        "Persuasive and fact-forward; emphasizes favorable facts and practical outcomes"},
       C::LitigationAdvocacy},
      {{"Prosecutor",
        {"criminal law", "evidence law", "trial practice", "burden of proof"},
        {"establish each element beyond reasonable doubt", "challenge unreliable evidence",
         "protect the integrity of proceedings"},
        "Assertive and element-driven; argues from statutory elements and admissibility"},
       C::LitigationAdvocacy},
      {{"Public Defender",
        {"criminal defense", "constitutional rights", "evidence law", "procedural fairness"},
        {"expose weaknesses in the opposing case", "raise exceptions and defenses",
         "protect procedural rights"},
        "Skeptical and rights-focused; probes for exceptions, doubt and procedural defects"},
       C::LitigationAdvocacy},
      {{"Corporate Counsel",
        {"corporate law", "contracts", "employment law", "risk management"},
        {"identify legal exposure", "interpret contractual obligations",
         "recommend compliant courses of action"},
        "Pragmatic and risk-oriented; reasons from obligations and business consequences"},
       C::AdvisoryTransactional},
      {{"Compliance Officer",
        {"regulatory compliance", "administrative law", "internal controls", "reporting duties"},
        {"map conduct to regulatory requirements", "detect violations",
         "assess documentation and process"},
        "Checklist-driven; tests conduct against explicit rules and thresholds"},
       C::AdvisoryTransactional},
      {{"IP Attorney",
        {"intellectual property", "patents", "trademarks", "copyright"},
        {"classify the protected interest", "apply infringement tests",
         "distinguish technical from legal questions"},
        "Technical and precise; relies on statutory definitions and multi-factor tests"},
       C::AdvisoryTransactional},
      {{"Legal Analyst",
        {"statutory interpretation", "case law synthesis", "legal classification",
         "issue spotting"},
        {"classify the issue correctly", "apply definitions literally",
         "separate relevant from irrelevant facts"},
        "Analytical and structured; decomposes the question into definitional elements"},
       C::ResearchSupport},
      {{"Paralegal",
        {"fact gathering", "document review", "court procedures", "case preparation"},
        {"establish the factual record", "organize evidence", "note procedural posture"},
        "Concrete and factual; grounds points in specific record details"},
       C::ResearchSupport},
  };
  return AgentPool(std::move(entries));
}

std::vector<std::string> fallback_roles(Stance stance) {
  if (stance == Stance::Support) return {"Legal Analyst", "Private Practice Lawyer"};
  return {"Legal Analyst", "Prosecutor"};
}

std::string role_slug(std::string_view role) {
  std::string out;
  bool dash = false;
  for (char ch : role) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      if (dash && !out.empty()) out.push_back('-');
      dash = false;
      out.push_back(static_cast<char>(std::tolower(c)));
    } else {
      dash = true;
    }
  }
  return out;
}

namespace {

std::string stance_word(Stance s) { return s == Stance::Support ? "support" : "attack"; }

void describe_profile(std::ostringstream& os, const AgentProfile& p) {
  os << "- Role: " << p.role << "\n  Expertise: ";
  for (std::size_t i = 0; i < p.expertise_areas.size(); ++i) {
    os << (i ? ", " : "") << p.expertise_areas[i];
  }
  os << "\n  Priorities: ";
  for (std::size_t i = 0; i < p.focus_priorities.size(); ++i) {
    os << (i ? "; " : "") << p.focus_priorities[i];
  }
  os << "\n  Style: " << p.argument_style << "\n";
}

std::vector<AgentProfile> profiles_for(const AgentPool& pool, std::vector<std::string> roles) {
  std::sort(roles.begin(), roles.end());
  roles.erase(std::unique(roles.begin(), roles.end()), roles.end());
  std::vector<AgentProfile> out;
  for (const auto& r : roles) {
    if (const auto* p = pool.find(r)) out.push_back(*p);
  }
  return out;
}

}  // namespace

TeamSelection select_team(const AgentPool& pool, const LegalTask& task, Stance stance,
                          TextModelBackend& backend) {
  if (pool.empty()) throw Error(errc::kInvalidParams, "agent pool is empty");

  std::ostringstream os;
  os << kPromptVersion << " select\n"
     << "Select the legal professionals best suited to argue that the claim is "
     << (stance == Stance::Support ? "TRUE (support)" : "FALSE (attack)")
     << ". Match each candidate's expertise profile against the characteristics of this case.\n"
     << "STANCE: " << stance_word(stance) << "\n";
  append_task(os, task);
  os << "Candidates:\n";
  for (const auto& e : pool.entries()) describe_profile(os, e.profile);
  os << "Reply with {\"roles\": [role names exactly as listed]}.\n";

  const auto response = backend.complete(make_request(Purpose::Select, os.str()));

  std::vector<std::string> chosen;
  std::vector<std::string> unknown;
  for (const auto& r : response.fields.at("roles")) {
    if (!r.is_string()) {
      throw Error(errc::kSchemaMismatch, "select response contains a non-string role");
    }
    auto name = r.get<std::string>();
    if (pool.find(name) == nullptr) {
      unknown.push_back(name);
    } else {
      chosen.push_back(std::move(name));
    }
  }
  if (!unknown.empty()) {
    std::string msg = "selector returned roles outside the pool:";
    for (const auto& u : unknown) msg += " '" + u + "'";
    throw Error(errc::kUnknownRole, msg);
  }

  TeamSelection sel;
  sel.stance = stance;
  if (chosen.empty()) {
    sel.used_fallback = true;
    chosen = fallback_roles(stance);
  }
  sel.team = profiles_for(pool, std::move(chosen));
  if (sel.team.empty()) {
    throw Error(errc::kUnknownRole, "fallback roles are missing from the pool");
  }
  return sel;
}

GenerationResult generate_arguments(const AgentProfile& agent, const LegalTask& task, Stance stance,
                                    TextModelBackend& backend) {
  std::ostringstream os;
  os << kPromptVersion << " generate\n"
     << "You are acting as the following legal professional:\n";
  describe_profile(os, agent);
  os << "STANCE: " << stance_word(stance) << "\n"
     << "Construct between 2 and 5 distinct arguments showing that the claim is "
     << (stance == Stance::Support ? "TRUE" : "FALSE")
     << ". Choose how many based on the available evidence and the complexity of the case. "
        "Cite evidence passages by their bracketed ids.\n";
  append_task(os, task);
  os << "Reply with {\"arguments\": [{\"text\": string, \"evidence_refs\": [passage ids]}]}.\n";

  BackendResponse response;
  try {
    response = backend.complete(make_request(Purpose::Generate, os.str()));
  } catch (const BackendUnavailable&) {
    throw;
  } catch (const Error& e) {
    throw Error(errc::kGenerationFailed, agent.role + ": " + e.what());
  }

  GenerationResult out;
  const char prefix = stance == Stance::Support ? 's' : 'a';
  const std::string slug = role_slug(agent.role);
  for (const auto& item : response.fields.at("arguments")) {
    if (!item.is_object() || !item.contains("text") || !item["text"].is_string() ||
        item["text"].get<std::string>().empty()) {
      out.warnings.push_back(agent.role + ": skipped an argument without text");
      continue;
    }
    if (out.arguments.size() == kMaxArgumentsPerAgent) {
      out.warnings.push_back(agent.role + ": more than " + std::to_string(kMaxArgumentsPerAgent) +
                             " arguments returned; extra arguments dropped");
      break;
    }
    Argument a;
    a.id = NodeId(slug + "." + prefix + std::to_string(out.arguments.size() + 1));
    a.text = item["text"].get<std::string>();
    a.stance = stance;
    a.author_role = agent.role;
    if (auto refs = item.find("evidence_refs"); refs != item.end() && refs->is_array()) {
      for (const auto& r : *refs) {
        if (!r.is_string()) continue;
        const auto ref = r.get<std::string>();
        if (task.context.find(ref) == nullptr) {
          out.warnings.push_back(agent.role + ": dropped unknown evidence ref '" + ref + "'");
        } else if (std::find(a.evidence_refs.begin(), a.evidence_refs.end(), ref) ==
                   a.evidence_refs.end()) {
          a.evidence_refs.push_back(ref);
        }
      }
    }
    out.arguments.push_back(std::move(a));
  }
  if (out.arguments.empty()) {
    throw Error(errc::kGenerationFailed, agent.role + ": no usable arguments in response");
  }
  return out;
}

std::string_view scoring_rubric() {
  return "Score Range | Interpretation\n"
         "0.1 - 0.2 | Incorrect legal analysis or misidentification of key elements\n"
         "0.3 - 0.4 | Partially correct but missing critical components or overly generic\n"
         "0.5 - 0.6 | Sound analysis with minor gaps or insufficient case-specific application\n"
         "0.7 - 0.8 | Strong analysis with specific facts and correct legal reasoning\n"
         "0.9 - 1.0 | Exceptional precision with authoritative citations and flawless logic\n";
}

ScoreResult score_argument(const Argument& argument, const LegalTask& task,
                           TextModelBackend& backend) {
  if (argument.text.empty()) {
    throw Error(errc::kEmptyText, "cannot score an empty argument");
  }
  std::ostringstream os;
  os << kPromptVersion << " score\n"
     << "Rate the intrinsic strength of the argument below using this rubric. Differentiate "
        "strictly: penalize generic statements and reward case-specific legal precision.\n"
     << scoring_rubric();
  append_task(os, task);
  os << "Argument (" << stance_word(argument.stance) << ", by " << argument.author_role
     << "):\n" << argument.text << "\n"
     << "Reply with {\"score\": number between 0.1 and 1.0, \"rationale\": string}.\n";

  BackendResponse response;
  try {
    response = backend.complete(make_request(Purpose::Score, os.str()));
  } catch (const BackendUnavailable&) {
    throw;
  } catch (const Error& e) {
    throw Error(errc::kScoringFailed, argument.id.str() + ": " + e.what());
  }

  const double raw = response.fields.at("score").get<double>();
  if (!std::isfinite(raw)) {
    throw Error(errc::kScoringFailed, argument.id.str() + ": non-finite score");
  }
  ScoreResult out;
  out.value = std::clamp(raw, kRubricFloor, kRubricCeiling);
  if (out.value != raw) {
    out.clamped = true;
    std::ostringstream w;
    w << argument.id.str() << ": score " << raw << " clamped to " << out.value;
    out.warnings.push_back(w.str());
  }
  return out;
}

void to_json(nlohmann::json& j, const AgentProfile& p) {
  j = nlohmann::json{{"role", p.role},
                     {"expertise_areas", p.expertise_areas},
                     {"focus_priorities", p.focus_priorities},
                     {"argument_style", p.argument_style}};
}

void from_json(const nlohmann::json& j, AgentProfile& p) {
  j.at("role").get_to(p.role);
  j.at("expertise_areas").get_to(p.expertise_areas);
  p.focus_priorities = j.value("focus_priorities", std::vector<std::string>{});
  p.argument_style = j.value("argument_style", std::string{});
}

void to_json(nlohmann::json& j, const LegalTask& t) {
  j = nlohmann::json{{"task_id", t.task_id},
                     {"claim", t.claim},
                     {"context", t.context},
                     {"metadata", t.metadata}};
}

void from_json(const nlohmann::json& j, LegalTask& t) {
  t.task_id = j.value("task_id", std::string{});
  j.at("claim").get_to(t.claim);
  t.context = j.value("context", EvidenceContext{});
  t.metadata = j.value("metadata", std::map<std::string, std::string>{});
}

void to_json(nlohmann::json& j, const TeamSelection& s) {
  std::vector<std::string> roles;
  for (const auto& p : s.team) roles.push_back(p.role);
  j = nlohmann::json{{"stance", s.stance}, {"roles", roles}, {"used_fallback", s.used_fallback}};
}

}  // namespace acal
