#include "acal/contestation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>

#include "acal/document.hpp"
#include "prompt_text.hpp"

namespace acal {

namespace {

double snap(double x) { return std::round(x * 1e12) / 1e12; }

std::string fmt(double x) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << x;
  return os.str();
}

std::string signed_fmt(double x) { return (x >= 0 ? "+" : "") + fmt(x); }

void require_argument(const QbafGraph& graph, const std::set<NodeId>& rejected, const NodeId& id) {
  if (id == kClaimId) throw Error(errc::kEditClaimNode, "the claim node cannot be edited this way");
  if (rejected.contains(id)) {
    throw Error(errc::kEditStaleNode, "argument '" + id.str() + "' was rejected in this session");
  }
  if (graph.find_argument(id) == nullptr) {
    throw Error(errc::kEditUnknownNode, "unknown argument '" + id.str() + "'");
  }
}

void require_strength(double tau) {
  if (!(tau >= kRubricFloor && tau <= kRubricCeiling)) {
    throw Error(errc::kEditInvalidStrength, "base strength must lie in [0.1, 1.0]");
  }
}

LegalTask task_with(const LegalTask& task, const std::vector<EvidencePassage>& extra) {
  LegalTask t = task;
  for (const auto& p : extra) t.context.passages.push_back(p);
  return t;
}

RecomputeResult evaluate(const QbafGraph& graph, const CaseRecord& base,
                         const std::vector<EvidencePassage>& user, TextModelBackend* judge) {
  RecomputeResult r;
  r.strengths = solve_equilibrium(graph, base.config.solver);
  r.decision = decide(r.strengths.claim(), base.config.decision, task_with(base.task, user), judge,
                      summarize_for_judge(graph, r.strengths));
  return r;
}

}  // namespace

// ---- dashboard --------------------------------------------------------------

std::vector<ParticipationRow> participation_summary(const CaseRecord& record) {
  std::map<std::string, ParticipationRow> rows;
  std::map<NodeId, std::string> role_of;
  for (const auto& a : record.graph.arguments) {
    auto& row = rows[a.author_role];
    row.role = a.author_role;
    (a.stance == Stance::Support ? row.supports : row.attacks) += 1;
    role_of[a.id] = a.author_role;
  }
  if (const auto* arena = record.find_stage(stage::kClashResolution)) {
    for (const auto& adj : arena->details.value("adjustments", nlohmann::json::array())) {
      const auto id = adj.at("argument").get<NodeId>();
      auto it = role_of.find(id);
      if (it == role_of.end()) continue;
      auto& row = rows[it->second];
      const auto clashes = adj.at("clashes").get<std::size_t>();
      const auto wins = adj.at("wins").get<std::size_t>();
      const auto ties = adj.at("ties").get<std::size_t>();
      row.clashes += clashes;
      row.wins += wins;
      row.ties += ties;
      row.losses += clashes - wins - ties;
      row.net_adjustment =
          snap(row.net_adjustment + adj.at("after").get<double>() - adj.at("before").get<double>());
    }
  }
  std::vector<ParticipationRow> out;
  for (auto& [_, row] : rows) out.push_back(std::move(row));
  return out;
}

ArgumentCard make_card(const QbafGraph& graph, const StrengthMap& strengths,
                       const std::vector<EvidencePassage>& passages, const SolverParams& solver,
                       const NodeId& id) {
  if (id == kClaimId) throw Error(errc::kEditClaimNode, "the claim has no argument card");
  const Argument* arg = graph.find_argument(id);
  if (arg == nullptr) throw Error(errc::kUnknownNode, "unknown argument '" + id.str() + "'");

  ArgumentCard c;
  c.id = arg->id;
  c.text = arg->text;
  c.stance = arg->stance;
  c.author_role = arg->author_role;
  for (const auto& ref : arg->evidence_refs) {
    auto it = std::find_if(passages.begin(), passages.end(),
                           [&](const EvidencePassage& p) { return p.passage_id == ref; });
    if (it != passages.end()) c.evidence.push_back(*it);
  }
  c.base_strength = arg->base_strength.value_or(0.0);
  c.strength = strengths.at(id);
  for (const Edge* e : graph.incoming(id)) {
    (e->kind == RelationKind::Support ? c.supporters : c.attackers).push_back(e->source);
  }
  std::sort(c.supporters.begin(), c.supporters.end());
  std::sort(c.attackers.begin(), c.attackers.end());

  c.energy_contribution = arg->stance == Stance::Support ? c.strength : -c.strength;
  QbafGraph without = graph;
  without.remove_argument(id);
  c.claim_effect = strengths.claim() - solve_equilibrium(without, solver).claim();

  std::ostringstream os;
  os << (arg->stance == Stance::Support ? "Supports" : "Attacks") << " the claim directly. "
     << "Base strength " << fmt(c.base_strength) << ", final strength " << fmt(c.strength);
  if (!c.supporters.empty() || !c.attackers.empty()) {
    os << " after " << c.supporters.size() << " supporting and " << c.attackers.size()
       << " attacking argument(s)";
  }
  os << ". It adds " << signed_fmt(c.energy_contribution) << " to the claim's energy";
  os << "; removing it would move the claim strength by " << signed_fmt(-c.claim_effect) << ".";
  c.influence = os.str();
  return c;
}

ArgumentCard argument_card(const CaseRecord& record, const NodeId& id) {
  return make_card(record.graph, record.strengths, record.task.context.passages,
                   record.config.solver, id);
}

nlohmann::json dashboard(const CaseRecord& record) {
  nlohmann::json cards = nlohmann::json::array();
  for (const auto& a : record.graph.arguments) cards.push_back(argument_card(record, a.id));
  return nlohmann::json{{"case_id", record.case_id},
                        {"claim", record.task.claim},
                        {"claim_strength", record.strengths.claim()},
                        {"decision", record.decision},
                        {"participation", participation_summary(record)},
                        {"cards", cards}};
}

// ---- edit types ---------------------------------------------------------------

std::string_view to_string(ContestationType t) {
  switch (t) {
    case ContestationType::Factual: return "Factual";
    case ContestationType::LegalRule: return "LegalRule";
    case ContestationType::Precedent: return "Precedent";
    case ContestationType::MissingException: return "MissingException";
    case ContestationType::ProceduralFairness: return "ProceduralFairness";
  }
  return "Factual";
}

ContestationType parse_contestation_type(std::string_view s) {
  for (auto t : {ContestationType::Factual, ContestationType::LegalRule, ContestationType::Precedent,
                 ContestationType::MissingException, ContestationType::ProceduralFairness}) {
    if (s == to_string(t)) return t;
  }
  throw Error(errc::kBadDocument, "unknown contestation type '" + std::string(s) + "'");
}

std::string_view action_name(const EditAction& a) {
  static constexpr std::string_view kNames[] = {"AcceptArgument",  "RejectArgument",
                                                "EditArgumentText", "AddArgument",
                                                "SetBaseStrength", "SetRelation"};
  return kNames[a.index()];
}

bool needs_review(double sigma_base, double sigma_after, Answer base_answer, Answer after_answer,
                  double threshold) {
  return std::abs(sigma_after - sigma_base) > threshold || base_answer != after_answer;
}

// ---- session ------------------------------------------------------------------

ContestationSession ContestationSession::open(const CaseRecord& base, std::string session_id) {
  ContestationSession s;
  s.id_ = std::move(session_id);
  s.base_ = base;
  s.graph_ = base.graph;
  s.strengths_ = base.strengths;
  s.decision_ = base.decision;
  return s;
}

std::vector<Proposal> ContestationSession::pending_proposals() const {
  std::vector<Proposal> out;
  for (const auto& p : proposals_) {
    if (p.status == ProposalStatus::Pending) out.push_back(p);
  }
  return out;
}

std::vector<EvidencePassage> ContestationSession::passages() const {
  return task_with(base_.task, user_passages_).context.passages;
}

void ContestationSession::mutate(const EditOp& op, QbafGraph& g,
                                 std::vector<EvidencePassage>& user) const {
  std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, AcceptArgument>) {
          require_argument(g, rejected_, a.id);
        } else if constexpr (std::is_same_v<T, RejectArgument>) {
          require_argument(g, rejected_, a.id);
          g.remove_argument(a.id);
        } else if constexpr (std::is_same_v<T, EditArgumentText>) {
          require_argument(g, rejected_, a.id);
          if (a.text.empty()) throw Error(errc::kEditInvalidText, "argument text must not be empty");
          g.find_argument(a.id)->text = a.text;
        } else if constexpr (std::is_same_v<T, SetBaseStrength>) {
          require_argument(g, rejected_, a.id);
          require_strength(a.base_strength);
          g.find_argument(a.id)->base_strength = a.base_strength;
        } else if constexpr (std::is_same_v<T, SetRelation>) {
          if (a.source == kClaimId || a.target == kClaimId) {
            throw Error(errc::kEditInvalidRelation,
                        "relations to the claim follow the argument's stance and cannot be set");
          }
          if (a.source == a.target) {
            throw Error(errc::kEditInvalidRelation, "an argument cannot relate to itself");
          }
          require_argument(g, rejected_, a.source);
          require_argument(g, rejected_, a.target);
          g.remove_edges_between(a.source, a.target);
          if (a.kind) {
            g.add_edge({a.source, a.target, *a.kind, 1.0, EdgeOrigin::Human});
            g.add_edge({a.target, a.source, *a.kind, 1.0, EdgeOrigin::Human});
          }
        } else if constexpr (std::is_same_v<T, AddArgument>) {
          Argument arg = a.argument;
          if (arg.text.empty()) throw Error(errc::kEditInvalidText, "argument text must not be empty");
          if (!arg.base_strength) {
            throw Error(errc::kEditInvalidStrength, "a new argument needs a base strength");
          }
          require_strength(*arg.base_strength);
          if (arg.id.empty()) {
            const std::string prefix =
                std::string("human.") + (arg.stance == Stance::Support ? "s" : "a");
            for (std::size_t n = 1;; ++n) {
              NodeId candidate{prefix + std::to_string(n)};
              if (!g.contains(candidate) && !rejected_.contains(candidate)) {
                arg.id = candidate;
                break;
              }
            }
          } else if (g.contains(arg.id) || rejected_.contains(arg.id)) {
            throw Error(errc::kEditDuplicateId, "id '" + arg.id.str() + "' is already in use");
          }
          if (arg.author_role.empty()) arg.author_role = op.actor.empty() ? "Human" : op.actor;

          auto known = task_with(base_.task, user).context.passages;
          for (auto p : a.citations) {
            if (p.passage_id.empty() || p.text.empty()) {
              throw Error(errc::kEditInvalidText, "citations need a passage id and text");
            }
            const bool dup = std::any_of(known.begin(), known.end(), [&](const EvidencePassage& k) {
              return k.passage_id == p.passage_id;
            });
            if (dup) throw Error(errc::kEditDuplicateId, "passage '" + p.passage_id + "' exists");
            p.provenance = Provenance::UserSubmitted;
            if (p.document_id.empty()) p.document_id = p.passage_id;
            known.push_back(p);
            user.push_back(std::move(p));
          }
          for (const auto& ref : arg.evidence_refs) {
            const bool found = std::any_of(known.begin(), known.end(), [&](const EvidencePassage& k) {
              return k.passage_id == ref;
            });
            if (!found) throw Error(errc::kEditUnknownPassage, "unknown passage '" + ref + "'");
          }
          const NodeId id = arg.id;
          const Stance stance = arg.stance;
          g.arguments.push_back(std::move(arg));
          g.add_edge({id, kClaimId, relation_for(stance), 1.0, EdgeOrigin::Construction});
        }
      },
      op.action);
}

const AuditEntry& ContestationSession::apply(const EditOp& op_in, TextModelBackend* judge) {
  EditOp op = op_in;
  if (op.timestamp.empty()) op.timestamp = utc_now();

  QbafGraph g = graph_;
  auto user = user_passages_;
  mutate(op, g, user);
  if (auto diags = validate(g); !diags.empty()) {
    throw Error(errc::kBadDocument, "edit left the graph invalid: " + diags.front().message);
  }
  auto result = evaluate(g, base_, user, judge);

  AuditEntry entry;
  entry.seq = audit_.size() + 1;
  entry.sigma_before = strengths_.claim();
  entry.sigma_after = result.strengths.claim();
  if (result.decision.answer != decision_.answer ||
      result.decision.decided_by != decision_.decided_by) {
    entry.decision = result.decision;
  }

  // Commit.
  if (const auto* r = std::get_if<RejectArgument>(&op.action)) {
    rejected_.insert(r->id);
    accepted_.erase(r->id);
  } else if (const auto* acc = std::get_if<AcceptArgument>(&op.action)) {
    accepted_.insert(acc->id);
  }
  if (auto* add = std::get_if<AddArgument>(&op.action); add && add->argument.id.empty()) {
    add->argument.id = g.arguments.back().id;  // log the id that was assigned
  }
  entry.op = std::move(op);
  graph_ = std::move(g);
  user_passages_ = std::move(user);
  strengths_ = std::move(result.strengths);
  decision_ = std::move(result.decision);
  if (needs_review(base_.strengths.claim(), strengths_.claim(), base_.decision.answer,
                   decision_.answer, base_.config.review_threshold)) {
    review_required_ = true;
  }
  audit_.push_back(std::move(entry));
  return audit_.back();
}

Preview ContestationSession::preview(const EditOp& op, TextModelBackend* judge) const {
  QbafGraph g = graph_;
  auto user = user_passages_;
  mutate(op, g, user);
  auto result = evaluate(g, base_, user, judge);
  Preview p;
  p.sigma_before = strengths_.claim();
  p.sigma_after = result.strengths.claim();
  p.strengths = std::move(result.strengths);
  p.decision = std::move(result.decision);
  return p;
}

RecomputeResult ContestationSession::recompute(TextModelBackend* judge) const {
  return evaluate(graph_, base_, user_passages_, judge);
}

ArgumentCard ContestationSession::card(const NodeId& id) const {
  if (rejected_.contains(id)) {
    throw Error(errc::kEditStaleNode, "argument '" + id.str() + "' was rejected in this session");
  }
  return make_card(graph_, strengths_, passages(), base_.config.solver, id);
}

namespace {

std::string_view guidance(ContestationType t) {
  switch (t) {
    case ContestationType::Factual:
      return "The user disputes a factual premise of the analysis. Identify the arguments that "
             "rely on the disputed fact and propose corrected versions of them, or new arguments "
             "if the corrected facts change the outcome.";
    case ContestationType::LegalRule:
      return "The user contends that the wrong legal rule or standard was applied. Propose "
             "arguments under the correct rule and corrections to arguments that apply the wrong "
             "one.";
    case ContestationType::Precedent:
      return "The user points to precedent that was missed or misread. Propose arguments "
             "grounded in that precedent, and corrections to arguments that misstate it.";
    case ContestationType::MissingException:
      return "The user identifies an exception, defense or exclusion that the analysis did not "
             "consider. Propose new arguments raising it, with the stance it takes on the claim.";
    case ContestationType::ProceduralFairness:
      return "The user raises a procedural or fairness concern about how the evidence or "
             "arguments were handled. Propose arguments or corrections that address it.";
  }
  return "";
}

}  // namespace

ContestResult ContestationSession::contest(ContestationType type, std::string_view user_claim,
                                           const std::vector<std::string>& materials,
                                           const std::string& actor, TextModelBackend& backend) {
  ContestResult result;
  for (const auto& m : materials) {
    if (m.empty()) continue;
    EvidencePassage p;
    for (std::size_t n = user_passages_.size() + 1;; ++n) {
      p.passage_id = "user-" + std::to_string(n);
      const auto all = passages();
      if (std::none_of(all.begin(), all.end(),
                       [&](const EvidencePassage& k) { return k.passage_id == p.passage_id; })) {
        break;
      }
    }
    p.document_id = p.passage_id;
    p.text = m;
    p.provenance = Provenance::UserSubmitted;
    user_passages_.push_back(std::move(p));
  }

  const LegalTask task = task_with(base_.task, user_passages_);
  std::ostringstream os;
  os << kPromptVersion << " contest\n"
     << "A user is contesting the outcome of a legal argumentation analysis.\n"
     << "Contestation type: " << to_string(type) << "\n"
     << guidance(type) << "\n";
  append_task(os, task);
  os << "Current arguments:\n";
  for (const auto& a : graph_.arguments) {
    os << "- [" << a.id.str() << "] " << to_string(a.stance) << ", strength "
       << fmt(strengths_.at(a.id)) << ": " << a.text << "\n";
  }
  os << "User contestation: " << user_claim << "\n"
     << "Reply with {\"proposals\": [{\"action\": \"edit_text\"|\"add_argument\", \"target\": "
        "argument id (edit_text), \"stance\": \"support\"|\"attack\" (add_argument), \"text\": "
        "string, \"evidence_refs\": [passage ids], \"base_strength\": number (optional), "
        "\"rationale\": string}]}.\n";

  nlohmann::json items;
  try {
    items = backend.complete(make_request(Purpose::Contest, os.str())).fields.at("proposals");
  } catch (const Error& e) {
    result.warnings.push_back(std::string("contestation prompt failed: ") + e.what());
    return result;
  }

  const auto known = task.context.passages;
  for (const auto& item : items) {
    if (!item.is_object() || !item.contains("action") || !item["action"].is_string() ||
        !item.contains("text") || !item["text"].is_string() || item["text"].get<std::string>().empty()) {
      result.warnings.push_back("skipped malformed proposal " + item.dump());
      continue;
    }
    const auto action = item["action"].get<std::string>();
    const auto rationale = item.value("rationale", std::string{});
    EditOp op;
    op.actor = actor;
    op.type = type;
    op.timestamp = utc_now();
    if (action == "edit_text") {
      const NodeId target{item.value("target", std::string{})};
      if (graph_.find_argument(target) == nullptr) {
        result.warnings.push_back("proposal targets unknown argument '" + target.str() + "'");
        continue;
      }
      op.action = EditArgumentText{target, item["text"].get<std::string>(), rationale};
    } else if (action == "add_argument") {
      Argument arg;
      std::string stance = item.value("stance", std::string{});
      std::transform(stance.begin(), stance.end(), stance.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      if (stance != "support" && stance != "attack") {
        result.warnings.push_back("proposal without a valid stance: " + item.dump());
        continue;
      }
      arg.stance = stance == "support" ? Stance::Support : Stance::Attack;
      arg.text = item["text"].get<std::string>();
      arg.author_role = actor.empty() ? "Human" : actor;
      if (auto refs = item.find("evidence_refs"); refs != item.end() && refs->is_array()) {
        for (const auto& r : *refs) {
          if (!r.is_string()) continue;
          const auto ref = r.get<std::string>();
          const bool ok = std::any_of(known.begin(), known.end(),
                                      [&](const EvidencePassage& k) { return k.passage_id == ref; });
          if (ok) {
            arg.evidence_refs.push_back(ref);
          } else {
            result.warnings.push_back("dropped unknown evidence ref '" + ref + "'");
          }
        }
      }
      if (auto b = item.find("base_strength"); b != item.end() && b->is_number()) {
        arg.base_strength = std::clamp(b->get<double>(), kRubricFloor, kRubricCeiling);
      } else {
        try {
          auto s = score_argument(arg, task, backend);
          arg.base_strength = s.value;
        } catch (const Error& e) {
          result.warnings.push_back(std::string("could not score proposed argument: ") + e.what());
          continue;
        }
      }
      op.action = AddArgument{std::move(arg), {}};
    } else {
      result.warnings.push_back("skipped proposal with unknown action '" + action + "'");
      continue;
    }
    Proposal p;
    p.id = "P" + std::to_string(proposals_.size() + 1);
    p.op = std::move(op);
    p.contest_claim = std::string(user_claim);
    proposals_.push_back(p);
    result.proposals.push_back(std::move(p));
  }
  return result;
}

Proposal& ContestationSession::find_proposal(std::string_view id) {
  for (auto& p : proposals_) {
    if (p.id == id) return p;
  }
  throw Error(errc::kProposalNotFound, "no proposal '" + std::string(id) + "'");
}

const AuditEntry& ContestationSession::accept_proposal(std::string_view proposal_id,
                                                       const std::string& actor,
                                                       TextModelBackend* judge) {
  Proposal& p = find_proposal(proposal_id);
  if (p.status != ProposalStatus::Pending) {
    throw Error(errc::kProposalNotFound, "proposal '" + p.id + "' is no longer pending");
  }
  EditOp op = p.op;
  if (!actor.empty()) op.actor = actor;
  op.timestamp.clear();
  const AuditEntry& entry = apply(op, judge);
  find_proposal(proposal_id).status = ProposalStatus::Accepted;
  return entry;
}

void ContestationSession::reject_proposal(std::string_view proposal_id) {
  Proposal& p = find_proposal(proposal_id);
  if (p.status != ProposalStatus::Pending) {
    throw Error(errc::kProposalNotFound, "proposal '" + p.id + "' is no longer pending");
  }
  p.status = ProposalStatus::Rejected;
}

nlohmann::json ContestationSession::state_document() const {
  return nlohmann::json{{"session_id", id_},
                        {"case_id", base_.case_id},
                        {"graph", graph_},
                        {"strengths", strengths_},
                        {"decision", decision_},
                        {"review_required", review_required_},
                        {"rejected", rejected_},
                        {"accepted", accepted_},
                        {"user_passages", user_passages_},
                        {"proposals", proposals_},
                        {"audit_length", audit_.size()}};
}

ContestationSession ContestationSession::restore(const CaseRecord& base, const nlohmann::json& state,
                                                 std::vector<AuditEntry> audit) {
  ContestationSession s;
  try {
    s.id_ = state.at("session_id").get<std::string>();
    if (state.at("case_id").get<std::string>() != base.case_id) {
      throw Error(errc::kBadDocument, "session belongs to another case");
    }
    s.base_ = base;
    state.at("graph").get_to(s.graph_);
    state.at("strengths").get_to(s.strengths_);
    state.at("decision").get_to(s.decision_);
    s.review_required_ = state.at("review_required").get<bool>();
    s.rejected_ = state.at("rejected").get<std::set<NodeId>>();
    s.accepted_ = state.at("accepted").get<std::set<NodeId>>();
    s.user_passages_ = state.at("user_passages").get<std::vector<EvidencePassage>>();
    s.proposals_ = state.at("proposals").get<std::vector<Proposal>>();
    if (state.at("audit_length").get<std::size_t>() != audit.size()) {
      throw Error(errc::kStoreIo, "audit log length does not match the session state");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(errc::kBadDocument, std::string("malformed session: ") + e.what());
  }
  s.audit_ = std::move(audit);
  return s;
}

// ---- serialization --------------------------------------------------------------

std::string audit_to_jsonl(const std::vector<AuditEntry>& entries) {
  std::string out;
  for (const auto& e : entries) {
    out += nlohmann::json(e).dump();
    out += '\n';
  }
  return out;
}

std::vector<AuditEntry> audit_from_jsonl(std::string_view text) {
  std::vector<AuditEntry> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(nlohmann::json::parse(line).get<AuditEntry>());
    } catch (const nlohmann::json::exception& e) {
      throw Error(errc::kBadDocument,
                  "audit line " + std::to_string(line_no) + " is malformed: " + e.what());
    }
  }
  return out;
}

void to_json(nlohmann::json& j, const ParticipationRow& r) {
  j = nlohmann::json{{"role", r.role},         {"supports", r.supports}, {"attacks", r.attacks},
                     {"clashes", r.clashes},   {"wins", r.wins},         {"ties", r.ties},
                     {"losses", r.losses},     {"net_adjustment", r.net_adjustment}};
}

void to_json(nlohmann::json& j, const ArgumentCard& c) {
  j = nlohmann::json{{"id", c.id},
                     {"text", c.text},
                     {"stance", c.stance},
                     {"author_role", c.author_role},
                     {"evidence", c.evidence},
                     {"base_strength", c.base_strength},
                     {"strength", c.strength},
                     {"neighborhood", {{"supporters", c.supporters}, {"attackers", c.attackers}}},
                     {"energy_contribution", c.energy_contribution},
                     {"claim_effect", c.claim_effect},
                     {"influence", c.influence}};
}

void to_json(nlohmann::json& j, const ContestationType& t) { j = std::string(to_string(t)); }
void from_json(const nlohmann::json& j, ContestationType& t) {
  t = parse_contestation_type(j.get<std::string>());
}

void to_json(nlohmann::json& j, const EditOp& op) {
  j = nlohmann::json{{"op", std::string(action_name(op.action))},
                     {"actor", op.actor},
                     {"type", op.type},
                     {"timestamp", op.timestamp}};
  std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, AcceptArgument>) {
          j["id"] = a.id;
        } else if constexpr (std::is_same_v<T, RejectArgument>) {
          j["id"] = a.id;
          j["rationale"] = a.rationale;
        } else if constexpr (std::is_same_v<T, EditArgumentText>) {
          j["id"] = a.id;
          j["text"] = a.text;
          j["rationale"] = a.rationale;
        } else if constexpr (std::is_same_v<T, AddArgument>) {
          j["argument"] = a.argument;
          j["citations"] = a.citations;
        } else if constexpr (std::is_same_v<T, SetBaseStrength>) {
          j["id"] = a.id;
          j["base_strength"] = a.base_strength;
          j["rationale"] = a.rationale;
        } else if constexpr (std::is_same_v<T, SetRelation>) {
          j["source"] = a.source;
          j["target"] = a.target;
          j["kind"] = a.kind ? nlohmann::json(*a.kind) : nlohmann::json(nullptr);
          j["rationale"] = a.rationale;
        }
      },
      op.action);
}

void from_json(const nlohmann::json& j, EditOp& op) {
  const auto name = j.at("op").get<std::string>();
  op.actor = j.value("actor", std::string{});
  op.type = j.contains("type") ? j.at("type").get<ContestationType>() : ContestationType::Factual;
  op.timestamp = j.value("timestamp", std::string{});
  const auto rationale = j.value("rationale", std::string{});
  if (name == "AcceptArgument") {
    op.action = AcceptArgument{j.at("id").get<NodeId>()};
  } else if (name == "RejectArgument") {
    op.action = RejectArgument{j.at("id").get<NodeId>(), rationale};
  } else if (name == "EditArgumentText") {
    op.action = EditArgumentText{j.at("id").get<NodeId>(), j.at("text").get<std::string>(), rationale};
  } else if (name == "AddArgument") {
    const auto& a = j.at("argument");
    Argument arg;
    arg.id = NodeId{a.value("id", std::string{})};
    arg.text = a.at("text").get<std::string>();
    a.at("stance").get_to(arg.stance);
    arg.author_role = a.value("author_role", std::string{});
    arg.evidence_refs = a.value("evidence_refs", std::vector<std::string>{});
    if (auto b = a.find("base_strength"); b != a.end() && !b->is_null()) {
      arg.base_strength = b->get<double>();
    }
    std::vector<EvidencePassage> citations;
    for (const auto& c : j.value("citations", nlohmann::json::array())) {
      EvidencePassage p;
      p.passage_id = c.at("passage_id").get<std::string>();
      p.text = c.at("text").get<std::string>();
      p.document_id = c.value("document_id", std::string{});
      p.provenance = Provenance::UserSubmitted;
      citations.push_back(std::move(p));
    }
    op.action = AddArgument{std::move(arg), std::move(citations)};
  } else if (name == "SetBaseStrength") {
    op.action = SetBaseStrength{j.at("id").get<NodeId>(), j.at("base_strength").get<double>(), rationale};
  } else if (name == "SetRelation") {
    std::optional<RelationKind> kind;
    if (auto k = j.find("kind"); k != j.end() && !k->is_null()) kind = k->get<RelationKind>();
    op.action = SetRelation{j.at("source").get<NodeId>(), j.at("target").get<NodeId>(), kind, rationale};
  } else {
    throw Error(errc::kBadDocument, "unknown edit op '" + name + "'");
  }
}

void to_json(nlohmann::json& j, const AuditEntry& e) {
  j = nlohmann::json{{"seq", e.seq},
                     {"actor", e.op.actor},
                     {"op", e.op},
                     {"sigma_before", e.sigma_before},
                     {"sigma_after", e.sigma_after},
                     {"decision", e.decision ? nlohmann::json(*e.decision) : nlohmann::json(nullptr)}};
}

void from_json(const nlohmann::json& j, AuditEntry& e) {
  j.at("seq").get_to(e.seq);
  j.at("op").get_to(e.op);
  j.at("sigma_before").get_to(e.sigma_before);
  j.at("sigma_after").get_to(e.sigma_after);
  if (auto d = j.find("decision"); d != j.end() && !d->is_null()) {
    e.decision = d->get<Decision>();
  } else {
    e.decision.reset();
  }
}

void to_json(nlohmann::json& j, const ProposalStatus& s) {
  j = s == ProposalStatus::Pending ? "pending" : s == ProposalStatus::Accepted ? "accepted" : "rejected";
}

void from_json(const nlohmann::json& j, ProposalStatus& s) {
  const auto v = j.get<std::string>();
  if (v == "pending") s = ProposalStatus::Pending;
  else if (v == "accepted") s = ProposalStatus::Accepted;
  else if (v == "rejected") s = ProposalStatus::Rejected;
  else throw Error(errc::kBadDocument, "unknown proposal status '" + v + "'");
}

void to_json(nlohmann::json& j, const Proposal& p) {
  j = nlohmann::json{{"id", p.id}, {"op", p.op}, {"status", p.status}, {"contest_claim", p.contest_claim}};
}

void from_json(const nlohmann::json& j, Proposal& p) {
  j.at("id").get_to(p.id);
  j.at("op").get_to(p.op);
  j.at("status").get_to(p.status);
  p.contest_claim = j.value("contest_claim", std::string{});
}

void to_json(nlohmann::json& j, const Preview& p) {
  j = nlohmann::json{{"sigma_before", p.sigma_before},
                     {"sigma_after", p.sigma_after},
                     {"delta", p.sigma_after - p.sigma_before},
                     {"strengths", p.strengths},
                     {"decision", p.decision}};
}

}  // namespace acal
