#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "acal/pipeline.hpp"

namespace acal {

// ---- dashboard artifacts --------------------------------------------------

struct ParticipationRow {
  std::string role;
  std::size_t supports = 0;
  std::size_t attacks = 0;
  std::size_t clashes = 0;
  std::size_t wins = 0;
  std::size_t ties = 0;
  std::size_t losses = 0;
  double net_adjustment = 0.0;  // sum of arena tau changes over the role's arguments

  friend bool operator==(const ParticipationRow&, const ParticipationRow&) = default;
};

/// One row per contributing role, sorted by role name.
std::vector<ParticipationRow> participation_summary(const CaseRecord& record);

struct ArgumentCard {
  NodeId id;
  std::string text;
  Stance stance = Stance::Support;
  std::string author_role;
  std::vector<EvidencePassage> evidence;
  double base_strength = 0.0;
  double strength = 0.0;
  std::vector<NodeId> supporters;  // incoming, excluding construction edges
  std::vector<NodeId> attackers;
  double energy_contribution = 0.0;  // signed term this argument adds to E(claim)
  double claim_effect = 0.0;         // sigma(claim) minus sigma(claim) without this argument
  std::string influence;
};

/// Card over an arbitrary graph state. `passages` resolves evidence refs.
ArgumentCard make_card(const QbafGraph& graph, const StrengthMap& strengths,
                       const std::vector<EvidencePassage>& passages, const SolverParams& solver,
                       const NodeId& id);

ArgumentCard argument_card(const CaseRecord& record, const NodeId& id);

nlohmann::json dashboard(const CaseRecord& record);

// ---- edits ------------------------------------------------------------------

enum class ContestationType { Factual, LegalRule, Precedent, MissingException, ProceduralFairness };

std::string_view to_string(ContestationType t);
ContestationType parse_contestation_type(std::string_view s);

struct AcceptArgument {
  NodeId id;
  friend bool operator==(const AcceptArgument&, const AcceptArgument&) = default;
};
struct RejectArgument {
  NodeId id;
  std::string rationale;
  friend bool operator==(const RejectArgument&, const RejectArgument&) = default;
};
struct EditArgumentText {
  NodeId id;
  std::string text;
  std::string rationale;
  friend bool operator==(const EditArgumentText&, const EditArgumentText&) = default;
};
struct AddArgument {
  Argument argument;  // empty id: one is assigned
  std::vector<EvidencePassage> citations;  // new passages, stored as UserSubmitted
  friend bool operator==(const AddArgument&, const AddArgument&) = default;
};
struct SetBaseStrength {
  NodeId id;
  double base_strength = 0.0;
  std::string rationale;
  friend bool operator==(const SetBaseStrength&, const SetBaseStrength&) = default;
};
/// kind = nullopt removes the relation. Applies to both directions.
struct SetRelation {
  NodeId source;
  NodeId target;
  std::optional<RelationKind> kind;
  std::string rationale;
  friend bool operator==(const SetRelation&, const SetRelation&) = default;
};

using EditAction = std::variant<AcceptArgument, RejectArgument, EditArgumentText, AddArgument,
                                SetBaseStrength, SetRelation>;

std::string_view action_name(const EditAction& a);

struct EditOp {
  std::string actor;
  ContestationType type = ContestationType::Factual;
  std::string timestamp;
  EditAction action;

  friend bool operator==(const EditOp&, const EditOp&) = default;
};

struct AuditEntry {
  std::size_t seq = 0;
  EditOp op;
  double sigma_before = 0.0;
  double sigma_after = 0.0;
  std::optional<Decision> decision;  // set when the answer or decider changed

  friend bool operator==(const AuditEntry&, const AuditEntry&) = default;
};

/// One compact JSON document per line.
std::string audit_to_jsonl(const std::vector<AuditEntry>& entries);
std::vector<AuditEntry> audit_from_jsonl(std::string_view text);

enum class ProposalStatus { Pending, Accepted, Rejected };

struct Proposal {
  std::string id;  // P1, P2, ...
  EditOp op;
  ProposalStatus status = ProposalStatus::Pending;
  std::string contest_claim;
};

struct RecomputeResult {
  StrengthMap strengths;
  Decision decision;
};

struct Preview {
  double sigma_before = 0.0;
  double sigma_after = 0.0;
  StrengthMap strengths;
  Decision decision;
};

struct ContestResult {
  std::vector<Proposal> proposals;
  std::vector<std::string> warnings;
};

/// Editable view of one case. Single writer; callers serialize access.
class ContestationSession {
 public:
  static ContestationSession open(const CaseRecord& base, std::string session_id);

  const std::string& id() const noexcept { return id_; }
  const CaseRecord& base() const noexcept { return base_; }
  const QbafGraph& graph() const noexcept { return graph_; }
  const StrengthMap& strengths() const noexcept { return strengths_; }
  const Decision& decision() const noexcept { return decision_; }
  bool review_required() const noexcept { return review_required_; }
  const std::vector<AuditEntry>& audit_log() const noexcept { return audit_; }
  const std::vector<Proposal>& proposals() const noexcept { return proposals_; }
  std::vector<Proposal> pending_proposals() const;
  const std::set<NodeId>& accepted() const noexcept { return accepted_; }
  /// Case context plus user-submitted passages.
  std::vector<EvidencePassage> passages() const;

  /// Validates, mutates the working graph, recomputes and logs.
  /// `judge` is consulted when the new strength falls in the escalation band.
  const AuditEntry& apply(const EditOp& op, TextModelBackend* judge);

  /// Effect of `op` without touching this session.
  Preview preview(const EditOp& op, TextModelBackend* judge) const;

  /// Solver and decision over the working graph with the case's config.
  RecomputeResult recompute(TextModelBackend* judge) const;

  /// Card for a live argument. Rejected ids raise EDIT_STALE_NODE.
  ArgumentCard card(const NodeId& id) const;

  /// Guided prompt for one contestation type. Proposals are stored as
  /// pending and do not touch the graph until accepted. Backend failure
  /// yields no proposals and a warning.
  ContestResult contest(ContestationType type, std::string_view user_claim,
                        const std::vector<std::string>& materials, const std::string& actor,
                        TextModelBackend& backend);

  const AuditEntry& accept_proposal(std::string_view proposal_id, const std::string& actor,
                                    TextModelBackend* judge);
  void reject_proposal(std::string_view proposal_id);

  /// Session document (audit log excluded; it lives in its own JSONL file).
  nlohmann::json state_document() const;
  static ContestationSession restore(const CaseRecord& base, const nlohmann::json& state,
                                     std::vector<AuditEntry> audit);

 private:
  ContestationSession() = default;

  void mutate(const EditOp& op, QbafGraph& graph, std::vector<EvidencePassage>& user) const;
  Proposal& find_proposal(std::string_view id);

  std::string id_;
  CaseRecord base_;
  QbafGraph graph_;
  StrengthMap strengths_;
  Decision decision_;
  bool review_required_ = false;
  std::set<NodeId> rejected_;
  std::set<NodeId> accepted_;
  std::vector<EvidencePassage> user_passages_;
  std::vector<Proposal> proposals_;
  std::vector<AuditEntry> audit_;
};

/// Review trigger: |sigma_after - sigma_base| > threshold, or a changed answer.
bool needs_review(double sigma_base, double sigma_after, Answer base_answer, Answer after_answer,
                  double threshold);

void to_json(nlohmann::json& j, const ParticipationRow& r);
void to_json(nlohmann::json& j, const ArgumentCard& c);
void to_json(nlohmann::json& j, const ContestationType& t);
void from_json(const nlohmann::json& j, ContestationType& t);
void to_json(nlohmann::json& j, const EditOp& op);
void from_json(const nlohmann::json& j, EditOp& op);
void to_json(nlohmann::json& j, const AuditEntry& e);
void from_json(const nlohmann::json& j, AuditEntry& e);
void to_json(nlohmann::json& j, const ProposalStatus& s);
void from_json(const nlohmann::json& j, ProposalStatus& s);
void to_json(nlohmann::json& j, const Proposal& p);
void from_json(const nlohmann::json& j, Proposal& p);
void to_json(nlohmann::json& j, const Preview& p);

}  // namespace acal
