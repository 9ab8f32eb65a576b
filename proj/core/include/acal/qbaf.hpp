#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace acal {

class NodeId {
 public:
  NodeId() = default;
  explicit NodeId(std::string value) : value_(std::move(value)) {}

  const std::string& str() const noexcept { return value_; }
  bool empty() const noexcept { return value_.empty(); }

  friend auto operator<=>(const NodeId&, const NodeId&) = default;
  friend bool operator==(const NodeId&, const NodeId&) = default;

 private:
  std::string value_;
};

/// Reserved id of the central claim node. Present in every graph.
inline const NodeId kClaimId{"claim"};

inline constexpr double kClaimBaseStrength = 0.5;

/// Model-origin relations below this confidence never become edges.
inline constexpr double kModelConfidenceFloor = 0.6;

enum class Stance { Support, Attack };
enum class RelationKind { Attack, Support };
enum class EdgeOrigin { Heuristic, Model, Human, Construction };

std::string_view to_string(Stance s);
std::string_view to_string(RelationKind k);
std::string_view to_string(EdgeOrigin o);
Stance parse_stance(std::string_view s);
RelationKind parse_relation_kind(std::string_view s);
EdgeOrigin parse_edge_origin(std::string_view s);

inline RelationKind relation_for(Stance s) {
  return s == Stance::Support ? RelationKind::Support : RelationKind::Attack;
}

struct Argument {
  NodeId id;
  std::string text;
  Stance stance = Stance::Support;
  std::string author_role;
  std::vector<std::string> evidence_refs;
  // Unset until the scoring stage runs.
  std::optional<double> base_strength;

  friend bool operator==(const Argument&, const Argument&) = default;
};

struct ClaimNode {
  NodeId id = kClaimId;
  std::string text;
  double base_strength = kClaimBaseStrength;

  friend bool operator==(const ClaimNode&, const ClaimNode&) = default;
};

struct Edge {
  NodeId source;
  NodeId target;
  RelationKind kind = RelationKind::Support;
  double confidence = 1.0;
  EdgeOrigin origin = EdgeOrigin::Construction;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// (source, target, kind) identifies an edge; re-adding one is a no-op.
struct EdgeKey {
  NodeId source;
  NodeId target;
  RelationKind kind;

  friend auto operator<=>(const EdgeKey&, const EdgeKey&) = default;
};

inline EdgeKey key_of(const Edge& e) { return {e.source, e.target, e.kind}; }

struct QbafGraph {
  ClaimNode claim;
  std::vector<Argument> arguments;
  std::vector<Edge> edges;

  bool contains(const NodeId& id) const;
  const Argument* find_argument(const NodeId& id) const;
  Argument* find_argument(const NodeId& id);
  /// Base strength of any node, including the claim. Throws on unknown ids
  /// or unscored arguments.
  double base_strength(const NodeId& id) const;
  std::vector<NodeId> node_ids() const;

  /// Inserts unless an edge with the same key exists. Returns true if added.
  bool add_edge(const Edge& edge);
  /// Removes every edge touching `id` and then the argument itself.
  bool remove_argument(const NodeId& id);
  /// Removes every edge between a and b, in both directions and of any kind.
  std::size_t remove_edges_between(const NodeId& a, const NodeId& b);

  std::vector<const Edge*> incoming(const NodeId& id) const;

  friend bool operator==(const QbafGraph&, const QbafGraph&) = default;
};

struct SolverParams {
  double damping = 0.5;
  double tolerance = 1e-6;
  int max_iterations = 1000;

  friend bool operator==(const SolverParams&, const SolverParams&) = default;
};

struct StrengthMap {
  std::map<NodeId, double> values;
  int iterations = 0;
  double residual = 0.0;
  bool converged = true;

  double at(const NodeId& id) const;
  double claim() const { return at(kClaimId); }

  friend bool operator==(const StrengthMap&, const StrengthMap&) = default;
};

enum class DiagnosticKind {
  DuplicateId,
  DanglingEndpoint,
  SelfLoop,
  StrengthRange,
  MissingStrength,
  EmptyText,
  MissingStanceEdge,
  DuplicateEdge,
  LowConfidenceModelEdge,
};

std::string_view to_string(DiagnosticKind k);

struct Diagnostic {
  DiagnosticKind kind;
  std::string message;
};

/// Builds the argument graph around a fresh claim node with base strength
/// 0.5. Every argument gets a Construction edge to the claim matching its
/// stance; supplied relations are merged with set semantics.
QbafGraph build_graph(std::string claim_text, std::vector<Argument> arguments,
                      const std::vector<Edge>& relations);

/// Reports invariant violations without throwing or mutating.
std::vector<Diagnostic> validate(const QbafGraph& graph);

// Quadratic-energy semantics.

/// Sum of supporter strengths minus sum of attacker strengths for `node`.
double energy(const QbafGraph& graph, const NodeId& node, const StrengthMap& strengths);

/// h(x) = max(x,0)^2 / (1 + max(x,0)^2)
double impact(double x);

/// tau + (1 - tau) h(E) - tau h(-E). At most one of the two impact terms is
/// nonzero, so the result stays in [0, 1].
double local_equilibrium(double tau, double energy);

/// Damped synchronous fixed-point iteration starting from sigma = tau.
/// Iterates past the tolerance (to tolerance/1000) while the budget allows,
/// so deep chains land within tolerance of the exact fixed point.
/// Never throws on non-convergence; check StrengthMap::converged.
StrengthMap solve_equilibrium(const QbafGraph& graph, const SolverParams& params = {});

/// max_j |sigma_j - local_equilibrium(tau_j, E_j(sigma))|
double fixed_point_residual(const QbafGraph& graph, const StrengthMap& strengths);

void to_json(nlohmann::json& j, const NodeId& id);
void from_json(const nlohmann::json& j, NodeId& id);
void to_json(nlohmann::json& j, const Stance& s);
void from_json(const nlohmann::json& j, Stance& s);
void to_json(nlohmann::json& j, const RelationKind& k);
void from_json(const nlohmann::json& j, RelationKind& k);
void to_json(nlohmann::json& j, const EdgeOrigin& o);
void from_json(const nlohmann::json& j, EdgeOrigin& o);
void to_json(nlohmann::json& j, const Argument& a);
void from_json(const nlohmann::json& j, Argument& a);
void to_json(nlohmann::json& j, const ClaimNode& c);
void from_json(const nlohmann::json& j, ClaimNode& c);
void to_json(nlohmann::json& j, const Edge& e);
void from_json(const nlohmann::json& j, Edge& e);
void to_json(nlohmann::json& j, const QbafGraph& g);
void from_json(const nlohmann::json& j, QbafGraph& g);
void to_json(nlohmann::json& j, const StrengthMap& s);
void from_json(const nlohmann::json& j, StrengthMap& s);
void to_json(nlohmann::json& j, const SolverParams& p);
void from_json(const nlohmann::json& j, SolverParams& p);
void to_json(nlohmann::json& j, const Diagnostic& d);

}  // namespace acal

template <>
struct std::hash<acal::NodeId> {
  std::size_t operator()(const acal::NodeId& id) const noexcept {
    return std::hash<std::string>{}(id.str());
  }
};
