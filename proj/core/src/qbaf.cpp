#include "acal/qbaf.hpp"

#include <algorithm>
#include <set>

#include "acal/error.hpp"

namespace acal {

std::string_view to_string(Stance s) { return s == Stance::Support ? "Support" : "Attack"; }

std::string_view to_string(RelationKind k) {
  return k == RelationKind::Support ? "Support" : "Attack";
}

std::string_view to_string(EdgeOrigin o) {
  switch (o) {
    case EdgeOrigin::Heuristic: return "Heuristic";
    case EdgeOrigin::Model: return "Model";
    case EdgeOrigin::Human: return "Human";
    case EdgeOrigin::Construction: return "Construction";
  }
  return "Construction";
}

Stance parse_stance(std::string_view s) {
  if (s == "Support") return Stance::Support;
  if (s == "Attack") return Stance::Attack;
  throw Error(errc::kBadDocument, "unknown stance '" + std::string(s) + "'");
}

RelationKind parse_relation_kind(std::string_view s) {
  if (s == "Support") return RelationKind::Support;
  if (s == "Attack") return RelationKind::Attack;
  throw Error(errc::kBadDocument, "unknown relation kind '" + std::string(s) + "'");
}

EdgeOrigin parse_edge_origin(std::string_view s) {
  if (s == "Heuristic") return EdgeOrigin::Heuristic;
  if (s == "Model") return EdgeOrigin::Model;
  if (s == "Human") return EdgeOrigin::Human;
  if (s == "Construction") return EdgeOrigin::Construction;
  throw Error(errc::kBadDocument, "unknown edge origin '" + std::string(s) + "'");
}

std::string_view to_string(DiagnosticKind k) {
  switch (k) {
    case DiagnosticKind::DuplicateId: return "duplicate-id";
    case DiagnosticKind::DanglingEndpoint: return "dangling-endpoint";
    case DiagnosticKind::SelfLoop: return "self-loop";
    case DiagnosticKind::StrengthRange: return "strength-range";
    case DiagnosticKind::MissingStrength: return "missing-strength";
    case DiagnosticKind::EmptyText: return "empty-text";
    case DiagnosticKind::MissingStanceEdge: return "missing-stance-edge";
    case DiagnosticKind::DuplicateEdge: return "duplicate-edge";
    case DiagnosticKind::LowConfidenceModelEdge: return "low-confidence-model-edge";
  }
  return "unknown";
}

bool QbafGraph::contains(const NodeId& id) const {
  return id == claim.id || find_argument(id) != nullptr;
}

const Argument* QbafGraph::find_argument(const NodeId& id) const {
  auto it = std::find_if(arguments.begin(), arguments.end(),
                         [&](const Argument& a) { return a.id == id; });
  return it == arguments.end() ? nullptr : &*it;
}

Argument* QbafGraph::find_argument(const NodeId& id) {
  auto it = std::find_if(arguments.begin(), arguments.end(),
                         [&](const Argument& a) { return a.id == id; });
  return it == arguments.end() ? nullptr : &*it;
}

double QbafGraph::base_strength(const NodeId& id) const {
  if (id == claim.id) return claim.base_strength;
  const Argument* a = find_argument(id);
  if (a == nullptr) {
    throw Error(errc::kUnknownNode, "unknown node '" + id.str() + "'");
  }
  if (!a->base_strength) {
    throw Error(errc::kMissingStrength, "argument '" + id.str() + "' has no base strength");
  }
  return *a->base_strength;
}

std::vector<NodeId> QbafGraph::node_ids() const {
  std::vector<NodeId> ids;
  ids.reserve(arguments.size() + 1);
  ids.push_back(claim.id);
  for (const auto& a : arguments) ids.push_back(a.id);
  return ids;
}

bool QbafGraph::add_edge(const Edge& edge) {
  const EdgeKey k = key_of(edge);
  for (const auto& e : edges) {
    if (key_of(e) == k) return false;
  }
  edges.push_back(edge);
  return true;
}

bool QbafGraph::remove_argument(const NodeId& id) {
  auto it = std::find_if(arguments.begin(), arguments.end(),
                         [&](const Argument& a) { return a.id == id; });
  if (it == arguments.end()) return false;
  arguments.erase(it);
  std::erase_if(edges, [&](const Edge& e) { return e.source == id || e.target == id; });
  return true;
}

std::size_t QbafGraph::remove_edges_between(const NodeId& a, const NodeId& b) {
  return std::erase_if(edges, [&](const Edge& e) {
    return (e.source == a && e.target == b) || (e.source == b && e.target == a);
  });
}

std::vector<const Edge*> QbafGraph::incoming(const NodeId& id) const {
  std::vector<const Edge*> out;
  for (const auto& e : edges) {
    if (e.target == id) out.push_back(&e);
  }
  return out;
}

double StrengthMap::at(const NodeId& id) const {
  auto it = values.find(id);
  if (it == values.end()) {
    throw Error(errc::kUnknownNode, "no strength for '" + id.str() + "'");
  }
  return it->second;
}

QbafGraph build_graph(std::string claim_text, std::vector<Argument> arguments,
                      const std::vector<Edge>& relations) {
  QbafGraph g;
  g.claim.text = std::move(claim_text);

  std::set<NodeId> seen{kClaimId};
  for (const auto& a : arguments) {
    if (a.id.empty()) {
      throw Error(errc::kDuplicateId, "argument with empty id");
    }
    if (!seen.insert(a.id).second) {
      throw Error(errc::kDuplicateId, "duplicate node id '" + a.id.str() + "'");
    }
    if (a.text.empty()) {
      throw Error(errc::kEmptyText, "argument '" + a.id.str() + "' has empty text");
    }
    if (!a.base_strength) {
      throw Error(errc::kMissingStrength, "argument '" + a.id.str() + "' is unscored");
    }
    if (*a.base_strength < 0.0 || *a.base_strength > 1.0) {
      throw Error(errc::kStrengthRange, "base strength of '" + a.id.str() + "' outside [0,1]");
    }
  }
  g.arguments = std::move(arguments);

  for (const auto& a : g.arguments) {
    g.add_edge(Edge{a.id, kClaimId, relation_for(a.stance), 1.0, EdgeOrigin::Construction});
  }

  for (const auto& r : relations) {
    const Argument* src = g.find_argument(r.source);
    if (src == nullptr) {
      throw Error(errc::kDanglingEdge, "relation source '" + r.source.str() + "' is not an argument");
    }
    if (!g.contains(r.target)) {
      throw Error(errc::kDanglingEdge, "relation target '" + r.target.str() + "' does not exist");
    }
    if (r.source == r.target) {
      throw Error(errc::kSelfLoop, "self relation on '" + r.source.str() + "'");
    }
    if (r.target == kClaimId && r.kind != relation_for(src->stance)) {
      throw Error(errc::kStanceParity,
                  "relation " + r.source.str() + " -> claim contradicts the argument's stance");
    }
    if (r.confidence < 0.0 || r.confidence > 1.0) {
      throw Error(errc::kInvalidParams, "relation confidence outside [0,1]");
    }
    if (r.origin == EdgeOrigin::Model && r.confidence < kModelConfidenceFloor) {
      throw Error(errc::kInvalidParams, "model relation below the confidence floor");
    }
    g.add_edge(r);
  }
  return g;
}

std::vector<Diagnostic> validate(const QbafGraph& graph) {
  std::vector<Diagnostic> out;
  auto report = [&](DiagnosticKind k, std::string msg) { out.push_back({k, std::move(msg)}); };

  if (graph.claim.base_strength < 0.0 || graph.claim.base_strength > 1.0) {
    report(DiagnosticKind::StrengthRange, "claim base strength outside [0,1]");
  }
  std::set<NodeId> ids{graph.claim.id};
  for (const auto& a : graph.arguments) {
    if (!ids.insert(a.id).second) {
      report(DiagnosticKind::DuplicateId, "duplicate id '" + a.id.str() + "'");
    }
    if (a.text.empty()) {
      report(DiagnosticKind::EmptyText, "argument '" + a.id.str() + "' has empty text");
    }
    if (!a.base_strength) {
      report(DiagnosticKind::MissingStrength, "argument '" + a.id.str() + "' is unscored");
    } else if (*a.base_strength < 0.0 || *a.base_strength > 1.0) {
      report(DiagnosticKind::StrengthRange, "base strength of '" + a.id.str() + "' outside [0,1]");
    }
  }

  std::set<EdgeKey> keys;
  for (const auto& e : graph.edges) {
    const bool src_ok = ids.contains(e.source);
    const bool dst_ok = ids.contains(e.target);
    if (!src_ok || !dst_ok) {
      report(DiagnosticKind::DanglingEndpoint,
             "edge " + e.source.str() + " -> " + e.target.str() + " references a missing node");
    }
    if (e.source == e.target) {
      report(DiagnosticKind::SelfLoop, "self edge on '" + e.source.str() + "'");
    }
    if (!keys.insert(key_of(e)).second) {
      report(DiagnosticKind::DuplicateEdge,
             "duplicate edge " + e.source.str() + " -> " + e.target.str());
    }
    if (e.origin == EdgeOrigin::Model && e.confidence < kModelConfidenceFloor) {
      report(DiagnosticKind::LowConfidenceModelEdge,
             "model edge " + e.source.str() + " -> " + e.target.str() + " below confidence floor");
    }
  }

  for (const auto& a : graph.arguments) {
    if (!keys.contains(EdgeKey{a.id, graph.claim.id, relation_for(a.stance)})) {
      report(DiagnosticKind::MissingStanceEdge,
             "argument '" + a.id.str() + "' lacks its stance edge to the claim");
    }
  }
  return out;
}

// JSON

void to_json(nlohmann::json& j, const NodeId& id) { j = id.str(); }
void from_json(const nlohmann::json& j, NodeId& id) { id = NodeId(j.get<std::string>()); }

void to_json(nlohmann::json& j, const Stance& s) { j = std::string(to_string(s)); }
void from_json(const nlohmann::json& j, Stance& s) { s = parse_stance(j.get<std::string>()); }

void to_json(nlohmann::json& j, const RelationKind& k) { j = std::string(to_string(k)); }
void from_json(const nlohmann::json& j, RelationKind& k) {
  k = parse_relation_kind(j.get<std::string>());
}

void to_json(nlohmann::json& j, const EdgeOrigin& o) { j = std::string(to_string(o)); }
void from_json(const nlohmann::json& j, EdgeOrigin& o) {
  o = parse_edge_origin(j.get<std::string>());
}

void to_json(nlohmann::json& j, const Argument& a) {
  j = nlohmann::json{{"id", a.id},
                     {"text", a.text},
                     {"stance", a.stance},
                     {"author_role", a.author_role},
                     {"evidence_refs", a.evidence_refs},
                     {"base_strength", nullptr}};
  if (a.base_strength) j["base_strength"] = *a.base_strength;
}

void from_json(const nlohmann::json& j, Argument& a) {
  j.at("id").get_to(a.id);
  j.at("text").get_to(a.text);
  j.at("stance").get_to(a.stance);
  a.author_role = j.value("author_role", std::string{});
  a.evidence_refs = j.value("evidence_refs", std::vector<std::string>{});
  const auto it = j.find("base_strength");
  if (it != j.end() && !it->is_null()) {
    a.base_strength = it->get<double>();
  } else {
    a.base_strength.reset();
  }
}

void to_json(nlohmann::json& j, const ClaimNode& c) {
  j = nlohmann::json{{"id", c.id}, {"text", c.text}, {"base_strength", c.base_strength}};
}

void from_json(const nlohmann::json& j, ClaimNode& c) {
  j.at("id").get_to(c.id);
  j.at("text").get_to(c.text);
  j.at("base_strength").get_to(c.base_strength);
}

void to_json(nlohmann::json& j, const Edge& e) {
  j = nlohmann::json{{"source", e.source},
                     {"target", e.target},
                     {"kind", e.kind},
                     {"confidence", e.confidence},
                     {"origin", e.origin}};
}

void from_json(const nlohmann::json& j, Edge& e) {
  j.at("source").get_to(e.source);
  j.at("target").get_to(e.target);
  j.at("kind").get_to(e.kind);
  j.at("confidence").get_to(e.confidence);
  j.at("origin").get_to(e.origin);
}

void to_json(nlohmann::json& j, const QbafGraph& g) {
  j = nlohmann::json{{"claim", g.claim}, {"arguments", g.arguments}, {"edges", g.edges}};
}

void from_json(const nlohmann::json& j, QbafGraph& g) {
  j.at("claim").get_to(g.claim);
  j.at("arguments").get_to(g.arguments);
  j.at("edges").get_to(g.edges);
}

void to_json(nlohmann::json& j, const StrengthMap& s) {
  nlohmann::json values = nlohmann::json::object();
  for (const auto& [id, v] : s.values) values[id.str()] = v;
  j = nlohmann::json{{"values", std::move(values)},
                     {"iterations", s.iterations},
                     {"residual", s.residual},
                     {"converged", s.converged}};
}

void from_json(const nlohmann::json& j, StrengthMap& s) {
  s.values.clear();
  for (const auto& [k, v] : j.at("values").items()) s.values[NodeId(k)] = v.get<double>();
  j.at("iterations").get_to(s.iterations);
  j.at("residual").get_to(s.residual);
  j.at("converged").get_to(s.converged);
}

void to_json(nlohmann::json& j, const SolverParams& p) {
  j = nlohmann::json{
      {"damping", p.damping}, {"tolerance", p.tolerance}, {"max_iterations", p.max_iterations}};
}

void from_json(const nlohmann::json& j, SolverParams& p) {
  p.damping = j.value("damping", p.damping);
  p.tolerance = j.value("tolerance", p.tolerance);
  p.max_iterations = j.value("max_iterations", p.max_iterations);
}

void to_json(nlohmann::json& j, const Diagnostic& d) {
  j = nlohmann::json{{"kind", std::string(to_string(d.kind))}, {"message", d.message}};
}

}  // namespace acal
