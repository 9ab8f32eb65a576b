#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "acal/error.hpp"
#include "acal/qbaf.hpp"

namespace acal {

namespace {

struct InEdge {
  std::size_t source;
  double sign;
};

// Dense view of a graph: index 0 is the claim, then arguments in order.
struct Indexed {
  std::vector<NodeId> ids;
  std::vector<double> tau;
  std::vector<std::vector<InEdge>> in;
};

Indexed index_graph(const QbafGraph& g) {
  Indexed x;
  x.ids = g.node_ids();
  std::unordered_map<NodeId, std::size_t> pos;
  pos.reserve(x.ids.size());
  x.tau.reserve(x.ids.size());
  x.tau.push_back(g.claim.base_strength);
  for (const auto& a : g.arguments) {
    if (!a.base_strength) {
      throw Error(errc::kMissingStrength, "argument '" + a.id.str() + "' has no base strength");
    }
    x.tau.push_back(*a.base_strength);
  }
  for (std::size_t i = 0; i < x.ids.size(); ++i) pos.emplace(x.ids[i], i);
  x.in.resize(x.ids.size());
  for (const auto& e : g.edges) {
    auto s = pos.find(e.source);
    auto t = pos.find(e.target);
    if (s == pos.end() || t == pos.end()) {
      throw Error(errc::kDanglingEdge,
                  "edge " + e.source.str() + " -> " + e.target.str() + " references a missing node");
    }
    x.in[t->second].push_back({s->second, e.kind == RelationKind::Support ? 1.0 : -1.0});
  }
  return x;
}

constexpr double kRefine = 1e-3;

double node_energy(const std::vector<InEdge>& in, const std::vector<double>& sigma) {
  double e = 0.0;
  for (const auto& edge : in) e += edge.sign * sigma[edge.source];
  return e;
}

}  // namespace

double impact(double x) {
  const double p = std::max(x, 0.0);
  const double p2 = p * p;
  return p2 / (1.0 + p2);
}

double local_equilibrium(double tau, double energy) {
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw Error(errc::kStrengthRange, "tau outside [0,1]");
  }
  return tau + (1.0 - tau) * impact(energy) - tau * impact(-energy);
}

double energy(const QbafGraph& graph, const NodeId& node, const StrengthMap& strengths) {
  if (!graph.contains(node)) {
    throw Error(errc::kUnknownNode, "unknown node '" + node.str() + "'");
  }
  double e = 0.0;
  for (const auto& edge : graph.edges) {
    if (edge.target != node) continue;
    auto it = strengths.values.find(edge.source);
    if (it == strengths.values.end()) {
      throw Error(errc::kMissingStrength, "no strength for in-neighbor '" + edge.source.str() + "'");
    }
    e += edge.kind == RelationKind::Support ? it->second : -it->second;
  }
  return e;
}

StrengthMap solve_equilibrium(const QbafGraph& graph, const SolverParams& params) {
  if (!(params.damping > 0.0 && params.damping <= 1.0) || !(params.tolerance > 0.0) ||
      params.max_iterations < 1) {
    throw Error(errc::kInvalidParams, "solver params need damping in (0,1], tolerance > 0, "
                                      "max_iterations >= 1");
  }
  const Indexed x = index_graph(graph);
  const std::size_t n = x.ids.size();
  const double gamma = params.damping;

  std::vector<double> sigma = x.tau;
  std::vector<double> target(n);

  StrengthMap out;
  out.converged = false;
  for (int iter = 0;; ++iter) {
    double residual = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      target[j] = x.in[j].empty() ? x.tau[j] : local_equilibrium(x.tau[j], node_energy(x.in[j], sigma));
      residual = std::max(residual, std::abs(sigma[j] - target[j]));
    }
    out.iterations = iter;
    out.residual = residual;
    out.converged = residual <= params.tolerance;
    // A residual of eps per node still lets errors add up along long chains,
    // so keep going to a tighter target while the budget lasts.
    if (residual <= params.tolerance * kRefine || iter == params.max_iterations) break;
    for (std::size_t j = 0; j < n; ++j) {
      // Leaves stay pinned to tau so they are exact, not merely within tolerance.
      if (x.in[j].empty()) continue;
      sigma[j] = std::clamp((1.0 - gamma) * sigma[j] + gamma * target[j], 0.0, 1.0);
    }
  }

  for (std::size_t j = 0; j < n; ++j) out.values.emplace(x.ids[j], sigma[j]);
  return out;
}

double fixed_point_residual(const QbafGraph& graph, const StrengthMap& strengths) {
  double residual = 0.0;
  for (const auto& id : graph.node_ids()) {
    const double tau = graph.base_strength(id);
    const double e = energy(graph, id, strengths);
    residual = std::max(residual, std::abs(strengths.at(id) - local_equilibrium(tau, e)));
  }
  return residual;
}

}  // namespace acal
