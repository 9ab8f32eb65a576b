#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "acal/backend.hpp"
#include "acal/qbaf.hpp"

namespace acal {

enum class RelationLabel { Attack, Support, Neutral };

std::string_view to_string(RelationLabel l);

enum class RelationMode { Heuristic, Model };

std::string_view to_string(RelationMode m);
RelationMode parse_relation_mode(std::string_view s);

struct RelationVerdict {
  NodeId first;   // earlier argument in input order
  NodeId second;  // later argument in input order
  RelationLabel label = RelationLabel::Neutral;
  double confidence = 0.0;
  bool demoted = false;  // label was Support/Attack but below the threshold
  bool defaulted = false;  // batch failed twice, or the pair was missing from the reply
};

/// Index pair (i, j) with i < j into the argument list.
using ArgumentPair = std::pair<std::size_t, std::size_t>;

struct BatchPlan {
  std::size_t batch_size = 10;
  std::vector<std::vector<ArgumentPair>> batches;

  std::size_t pair_count() const;
};

/// Same stance: mutual Support; opposite stance: mutual Attack.
std::vector<Edge> heuristic_relations(const std::vector<Argument>& arguments);

/// All C(n,2) pairs in lexicographic (i<j) order, chunked into batches of b.
BatchPlan plan_batches(std::size_t n_arguments, std::size_t batch_size);

struct RelationParams {
  std::size_t batch_size = 10;
  double confidence_threshold = kModelConfidenceFloor;
  std::size_t max_concurrency = 1;

  friend bool operator==(const RelationParams&, const RelationParams&) = default;
};

struct RelationReport {
  RelationMode mode = RelationMode::Model;
  std::vector<Edge> edges;
  std::vector<RelationVerdict> verdicts;  // one per pair, canonical order
  std::size_t batches = 0;
  std::size_t retries = 0;
  std::vector<std::string> warnings;

  std::size_t demotions() const;
};

/// Batched three-way classification. Low-confidence Support/Attack verdicts
/// are demoted to Neutral; survivors become edges in both directions. A batch
/// whose reply cannot be parsed is retried once, then its pairs are Neutral.
RelationReport model_relations(const std::vector<Argument>& arguments, TextModelBackend& backend,
                               const RelationParams& params = {});

RelationReport heuristic_report(const std::vector<Argument>& arguments);

void to_json(nlohmann::json& j, const RelationVerdict& v);
void to_json(nlohmann::json& j, const RelationReport& r);
void to_json(nlohmann::json& j, const RelationMode& m);
void from_json(const nlohmann::json& j, RelationMode& m);

}  // namespace acal
