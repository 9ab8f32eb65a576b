#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>

#include <nlohmann/json.hpp>

#include "acal/arena.hpp"
#include "acal/backend.hpp"
#include "acal/decision.hpp"
#include "acal/qbaf.hpp"
#include "acal/relations.hpp"
#include "acal/retrieval.hpp"

namespace acal {

/// Everything a pipeline run depends on. A copy is stored in every case.
///
/// Document keys: backend, routes, corpus_dir, retrieval_k, chunking,
/// relation_mode, relations, arena, solver, decision, ablation
/// {clash_resolution_enabled, uae_enabled}, seed, max_concurrency,
/// review_threshold. Unknown keys are rejected.
struct PipelineConfig {
  BackendSpec backend;
  std::map<Purpose, BackendSpec> routes;  // per-purpose overrides of `backend`

  std::filesystem::path corpus_dir;  // empty: no corpus
  std::size_t retrieval_k = 5;
  ChunkParams chunking;

  RelationMode relation_mode = RelationMode::Model;
  RelationParams relations;
  ArenaParams arena;
  SolverParams solver;
  DecisionParams decision;  // decision.uae_enabled is the UAE ablation switch
  bool clash_resolution_enabled = true;

  std::uint64_t seed = 0;
  std::size_t max_concurrency = 1;
  double review_threshold = 0.1;  // |delta sigma(claim)| above this needs review

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

/// Throws CONFIG_INVALID on out-of-range values.
void validate_config(const PipelineConfig& config);

/// Strict parse: unknown keys and wrong types raise CONFIG_INVALID.
PipelineConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const PipelineConfig& config);

PipelineConfig load_config(const std::filesystem::path& path);

/// Environment overrides: the backend variables of apply_env_overrides plus
/// ACAL_RELATION_MODE, ACAL_CLASH_RESOLUTION, ACAL_UAE (0/1/true/false).
void apply_env_overrides(PipelineConfig& config);

/// Explicit path, else $ACAL_CONFIG, else ./acal.json if present.
std::optional<std::filesystem::path> discover_config(const std::optional<std::filesystem::path>& flag);

/// Overlays a partial config document (as sent to the service) on `base`.
PipelineConfig merge_config(const PipelineConfig& base, const nlohmann::json& overrides);

/// The backend to use for each purpose, honouring routes.
std::shared_ptr<TextModelBackend> make_pipeline_backend(const PipelineConfig& config);

void to_json(nlohmann::json& j, const PipelineConfig& c);
void from_json(const nlohmann::json& j, PipelineConfig& c);
void to_json(nlohmann::json& j, const RelationParams& p);
void from_json(const nlohmann::json& j, RelationParams& p);

}  // namespace acal
