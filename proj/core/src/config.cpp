#include "acal/config.hpp"

#include <cstdlib>
#include <set>

#include "acal/document.hpp"
#include "acal/error.hpp"

namespace acal {

namespace {

void check_keys(const nlohmann::json& j, std::string_view where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw Error(errc::kConfig, std::string(where) + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items()) {
    if (!ok.contains(key)) {
      throw Error(errc::kConfig, "unknown key '" + key + "' in " + std::string(where));
    }
  }
}

std::optional<bool> env_flag(const char* name) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return std::nullopt;
  const std::string s(v);
  if (s == "1" || s == "true" || s == "on") return true;
  if (s == "0" || s == "false" || s == "off") return false;
  throw Error(errc::kConfig, std::string(name) + " must be 0/1/true/false, got '" + s + "'");
}

}  // namespace

void to_json(nlohmann::json& j, const RelationParams& p) {
  j = nlohmann::json{{"batch_size", p.batch_size}, {"confidence_threshold", p.confidence_threshold}};
}

void from_json(const nlohmann::json& j, RelationParams& p) {
  check_keys(j, "relations", {"batch_size", "confidence_threshold"});
  p.batch_size = j.value("batch_size", p.batch_size);
  p.confidence_threshold = j.value("confidence_threshold", p.confidence_threshold);
}

void validate_config(const PipelineConfig& c) {
  auto fail = [](const std::string& m) { throw Error(errc::kConfig, m); };
  static const std::set<std::string> kinds{"scripted", "replay", "http", "record"};
  if (!kinds.contains(c.backend.kind)) fail("unknown backend kind '" + c.backend.kind + "'");
  for (const auto& [p, spec] : c.routes) {
    if (!kinds.contains(spec.kind)) {
      fail("unknown backend kind '" + spec.kind + "' for route " + std::string(to_string(p)));
    }
  }
  if (c.chunking.window == 0 || c.chunking.overlap >= c.chunking.window) {
    fail("chunking needs window > overlap");
  }
  if (c.relations.batch_size < 1) fail("relations.batch_size must be at least 1");
  if (!(c.relations.confidence_threshold >= kModelConfidenceFloor &&
        c.relations.confidence_threshold <= 1.0)) {
    fail("relations.confidence_threshold must lie in [0.6, 1]");
  }
  if (!(c.arena.delta > 0.0)) fail("arena.delta must be positive");
  if (!(c.arena.beta >= 0.0)) fail("arena.beta must be non-negative");
  if (!(c.solver.damping > 0.0 && c.solver.damping <= 1.0)) fail("solver.damping must lie in (0,1]");
  if (!(c.solver.tolerance > 0.0)) fail("solver.tolerance must be positive");
  if (c.solver.max_iterations < 1) fail("solver.max_iterations must be positive");
  if (!(c.decision.threshold > 0.0 && c.decision.threshold < 1.0)) {
    fail("decision.threshold must lie in (0,1)");
  }
  if (!(c.decision.band_low >= 0.0 && c.decision.band_low <= c.decision.band_high &&
        c.decision.band_high <= 1.0)) {
    fail("decision.band must be a sub-interval of [0,1]");
  }
  if (c.max_concurrency < 1) fail("max_concurrency must be at least 1");
  if (!(c.review_threshold >= 0.0)) fail("review_threshold must be non-negative");
}

nlohmann::json config_to_json(const PipelineConfig& c) {
  nlohmann::json routes = nlohmann::json::object();
  for (const auto& [p, spec] : c.routes) routes[std::string(to_string(p))] = spec;
  nlohmann::json decision = c.decision;
  decision.erase("uae_enabled");  // lives under ablation
  return nlohmann::json{
      {"backend", c.backend},
      {"routes", routes},
      {"corpus_dir", c.corpus_dir.string()},
      {"retrieval_k", c.retrieval_k},
      {"chunking", c.chunking},
      {"relation_mode", c.relation_mode},
      {"relations", c.relations},
      {"arena", c.arena},
      {"solver", c.solver},
      {"decision", decision},
      {"ablation",
       {{"clash_resolution_enabled", c.clash_resolution_enabled},
        {"uae_enabled", c.decision.uae_enabled}}},
      {"seed", c.seed},
      {"max_concurrency", c.max_concurrency},
      {"review_threshold", c.review_threshold},
  };
}

PipelineConfig config_from_json(const nlohmann::json& j) {
  PipelineConfig c;
  try {
    check_keys(j, "config",
               {"backend", "routes", "corpus_dir", "retrieval_k", "chunking", "relation_mode",
                "relations", "arena", "solver", "decision", "ablation", "seed", "max_concurrency",
                "review_threshold"});
    if (auto it = j.find("backend"); it != j.end()) {
      check_keys(*it, "backend",
                 {"kind", "fixtures_dir", "script_path", "endpoint", "model", "api_key_env",
                  "timeout_seconds", "retries", "seed"});
      it->get_to(c.backend);
    }
    if (auto it = j.find("routes"); it != j.end()) {
      check_keys(*it, "routes", {"select", "generate", "score", "relate", "adjudicate", "judge", "contest"});
      for (const auto& [name, spec] : it->items()) {
        BackendSpec s = c.backend;  // routes inherit unspecified fields
        spec.get_to(s);
        c.routes[parse_purpose(name)] = s;
      }
    }
    if (auto it = j.find("corpus_dir"); it != j.end()) c.corpus_dir = it->get<std::string>();
    c.retrieval_k = j.value("retrieval_k", c.retrieval_k);
    if (auto it = j.find("chunking"); it != j.end()) {
      check_keys(*it, "chunking", {"window", "overlap"});
      it->get_to(c.chunking);
    }
    if (auto it = j.find("relation_mode"); it != j.end()) it->get_to(c.relation_mode);
    if (auto it = j.find("relations"); it != j.end()) it->get_to(c.relations);
    if (auto it = j.find("arena"); it != j.end()) {
      check_keys(*it, "arena", {"delta", "beta"});
      it->get_to(c.arena);
    }
    if (auto it = j.find("solver"); it != j.end()) {
      check_keys(*it, "solver", {"damping", "tolerance", "max_iterations"});
      it->get_to(c.solver);
    }
    if (auto it = j.find("decision"); it != j.end()) {
      check_keys(*it, "decision", {"threshold", "band"});
      it->get_to(c.decision);
    }
    if (auto it = j.find("ablation"); it != j.end()) {
      check_keys(*it, "ablation", {"clash_resolution_enabled", "uae_enabled"});
      c.clash_resolution_enabled = it->value("clash_resolution_enabled", c.clash_resolution_enabled);
      c.decision.uae_enabled = it->value("uae_enabled", c.decision.uae_enabled);
    }
    c.seed = j.value("seed", c.seed);
    c.max_concurrency = j.value("max_concurrency", c.max_concurrency);
    c.review_threshold = j.value("review_threshold", c.review_threshold);
  } catch (const nlohmann::json::exception& e) {
    throw Error(errc::kConfig, std::string("malformed config: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == errc::kConfig) throw;
    throw Error(errc::kConfig, e.what());
  }
  c.relations.max_concurrency = c.max_concurrency;
  c.arena.max_concurrency = c.max_concurrency;
  validate_config(c);
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = read_document(path);
  } catch (const Error& e) {
    throw Error(errc::kConfig, "cannot read config " + path.string() + ": " + e.what());
  }
  PipelineConfig c = config_from_json(j);
  // Relative paths are relative to the config file.
  const auto base = path.parent_path();
  auto rebase = [&](std::filesystem::path& p) {
    if (!p.empty() && p.is_relative()) p = base / p;
  };
  rebase(c.corpus_dir);
  rebase(c.backend.fixtures_dir);
  rebase(c.backend.script_path);
  for (auto& [_, spec] : c.routes) {
    rebase(spec.fixtures_dir);
    rebase(spec.script_path);
  }
  return c;
}

void apply_env_overrides(PipelineConfig& c) {
  apply_env_overrides(c.backend);
  for (auto& [_, spec] : c.routes) apply_env_overrides(spec);
  if (const char* m = std::getenv("ACAL_RELATION_MODE"); m != nullptr && *m != '\0') {
    c.relation_mode = parse_relation_mode(m);
  }
  if (auto f = env_flag("ACAL_CLASH_RESOLUTION")) c.clash_resolution_enabled = *f;
  if (auto f = env_flag("ACAL_UAE")) c.decision.uae_enabled = *f;
  validate_config(c);
}

std::optional<std::filesystem::path> discover_config(const std::optional<std::filesystem::path>& flag) {
  if (flag) return flag;
  if (const char* env = std::getenv("ACAL_CONFIG"); env != nullptr && *env != '\0') {
    return std::filesystem::path(env);
  }
  if (std::filesystem::exists("acal.json")) return std::filesystem::path("acal.json");
  return std::nullopt;
}

PipelineConfig merge_config(const PipelineConfig& base, const nlohmann::json& overrides) {
  if (overrides.is_null()) return base;
  if (!overrides.is_object()) throw Error(errc::kConfig, "config overrides must be an object");
  nlohmann::json merged = config_to_json(base);
  merged.merge_patch(overrides);
  return config_from_json(merged);
}

std::shared_ptr<TextModelBackend> make_pipeline_backend(const PipelineConfig& config) {
  auto with_seed = [&](BackendSpec spec) {
    if (!spec.http.seed && config.seed != 0) spec.http.seed = static_cast<int>(config.seed);
    return spec;
  };
  auto main = make_backend(with_seed(config.backend));
  if (config.routes.empty()) return main;
  auto router = std::make_shared<RouterBackend>(main);
  for (const auto& [p, spec] : config.routes) {
    router->route(p, spec == config.backend ? main : make_backend(with_seed(spec)));
  }
  return router;
}

void to_json(nlohmann::json& j, const PipelineConfig& c) { j = config_to_json(c); }
void from_json(const nlohmann::json& j, PipelineConfig& c) { c = config_from_json(j); }

}  // namespace acal
