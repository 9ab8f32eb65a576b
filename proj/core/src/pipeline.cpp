#include "acal/pipeline.hpp"

#include <chrono>
#include <ctime>
#include <optional>

#include "acal/arena.hpp"
#include "acal/document.hpp"
#include "acal/parallel.hpp"
#include "acal/relations.hpp"

namespace acal {

const StageEntry* CaseRecord::find_stage(std::string_view name) const {
  for (const auto& s : trace) {
    if (s.stage == name) return &s;
  }
  return nullptr;
}

PipelineResources make_resources(const PipelineConfig& config) {
  PipelineResources r;
  r.backend = make_pipeline_backend(config);
  if (!config.corpus_dir.empty()) {
    r.corpus = std::make_shared<const CorpusIndex>(
        index_corpus(load_corpus_dir(config.corpus_dir), config.chunking));
  }
  return r;
}

std::string case_id_for(const TaskInput& input, const PipelineConfig& config) {
  const nlohmann::json material{{"input", input}, {"config", config}};
  return "case-" + sha256_hex(to_document(material)).substr(0, 12);
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

// Runs `fn`, turning backend absence into a stage-tagged abort.
template <typename F>
auto in_stage(std::string_view name, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const PipelineError&) {
    throw;
  } catch (const BackendUnavailable& e) {
    throw PipelineError(std::string(name), e);
  }
}

StageEntry open_stage(std::string_view name) {
  StageEntry e;
  e.stage = std::string(name);
  return e;
}

struct AgentJob {
  AgentProfile agent;
  Stance stance;
};

struct AgentYield {
  std::vector<Argument> arguments;
  std::vector<std::string> warnings;
};

struct ScoreYield {
  std::optional<ScoreResult> score;
  std::string failure;
};

}  // namespace

CaseRecord run_case(const TaskInput& input, const PipelineConfig& config,
                    const PipelineResources& resources, const Clock& clock) {
  validate_config(config);
  if (input.claim.empty()) throw Error(errc::kEmptyText, "claim must not be empty");
  if (!resources.backend) throw Error(errc::kConfig, "pipeline has no backend");

  CaseRecord rec;
  rec.case_id = case_id_for(input, config);
  rec.config = config;
  TextModelBackend& backend = *resources.backend;
  const std::size_t workers = config.max_concurrency;

  // Retrieval and context assembly.
  {
    StageEntry e = open_stage(stage::kRetrieval);
    static const CorpusIndex kEmpty;
    static const NullWebSearch kNoWeb;
    const CorpusIndex& corpus = resources.corpus ? *resources.corpus : kEmpty;
    const WebSearch& web = resources.web ? *resources.web : static_cast<const WebSearch&>(kNoWeb);
    auto passages = retrieve_hybrid(corpus, web, input.claim, config.retrieval_k);
    for (auto p : input.passages) {
      p.provenance = Provenance::UserSubmitted;
      passages.push_back(std::move(p));
    }
    rec.task.task_id = input.task_id;
    rec.task.claim = input.claim;
    rec.task.metadata = input.metadata;
    rec.task.context = assemble_context(input.claim, std::move(passages));
    e.details = {{"k", config.retrieval_k},
                 {"corpus_passages", corpus.passages().size()},
                 {"passage_ids", rec.task.context.ids()}};
    rec.trace.push_back(std::move(e));
  }

  // Team selection for both stances.
  std::vector<AgentJob> jobs;
  {
    StageEntry e = open_stage(stage::kTeamSelection);
    nlohmann::json teams = nlohmann::json::object();
    for (Stance stance : {Stance::Support, Stance::Attack}) {
      TeamSelection sel;
      try {
        sel = in_stage(stage::kTeamSelection,
                       [&] { return select_team(resources.pool, rec.task, stance, backend); });
      } catch (const PipelineError&) {
        throw;
      } catch (const Error& err) {
        e.warnings.push_back(std::string("team selection failed for ") +
                             std::string(to_string(stance)) + ", using fallback team: " + err.what());
        sel.stance = stance;
        sel.used_fallback = true;
        for (const auto& role : fallback_roles(stance)) {
          if (const auto* p = resources.pool.find(role)) sel.team.push_back(*p);
        }
      }
      for (const auto& agent : sel.team) jobs.push_back({agent, stance});
      teams[std::string(to_string(stance))] = sel;
    }
    e.details = {{"teams", teams}};
    rec.trace.push_back(std::move(e));
  }

  // Argument generation, one backend call per agent.
  std::vector<Argument> arguments;
  {
    StageEntry e = open_stage(stage::kGeneration);
    auto yields = in_stage(stage::kGeneration, [&] {
      return parallel_map(
          jobs,
          [&](const AgentJob& job) {
            AgentYield y;
            try {
              auto g = generate_arguments(job.agent, rec.task, job.stance, backend);
              y.arguments = std::move(g.arguments);
              y.warnings = std::move(g.warnings);
            } catch (const BackendUnavailable&) {
              throw;
            } catch (const Error& err) {
              y.warnings.push_back(job.agent.role + " (" + std::string(to_string(job.stance)) +
                                   "): " + err.what());
            }
            return y;
          },
          workers);
    });
    nlohmann::json per_agent = nlohmann::json::array();
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      per_agent.push_back({{"role", jobs[i].agent.role},
                           {"stance", jobs[i].stance},
                           {"arguments", yields[i].arguments.size()}});
      for (auto& w : yields[i].warnings) e.warnings.push_back(std::move(w));
      for (auto& a : yields[i].arguments) arguments.push_back(std::move(a));
    }
    e.details = {{"agents", per_agent}, {"arguments", arguments.size()}};
    rec.trace.push_back(std::move(e));
  }

  // Intrinsic scoring. Arguments that cannot be scored are dropped.
  {
    StageEntry e = open_stage(stage::kScoring);
    auto scores = in_stage(stage::kScoring, [&] {
      return parallel_map(
          arguments,
          [&](const Argument& a) {
            ScoreYield y;
            try {
              y.score = score_argument(a, rec.task, backend);
            } catch (const BackendUnavailable&) {
              throw;
            } catch (const Error& err) {
              y.failure = err.what();
            }
            return y;
          },
          workers);
    });
    std::vector<Argument> scored;
    nlohmann::json values = nlohmann::json::object();
    nlohmann::json clamped = nlohmann::json::array();
    for (std::size_t i = 0; i < arguments.size(); ++i) {
      if (!scores[i].score) {
        e.warnings.push_back("dropped " + arguments[i].id.str() + ": " + scores[i].failure);
        continue;
      }
      for (auto& w : scores[i].score->warnings) e.warnings.push_back(std::move(w));
      if (scores[i].score->clamped) clamped.push_back(arguments[i].id);
      arguments[i].base_strength = scores[i].score->value;
      values[arguments[i].id.str()] = scores[i].score->value;
      scored.push_back(std::move(arguments[i]));
    }
    arguments = std::move(scored);
    e.details = {{"scores", values}, {"clamped", clamped}};
    rec.trace.push_back(std::move(e));
  }

  // Relation identification.
  std::vector<Edge> relations;
  {
    StageEntry e = open_stage(stage::kRelations);
    RelationReport report;
    if (config.relation_mode == RelationMode::Heuristic) {
      report = heuristic_report(arguments);
    } else {
      RelationParams p = config.relations;
      p.max_concurrency = workers;
      report = in_stage(stage::kRelations, [&] { return model_relations(arguments, backend, p); });
    }
    relations = report.edges;
    e.warnings = report.warnings;
    e.details = report;
    e.details.erase("warnings");
    rec.trace.push_back(std::move(e));
  }

  // Clash resolution recalibrates tau before propagation.
  if (config.clash_resolution_enabled) {
    StageEntry e = open_stage(stage::kClashResolution);
    ArenaParams p = config.arena;
    p.max_concurrency = workers;
    auto result = in_stage(stage::kClashResolution,
                           [&] { return apply_clash_resolution(arguments, rec.task, p, backend); });
    arguments = std::move(result.arguments);
    e.warnings = result.warnings;
    e.details = result;
    e.details.erase("warnings");
    e.details["params"] = p;
    rec.trace.push_back(std::move(e));
  }

  {
    StageEntry e = open_stage(stage::kGraphConstruction);
    rec.graph = build_graph(input.claim, arguments, relations);
    for (const auto& d : validate(rec.graph)) e.warnings.push_back(d.message);
    e.details = {{"nodes", rec.graph.arguments.size() + 1}, {"edges", rec.graph.edges.size()}};
    rec.trace.push_back(std::move(e));
  }

  {
    StageEntry e = open_stage(stage::kSolver);
    rec.strengths = solve_equilibrium(rec.graph, config.solver);
    if (!rec.strengths.converged) {
      e.warnings.push_back("solver did not converge within " +
                           std::to_string(config.solver.max_iterations) + " iterations");
    }
    e.details = {{"iterations", rec.strengths.iterations},
                 {"residual", rec.strengths.residual},
                 {"converged", rec.strengths.converged},
                 {"params", config.solver}};
    rec.trace.push_back(std::move(e));
  }

  {
    StageEntry e = open_stage(stage::kDecision);
    rec.decision = decide(rec.strengths.claim(), config.decision, rec.task, &backend,
                          summarize_for_judge(rec.graph, rec.strengths));
    e.warnings = rec.decision.warnings;
    e.details = {{"claim_strength", rec.decision.claim_strength},
                 {"in_band", config.decision.in_band(rec.decision.claim_strength)},
                 {"decided_by", rec.decision.decided_by},
                 {"answer", rec.decision.answer}};
    rec.trace.push_back(std::move(e));
  }

  rec.created_at = clock ? clock() : std::string{};
  return rec;
}

nlohmann::json canonical_form(const CaseRecord& record) {
  nlohmann::json j = record;
  j.erase("created_at");
  return j;
}

void to_json(nlohmann::json& j, const StageEntry& s) {
  j = nlohmann::json{{"stage", s.stage}, {"details", s.details}, {"warnings", s.warnings}};
}

void from_json(const nlohmann::json& j, StageEntry& s) {
  j.at("stage").get_to(s.stage);
  s.details = j.value("details", nlohmann::json::object());
  s.warnings = j.value("warnings", std::vector<std::string>{});
}

void to_json(nlohmann::json& j, const TaskInput& t) {
  j = nlohmann::json{{"task_id", t.task_id},
                     {"claim", t.claim},
                     {"metadata", t.metadata},
                     {"passages", t.passages}};
}

void from_json(const nlohmann::json& j, TaskInput& t) {
  t.task_id = j.value("task_id", std::string{});
  j.at("claim").get_to(t.claim);
  t.metadata = j.value("metadata", std::map<std::string, std::string>{});
  t.passages.clear();
  if (auto it = j.find("passages"); it != j.end()) {
    for (const auto& p : *it) {
      // Callers may send just {passage_id, text}.
      EvidencePassage ep;
      ep.passage_id = p.at("passage_id").get<std::string>();
      ep.text = p.at("text").get<std::string>();
      ep.document_id = p.value("document_id", ep.passage_id);
      ep.relevance = p.value("relevance", 0.0);
      ep.provenance = Provenance::UserSubmitted;
      t.passages.push_back(std::move(ep));
    }
  }
}

void to_json(nlohmann::json& j, const CaseRecord& r) {
  j = nlohmann::json{{"case_id", r.case_id},     {"task", r.task},
                     {"graph", r.graph},         {"strengths", r.strengths},
                     {"decision", r.decision},   {"trace", r.trace},
                     {"created_at", r.created_at}, {"config", r.config}};
}

void from_json(const nlohmann::json& j, CaseRecord& r) {
  j.at("case_id").get_to(r.case_id);
  j.at("task").get_to(r.task);
  j.at("graph").get_to(r.graph);
  j.at("strengths").get_to(r.strengths);
  j.at("decision").get_to(r.decision);
  j.at("trace").get_to(r.trace);
  r.created_at = j.value("created_at", std::string{});
  r.config = config_from_json(j.at("config"));
}

}  // namespace acal
