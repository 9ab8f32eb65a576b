#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <optional>

#include "acal/bench.hpp"
#include "acal/config.hpp"
#include "acal/document.hpp"
#include "acal/error.hpp"
#include "acal/pipeline.hpp"
#include "acal/service.hpp"
#include "acal/store.hpp"

namespace acal::cli {

namespace fs = std::filesystem;

namespace {

// Flags that mirror PipelineConfig. Unset flags leave the config alone.
struct PipelineFlags {
  std::optional<std::string> config_path;
  std::optional<std::string> backend;
  std::optional<std::string> fixtures;
  std::optional<std::string> script;
  std::optional<std::string> corpus;
  std::optional<std::size_t> k;
  std::optional<std::string> relation_mode;
  std::optional<std::size_t> batch_size;
  std::optional<double> confidence;
  std::optional<double> delta;
  std::optional<double> beta;
  std::optional<double> threshold;
  std::optional<std::string> cr;
  std::optional<std::string> uae;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> concurrency;
  std::optional<double> review_threshold;

  void attach(CLI::App* app) {
    app->add_option("-c,--config", config_path, "Config file (else $ACAL_CONFIG, else ./acal.json)");
    app->add_option("--backend", backend, "Backend kind")
        ->check(CLI::IsMember({"scripted", "replay", "http", "record"}));
    app->add_option("--fixtures", fixtures, "Replay/record fixture directory");
    app->add_option("--script", script, "Scripted backend rules");
    app->add_option("--corpus", corpus, "Corpus directory");
    app->add_option("-k,--retrieval-k", k, "Passages retrieved per case");
    app->add_option("--relation-mode", relation_mode, "heuristic or model")
        ->check(CLI::IsMember({"heuristic", "model"}));
    app->add_option("--batch-size", batch_size, "Pairs per relation call")->check(CLI::PositiveNumber);
    app->add_option("--confidence-threshold", confidence, "Minimum relation confidence");
    app->add_option("--delta", delta, "Clash gap threshold");
    app->add_option("--beta", beta, "Clash adjustment magnitude");
    app->add_option("--threshold", threshold, "Decision threshold");
    app->add_option("--clash-resolution", cr, "on or off")->check(CLI::IsMember({"on", "off"}));
    app->add_option("--uae", uae, "Escalation of borderline cases: on or off")
        ->check(CLI::IsMember({"on", "off"}));
    app->add_option("--seed", seed, "Seed forwarded to model backends");
    app->add_option("-j,--concurrency", concurrency, "Parallel backend calls per stage");
    app->add_option("--review-threshold", review_threshold, "Claim shift that flags human review");
  }

  PipelineConfig resolve() const {
    PipelineConfig c;
    std::optional<fs::path> flag;
    if (config_path) flag = fs::path(*config_path);
    if (auto path = discover_config(flag)) c = load_config(*path);
    apply_env_overrides(c);
    if (backend) c.backend.kind = *backend;
    if (fixtures) c.backend.fixtures_dir = *fixtures;
    if (script) c.backend.script_path = *script;
    if (corpus) c.corpus_dir = *corpus;
    if (k) c.retrieval_k = *k;
    if (relation_mode) c.relation_mode = parse_relation_mode(*relation_mode);
    if (batch_size) c.relations.batch_size = *batch_size;
    if (confidence) c.relations.confidence_threshold = *confidence;
    if (delta) c.arena.delta = *delta;
    if (beta) c.arena.beta = *beta;
    if (threshold) c.decision.threshold = *threshold;
    if (cr) c.clash_resolution_enabled = *cr == "on";
    if (uae) c.decision.uae_enabled = *uae == "on";
    if (seed) c.seed = *seed;
    if (concurrency) c.max_concurrency = *concurrency;
    if (review_threshold) c.review_threshold = *review_threshold;
    validate_config(c);
    return c;
  }
};

struct CaseFlags {
  std::optional<std::string> claim;
  std::optional<std::string> input;
  std::string task_id = "cli";
  std::vector<std::string> passages;

  void attach(CLI::App* app, bool required) {
    auto* group = app->add_option_group("case");
    group->add_option("--claim", claim, "Claim text");
    group->add_option("--input", input, "Task input document");
    if (required) {
      group->require_option(1);
    } else {
      group->require_option(0, 1);
    }
    app->add_option("--task-id", task_id, "Task id for --claim");
    app->add_option("--passage", passages, "Extra evidence passage (repeatable)");
  }

  bool present() const { return claim || input; }

  TaskInput resolve() const {
    TaskInput t;
    if (input) {
      t = document_as<TaskInput>(read_document(*input));
    } else {
      t.task_id = task_id;
      t.claim = *claim;
    }
    for (const auto& text : passages) {
      EvidencePassage p;
      p.passage_id = "cli-" + std::to_string(t.passages.size() + 1);
      p.document_id = "cli";
      p.text = text;
      p.provenance = Provenance::UserSubmitted;
      t.passages.push_back(std::move(p));
    }
    return t;
  }
};

struct BenchFlags {
  std::string task;
  std::string data;
  std::optional<std::string> output;
  std::size_t workers = 1;
  bool exclude_failures = false;
  double zero_division = 0.0;

  void attach(CLI::App* app, bool required) {
    auto* t = app->add_option("--task", task, "Task name")->check(CLI::IsMember(known_tasks()));
    auto* d = app->add_option("--data", data, "Task file (.tsv, .json or .jsonl)");
    if (required) {
      t->required();
      d->required();
    }
    app->add_option("-o,--output", output, "Directory for reports and predictions");
    app->add_option("-w,--workers", workers, "Examples evaluated concurrently")->check(CLI::PositiveNumber);
    app->add_flag("--exclude-failures", exclude_failures, "Drop failed examples from the metrics");
    app->add_option("--zero-division", zero_division, "Metric value for empty denominators")
        ->check(CLI::IsMember({0.0, 1.0}));
  }

  BenchmarkOptions options() const {
    BenchmarkOptions o;
    o.metrics.zero_division = zero_division;
    o.exclude_failures = exclude_failures;
    o.workers = workers;
    if (output) o.output_dir = *output;
    return o;
  }
};

std::vector<GridPoint> make_grid(const std::string& name, const std::vector<double>& betas) {
  if (name == "cr-uae") return cr_uae_grid();
  if (name == "beta") return betas.empty() ? beta_grid() : beta_grid(betas);
  return single_point();
}

void print_case(std::ostream& out, const CaseRecord& rec) {
  char sigma[32];
  std::snprintf(sigma, sizeof sigma, "%.6f", rec.strengths.claim());
  out << "case            " << rec.case_id << "\n"
      << "claim_strength  " << sigma << "\n"
      << "decision        " << to_string(rec.decision.answer) << " (" << to_string(rec.decision.decided_by)
      << ")\n";
  std::size_t warnings = rec.decision.warnings.size();
  for (const auto& s : rec.trace) warnings += s.warnings.size();
  if (warnings) out << "warnings        " << warnings << "\n";
}

std::vector<BenchmarkPoint> bench(const BenchFlags& flags, const PipelineConfig& config,
                                  const std::vector<GridPoint>& grid, std::ostream& out) {
  const auto task = task_definition(flags.task);
  const auto examples = load_task(flags.data, task);
  const auto options = flags.options();
  if (!options.output_dir.empty()) fs::create_directories(options.output_dir);
  auto points = run_benchmark(task, examples, config, grid, make_resources(config), options);
  out << format_table(points);
  if (!options.output_dir.empty()) out << "reports written to " << (options.output_dir / "reports.json").string() << "\n";
  return points;
}

std::size_t count_files(const fs::path& dir) {
  std::size_t n = 0;
  if (!fs::exists(dir)) return 0;
  for (const auto& e : fs::directory_iterator(dir)) n += e.is_regular_file() ? 1 : 0;
  return n;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Hooks& hooks) {
  CLI::App app{"Argumentation engine for legal claims", "acal"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  // run-case
  auto* run_cmd = app.add_subcommand("run-case", "Run the pipeline on one claim");
  PipelineFlags run_pf;
  CaseFlags run_cf;
  std::optional<std::string> run_store, run_output;
  run_pf.attach(run_cmd);
  run_cf.attach(run_cmd, true);
  run_cmd->add_option("--store", run_store, "Persist the case in this store");
  run_cmd->add_option("-o,--output", run_output, "Write the case record here");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Evaluate a labelled task");
  PipelineFlags bench_pf;
  BenchFlags bench_bf;
  bench_pf.attach(bench_cmd);
  bench_bf.attach(bench_cmd, true);

  // ablate
  auto* ablate_cmd = app.add_subcommand("ablate", "Evaluate a task over a parameter grid");
  PipelineFlags ablate_pf;
  BenchFlags ablate_bf;
  std::string ablate_grid = "cr-uae";
  std::vector<double> ablate_betas;
  ablate_pf.attach(ablate_cmd);
  ablate_bf.attach(ablate_cmd, true);
  ablate_cmd->add_option("--grid", ablate_grid, "cr-uae or beta")->check(CLI::IsMember({"cr-uae", "beta"}));
  ablate_cmd->add_option("--betas", ablate_betas, "Beta values for --grid beta")->delimiter(',');

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "Serve the HTTP API");
  PipelineFlags serve_pf;
  std::string serve_store, serve_host = "127.0.0.1";
  int serve_port = 8080;
  serve_pf.attach(serve_cmd);
  serve_cmd->add_option("--store", serve_store, "Case store directory")->required();
  serve_cmd->add_option("--host", serve_host, "Listen address");
  serve_cmd->add_option("--port", serve_port, "Listen port, 0 for any")->check(CLI::Range(0, 65535));

  // record-fixtures
  auto* rec_cmd = app.add_subcommand("record-fixtures", "Record backend replies for replay");
  PipelineFlags rec_pf;
  CaseFlags rec_cf;
  BenchFlags rec_bf;
  std::string rec_out, rec_grid = "single";
  std::vector<double> rec_betas;
  rec_pf.attach(rec_cmd);
  rec_cf.attach(rec_cmd, false);
  rec_bf.attach(rec_cmd, false);
  rec_cmd->add_option("--out", rec_out, "Fixture directory to write")->required();
  rec_cmd->add_option("--grid", rec_grid, "Grid to cover with --task: single, cr-uae, beta")
      ->check(CLI::IsMember({"single", "cr-uae", "beta"}));
  rec_cmd->add_option("--betas", rec_betas, "Beta values for --grid beta")->delimiter(',');

  // dump-graph
  auto* dump_cmd = app.add_subcommand("dump-graph", "Write a stored case's graph and strengths");
  std::string dump_store, dump_case;
  std::optional<std::string> dump_session, dump_output;
  dump_cmd->add_option("--store", dump_store, "Case store directory")->required();
  dump_cmd->add_option("--case", dump_case, "Case id")->required();
  dump_cmd->add_option("--session", dump_session, "Dump a session's current state instead");
  dump_cmd->add_option("-o,--output", dump_output, "Output file (default stdout)");

  std::vector<const char*> argv{"acal"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  std::string current = app.get_subcommands().front()->get_name();
  try {
    if (run_cmd->parsed()) {
      const auto config = run_pf.resolve();
      const auto input = run_cf.resolve();
      const auto rec = run_case(input, config, make_resources(config));
      if (run_store) CaseStore(*run_store).put(rec);
      if (run_output) write_document(*run_output, rec);
      print_case(out, rec);
    } else if (bench_cmd->parsed()) {
      bench(bench_bf, bench_pf.resolve(), single_point(), out);
    } else if (ablate_cmd->parsed()) {
      bench(ablate_bf, ablate_pf.resolve(), make_grid(ablate_grid, ablate_betas), out);
    } else if (serve_cmd->parsed()) {
      const auto config = serve_pf.resolve();
      CaseStore store(serve_store);
      Service service(store, config, make_resources(config));
      int port = serve_port;
      if (port == 0) {
        port = service.bind_to_any_port(serve_host);
        if (port < 0) throw Error("SERVE_BIND", "cannot bind " + serve_host);
      } else if (!service.bind(serve_host, port)) {
        throw Error("SERVE_BIND", "cannot bind " + serve_host + ":" + std::to_string(port));
      }
      out << "listening on http://" << serve_host << ":" << port << std::endl;
      if (hooks.on_listening) hooks.on_listening(service, port);
      service.listen_after_bind();
    } else if (rec_cmd->parsed()) {
      auto config = rec_pf.resolve();
      // Recording wraps whatever would have answered: the script when one is
      // set, the http backend otherwise.
      auto to_record = [&](BackendSpec& spec) {
        spec.kind = "record";
        spec.fixtures_dir = rec_out;
      };
      to_record(config.backend);
      for (auto& [purpose, spec] : config.routes) to_record(spec);
      const bool have_task = !rec_bf.task.empty() || !rec_bf.data.empty();
      if (rec_cf.present() == have_task) {
        throw Error(errc::kConfig, "record-fixtures needs either --claim/--input or --task with --data");
      }
      fs::create_directories(rec_out);
      if (rec_cf.present()) {
        const auto rec = run_case(rec_cf.resolve(), config, make_resources(config));
        print_case(out, rec);
      } else {
        if (rec_bf.task.empty() || rec_bf.data.empty()) {
          throw Error(errc::kConfig, "--task and --data go together");
        }
        bench(rec_bf, config, make_grid(rec_grid, rec_betas), out);
      }
      out << "fixtures        " << count_files(rec_out) << " in " << rec_out << "\n";
    } else if (dump_cmd->parsed()) {
      CaseStore store(dump_store);
      nlohmann::json doc;
      if (dump_session) {
        const auto session = store.load_session(dump_case, *dump_session);
        doc = {{"case_id", dump_case},
               {"session_id", *dump_session},
               {"graph", session.graph()},
               {"strengths", session.strengths()}};
      } else {
        const auto rec = store.get(dump_case);
        doc = {{"case_id", dump_case}, {"graph", rec.graph}, {"strengths", rec.strengths}};
      }
      if (dump_output) {
        write_document(*dump_output, doc);
      } else {
        out << to_document(doc);
      }
    }
  } catch (const PipelineError& e) {
    err << "error: " << e.what() << " (" << e.code() << ")\n";
    return 1;
  } catch (const Error& e) {
    err << "error: [" << current << "] " << e.what() << " (" << e.code() << ")\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: [" << current << "] " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace acal::cli
