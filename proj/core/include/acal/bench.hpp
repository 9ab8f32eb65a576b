#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "acal/config.hpp"
#include "acal/pipeline.hpp"

namespace acal {

/// A binary classification task. The claim put to the pipeline is
/// claim_template with "{input}" replaced by the example text; a Yes answer
/// predicts the positive label.
struct TaskDefinition {
  std::string name;
  std::string positive_label;
  std::string negative_label;
  std::vector<std::string> positive_aliases;  // accepted in data files, case-insensitive
  std::vector<std::string> negative_aliases;
  std::string claim_template;

  std::vector<std::string> labels() const { return {positive_label, negative_label}; }
  /// Canonical label for a raw value, or nullopt.
  std::optional<std::string> canonical_label(std::string_view raw) const;
  std::string claim_for(std::string_view input) const;
};

/// "hearsay" and "learned_hands_courts".
TaskDefinition task_definition(std::string_view name);
std::vector<std::string> known_tasks();

struct LabeledExample {
  std::string id;
  std::string input;
  std::string label;

  friend bool operator==(const LabeledExample&, const LabeledExample&) = default;
};

enum class TaskFormat { Auto, Tsv, Document };

/// TSV needs a header with `text` (or `input`) and `label` (or `answer`)
/// columns and may have `id` (or `index`). Documents are a JSON array of
/// objects with the same keys, or {"examples": [...]}; `.jsonl` files hold
/// one object per line. Examples without an id get "<task>-<row>".
std::vector<LabeledExample> load_task(const std::filesystem::path& path, const TaskDefinition& task,
                                      TaskFormat format = TaskFormat::Auto);
std::vector<LabeledExample> parse_tsv_task(std::string_view text, const TaskDefinition& task);
std::vector<LabeledExample> parse_document_task(const nlohmann::json& doc, const TaskDefinition& task);

struct MetricsOptions {
  // F1 (and precision/recall) of a class whose denominator is zero.
  double zero_division = 0.0;
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;  // gold count

  friend bool operator==(const ClassMetrics&, const ClassMetrics&) = default;
};

struct MetricsReport {
  std::vector<std::string> labels;
  double accuracy = 0.0;
  double precision = 0.0;  // macro
  double recall = 0.0;     // macro
  double macro_f1 = 0.0;
  std::map<std::string, ClassMetrics> per_class;
  std::vector<std::vector<std::size_t>> confusion;  // [gold][predicted], in `labels` order
  std::size_t n_examples = 0;
  std::size_t n_failed = 0;
  nlohmann::json config;
};

MetricsReport evaluate(const std::vector<std::string>& predictions, const std::vector<std::string>& gold,
                       const std::vector<std::string>& labels, const MetricsOptions& options = {});

struct GridPoint {
  std::string name;
  nlohmann::json overrides = nlohmann::json::object();  // merged into the base config
};

/// Clash resolution x escalation, on/off each: 4 points.
std::vector<GridPoint> cr_uae_grid();
/// One point per beta, everything else from the base config.
std::vector<GridPoint> beta_grid(const std::vector<double>& betas = {0.05, 0.10, 0.15, 0.20, 0.25});
/// No overrides.
std::vector<GridPoint> single_point();

struct ExamplePrediction {
  std::string id;
  std::string gold;
  std::optional<std::string> predicted;  // nullopt when the run failed
  double claim_strength = 0.0;
  std::string decided_by;
  std::string case_id;
  std::string error;
};

struct BenchmarkOptions {
  MetricsOptions metrics;
  // Failed examples are scored as wrong unless excluded.
  bool exclude_failures = false;
  std::filesystem::path output_dir;  // empty: nothing written
  std::size_t workers = 1;
};

struct BenchmarkPoint {
  GridPoint point;
  MetricsReport report;
  std::vector<ExamplePrediction> predictions;  // example order
};

/// One report per grid point. With an output directory, writes
/// <point>.predictions.jsonl per point and reports.json.
std::vector<BenchmarkPoint> run_benchmark(const TaskDefinition& task,
                                          const std::vector<LabeledExample>& examples,
                                          const PipelineConfig& base,
                                          const std::vector<GridPoint>& grid,
                                          const PipelineResources& resources,
                                          const BenchmarkOptions& options = {});

/// Fixed-width summary, one row per point.
std::string format_table(const std::vector<BenchmarkPoint>& points);

void to_json(nlohmann::json& j, const LabeledExample& e);
void to_json(nlohmann::json& j, const ClassMetrics& m);
void from_json(const nlohmann::json& j, ClassMetrics& m);
void to_json(nlohmann::json& j, const MetricsReport& r);
void from_json(const nlohmann::json& j, MetricsReport& r);
void to_json(nlohmann::json& j, const ExamplePrediction& p);
void to_json(nlohmann::json& j, const BenchmarkPoint& p);

}  // namespace acal
