#include "acal/bench.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <iomanip>
#include <sstream>

#include "acal/document.hpp"
#include "acal/error.hpp"
#include "acal/parallel.hpp"

namespace acal {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<std::size_t> column(const std::vector<std::string>& header,
                                  std::initializer_list<const char*> names) {
  for (const char* n : names) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (lower(trim(header[i])) == n) return i;
    }
  }
  return std::nullopt;
}

LabeledExample make_example(const TaskDefinition& task, std::string id, std::string input,
                            std::string_view raw_label, std::size_t row) {
  auto label = task.canonical_label(raw_label);
  if (!label) {
    throw Error(errc::kUnknownLabel, "row " + std::to_string(row) + ": label '" + std::string(raw_label) +
                                         "' is not in the " + task.name + " vocabulary");
  }
  if (id.empty()) id = task.name + "-" + std::to_string(row);
  return {std::move(id), std::move(input), *label};
}

}  // namespace

std::optional<std::string> TaskDefinition::canonical_label(std::string_view raw) const {
  const auto v = lower(trim(raw));
  if (v == lower(positive_label)) return positive_label;
  if (v == lower(negative_label)) return negative_label;
  for (const auto& a : positive_aliases) {
    if (v == lower(a)) return positive_label;
  }
  for (const auto& a : negative_aliases) {
    if (v == lower(a)) return negative_label;
  }
  return std::nullopt;
}

std::string TaskDefinition::claim_for(std::string_view input) const {
  std::string out = claim_template;
  const auto pos = out.find("{input}");
  if (pos == std::string::npos) return out + " " + std::string(input);
  out.replace(pos, 7, input);
  return out;
}

TaskDefinition task_definition(std::string_view name) {
  if (name == "hearsay") {
    return {"hearsay", "hearsay", "not_hearsay", {"yes"}, {"no"},
            "Under the Federal Rules of Evidence, the evidence described in the following scenario "
            "is hearsay (an out-of-court statement offered to prove the truth of the matter "
            "asserted): {input}"};
  }
  if (name == "learned_hands_courts") {
    return {"learned_hands_courts", "yes", "no", {}, {},
            "The following post describes a legal issue that belongs to the courts category "
            "(court processes, judges, and lawyers in litigation): {input}"};
  }
  throw Error(errc::kConfig, "unknown task '" + std::string(name) + "'");
}

std::vector<std::string> known_tasks() { return {"hearsay", "learned_hands_courts"}; }

std::vector<LabeledExample> parse_tsv_task(std::string_view text, const TaskDefinition& task) {
  std::vector<LabeledExample> out;
  auto lines = split(text, '\n');
  std::size_t first = 0;
  while (first < lines.size() && trim(lines[first]).empty()) ++first;
  if (first == lines.size()) return out;

  auto header = split(trim(lines[first]), '\t');
  const auto text_col = column(header, {"text", "input"});
  const auto label_col = column(header, {"label", "answer"});
  const auto id_col = column(header, {"id", "index"});
  if (!text_col) throw Error(errc::kMissingColumn, "task file has no 'text' or 'input' column");
  if (!label_col) throw Error(errc::kMissingColumn, "task file has no 'label' or 'answer' column");

  std::size_t row = 0;
  for (std::size_t i = first + 1; i < lines.size(); ++i) {
    std::string line = lines[i];
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    ++row;
    auto fields = split(line, '\t');
    const std::size_t need = std::max({*text_col, *label_col, id_col.value_or(0)});
    if (fields.size() <= need) {
      throw Error(errc::kMissingColumn, "row " + std::to_string(row) + " has " +
                                            std::to_string(fields.size()) + " fields, expected " +
                                            std::to_string(header.size()));
    }
    out.push_back(make_example(task, id_col ? trim(fields[*id_col]) : std::string{},
                               fields[*text_col], fields[*label_col], row));
  }
  return out;
}

std::vector<LabeledExample> parse_document_task(const nlohmann::json& doc, const TaskDefinition& task) {
  const nlohmann::json& items = doc.is_object() && doc.contains("examples") ? doc.at("examples") : doc;
  if (!items.is_array()) throw Error(errc::kBadDocument, "task document must be an array of examples");
  std::vector<LabeledExample> out;
  std::size_t row = 0;
  for (const auto& item : items) {
    ++row;
    auto pick = [&](std::initializer_list<const char*> keys) -> std::optional<std::string> {
      for (const char* k : keys) {
        if (auto it = item.find(k); it != item.end()) {
          if (it->is_string()) return it->get<std::string>();
          if (it->is_number()) return it->dump();
        }
      }
      return std::nullopt;
    };
    if (!item.is_object()) throw Error(errc::kBadDocument, "row " + std::to_string(row) + " is not an object");
    auto text = pick({"text", "input"});
    auto label = pick({"label", "answer"});
    if (!text) throw Error(errc::kMissingColumn, "row " + std::to_string(row) + " has no text/input");
    if (!label) throw Error(errc::kMissingColumn, "row " + std::to_string(row) + " has no label/answer");
    out.push_back(make_example(task, pick({"id", "index"}).value_or(""), *text, *label, row));
  }
  return out;
}

std::vector<LabeledExample> load_task(const std::filesystem::path& path, const TaskDefinition& task,
                                      TaskFormat format) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    throw Error(errc::kTaskIo, e.what());
  }
  const auto ext = lower(path.extension().string());
  if (format == TaskFormat::Auto) {
    format = (ext == ".json" || ext == ".jsonl") ? TaskFormat::Document : TaskFormat::Tsv;
  }
  if (format == TaskFormat::Tsv) return parse_tsv_task(text, task);
  if (trim(text).empty()) return {};
  if (ext == ".jsonl") {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& line : split(text, '\n')) {
      if (trim(line).empty()) continue;
      arr.push_back(parse_document(line));
    }
    return parse_document_task(arr, task);
  }
  return parse_document_task(parse_document(text), task);
}

MetricsReport evaluate(const std::vector<std::string>& predictions, const std::vector<std::string>& gold,
                       const std::vector<std::string>& labels, const MetricsOptions& options) {
  if (predictions.size() != gold.size()) {
    throw Error(errc::kLengthMismatch, std::to_string(predictions.size()) + " predictions for " +
                                           std::to_string(gold.size()) + " gold labels");
  }
  auto index = [&](const std::string& l) {
    auto it = std::find(labels.begin(), labels.end(), l);
    if (it == labels.end()) throw Error(errc::kUnknownLabel, "label '" + l + "' is not in the vocabulary");
    return static_cast<std::size_t>(it - labels.begin());
  };

  MetricsReport r;
  r.labels = labels;
  r.n_examples = gold.size();
  r.confusion.assign(labels.size(), std::vector<std::size_t>(labels.size(), 0));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto g = index(gold[i]);
    const auto p = index(predictions[i]);
    ++r.confusion[g][p];
    if (g == p) ++correct;
  }
  r.accuracy = gold.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(gold.size());

  auto ratio = [&](std::size_t num, std::size_t den) {
    return den == 0 ? options.zero_division : static_cast<double>(num) / static_cast<double>(den);
  };
  double sp = 0.0, sr = 0.0, sf = 0.0;
  for (std::size_t c = 0; c < labels.size(); ++c) {
    std::size_t tp = r.confusion[c][c], fp = 0, fn = 0;
    for (std::size_t k = 0; k < labels.size(); ++k) {
      if (k == c) continue;
      fp += r.confusion[k][c];
      fn += r.confusion[c][k];
    }
    ClassMetrics m;
    m.precision = ratio(tp, tp + fp);
    m.recall = ratio(tp, tp + fn);
    m.f1 = ratio(2 * tp, 2 * tp + fp + fn);
    m.support = tp + fn;
    sp += m.precision;
    sr += m.recall;
    sf += m.f1;
    r.per_class[labels[c]] = m;
  }
  const double n = labels.empty() ? 1.0 : static_cast<double>(labels.size());
  r.precision = sp / n;
  r.recall = sr / n;
  r.macro_f1 = sf / n;
  return r;
}

std::vector<GridPoint> cr_uae_grid() {
  std::vector<GridPoint> out;
  for (bool cr : {true, false}) {
    for (bool uae : {true, false}) {
      out.push_back({std::string("cr_") + (cr ? "on" : "off") + "_uae_" + (uae ? "on" : "off"),
                     {{"ablation", {{"clash_resolution_enabled", cr}, {"uae_enabled", uae}}}}});
    }
  }
  return out;
}

std::vector<GridPoint> beta_grid(const std::vector<double>& betas) {
  std::vector<GridPoint> out;
  for (double b : betas) {
    char name[32];
    std::snprintf(name, sizeof name, "beta_%.2f", b);
    out.push_back({name, {{"arena", {{"beta", b}}}}});
  }
  return out;
}

std::vector<GridPoint> single_point() { return {{"base", nlohmann::json::object()}}; }

std::vector<BenchmarkPoint> run_benchmark(const TaskDefinition& task,
                                          const std::vector<LabeledExample>& examples,
                                          const PipelineConfig& base,
                                          const std::vector<GridPoint>& grid,
                                          const PipelineResources& resources,
                                          const BenchmarkOptions& options) {
  std::vector<BenchmarkPoint> out;
  for (const auto& point : grid) {
    const PipelineConfig config = merge_config(base, point.overrides);
    BenchmarkPoint bp;
    bp.point = point;
    bp.predictions = parallel_map(
        examples,
        [&](const LabeledExample& ex) {
          ExamplePrediction p;
          p.id = ex.id;
          p.gold = ex.label;
          TaskInput input;
          input.task_id = task.name;
          input.claim = task.claim_for(ex.input);
          input.metadata = {{"example_id", ex.id}};
          try {
            const auto rec = run_case(input, config, resources, [] { return std::string{}; });
            p.case_id = rec.case_id;
            p.claim_strength = rec.strengths.claim();
            p.decided_by = std::string(to_string(rec.decision.decided_by));
            p.predicted = rec.decision.answer == Answer::Yes ? task.positive_label : task.negative_label;
          } catch (const Error& e) {
            p.error = e.what();
          }
          return p;
        },
        options.workers);

    std::vector<std::string> pred, gold;
    std::size_t failed = 0;
    for (const auto& p : bp.predictions) {
      if (!p.predicted) {
        ++failed;
        if (options.exclude_failures) continue;
        // Counted as wrong: assign the other label.
        pred.push_back(p.gold == task.positive_label ? task.negative_label : task.positive_label);
      } else {
        pred.push_back(*p.predicted);
      }
      gold.push_back(p.gold);
    }
    bp.report = evaluate(pred, gold, task.labels(), options.metrics);
    bp.report.n_failed = failed;
    bp.report.config = config_to_json(config);
    out.push_back(std::move(bp));
  }

  if (!options.output_dir.empty()) {
    nlohmann::json reports = nlohmann::json::array();
    for (const auto& bp : out) {
      std::string lines;
      for (const auto& p : bp.predictions) lines += nlohmann::json(p).dump() + "\n";
      write_file_atomic(options.output_dir / (bp.point.name + ".predictions.jsonl"), lines);
      reports.push_back({{"point", bp.point.name}, {"overrides", bp.point.overrides}, {"report", bp.report}});
    }
    write_document(options.output_dir / "reports.json", {{"task", task.name}, {"reports", reports}});
  }
  return out;
}

std::string format_table(const std::vector<BenchmarkPoint>& points) {
  std::ostringstream os;
  os << std::left << std::setw(22) << "point" << std::right << std::setw(6) << "n" << std::setw(8)
     << "failed" << std::setw(10) << "accuracy" << std::setw(11) << "precision" << std::setw(8)
     << "recall" << std::setw(10) << "macro_f1" << "\n";
  os << std::fixed << std::setprecision(4);
  for (const auto& p : points) {
    const auto& r = p.report;
    os << std::left << std::setw(22) << p.point.name << std::right << std::setw(6) << r.n_examples
       << std::setw(8) << r.n_failed << std::setw(10) << r.accuracy << std::setw(11) << r.precision
       << std::setw(8) << r.recall << std::setw(10) << r.macro_f1 << "\n";
  }
  return os.str();
}

void to_json(nlohmann::json& j, const LabeledExample& e) {
  j = nlohmann::json{{"id", e.id}, {"input", e.input}, {"label", e.label}};
}

void to_json(nlohmann::json& j, const ClassMetrics& m) {
  j = nlohmann::json{{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"support", m.support}};
}

void from_json(const nlohmann::json& j, ClassMetrics& m) {
  j.at("precision").get_to(m.precision);
  j.at("recall").get_to(m.recall);
  j.at("f1").get_to(m.f1);
  j.at("support").get_to(m.support);
}

void to_json(nlohmann::json& j, const MetricsReport& r) {
  j = nlohmann::json{{"labels", r.labels},       {"accuracy", r.accuracy},
                     {"precision", r.precision}, {"recall", r.recall},
                     {"macro_f1", r.macro_f1},   {"per_class", r.per_class},
                     {"confusion", r.confusion}, {"n_examples", r.n_examples},
                     {"n_failed", r.n_failed},   {"config", r.config}};
}

void from_json(const nlohmann::json& j, MetricsReport& r) {
  j.at("labels").get_to(r.labels);
  j.at("accuracy").get_to(r.accuracy);
  j.at("precision").get_to(r.precision);
  j.at("recall").get_to(r.recall);
  j.at("macro_f1").get_to(r.macro_f1);
  j.at("per_class").get_to(r.per_class);
  j.at("confusion").get_to(r.confusion);
  j.at("n_examples").get_to(r.n_examples);
  r.n_failed = j.value("n_failed", std::size_t{0});
  r.config = j.value("config", nlohmann::json(nullptr));
}

void to_json(nlohmann::json& j, const ExamplePrediction& p) {
  j = nlohmann::json{{"id", p.id},
                     {"gold", p.gold},
                     {"predicted", p.predicted ? nlohmann::json(*p.predicted) : nlohmann::json(nullptr)},
                     {"claim_strength", p.claim_strength},
                     {"decided_by", p.decided_by},
                     {"case_id", p.case_id},
                     {"error", p.error}};
}

void to_json(nlohmann::json& j, const BenchmarkPoint& p) {
  j = nlohmann::json{{"point", p.point.name}, {"overrides", p.point.overrides}, {"report", p.report}};
}

}  // namespace acal
