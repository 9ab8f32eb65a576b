#pragma once

#include <atomic>
#include <filesystem>
#include <random>
#include <string>

#include "acal/backend.hpp"
#include "acal/config.hpp"
#include "acal/document.hpp"
#include "acal/pipeline.hpp"

namespace testing_support {

inline std::filesystem::path data_dir() { return ACAL_TEST_DATA_DIR; }

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("acal-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// The recorded demo case: replay backend over tests/data/e2e/fixtures.
inline acal::PipelineConfig e2e_config() { return acal::load_config(data_dir() / "e2e" / "config.json"); }

inline acal::TaskInput e2e_input() {
  return acal::document_as<acal::TaskInput>(acal::read_document(data_dir() / "e2e" / "input.json"));
}

// Same replies as the fixtures, answered live from the script.
inline std::shared_ptr<acal::ScriptedBackend> e2e_script() {
  return std::shared_ptr<acal::ScriptedBackend>(
      acal::ScriptedBackend::from_script_file(data_dir() / "e2e" / "script.json"));
}

inline acal::PipelineResources e2e_resources(std::shared_ptr<acal::TextModelBackend> backend) {
  auto res = acal::make_resources(e2e_config());
  res.backend = std::move(backend);
  return res;
}

// Ten-example hearsay micro-task replayed from tests/data/micro/fixtures.
inline acal::PipelineConfig micro_config() { return acal::load_config(data_dir() / "micro" / "config.json"); }

// Error code thrown by f, or "" when it returns normally.
template <typename F>
std::string code_of(F&& f) {
  try {
    f();
  } catch (const acal::Error& e) {
    return e.code();
  }
  return "";
}

inline std::string fixed_clock() { return "2026-01-01T00:00:00Z"; }

// A case record around a hand-built graph, decided without a judge.
inline acal::CaseRecord record_for(acal::QbafGraph graph, acal::PipelineConfig config = {}) {
  acal::CaseRecord r;
  r.case_id = "case-000000000000";
  r.task.task_id = "t";
  r.task.claim = graph.claim.text;
  r.graph = std::move(graph);
  r.config = std::move(config);
  r.strengths = acal::solve_equilibrium(r.graph, r.config.solver);
  r.decision = acal::decide(r.strengths.claim(), r.config.decision, r.task, nullptr);
  r.created_at = fixed_clock();
  return r;
}

}  // namespace testing_support
