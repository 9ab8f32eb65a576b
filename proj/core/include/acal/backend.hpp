#pragma once

#include <array>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace acal {

/// What a model call is for. Each purpose has a fixed response schema.
enum class Purpose { Select, Generate, Score, Relate, Adjudicate, Judge, Contest };

std::string_view to_string(Purpose p);
Purpose parse_purpose(std::string_view s);

/// Every prompt starts with this tag, so bumping it invalidates recorded fixtures.
inline constexpr std::string_view kPromptVersion = "acal-prompts/1";

struct BackendRequest {
  Purpose purpose = Purpose::Generate;
  std::string prompt;
  // Flat map of field name -> JSON type name ("string", "number", "array",
  // "object", "boolean").
  nlohmann::json schema;

  friend bool operator==(const BackendRequest&, const BackendRequest&) = default;
};

struct BackendResponse {
  nlohmann::json fields;  // null when the raw text was not valid JSON
  std::string raw_text;

  friend bool operator==(const BackendResponse&, const BackendResponse&) = default;
};

nlohmann::json response_schema(Purpose p);
BackendRequest make_request(Purpose p, std::string prompt);

/// Returns an empty string when `fields` conforms, else the first problem.
std::string schema_violation(const nlohmann::json& fields, const nlohmann::json& schema);

/// Extracts the first JSON object from model output, tolerating code fences
/// and surrounding prose.
std::optional<nlohmann::json> extract_json_object(std::string_view text);

std::string normalize_prompt(std::string_view prompt);
/// Hex SHA-256 over "<purpose>\n<normalized prompt>".
std::string request_digest(const BackendRequest& request);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

/// Text-model backend. Implementations must be safe to call concurrently.
class TextModelBackend {
 public:
  virtual ~TextModelBackend() = default;

  /// Calls the model and rejects responses that do not match the request
  /// schema with Error(SCHEMA_MISMATCH).
  BackendResponse complete(const BackendRequest& request);
  /// Same call without schema validation.
  BackendResponse complete_raw(const BackendRequest& request);

  std::size_t calls() const noexcept { return calls_.load(); }
  std::size_t calls(Purpose p) const noexcept;
  void reset_calls() noexcept;

 protected:
  virtual BackendResponse do_complete(const BackendRequest& request) = 0;

 private:
  std::atomic<std::size_t> calls_{0};
  std::array<std::atomic<std::size_t>, 7> per_purpose_{};
};

/// Table-driven stub for tests: the first rule whose purpose matches and
/// whose every `contains` fragment occurs in the prompt answers.
class ScriptedBackend final : public TextModelBackend {
 public:
  struct Rule {
    Purpose purpose;
    std::vector<std::string> contains;
    BackendResponse response;
  };
  using Handler = std::function<std::optional<BackendResponse>(const BackendRequest&)>;

  ScriptedBackend() = default;
  explicit ScriptedBackend(std::vector<Rule> rules) : rules_(std::move(rules)) {}

  ScriptedBackend& on(Purpose p, nlohmann::json fields, std::vector<std::string> contains = {});
  ScriptedBackend& on_raw(Purpose p, std::string raw_text, std::vector<std::string> contains = {});
  /// Consulted when no rule matches.
  ScriptedBackend& fallback(Handler handler);

  /// Script document: {"rules": [{"purpose", "contains"?, "response"? , "raw_text"?}]}
  static std::unique_ptr<ScriptedBackend> from_script(const nlohmann::json& script);
  static std::unique_ptr<ScriptedBackend> from_script_file(const std::filesystem::path& path);

 protected:
  BackendResponse do_complete(const BackendRequest& request) override;

 private:
  std::vector<Rule> rules_;
  Handler fallback_;
};

/// Serves recorded responses keyed by request digest; a miss is fatal.
class ReplayBackend final : public TextModelBackend {
 public:
  explicit ReplayBackend(std::filesystem::path fixtures_dir);

 protected:
  BackendResponse do_complete(const BackendRequest& request) override;

 private:
  std::filesystem::path dir_;
};

/// Forwards to `inner` and writes one fixture file per request digest.
class RecordingBackend final : public TextModelBackend {
 public:
  RecordingBackend(std::shared_ptr<TextModelBackend> inner, std::filesystem::path fixtures_dir);

 protected:
  BackendResponse do_complete(const BackendRequest& request) override;

 private:
  std::shared_ptr<TextModelBackend> inner_;
  std::filesystem::path dir_;
};

std::filesystem::path fixture_path(const std::filesystem::path& dir, const BackendRequest& request);
nlohmann::json fixture_document(const BackendRequest& request, const BackendResponse& response);

struct HttpBackendConfig {
  // Base URL of an OpenAI-compatible API, e.g. https://host/v1
  std::string endpoint = "http://127.0.0.1:8080/v1";
  std::string model = "gemini-2.5-flash-lite";
  std::string api_key_env = "ACAL_API_KEY";
  double timeout_seconds = 60.0;
  int retries = 2;
  std::optional<int> seed;
};

/// Chat-completions adapter. Transport errors and non-2xx statuses are
/// retried `retries` times, then surface as BackendUnavailable.
class HttpBackend final : public TextModelBackend {
 public:
  explicit HttpBackend(HttpBackendConfig config);

  const HttpBackendConfig& config() const noexcept { return config_; }

 protected:
  BackendResponse do_complete(const BackendRequest& request) override;

 private:
  HttpBackendConfig config_;
  std::string scheme_host_port_;
  std::string path_prefix_;
};

/// Dispatches by purpose, with a default for purposes without a route.
class RouterBackend final : public TextModelBackend {
 public:
  explicit RouterBackend(std::shared_ptr<TextModelBackend> fallback);
  RouterBackend& route(Purpose p, std::shared_ptr<TextModelBackend> backend);

 protected:
  BackendResponse do_complete(const BackendRequest& request) override;

 private:
  std::shared_ptr<TextModelBackend> default_;
  std::map<Purpose, std::shared_ptr<TextModelBackend>> routes_;
};

/// Backend selection as it appears in config files.
struct BackendSpec {
  std::string kind = "replay";  // scripted | replay | http | record
  std::filesystem::path fixtures_dir = "fixtures";
  std::filesystem::path script_path;
  HttpBackendConfig http;

  friend bool operator==(const BackendSpec& a, const BackendSpec& b) {
    return a.kind == b.kind && a.fixtures_dir == b.fixtures_dir && a.script_path == b.script_path &&
           a.http.endpoint == b.http.endpoint && a.http.model == b.http.model &&
           a.http.api_key_env == b.http.api_key_env && a.http.timeout_seconds == b.http.timeout_seconds &&
           a.http.retries == b.http.retries && a.http.seed == b.http.seed;
  }
};

/// Applies ACAL_BACKEND_{KIND,ENDPOINT,MODEL,API_KEY_ENV,TIMEOUT,RETRIES,FIXTURES}.
void apply_env_overrides(BackendSpec& spec);

/// "record" wraps an http backend (or the scripted one, when a script path
/// is set) in a RecordingBackend.
std::shared_ptr<TextModelBackend> make_backend(const BackendSpec& spec);

void to_json(nlohmann::json& j, const Purpose& p);
void from_json(const nlohmann::json& j, Purpose& p);
void to_json(nlohmann::json& j, const BackendRequest& r);
void from_json(const nlohmann::json& j, BackendRequest& r);
void to_json(nlohmann::json& j, const BackendResponse& r);
void from_json(const nlohmann::json& j, BackendResponse& r);
void to_json(nlohmann::json& j, const BackendSpec& s);
void from_json(const nlohmann::json& j, BackendSpec& s);

}  // namespace acal
