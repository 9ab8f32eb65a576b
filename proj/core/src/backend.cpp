#include "acal/backend.hpp"

#include <openssl/evp.h>

#include <cstdlib>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "acal/document.hpp"
#include "acal/error.hpp"

namespace acal {

namespace {

constexpr std::array<std::string_view, 7> kPurposeNames = {
    "select", "generate", "score", "relate", "adjudicate", "judge", "contest"};

std::string_view json_type_name(const nlohmann::json& v) {
  if (v.is_string()) return "string";
  if (v.is_number()) return "number";
  if (v.is_array()) return "array";
  if (v.is_object()) return "object";
  if (v.is_boolean()) return "boolean";
  return "null";
}

std::string hex(const unsigned char* data, unsigned int len) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kDigits[data[i] >> 4]);
    out.push_back(kDigits[data[i] & 0xF]);
  }
  return out;
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(errc::kBackendUnavailable, "SHA-256 digest failed");
  }
  return hex(md, len);
}

std::string_view to_string(Purpose p) { return kPurposeNames[static_cast<std::size_t>(p)]; }

Purpose parse_purpose(std::string_view s) {
  for (std::size_t i = 0; i < kPurposeNames.size(); ++i) {
    if (kPurposeNames[i] == s) return static_cast<Purpose>(i);
  }
  throw Error(errc::kBadDocument, "unknown purpose '" + std::string(s) + "'");
}

nlohmann::json response_schema(Purpose p) {
  switch (p) {
    case Purpose::Select: return {{"roles", "array"}};
    case Purpose::Generate: return {{"arguments", "array"}};
    case Purpose::Score: return {{"score", "number"}};
    case Purpose::Relate: return {{"verdicts", "array"}};
    case Purpose::Adjudicate: return {{"winner", "string"}};
    case Purpose::Judge: return {{"answer", "string"}};
    case Purpose::Contest: return {{"proposals", "array"}};
  }
  return nlohmann::json::object();
}

BackendRequest make_request(Purpose p, std::string prompt) {
  return BackendRequest{p, std::move(prompt), response_schema(p)};
}

std::string schema_violation(const nlohmann::json& fields, const nlohmann::json& schema) {
  if (!fields.is_object()) return "response is not a JSON object";
  for (const auto& [name, type] : schema.items()) {
    auto it = fields.find(name);
    if (it == fields.end()) return "missing field '" + name + "'";
    const auto want = type.get<std::string>();
    if (json_type_name(*it) != want) {
      return "field '" + name + "' is " + std::string(json_type_name(*it)) + ", expected " + want;
    }
  }
  return {};
}

std::optional<nlohmann::json> extract_json_object(std::string_view text) {
  const auto open = text.find('{');
  const auto close = text.rfind('}');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
    return std::nullopt;
  }
  auto parsed = nlohmann::json::parse(text.substr(open, close - open + 1), nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object()) return std::nullopt;
  return parsed;
}

std::string normalize_prompt(std::string_view prompt) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : prompt) {
    if (c == '\r') continue;
    if (c == '\n') {
      lines.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  lines.push_back(std::move(cur));
  for (auto& l : lines) {
    while (!l.empty() && (l.back() == ' ' || l.back() == '\t')) l.pop_back();
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  std::size_t first = 0;
  while (first < lines.size() && lines[first].empty()) ++first;
  std::string out;
  for (std::size_t i = first; i < lines.size(); ++i) {
    if (i > first) out.push_back('\n');
    out += lines[i];
  }
  return out;
}

std::string request_digest(const BackendRequest& request) {
  std::string material(to_string(request.purpose));
  material.push_back('\n');
  material += normalize_prompt(request.prompt);
  return sha256_hex(material);
}

// TextModelBackend

BackendResponse TextModelBackend::complete_raw(const BackendRequest& request) {
  calls_.fetch_add(1);
  per_purpose_[static_cast<std::size_t>(request.purpose)].fetch_add(1);
  return do_complete(request);
}

BackendResponse TextModelBackend::complete(const BackendRequest& request) {
  BackendResponse response = complete_raw(request);
  if (auto why = schema_violation(response.fields, request.schema); !why.empty()) {
    throw Error(errc::kSchemaMismatch,
                std::string(to_string(request.purpose)) + " response rejected: " + why);
  }
  return response;
}

std::size_t TextModelBackend::calls(Purpose p) const noexcept {
  return per_purpose_[static_cast<std::size_t>(p)].load();
}

void TextModelBackend::reset_calls() noexcept {
  calls_.store(0);
  for (auto& c : per_purpose_) c.store(0);
}

// ScriptedBackend

ScriptedBackend& ScriptedBackend::on(Purpose p, nlohmann::json fields,
                                     std::vector<std::string> contains) {
  std::string raw = fields.dump();
  rules_.push_back({p, std::move(contains), BackendResponse{std::move(fields), std::move(raw)}});
  return *this;
}

ScriptedBackend& ScriptedBackend::on_raw(Purpose p, std::string raw_text,
                                         std::vector<std::string> contains) {
  auto fields = extract_json_object(raw_text);
  rules_.push_back({p, std::move(contains),
                    BackendResponse{fields ? *fields : nlohmann::json(), std::move(raw_text)}});
  return *this;
}

ScriptedBackend& ScriptedBackend::fallback(Handler handler) {
  fallback_ = std::move(handler);
  return *this;
}

BackendResponse ScriptedBackend::do_complete(const BackendRequest& request) {
  for (const auto& rule : rules_) {
    if (rule.purpose != request.purpose) continue;
    bool all = true;
    for (const auto& frag : rule.contains) {
      if (request.prompt.find(frag) == std::string::npos) {
        all = false;
        break;
      }
    }
    if (all) return rule.response;
  }
  if (fallback_) {
    if (auto r = fallback_(request)) return *r;
  }
  throw BackendUnavailable(errc::kBackendUnavailable,
                           "no scripted response for " + std::string(to_string(request.purpose)) +
                               " request");
}

std::unique_ptr<ScriptedBackend> ScriptedBackend::from_script(const nlohmann::json& script) {
  auto backend = std::make_unique<ScriptedBackend>();
  try {
    for (const auto& r : script.at("rules")) {
      const Purpose p = parse_purpose(r.at("purpose").get<std::string>());
      auto contains = r.value("contains", std::vector<std::string>{});
      if (r.contains("response")) {
        backend->on(p, r.at("response"), std::move(contains));
      } else {
        backend->on_raw(p, r.at("raw_text").get<std::string>(), std::move(contains));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(errc::kBadDocument, std::string("bad backend script: ") + e.what());
  }
  return backend;
}

std::unique_ptr<ScriptedBackend> ScriptedBackend::from_script_file(const std::filesystem::path& path) {
  return from_script(read_document(path));
}

// Replay / record

std::filesystem::path fixture_path(const std::filesystem::path& dir, const BackendRequest& request) {
  return dir / (request_digest(request) + ".json");
}

nlohmann::json fixture_document(const BackendRequest& request, const BackendResponse& response) {
  return nlohmann::json{{"digest", request_digest(request)},
                        {"request", request},
                        {"response", response}};
}

ReplayBackend::ReplayBackend(std::filesystem::path fixtures_dir) : dir_(std::move(fixtures_dir)) {}

BackendResponse ReplayBackend::do_complete(const BackendRequest& request) {
  const auto path = fixture_path(dir_, request);
  if (!std::filesystem::exists(path)) {
    throw BackendUnavailable(errc::kFixtureMissing,
                             "no replay fixture " + path.filename().string() + " for " +
                                 std::string(to_string(request.purpose)) + " request");
  }
  return document_as<BackendResponse>(read_document(path).at("response"));
}

RecordingBackend::RecordingBackend(std::shared_ptr<TextModelBackend> inner,
                                   std::filesystem::path fixtures_dir)
    : inner_(std::move(inner)), dir_(std::move(fixtures_dir)) {}

BackendResponse RecordingBackend::do_complete(const BackendRequest& request) {
  BackendResponse response = inner_->complete_raw(request);
  write_document(fixture_path(dir_, request), fixture_document(request, response));
  return response;
}

// HTTP

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
  const auto& url = config_.endpoint;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(errc::kConfig, "endpoint must include a scheme: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  scheme_host_port_ = url.substr(0, path_start);
  path_prefix_ = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

BackendResponse HttpBackend::do_complete(const BackendRequest& request) {
  nlohmann::json body{
      {"model", config_.model},
      {"temperature", 0},
      {"messages",
       nlohmann::json::array(
           {{{"role", "system"},
             {"content", "Answer with exactly one JSON object whose fields follow this schema: " +
                             request.schema.dump()}},
            {{"role", "user"}, {"content", request.prompt}}})}};
  if (config_.seed) body["seed"] = *config_.seed;

  httplib::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str()); key != nullptr && *key != '\0') {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::duration<double>(config_.timeout_seconds));
  std::string last_error;
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    httplib::Client client(scheme_host_port_);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    auto res = client.Post(path_prefix_ + "/chat/completions", headers, body.dump(),
                           "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
    } else if (res->status < 200 || res->status >= 300) {
      last_error = "HTTP " + std::to_string(res->status);
    } else {
      auto payload = nlohmann::json::parse(res->body, nullptr, false);
      std::string text;
      if (!payload.is_discarded()) {
        try {
          text = payload.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception&) {
          text = res->body;
        }
      } else {
        text = res->body;
      }
      auto fields = extract_json_object(text);
      return BackendResponse{fields ? *fields : nlohmann::json(), text};
    }
    if (attempt < config_.retries) {
      std::this_thread::sleep_for(std::chrono::milliseconds(200 * (attempt + 1)));
    }
  }
  throw BackendUnavailable(errc::kBackendUnavailable,
                           "model endpoint " + config_.endpoint + " failed: " + last_error);
}

// Router

RouterBackend::RouterBackend(std::shared_ptr<TextModelBackend> fallback)
    : default_(std::move(fallback)) {}

RouterBackend& RouterBackend::route(Purpose p, std::shared_ptr<TextModelBackend> backend) {
  routes_[p] = std::move(backend);
  return *this;
}

BackendResponse RouterBackend::do_complete(const BackendRequest& request) {
  auto it = routes_.find(request.purpose);
  auto& target = it == routes_.end() ? default_ : it->second;
  if (!target) {
    throw BackendUnavailable(errc::kBackendUnavailable,
                             "no backend routed for " + std::string(to_string(request.purpose)));
  }
  return target->complete_raw(request);
}

// Config

void apply_env_overrides(BackendSpec& spec) {
  auto env = [](const char* name) -> std::optional<std::string> {
    const char* v = std::getenv(name);
    if (v == nullptr || *v == '\0') return std::nullopt;
    return std::string(v);
  };
  if (auto v = env("ACAL_BACKEND_KIND")) spec.kind = *v;
  if (auto v = env("ACAL_BACKEND_ENDPOINT")) spec.http.endpoint = *v;
  if (auto v = env("ACAL_BACKEND_MODEL")) spec.http.model = *v;
  if (auto v = env("ACAL_BACKEND_API_KEY_ENV")) spec.http.api_key_env = *v;
  if (auto v = env("ACAL_BACKEND_FIXTURES")) spec.fixtures_dir = *v;
  try {
    if (auto v = env("ACAL_BACKEND_TIMEOUT")) spec.http.timeout_seconds = std::stod(*v);
    if (auto v = env("ACAL_BACKEND_RETRIES")) spec.http.retries = std::stoi(*v);
  } catch (const std::exception&) {
    throw Error(errc::kConfig, "ACAL_BACKEND_TIMEOUT / ACAL_BACKEND_RETRIES must be numeric");
  }
}

std::shared_ptr<TextModelBackend> make_backend(const BackendSpec& spec) {
  if (spec.kind == "replay") return std::make_shared<ReplayBackend>(spec.fixtures_dir);
  if (spec.kind == "http") return std::make_shared<HttpBackend>(spec.http);
  if (spec.kind == "scripted") {
    if (spec.script_path.empty()) throw Error(errc::kConfig, "scripted backend needs a script path");
    return ScriptedBackend::from_script_file(spec.script_path);
  }
  if (spec.kind == "record") {
    std::shared_ptr<TextModelBackend> inner;
    if (!spec.script_path.empty()) {
      inner = ScriptedBackend::from_script_file(spec.script_path);
    } else {
      inner = std::make_shared<HttpBackend>(spec.http);
    }
    return std::make_shared<RecordingBackend>(std::move(inner), spec.fixtures_dir);
  }
  throw Error(errc::kConfig, "unknown backend kind '" + spec.kind + "'");
}

void to_json(nlohmann::json& j, const Purpose& p) { j = std::string(to_string(p)); }
void from_json(const nlohmann::json& j, Purpose& p) { p = parse_purpose(j.get<std::string>()); }

void to_json(nlohmann::json& j, const BackendRequest& r) {
  j = nlohmann::json{{"purpose", r.purpose}, {"prompt", r.prompt}, {"schema", r.schema}};
}

void from_json(const nlohmann::json& j, BackendRequest& r) {
  j.at("purpose").get_to(r.purpose);
  j.at("prompt").get_to(r.prompt);
  r.schema = j.value("schema", response_schema(r.purpose));
}

void to_json(nlohmann::json& j, const BackendResponse& r) {
  j = nlohmann::json{{"fields", r.fields}, {"raw_text", r.raw_text}};
}

void from_json(const nlohmann::json& j, BackendResponse& r) {
  r.fields = j.at("fields");
  r.raw_text = j.value("raw_text", std::string{});
}

void to_json(nlohmann::json& j, const BackendSpec& s) {
  j = nlohmann::json{{"kind", s.kind},
                     {"fixtures_dir", s.fixtures_dir.string()},
                     {"script_path", s.script_path.string()},
                     {"endpoint", s.http.endpoint},
                     {"model", s.http.model},
                     {"api_key_env", s.http.api_key_env},
                     {"timeout_seconds", s.http.timeout_seconds},
                     {"retries", s.http.retries},
                     {"seed", nullptr}};
  if (s.http.seed) j["seed"] = *s.http.seed;
}

void from_json(const nlohmann::json& j, BackendSpec& s) {
  s.kind = j.value("kind", s.kind);
  s.fixtures_dir = j.value("fixtures_dir", s.fixtures_dir.string());
  s.script_path = j.value("script_path", s.script_path.string());
  s.http.endpoint = j.value("endpoint", s.http.endpoint);
  s.http.model = j.value("model", s.http.model);
  s.http.api_key_env = j.value("api_key_env", s.http.api_key_env);
  s.http.timeout_seconds = j.value("timeout_seconds", s.http.timeout_seconds);
  s.http.retries = j.value("retries", s.http.retries);
  if (auto it = j.find("seed"); it != j.end() && !it->is_null()) s.http.seed = it->get<int>();
}

}  // namespace acal
