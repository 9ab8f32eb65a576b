#include "acal/store.hpp"

#include <algorithm>
#include <fstream>

#include "acal/document.hpp"
#include "acal/error.hpp"

namespace acal {

namespace fs = std::filesystem;

namespace {

// Ids become path components, so only a conservative alphabet is accepted.
bool safe_id(const std::string& id) {
  if (id.empty() || id.size() > 128 || id.front() == '.') return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
  });
}

std::size_t count_lines(const fs::path& p) {
  if (!fs::exists(p)) return 0;
  const auto text = read_file(p);
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

CaseStore::CaseStore(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_ / "cases", ec);
  if (ec) throw Error(errc::kStoreIo, "cannot create store at " + root_.string() + ": " + ec.message());
}

fs::path CaseStore::case_dir(const std::string& case_id) const {
  if (!safe_id(case_id)) throw Error(errc::kCaseNotFound, "no case '" + case_id + "'");
  return root_ / "cases" / case_id;
}

fs::path CaseStore::session_path(const std::string& case_id, const std::string& sid) const {
  if (!safe_id(sid)) throw Error(errc::kSessionNotFound, "no session '" + sid + "'");
  return case_dir(case_id) / "sessions" / (sid + ".json");
}

fs::path CaseStore::audit_path(const std::string& case_id, const std::string& sid) const {
  return case_dir(case_id) / "sessions" / (sid + ".audit.jsonl");
}

std::mutex& CaseStore::lock_for(const std::string& case_id) {
  std::lock_guard guard(locks_mutex_);
  auto& slot = locks_[case_id];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

CaseStore::PutResult CaseStore::put(const CaseRecord& record) {
  const auto path = case_dir(record.case_id) / "case.json";
  std::lock_guard guard(lock_for(record.case_id));
  if (fs::exists(path)) {
    if (canonical_form(get(record.case_id)) == canonical_form(record)) return PutResult::Existing;
    throw Error(errc::kCaseConflict, "case '" + record.case_id + "' exists with different content");
  }
  write_file_atomic(path, to_document(record));
  return PutResult::Created;
}

CaseRecord CaseStore::get(const std::string& case_id) const {
  const auto path = case_dir(case_id) / "case.json";
  if (!fs::exists(path)) throw Error(errc::kCaseNotFound, "no case '" + case_id + "'");
  return document_as<CaseRecord>(read_document(path));
}

bool CaseStore::contains(const std::string& case_id) const {
  return safe_id(case_id) && fs::exists(root_ / "cases" / case_id / "case.json");
}

std::vector<std::string> CaseStore::list() const {
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(root_ / "cases")) {
    if (fs::exists(entry.path() / "case.json")) out.push_back(entry.path().filename().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> CaseStore::sessions(const std::string& case_id) const {
  std::vector<std::string> out;
  const auto dir = case_dir(case_id) / "sessions";
  if (!fs::exists(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (name.ends_with(".json")) out.push_back(name.substr(0, name.size() - 5));
  }
  std::sort(out.begin(), out.end());
  return out;
}

ContestationSession CaseStore::open_session(const std::string& case_id) {
  CaseRecord base = get(case_id);
  std::lock_guard guard(lock_for(case_id));
  std::string sid;
  for (std::size_t n = sessions(case_id).size() + 1;; ++n) {
    sid = "s" + std::to_string(n);
    if (!fs::exists(session_path(case_id, sid))) break;
  }
  auto session = ContestationSession::open(base, sid);
  write_file_atomic(session_path(case_id, sid), to_document(session.state_document()));
  return session;
}

void CaseStore::save_session(const ContestationSession& session) {
  const auto& case_id = session.base().case_id;
  const auto audit = audit_path(case_id, session.id());
  const auto& log = session.audit_log();
  const std::size_t on_disk = count_lines(audit);
  if (on_disk > log.size()) {
    throw Error(errc::kStoreIo, "session " + session.id() + " is older than its stored audit log");
  }
  if (on_disk < log.size()) {
    std::ofstream out(audit, std::ios::app | std::ios::binary);
    out << audit_to_jsonl({log.begin() + static_cast<std::ptrdiff_t>(on_disk), log.end()});
    if (!out) throw Error(errc::kStoreIo, "cannot append to " + audit.string());
  }
  write_file_atomic(session_path(case_id, session.id()), to_document(session.state_document()));
}

ContestationSession CaseStore::load_session(const std::string& case_id,
                                            const std::string& session_id) const {
  const auto path = session_path(case_id, session_id);
  if (!fs::exists(path)) throw Error(errc::kSessionNotFound, "no session '" + session_id + "'");
  const auto audit_file = audit_path(case_id, session_id);
  auto audit = fs::exists(audit_file) ? audit_from_jsonl(read_file(audit_file)) : std::vector<AuditEntry>{};
  return ContestationSession::restore(get(case_id), read_document(path), std::move(audit));
}

}  // namespace acal
