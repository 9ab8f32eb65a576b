#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "acal/contestation.hpp"
#include "acal/pipeline.hpp"

namespace acal {

/// Directory layout:
///   <root>/cases/<case_id>/case.json                    write-once
///   <root>/cases/<case_id>/sessions/<sid>.json          replaced atomically
///   <root>/cases/<case_id>/sessions/<sid>.audit.jsonl   append-only
class CaseStore {
 public:
  explicit CaseStore(std::filesystem::path root);

  const std::filesystem::path& root() const noexcept { return root_; }

  enum class PutResult { Created, Existing };

  /// Storing an id twice is allowed only if the canonical forms match;
  /// otherwise CASE_CONFLICT.
  PutResult put(const CaseRecord& record);
  CaseRecord get(const std::string& case_id) const;
  bool contains(const std::string& case_id) const;
  std::vector<std::string> list() const;

  /// Opens, persists and returns a fresh session.
  ContestationSession open_session(const std::string& case_id);
  void save_session(const ContestationSession& session);
  ContestationSession load_session(const std::string& case_id, const std::string& session_id) const;
  std::vector<std::string> sessions(const std::string& case_id) const;

  /// Serializes writers per case id.
  std::mutex& lock_for(const std::string& case_id);

 private:
  std::filesystem::path case_dir(const std::string& case_id) const;
  std::filesystem::path session_path(const std::string& case_id, const std::string& sid) const;
  std::filesystem::path audit_path(const std::string& case_id, const std::string& sid) const;

  std::filesystem::path root_;
  std::mutex locks_mutex_;
  std::map<std::string, std::unique_ptr<std::mutex>> locks_;
};

}  // namespace acal
