#pragma once

#include <stdexcept>
#include <string>

namespace acal {

// Every failure carries a machine-readable code. The HTTP layer forwards the
// code verbatim, so treat the strings below as part of the public contract.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

// Raised when a backend cannot answer at all (transport failure, missing
// replay fixture). Unlike schema errors this is not recoverable per call.
class BackendUnavailable : public Error {
 public:
  using Error::Error;
};

namespace errc {
inline constexpr const char* kDuplicateId = "GRAPH_DUPLICATE_ID";
inline constexpr const char* kDanglingEdge = "GRAPH_DANGLING_EDGE";
inline constexpr const char* kSelfLoop = "GRAPH_SELF_LOOP";
inline constexpr const char* kStanceParity = "GRAPH_STANCE_PARITY";
inline constexpr const char* kStrengthRange = "GRAPH_STRENGTH_RANGE";
inline constexpr const char* kEmptyText = "GRAPH_EMPTY_TEXT";
inline constexpr const char* kUnknownNode = "UNKNOWN_NODE";
inline constexpr const char* kMissingStrength = "MISSING_STRENGTH";
inline constexpr const char* kInvalidParams = "INVALID_PARAMS";
inline constexpr const char* kBadDocument = "BAD_DOCUMENT";

inline constexpr const char* kBackendUnavailable = "BACKEND_UNAVAILABLE";
inline constexpr const char* kFixtureMissing = "FIXTURE_MISSING";
inline constexpr const char* kSchemaMismatch = "SCHEMA_MISMATCH";

inline constexpr const char* kUnknownRole = "AGENT_UNKNOWN_ROLE";
inline constexpr const char* kGenerationFailed = "GENERATION_FAILED";
inline constexpr const char* kScoringFailed = "SCORING_FAILED";

inline constexpr const char* kNoParticipation = "ARENA_NO_PARTICIPATION";

inline constexpr const char* kDuplicateDocument = "RETRIEVAL_DUPLICATE_DOCUMENT";
inline constexpr const char* kDuplicatePassage = "RETRIEVAL_DUPLICATE_PASSAGE";
inline constexpr const char* kCorpusIo = "RETRIEVAL_CORPUS_IO";

inline constexpr const char* kEditUnknownNode = "EDIT_UNKNOWN_NODE";
inline constexpr const char* kEditStaleNode = "EDIT_STALE_NODE";
inline constexpr const char* kEditClaimNode = "EDIT_CLAIM_NODE";
inline constexpr const char* kEditInvalidStrength = "EDIT_INVALID_STRENGTH";
inline constexpr const char* kEditInvalidRelation = "EDIT_INVALID_RELATION";
inline constexpr const char* kEditInvalidText = "EDIT_INVALID_TEXT";
inline constexpr const char* kEditDuplicateId = "EDIT_DUPLICATE_ID";
inline constexpr const char* kEditUnknownPassage = "EDIT_UNKNOWN_PASSAGE";
inline constexpr const char* kProposalNotFound = "PROPOSAL_NOT_FOUND";

inline constexpr const char* kCaseNotFound = "CASE_NOT_FOUND";
inline constexpr const char* kCaseConflict = "CASE_CONFLICT";
inline constexpr const char* kSessionNotFound = "SESSION_NOT_FOUND";
inline constexpr const char* kStoreIo = "STORE_IO";

inline constexpr const char* kUnknownLabel = "BENCH_UNKNOWN_LABEL";
inline constexpr const char* kMissingColumn = "BENCH_MISSING_COLUMN";
inline constexpr const char* kLengthMismatch = "BENCH_LENGTH_MISMATCH";
inline constexpr const char* kTaskIo = "BENCH_TASK_IO";

inline constexpr const char* kConfig = "CONFIG_INVALID";
}  // namespace errc

}  // namespace acal
