#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "acal/error.hpp"

namespace acal {

// One document format for everything that leaves the process: graphs, case
// records, sessions, reports, HTTP payloads. Keys are emitted sorted, so the
// same value always produces the same bytes.

/// Pretty-printed (2-space indent) form with a trailing newline.
std::string to_document(const nlohmann::json& value);

/// Parses a document; malformed input raises Error(BAD_DOCUMENT).
nlohmann::json parse_document(std::string_view text);

nlohmann::json read_document(const std::filesystem::path& path);
void write_document(const std::filesystem::path& path, const nlohmann::json& value);

/// Writes to a temporary sibling and renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

template <typename T>
T document_as(const nlohmann::json& value) {
  try {
    return value.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(errc::kBadDocument, e.what());
  }
}

}  // namespace acal
