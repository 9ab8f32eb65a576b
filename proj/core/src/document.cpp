#include "acal/document.hpp"

#include <fstream>
#include <sstream>
#include <system_error>

namespace acal {

std::string to_document(const nlohmann::json& value) { return value.dump(2) + "\n"; }

nlohmann::json parse_document(std::string_view text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(errc::kBadDocument, e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(errc::kStoreIo, "cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

nlohmann::json read_document(const std::filesystem::path& path) {
  return parse_document(read_file(path));
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(errc::kStoreIo, "cannot write " + tmp.string());
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out.flush()) {
      throw Error(errc::kStoreIo, "short write to " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw Error(errc::kStoreIo, "rename failed for " + path.string() + ": " + ec.message());
  }
}

void write_document(const std::filesystem::path& path, const nlohmann::json& value) {
  write_file_atomic(path, to_document(value));
}

}  // namespace acal
