#include <doctest.h>

#include <filesystem>

#include "acal/document.hpp"
#include "acal/error.hpp"
#include "helpers.hpp"

using namespace acal;
using testing_support::code_of;
using testing_support::TempDir;

TEST_SUITE("document") {
  TEST_CASE("keys are sorted and output ends with a newline") {
    const nlohmann::json j = {{"zeta", 1}, {"alpha", {{"b", 2}, {"a", 1}}}};
    const auto text = to_document(j);
    CHECK(text.back() == '\n');
    CHECK(text.find("\"alpha\"") < text.find("\"zeta\""));
    CHECK(text.find("\"a\"") < text.find("\"b\""));
    CHECK(to_document(parse_document(text)) == text);
  }

  TEST_CASE("doubles survive a round trip") {
    const nlohmann::json j = {{"x", 0.1 + 0.2}, {"y", 1.0 / 3.0}, {"z", 0.6951219512195121}};
    const auto back = parse_document(to_document(j));
    CHECK(back["x"].get<double>() == 0.1 + 0.2);
    CHECK(back["y"].get<double>() == 1.0 / 3.0);
  }

  TEST_CASE("malformed text raises BAD_DOCUMENT") {
    CHECK(code_of([] { parse_document("{\"a\": "); }) == errc::kBadDocument);
    CHECK(code_of([] { document_as<int>(parse_document("\"text\"")); }) == errc::kBadDocument);
  }

  TEST_CASE("atomic writes leave no temporary behind") {
    TempDir dir;
    const auto path = dir / "nested/out.json";
    write_document(path, {{"k", "v"}});
    write_document(path, {{"k", "w"}});
    CHECK(read_document(path)["k"] == "w");
    CHECK_FALSE(std::filesystem::exists(path.string() + ".tmp"));
    CHECK(code_of([&] { read_file(dir / "missing.json"); }) == errc::kStoreIo);
  }
}
