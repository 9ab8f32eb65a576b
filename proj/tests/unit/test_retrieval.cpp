#include <doctest.h>

#include "acal/error.hpp"
#include "acal/retrieval.hpp"
#include "helpers.hpp"

using namespace acal;
using testing_support::code_of;

namespace {

class FixedWeb final : public WebSearch {
 public:
  std::vector<EvidencePassage> search(std::string_view, std::size_t) const override {
    EvidencePassage p;
    p.passage_id = "web#0";
    p.document_id = "web";
    p.text = "hearsay rule statement offered for truth";
    p.provenance = Provenance::WebSearch;
    p.relevance = 0.99;
    return {p};
  }
};

}  // namespace

TEST_SUITE("retrieval") {
  TEST_CASE("chunk windows cover every document") {
    const std::string text(2500, 'x');
    const auto idx = index_corpus({{"d", text}}, {1000, 200});
    REQUIRE(idx.passages().size() == 4);  // offsets 0, 800, 1600, 2400
    CHECK(idx.passages()[0].passage_id == "d#0");
    CHECK(idx.passages()[3].offset == 2400);
    CHECK(idx.passages()[3].text.size() == 100);
    for (const auto& p : idx.passages()) CHECK(idx.source_span(p) == p.text);
  }

  TEST_CASE("chunking errors") {
    CHECK(code_of([] { index_corpus({{"d", "x"}}, {100, 100}); }) == errc::kInvalidParams);
    CHECK(code_of([] { index_corpus({{"d", "x"}, {"d", "y"}}); }) == errc::kDuplicateDocument);
    CHECK(code_of([] { index_corpus({{"d", ""}}); }) == errc::kEmptyText);
  }

  TEST_CASE("lexical scorer ranks overlap and exact matches first") {
    const auto idx = index_corpus({{"a", "the weather is sunny today"},
                                   {"b", "hearsay is an out of court statement"},
                                   {"c", "hearsay"}});
    const auto hits = retrieve(idx, "hearsay", 2);
    REQUIRE(hits.size() == 2);
    CHECK(hits[0].passage_id == "c#0");
    CHECK(hits[0].relevance == doctest::Approx(1.0));
    CHECK(hits[1].passage_id == "b#0");
    CHECK(retrieve(idx, "hearsay", 10).size() == 3);
  }

  TEST_CASE("ties are broken by passage id") {
    const auto idx = index_corpus({{"z", "alpha beta"}, {"m", "alpha beta"}});
    const auto hits = retrieve(idx, "alpha", 2);
    CHECK(hits[0].passage_id == "m#0");
    CHECK(hits[1].passage_id == "z#0");
  }

  TEST_CASE("hybrid retrieval merges web results") {
    const auto idx = index_corpus({{"a", "hearsay statement"}});
    const auto hits = retrieve_hybrid(idx, FixedWeb{}, "hearsay statement", 1);
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].passage_id == "a#0");
    const auto both = retrieve_hybrid(idx, FixedWeb{}, "hearsay statement", 5);
    CHECK(both.size() == 2);
    CHECK(both[1].provenance == Provenance::WebSearch);
  }

  TEST_CASE("assemble_context rejects duplicate ids") {
    EvidencePassage p;
    p.passage_id = "x";
    p.text = "t";
    const auto ctx = assemble_context("c", {p});
    CHECK(ctx.find("x") != nullptr);
    CHECK(ctx.find("y") == nullptr);
    CHECK(code_of([&] { assemble_context("c", {p, p}); }) == errc::kDuplicatePassage);
  }

  TEST_CASE("corpus directories load through the manifest") {
    const auto docs = load_corpus_dir(testing_support::data_dir() / "e2e" / "corpus");
    CHECK(docs.size() == 3);
    CHECK(docs[0].id == "fre-801");
    CHECK(code_of([] { load_corpus_dir(testing_support::data_dir()); }) == errc::kCorpusIo);
  }

  TEST_CASE("passage documents round-trip") {
    EvidencePassage p{"id#1", "id", "text", 0.25, Provenance::UserSubmitted, 12};
    const auto back = nlohmann::json(p).get<EvidencePassage>();
    CHECK(back == p);
  }
}
