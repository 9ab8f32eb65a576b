#include <doctest.h>

#include "acal/document.hpp"
#include "acal/error.hpp"
#include "acal/qbaf.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace acal;
using oracle::arg;
using testing_support::code_of;

namespace {

bool has_kind(const std::vector<Diagnostic>& ds, DiagnosticKind k) {
  for (const auto& d : ds) {
    if (d.kind == k) return true;
  }
  return false;
}

}  // namespace

TEST_SUITE("qbaf") {
  TEST_CASE("build_graph wires stance edges to the claim") {
    auto g = build_graph("c", {arg("s", Stance::Support, 0.8), arg("a", Stance::Attack, 0.3)}, {});
    CHECK(g.claim.id == kClaimId);
    CHECK(g.claim.base_strength == 0.5);
    REQUIRE(g.edges.size() == 2);
    CHECK(g.edges[0].target == kClaimId);
    CHECK(g.edges[0].kind == RelationKind::Support);
    CHECK(g.edges[1].kind == RelationKind::Attack);
    CHECK(g.edges[1].origin == EdgeOrigin::Construction);
    CHECK(validate(g).empty());
  }

  TEST_CASE("edges are a set keyed on source, target and kind") {
    auto g = build_graph("c", {arg("x", Stance::Support, 0.5), arg("y", Stance::Support, 0.5)}, {});
    Edge e{NodeId("x"), NodeId("y"), RelationKind::Support, 0.9, EdgeOrigin::Model};
    CHECK(g.add_edge(e));
    CHECK_FALSE(g.add_edge(e));
    e.confidence = 0.7;
    CHECK_FALSE(g.add_edge(e));
    e.kind = RelationKind::Attack;
    CHECK(g.add_edge(e));
    CHECK(g.edges.size() == 4);
  }

  TEST_CASE("construction errors") {
    CHECK(code_of([] { build_graph("c", {arg("x", Stance::Support, 0.5), arg("x", Stance::Attack, 0.5)}, {}); }) ==
          errc::kDuplicateId);
    CHECK(code_of([] { build_graph("c", {arg("claim", Stance::Support, 0.5)}, {}); }) == errc::kDuplicateId);
    CHECK(code_of([] { build_graph("c", {arg("x", Stance::Support, 1.5)}, {}); }) == errc::kStrengthRange);
    CHECK(code_of([] {
            auto a = arg("x", Stance::Support, 0.5);
            a.text.clear();
            build_graph("c", {a}, {});
          }) == errc::kEmptyText);
    CHECK(code_of([] {
            auto a = arg("x", Stance::Support, 0.5);
            a.base_strength.reset();
            build_graph("c", {a}, {});
          }) == errc::kMissingStrength);
    CHECK(code_of([] {
            build_graph("c", {arg("x", Stance::Support, 0.5)},
                        {{NodeId("x"), NodeId("ghost"), RelationKind::Attack, 1.0, EdgeOrigin::Heuristic}});
          }) == errc::kDanglingEdge);
    CHECK(code_of([] {
            build_graph("c", {arg("x", Stance::Support, 0.5)},
                        {{NodeId("x"), NodeId("x"), RelationKind::Attack, 1.0, EdgeOrigin::Heuristic}});
          }) == errc::kSelfLoop);
    CHECK(code_of([] {
            build_graph("c", {arg("x", Stance::Support, 0.5)},
                        {{NodeId("x"), kClaimId, RelationKind::Attack, 1.0, EdgeOrigin::Heuristic}});
          }) == errc::kStanceParity);
    CHECK(code_of([] {
            build_graph("c", {arg("x", Stance::Support, 0.5), arg("y", Stance::Attack, 0.5)},
                        {{NodeId("x"), NodeId("y"), RelationKind::Attack, 0.55, EdgeOrigin::Model}});
          }) == errc::kInvalidParams);
  }

  TEST_CASE("validate reports without throwing") {
    QbafGraph g;
    g.arguments.push_back(arg("x", Stance::Support, 0.5));
    g.arguments.push_back(arg("x", Stance::Attack, 2.0));
    g.arguments.back().text.clear();
    g.edges.push_back({NodeId("x"), NodeId("x"), RelationKind::Support, 1.0, EdgeOrigin::Heuristic});
    g.edges.push_back({NodeId("x"), NodeId("nowhere"), RelationKind::Support, 1.0, EdgeOrigin::Heuristic});
    g.edges.push_back({NodeId("x"), NodeId("nowhere"), RelationKind::Support, 1.0, EdgeOrigin::Heuristic});
    g.edges.push_back({NodeId("x"), kClaimId, RelationKind::Attack, 0.3, EdgeOrigin::Model});
    const auto ds = validate(g);
    CHECK(has_kind(ds, DiagnosticKind::DuplicateId));
    CHECK(has_kind(ds, DiagnosticKind::StrengthRange));
    CHECK(has_kind(ds, DiagnosticKind::EmptyText));
    CHECK(has_kind(ds, DiagnosticKind::SelfLoop));
    CHECK(has_kind(ds, DiagnosticKind::DanglingEndpoint));
    CHECK(has_kind(ds, DiagnosticKind::DuplicateEdge));
    CHECK(has_kind(ds, DiagnosticKind::LowConfidenceModelEdge));
    CHECK(has_kind(ds, DiagnosticKind::MissingStanceEdge));
  }

  TEST_CASE("remove_argument and remove_edges_between") {
    auto g = build_graph("c", {arg("x", Stance::Support, 0.5), arg("y", Stance::Attack, 0.5)},
                         {{NodeId("x"), NodeId("y"), RelationKind::Attack, 1.0, EdgeOrigin::Heuristic},
                          {NodeId("y"), NodeId("x"), RelationKind::Attack, 1.0, EdgeOrigin::Heuristic}});
    CHECK(g.remove_edges_between(NodeId("y"), NodeId("x")) == 2);
    CHECK(g.edges.size() == 2);
    CHECK(g.remove_argument(NodeId("x")));
    CHECK_FALSE(g.contains(NodeId("x")));
    CHECK(g.edges.size() == 1);
    CHECK_FALSE(g.remove_argument(NodeId("x")));
    CHECK(g.incoming(kClaimId).size() == 1);
  }

  TEST_CASE("base_strength lookups") {
    auto g = oracle::star({0.8}, {});
    CHECK(g.base_strength(kClaimId) == 0.5);
    CHECK(g.base_strength(NodeId("s1")) == 0.8);
    CHECK(code_of([&] { g.base_strength(NodeId("zz")); }) == errc::kUnknownNode);
    g.arguments[0].base_strength.reset();
    CHECK(code_of([&] { g.base_strength(NodeId("s1")); }) == errc::kMissingStrength);
  }

  TEST_CASE("graph document round-trips bit-exact") {
    auto g = oracle::star({0.8, 0.1 + 0.2}, {1.0 / 3.0});
    g.arguments[0].evidence_refs = {"doc#0", "doc#1"};
    g.arguments[1].base_strength.reset();
    g.add_edge({NodeId("s1"), NodeId("a1"), RelationKind::Attack, 0.61, EdgeOrigin::Model});
    const auto text = to_document(g);
    const auto back = document_as<QbafGraph>(parse_document(text));
    CHECK(back == g);
    CHECK(to_document(back) == text);

    const auto j = parse_document(text);
    CHECK(j.contains("claim"));
    CHECK(j.contains("arguments"));
    CHECK(j.contains("edges"));
    CHECK(j["arguments"][1]["base_strength"].is_null());
    CHECK(j["edges"][0]["origin"] == "Construction");
  }

  TEST_CASE("malformed graph documents raise BAD_DOCUMENT") {
    CHECK(code_of([] { document_as<QbafGraph>(parse_document(R"({"claim": {}})")); }) == errc::kBadDocument);
    CHECK(code_of([] {
            document_as<Edge>(parse_document(
                R"({"source":"a","target":"b","kind":"sideways","confidence":1,"origin":"human"})"));
          }) == errc::kBadDocument);
  }
}
