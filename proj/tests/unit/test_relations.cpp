#include <doctest.h>

#include <string>

#include "acal/error.hpp"
#include "acal/relations.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace acal;
using oracle::arg;
using testing_support::code_of;

namespace {

std::vector<Argument> args(std::size_t n) {
  std::vector<Argument> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(arg("x" + std::to_string(i), i % 2 ? Stance::Attack : Stance::Support, 0.5));
  }
  return out;
}

// Answers every pair in a batch with one label and confidence.
std::shared_ptr<ScriptedBackend> uniform(const std::string& label, double confidence) {
  auto b = std::make_shared<ScriptedBackend>();
  b->fallback([=](const BackendRequest& r) -> std::optional<BackendResponse> {
    nlohmann::json verdicts = nlohmann::json::array();
    std::size_t pos = 0;
    while ((pos = r.prompt.find("  first [", pos)) != std::string::npos) {
      const auto a0 = pos + 9;
      const auto a1 = r.prompt.find(']', a0);
      const auto b0 = r.prompt.find("  second [", a1) + 10;
      const auto b1 = r.prompt.find(']', b0);
      verdicts.push_back({{"first", r.prompt.substr(a0, a1 - a0)},
                          {"second", r.prompt.substr(b0, b1 - b0)},
                          {"label", label},
                          {"confidence", confidence}});
      pos = b1;
    }
    return BackendResponse{{{"verdicts", verdicts}}, ""};
  });
  return b;
}

}  // namespace

TEST_SUITE("relations") {
  TEST_CASE("heuristic relations follow stance") {
    const auto a = args(3);
    const auto edges = heuristic_relations(a);
    CHECK(edges.size() == 6);
    CHECK(edges[0].kind == RelationKind::Attack);  // x0 support vs x1 attack
    CHECK(edges[2].kind == RelationKind::Support);  // x0 vs x2, both support
    for (const auto& e : edges) CHECK(e.origin == EdgeOrigin::Heuristic);
    const auto report = heuristic_report(a);
    CHECK(report.verdicts.size() == 3);
    CHECK(report.batches == 0);
  }

  TEST_CASE("batch plans") {
    const auto plan = plan_batches(5, 3);
    CHECK(plan.pair_count() == 10);
    CHECK(plan.batches.size() == 4);
    CHECK(plan.batches[0][0] == ArgumentPair{0, 1});
    CHECK(plan.batches[3].size() == 1);
    CHECK(plan_batches(1, 10).batches.empty());
    CHECK(code_of([] { plan_batches(3, 0); }) == errc::kInvalidParams);
  }

  TEST_CASE("confident verdicts become bidirectional model edges") {
    auto b = uniform("attack", 0.9);
    const auto r = model_relations(args(3), *b, {10, 0.6, 1});
    CHECK(r.edges.size() == 6);
    CHECK(r.edges[0].source == NodeId("x0"));
    CHECK(r.edges[1].source == NodeId("x1"));
    CHECK(r.edges[1].target == NodeId("x0"));
    CHECK(r.edges[0].origin == EdgeOrigin::Model);
    CHECK(r.demotions() == 0);
    CHECK(b->calls() == 1);
  }

  TEST_CASE("low-confidence verdicts are demoted") {
    auto b = uniform("support", 0.55);
    const auto r = model_relations(args(4), *b);
    CHECK(r.edges.empty());
    CHECK(r.demotions() == 6);
    for (const auto& v : r.verdicts) {
      CHECK(v.label == RelationLabel::Neutral);
      CHECK(v.demoted);
    }
    auto strict = uniform("support", 0.7);
    CHECK(model_relations(args(4), *strict, {10, 0.8, 1}).edges.empty());
    CHECK(code_of([&] { model_relations(args(2), *strict, {10, 0.5, 1}); }) == errc::kInvalidParams);
  }

  TEST_CASE("neutral verdicts add nothing") {
    auto b = uniform("neutral", 0.99);
    CHECK(model_relations(args(4), *b).edges.empty());
  }

  TEST_CASE("reversed orientation is accepted") {
    ScriptedBackend b;
    b.on(Purpose::Relate, {{"verdicts", {{{"first", "x1"}, {"second", "x0"}, {"label", "attack"}, {"confidence", 0.8}}}}});
    const auto r = model_relations(args(2), b);
    CHECK(r.edges.size() == 2);
    CHECK(r.warnings.empty());
  }

  TEST_CASE("a bad batch is retried once and then defaults to neutral") {
    ScriptedBackend b;
    b.on_raw(Purpose::Relate, "not json at all");
    const auto r = model_relations(args(3), b, {2, 0.6, 1});
    CHECK(b.calls() == 4);  // two batches, two attempts each
    CHECK(r.retries == 2);
    CHECK(r.edges.empty());
    for (const auto& v : r.verdicts) CHECK(v.defaulted);
  }

  TEST_CASE("a retry that succeeds keeps its verdicts") {
    int n = 0;
    ScriptedBackend b;
    b.fallback([&](const BackendRequest&) -> std::optional<BackendResponse> {
      if (n++ == 0) return BackendResponse{{{"verdicts", {{{"first", "x0"}}}}}, ""};
      return BackendResponse{
          {{"verdicts", {{{"first", "x0"}, {"second", "x1"}, {"label", "support"}, {"confidence", 0.9}}}}}, ""};
    });
    const auto r = model_relations(args(2), b);
    CHECK(r.retries == 1);
    CHECK(r.edges.size() == 2);
  }

  TEST_CASE("missing pairs are neutral with a warning") {
    ScriptedBackend b;
    b.on(Purpose::Relate, {{"verdicts", nlohmann::json::array()}});
    const auto r = model_relations(args(2), b);
    CHECK(r.edges.empty());
    CHECK(r.verdicts[0].defaulted);
    CHECK(r.warnings.size() == 1);
  }

  TEST_CASE("backend absence is fatal") {
    ScriptedBackend b;
    CHECK(code_of([&] { model_relations(args(2), b); }) == errc::kBackendUnavailable);
  }

  TEST_CASE("call count is ceil(C(n,2)/b)") {
    for (std::size_t n = 2; n <= 12; ++n) {
      for (std::size_t bs : {1, 5, 10}) {
        auto b = uniform("neutral", 0.9);
        model_relations(args(n), *b, {bs, 0.6, 3});
        const std::size_t pairs = n * (n - 1) / 2;
        CHECK(b->calls() == (pairs + bs - 1) / bs);
      }
    }
  }
}
