#include <doctest.h>

#include "acal/decision.hpp"
#include "acal/error.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace acal;
using testing_support::code_of;

namespace {

std::unique_ptr<ScriptedBackend> judge(const char* answer) {
  auto b = std::make_unique<ScriptedBackend>();
  b->on(Purpose::Judge, {{"answer", answer}, {"rationale", "independent analysis"}});
  return b;
}

}  // namespace

TEST_SUITE("decision") {
  TEST_CASE("threshold rule") {
    CHECK(threshold_answer(0.5, 0.5) == Answer::Yes);
    CHECK(threshold_answer(0.4999, 0.5) == Answer::No);
    CHECK(threshold_answer(0.9, 0.95) == Answer::No);
  }

  TEST_CASE("band boundaries are inclusive") {
    auto bp = judge("No");
    auto& b = *bp;
    DecisionParams p;
    LegalTask t;
    for (double s : {0.49, 0.50, 0.51}) {
      const auto d = decide(s, p, t, &b);
      CHECK(d.escalated);
      CHECK(d.decided_by == DecidedBy::FinalJudge);
      CHECK(d.answer == Answer::No);
      CHECK(d.judge_rationale == "independent analysis");
      CHECK(d.claim_strength == s);
    }
    CHECK(b.calls() == 3);
    for (double s : {0.489, 0.52}) {
      const auto d = decide(s, p, t, &b);
      CHECK_FALSE(d.escalated);
      CHECK(d.decided_by == DecidedBy::Threshold);
      CHECK_FALSE(d.judge_rationale);
    }
    CHECK(b.calls() == 3);
    CHECK(decide(0.52, p, t, &b).answer == Answer::Yes);
    CHECK(decide(0.489, p, t, &b).answer == Answer::No);
  }

  TEST_CASE("the judge overrides the threshold inside the band") {
    auto yp = judge("yes");
    auto& yes = *yp;
    const auto d = decide(0.495, {}, LegalTask{}, &yes, "summary text");
    CHECK(d.answer == Answer::Yes);
    CHECK(d.decided_by == DecidedBy::FinalJudge);
  }

  TEST_CASE("with UAE off the band is ignored") {
    auto bp = judge("No");
    auto& b = *bp;
    DecisionParams p;
    p.uae_enabled = false;
    const auto d = decide(0.5, p, LegalTask{}, &b);
    CHECK(d.answer == Answer::Yes);
    CHECK(d.decided_by == DecidedBy::Threshold);
    CHECK(b.calls() == 0);
  }

  TEST_CASE("judge failures fall back to the threshold with a warning") {
    const auto none = decide(0.5, {}, LegalTask{}, nullptr);
    CHECK(none.answer == Answer::Yes);
    CHECK(none.decided_by == DecidedBy::Threshold);
    CHECK_FALSE(none.escalated);
    CHECK(none.warnings.size() == 1);

    auto mp = judge("Maybe");
    auto& maybe = *mp;
    CHECK(decide(0.495, {}, LegalTask{}, &maybe).answer == Answer::No);
    ScriptedBackend empty;
    CHECK(decide(0.495, {}, LegalTask{}, &empty).warnings.size() == 1);
  }

  TEST_CASE("the judge prompt carries the task and the summary") {
    std::string seen;
    ScriptedBackend b;
    b.fallback([&](const BackendRequest& r) -> std::optional<BackendResponse> {
      seen = r.prompt;
      return BackendResponse{{{"answer", "Yes"}}, ""};
    });
    LegalTask t;
    t.claim = "The note is hearsay.";
    decide(0.5, {}, t, &b, "SUMMARY-MARKER\n");
    CHECK(seen.find("The note is hearsay.") != std::string::npos);
    CHECK(seen.find("SUMMARY-MARKER") != std::string::npos);
  }

  TEST_CASE("judge summary ranks arguments by strength") {
    const auto g = oracle::star({0.3, 0.9}, {0.6});
    const auto s = solve_equilibrium(g);
    const auto text = summarize_for_judge(g, s, 2);
    CHECK(text.find("[s2]") < text.find("[a1]"));
    CHECK(text.find("[s1]") == std::string::npos);
  }

  TEST_CASE("parameter validation") {
    CHECK(code_of([] { decide(1.1, {}, LegalTask{}, nullptr); }) == errc::kStrengthRange);
    DecisionParams p;
    p.threshold = 1.0;
    CHECK(code_of([&] { validate_params(p); }) == errc::kInvalidParams);
    p = {};
    p.band_low = 0.6;
    p.band_high = 0.4;
    CHECK(code_of([&] { validate_params(p); }) == errc::kInvalidParams);
  }

  TEST_CASE("decision documents round-trip") {
    Decision d;
    d.answer = Answer::Yes;
    d.claim_strength = 0.5;
    d.escalated = true;
    d.decided_by = DecidedBy::FinalJudge;
    d.judge_rationale = "r";
    d.warnings = {"w"};
    const nlohmann::json j = d;
    CHECK(j["answer"] == "Yes");
    CHECK(j["decided_by"] == "FinalJudge");
    CHECK(j.get<Decision>() == d);
    const nlohmann::json pj = DecisionParams{};
    CHECK(pj.get<DecisionParams>() == DecisionParams{});
  }
}
