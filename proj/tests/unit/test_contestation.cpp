#include <doctest.h>

#include <cmath>

#include "acal/contestation.hpp"
#include "acal/error.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace acal;
using namespace testing_support;

namespace {

EditOp op(EditAction a) { return {"tester", ContestationType::Factual, "2026-01-02T00:00:00Z", std::move(a)}; }

ContestationSession balanced() { return ContestationSession::open(record_for(oracle::star({0.8}, {0.8})), "s1"); }

}  // namespace

TEST_SUITE("contestation") {
  TEST_CASE("a fresh session reproduces the case") {
    const auto base = record_for(oracle::star({0.8, 0.4}, {0.6}));
    const auto s = ContestationSession::open(base, "s1");
    CHECK(s.graph() == base.graph);
    CHECK(s.strengths().values == base.strengths.values);
    CHECK(s.decision() == base.decision);
    CHECK_FALSE(s.review_required());
    CHECK(s.audit_log().empty());
    CHECK(s.recompute(nullptr).strengths.values == base.strengths.values);
  }

  TEST_CASE("rejecting the only attacker") {
    auto s = balanced();
    CHECK(s.strengths().claim() == 0.5);
    const auto& e = s.apply(op(RejectArgument{NodeId("a1"), "irrelevant"}), nullptr);
    CHECK(e.seq == 1);
    CHECK(e.sigma_before == 0.5);
    CHECK(std::abs(e.sigma_after - 0.695122) <= 1e-6);
    CHECK_FALSE(e.decision);  // Yes by threshold before and after
    CHECK_FALSE(s.graph().contains(NodeId("a1")));
    CHECK(s.review_required());
    CHECK(code_of([&] { s.apply(op(EditArgumentText{NodeId("a1"), "new", ""}), nullptr); }) ==
          errc::kEditStaleNode);
    CHECK(code_of([&] { s.card(NodeId("a1")); }) == errc::kEditStaleNode);
  }

  TEST_CASE("edit validation leaves the session untouched") {
    auto s = balanced();
    const auto before = s.state_document();
    CHECK(code_of([&] { s.apply(op(RejectArgument{kClaimId, ""}), nullptr); }) == errc::kEditClaimNode);
    CHECK(code_of([&] { s.apply(op(RejectArgument{NodeId("zz"), ""}), nullptr); }) == errc::kEditUnknownNode);
    CHECK(code_of([&] { s.apply(op(SetBaseStrength{NodeId("s1"), 0.05, ""}), nullptr); }) ==
          errc::kEditInvalidStrength);
    CHECK(code_of([&] { s.apply(op(EditArgumentText{NodeId("s1"), "", ""}), nullptr); }) == errc::kEditInvalidText);
    CHECK(code_of([&] {
            s.apply(op(SetRelation{NodeId("s1"), kClaimId, RelationKind::Attack, ""}), nullptr);
          }) == errc::kEditInvalidRelation);
    CHECK(code_of([&] {
            s.apply(op(SetRelation{NodeId("s1"), NodeId("s1"), RelationKind::Attack, ""}), nullptr);
          }) == errc::kEditInvalidRelation);
    Argument a = oracle::arg("s1", Stance::Support, 0.5);
    CHECK(code_of([&] { s.apply(op(AddArgument{a, {}}), nullptr); }) == errc::kEditDuplicateId);
    a.id = NodeId("");
    a.base_strength.reset();
    CHECK(code_of([&] { s.apply(op(AddArgument{a, {}}), nullptr); }) == errc::kEditInvalidStrength);
    a.base_strength = 0.5;
    a.evidence_refs = {"nowhere"};
    CHECK(code_of([&] { s.apply(op(AddArgument{a, {}}), nullptr); }) == errc::kEditUnknownPassage);
    CHECK(s.state_document() == before);
  }

  TEST_CASE("added arguments get ids and their citations are kept") {
    auto s = balanced();
    Argument a = oracle::arg("", Stance::Support, 0.6);
    a.author_role.clear();
    a.evidence_refs = {"exhibit-1"};
    EvidencePassage p;
    p.passage_id = "exhibit-1";
    p.text = "signed receipt";
    const auto& e = s.apply(op(AddArgument{a, {p}}), nullptr);
    const auto& added = std::get<AddArgument>(e.op.action);
    CHECK(added.argument.id == NodeId("human.s1"));
    const auto* stored = s.graph().find_argument(NodeId("human.s1"));
    REQUIRE(stored != nullptr);
    CHECK(stored->author_role == "tester");
    CHECK(s.passages().back().provenance == Provenance::UserSubmitted);
    CHECK(s.card(NodeId("human.s1")).evidence.size() == 1);
    CHECK(e.sigma_after > e.sigma_before);
    s.apply(op(AddArgument{a, {}}), nullptr);
    CHECK(s.graph().contains(NodeId("human.s2")));
  }

  TEST_CASE("relations are set and removed in both directions") {
    auto s = ContestationSession::open(record_for(oracle::star({0.8}, {0.6})), "s");
    s.apply(op(SetRelation{NodeId("s1"), NodeId("a1"), RelationKind::Attack, "conflict"}), nullptr);
    CHECK(s.graph().incoming(NodeId("a1")).size() == 1);
    CHECK(s.graph().incoming(NodeId("s1")).size() == 1);
    CHECK(s.graph().incoming(NodeId("s1"))[0]->origin == EdgeOrigin::Human);
    s.apply(op(SetRelation{NodeId("a1"), NodeId("s1"), std::nullopt, ""}), nullptr);
    CHECK(s.graph().incoming(NodeId("a1")).empty());
    CHECK(s.graph().edges.size() == 2);
  }

  TEST_CASE("a human strength is binding") {
    auto s = balanced();
    s.apply(op(SetBaseStrength{NodeId("a1"), 0.1, ""}), nullptr);
    CHECK(*s.graph().find_argument(NodeId("a1"))->base_strength == 0.1);
    CHECK(s.strengths().at(NodeId("a1")) == 0.1);
  }

  TEST_CASE("accepting changes nothing but the accepted set") {
    auto s = balanced();
    const auto& e = s.apply(op(AcceptArgument{NodeId("s1")}), nullptr);
    CHECK(e.sigma_after == e.sigma_before);
    CHECK(s.accepted().contains(NodeId("s1")));
    s.apply(op(RejectArgument{NodeId("s1"), ""}), nullptr);
    CHECK_FALSE(s.accepted().contains(NodeId("s1")));
  }

  TEST_CASE("review stays required after reverting") {
    auto s = balanced();
    s.apply(op(SetBaseStrength{NodeId("a1"), 0.2, ""}), nullptr);
    CHECK(s.review_required());
    s.apply(op(SetBaseStrength{NodeId("a1"), 0.8, ""}), nullptr);
    CHECK(s.strengths().claim() == 0.5);
    CHECK(s.review_required());

    auto small = balanced();
    small.apply(op(SetBaseStrength{NodeId("a1"), 0.75, ""}), nullptr);
    CHECK_FALSE(small.review_required());
  }

  TEST_CASE("review trigger") {
    CHECK(needs_review(0.5, 0.61, Answer::Yes, Answer::Yes, 0.1));
    CHECK_FALSE(needs_review(0.5, 0.6, Answer::Yes, Answer::Yes, 0.1));
    CHECK(needs_review(0.5, 0.49, Answer::Yes, Answer::No, 0.1));
  }

  TEST_CASE("an unchanged decision is not logged") {
    auto s = ContestationSession::open(record_for(oracle::star({0.8}, {})), "s");
    const auto& e = s.apply(op(RejectArgument{NodeId("s1"), ""}), nullptr);
    CHECK_FALSE(e.decision.has_value());  // no judge: 0.5 is still Yes by threshold
    CHECK(s.decision().warnings.size() == 1);
  }

  TEST_CASE("the judge decides edits that land in the band") {
    auto s = ContestationSession::open(record_for(oracle::star({0.8}, {})), "s");
    ScriptedBackend judge;
    judge.on(Purpose::Judge, {{"answer", "No"}, {"rationale", "close call"}});
    const auto& e = s.apply(op(RejectArgument{NodeId("s1"), ""}), &judge);
    REQUIRE(e.decision);
    CHECK(e.decision->answer == Answer::No);
    CHECK(e.decision->decided_by == DecidedBy::FinalJudge);
    CHECK(s.review_required());
  }

  TEST_CASE("preview does not touch the session") {
    auto s = balanced();
    const auto before = s.state_document();
    const auto p = s.preview(op(RejectArgument{NodeId("a1"), ""}), nullptr);
    CHECK(std::abs(p.sigma_after - 0.695122) <= 1e-6);
    CHECK(s.state_document() == before);
  }

  TEST_CASE("audit log is JSON lines and round-trips") {
    auto s = balanced();
    s.apply(op(SetBaseStrength{NodeId("a1"), 0.3, "weak"}), nullptr);
    s.apply(op(RejectArgument{NodeId("a1"), ""}), nullptr);
    const auto text = audit_to_jsonl(s.audit_log());
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
    CHECK(audit_from_jsonl(text) == s.audit_log());
    CHECK(code_of([] { audit_from_jsonl("{\"seq\": 1}\n"); }) == errc::kBadDocument);
    const auto j = nlohmann::json::parse(text.substr(0, text.find('\n')));
    CHECK(j["op"]["type"] == "Factual");
  }

  TEST_CASE("session state restores") {
    auto s = balanced();
    s.apply(op(RejectArgument{NodeId("a1"), ""}), nullptr);
    const auto state = s.state_document();
    const auto back = ContestationSession::restore(s.base(), state, s.audit_log());
    CHECK(back.state_document() == state);
    CHECK(code_of([&] { ContestationSession::restore(s.base(), state, {}); }) == errc::kStoreIo);
  }

  TEST_CASE("contestation prompts yield pending proposals") {
    auto s = balanced();
    ScriptedBackend b;
    b.on(Purpose::Contest,
         {{"proposals",
           {{{"action", "edit_text"}, {"target", "s1"}, {"text", "corrected"}, {"rationale", "r"}},
            {{"action", "add_argument"}, {"stance", "attack"}, {"text", "an exception applies"},
             {"evidence_refs", {"user-1", "ghost"}}},
            {{"action", "add_argument"}, {"stance", "support"}, {"text", "x"}, {"base_strength", 3.0}},
            {{"action", "edit_text"}, {"target", "nobody"}, {"text", "y"}},
            {{"action", "dance"}, {"text", "z"}}}}});
    b.on(Purpose::Score, {{"score", 0.7}});
    const auto r = s.contest(ContestationType::MissingException, "an exception was missed",
                             {"the statute text"}, "reviewer", b);
    REQUIRE(r.proposals.size() == 3);
    CHECK(r.warnings.size() == 3);  // ghost ref, unknown target, unknown action
    CHECK(r.proposals[0].id == "P1");
    const auto& added = std::get<AddArgument>(r.proposals[1].op.action).argument;
    CHECK(*added.base_strength == 0.7);
    CHECK(added.evidence_refs == std::vector<std::string>{"user-1"});
    CHECK(*std::get<AddArgument>(r.proposals[2].op.action).argument.base_strength == 1.0);
    CHECK(s.audit_log().empty());
    CHECK(s.pending_proposals().size() == 3);

    const auto& e = s.accept_proposal("P2", "", nullptr);
    CHECK(e.op.actor == "reviewer");
    CHECK(e.sigma_after < e.sigma_before);
    s.reject_proposal("P3");
    CHECK(s.pending_proposals().size() == 1);
    CHECK(code_of([&] { s.accept_proposal("P2", "", nullptr); }) == errc::kProposalNotFound);
    CHECK(code_of([&] { s.accept_proposal("P9", "", nullptr); }) == errc::kProposalNotFound);
  }

  TEST_CASE("a failing contestation backend yields only a warning") {
    auto s = balanced();
    ScriptedBackend none;
    const auto r = s.contest(ContestationType::Precedent, "x", {}, "u", none);
    CHECK(r.proposals.empty());
    CHECK(r.warnings.size() == 1);
  }

  TEST_CASE("argument cards") {
    const auto base = record_for(oracle::star({0.8}, {}));
    const auto c = argument_card(base, NodeId("s1"));
    CHECK(c.strength == 0.8);
    CHECK(c.energy_contribution == 0.8);
    CHECK(std::abs(c.claim_effect - 0.195122) <= 1e-6);
    CHECK(c.influence.find("Supports") != std::string::npos);
    CHECK(code_of([&] { argument_card(base, kClaimId); }) == errc::kEditClaimNode);
    CHECK(code_of([&] { argument_card(base, NodeId("x")); }) == errc::kUnknownNode);
  }

  TEST_CASE("dashboard and participation over the demo case") {
    const auto config = e2e_config();
    const auto r = run_case(e2e_input(), config, make_resources(config), fixed_clock);
    const auto rows = participation_summary(r);
    std::size_t args = 0, clashes = 0;
    for (const auto& row : rows) {
      args += row.supports + row.attacks;
      clashes += row.clashes;
      CHECK(row.wins + row.ties + row.losses == row.clashes);
    }
    CHECK(args == r.graph.arguments.size());
    CHECK(clashes % 2 == 0);  // each clash has two sides
    const auto d = dashboard(r);
    CHECK(d["cards"].size() == r.graph.arguments.size());
    CHECK(d["decision"]["answer"] == "Yes");
  }

  TEST_CASE("edit op documents") {
    const auto o = op(SetRelation{NodeId("a"), NodeId("b"), RelationKind::Support, "r"});
    const nlohmann::json j = o;
    CHECK(j.get<EditOp>() == o);
    CHECK(action_name(o.action) == j["op"].get<std::string>());
    CHECK(parse_contestation_type("LegalRule") == ContestationType::LegalRule);
    CHECK(code_of([] { parse_contestation_type("Vibes"); }) == errc::kBadDocument);
  }
}
