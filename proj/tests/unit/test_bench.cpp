#include <doctest.h>

#include <cmath>
#include <random>

#include "acal/bench.hpp"
#include "acal/document.hpp"
#include "acal/error.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace acal;
using namespace testing_support;

namespace {

const TaskDefinition& hearsay() {
  static const auto t = task_definition("hearsay");
  return t;
}

std::vector<LabeledExample> micro_examples() {
  return load_task(data_dir() / "micro" / "hearsay.tsv", hearsay());
}

void check_matches_oracle(const MetricsReport& r, const oracle::Counts& c, const std::vector<std::string>& labels) {
  CHECK(r.confusion == c.confusion);
  CHECK(r.accuracy == c.accuracy);
  CHECK(r.precision == c.macro_precision);
  CHECK(r.recall == c.macro_recall);
  CHECK(r.macro_f1 == c.macro_f1);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    CHECK(r.per_class.at(labels[i]).precision == c.precision[i]);
    CHECK(r.per_class.at(labels[i]).recall == c.recall[i]);
    CHECK(r.per_class.at(labels[i]).f1 == c.f1[i]);
  }
}

}  // namespace

TEST_SUITE("bench") {
  TEST_CASE("task definitions") {
    CHECK(hearsay().labels() == std::vector<std::string>{"hearsay", "not_hearsay"});
    CHECK(hearsay().canonical_label("YES") == "hearsay");
    CHECK(hearsay().canonical_label("Not_Hearsay") == "not_hearsay");
    CHECK_FALSE(hearsay().canonical_label("maybe"));
    CHECK(hearsay().claim_for("a statement").find("a statement") != std::string::npos);
    const auto courts = task_definition("learned_hands_courts");
    CHECK(courts.labels() == std::vector<std::string>{"yes", "no"});
    CHECK(known_tasks().size() == 2);
    CHECK(code_of([] { task_definition("contracts"); }) == errc::kConfig);
  }

  TEST_CASE("worked example") {
    const std::vector<std::string> labels{"yes", "no"};
    const auto r = evaluate({"yes", "no", "no", "no"}, {"yes", "yes", "no", "no"}, labels);
    CHECK(r.accuracy == 0.75);
    CHECK(r.per_class.at("yes").f1 == doctest::Approx(2.0 / 3.0));
    CHECK(r.per_class.at("no").f1 == doctest::Approx(0.8));
    CHECK(std::abs(r.macro_f1 - 0.7333) < 1e-4);
    CHECK(r.confusion == std::vector<std::vector<std::size_t>>{{1, 1}, {0, 2}});
    CHECK(r.n_examples == 4);
    CHECK(r.per_class.at("yes").support == 2);
  }

  TEST_CASE("perfect and one-class predictions") {
    const std::vector<std::string> labels{"yes", "no"};
    const auto perfect = evaluate({"yes", "no"}, {"yes", "no"}, labels);
    CHECK(perfect.accuracy == 1.0);
    CHECK(perfect.precision == 1.0);
    CHECK(perfect.recall == 1.0);
    CHECK(perfect.macro_f1 == 1.0);

    const auto one = evaluate({"no", "no", "no", "no"}, {"yes", "yes", "no", "no"}, labels);
    CHECK(one.accuracy == 0.5);
    CHECK(std::abs(one.macro_f1 - 0.3333) < 1e-4);
    CHECK(one.per_class.at("yes").precision == 0.0);
    const auto lenient = evaluate({"no", "no", "no", "no"}, {"yes", "yes", "no", "no"}, labels, {1.0});
    CHECK(lenient.per_class.at("yes").precision == 1.0);
    CHECK(lenient.per_class.at("yes").f1 == 0.0);  // 2tp+fp+fn is 2, not zero
  }

  TEST_CASE("metrics match the brute-force oracle") {
    std::mt19937_64 rng(4242);
    const std::vector<std::string> labels{"hearsay", "not_hearsay"};
    for (int round = 0; round < 100; ++round) {
      std::uniform_int_distribution<std::size_t> len(1, 40);
      std::bernoulli_distribution coin(round % 10 == 0 ? 0.95 : 0.5);
      std::vector<std::string> pred, gold;
      for (std::size_t i = len(rng); i > 0; --i) {
        pred.push_back(labels[coin(rng)]);
        gold.push_back(labels[coin(rng)]);
      }
      for (double zd : {0.0, 1.0}) {
        check_matches_oracle(evaluate(pred, gold, labels, {zd}), oracle::metrics(pred, gold, labels, zd), labels);
      }
    }
  }

  TEST_CASE("swapping labels leaves macro-F1 unchanged") {
    std::mt19937_64 rng(3);
    std::bernoulli_distribution coin(0.6);
    for (int round = 0; round < 20; ++round) {
      std::vector<std::string> pred, gold, pred_s, gold_s;
      for (int i = 0; i < 15; ++i) {
        const bool p = coin(rng), g = coin(rng);
        pred.push_back(p ? "yes" : "no");
        gold.push_back(g ? "yes" : "no");
        pred_s.push_back(p ? "no" : "yes");
        gold_s.push_back(g ? "no" : "yes");
      }
      CHECK(evaluate(pred, gold, {"yes", "no"}).macro_f1 ==
            doctest::Approx(evaluate(pred_s, gold_s, {"yes", "no"}).macro_f1).epsilon(1e-15));
    }
  }

  TEST_CASE("metric errors") {
    CHECK(code_of([] { evaluate({"yes"}, {"yes", "no"}, {"yes", "no"}); }) == errc::kLengthMismatch);
    CHECK(code_of([] { evaluate({"perhaps"}, {"yes"}, {"yes", "no"}); }) == errc::kUnknownLabel);
    const auto empty = evaluate({}, {}, {"yes", "no"});
    CHECK(empty.n_examples == 0);
    CHECK(empty.accuracy == 0.0);
  }

  TEST_CASE("TSV loading") {
    const auto ex = micro_examples();
    CHECK(ex.size() == 10);
    CHECK(ex[0].id == "0");
    CHECK(ex[0].label == "hearsay");
    CHECK(ex[1].label == "not_hearsay");

    const auto five = parse_tsv_task("text\tlabel\na\tyes\nb\tno\n\nc\tyes\nd\tno\ne\tyes\n", hearsay());
    CHECK(five.size() == 5);
    CHECK(five[4].id == "hearsay-5");
    CHECK(parse_tsv_task("", hearsay()).empty());
    try {
      parse_tsv_task("text\tlabel\na\tyes\nb\tmaybe\n", hearsay());
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == errc::kUnknownLabel);
      CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
    CHECK(code_of([] { parse_tsv_task("text\tid\na\t1\n", hearsay()); }) == errc::kMissingColumn);
    CHECK(code_of([] { parse_tsv_task("text\tlabel\nonly-text\n", hearsay()); }) == errc::kMissingColumn);
  }

  TEST_CASE("document loading") {
    TempDir dir;
    write_file_atomic(dir / "t.json", R"({"examples": [{"id": "e1", "input": "x", "answer": "No"}]})");
    const auto a = load_task(dir / "t.json", hearsay());
    REQUIRE(a.size() == 1);
    CHECK(a[0] == LabeledExample{"e1", "x", "not_hearsay"});
    write_file_atomic(dir / "t.jsonl", "{\"text\": \"x\", \"label\": \"yes\"}\n\n{\"text\": \"y\", \"label\": \"no\"}\n");
    CHECK(load_task(dir / "t.jsonl", hearsay()).size() == 2);
    write_file_atomic(dir / "empty.json", "");
    CHECK(load_task(dir / "empty.json", hearsay()).empty());
    CHECK(code_of([] { parse_document_task(R"([{"text": "x"}])"_json, task_definition("hearsay")); }) ==
          errc::kMissingColumn);
    CHECK(code_of([] { parse_document_task(R"({"rows": []})"_json, task_definition("hearsay")); }) ==
          errc::kBadDocument);
    CHECK(code_of([&] { load_task(dir / "missing.tsv", hearsay()); }) == errc::kTaskIo);
  }

  TEST_CASE("grids") {
    const auto cr = cr_uae_grid();
    REQUIRE(cr.size() == 4);
    CHECK(cr[0].name == "cr_on_uae_on");
    CHECK(cr[3].name == "cr_off_uae_off");
    CHECK(cr[3].overrides["ablation"]["uae_enabled"] == false);
    const auto beta = beta_grid();
    REQUIRE(beta.size() == 5);
    CHECK(beta[0].name == "beta_0.05");
    CHECK(beta[4].overrides["arena"]["beta"] == 0.25);
    CHECK(single_point().size() == 1);
  }

  TEST_CASE("grid runs report once per point") {
    const auto config = micro_config();
    const auto res = make_resources(config);
    const auto ex = micro_examples();
    CHECK(run_benchmark(hearsay(), ex, config, cr_uae_grid(), res).size() == 4);
    const auto beta = run_benchmark(hearsay(), ex, config, beta_grid(), res);
    CHECK(beta.size() == 5);
    for (const auto& p : beta) {
      CHECK(p.report.n_examples == 10);
      CHECK(p.report.n_failed == 0);
      CHECK(p.report.config["arena"]["beta"] == p.point.overrides["arena"]["beta"]);
    }
  }

  TEST_CASE("the micro-benchmark is deterministic") {
    const auto config = micro_config();
    const auto ex = micro_examples();
    TempDir a, b;
    BenchmarkOptions oa;
    oa.output_dir = a.path();
    BenchmarkOptions ob;
    ob.output_dir = b.path();
    ob.workers = 4;
    const auto ra = run_benchmark(hearsay(), ex, config, cr_uae_grid(), make_resources(config), oa);
    const auto rb = run_benchmark(hearsay(), ex, config, cr_uae_grid(), make_resources(config), ob);
    CHECK(read_file(a / "reports.json") == read_file(b / "reports.json"));
    for (const auto& p : cr_uae_grid()) {
      const auto name = p.name + ".predictions.jsonl";
      CHECK(read_file(a / name) == read_file(b / name));
    }
    CHECK(format_table(ra) == format_table(rb));
    CHECK(format_table(ra).find("cr_off_uae_on") != std::string::npos);
    for (const auto& p : ra) {
      CHECK(p.report.accuracy >= 0.0);
      CHECK(p.report.accuracy <= 1.0);
    }
  }

  TEST_CASE("failures count as wrong unless excluded") {
    auto config = micro_config();
    config.backend.fixtures_dir = data_dir() / "micro" / "no-such-fixtures";
    const auto ex = micro_examples();
    const auto res = make_resources(config);
    const auto wrong = run_benchmark(hearsay(), ex, config, single_point(), res);
    CHECK(wrong[0].report.n_failed == 10);
    CHECK(wrong[0].report.accuracy == 0.0);
    CHECK(wrong[0].report.n_examples == 10);
    CHECK_FALSE(wrong[0].predictions[0].error.empty());

    BenchmarkOptions o;
    o.exclude_failures = true;
    const auto excluded = run_benchmark(hearsay(), ex, config, single_point(), res, o);
    CHECK(excluded[0].report.n_examples == 0);
    CHECK(excluded[0].report.n_failed == 10);
  }
}
