#include <doctest.h>

#include <cmath>
#include <random>

#include "acal/error.hpp"
#include "acal/qbaf.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace acal;
using testing_support::code_of;

TEST_SUITE("semantics") {
  TEST_CASE("impact function") {
    CHECK(impact(0.0) == 0.0);
    CHECK(impact(-3.0) == 0.0);
    CHECK(impact(1.0) == doctest::Approx(0.5));
    CHECK(impact(0.8) == doctest::Approx(0.64 / 1.64));
    for (double x = 0.0; x < 10.0; x += 0.25) {
      CHECK(impact(x) < 1.0);
      CHECK(impact(x + 0.25) > impact(x));
    }
  }

  TEST_CASE("local equilibrium") {
    CHECK(local_equilibrium(0.3, 0.0) == 0.3);
    CHECK(local_equilibrium(0.5, 0.8) == doctest::Approx(0.5 + 0.5 * (0.64 / 1.64)));
    CHECK(local_equilibrium(0.5, -0.8) == doctest::Approx(0.5 - 0.5 * (0.64 / 1.64)));
    CHECK(local_equilibrium(0.0, -5.0) == 0.0);
    CHECK(local_equilibrium(1.0, 5.0) == 1.0);
    CHECK(code_of([] { local_equilibrium(1.2, 0.0); }) == errc::kStrengthRange);
  }

  TEST_CASE("local equilibrium is non-decreasing in energy") {
    for (double tau : {0.0, 0.1, 0.5, 0.9, 1.0}) {
      double prev = -1.0;
      for (double e = -4.0; e <= 4.0; e += 0.05) {
        const double v = local_equilibrium(tau, e);
        CHECK(v >= prev);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        prev = v;
      }
    }
  }

  TEST_CASE("anchor values") {
    const auto isolated = solve_equilibrium(oracle::star({}, {}));
    CHECK(isolated.claim() == 0.5);
    CHECK(isolated.converged);

    const auto one = solve_equilibrium(oracle::star({0.8}, {}));
    CHECK(one.at(NodeId("s1")) == 0.8);
    CHECK(std::abs(one.claim() - 0.695122) <= 1e-6);

    const auto balanced = solve_equilibrium(oracle::star({0.8}, {0.8}));
    CHECK(balanced.claim() == 0.5);
  }

  TEST_CASE("leaves are pinned to tau") {
    const auto g = oracle::star({0.3, 0.9}, {0.7});
    const auto s = solve_equilibrium(g);
    for (const auto& a : g.arguments) CHECK(s.at(a.id) == *a.base_strength);
  }

  TEST_CASE("acyclic graphs match the closed form") {
    std::mt19937_64 rng(20240611);
    for (int round = 0; round < 40; ++round) {
      const auto g = oracle::random_tree(rng, 1 + round % 15, round % 3 == 0);
      const auto expect = oracle::closed_form(g);
      const auto got = solve_equilibrium(g);
      CHECK(got.converged);
      for (const auto& [id, v] : expect) CHECK(std::abs(got.at(NodeId(id)) - v) <= 1e-6);
    }
  }

  TEST_CASE("duality: adding a supporter never lowers the claim, an attacker never raises it") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    for (int round = 0; round < 30; ++round) {
      std::vector<double> sup, att;
      for (int i = 0; i < round % 4; ++i) sup.push_back(u(rng));
      for (int i = 0; i < (round / 4) % 4; ++i) att.push_back(u(rng));
      const double base = solve_equilibrium(oracle::star(sup, att)).claim();
      auto more_sup = sup;
      more_sup.push_back(u(rng));
      auto more_att = att;
      more_att.push_back(u(rng));
      CHECK(solve_equilibrium(oracle::star(more_sup, att)).claim() >= base - 1e-12);
      CHECK(solve_equilibrium(oracle::star(sup, more_att)).claim() <= base + 1e-12);
    }
  }

  TEST_CASE("symmetry: swapping supporters and attackers mirrors the claim") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int round = 0; round < 20; ++round) {
      std::vector<double> sup, att;
      for (int i = 0; i < 1 + round % 5; ++i) sup.push_back(u(rng));
      for (int i = 0; i < round % 3; ++i) att.push_back(u(rng));
      const double a = solve_equilibrium(oracle::star(sup, att)).claim();
      const double b = solve_equilibrium(oracle::star(att, sup)).claim();
      CHECK(a + b == doctest::Approx(1.0).epsilon(1e-9));
    }
  }

  TEST_CASE("cyclic graphs stay in range and converged runs are fixed points") {
    std::mt19937_64 rng(31337);
    for (int round = 0; round < 100; ++round) {
      const auto g = oracle::random_cyclic(rng, 2 + round % 9, 0.5);
      const auto s = solve_equilibrium(g);
      for (const auto& [id, v] : s.values) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
      if (s.converged) {
        CHECK(s.residual <= 1e-6);
        CHECK(fixed_point_residual(g, s) <= 1e-6);
      }
    }
  }

  TEST_CASE("non-convergence returns the last iterate") {
    const auto g = oracle::random_cyclic(*std::make_unique<std::mt19937_64>(5), 6, 1.0);
    SolverParams p;
    p.max_iterations = 1;
    p.tolerance = 1e-15;
    const auto s = solve_equilibrium(g, p);
    CHECK_FALSE(s.converged);
    CHECK(s.iterations == 1);
    CHECK(s.residual > 1e-15);
    CHECK(s.values.size() == g.arguments.size() + 1);
  }

  TEST_CASE("invalid solver parameters") {
    const auto g = oracle::star({0.5}, {});
    CHECK(code_of([&] { solve_equilibrium(g, {0.0, 1e-6, 10}); }) == errc::kInvalidParams);
    CHECK(code_of([&] { solve_equilibrium(g, {0.5, 0.0, 10}); }) == errc::kInvalidParams);
    CHECK(code_of([&] { solve_equilibrium(g, {0.5, 1e-6, 0}); }) == errc::kInvalidParams);
  }

  TEST_CASE("energy sums signed in-neighbour strengths") {
    const auto g = oracle::star({0.8, 0.4}, {0.5});
    const auto s = solve_equilibrium(g);
    CHECK(energy(g, kClaimId, s) == doctest::Approx(0.7));
    CHECK(energy(g, NodeId("s1"), s) == 0.0);
    CHECK(code_of([&] { energy(g, NodeId("none"), s); }) == errc::kUnknownNode);
  }
}
