#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "gridramp/simplex.hpp"
#include "testsupport.hpp"

using namespace gridramp;

TEST_CASE("single variable above a floor") {
  MILPModel m;
  const int x = m.add_variable("x", VarKind::continuous, 0.0, 10.0);
  m.add_constraint({{x, 1.0}}, RowSense::ge, 3.0, "floor");
  m.set_objective(ObjSense::minimize, {{x, 1.0}});
  const LPSolution r = solve_lp(m);
  REQUIRE(r.status == LPStatus::optimal);
  CHECK(r.objective == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(r.values[0] == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("contradictory floors are infeasible") {
  MILPModel m;
  const int x = m.add_variable("x", VarKind::continuous, 0.0, 10.0);
  m.add_constraint({{x, 1.0}}, RowSense::ge, 5.0, "hi");
  m.add_constraint({{x, 1.0}}, RowSense::le, 3.0, "lo");
  m.set_objective(ObjSense::minimize, {{x, 1.0}});
  CHECK(solve_lp(m).status == LPStatus::infeasible);
}

TEST_CASE("shared budget, individual caps") {
  // min -x - y, x + y <= 4, both in [0, 3]: optimum -4 on the budget face
  MILPModel m;
  const int x = m.add_variable("x", VarKind::continuous, 0.0, 3.0);
  const int y = m.add_variable("y", VarKind::continuous, 0.0, 3.0);
  m.add_constraint({{x, 1.0}, {y, 1.0}}, RowSense::le, 4.0, "budget");
  m.set_objective(ObjSense::minimize, {{x, -1.0}, {y, -1.0}});
  const LPSolution r = solve_lp(m);
  REQUIRE(r.status == LPStatus::optimal);
  CHECK(r.objective == doctest::Approx(-4.0).epsilon(1e-9));
  CHECK(r.values[0] + r.values[1] == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("missing cap is unbounded") {
  MILPModel m;
  const int x = m.add_variable("x", VarKind::continuous, 0.0, kInfinity);
  m.add_constraint({{x, 1.0}}, RowSense::ge, 1.0, "floor");
  m.set_objective(ObjSense::maximize, {{x, 1.0}});
  CHECK(solve_lp(m).status == LPStatus::unbounded);
}

TEST_CASE("free variable settles on its binding row") {
  MILPModel m;
  const int x = m.add_variable("x", VarKind::continuous, -kInfinity, kInfinity);
  m.add_constraint({{x, 1.0}}, RowSense::ge, -5.0, "floor");
  m.set_objective(ObjSense::minimize, {{x, 1.0}});
  const LPSolution r = solve_lp(m);
  REQUIRE(r.status == LPStatus::optimal);
  CHECK(r.objective == doctest::Approx(-5.0).epsilon(1e-9));
}

TEST_CASE("singleton equality pins the variable") {
  MILPModel m;
  const int x = m.add_variable("x", VarKind::continuous, 0.0, 10.0);
  const int y = m.add_variable("y", VarKind::continuous, 0.0, 10.0);
  m.add_constraint({{x, 2.0}}, RowSense::eq, 6.0, "pin");
  m.add_constraint({{x, 1.0}, {y, 1.0}}, RowSense::le, 5.0, "cap");
  m.set_objective(ObjSense::maximize, {{x, 1.0}, {y, 3.0}});
  const LPSolution r = solve_lp(m);
  REQUIRE(r.status == LPStatus::optimal);
  CHECK(r.values[0] == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(r.values[1] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(r.objective == doctest::Approx(9.0).epsilon(1e-9));
}

TEST_CASE("objective constant is carried through") {
  MILPModel m;
  const int x = m.add_variable("x", VarKind::continuous, 1.0, 4.0);
  m.set_objective(ObjSense::minimize, {{x, 2.0}}, 7.0);
  const LPSolution r = solve_lp(m);
  REQUIRE(r.status == LPStatus::optimal);
  CHECK(r.objective == doctest::Approx(9.0).epsilon(1e-9));
}

TEST_CASE("engine re-solves under restricted bounds") {
  MILPModel m;
  const int x = m.add_variable("x", VarKind::continuous, 0.0, 3.0);
  const int y = m.add_variable("y", VarKind::continuous, 0.0, 3.0);
  m.add_constraint({{x, 1.0}, {y, 1.0}}, RowSense::le, 4.0, "budget");
  m.set_objective(ObjSense::minimize, {{x, -1.0}, {y, -2.0}});

  SimplexEngine engine;
  engine.load(m);
  auto r = engine.solve();
  REQUIRE(r.status == LPStatus::optimal);
  CHECK(r.objective == doctest::Approx(-7.0).epsilon(1e-9)); // x=1, y=3

  REQUIRE(engine.restrict_bounds(y, 0.0, 1.0));
  r = engine.solve_warm();
  REQUIRE(r.status == LPStatus::optimal);
  CHECK(r.objective == doctest::Approx(-5.0).epsilon(1e-9)); // x=3, y=1

  engine.reset_bounds();
  r = engine.solve_warm();
  REQUIRE(r.status == LPStatus::optimal);
  CHECK(r.objective == doctest::Approx(-7.0).epsilon(1e-9));

  CHECK_FALSE(engine.restrict_bounds(x, 5.0, 9.0)); // empty against [0, 3]
}

TEST_CASE("basis snapshots round-trip") {
  MILPModel m;
  const int x = m.add_variable("x", VarKind::continuous, 0.0, 3.0);
  const int y = m.add_variable("y", VarKind::continuous, 0.0, 3.0);
  m.add_constraint({{x, 1.0}, {y, 1.0}}, RowSense::le, 4.0, "budget");
  m.set_objective(ObjSense::minimize, {{x, -1.0}, {y, -2.0}});

  SimplexEngine engine;
  engine.load(m);
  REQUIRE(engine.solve().status == LPStatus::optimal);
  const auto snapshot = engine.save_basis();

  REQUIRE(engine.restrict_bounds(y, 0.0, 0.5));
  REQUIRE(engine.solve_warm().status == LPStatus::optimal);

  engine.reset_bounds();
  REQUIRE(engine.load_basis(snapshot));
  const auto r = engine.solve_warm();
  REQUIRE(r.status == LPStatus::optimal);
  CHECK(r.objective == doctest::Approx(-7.0).epsilon(1e-9));
}

TEST_CASE("agrees with the dense reference on random problems") {
  std::mt19937 rng(20240817);
  int optimal_seen = 0, infeasible_seen = 0, unbounded_seen = 0;
  for (int trial = 0; trial < 600; ++trial) {
    const MILPModel m = testsupport::random_small_lp(rng, 10);
    const testsupport::DenseResult ref = testsupport::dense_solve(m);
    const LPSolution got = solve_lp(m);
    INFO("trial ", trial);
    REQUIRE(ref.status != LPStatus::failure);
    REQUIRE(got.status == ref.status);
    if (ref.status == LPStatus::optimal) {
      ++optimal_seen;
      CHECK(std::fabs(got.objective - ref.objective) <=
            1e-9 * std::max(1.0, std::fabs(ref.objective)));
    } else if (ref.status == LPStatus::infeasible) {
      ++infeasible_seen;
    } else {
      ++unbounded_seen;
    }
  }
  // the generator must actually exercise all three outcomes
  CHECK(optimal_seen > 100);
  CHECK(infeasible_seen > 20);
  CHECK(unbounded_seen > 5);
}
