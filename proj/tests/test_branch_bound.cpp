#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "gridramp/branch_bound.hpp"
#include "testsupport.hpp"

using namespace gridramp;

namespace {

// Exhaustive reference: try every binary assignment, solve the continuous
// remainder with the dense reference solver, keep the best.
struct BruteResult {
  bool feasible = false;
  bool unbounded = false;
  double objective = 0.0;
};

BruteResult brute_force(const MILPModel& model) {
  std::vector<int> bins;
  for (int j = 0; j < model.num_variables(); ++j) {
    if (model.variables()[static_cast<std::size_t>(j)].kind == VarKind::binary) bins.push_back(j);
  }
  BruteResult best;
  const double sgn = model.objective().sense == ObjSense::maximize ? -1.0 : 1.0;
  MILPModel scratch = model;
  for (long mask = 0; mask < (1L << bins.size()); ++mask) {
    bool ok = true;
    for (std::size_t k = 0; k < bins.size(); ++k) {
      const double v = (mask >> k) & 1 ? 1.0 : 0.0;
      const auto& var = model.variables()[static_cast<std::size_t>(bins[k])];
      if (v < var.lower || v > var.upper) {
        ok = false;
        break;
      }
      scratch.set_bounds(bins[k], v, v);
    }
    if (!ok) continue;
    const testsupport::DenseResult lp = testsupport::dense_solve(scratch);
    if (lp.status == LPStatus::unbounded) best.unbounded = true;
    if (lp.status != LPStatus::optimal) continue;
    if (!best.feasible || sgn * lp.objective < sgn * best.objective) {
      best.feasible = true;
      best.objective = lp.objective;
    }
  }
  // restore is unnecessary: scratch is local
  return best;
}

MILPModel random_mip(std::mt19937& rng) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  MILPModel m;
  const int n = pick(2, 8);
  for (int j = 0; j < n; ++j) {
    if (pick(0, 2) != 0) {
      m.add_variable("b" + std::to_string(j), VarKind::binary, 0.0, 1.0);
    } else {
      m.add_variable("x" + std::to_string(j), VarKind::continuous, 0.0, pick(1, 6));
    }
  }
  const int rows = pick(1, n);
  for (int i = 0; i < rows; ++i) {
    std::vector<std::pair<int, double>> terms;
    for (int j = 0; j < n; ++j) {
      if (pick(0, 9) < 6) {
        const int c = pick(-3, 3);
        if (c != 0) terms.emplace_back(j, static_cast<double>(c));
      }
    }
    if (terms.empty()) terms.emplace_back(pick(0, n - 1), 1.0);
    const int s = pick(0, 2);
    m.add_constraint(std::move(terms),
                     s == 0   ? RowSense::le
                     : s == 1 ? RowSense::ge
                              : RowSense::eq,
                     pick(-4, 7), "c" + std::to_string(i));
  }
  std::vector<std::pair<int, double>> obj;
  for (int j = 0; j < n; ++j) {
    const int c = pick(-5, 5);
    if (c != 0) obj.emplace_back(j, static_cast<double>(c));
  }
  m.set_objective(pick(0, 1) == 0 ? ObjSense::minimize : ObjSense::maximize, std::move(obj),
                  pick(-3, 3));
  return m;
}

} // namespace

TEST_CASE("single binary relaxes to its cheaper endpoint") {
  MILPModel m;
  const int x = m.add_variable("x", VarKind::binary, 0.0, 1.0);
  m.set_objective(ObjSense::minimize, {{x, 1.0}});
  const MILPSolution r = solve_milp(m);
  REQUIRE(r.status == MILPStatus::optimal);
  CHECK(r.objective == doctest::Approx(0.0));
  CHECK(r.values[0] == doctest::Approx(0.0));
}

TEST_CASE("small knapsack") {
  MILPModel m;
  const int x = m.add_variable("x", VarKind::binary, 0.0, 1.0);
  const int y = m.add_variable("y", VarKind::binary, 0.0, 1.0);
  const int z = m.add_variable("z", VarKind::binary, 0.0, 1.0);
  m.add_constraint({{x, 2.0}, {y, 3.0}, {z, 4.0}}, RowSense::le, 5.0, "weight");
  m.set_objective(ObjSense::maximize, {{x, 5.0}, {y, 4.0}, {z, 3.0}});
  const MILPSolution r = solve_milp(m);
  REQUIRE(r.status == MILPStatus::optimal);
  CHECK(r.objective == doctest::Approx(9.0));
  CHECK(r.values[0] == doctest::Approx(1.0));
  CHECK(r.values[1] == doctest::Approx(1.0));
  CHECK(r.values[2] == doctest::Approx(0.0));
  CHECK(r.gap <= 1e-6);
  CHECK(r.root_lp_objective >= r.objective - 1e-9); // relaxation bounds from above
}

TEST_CASE("conflicting parity rows are infeasible") {
  MILPModel m;
  const int x = m.add_variable("x", VarKind::binary, 0.0, 1.0);
  const int y = m.add_variable("y", VarKind::binary, 0.0, 1.0);
  m.add_constraint({{x, 1.0}, {y, 1.0}}, RowSense::ge, 3.0, "impossible");
  m.set_objective(ObjSense::minimize, {{x, 1.0}, {y, 1.0}});
  CHECK(solve_milp(m).status == MILPStatus::infeasible);
}

TEST_CASE("unbounded relaxation is reported") {
  MILPModel m;
  const int x = m.add_variable("x", VarKind::continuous, 0.0, kInfinity);
  const int b = m.add_variable("b", VarKind::binary, 0.0, 1.0);
  m.add_constraint({{x, 1.0}, {b, 1.0}}, RowSense::ge, 1.0, "floor");
  m.set_objective(ObjSense::maximize, {{x, 1.0}});
  CHECK(solve_milp(m).status == MILPStatus::unbounded);
}

TEST_CASE("node limit truncates the search") {
  // Root relaxation packs 1.5 identical items, so one node cannot finish.
  MILPModel m;
  std::vector<std::pair<int, double>> row, obj;
  for (int j = 0; j < 3; ++j) {
    const int b = m.add_variable("b" + std::to_string(j), VarKind::binary, 0.0, 1.0);
    row.emplace_back(b, 4.0);
    obj.emplace_back(b, 5.0);
  }
  m.add_constraint(std::move(row), RowSense::le, 6.0, "budget");
  m.set_objective(ObjSense::maximize, std::move(obj));

  SolveOptions opts;
  opts.node_limit = 1;
  const MILPSolution r = solve_milp(m, opts);
  CHECK((r.status == MILPStatus::feasible || r.status == MILPStatus::limit_reached));
  CHECK(r.node_count <= 2); // the in-flight node may conclude before stopping

  const MILPSolution full = solve_milp(m);
  REQUIRE(full.status == MILPStatus::optimal);
  CHECK(full.objective == doctest::Approx(5.0));
  if (r.has_incumbent()) CHECK(r.objective <= full.objective + 1e-9);
}

TEST_CASE("bound history tightens monotonically toward the incumbent") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const MILPModel m = random_mip(rng);
    const MILPSolution r = solve_milp(m);
    if (r.status != MILPStatus::optimal) continue;
    const double sgn = m.objective().sense == ObjSense::maximize ? -1.0 : 1.0;
    for (std::size_t k = 1; k < r.bound_history.size(); ++k) {
      // minimize: bound rises; maximize: bound falls
      CHECK(sgn * r.bound_history[k] >= sgn * r.bound_history[k - 1] - 1e-9);
    }
    if (!r.bound_history.empty()) {
      CHECK(sgn * r.bound_history.back() <= sgn * r.objective + 1e-9);
    }
    CHECK(sgn * r.root_lp_objective <= sgn * r.objective + 1e-9);
    CHECK(r.gap <= 1e-6);
  }
}

TEST_CASE("matches exhaustive enumeration on random mixed problems") {
  std::mt19937 rng(20240818);
  int feasible_seen = 0, infeasible_seen = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const MILPModel m = random_mip(rng);
    const BruteResult ref = brute_force(m);
    const MILPSolution got = solve_milp(m);
    INFO("trial ", trial);
    if (ref.unbounded) {
      // some assignment is unbounded; the relaxation must be too
      CHECK(got.status == MILPStatus::unbounded);
      continue;
    }
    if (got.status == MILPStatus::unbounded) {
      // relaxation unbounded yet every assignment finite is possible only
      // when no assignment was feasible at all
      CHECK_FALSE(ref.feasible);
      continue;
    }
    if (ref.feasible) {
      ++feasible_seen;
      REQUIRE(got.status == MILPStatus::optimal);
      CHECK(testsupport::close_rel(got.objective, ref.objective, 1e-7));
    } else {
      ++infeasible_seen;
      CHECK(got.status == MILPStatus::infeasible);
    }
  }
  CHECK(feasible_seen > 40);
  CHECK(infeasible_seen > 10);
}

TEST_CASE("repeat solves at one worker are identical") {
  std::mt19937 rng(99);
  const MILPModel m = random_mip(rng);
  const MILPSolution a = solve_milp(m);
  const MILPSolution b = solve_milp(m);
  CHECK(a.status == b.status);
  CHECK(a.node_count == b.node_count);
  CHECK(a.bound_history == b.bound_history);
  if (a.has_incumbent()) {
    CHECK(a.objective == b.objective);
    CHECK(a.values == b.values);
  }
}

TEST_CASE("multi-worker solves agree with single-worker objectives") {
  std::mt19937 rng(123);
  for (int trial = 0; trial < 25; ++trial) {
    const MILPModel m = random_mip(rng);
    const MILPSolution one = solve_milp(m);
    SolveOptions opts;
    opts.workers = 4;
    const MILPSolution four = solve_milp(m, opts);
    INFO("trial ", trial);
    CHECK(one.status == four.status);
    if (one.has_incumbent() && four.has_incumbent()) {
      CHECK(testsupport::close_rel(one.objective, four.objective, 1e-9));
    }
  }
}

TEST_CASE("option validation") {
  MILPModel m;
  m.add_variable("x", VarKind::binary, 0.0, 1.0);
  m.set_objective(ObjSense::minimize, {});
  SolveOptions opts;
  opts.workers = 0;
  CHECK_THROWS_AS(solve_milp(m, opts), std::invalid_argument);
  opts = {};
  opts.gap_tol = 0.0;
  CHECK_THROWS_AS(solve_milp(m, opts), std::invalid_argument);
}

TEST_CASE("backend registry") {
  REQUIRE(find_backend("bnb") != nullptr);
  CHECK(find_backend("bnb") == &builtin_backend());
  CHECK(find_backend("") == &builtin_backend());
  CHECK(find_backend("nope") == nullptr);
  CHECK(backend_names() == std::vector<std::string>{"bnb"});

  MILPModel m;
  const int x = m.add_variable("x", VarKind::binary, 0.0, 1.0);
  m.set_objective(ObjSense::maximize, {{x, 2.0}});
  const MILPSolution r = builtin_backend().solve(m, {});
  REQUIRE(r.status == MILPStatus::optimal);
  CHECK(r.objective == doctest::Approx(2.0));
}
