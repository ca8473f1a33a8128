#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "gridramp/lp_format.hpp"
#include "gridramp/milp.hpp"

using namespace gridramp;

TEST_CASE("small model renders exactly") {
  MILPModel m;
  const int p = m.add_variable("P[g1][1]", VarKind::continuous, 0.0, 5.0);
  const int on = m.add_variable("on", VarKind::binary, 0.0, 1.0);
  m.add_variable("free_v", VarKind::continuous, -kInfinity, kInfinity);
  m.add_variable("neg", VarKind::continuous, -kInfinity, 2.0);
  m.add_variable("fix", VarKind::continuous, 3.0, 3.0);
  m.add_variable("lb", VarKind::continuous, 1.5, kInfinity);
  m.add_constraint({{p, 1.0}, {on, -5.0}}, RowSense::le, 0.0, "cap[1]");
  m.set_objective(ObjSense::minimize, {{p, 1.5}, {on, 2.0}});

  const std::string expected =
      "Minimize\n"
      " obj: 1.5 P(g1)(1) + 2 on\n"
      "Subject To\n"
      " cap(1): P(g1)(1) - 5 on <= 0\n"
      "Bounds\n"
      " 0 <= P(g1)(1) <= 5\n"
      " free_v free\n"
      " -inf <= neg <= 2\n"
      " fix = 3\n"
      " lb >= 1.5\n"
      "Binary\n"
      " on\n"
      "End\n";
  CHECK(write_lp_format(m) == expected);
}

TEST_CASE("maximize carries its constant and equality rows render") {
  MILPModel m;
  const int x = m.add_variable("x", VarKind::continuous, 0.0, 10.0);
  m.add_constraint({{x, 2.0}}, RowSense::eq, 6.0, "pin");
  m.add_constraint({{x, 1.0}}, RowSense::ge, 1.0, "floor");
  m.set_objective(ObjSense::maximize, {{x, 1.0}}, 4.0);
  const std::string text = write_lp_format(m);
  CHECK(text.find("Maximize\n obj: x + 4\n") != std::string::npos);
  CHECK(text.find(" pin: 2 x = 6\n") != std::string::npos);
  CHECK(text.find(" floor: x >= 1\n") != std::string::npos);
}

TEST_CASE("an empty objective still produces a line") {
  MILPModel m;
  m.add_variable("x", VarKind::continuous, 0.0, 1.0);
  m.set_objective(ObjSense::minimize, {});
  CHECK(write_lp_format(m).find(" obj: 0\n") != std::string::npos);
}

TEST_CASE("awkward names are sanitized or replaced") {
  MILPModel m;
  const int a = m.add_variable("2bad", VarKind::continuous, 0.0, 1.0);
  const int b = m.add_variable("has space", VarKind::continuous, 0.0, 1.0);
  const int c = m.add_variable("dup", VarKind::continuous, 0.0, 1.0);
  const int d = m.add_variable("dup", VarKind::continuous, 0.0, 1.0);
  m.add_constraint({{a, 1.0}, {b, 1.0}, {c, 1.0}, {d, 1.0}}, RowSense::le, 2.0, "odd[row]");
  m.add_constraint({{a, 1.0}}, RowSense::ge, 0.0, "e17"); // e-led reads as a number
  m.set_objective(ObjSense::minimize, {{a, 1.0}});
  const std::string text = write_lp_format(m);
  CHECK(text.find("x0") != std::string::npos);        // digit-led tag replaced
  CHECK(text.find("has_space") != std::string::npos); // space mapped to underscore
  CHECK(text.find("dup") != std::string::npos);
  CHECK(text.find("x3") != std::string::npos); // collision falls back to the id
  CHECK(text.find("odd(row):") != std::string::npos);
  CHECK(text.find("c1:") != std::string::npos);
}

TEST_CASE("rows that cancel still carry a placeholder term") {
  MILPModel m;
  const int x = m.add_variable("x", VarKind::continuous, 0.0, 1.0);
  m.add_constraint({{x, 0.0}}, RowSense::le, 1.0, "zero");
  m.set_objective(ObjSense::minimize, {{x, 1.0}});
  CHECK(write_lp_format(m).find(" zero: 0 x <= 1\n") != std::string::npos);
}

TEST_CASE("long rows wrap below the column limit") {
  MILPModel m;
  std::vector<std::pair<int, double>> row;
  for (int j = 0; j < 30; ++j) {
    row.emplace_back(m.add_variable("var_number_" + std::to_string(j), VarKind::continuous,
                                    0.0, 1.0),
                     1.0 + j);
  }
  m.add_constraint(std::move(row), RowSense::le, 10.0, "wide");
  m.set_objective(ObjSense::minimize, {});
  const std::string text = write_lp_format(m);
  CHECK(text.find("\n     ") != std::string::npos);
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) CHECK(line.size() <= 79);
}

TEST_CASE("file writer round-trips the text") {
  MILPModel m;
  const int x = m.add_variable("x", VarKind::binary, 1.0, 1.0);
  m.set_objective(ObjSense::minimize, {{x, 3.0}});
  const std::string path = "lp_format_test_tmp.lp";
  write_lp_file(m, path);
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == write_lp_format(m));
  // fixed binaries appear both pinned and declared
  CHECK(buf.str().find(" x = 1\n") != std::string::npos);
  CHECK(buf.str().find("Binary\n x\n") != std::string::npos);
  std::remove(path.c_str());
}
