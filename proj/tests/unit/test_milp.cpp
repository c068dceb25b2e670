#include <doctest.h>

#include <sstream>

#include "miret/errors.hpp"
#include "miret/milp.hpp"

using namespace miret;
using namespace miret::milp;

namespace {

Model two_var_model() {
  Model m;
  m.add_variable("x", 0.0, 4.0, VarType::kContinuous, 1.0);
  m.add_variable("y", 0.0, 1.0, VarType::kBinary, -2.0, 1);
  m.add_constraint("c1", "demo", {{0, 1.0}, {1, 1.0}}, Sense::kGreaterEqual, 1.0);
  m.add_constraint("c2", "demo", {{0, 1.0}, {1, -3.0}}, Sense::kLessEqual, 2.0);
  m.add_constraint("c3", "other", {{0, 2.0}}, Sense::kEqual, 1.0);
  m.add_objective_constant(0.25);
  return m;
}

}  // namespace

TEST_CASE("model bookkeeping") {
  const Model m = two_var_model();
  CHECK(m.num_variables() == 2);
  CHECK(m.num_constraints() == 3);
  CHECK(m.num_binaries() == 1);
  CHECK(m.count_tag("demo") == 2);
  CHECK(m.index_of("y") == 1);
  CHECK_FALSE(m.find("z").has_value());
  CHECK_THROWS_AS(m.index_of("z"), InputError);
  const double x[] = {0.5, 1.0};
  CHECK(m.objective_value(x) == doctest::Approx(0.25 + 0.5 - 2.0));
  m.validate();
}

TEST_CASE("model construction errors") {
  Model m;
  m.add_variable("x", 0.0, 1.0, VarType::kContinuous);
  CHECK_THROWS_AS(m.add_variable("x", 0.0, 1.0, VarType::kContinuous), InputError);
  CHECK_THROWS_AS(m.add_variable("w", 2.0, 1.0, VarType::kContinuous), InputError);
  CHECK_THROWS_AS(m.add_variable("b", 0.0, 2.0, VarType::kBinary), InputError);
  CHECK_THROWS_AS(m.add_constraint("r", "t", {{5, 1.0}}, Sense::kEqual, 0.0), InputError);
  m.fix(0, 0.5);
  CHECK(m.variable(0).is_fixed());
}

TEST_CASE("check_solution lists row, bound and integrality violations") {
  const Model m = two_var_model();
  const double good[] = {0.5, 1.0};
  CHECK(check_solution(m, good).empty());
  const double bad[] = {5.0, 0.5};
  const auto v = check_solution(m, bad);
  bool row = false, bound = false, integ = false;
  for (const auto& e : v) {
    row = row || e.kind == Violation::Kind::kRow;
    bound = bound || e.kind == Violation::Kind::kBound;
    integ = integ || e.kind == Violation::Kind::kIntegrality;
  }
  CHECK(row);
  CHECK(bound);
  CHECK(integ);
  const double near[] = {0.5 + 5e-7, 1.0};
  CHECK(check_solution(m, near, 1e-6).empty());
  CHECK_FALSE(check_solution(m, near, 1e-9).empty());
}

TEST_CASE("LP export lists every section with stable output") {
  const Model m = two_var_model();
  std::ostringstream a, b;
  write_lp(m, a, "demo");
  write_lp(m, b, "demo");
  const std::string s = a.str();
  CHECK(s == b.str());
  CHECK(s.find("Minimize") != std::string::npos);
  CHECK(s.find("Subject To") != std::string::npos);
  CHECK(s.find(" c2: + 1 x - 3 y <= 2") != std::string::npos);
  CHECK(s.find(" c3: + 2 x = 1") != std::string::npos);
  CHECK(s.find("Bounds") != std::string::npos);
  CHECK(s.find("Binaries\n y\n") != std::string::npos);
  CHECK(s.substr(s.size() - 4) == "End\n");
  CHECK_THROWS_AS(write_lp(Model{}, a), InputError);
}
