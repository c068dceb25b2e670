#include <doctest.h>

#include "milp_support.hpp"
#include "miret/simplex.hpp"
#include "oracle/dense_lp.hpp"

using namespace miret::milp;

namespace {

oracle::DenseLp to_dense(const Model& m) {
  oracle::DenseLp lp;
  for (const auto& v : m.variables()) {
    lp.c.push_back(v.objective);
    lp.lo.push_back(v.lower);
    lp.hi.push_back(v.upper);
  }
  for (const auto& r : m.constraints()) {
    std::vector<double> row(m.num_variables(), 0.0);
    for (const auto& t : r.terms) row[t.var] += t.coef;
    lp.a.push_back(row);
    lp.sense.push_back(r.sense == Sense::kLessEqual      ? oracle::RowSense::kLe
                       : r.sense == Sense::kGreaterEqual ? oracle::RowSense::kGe
                                                         : oracle::RowSense::kEq);
    lp.rhs.push_back(r.rhs);
  }
  return lp;
}

}  // namespace

TEST_CASE("textbook LP") {
  // max 3x + 5y  s.t. x <= 4, 2y <= 12, 3x + 2y <= 18  -> optimum 36 at (2, 6)
  Model m;
  m.add_variable("x", 0.0, 100.0, VarType::kContinuous, -3.0);
  m.add_variable("y", 0.0, 100.0, VarType::kContinuous, -5.0);
  m.add_constraint("a", "", {{0, 1.0}}, Sense::kLessEqual, 4.0);
  m.add_constraint("b", "", {{1, 2.0}}, Sense::kLessEqual, 12.0);
  m.add_constraint("c", "", {{0, 3.0}, {1, 2.0}}, Sense::kLessEqual, 18.0);
  SimplexSolver lp(m);
  REQUIRE(lp.solve() == LpStatus::kOptimal);
  CHECK(lp.objective() == doctest::Approx(-36.0));
  CHECK(lp.value(0) == doctest::Approx(2.0));
  CHECK(lp.value(1) == doctest::Approx(6.0));
}

TEST_CASE("infeasible and unbounded LPs") {
  Model inf;
  inf.add_variable("x", 0.0, 1.0, VarType::kContinuous, 1.0);
  inf.add_constraint("r", "", {{0, 1.0}}, Sense::kGreaterEqual, 2.0);
  SimplexSolver a(inf);
  CHECK(a.solve() == LpStatus::kInfeasible);

  Model unb;
  const double big = std::numeric_limits<double>::infinity();
  unb.add_variable("x", 0.0, big, VarType::kContinuous, -1.0);
  unb.add_variable("y", 0.0, 1.0, VarType::kContinuous, 0.0);
  unb.add_constraint("r", "", {{0, 1.0}, {1, -1.0}}, Sense::kGreaterEqual, 0.0);
  SimplexSolver b(unb);
  CHECK(b.solve() == LpStatus::kUnbounded);
}

TEST_CASE("random LP relaxations match the dense tableau oracle") {
  int optimal = 0, infeasible = 0;
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    testsupport::RandomMilpSpec spec{0, 4 + seed % 6, 3 + seed % 7, 0.7, seed % 3 == 0};
    const Model m = testsupport::random_milp(spec, seed);
    SimplexSolver lp(m);
    const auto st = lp.solve();
    const auto ref = oracle::solve_dense(to_dense(m));
    if (ref.outcome == oracle::LpOutcome::kOptimal) {
      ++optimal;
      REQUIRE(st == LpStatus::kOptimal);
      CHECK(lp.objective() == doctest::Approx(ref.objective + m.objective_constant()).epsilon(1e-9));
      const auto x = lp.structural_values();
      CHECK(check_solution(m, x, 1e-7).empty());
    } else {
      ++infeasible;
      CHECK(st == LpStatus::kInfeasible);
    }
  }
  CHECK(optimal > 60);
  CHECK(infeasible > 0);
}

TEST_CASE("re-solving after bound changes and from a stored basis") {
  for (std::uint64_t seed = 200; seed < 240; ++seed) {
    const Model m = testsupport::random_milp({8, 3, 6, 0.6, false}, seed);
    SimplexSolver lp(m);
    if (lp.solve() != LpStatus::kOptimal) continue;
    const Basis root = lp.basis();
    // Fix the first two binaries to 1 and compare against a cold solve of the same bounds.
    Model fixed = m;
    fixed.fix(0, 1.0);
    fixed.fix(1, 1.0);
    lp.set_bounds(0, 1.0, 1.0);
    lp.set_bounds(1, 1.0, 1.0);
    const auto warm = lp.solve();
    const auto ref = oracle::solve_dense(to_dense(fixed));
    if (ref.outcome == oracle::LpOutcome::kOptimal) {
      REQUIRE(warm == LpStatus::kOptimal);
      CHECK(lp.objective() == doctest::Approx(ref.objective + m.objective_constant()).epsilon(1e-9));
    } else {
      CHECK(warm == LpStatus::kInfeasible);
    }
    lp.set_bounds(0, 0.0, 1.0);
    lp.set_bounds(1, 0.0, 1.0);
    lp.load_basis(root);
    REQUIRE(lp.solve() == LpStatus::kOptimal);
    const auto cold = oracle::solve_dense(to_dense(m));
    CHECK(lp.objective() == doctest::Approx(cold.objective + m.objective_constant()).epsilon(1e-9));
  }
}

TEST_CASE("expired deadline reports the time limit") {
  const Model m = testsupport::random_milp({0, 30, 30, 0.7, false}, 5);
  SimplexSolver lp(m);
  CHECK(lp.solve(std::chrono::steady_clock::now() - std::chrono::seconds(1)) == LpStatus::kTimeLimit);
}
