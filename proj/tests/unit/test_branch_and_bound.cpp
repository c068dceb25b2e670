#include <doctest.h>

#include <sstream>

#include "milp_support.hpp"
#include "miret/branch_and_bound.hpp"
#include "miret/errors.hpp"
#include "oracle/enumeration.hpp"

using namespace miret;
using namespace miret::milp;

TEST_CASE("relative gap") {
  CHECK(relative_gap(10.0, 9.0) == doctest::Approx(10.0));
  CHECK(relative_gap(10.0, 11.0) == 0.0);
  CHECK(relative_gap(0.0, -1.0, 1e-10) == doctest::Approx(100.0 / 1e-10));
  CHECK(std::isinf(relative_gap(std::numeric_limits<double>::infinity(), 0.0)));
}

TEST_CASE("knapsack optimum") {
  // max 10a + 13b + 7c + 8d  s.t. 3a + 4b + 2c + 3d <= 7  -> b + d (21) or a + b (23)
  Model m;
  const double v[] = {10, 13, 7, 8};
  const double w[] = {3, 4, 2, 3};
  std::vector<Term> cap;
  for (int j = 0; j < 4; ++j) {
    m.add_variable("k" + std::to_string(j), 0.0, 1.0, VarType::kBinary, -v[j]);
    cap.push_back({static_cast<std::size_t>(j), w[j]});
  }
  m.add_constraint("cap", "", cap, Sense::kLessEqual, 7.0);
  const auto r = solve(m, {});
  CHECK(r.status == SolveStatus::kOptimal);
  CHECK(r.incumbent == doctest::Approx(-23.0));
  CHECK(r.gap == 0.0);
  CHECK(r.solution[0] == 1.0);
  CHECK(r.solution[1] == 1.0);
  CHECK_FALSE(r.log.empty());
}

TEST_CASE("random MILPs agree with exhaustive enumeration") {
  int solved = 0, infeasible = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    testsupport::RandomMilpSpec spec{4 + seed % 7, seed % 4, 3 + seed % 5, 0.6, seed % 4 == 1};
    const Model m = testsupport::random_milp(spec, 1000 + seed);
    const auto ref = oracle::enumerate_milp(m);
    const auto r = solve(m, {});
    if (ref.feasible) {
      ++solved;
      REQUIRE(r.status == SolveStatus::kOptimal);
      CHECK(r.incumbent == doctest::Approx(ref.objective).epsilon(1e-9));
      CHECK(check_solution(m, r.solution).empty());
    } else {
      ++infeasible;
      CHECK(r.status == SolveStatus::kInfeasible);
      CHECK_FALSE(r.has_solution());
    }
  }
  CHECK(solved > 20);
  CHECK(infeasible > 0);
}

TEST_CASE("branch priorities do not change the optimum") {
  Model m = testsupport::random_milp({10, 2, 6, 0.6, false}, 77);
  const auto base = solve(m, {});
  // Rebuild with descending priorities on the binaries.
  Model q;
  for (std::size_t j = 0; j < m.num_variables(); ++j) {
    const auto& v = m.variable(j);
    q.add_variable(v.name, v.lower, v.upper, v.type, v.objective, static_cast<int>(j));
  }
  for (const auto& r : m.constraints()) q.add_constraint(r.name, r.tag, r.terms, r.sense, r.rhs);
  q.add_objective_constant(m.objective_constant());
  const auto pri = solve(q, {});
  REQUIRE(base.status == pri.status);
  if (base.has_solution()) CHECK(base.incumbent == doctest::Approx(pri.incumbent));
}

TEST_CASE("node limit stops the search with an honest status") {
  const Model m = testsupport::random_milp({18, 3, 10, 0.5, false}, 4242);
  SolverConfig cfg;
  cfg.node_limit = 1;
  const auto r = solve(m, cfg);
  CHECK((r.status == SolveStatus::kFeasibleTimeout || r.status == SolveStatus::kNoSolutionTimeout ||
         r.status == SolveStatus::kOptimal || r.status == SolveStatus::kInfeasible));
  if (r.status == SolveStatus::kFeasibleTimeout) {
    CHECK(r.bound <= r.incumbent);
    CHECK(r.gap >= 0.0);
  }
  if (r.status == SolveStatus::kNoSolutionTimeout) CHECK(std::isinf(r.gap));
}

TEST_CASE("invalid time limit is rejected") {
  Model m;
  m.add_variable("x", 0.0, 1.0, VarType::kBinary, 1.0);
  SolverConfig cfg;
  cfg.time_limit = 0.0;
  CHECK_THROWS_AS(solve(m, cfg), InputError);
}

TEST_CASE("solve log csv") {
  std::vector<LogRecord> log{{0.5, 10, 3.0, 1.0, 66.6}};
  std::ostringstream out;
  write_log_csv(log, out);
  CHECK(out.str() == "seconds,nodes,incumbent,bound,gap\n0.5,10,3,1,66.6\n");
  CHECK(to_string(SolveStatus::kNoSolutionTimeout) == "no-solution-timeout");
}
