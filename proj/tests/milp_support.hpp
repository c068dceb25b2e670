#pragma once

// Random LP / MILP generators. Rows are built around a random point so most
// instances are feasible; a few senses are flipped so some are not.

#include <cmath>
#include <random>
#include <string>

#include "miret/milp.hpp"

namespace testsupport {

struct RandomMilpSpec {
  std::size_t binaries = 6;
  std::size_t continuous = 3;
  std::size_t rows = 5;
  double density = 0.6;
  bool flip_some = false;
};

inline miret::milp::Model random_milp(const RandomMilpSpec& spec, std::uint64_t seed) {
  using namespace miret::milp;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> coef(-6, 6);
  Model m;
  std::vector<double> point;
  for (std::size_t j = 0; j < spec.binaries; ++j) {
    m.add_variable("y" + std::to_string(j), 0.0, 1.0, VarType::kBinary, coef(rng));
    point.push_back(u(rng) < 0.5 ? 0.0 : 1.0);
  }
  for (std::size_t j = 0; j < spec.continuous; ++j) {
    const double lo = -std::floor(3.0 * u(rng));
    const double hi = lo + 1.0 + std::floor(4.0 * u(rng));
    m.add_variable("x" + std::to_string(j), lo, hi, VarType::kContinuous, coef(rng) * 0.5);
    point.push_back(lo + (hi - lo) * u(rng));
  }
  const std::size_t n = point.size();
  for (std::size_t r = 0; r < spec.rows; ++r) {
    std::vector<Term> terms;
    double act = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (u(rng) > spec.density) continue;
      const double c = coef(rng);
      if (c == 0.0) continue;
      terms.push_back({j, c});
      act += c * point[j];
    }
    if (terms.empty()) continue;
    const double kind = u(rng);
    Sense s = kind < 0.45 ? Sense::kLessEqual : kind < 0.9 ? Sense::kGreaterEqual : Sense::kEqual;
    double rhs = s == Sense::kLessEqual ? std::ceil(act) : s == Sense::kGreaterEqual ? std::floor(act) : act;
    if (spec.flip_some && u(rng) < 0.3 && s != Sense::kEqual) {
      s = s == Sense::kLessEqual ? Sense::kGreaterEqual : Sense::kLessEqual;
    }
    m.add_constraint("r" + std::to_string(r), "random", std::move(terms), s, rhs);
  }
  m.add_objective_constant(1.5);
  return m;
}

}  // namespace testsupport
