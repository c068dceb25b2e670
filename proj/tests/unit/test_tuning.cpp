#include <doctest.h>

#include <sstream>

#include "miret/tuning.hpp"
#include "support.hpp"

using namespace miret;

TEST_CASE("percentile parsing and labels") {
  CHECK(Percentile::parse("zero").zero);
  CHECK(Percentile::parse("0").zero);
  CHECK(Percentile::parse("50").h == 50.0);
  CHECK(Percentile::parse("100/3").h == doctest::Approx(100.0 / 3.0));
  CHECK(Percentile::parse("100/3").label() == "33.3");
  CHECK(Percentile::parse("25").label() == "25");
  CHECK(Percentile::zero_threshold().label() == "zero");
  CHECK_THROWS_AS(Percentile::parse("abc"), InputError);
  CHECK_THROWS_AS(Percentile::parse("150"), InputError);
  CHECK_THROWS_AS(Percentile::parse("1/0"), InputError);
  CHECK_THROWS_AS(Percentile::parse("5x"), InputError);
}

TEST_CASE("nearest-rank percentile of the positive frequencies") {
  LevelFrequencyMatrix f;
  f.values = Eigen::MatrixXd(4, 2);
  // level 0 positives sorted: 0.1 0.2 0.3 ; level 1 has a single positive entry
  f.values << 0.3, 0.0, 0.1, 0.0, 0.0, 0.5, 0.2, 0.0;
  const auto g50 = gamma_from_percentile(f, Percentile::of(50.0));
  CHECK(g50[0] == 0.2);  // ceil(1.5) = 2
  CHECK(g50[1] == 0.5);
  const auto g33 = gamma_from_percentile(f, Percentile::of(100.0 / 3.0));
  CHECK(g33[0] == 0.1);  // rank exactly 1
  CHECK(gamma_from_percentile(f, Percentile::of(100.0))[0] == 0.3);
  CHECK(gamma_from_percentile(f, Percentile::of(25.0))[0] == 0.1);
  CHECK(gamma_from_percentile(f, Percentile::zero_threshold()) == std::vector<double>{0.0, 0.0});
  f.values.col(1).setZero();
  CHECK(gamma_from_percentile(f, Percentile::of(50.0))[1] == 0.0);
}

TEST_CASE("cell selection tie-breaks") {
  const auto z = Percentile::zero_threshold();
  const auto h25 = Percentile::of(25.0);
  const auto h50 = Percentile::of(50.0);
  std::vector<CellSummary> cells{{0.5, z, 90.0, 3.0, 0}, {0.2, z, 95.0, 4.0, 0}, {0.4, h25, 95.0, 2.0, 0}};
  CHECK(select_cell(cells) == 2);  // equal fidelity, sparser
  cells.push_back({0.3, h25, 95.0, 2.0, 0});
  CHECK(select_cell(cells) == 3);  // then smaller alpha
  cells.push_back({0.3, h50, 95.0, 2.0, 0});
  CHECK(select_cell(cells) == 4);  // then larger h
  cells.push_back({0.3, z, 95.0, 2.0, 0});
  CHECK(select_cell(cells) == 4);  // the sentinel ranks lowest
  CHECK_THROWS_AS(select_cell({}), InputError);
}

TEST_CASE("grid validation") {
  TuneGrid g;
  CHECK(g.size() == 20);
  g.validate();
  g.k = 1;
  CHECK_THROWS_AS(g.validate(), InputError);
  g = {};
  g.alphas.clear();
  CHECK_THROWS_AS(g.validate(), InputError);
}

TEST_CASE("small cross-validation run is deterministic") {
  const auto d = testsupport::random_dataset(16, 2, 31, 0.1);
  TuneGrid grid;
  grid.alphas = {0.2, 0.6};
  grid.percentiles = {Percentile::zero_threshold(), Percentile::of(50.0)};
  grid.k = 2;
  TuneConfig cfg;
  cfg.forest = {2, 4, 5, 0};
  cfg.base.formulation = Formulation::kStrengthened;
  cfg.solver.time_limit = 5.0;
  cfg.seed = 3;
  const auto a = cross_validate(d, grid, cfg);
  CHECK(a.cells.size() == 4);
  CHECK(a.folds.size() == 8);
  CHECK(a.selected < 4);
  for (const auto& f : a.folds) {
    CHECK(f.fidelity >= 0.0);
    CHECK(f.fidelity <= 100.0);
  }
  std::ostringstream csv;
  write_tune_csv(a, csv);
  CHECK(csv.str().rfind("cell,alpha,h,fold,fidelity,sparsity,gap,seconds,status,flagged\n0,0.2,zero,0,", 0) == 0);
  const auto b = cross_validate(d, grid, cfg);
  for (std::size_t k = 0; k < a.folds.size(); ++k) {
    if (a.folds[k].status == "optimal" && b.folds[k].status == "optimal") {
      CHECK(a.folds[k].fidelity == b.folds[k].fidelity);
    }
  }
}
