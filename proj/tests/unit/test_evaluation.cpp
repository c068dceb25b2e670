#include <doctest.h>

#include <sstream>

#include "miret/evaluation.hpp"
#include "support.hpp"

using namespace miret;

namespace {

SurrogateTree stump(double threshold) {
  SurrogateTree t;
  t.depth = 1;
  t.num_features = 2;
  t.a = {{1.0, 0.0}};
  t.b = {-threshold};
  return t;
}

}  // namespace

TEST_CASE("agreement identities on small vectors") {
  const std::vector<Label> r{1, -1, 1, 1};
  const std::vector<Label> q{1, 1, -1, 1};
  CHECK(agreement_counting(r, q) == 50.0);
  CHECK(agreement_algebraic(r, q) == 50.0);
  CHECK(agreement_algebraic(r, r) == 100.0);
  const std::vector<Label> flip{-1, 1, -1, -1};
  CHECK(agreement_algebraic(r, flip) == 0.0);
  CHECK_THROWS_AS(agreement_algebraic(r, std::vector<Label>{1}), InputError);
  CHECK_THROWS_AS(agreement_counting(std::vector<Label>{}, std::vector<Label>{}), InputError);
}

TEST_CASE("fidelity and accuracy of a stump against a one-tree forest") {
  auto d = make_dataset({0.1, 0.0, 0.3, 0.0, 0.7, 0.0, 0.9, 0.0}, {-1, -1, 1, 1}, {"a", "b"});
  d.features = {0.1, 0.0, 0.3, 0.0, 0.7, 0.0, 0.9, 0.0};
  Forest f;
  f.depth = 1;
  f.num_features = 2;
  f.trees.push_back(testsupport::make_tree(1, {{0, 0, 0.5}}));
  f.weights = {1.0};
  // depth-1 surrogate: leaf 1 predicts -1, leaf 2 predicts +1
  CHECK(fidelity(stump(0.5), f, d) == 100.0);
  CHECK(fidelity(stump(0.2), f, d) == 75.0);
  CHECK(accuracy(f, d) == 100.0);
  CHECK(accuracy(stump(0.8), d) == 75.0);
  const auto lf = miret_level_frequency(stump(0.5));
  CHECK(lf(0, 0) == 1.0);
  CHECK(lf(1, 0) == 0.0);
}

TEST_CASE("proximity agreement partitions pairs") {
  auto d = make_dataset({0.1, 0.0, 0.2, 0.0, 0.8, 0.0}, {-1, -1, 1}, {"a", "b"});
  d.features = {0.1, 0.0, 0.2, 0.0, 0.8, 0.0};
  Forest f;
  f.depth = 1;
  f.num_features = 2;
  f.trees.push_back(testsupport::make_tree(1, {{0, 0, 0.5}}));
  f.weights = {1.0};
  // forest: (0,1) together, (0,2) and (1,2) apart
  const auto same = proximity_agreement(stump(0.5), f, d);
  CHECK(same.rf_together == 1);
  CHECK(same.rf_apart == 2);
  CHECK(*same.u == 100.0);
  CHECK(*same.u_bar == 100.0);
  const auto shifted = proximity_agreement(stump(0.15), f, d);
  CHECK(*shifted.u == 0.0);
  CHECK(*shifted.u_bar == 50.0);

  Forest apart = f;
  apart.trees[0] = testsupport::make_tree(1, {{0, 0, 0.05}});
  const auto none = proximity_agreement(stump(0.5), apart, d);
  CHECK(none.rf_apart == 0);
  CHECK_FALSE(none.u_bar.has_value());
}

TEST_CASE("report rows and text") {
  auto d = make_dataset({0.1, 0.0, 0.8, 1.0}, {-1, 1}, {"a", "b"});
  Forest f;
  f.depth = 1;
  f.num_features = 2;
  f.trees.push_back(testsupport::make_tree(1, {{0, 0, 0.5}}));
  f.weights = {1.0};
  auto r = evaluate(stump(0.5), f, d);
  r.dataset = "toy";
  r.split = "train";
  r.formulation = "basic";
  std::ostringstream csv;
  write_report_csv_header(csv);
  write_report_csv_row(r, csv);
  CHECK(csv.str() ==
        "dataset,depth,formulation,split,samples,fid,acc_miret,acc_rf,u,u_bar,rf_together,rf_apart\n"
        "toy,1,basic,train,2,100.0000,100.0000,100.0000,NA,100.0000,0,1\n");
  const auto text = format_report(r, {"a", "b"});
  CHECK(text.find("FID        100.0000 %") != std::string::npos);
  CHECK(text.find("    a  100.0") != std::string::npos);
}
