#include "miret/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "miret/evaluation.hpp"
#include "miret/random.hpp"
#include "miret/surrogate.hpp"

namespace miret {

Percentile Percentile::of(double h) {
  if (!(h > 0.0 && h <= 100.0)) throw InputError("percentile must lie in (0, 100]");
  return Percentile{false, h};
}

std::string Percentile::label() const {
  if (zero) return "zero";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", h);
  std::string s = buf;
  if (s.size() > 2 && s.ends_with(".0")) s.resize(s.size() - 2);
  return s;
}

Percentile Percentile::parse(const std::string& text) {
  if (text == "zero" || text == "0") return zero_threshold();
  try {
    const auto slash = text.find('/');
    std::size_t used = 0;
    if (slash == std::string::npos) {
      const double v = std::stod(text, &used);
      if (used != text.size()) throw InputError("");
      return of(v);
    }
    const double num = std::stod(text.substr(0, slash), &used);
    if (used != slash) throw InputError("");
    const std::string rest = text.substr(slash + 1);
    const double den = std::stod(rest, &used);
    if (used != rest.size() || den == 0.0) throw InputError("");
    return of(num / den);
  } catch (const std::exception&) {
    throw InputError("invalid percentile: " + text);
  }
}

std::vector<double> gamma_from_percentile(const LevelFrequencyMatrix& freq, const Percentile& p) {
  std::vector<double> gamma(static_cast<std::size_t>(freq.depth()), 0.0);
  if (p.zero) return gamma;
  for (int d = 0; d < freq.depth(); ++d) {
    std::vector<double> pos;
    for (std::size_t j = 0; j < freq.num_features(); ++j) {
      if (freq.at(j, d) > 0.0) pos.push_back(freq.at(j, d));
    }
    if (pos.empty()) continue;
    std::sort(pos.begin(), pos.end());
    const double n = static_cast<double>(pos.size());
    // Guard against 100/3 * 3 / 100 landing a hair above an integer.
    auto rank = static_cast<std::size_t>(std::ceil(p.h * n / 100.0 - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, pos.size());
    gamma[static_cast<std::size_t>(d)] = pos[rank - 1];
  }
  return gamma;
}

void TuneGrid::validate() const {
  if (k < 2) throw InputError("cross-validation needs at least 2 folds");
  if (alphas.empty() || percentiles.empty()) throw InputError("tuning grid is empty");
  for (double a : alphas) {
    if (!(a >= 0.0)) throw InputError("alpha values must be non-negative");
  }
}

std::size_t select_cell(const std::vector<CellSummary>& cells) {
  if (cells.empty()) throw InputError("no grid cells to select from");
  auto h_rank = [](const Percentile& p) { return p.zero ? -1.0 : p.h; };
  std::size_t best = 0;
  for (std::size_t c = 1; c < cells.size(); ++c) {
    const auto& x = cells[c];
    const auto& y = cells[best];
    bool better = false;
    if (x.mean_fidelity != y.mean_fidelity) {
      better = x.mean_fidelity > y.mean_fidelity;
    } else if (x.mean_sparsity != y.mean_sparsity) {
      better = x.mean_sparsity < y.mean_sparsity;
    } else if (x.alpha != y.alpha) {
      better = x.alpha < y.alpha;
    } else {
      better = h_rank(x.percentile) > h_rank(y.percentile);
    }
    if (better) best = c;
  }
  return best;
}

TuneResult cross_validate(const Dataset& data, const TuneGrid& grid, const TuneConfig& config) {
  grid.validate();
  data.validate();
  const auto fold_of = stratified_folds(data, grid.k, config.seed);

  struct FoldData {
    Dataset train;
    Dataset validation;
    Forest forest;
    TeStatistics stats;
  };
  std::vector<FoldData> folds(grid.k);
  for (std::size_t f = 0; f < grid.k; ++f) {
    std::vector<std::size_t> tr;
    std::vector<std::size_t> va;
    for (std::size_t i = 0; i < data.num_rows; ++i) (fold_of[i] == f ? va : tr).push_back(i);
    auto& fd = folds[f];
    fd.train = data.subset(tr);
    fd.validation = data.subset(va);
    ForestConfig fc = config.forest;
    fc.seed = derive_seed(config.forest.seed, f);
    fd.forest = train_forest(fd.train, fc);
    fd.stats = TeStatistics::compute(fd.forest, fd.train);
  }

  const TreeTopology topo = build_topology(config.forest.depth);
  milp::SolverConfig solver = config.solver;
  if (config.budget > 0.0) solver.time_limit = config.budget / static_cast<double>(grid.k * grid.size());

  TuneResult result;
  std::size_t cell = 0;
  for (double alpha : grid.alphas) {
    for (const auto& pct : grid.percentiles) {
      CellSummary summary{alpha, pct, 0.0, 0.0, 0};
      for (std::size_t f = 0; f < grid.k; ++f) {
        const auto& fd = folds[f];
        MiretHyperparams hp = config.base;
        hp.alpha = alpha;
        hp.gamma = gamma_from_percentile(fd.stats.level_freq, pct);
        hp.time_limit = solver.time_limit;
        FoldResult fr;
        fr.cell = cell;
        fr.fold = f;
        fr.alpha = alpha;
        fr.percentile = pct;
        const auto model = build_model(fd.train, fd.stats, hp, topo);
        const auto report = milp::solve(model.model, solver);
        fr.status = milp::to_string(report.status);
        fr.gap = report.gap;
        fr.seconds = report.seconds;
        if (report.has_solution()) {
          const auto tree = decode(model, report.solution, fd.train);
          fr.fidelity = fidelity(tree, fd.forest, fd.validation);
          fr.sparsity = active_splits(tree);
        } else {
          fr.flagged = true;
        }
        summary.mean_fidelity += fr.fidelity / static_cast<double>(grid.k);
        summary.mean_sparsity += static_cast<double>(fr.sparsity) / static_cast<double>(grid.k);
        summary.flagged += fr.flagged ? 1 : 0;
        result.folds.push_back(std::move(fr));
      }
      result.cells.push_back(summary);
      ++cell;
    }
  }
  result.selected = select_cell(result.cells);
  return result;
}

void write_tune_csv(const TuneResult& result, std::ostream& out) {
  out << "cell,alpha,h,fold,fidelity,sparsity,gap,seconds,status,flagged\n";
  for (const auto& f : result.folds) {
    out << f.cell << ',' << f.alpha << ',' << f.percentile.label() << ',' << f.fold << ',' << f.fidelity << ','
        << f.sparsity << ',' << f.gap << ',' << f.seconds << ',' << f.status << ',' << (f.flagged ? 1 : 0) << '\n';
  }
}

}  // namespace miret
