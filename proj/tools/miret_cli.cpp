// Command-line driver: forest, vite, miret, eval and tune subcommands.
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "miret/branch_and_bound.hpp"
#include "miret/dataset.hpp"
#include "miret/evaluation.hpp"
#include "miret/forest.hpp"
#include "miret/miret_model.hpp"
#include "miret/random.hpp"
#include "miret/surrogate.hpp"
#include "miret/te_metrics.hpp"
#include "miret/tuning.hpp"
#include "miret/vite.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct RunConfig {
  std::string data;
  std::string label = "label";
  int depth = 3;
  std::size_t trees = 100;
  std::uint64_t seed = 0;
  double train_fraction = 0.8;
  std::size_t max_train = 0;
  std::string formulation = "strengthened";
  double alpha = 0.5;
  std::string h;
  std::vector<double> gamma;
  double mbar = 1.0;
  double epsilon = 0.001;
  double time_limit = 3600.0;
  std::string out = "miret_out";
  std::string forest;
  std::string surrogate;
  bool export_lp = false;
  // vite
  std::string denominator = "observed";
  bool hide_labels = false;
  // tune
  std::vector<double> alphas{0.2, 0.4, 0.5, 0.6, 0.8};
  std::vector<std::string> percentiles{"zero", "50", "100/3", "25"};
  std::size_t folds = 4;
  double budget = 0.0;
};

struct Pipeline {
  miret::Dataset train;
  miret::Dataset test;
  miret::Forest forest;
};

fs::path output_dir(const RunConfig& c) {
  if (const char* env = std::getenv("MIRET_OUTPUT_DIR"); env && *env) return env;
  return c.out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw miret::InputError("cannot write " + path.string());
  out << text;
}

void validate(const RunConfig& c, const std::string& cmd) {
  std::vector<std::string> errors;
  if (c.data.empty()) errors.push_back("--data is required");
  if (!c.data.empty() && !fs::exists(c.data)) errors.push_back("data file not found: " + c.data);
  if (c.depth < 1) errors.push_back("--depth must be at least 1");
  if (c.trees < 1) errors.push_back("--trees must be at least 1");
  if (!(c.train_fraction > 0.0 && c.train_fraction < 1.0)) errors.push_back("--train-fraction must lie in (0,1)");
  if (!(c.alpha >= 0.0)) errors.push_back("--alpha must be non-negative");
  if (!(c.mbar > 0.0 && c.mbar <= 1.0)) errors.push_back("--mbar must lie in (0,1]");
  if (!(c.epsilon > 0.0)) errors.push_back("--epsilon must be positive");
  if (!(c.time_limit > 0.0)) errors.push_back("--time-limit must be positive");
  if (c.formulation != "basic" && c.formulation != "strengthened") errors.push_back("--formulation must be basic or strengthened");
  if (!c.h.empty() && !c.gamma.empty()) errors.push_back("--h and --gamma are mutually exclusive");
  if (!c.gamma.empty() && c.gamma.size() != static_cast<std::size_t>(c.depth)) errors.push_back("--gamma needs one value per level");
  if (!c.forest.empty() && !fs::exists(c.forest)) errors.push_back("forest file not found: " + c.forest);
  if (cmd == "eval" && c.surrogate.empty()) errors.push_back("eval requires --surrogate");
  if (!c.surrogate.empty() && !fs::exists(c.surrogate)) errors.push_back("surrogate file not found: " + c.surrogate);
  if (c.denominator != "observed" && c.denominator != "full") errors.push_back("--denominator must be observed or full");
  if (cmd == "tune" && c.folds < 2) errors.push_back("--folds must be at least 2");
  if (!errors.empty()) {
    for (const auto& e : errors) std::cerr << "error: " << e << '\n';
    throw std::runtime_error("invalid configuration");
  }
}

Pipeline prepare(const RunConfig& c) {
  Pipeline p;
  auto data = miret::load_csv(c.data, c.label);
  auto [train, test] = miret::split(data, {c.train_fraction, c.seed});
  if (c.max_train > 0 && c.max_train < train.num_rows) {
    const double f = static_cast<double>(c.max_train) / static_cast<double>(train.num_rows);
    train = miret::split(train, {f, miret::derive_seed(c.seed, 1)}).first;
  }
  miret::normalize_to_train(train, test);
  p.train = std::move(train);
  p.test = std::move(test);
  if (!c.forest.empty()) {
    std::ifstream in(c.forest);
    p.forest = miret::read_forest(in);
    if (p.forest.num_features != p.train.num_features) throw miret::InputError("forest does not match the data");
  } else {
    p.forest = miret::train_forest(p.train, {c.depth, c.trees, c.seed, 0});
  }
  return p;
}

json config_json(const RunConfig& c) {
  return json{{"data", c.data},
              {"label", c.label},
              {"depth", c.depth},
              {"trees", c.trees},
              {"seed", c.seed},
              {"train_fraction", c.train_fraction},
              {"max_train", c.max_train},
              {"formulation", c.formulation},
              {"alpha", c.alpha},
              {"h", c.h},
              {"gamma", c.gamma},
              {"mbar", c.mbar},
              {"epsilon", c.epsilon},
              {"time_limit", c.time_limit},
              {"forest", c.forest},
              {"surrogate", c.surrogate},
              {"export_lp", c.export_lp}};
}

void record_manifest(const fs::path& dir, const std::string& cmd, const RunConfig& c, const json& artifacts,
                     const json& extra = json::object()) {
  const fs::path path = dir / "manifest.json";
  json m = json::object();
  if (fs::exists(path)) {
    std::ifstream in(path);
    try {
      in >> m;
    } catch (const json::exception&) {
      m = json::object();
    }
  }
  json entry{{"config", config_json(c)}, {"artifacts", artifacts}};
  entry.update(extra);
  m["runs"][cmd] = entry;
  write_text(path, m.dump(2) + "\n");
}

int cmd_forest(const RunConfig& c) {
  const auto dir = output_dir(c);
  fs::create_directories(dir);
  const auto p = prepare(c);
  write_text(dir / "forest.txt", miret::forest_to_string(p.forest));
  miret::write_csv(p.train, dir / "train.csv");
  miret::write_csv(p.test, dir / "test.csv");
  record_manifest(dir, "forest", c, {"forest.txt", "train.csv", "test.csv"},
                  {{"train_rows", p.train.num_rows}, {"test_rows", p.test.num_rows}});
  std::cout << "forest: " << p.forest.size() << " trees of depth " << p.forest.depth << " on " << p.train.num_rows
            << " training rows -> " << (dir / "forest.txt").string() << '\n';
  return 0;
}

int cmd_vite(const RunConfig& c) {
  const auto dir = output_dir(c);
  fs::create_directories(dir);
  const auto p = prepare(c);
  const auto mode = c.denominator == "full" ? miret::DenominatorMode::kFullLevel : miret::DenominatorMode::kObservedSplits;
  const auto freq = miret::level_frequency(p.forest, mode);
  const auto nodefreq = miret::node_frequency(p.forest);
  const auto ranges = miret::threshold_ranges(p.forest);
  miret::HeatmapSpec spec;
  spec.show_percent = !c.hide_labels;
  const auto& names = p.train.feature_names;

  spec.title = "Feature frequency (%) per tree level";
  write_text(dir / "level_heatmap.svg", miret::render_level_heatmap(freq, spec, names));
  spec.title = "Representative tree";
  write_text(dir / "representative_tree.svg",
             miret::render_representative_tree(nodefreq, ranges, p.forest.depth, spec, names));
  std::ostringstream s1, s2, s3, s4, s5;
  miret::write_level_frequency_csv(freq, names, s1);
  miret::write_node_frequency_csv(nodefreq, names, s2);
  miret::write_threshold_ranges_csv(ranges, names, s3);
  const auto prox = miret::proximity(p.forest, p.train);
  miret::write_proximity_distribution_csv(prox, s4);
  miret::write_probability_distribution_csv(miret::class_probabilities(p.forest, p.train), s5);
  write_text(dir / "level_frequency.csv", s1.str());
  write_text(dir / "node_frequency.csv", s2.str());
  write_text(dir / "threshold_ranges.csv", s3.str());
  write_text(dir / "proximity_distribution.csv", s4.str());
  write_text(dir / "probabilities.csv", s5.str());
  record_manifest(dir, "vite", c,
                  {"level_heatmap.svg", "representative_tree.svg", "level_frequency.csv", "node_frequency.csv",
                   "threshold_ranges.csv", "proximity_distribution.csv", "probabilities.csv"},
                  {{"denominator", c.denominator}});
  std::cout << "vite: heatmaps written to " << dir.string() << '\n';
  return 0;
}

std::vector<double> resolve_gamma(const RunConfig& c, const miret::TeStatistics& stats) {
  if (!c.gamma.empty()) return c.gamma;
  if (!c.h.empty()) return miret::gamma_from_percentile(stats.level_freq, miret::Percentile::parse(c.h));
  return {};
}

int cmd_miret(const RunConfig& c) {
  const auto dir = output_dir(c);
  fs::create_directories(dir);
  const auto p = prepare(c);
  if (p.forest.depth != c.depth) throw miret::InputError("--depth must match the forest depth");
  const auto stats = miret::TeStatistics::compute(p.forest, p.train);
  miret::MiretHyperparams hp;
  hp.alpha = c.alpha;
  hp.gamma = resolve_gamma(c, stats);
  hp.mbar = c.mbar;
  hp.epsilon = c.epsilon;
  hp.time_limit = c.time_limit;
  hp.formulation = miret::parse_formulation(c.formulation);
  const auto topo = miret::build_topology(c.depth);
  const auto model = miret::build_model(p.train, stats, hp, topo);
  json extra{{"gamma", hp.gamma_or_zero(c.depth)},
             {"variables", model.model.num_variables()},
             {"constraints", model.model.num_constraints()},
             {"binaries", model.model.num_binaries()}};

  if (c.export_lp) {
    std::ostringstream lp;
    miret::milp::write_lp(model.model, lp, "miret " + c.formulation);
    write_text(dir / "model.lp", lp.str());
    record_manifest(dir, "miret", c, {"model.lp"}, extra);
    std::cout << "miret: LP written to " << (dir / "model.lp").string() << " (" << model.model.num_variables()
              << " variables, " << model.model.num_constraints() << " constraints)\n";
    return 0;
  }

  miret::milp::SolverConfig sc;
  sc.time_limit = c.time_limit;
  sc.seed = c.seed;
  const auto report = miret::milp::solve(model.model, sc);
  std::ostringstream log;
  miret::milp::write_log_csv(report.log, log);
  write_text(dir / "solve_log.csv", log.str());
  extra["status"] = miret::milp::to_string(report.status);
  extra["objective"] = report.has_solution() ? json(report.incumbent) : json(nullptr);
  extra["bound"] = std::isfinite(report.bound) ? json(report.bound) : json(nullptr);
  extra["gap"] = std::isfinite(report.gap) ? json(report.gap) : json(nullptr);
  extra["seconds"] = report.seconds;
  extra["nodes"] = report.nodes;
  std::cout << "miret: " << miret::milp::to_string(report.status) << " after " << report.nodes << " nodes, "
            << report.seconds << " s";
  if (!report.has_solution()) {
    std::cout << '\n';
    record_manifest(dir, "miret", c, {"solve_log.csv"}, extra);
    std::cerr << "error: no surrogate found (" << miret::milp::to_string(report.status) << ")\n";
    return 3;
  }
  std::cout << ", objective " << report.incumbent << ", gap " << report.gap << " %\n";
  const auto tree = miret::decode(model, report.solution, p.train);
  write_text(dir / "surrogate.txt", miret::surrogate_to_string(tree));
  write_text(dir / "surrogate.svg", miret::render_surrogate_svg(tree, p.train));
  extra["effective_depth"] = miret::effective_depth(tree);
  extra["train_fidelity"] = miret::fidelity(tree, p.forest, p.train);
  if (c.forest.empty()) write_text(dir / "forest.txt", miret::forest_to_string(p.forest));
  json artifacts{"solve_log.csv", "surrogate.txt", "surrogate.svg"};
  if (c.forest.empty()) artifacts.push_back("forest.txt");
  record_manifest(dir, "miret", c, artifacts, extra);
  for (miret::NodeId t = 0; t < tree.num_branches(); ++t) {
    std::cout << "  node " << t << ": " << miret::describe_split(tree, t, p.train.feature_names) << '\n';
  }
  return 0;
}

int cmd_eval(const RunConfig& c) {
  const auto dir = output_dir(c);
  fs::create_directories(dir);
  const auto p = prepare(c);
  std::ifstream in(c.surrogate);
  const auto tree = miret::read_surrogate(in);
  if (tree.num_features != p.train.num_features) throw miret::InputError("surrogate does not match the data");
  std::ostringstream csv;
  miret::write_report_csv_header(csv);
  for (const auto& [name, data] : {std::pair{"train", &p.train}, std::pair{"test", &p.test}}) {
    auto r = miret::evaluate(tree, p.forest, *data);
    r.dataset = fs::path(c.data).stem().string();
    r.formulation = c.formulation;
    r.split = name;
    miret::write_report_csv_row(r, csv);
    std::cout << miret::format_report(r, p.train.feature_names);
  }
  write_text(dir / "eval.csv", csv.str());
  record_manifest(dir, "eval", c, {"eval.csv"});
  return 0;
}

int cmd_tune(const RunConfig& c) {
  const auto dir = output_dir(c);
  fs::create_directories(dir);
  auto data = miret::load_csv(c.data, c.label);
  auto train = miret::split(data, {c.train_fraction, c.seed}).first;
  if (c.max_train > 0 && c.max_train < train.num_rows) {
    const double f = static_cast<double>(c.max_train) / static_cast<double>(train.num_rows);
    train = miret::split(train, {f, miret::derive_seed(c.seed, 1)}).first;
  }
  miret::normalize(train);
  miret::TuneGrid grid;
  grid.alphas = c.alphas;
  grid.percentiles.clear();
  for (const auto& h : c.percentiles) grid.percentiles.push_back(miret::Percentile::parse(h));
  grid.k = c.folds;
  miret::TuneConfig tc;
  tc.forest = {c.depth, c.trees, c.seed, 0};
  tc.base.mbar = c.mbar;
  tc.base.epsilon = c.epsilon;
  tc.base.formulation = miret::parse_formulation(c.formulation);
  tc.solver.time_limit = c.time_limit;
  tc.solver.seed = c.seed;
  tc.budget = c.budget;
  tc.seed = c.seed;
  const auto result = miret::cross_validate(train, grid, tc);
  std::ostringstream csv;
  miret::write_tune_csv(result, csv);
  write_text(dir / "tune.csv", csv.str());
  const auto& best = result.best();
  json sel{{"alpha", best.alpha},
           {"h", best.percentile.label()},
           {"mean_fidelity", best.mean_fidelity},
           {"mean_sparsity", best.mean_sparsity}};
  write_text(dir / "selection.json", sel.dump(2) + "\n");
  record_manifest(dir, "tune", c, {"tune.csv", "selection.json"},
                  {{"selection", sel}, {"folds", c.folds}, {"alphas", c.alphas}, {"percentiles", c.percentiles}});
  std::cout << "tune: selected alpha=" << best.alpha << " h=" << best.percentile.label()
            << " (mean fidelity " << best.mean_fidelity << " %, mean sparsity " << best.mean_sparsity << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal multivariate surrogate trees for tree ensembles"};
  app.require_subcommand(1);
  // --h is the percentile option, so help is long-form only.
  app.set_help_flag("--help", "print help and exit");
  RunConfig c;

  auto add_common = [&c](CLI::App* sub) {
    sub->add_option("--data", c.data, "CSV dataset")->required();
    sub->add_option("--label", c.label, "label column name");
    sub->add_option("--depth", c.depth, "tree depth D");
    sub->add_option("--trees", c.trees, "number of trees in the forest");
    sub->add_option("--seed", c.seed, "seed for the split and the forest");
    sub->add_option("--train-fraction", c.train_fraction, "training share of the stratified split");
    sub->add_option("--max-train", c.max_train, "stratified subsample of the training split (0 = all)");
    sub->add_option("--forest", c.forest, "reuse a serialized forest");
    sub->add_option("--out", c.out, "output directory (MIRET_OUTPUT_DIR overrides)");
  };
  auto add_model = [&c](CLI::App* sub) {
    sub->add_option("--formulation", c.formulation, "basic | strengthened");
    sub->add_option("--alpha", c.alpha, "sparsity penalty weight");
    sub->add_option("--h", c.h, "frequency percentile (zero, 50, 100/3, ...)");
    sub->add_option("--gamma", c.gamma, "explicit per-level thresholds")->delimiter(',');
    sub->add_option("--mbar", c.mbar, "proximity threshold");
    sub->add_option("--epsilon", c.epsilon, "right-branch margin");
    sub->add_option("--time-limit", c.time_limit, "solver time limit in seconds");
  };

  auto* forest = app.add_subcommand("forest", "train and serialize the forest");
  add_common(forest);
  auto* vite = app.add_subcommand("vite", "render level and node frequency heatmaps");
  add_common(vite);
  vite->add_option("--denominator", c.denominator, "observed | full");
  vite->add_flag("--hide-labels", c.hide_labels, "omit percentages in cells");
  auto* miret_cmd = app.add_subcommand("miret", "build and solve (or export) the surrogate model");
  add_common(miret_cmd);
  add_model(miret_cmd);
  miret_cmd->add_flag("--export-lp", c.export_lp, "write the model as an LP file instead of solving");
  auto* eval = app.add_subcommand("eval", "evaluate a surrogate against the forest");
  add_common(eval);
  add_model(eval);
  eval->add_option("--surrogate", c.surrogate, "surrogate tree file");
  auto* tune = app.add_subcommand("tune", "grid search alpha and h by cross-validation");
  add_common(tune);
  add_model(tune);
  tune->add_option("--alphas", c.alphas, "alpha grid")->delimiter(',');
  tune->add_option("--percentiles", c.percentiles, "h grid")->delimiter(',');
  tune->add_option("--folds", c.folds, "number of folds");
  tune->add_option("--budget", c.budget, "total time budget in seconds (0 = per-fold --time-limit)");

  CLI11_PARSE(app, argc, argv);
  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    validate(c, cmd);
    if (cmd == "forest") return cmd_forest(c);
    if (cmd == "vite") return cmd_vite(c);
    if (cmd == "miret") return cmd_miret(c);
    if (cmd == "eval") return cmd_eval(c);
    if (cmd == "tune") return cmd_tune(c);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
