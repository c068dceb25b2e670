#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "miret/dataset.hpp"
#include "support.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string output;
};

Run run(const std::string& args, const std::string& env = "") {
  const fs::path log = fs::temp_directory_path() / "miret_cli_test.log";
  const std::string cmd = env + (env.empty() ? "" : " ") + std::string(MIRET_CLI_PATH) + " " + args + " > " +
                          log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  r.output = ss.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Workspace {
  fs::path dir;
  fs::path csv;
  Workspace() {
    dir = fs::temp_directory_path() / "miret_cli_ws";
    fs::remove_all(dir);
    fs::create_directories(dir);
    csv = dir / "synthetic.csv";
    miret::write_csv(testsupport::separable_2d(40, 17), csv, "cls");
  }
  std::string common(const std::string& out) const {
    return "--data " + csv.string() + " --label cls --depth 2 --trees 10 --seed 3 --out " + (dir / out).string();
  }
};

}  // namespace

TEST_CASE("forest, vite, miret, eval and tune write their artifacts") {
  Workspace ws;
  const fs::path out = ws.dir / "run";

  auto r = run("forest " + ws.common("run"));
  REQUIRE_MESSAGE(r.code == 0, r.output);
  for (const char* f : {"forest.txt", "train.csv", "test.csv", "manifest.json"}) CHECK(fs::exists(out / f));
  CHECK(miret::load_csv(out / "train.csv", "label").num_rows == 32);

  const std::string forest = " --forest " + (out / "forest.txt").string();
  r = run("vite " + ws.common("run") + forest);
  REQUIRE_MESSAGE(r.code == 0, r.output);
  for (const char* f : {"level_heatmap.svg", "representative_tree.svg", "level_frequency.csv", "node_frequency.csv",
                        "threshold_ranges.csv", "proximity_distribution.csv", "probabilities.csv"}) {
    CHECK(fs::exists(out / f));
  }
  const std::string heat = slurp(out / "level_heatmap.svg");
  CHECK(heat.rfind("<svg", 0) == 0);
  CHECK(slurp(out / "level_frequency.csv").rfind("feature,level_0,level_1\n", 0) == 0);
  r = run("vite " + ws.common("run") + forest);
  CHECK(slurp(out / "level_heatmap.svg") == heat);
  r = run("vite --denominator full --hide-labels " + ws.common("run") + forest);
  REQUIRE(r.code == 0);
  CHECK(slurp(out / "level_heatmap.svg").find("class=\"pct\"") == std::string::npos);

  r = run("miret --export-lp --max-train 12 --alpha 0.2 " + ws.common("run"));
  REQUIRE_MESSAGE(r.code == 0, r.output);
  const std::string lp = slurp(out / "model.lp");
  CHECK(lp.find("Subject To") != std::string::npos);
  CHECK(lp.find("qL_0_0") != std::string::npos);
  CHECK(lp.find("min_splits") != std::string::npos);

  // With two features the root level has a single positive frequency, so h=50 leaves
  // nothing selectable there and the min-splits cut makes the model infeasible.
  r = run("miret --max-train 12 --alpha 0.2 --h 50 --time-limit 60 " + ws.common("run"));
  CHECK(r.code == 3);

  r = run("miret --max-train 12 --alpha 0.2 --h zero --time-limit 60 " + ws.common("run"));
  REQUIRE_MESSAGE(r.code == 0, r.output);
  for (const char* f : {"solve_log.csv", "surrogate.txt", "surrogate.svg"}) CHECK(fs::exists(out / f));
  CHECK(r.output.find("node 0:") != std::string::npos);

  r = run("eval --max-train 12 --surrogate " + (out / "surrogate.txt").string() + " " + ws.common("run") + forest);
  REQUIRE_MESSAGE(r.code == 0, r.output);
  const std::string eval = slurp(out / "eval.csv");
  CHECK(eval.find(",train,12,") != std::string::npos);
  CHECK(eval.find(",test,8,") != std::string::npos);

  r = run("tune --max-train 12 --alphas 0.5 --percentiles zero,50 --folds 2 --time-limit 5 " + ws.common("run"));
  REQUIRE_MESSAGE(r.code == 0, r.output);
  CHECK(fs::exists(out / "tune.csv"));
  const auto sel = nlohmann::json::parse(slurp(out / "selection.json"));
  CHECK(sel["alpha"] == 0.5);

  const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
  for (const char* cmd : {"forest", "vite", "miret", "eval", "tune"}) CHECK(manifest["runs"].contains(cmd));
  CHECK(manifest["runs"]["miret"]["config"]["alpha"] == 0.2);
  CHECK(manifest["runs"]["miret"].contains("status"));
}

TEST_CASE("invalid invocations exit nonzero with an error line") {
  Workspace ws;
  auto r = run("eval " + ws.common("bad"));
  CHECK(r.code == 2);
  CHECK(r.output.find("error: eval requires --surrogate") != std::string::npos);

  r = run("miret --alpha -1 --epsilon 0 " + ws.common("bad"));
  CHECK(r.code == 2);
  CHECK(r.output.find("error: --alpha") != std::string::npos);
  CHECK(r.output.find("error: --epsilon") != std::string::npos);

  r = run("forest --data /nonexistent.csv");
  CHECK(r.code == 2);
  r = run("forest --label nope " + ws.common("bad").substr(0, ws.common("bad").find(" --label")));
  CHECK(r.code == 2);
  r = run("miret --h 50 --gamma 0.1,0.1 " + ws.common("bad"));
  CHECK(r.code == 2);
  r = run("");
  CHECK(r.code != 0);
}

TEST_CASE("the output directory can be redirected by the environment") {
  Workspace ws;
  const fs::path redirected = ws.dir / "env_out";
  const auto r = run("forest " + ws.common("ignored"), "MIRET_OUTPUT_DIR=" + redirected.string());
  REQUIRE_MESSAGE(r.code == 0, r.output);
  CHECK(fs::exists(redirected / "forest.txt"));
  CHECK_FALSE(fs::exists(ws.dir / "ignored"));
}
