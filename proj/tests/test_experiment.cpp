#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "dcns/errors.hpp"
#include "dcns/experiment.hpp"
#include "dcns/scenarios.hpp"

using dcns::Digraph;
using dcns::ExperimentSpec;

namespace {

namespace fs = std::filesystem;

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "dcns_experiment_tests";
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const std::string& name, const std::string& content) {
  const fs::path p = scratch_dir() / name;
  std::ofstream f(p);
  f << content;
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p);
  REQUIRE(f.good());
  std::string s((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return s;
}

std::string first_line(const fs::path& p) {
  std::ifstream f(p);
  std::string line;
  std::getline(f, line);
  return line;
}

ExperimentSpec tiny_spec() {
  ExperimentSpec spec;
  spec.name = "tiny";
  spec.inline_graph = dcns::bench_path_graph();
  spec.gain_spec = "const:k=0.2";
  spec.noise_spec = "additive:sigma=0.5";
  spec.dt = 0.01;
  spec.horizon = 0.2;
  spec.stride = 5;
  spec.trials = 2;
  spec.psi = {-7, 4, 3, -8};
  spec.out_dir = (scratch_dir() / "out").string();
  return spec;
}

}  // namespace

TEST_CASE("config files round-trip every key") {
  const fs::path cfg = write_file("full.cfg",
                                  "# full campaign configuration\n"
                                  "name = roundtrip\n"
                                  "\n"
                                  "graph = g.graph\n"
                                  "gain = power:a=1,beta=1\n"
                                  "noise = additive:sigma=2\n"
                                  "tau1 = 0.2\n"
                                  "tau2 = 0.5\n"
                                  "dt = 0.002\n"
                                  "horizon = 3.5\n"
                                  "trials = 7\n"
                                  "stride = 20\n"
                                  "threads = 2\n"
                                  "n_dim = 2\n"
                                  "seed = 99\n"
                                  "lyapunov = 1\n"
                                  "psi = 1, 2, 3, -4.5   # eight values\n"
                                  "out = results\n");
  ExperimentSpec spec = dcns::load_experiment(cfg.string());
  CHECK(spec.name == "roundtrip");
  CHECK(spec.graph_path == "g.graph");
  CHECK(spec.gain_spec == "power:a=1,beta=1");
  CHECK(spec.noise_spec == "additive:sigma=2");
  CHECK(spec.tau1 == doctest::Approx(0.2));
  CHECK(spec.tau2 == doctest::Approx(0.5));
  CHECK(spec.dt == doctest::Approx(0.002));
  CHECK(spec.horizon == doctest::Approx(3.5));
  CHECK(spec.trials == 7);
  CHECK(spec.stride == 20);
  CHECK(spec.threads == 2);
  CHECK(spec.n_dim == 2);
  CHECK(spec.seed == 99);
  CHECK(spec.collect_lyapunov);
  REQUIRE(spec.psi.size() == 4);
  CHECK(spec.psi[3] == doctest::Approx(-4.5));
  CHECK(spec.out_dir == "results");
}

TEST_CASE("config parse errors carry the line number") {
  const fs::path bad_key = write_file("bad_key.cfg", "name = x\nwidth = 3\n");
  try {
    (void)dcns::load_experiment(bad_key.string());
    FAIL("expected ParseError");
  } catch (const dcns::ParseError& e) {
    CHECK(std::string(e.what()).find("unknown config key 'width'") != std::string::npos);
    CHECK(std::string(e.what()).find("(line 2") != std::string::npos);
  }

  const fs::path no_eq = write_file("no_eq.cfg", "name = x\n\njust words\n");
  try {
    (void)dcns::load_experiment(no_eq.string());
    FAIL("expected ParseError");
  } catch (const dcns::ParseError& e) {
    CHECK(std::string(e.what()).find("(line 3") != std::string::npos);
  }

  const fs::path bad_num = write_file("bad_num.cfg", "dt = fast\n");
  CHECK_THROWS_AS((void)dcns::load_experiment(bad_num.string()), dcns::ParseError);
  const fs::path bad_int = write_file("bad_int.cfg", "trials = 2.5\n");
  CHECK_THROWS_AS((void)dcns::load_experiment(bad_int.string()), dcns::ParseError);

  CHECK_THROWS_AS((void)dcns::load_experiment((scratch_dir() / "missing.cfg").string()),
                  dcns::ConfigError);
}

TEST_CASE("overrides mutate single fields") {
  ExperimentSpec spec;
  dcns::apply_override(spec, "seed", "7");
  CHECK(spec.seed == 7);
  dcns::apply_override(spec, "psi", "0.5,-1,2,3");
  REQUIRE(spec.psi.size() == 4);
  CHECK(spec.psi[1] == doctest::Approx(-1.0));
  dcns::apply_override(spec, "lyapunov", "0");
  CHECK_FALSE(spec.collect_lyapunov);
  dcns::apply_override(spec, "gain", "loginv:s=4");
  CHECK(spec.gain_spec == "loginv:s=4");

  CHECK_THROWS_AS(dcns::apply_override(spec, "horizon", "ten"), dcns::ParseError);
  CHECK_THROWS_AS(dcns::apply_override(spec, "psi", "1,,2"), dcns::ParseError);
  CHECK_THROWS_AS(dcns::apply_override(spec, "momentum", "1"), dcns::ParseError);
}

TEST_CASE("graphs resolve from the inline copy or a file") {
  ExperimentSpec spec;
  CHECK_THROWS_AS((void)dcns::experiment_graph(spec), dcns::ConfigError);

  const fs::path gpath = write_file("chain.graph",
                                    "agents 4\n"
                                    "1 2\n2 3\n3 2\n3 4\n4 3\n");
  spec.graph_path = gpath.string();
  Digraph from_file = dcns::experiment_graph(spec);
  CHECK(from_file.n == 4);
  CHECK(from_file.adj.sum() == 5);

  spec.inline_graph = dcns::bench_path_graph();  // wins over the path
  CHECK(dcns::experiment_graph(spec).adj.sum() == 6);
}

TEST_CASE("simulator configuration is validated against the graph") {
  ExperimentSpec spec = tiny_spec();
  Digraph g = dcns::experiment_graph(spec);
  dcns::SimConfig cfg = dcns::experiment_config(spec, g);
  CHECK(cfg.dt == doctest::Approx(0.01));
  CHECK(cfg.trials == 2);
  CHECK(cfg.gain(0.0) == doctest::Approx(0.2));
  CHECK(cfg.history.initial().size() == 4);

  spec.psi = {};
  CHECK_THROWS_AS((void)dcns::experiment_config(spec, g), dcns::ConfigError);
  spec.psi = {1, 2, 3};
  CHECK_THROWS_AS((void)dcns::experiment_config(spec, g), dcns::ConfigError);
  spec.psi = {1, 2, 3, -8};
  spec.n_dim = 2;
  CHECK_THROWS_AS((void)dcns::experiment_config(spec, g), dcns::ConfigError);
}

TEST_CASE("campaign outputs: csv layout and summary fields") {
  ExperimentSpec spec = tiny_spec();
  spec.collect_lyapunov = true;
  auto res = dcns::run_experiment(spec);
  auto paths = dcns::write_outputs(spec, res);
  REQUIRE(paths.size() == 4);
  for (const auto& p : paths) CHECK(fs::exists(p));

  CHECK(first_line(paths[0]) == "t,agent_1_1,agent_2_1,agent_3_1,agent_4_1");
  CHECK(first_line(paths[1]) == "t,ms_disagreement,max_pairwise_ms,centroid_mean,centroid_var");
  CHECK(first_line(paths[2]) == "t,lyapunov_mean");

  const auto j = nlohmann::json::parse(read_file(paths[3]));
  CHECK(j["name"] == "tiny");
  CHECK(j["graph"]["agents"] == 4);
  CHECK(j["params"]["trials"] == 2);
  CHECK(j["params"]["gain"] == "const:k=0.2");
  CHECK(j["results"]["final_time"].get<double>() == doctest::Approx(0.2));
  CHECK(j["results"]["diverged_trials"] == 0);
  CHECK(j["results"].contains("final_ms_disagreement"));
  CHECK(j["results"].contains("as_rate_median"));

  // data rows: horizon 0.2 at dt 0.01 with stride 5 records t = 0, .05, .1, .15, .2
  std::ifstream stats(paths[1]);
  std::string line;
  int rows = -1;
  while (std::getline(stats, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 5);
}

TEST_CASE("vector states widen the trajectory header") {
  ExperimentSpec spec = tiny_spec();
  spec.name = "planar";
  spec.n_dim = 2;
  spec.psi = {-7, 0, 4, 0, 3, 0, -8, 0};
  auto res = dcns::run_experiment(spec);
  auto paths = dcns::write_outputs(spec, res);
  CHECK(first_line(paths[0]) ==
        "t,agent_1_1,agent_1_2,agent_2_1,agent_2_2,agent_3_1,agent_3_2,agent_4_1,agent_4_2");
}

TEST_CASE("built-in scenarios cover the benchmark campaigns") {
  auto ids = dcns::scenario_ids();
  REQUIRE(ids.size() == 8);
  for (const auto& id : ids) {
    ExperimentSpec spec = dcns::scenario(id);
    CHECK(spec.name == id);
    REQUIRE(spec.psi.size() == 4);
    CHECK(spec.psi[0] == doctest::Approx(-7.0));
    // every preset assembles into a runnable configuration
    Digraph g = dcns::experiment_graph(spec);
    CHECK_NOTHROW((void)dcns::experiment_config(spec, g));
  }

  ExperimentSpec fig2 = dcns::scenario("fig2");
  CHECK(fig2.gain_spec.find("beta=0.333333") != std::string::npos);
  CHECK(fig2.noise_spec == "additive:sigma=2");
  CHECK(fig2.tau1 == doctest::Approx(0.2));
  CHECK(fig2.trials == 500);

  ExperimentSpec fig3 = dcns::scenario("fig3");
  CHECK(fig3.gain_spec.find("const:k=0.12") != std::string::npos);
  CHECK(fig3.noise_spec == "mult-linear:sigma=2,bar=2");
  CHECK(fig3.tau2 == doctest::Approx(2.0));
  CHECK(fig3.horizon == doctest::Approx(100.0));
  CHECK(fig3.trials == 200);
  CHECK(fig3.seed == 103);

  ExperimentSpec fig7 = dcns::scenario("fig7");
  CHECK(fig7.tau1 == doctest::Approx(3.5));

  CHECK_THROWS_AS((void)dcns::scenario("fig9"), dcns::UnknownScenario);
  CHECK_THROWS_AS((void)dcns::scenario(""), dcns::UnknownScenario);
}
