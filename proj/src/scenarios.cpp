#include "dcns/scenarios.hpp"

#include <cstdio>

#include "dcns/errors.hpp"

namespace dcns {

Digraph bench_digraph() {
  return Digraph::from_edges(4, {{1, 2}, {2, 3}, {3, 2}, {3, 4}, {4, 3}});
}

Digraph bench_path_graph() {
  return Digraph::from_edges(4, {{1, 2}, {2, 1}, {2, 3}, {3, 2}, {3, 4}, {4, 3}});
}

namespace {

std::string one_third_beta() {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "power:a=1,beta=%.17g", 1.0 / 3.0);
  return buf;
}

ExperimentSpec base_spec(const std::string& name) {
  ExperimentSpec s;
  s.name = name;
  s.psi = {-7, 4, 3, -8};
  s.dt = 1e-3;
  s.stride = 100;
  return s;
}

ExperimentSpec additive_spec(const std::string& name) {
  ExperimentSpec s = base_spec(name);
  s.inline_graph = bench_digraph();
  s.noise_spec = "additive:sigma=2";
  s.tau1 = 0.2;
  return s;
}

ExperimentSpec mult_spec(const std::string& name, double k, double tau1, double tau2) {
  ExperimentSpec s = base_spec(name);
  s.inline_graph = bench_path_graph();
  s.noise_spec = "mult-linear:sigma=2,bar=2";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "const:k=%.17g", k);
  s.gain_spec = buf;
  s.tau1 = tau1;
  s.tau2 = tau2;
  return s;
}

}  // namespace

ExperimentSpec scenario(const std::string& id) {
  if (id == "fig1") {
    ExperimentSpec s = additive_spec(id);
    s.gain_spec = "power:a=1,beta=1";
    s.horizon = 200;
    s.trials = 100;
    s.seed = 101;
    return s;
  }
  if (id == "fig2") {
    ExperimentSpec s = additive_spec(id);
    s.gain_spec = one_third_beta();
    s.horizon = 200;
    s.trials = 500;
    s.seed = 102;
    return s;
  }
  if (id == "fig3") {
    ExperimentSpec s = mult_spec(id, 0.12, 0.2, 2.0);
    s.horizon = 100;
    s.trials = 200;
    s.seed = 103;
    return s;
  }
  if (id == "fig4") {
    ExperimentSpec s = mult_spec(id, 0.12, 0.2, 0.0);
    s.horizon = 100;
    s.trials = 200;
    s.seed = 104;
    return s;
  }
  if (id == "fig5") {
    ExperimentSpec s = mult_spec(id, 0.12, 0.2, 10.0);
    s.horizon = 150;
    s.trials = 200;
    s.seed = 105;
    return s;
  }
  if (id == "fig6") {
    ExperimentSpec s = mult_spec(id, 0.12, 0.2, 100.0);
    s.horizon = 300;
    s.trials = 200;
    s.seed = 106;
    return s;
  }
  if (id == "fig7") {
    ExperimentSpec s = mult_spec(id, 0.12, 3.5, 0.0);
    s.horizon = 50;
    s.trials = 50;
    s.seed = 107;
    return s;
  }
  if (id == "fig8") {
    ExperimentSpec s = mult_spec(id, 0.013, 3.5, 0.0);
    s.horizon = 400;
    s.trials = 100;
    s.seed = 108;
    return s;
  }
  throw UnknownScenario("unknown scenario '" + id + "' (known: fig1..fig8)");
}

std::vector<std::string> scenario_ids() {
  return {"fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8"};
}

}  // namespace dcns
