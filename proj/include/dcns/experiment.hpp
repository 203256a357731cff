#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dcns/graph.hpp"
#include "dcns/metrics.hpp"

namespace dcns {

/// One simulation campaign: graph source, protocol parameters, ensemble size,
/// and output location.  Loadable from a flat key=value file; every key can
/// also arrive as a CLI flag override.
struct ExperimentSpec {
  std::string name = "experiment";
  std::string graph_path;               // used unless inline_graph is set
  std::optional<Digraph> inline_graph;  // built-in graphs bypass the filesystem
  std::string gain_spec = "const:k=1";
  std::string noise_spec = "additive:sigma=0";
  double tau1 = 0, tau2 = 0, dt = 1e-3, horizon = 1;
  int trials = 1, stride = 100, threads = 1, n_dim = 1;
  std::uint64_t seed = 0;
  bool collect_lyapunov = false;
  std::vector<double> psi;  // constant history, n_agents * n_dim values
  std::string out_dir = ".";
};

/// Parses key=value lines ('#' comments); unknown keys raise ParseError.
[[nodiscard]] ExperimentSpec load_experiment(const std::string& path);

/// Applies one key=value pair; line is quoted in parse errors (0 for flags).
void apply_override(ExperimentSpec& spec, const std::string& key, const std::string& value,
                    int line = 0);

/// Resolves the graph from the inline copy or the graph file.
[[nodiscard]] Digraph experiment_graph(const ExperimentSpec& spec);

/// Assembles the simulator configuration; validates psi against the graph.
[[nodiscard]] SimConfig experiment_config(const ExperimentSpec& spec, const Digraph& g);

struct ExperimentResult {
  Digraph graph;
  EnsembleStats stats;
  Trajectory first_trial;
};

[[nodiscard]] ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Writes <name>_trajectory.csv, <name>_stats.csv, <name>_summary.json (and
/// <name>_lyapunov.csv when collected) under out_dir; returns the paths.
std::vector<std::string> write_outputs(const ExperimentSpec& spec, const ExperimentResult& res);

}  // namespace dcns
