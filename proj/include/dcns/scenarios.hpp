#pragma once

#include <string>
#include <vector>

#include "dcns/experiment.hpp"

namespace dcns {

/// Four-agent benchmark digraph: a chain 2-3-4 coupled both ways plus agent 1
/// listening to agent 2; has a spanning tree, nonzero eigenvalues {1, 1, 3}.
[[nodiscard]] Digraph bench_digraph();

/// Undirected variant (adds the 2->1 feedback): path graph on four agents
/// with eigenvalues 2 -/+ sqrt(2) at the extremes.
[[nodiscard]] Digraph bench_path_graph();

/// Built-in experiment presets fig1..fig8; throws UnknownScenario otherwise.
[[nodiscard]] ExperimentSpec scenario(const std::string& id);

[[nodiscard]] std::vector<std::string> scenario_ids();

}  // namespace dcns
