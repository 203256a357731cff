#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "dcns/errors.hpp"

namespace dcns {

/// Directed graph on n agents with {0,1} weights.
/// adj(i, j) == 1 means agent i receives information from agent j.
struct Digraph {
  int n = 0;
  Eigen::MatrixXi adj;

  /// Build from a 1-based edge list; each pair (i, j) sets adj(i-1, j-1) = 1.
  static Digraph from_edges(int n_agents, const std::vector<std::pair<int, int>>& edges);

  /// Throws ConfigError unless adj is n x n, zero-diagonal and {0,1}-valued.
  void validate() const;
};

/// Spectral and structural summary of a digraph Laplacian.
struct SpectralData {
  Eigen::MatrixXd laplacian;                     // L = D - A, rows sum to zero
  Eigen::VectorXd pi;                            // left null vector, entries >= 0, sums to 1
  Eigen::VectorXd nu;                            // sqrt(n) * pi
  std::vector<std::complex<double>> nonzero_eigs;  // spectrum minus one structural zero
  bool has_spanning_tree = false;
  bool is_balanced = false;
  bool is_undirected = false;
  double lambda2 = 0.0;  // smallest nonzero eigenvalue, undirected graphs only
  double lambdaN = 0.0;  // largest eigenvalue, undirected graphs only
  // Orthonormal eigenvectors paired with nonzero_eigs; filled for undirected
  // graphs only, columns ordered by ascending eigenvalue.
  Eigen::MatrixXd modes;

  /// Worst ratio |lambda|^2 / Re(lambda) over the nonzero spectrum.
  [[nodiscard]] double max_ratio() const;
};

[[nodiscard]] Eigen::MatrixXd build_laplacian(const Digraph& g);

/// True when some root reaches every agent along information-flow edges.
[[nodiscard]] bool has_spanning_tree(const Digraph& g);

/// Full decomposition; throws DegenerateSpectrum when a spanning tree exists
/// but the solver cannot separate the structural zero by 1e-8.
[[nodiscard]] SpectralData spectral_decompose(const Digraph& g);

/// Parses "agents N" header plus 1-based "i j" edge lines.
[[nodiscard]] Digraph load_digraph(const std::string& path);
[[nodiscard]] Digraph parse_digraph(std::istream& in);

}  // namespace dcns
