#pragma once

#include <utility>

#include "dcns/gain.hpp"
#include "dcns/graph.hpp"

namespace dcns {

/// Small-delay feasibility for the decaying-gain protocol: the margin is
/// tau1 * cbar_t0 * max over nonzero modes of |lambda|^2 / Re(lambda), and the
/// check passes while it stays below 1.
[[nodiscard]] std::pair<bool, double> additive_delay_check(const SpectralData& sd,
                                                           const GainFunction& c, double tau1,
                                                           double t0);

/// Admissible constant-gain supremum for multiplicative noise on an undirected
/// connected graph: 1 / (lambda_N tau1 + ((N-1)/N) sigma_bar^2); +inf when the
/// denominator vanishes.
[[nodiscard]] double mult_gain_interval(const SpectralData& sd, double tau1, double sigma_bar,
                                        int n_agents);

/// Mean-square decay exponent: the unique positive root gamma of
///   2k(1 - ((N-1)/N) k sigma_bar^2 e^{gamma tau2} - lambda_N k tau1) lambda_2
///   - 2 gamma - 3 lambda_N^2 k^2 tau1^2 gamma e^{gamma tau1} = 0,
/// which is positive at 0 for k inside the admissible interval and strictly
/// decreasing in gamma.
[[nodiscard]] double gamma_tau2(const SpectralData& sd, double k, double tau1, double tau2,
                                double sigma_bar, int n_agents);

/// Upper gain bound that consensus requires (not merely suffices) under
/// all-positive linear noise with 2 tau2 >= tau1: N / (sigma_min^2 (N-1)).
[[nodiscard]] double necessity_bound(double sigma_min, int n_agents);

/// Row of the CLI design table.
struct DesignResult {
  bool additive_feasible = false;
  double additive_margin = 0;
  double mult_k_max = 0;
  double gamma = 0;
  double necessity_k_max = 0;
};

}  // namespace dcns
