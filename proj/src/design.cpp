#include "dcns/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dcns/errors.hpp"

namespace dcns {

std::pair<bool, double> additive_delay_check(const SpectralData& sd, const GainFunction& c,
                                             double tau1, double t0) {
  if (!sd.has_spanning_tree)
    throw NoSpanningTree("delay feasibility needs a spanning tree");
  if (tau1 < 0) throw ConfigError("tau1 must be nonnegative");
  const double margin = tau1 * c.tail_sup(t0) * sd.max_ratio();
  return {margin < 1.0, margin};
}

namespace {

void require_undirected_connected(const SpectralData& sd) {
  if (!sd.is_undirected)
    throw GraphNotUndirected("the constant-gain bounds need an undirected graph");
  if (!sd.has_spanning_tree)
    throw GraphNotConnected("the constant-gain bounds need a connected graph");
}

void require_agents(const SpectralData& sd, int n_agents) {
  if (n_agents < 2) throw ConfigError("need at least two agents");
  if (sd.laplacian.rows() != n_agents)
    throw ConfigError("n_agents does not match the decomposed graph");
}

}  // namespace

double mult_gain_interval(const SpectralData& sd, double tau1, double sigma_bar, int n_agents) {
  require_undirected_connected(sd);
  require_agents(sd, n_agents);
  if (tau1 < 0) throw ConfigError("tau1 must be nonnegative");
  if (sigma_bar < 0) throw ConfigError("sigma_bar must be nonnegative");
  const double nn = static_cast<double>(n_agents);
  const double den = sd.lambdaN * tau1 + (nn - 1.0) / nn * sigma_bar * sigma_bar;
  if (den <= 0) return std::numeric_limits<double>::infinity();
  return 1.0 / den;
}

double gamma_tau2(const SpectralData& sd, double k, double tau1, double tau2, double sigma_bar,
                  int n_agents) {
  const double k_max = mult_gain_interval(sd, tau1, sigma_bar, n_agents);
  if (!(k > 0) || k >= k_max)
    throw GainOutOfRange("gain " + std::to_string(k) + " outside (0, " + std::to_string(k_max) +
                         ")");
  if (tau2 < 0) throw ConfigError("tau2 must be nonnegative");
  const double nn = static_cast<double>(n_agents);
  const double l2 = sd.lambda2, ln = sd.lambdaN;
  auto lhs = [&](double gm) {
    return 2.0 * k *
               (1.0 - (nn - 1.0) / nn * k * sigma_bar * sigma_bar * std::exp(gm * tau2) -
                ln * k * tau1) *
               l2 -
           2.0 * gm - 3.0 * ln * ln * k * k * tau1 * tau1 * gm * std::exp(gm * tau1);
  };

  double hi = 1.0;
  while (lhs(hi) >= 0) {
    hi *= 2.0;
    if (hi > 1e6) throw ConfigError("decay exponent bracket exceeded 1e6");
  }
  double lo = hi > 1.0 ? hi / 2.0 : 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (lhs(mid) >= 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double necessity_bound(double sigma_min, int n_agents) {
  if (n_agents < 2) throw ConfigError("need at least two agents");
  if (sigma_min < 0) throw ConfigError("sigma_min must be nonnegative");
  if (sigma_min == 0) return std::numeric_limits<double>::infinity();
  const double nn = static_cast<double>(n_agents);
  return nn / (sigma_min * sigma_min * (nn - 1.0));
}

}  // namespace dcns
