#pragma once

#include <Eigen/Dense>
#include <vector>

#include "dcns/gain.hpp"
#include "dcns/graph.hpp"
#include "dcns/noise.hpp"
#include "dcns/sdde.hpp"

namespace dcns {

/// Deviation from the pi-weighted centroid: delta_i = x_i - sum_k pi_k x_k.
[[nodiscard]] Eigen::VectorXd disagreement(const Eigen::VectorXd& x, const Eigen::VectorXd& pi,
                                           int n_dim = 1);

/// Exact variance accumulated by the centroid martingale under additive noise:
/// n_dim * sum over edges of pi_i^2 sigma_ji^2 times the integral of c^2 on [0, t].
[[nodiscard]] double martingale_variance_oracle(const Digraph& g, const Eigen::VectorXd& pi,
                                                const NoiseModel& noise, const GainFunction& c,
                                                double t, int n_dim = 1);

/// Least-squares slope of log(values) against times on [burn_in, end].
/// Values are floored at 1e-300; a floored sample means the signal underflowed,
/// reported as -inf.  Fewer than two samples past burn_in give NaN.
[[nodiscard]] double fit_log_slope(const std::vector<double>& times,
                                   const std::vector<double>& values, double burn_in);

/// Pathwise decay exponent: slope of log ||delta(t)|| over the tail of a run.
[[nodiscard]] double as_rate_estimate(const Trajectory& traj, const Eigen::VectorXd& pi,
                                      double burn_in, int n_dim = 1);

struct LyapunovSample {
  double t = 0;
  double value = 0;
};

/// Mode coordinates (modes^T (x) I_ndim) x; one block per nonzero mode.
[[nodiscard]] Eigen::VectorXd project_modes(const Eigen::MatrixXd& modes,
                                            const Eigen::VectorXd& x, int n_dim = 1);
[[nodiscard]] Eigen::VectorXd project_modes(const SpectralData& sd, const Eigen::VectorXd& x,
                                            int n_dim = 1);

/// Delay functional over a dt-grid window of mode coordinates ending at time t:
/// the double integral of ||k Lambda delta||^2 across the trailing tau1 plus
/// the squared gap between delta(t) and its gain-weighted window integral.
/// Trapezoidal quadrature; exact for windows that are constant in time.
[[nodiscard]] LyapunovSample lyapunov_eval(const std::vector<Eigen::VectorXd>& window,
                                           const Eigen::VectorXd& lambdas, double k, double tau1,
                                           double dt, double t, int n_dim = 1);

/// Quantile with linear interpolation on the sorted sample; q in [0, 1].
[[nodiscard]] double quantile(std::vector<double> values, double q);

/// Time-pointwise ensemble statistics.  centroid_mean tracks the first state
/// component of the pi-centroid; centroid_var sums variances across components.
struct EnsembleStats {
  std::vector<double> times;
  std::vector<double> ms_disagreement;  // mean over trials of ||delta||^2
  std::vector<double> max_pairwise_ms;  // max over pairs of mean ||x_i - x_j||^2
  std::vector<double> centroid_mean;
  std::vector<double> centroid_var;
  std::vector<double> lyapunov_mean;  // empty unless SimConfig::collect_lyapunov
  std::vector<double> as_rates;       // per-trial slope fits, trial order
  double as_rate_median = 0, as_rate_q10 = 0, as_rate_q90 = 0;
  int trials = 0;
  int diverged_trials = 0;
};

/// Runs cfg.trials independent paths and aggregates the statistics above.
/// Per-trial rows are summed by an index-ordered pairwise reduction, so the
/// result is bit-identical for every thread count.  Needs a spanning tree.
[[nodiscard]] EnsembleStats simulate_ensemble(const Digraph& g, const SimConfig& cfg);

}  // namespace dcns
