#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <vector>

#include "dcns/gain.hpp"
#include "dcns/graph.hpp"
#include "dcns/noise.hpp"

namespace dcns {

/// Initial segment psi on [-tau, 0]; constant vector or samples on the dt grid.
class HistoryFunction {
 public:
  static HistoryFunction constant(Eigen::VectorXd x0);
  /// states[m] is psi at time -(states.size()-1-m)*dt, last entry = psi(0).
  static HistoryFunction tabulated(std::vector<Eigen::VectorXd> states, double dt);

  /// Value at t <= 0; tabulated histories throw HistoryUnderflow beyond cover.
  [[nodiscard]] const Eigen::VectorXd& at(double t) const;
  [[nodiscard]] const Eigen::VectorXd& initial() const;
  [[nodiscard]] bool covers(double tau) const;

 private:
  bool constant_ = true;
  double dt_ = 0;
  std::vector<Eigen::VectorXd> states_;
};

struct SimConfig {
  double tau1 = 0.0;           // state delay in the drift
  double tau2 = 0.0;           // state delay inside the noise intensity
  double dt = 1e-3;            // EM step; delays must be integer multiples
  double horizon = 1.0;        // final time T
  int n_dim = 1;               // per-agent state dimension
  int trials = 1;
  int stride = 100;            // record every stride-th step (plus the final one)
  int threads = 1;             // 0 = hardware concurrency
  std::uint64_t seed = 0;
  bool collect_lyapunov = false;
  double divergence_guard = 1e12;
  double burn_in_frac = 0.2;   // head fraction excluded from rate fits
  GainFunction gain = GainFunction::constant(1.0);
  NoiseModel noise = NoiseModel::additive_uniform(0.0, 2);
  HistoryFunction history = HistoryFunction::constant(Eigen::VectorXd::Zero(2));
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;  // stacked agent blocks, n*n_dim entries
  std::vector<double> lyapunov;         // filled when SimConfig::collect_lyapunov
  bool diverged = false;
  double diverged_at = std::numeric_limits<double>::quiet_NaN();
};

/// Drift of the consensus protocol: -c * (L (x) I_ndim) * x_tau1.
[[nodiscard]] Eigen::VectorXd drift_term(const Eigen::MatrixXd& laplacian, double c,
                                         const Eigen::VectorXd& x_tau1, int n_dim);

/// Noise increment: sum over channels of c * f_ji(delta_ji(x_tau2)) * dw.
[[nodiscard]] Eigen::VectorXd diffusion_term(const std::vector<Channel>& channels,
                                             const NoiseModel& noise, double c,
                                             const Eigen::VectorXd& x_tau2,
                                             const std::vector<double>& dw, int n_dim);

/// Euler-Maruyama integration of one trial (counter-based streams; the same
/// trial index always yields the same path, whatever the worker layout).
class Simulator {
 public:
  Simulator(const Digraph& g, SimConfig cfg);
  [[nodiscard]] Trajectory run(int trial) const;
  [[nodiscard]] const SimConfig& config() const { return cfg_; }
  [[nodiscard]] std::int64_t steps() const { return steps_; }
  [[nodiscard]] const std::vector<double>& gain_values() const { return c_; }

 private:
  Digraph g_;
  SimConfig cfg_;
  Eigen::MatrixXd lap_;
  std::vector<Channel> channels_;
  std::vector<double> c_;  // gain at every step
  std::int64_t steps_ = 0, lag1_ = 0, lag2_ = 0;
  Eigen::MatrixXd modes_;        // mode basis, only when collect_lyapunov
  Eigen::VectorXd mode_lambdas_; // matching nonzero eigenvalues
};

/// Single trajectory, trial 0.
[[nodiscard]] Trajectory simulate(const Digraph& g, const SimConfig& cfg);

}  // namespace dcns
