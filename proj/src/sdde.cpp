#include "dcns/sdde.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "dcns/errors.hpp"
#include "dcns/metrics.hpp"

namespace dcns {

// ===== history =====

HistoryFunction HistoryFunction::constant(Eigen::VectorXd x0) {
  HistoryFunction h;
  h.constant_ = true;
  h.states_.push_back(std::move(x0));
  return h;
}

HistoryFunction HistoryFunction::tabulated(std::vector<Eigen::VectorXd> states, double dt) {
  if (states.empty()) throw ConfigError("tabulated history needs at least one sample");
  if (!(dt > 0)) throw ConfigError("tabulated history needs dt > 0");
  for (const auto& s : states)
    if (s.size() != states.front().size())
      throw ConfigError("tabulated history samples must share one dimension");
  HistoryFunction h;
  h.constant_ = false;
  h.dt_ = dt;
  h.states_ = std::move(states);
  return h;
}

const Eigen::VectorXd& HistoryFunction::at(double t) const {
  if (constant_) return states_.front();
  const auto last = static_cast<std::int64_t>(states_.size()) - 1;
  const std::int64_t idx = last + std::llround(t / dt_);
  if (idx < 0) throw HistoryUnderflow("history queried at t = " + std::to_string(t) +
                                      " before its earliest sample");
  return states_[static_cast<std::size_t>(std::min(idx, last))];
}

const Eigen::VectorXd& HistoryFunction::initial() const { return states_.back(); }

bool HistoryFunction::covers(double tau) const {
  if (constant_) return true;
  const double span = dt_ * static_cast<double>(states_.size() - 1);
  return span >= tau - 1e-9 * std::max(1.0, tau);
}

// ===== vector field =====

Eigen::VectorXd drift_term(const Eigen::MatrixXd& laplacian, double c,
                           const Eigen::VectorXd& x_tau1, int n_dim) {
  const auto n = laplacian.rows();
  Eigen::Map<const Eigen::MatrixXd> x(x_tau1.data(), n_dim, n);
  Eigen::MatrixXd dx = -c * (x * laplacian.transpose());
  return Eigen::Map<Eigen::VectorXd>(dx.data(), dx.size());
}

Eigen::VectorXd diffusion_term(const std::vector<Channel>& channels, const NoiseModel& noise,
                               double c, const Eigen::VectorXd& x_tau2,
                               const std::vector<double>& dw, int n_dim) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(x_tau2.size());
  for (std::size_t q = 0; q < channels.size(); ++q) {
    const Channel& ch = channels[q];
    const Eigen::VectorXd delta =
        x_tau2.segment(ch.source * n_dim, n_dim) - x_tau2.segment(ch.receiver * n_dim, n_dim);
    out.segment(ch.receiver * n_dim, n_dim) += (c * dw[q]) * noise.intensity(ch, delta);
  }
  return out;
}

// ===== simulator =====

namespace {

// Nearest grid count for a duration, rejecting off-grid values.
std::int64_t grid_count(double span, double dt, const char* what) {
  const auto m = std::llround(span / dt);
  if (m < 0 || std::abs(span - static_cast<double>(m) * dt) > 1e-9 * std::max(1.0, span))
    throw ConfigError(std::string(what) + " must be a nonnegative integer multiple of dt");
  return m;
}

}  // namespace

Simulator::Simulator(const Digraph& g, SimConfig cfg) : g_(g), cfg_(std::move(cfg)) {
  g_.validate();
  if (!(cfg_.dt > 0)) throw ConfigError("dt must be positive");
  if (!(cfg_.horizon > 0)) throw ConfigError("horizon must be positive");
  if (cfg_.n_dim < 1) throw ConfigError("n_dim must be at least 1");
  if (cfg_.trials < 1) throw ConfigError("trials must be at least 1");
  if (cfg_.stride < 1) throw ConfigError("stride must be at least 1");
  if (!(cfg_.divergence_guard > 0)) throw ConfigError("divergence guard must be positive");
  if (cfg_.tau1 < 0 || cfg_.tau2 < 0) throw ConfigError("delays must be nonnegative");

  steps_ = grid_count(cfg_.horizon, cfg_.dt, "horizon");
  if (steps_ < 1) throw ConfigError("horizon must cover at least one step");
  lag1_ = grid_count(cfg_.tau1, cfg_.dt, "tau1");
  lag2_ = grid_count(cfg_.tau2, cfg_.dt, "tau2");

  const auto dim = static_cast<Eigen::Index>(g_.n) * cfg_.n_dim;
  if (cfg_.history.initial().size() != dim)
    throw ConfigError("history dimension " + std::to_string(cfg_.history.initial().size()) +
                      " does not match n_agents * n_dim = " + std::to_string(dim));
  if (!cfg_.history.covers(std::max(cfg_.tau1, cfg_.tau2)))
    throw ConfigError("history does not cover the longest delay");
  if (cfg_.noise.kind() != NoiseModel::Kind::MultCustom &&
      cfg_.noise.sigma_matrix().rows() != g_.n)
    throw ConfigError("noise sigma matrix size does not match the agent count");

  lap_ = build_laplacian(g_);
  channels_ = active_channels(g_);

  c_.resize(static_cast<std::size_t>(steps_));
  for (std::int64_t m = 0; m < steps_; ++m)
    c_[static_cast<std::size_t>(m)] = cfg_.gain(static_cast<double>(m) * cfg_.dt);

  if (cfg_.collect_lyapunov) {
    if (cfg_.gain.family() != GainFunction::Family::Constant)
      throw ConfigError("lyapunov collection requires a constant gain");
    SpectralData sd = spectral_decompose(g_);
    if (!sd.is_undirected)
      throw ConfigError("lyapunov collection requires an undirected graph");
    modes_ = sd.modes;
    mode_lambdas_.resize(static_cast<Eigen::Index>(sd.nonzero_eigs.size()));
    for (std::size_t i = 0; i < sd.nonzero_eigs.size(); ++i)
      mode_lambdas_[static_cast<Eigen::Index>(i)] = sd.nonzero_eigs[i].real();
  }
}

Trajectory Simulator::run(int trial) const {
  if (trial < 0 || trial >= cfg_.trials)
    throw ConfigError("trial index out of range");

  const int n_dim = cfg_.n_dim;
  const std::int64_t lag_max = std::max(lag1_, lag2_);
  const std::int64_t ring = lag_max + 1;
  const double sqrt_dt = std::sqrt(cfg_.dt);

  std::vector<Eigen::VectorXd> buf(static_cast<std::size_t>(ring));
  for (std::int64_t r = 0; r < ring; ++r)
    buf[static_cast<std::size_t>(r)] =
        cfg_.history.at(-static_cast<double>(lag_max - r) * cfg_.dt);
  std::int64_t cur = lag_max;  // slot of x at the current step

  Trajectory traj;
  const auto n_records = static_cast<std::size_t>(steps_ / cfg_.stride + 2);
  traj.times.reserve(n_records);
  traj.states.reserve(n_records);
  if (cfg_.collect_lyapunov) traj.lyapunov.reserve(n_records);

  auto slot = [&](std::int64_t back) -> const Eigen::VectorXd& {
    return buf[static_cast<std::size_t>((cur - back + ring) % ring)];
  };

  auto record = [&](std::int64_t m) {
    const double t = static_cast<double>(m) * cfg_.dt;
    traj.times.push_back(t);
    traj.states.push_back(buf[static_cast<std::size_t>(cur)]);
    if (cfg_.collect_lyapunov) {
      std::vector<Eigen::VectorXd> window;
      window.reserve(static_cast<std::size_t>(lag1_ + 1));
      for (std::int64_t back = lag1_; back >= 0; --back)
        window.push_back(project_modes(modes_, slot(back), n_dim));
      traj.lyapunov.push_back(
          lyapunov_eval(window, mode_lambdas_, cfg_.gain.k, cfg_.tau1, cfg_.dt, t, n_dim).value);
    }
  };

  record(0);

  std::vector<double> dw(channels_.size(), 0.0);
  const NoiseStream stream_base{cfg_.seed, static_cast<std::uint32_t>(trial), 0};

  for (std::int64_t m = 0; m < steps_; ++m) {
    const double c = c_[static_cast<std::size_t>(m)];
    const Eigen::VectorXd& x_cur = buf[static_cast<std::size_t>(cur)];
    Eigen::VectorXd x_next;
    if (!traj.diverged) {
      const Eigen::VectorXd& x_t1 = slot(lag1_);
      const Eigen::VectorXd& x_t2 = slot(lag2_);
      for (std::size_t q = 0; q < channels_.size(); ++q) {
        NoiseStream s = stream_base;
        s.channel = static_cast<std::uint32_t>(q);
        dw[q] = normal_draw(s, static_cast<std::uint64_t>(m)) * sqrt_dt;
      }
      x_next = x_cur + cfg_.dt * drift_term(lap_, c, x_t1, n_dim) +
               diffusion_term(channels_, cfg_.noise, c, x_t2, dw, n_dim);
      if (!x_next.allFinite() || x_next.cwiseAbs().maxCoeff() > cfg_.divergence_guard) {
        traj.diverged = true;
        traj.diverged_at = static_cast<double>(m + 1) * cfg_.dt;
        x_next = x_cur;  // freeze at the last finite state
      }
    } else {
      x_next = x_cur;
    }
    cur = (cur + 1) % ring;
    buf[static_cast<std::size_t>(cur)] = std::move(x_next);
    if ((m + 1) % cfg_.stride == 0 || m + 1 == steps_) record(m + 1);
  }
  return traj;
}

Trajectory simulate(const Digraph& g, const SimConfig& cfg) {
  return Simulator(g, cfg).run(0);
}

}  // namespace dcns
