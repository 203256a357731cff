#include "dcns/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>

#include "dcns/errors.hpp"

namespace dcns {

Eigen::VectorXd disagreement(const Eigen::VectorXd& x, const Eigen::VectorXd& pi, int n_dim) {
  const auto n = pi.size();
  if (x.size() != n * n_dim)
    throw ConfigError("state dimension does not match the agent count times n_dim");
  Eigen::Map<const Eigen::MatrixXd> xm(x.data(), n_dim, n);
  const Eigen::VectorXd centroid = xm * pi;
  Eigen::MatrixXd d = xm.colwise() - centroid;
  return Eigen::Map<Eigen::VectorXd>(d.data(), d.size());
}

double martingale_variance_oracle(const Digraph& g, const Eigen::VectorXd& pi,
                                  const NoiseModel& noise, const GainFunction& c, double t,
                                  int n_dim) {
  if (noise.kind() != NoiseModel::Kind::Additive)
    throw ConfigError("the variance oracle is exact only for additive noise");
  if (pi.size() != g.n) throw ConfigError("pi size does not match the graph");
  double coef = 0.0;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      if (g.adj(i, j) != 0) {
        const double s = noise.sigma(j, i);
        coef += pi[i] * pi[i] * s * s;
      }
  return static_cast<double>(n_dim) * coef * c.square_integral(0.0, t);
}

double fit_log_slope(const std::vector<double>& times, const std::vector<double>& values,
                     double burn_in) {
  if (times.size() != values.size()) throw ConfigError("times and values must align");
  double st = 0, sy = 0, stt = 0, sty = 0;
  std::int64_t count = 0;
  bool underflow = false;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < burn_in) continue;
    if (!(values[i] > 1e-300)) underflow = true;
    const double y = std::log(std::max(values[i], 1e-300));
    st += times[i];
    sy += y;
    stt += times[i] * times[i];
    sty += times[i] * y;
    ++count;
  }
  if (count < 2) return std::numeric_limits<double>::quiet_NaN();
  if (underflow) return -std::numeric_limits<double>::infinity();
  const double den = static_cast<double>(count) * stt - st * st;
  if (den <= 0) return std::numeric_limits<double>::quiet_NaN();
  return (static_cast<double>(count) * sty - st * sy) / den;
}

double as_rate_estimate(const Trajectory& traj, const Eigen::VectorXd& pi, double burn_in,
                        int n_dim) {
  std::vector<double> norms(traj.states.size());
  for (std::size_t i = 0; i < traj.states.size(); ++i)
    norms[i] = disagreement(traj.states[i], pi, n_dim).norm();
  return fit_log_slope(traj.times, norms, burn_in);
}

Eigen::VectorXd project_modes(const Eigen::MatrixXd& modes, const Eigen::VectorXd& x, int n_dim) {
  const auto n = modes.rows();
  if (x.size() != n * n_dim)
    throw ConfigError("state dimension does not match the mode basis times n_dim");
  Eigen::Map<const Eigen::MatrixXd> xm(x.data(), n_dim, n);
  Eigen::MatrixXd d = xm * modes;
  return Eigen::Map<Eigen::VectorXd>(d.data(), d.size());
}

Eigen::VectorXd project_modes(const SpectralData& sd, const Eigen::VectorXd& x, int n_dim) {
  if (!sd.is_undirected)
    throw GraphNotUndirected("mode projection needs an undirected spectrum");
  return project_modes(sd.modes, x, n_dim);
}

LyapunovSample lyapunov_eval(const std::vector<Eigen::VectorXd>& window,
                             const Eigen::VectorXd& lambdas, double k, double tau1, double dt,
                             double t, int n_dim) {
  if (window.empty()) throw HistoryUnderflow("lyapunov window is empty");
  const auto n_modes = lambdas.size();
  for (const auto& w : window)
    if (w.size() != n_modes * n_dim)
      throw ConfigError("lyapunov window entries must hold mode coordinates");

  auto lam_apply = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd out(v.size());
    for (Eigen::Index m = 0; m < n_modes; ++m)
      out.segment(m * n_dim, n_dim) = lambdas[m] * v.segment(m * n_dim, n_dim);
    return out;
  };

  const auto lag = tau1 > 0 ? std::llround(tau1 / dt) : 0;
  const auto& cur = window.back();
  if (lag == 0) return {t, cur.squaredNorm()};
  if (window.size() < static_cast<std::size_t>(lag) + 1)
    throw HistoryUnderflow("lyapunov window shorter than tau1");
  const std::size_t lo = window.size() - static_cast<std::size_t>(lag) - 1;

  // Swapped-order form of the double integral: integrate
  // (theta - t + tau1) * ||k Lambda delta(theta)||^2 across the trailing tau1.
  double term1 = 0.0;
  Eigen::VectorXd integral = Eigen::VectorXd::Zero(cur.size());
  for (std::size_t r = lo; r < window.size(); ++r) {
    const double wgt = (r == lo || r + 1 == window.size()) ? 0.5 : 1.0;
    const double ramp = static_cast<double>(r - lo) * dt;
    term1 += wgt * ramp * (k * k) * lam_apply(window[r]).squaredNorm();
    integral += wgt * window[r];
  }
  term1 *= dt;
  integral *= dt;
  const Eigen::VectorXd endpoint = cur - k * lam_apply(integral);
  return {t, term1 + endpoint.squaredNorm()};
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw ConfigError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  q = std::clamp(q, 0.0, 1.0);
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double f = pos - static_cast<double>(lo);
  return values[lo] * (1.0 - f) + values[hi] * f;
}

// ===== ensemble =====

namespace {

// rows[0] accumulates the sum of all rows, pairing indices by distance.
void pairwise_reduce(std::vector<std::vector<double>>& rows) {
  const std::size_t k = rows.size();
  for (std::size_t gap = 1; gap < k; gap *= 2)
    for (std::size_t i = 0; i + gap < k; i += 2 * gap) {
      auto& a = rows[i];
      const auto& b = rows[i + gap];
      for (std::size_t j = 0; j < a.size(); ++j) a[j] += b[j];
    }
}

void run_trials(int threads, int count, const std::function<void(int)>& body) {
  if (threads == 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace

EnsembleStats simulate_ensemble(const Digraph& g, const SimConfig& cfg) {
  const Simulator sim(g, cfg);
  const SpectralData sd = spectral_decompose(g);
  const Eigen::VectorXd pi = sd.pi;
  const int n = g.n;
  const int n_dim = cfg.n_dim;
  const int trials = cfg.trials;

  std::vector<std::int64_t> rec_steps{0};
  for (std::int64_t m = 1; m <= sim.steps(); ++m)
    if (m % cfg.stride == 0 || m == sim.steps()) rec_steps.push_back(m);
  const std::size_t n_rec = rec_steps.size();

  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  const std::size_t n_pairs = pairs.size();

  // flattened per-trial sums: ms | pair blocks | centroid | centroid^2 | V | flag
  const std::size_t pair_off = n_rec;
  const std::size_t cen_off = pair_off + n_pairs * n_rec;
  const std::size_t cen2_off = cen_off + static_cast<std::size_t>(n_dim) * n_rec;
  const std::size_t ly_off = cen2_off + static_cast<std::size_t>(n_dim) * n_rec;
  const std::size_t flag_off = ly_off + (cfg.collect_lyapunov ? n_rec : 0);
  const std::size_t row_len = flag_off + 1;

  std::vector<std::vector<double>> rows(static_cast<std::size_t>(trials));
  std::vector<double> as_rates(static_cast<std::size_t>(trials));
  const double burn_in = cfg.burn_in_frac * cfg.horizon;

  run_trials(cfg.threads, trials, [&](int trial) {
    const Trajectory tr = sim.run(trial);
    auto& row = rows[static_cast<std::size_t>(trial)];
    row.assign(row_len, 0.0);
    for (std::size_t r = 0; r < n_rec; ++r) {
      const Eigen::VectorXd& x = tr.states[r];
      row[r] = disagreement(x, pi, n_dim).squaredNorm();
      for (std::size_t p = 0; p < n_pairs; ++p)
        row[pair_off + p * n_rec + r] = (x.segment(pairs[p].first * n_dim, n_dim) -
                                         x.segment(pairs[p].second * n_dim, n_dim))
                                            .squaredNorm();
      Eigen::Map<const Eigen::MatrixXd> xm(x.data(), n_dim, n);
      const Eigen::VectorXd cen = xm * pi;
      for (int d = 0; d < n_dim; ++d) {
        row[cen_off + static_cast<std::size_t>(d) * n_rec + r] = cen[d];
        row[cen2_off + static_cast<std::size_t>(d) * n_rec + r] = cen[d] * cen[d];
      }
      if (cfg.collect_lyapunov) row[ly_off + r] = tr.lyapunov[r];
    }
    row[flag_off] = tr.diverged ? 1.0 : 0.0;
    as_rates[static_cast<std::size_t>(trial)] = as_rate_estimate(tr, pi, burn_in, n_dim);
  });

  pairwise_reduce(rows);
  const auto& tot = rows.front();
  const auto kd = static_cast<double>(trials);

  EnsembleStats stats;
  stats.trials = trials;
  stats.diverged_trials = static_cast<int>(std::llround(tot[flag_off]));
  stats.times.resize(n_rec);
  stats.ms_disagreement.resize(n_rec);
  stats.max_pairwise_ms.resize(n_rec);
  stats.centroid_mean.resize(n_rec);
  stats.centroid_var.resize(n_rec);
  if (cfg.collect_lyapunov) stats.lyapunov_mean.resize(n_rec);
  for (std::size_t r = 0; r < n_rec; ++r) {
    stats.times[r] = static_cast<double>(rec_steps[r]) * cfg.dt;
    stats.ms_disagreement[r] = tot[r] / kd;
    double worst = 0.0;
    for (std::size_t p = 0; p < n_pairs; ++p)
      worst = std::max(worst, tot[pair_off + p * n_rec + r] / kd);
    stats.max_pairwise_ms[r] = worst;
    stats.centroid_mean[r] = tot[cen_off + r] / kd;
    double var = 0.0;
    if (trials > 1)
      for (int d = 0; d < n_dim; ++d) {
        const double s1 = tot[cen_off + static_cast<std::size_t>(d) * n_rec + r];
        const double s2 = tot[cen2_off + static_cast<std::size_t>(d) * n_rec + r];
        var += std::max(0.0, (s2 - s1 * s1 / kd) / (kd - 1.0));
      }
    stats.centroid_var[r] = var;
    if (cfg.collect_lyapunov) stats.lyapunov_mean[r] = tot[ly_off + r] / kd;
  }

  stats.as_rates = as_rates;
  std::vector<double> finite_rates;
  finite_rates.reserve(as_rates.size());
  for (double v : as_rates)
    if (!std::isnan(v)) finite_rates.push_back(v);
  if (finite_rates.empty()) {
    stats.as_rate_median = stats.as_rate_q10 = stats.as_rate_q90 =
        std::numeric_limits<double>::quiet_NaN();
  } else {
    stats.as_rate_median = quantile(finite_rates, 0.5);
    stats.as_rate_q10 = quantile(finite_rates, 0.1);
    stats.as_rate_q90 = quantile(finite_rates, 0.9);
  }
  return stats;
}

}  // namespace dcns
