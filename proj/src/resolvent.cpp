#include "dcns/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dcns/errors.hpp"

namespace dcns {

bool ResolventProblem::feasible() const { return feasibility_margin() > 0; }

double ResolventProblem::feasibility_margin() const {
  if (!(lambda.real() > 0)) return -std::numeric_limits<double>::infinity();
  return 1.0 - tau1 * gain_bound() * std::norm(lambda) / lambda.real();
}

namespace {

using cplx = std::complex<double>;

// Cubic Hermite value on [0, 1] from endpoint values and derivatives.
cplx hermite(double th, const cplx& y0, const cplx& f0, const cplx& y1, const cplx& f1,
             double dt) {
  const double th2 = th * th, th3 = th2 * th;
  return (2 * th3 - 3 * th2 + 1) * y0 + (th3 - 2 * th2 + th) * dt * f0 +
         (-2 * th3 + 3 * th2) * y1 + (th3 - th2) * dt * f1;
}

}  // namespace

ResolventPath solve_resolvent(const ResolventProblem& p, double s, double t_end, double dt) {
  if (!(dt > 0)) throw ConfigError("resolvent dt must be positive");
  if (!(t_end > s)) throw ConfigError("resolvent horizon must exceed the start time");
  const auto n_steps = std::llround((t_end - s) / dt);
  if (n_steps < 1 || std::abs((t_end - s) - static_cast<double>(n_steps) * dt) >
                         1e-9 * std::max(1.0, t_end - s))
    throw ConfigError("resolvent horizon must be an integer multiple of dt");
  const auto lag = std::llround(p.tau1 / dt);
  if (p.tau1 < 0 || std::abs(p.tau1 - static_cast<double>(lag) * dt) > 1e-9 * std::max(1.0, p.tau1))
    throw ConfigError("resolvent dt must divide tau1");

  ResolventPath path;
  path.times.resize(static_cast<std::size_t>(n_steps) + 1);
  path.gamma.resize(static_cast<std::size_t>(n_steps) + 1);
  for (std::int64_t j = 0; j <= n_steps; ++j)
    path.times[static_cast<std::size_t>(j)] = s + static_cast<double>(j) * dt;
  auto& g = path.gamma;
  const cplx lam = p.lambda;

  if (lag == 0) {
    // Undelayed linear ODE; classic fourth-order Runge-Kutta.
    g[0] = 1.0;
    for (std::int64_t j = 0; j < n_steps; ++j) {
      const double t = path.times[static_cast<std::size_t>(j)];
      const cplx y = g[static_cast<std::size_t>(j)];
      const double cm = p.gain(t + 0.5 * dt), ce = p.gain(t + dt);
      const cplx k1 = -lam * p.gain(t) * y;
      const cplx k2 = -lam * cm * (y + 0.5 * dt * k1);
      const cplx k3 = -lam * cm * (y + 0.5 * dt * k2);
      const cplx k4 = -lam * ce * (y + dt * k3);
      g[static_cast<std::size_t>(j + 1)] = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return path;
  }

  // The right side depends on the solution one lag back only, so each step is
  // a Simpson quadrature of a known function; the delayed value at half-steps
  // comes from a cubic Hermite patch of the already computed history.
  std::vector<cplx> f(g.size(), cplx(0.0, 0.0));  // stored derivative at nodes
  const std::int64_t preset = std::min(lag, n_steps);
  for (std::int64_t j = 0; j <= preset; ++j) g[static_cast<std::size_t>(j)] = 1.0;
  if (lag <= n_steps) f[static_cast<std::size_t>(lag)] = -lam * p.gain(s + p.tau1);

  // Delayed value at v = u - tau1; zero before the start, Hermite inside.
  auto delayed = [&](double v) -> cplx {
    if (v < s) return cplx(0.0, 0.0);
    const auto idx = static_cast<std::int64_t>(std::floor((v - s) / dt + 1e-9));
    const double th = (v - s) / dt - static_cast<double>(idx);
    const auto i0 = static_cast<std::size_t>(idx);
    // d/dt jumps where the delayed argument crosses the start; use the left
    // limit (zero) for the right end of the interval ahead of that node.
    const cplx f1 = (idx + 1 == lag) ? cplx(0.0, 0.0) : f[i0 + 1];
    return hermite(th, g[i0], f[i0], g[i0 + 1], f1, dt);
  };

  for (std::int64_t j = lag; j < n_steps; ++j) {
    const double t = path.times[static_cast<std::size_t>(j)];
    const cplx f_mid = -lam * p.gain(t + 0.5 * dt) * delayed(t + 0.5 * dt - p.tau1);
    const cplx g_back = g[static_cast<std::size_t>(j + 1 - lag)];
    const cplx f_next = -lam * p.gain(t + dt) * g_back;
    g[static_cast<std::size_t>(j + 1)] =
        g[static_cast<std::size_t>(j)] +
        dt / 6.0 * (f[static_cast<std::size_t>(j)] + 4.0 * f_mid + f_next);
    f[static_cast<std::size_t>(j + 1)] = f_next;
  }
  return path;
}

DecayRate decay_rate(const ResolventProblem& p) {
  if (!(p.lambda.real() > 0)) throw Infeasible("decay rate needs Re(lambda) > 0");
  DecayRate out;
  if (p.tau1 == 0) {
    out.rho1 = 2.0 * p.lambda.real();
    out.rho2 = std::numeric_limits<double>::infinity();
    out.rho = out.rho1;
    out.fitted_b = 1.0;
    return out;
  }
  const double cbar = p.gain_bound();
  const double margin = p.feasibility_margin();
  if (!(margin > 0))
    throw Infeasible("small-delay hypothesis fails: tau1 * cbar * |lambda|^2 / Re(lambda) = " +
                     std::to_string(1.0 - margin));

  const double n2 = std::norm(p.lambda);      // |lambda|^2
  const double mag = std::sqrt(n2);
  const double a = 3.0 * n2 * p.tau1 * p.tau1 * cbar * cbar;
  const double rhs = 2.0 * (p.lambda.real() - n2 * p.tau1 * cbar);  // > 0 by feasibility
  auto eq = [&](double rho) { return a * rho * std::exp(rho * cbar * p.tau1) + 2.0 * rho - rhs; };

  double hi = 1.0;
  while (eq(hi) <= 0) {
    hi *= 2.0;
    if (hi > 1e6) throw Infeasible("rate equation has no root below 1e6");
  }
  double lo = hi > 1.0 ? hi / 2.0 : 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (eq(mid) <= 0 ? lo : hi) = mid;
  }
  out.rho1 = 0.5 * (lo + hi);
  out.rho2 = std::log(1.0 / (mag * cbar * p.tau1)) / (cbar * p.tau1);
  out.rho = std::min(out.rho1, out.rho2);

  const double horizon =
      p.t0 + std::clamp(std::max(30.0 * p.tau1, 6.0 / (out.rho * cbar)), 1.0, 500.0);
  out.fitted_b = verify_envelope(p, out, horizon).b_fit;
  return out;
}

EnvelopeCheck verify_envelope(const ResolventProblem& p, const DecayRate& rate, double horizon) {
  const double s = p.t0;
  if (!(horizon > s)) throw ConfigError("envelope horizon must exceed t0");
  double dt;
  std::int64_t n_steps;
  if (p.tau1 > 0) {
    const auto m = std::clamp<std::int64_t>(std::llround(p.tau1 * 100.0), 8, 1024);
    dt = p.tau1 / static_cast<double>(m);
    n_steps = static_cast<std::int64_t>(std::ceil((horizon - s) / dt - 1e-9));
  } else {
    n_steps = 10000;
    dt = (horizon - s) / static_cast<double>(n_steps);
  }
  const double t_end = s + static_cast<double>(n_steps) * dt;
  const ResolventPath path = solve_resolvent(p, s, t_end, dt);

  EnvelopeCheck chk;
  std::vector<double> env(path.gamma.size());
  double cum = 0.0;  // integral of c from s, accumulated in closed form
  for (std::size_t j = 0; j < path.gamma.size(); ++j) {
    if (j > 0) cum += p.gain.integral(path.times[j - 1], path.times[j]);
    env[j] = std::norm(path.gamma[j]) * std::exp(rate.rho * cum);
    chk.b_fit = std::max(chk.b_fit, env[j]);
  }
  const std::size_t n = env.size();
  const std::size_t cut1 = n / 5, cut2 = (3 * n) / 5;
  double mid = 0.0, tail = 0.0;
  for (std::size_t j = cut1; j < cut2; ++j) mid = std::max(mid, env[j]);
  for (std::size_t j = cut2; j < n; ++j) tail = std::max(tail, env[j]);
  chk.holds = std::isfinite(chk.b_fit) && tail <= mid * (1.0 + 1e-9) + 1e-300;
  return chk;
}

}  // namespace dcns
