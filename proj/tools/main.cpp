// =====================================================================
// dcns command line tool: check / design / resolvent / simulate / reproduce.
// =====================================================================
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dcns/design.hpp"
#include "dcns/errors.hpp"
#include "dcns/experiment.hpp"
#include "dcns/gain.hpp"
#include "dcns/graph.hpp"
#include "dcns/io.hpp"
#include "dcns/metrics.hpp"
#include "dcns/resolvent.hpp"
#include "dcns/scenarios.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitHypothesisFail = 1;
constexpr int kExitInputError = 2;
constexpr int kExitDiverged = 3;

std::string fmt(double v) { return dcns::format_double(v); }

std::string fmt_complex(std::complex<double> z) {
  if (std::abs(z.imag()) < 1e-12) return fmt(z.real());
  return fmt(z.real()) + (z.imag() >= 0 ? "+" : "-") + fmt(std::abs(z.imag())) + "i";
}

const char* verdict_name(dcns::Verdict v) {
  switch (v) {
    case dcns::Verdict::Holds: return "holds";
    case dcns::Verdict::Fails: return "fails";
    default: return "inconclusive";
  }
}

/// Slowest guaranteed decay rate across the nonzero spectrum; empty when any
/// eigenvalue is infeasible for the given delay/gain pair.
std::optional<double> slowest_decay_rate(const dcns::SpectralData& sd,
                                         const dcns::GainFunction& gain, double tau1,
                                         double t0) {
  double rho = std::numeric_limits<double>::infinity();
  for (const auto& ev : sd.nonzero_eigs) {
    dcns::ResolventProblem p{ev, gain, tau1, t0};
    if (!p.feasible()) return std::nullopt;
    rho = std::min(rho, dcns::decay_rate(p).rho);
  }
  if (!std::isfinite(rho)) return std::nullopt;
  return rho;
}

int cmd_check(const std::string& graph_path, const std::string& gain_spec, double tau1,
              double t0, const std::string& guarantee) {
  dcns::Digraph g = dcns::load_digraph(graph_path);
  dcns::SpectralData sd = dcns::spectral_decompose(g);
  dcns::GainFunction gain = dcns::GainFunction::parse(gain_spec);

  const double cbar = gain.tail_sup(t0);
  const double margin =
      sd.has_spanning_tree ? tau1 * cbar * sd.max_ratio()
                           : std::numeric_limits<double>::quiet_NaN();
  const bool margin_ok = sd.has_spanning_tree && margin < 1.0;

  std::optional<double> rho0;
  std::optional<double> rate_prime;
  if (margin_ok) {
    rho0 = slowest_decay_rate(sd, gain, tau1, t0);
    double lambda_bar = 0.0;
    for (const auto& ev : sd.nonzero_eigs) lambda_bar = std::max(lambda_bar, ev.real());
    if (lambda_bar > 0) rate_prime = 2.0 * lambda_bar;
  }
  dcns::ConditionReport rep = dcns::check_conditions(gain, rho0, rate_prime);

  std::cout << "graph: " << graph_path << "  agents: " << g.n << "\n";
  std::cout << "  spanning_tree: " << (sd.has_spanning_tree ? "yes" : "no")
            << "  undirected: " << (sd.is_undirected ? "yes" : "no")
            << "  balanced: " << (sd.is_balanced ? "yes" : "no") << "\n";
  std::cout << "  nonzero eigenvalues:";
  for (const auto& ev : sd.nonzero_eigs) std::cout << " " << fmt_complex(ev);
  std::cout << "\n  pi:";
  for (int i = 0; i < g.n; ++i) std::cout << " " << fmt(sd.pi(i));
  std::cout << "\n";
  std::cout << "gain: " << gain.describe() << "  sup on [t0,inf): " << fmt(cbar) << "\n";
  std::cout << "delay margin tau1*sup(c)*max|l|^2/Re(l): "
            << (sd.has_spanning_tree ? fmt(margin) : std::string("n/a"))
            << (margin_ok ? "  (< 1, ok)" : "  (needs < 1)") << "\n";
  std::cout << "decay rate rho0: " << (rho0 ? fmt(*rho0) : std::string("n/a")) << "\n";
  std::cout << "conditions:\n";
  std::cout << "  C1  (integral diverges):        " << verdict_name(rep.c1) << "\n";
  std::cout << "  C2  (square-integrable):        " << verdict_name(rep.c2) << "\n";
  std::cout << "  C3  (vanishing tail):           " << verdict_name(rep.c3) << "\n";
  std::cout << "  C4  (weighted tail, rate rho0): " << verdict_name(rep.c4) << "\n";
  std::cout << "  C4' (weighted tail, fast rate): " << verdict_name(rep.c4prime) << "\n";
  std::cout << "  C5  (c * log(int c) -> 0):      " << verdict_name(rep.c5);
  if (std::isfinite(rep.c5_limit)) std::cout << "  limit: " << fmt(rep.c5_limit);
  std::cout << "\n";

  const bool c1 = rep.c1 == dcns::Verdict::Holds;
  const bool c2 = rep.c2 == dcns::Verdict::Holds;
  const bool c3 = rep.c3 == dcns::Verdict::Holds;
  const bool c4 = rep.c4 == dcns::Verdict::Holds;
  const bool c5 = rep.c5 == dcns::Verdict::Holds;

  bool ok = false;
  std::string needs;
  if (guarantee == "deterministic") {
    ok = margin_ok;
    needs = "spanning tree and delay margin < 1";
  } else if (guarantee == "ms-weak") {
    ok = margin_ok && c1 && (c4 || c3);
    needs = "margin < 1, C1 and C4 (or C3)";
  } else if (guarantee == "ms-strong" || guarantee == "as-strong") {
    ok = margin_ok && c1 && c2;
    needs = "margin < 1, C1 and C2";
  } else if (guarantee == "as-weak") {
    ok = margin_ok && c1 && c5;
    needs = "margin < 1, C1 and C5";
  } else {
    throw dcns::ConfigError("unknown guarantee name: " + guarantee);
  }
  std::cout << "guarantee '" << guarantee << "' (" << needs << "): "
            << (ok ? "hypotheses hold" : "hypotheses FAIL") << "\n";
  return ok ? kExitOk : kExitHypothesisFail;
}

int cmd_design(const std::string& graph_path, const std::string& gain_spec, double tau1,
               double tau2, double t0, std::optional<double> k, double sigma_bar,
               std::optional<double> sigma_min) {
  dcns::Digraph g = dcns::load_digraph(graph_path);
  dcns::SpectralData sd = dcns::spectral_decompose(g);
  dcns::GainFunction gain = dcns::GainFunction::parse(gain_spec);

  std::cout << "graph: " << graph_path << "  agents: " << g.n
            << "  undirected: " << (sd.is_undirected ? "yes" : "no") << "\n";

  if (sd.has_spanning_tree) {
    auto [feasible, margin] = dcns::additive_delay_check(sd, gain, tau1, t0);
    std::cout << "additive path: margin " << fmt(margin) << " -> "
              << (feasible ? "feasible" : "infeasible") << "\n";
  } else {
    std::cout << "additive path: n/a (no spanning tree)\n";
  }

  const bool mult_ok = sd.is_undirected && sd.has_spanning_tree;
  if (mult_ok) {
    const double k_max = dcns::mult_gain_interval(sd, tau1, sigma_bar, g.n);
    std::cout << "multiplicative gain interval: (0, " << fmt(k_max) << ")\n";
    if (k) {
      if (*k > 0 && *k < k_max) {
        const double gamma = dcns::gamma_tau2(sd, *k, tau1, tau2, sigma_bar, g.n);
        std::cout << "decay exponent gamma(k=" << fmt(*k) << ", tau2=" << fmt(tau2)
                  << "): " << fmt(gamma) << "\n";
      } else {
        std::cout << "decay exponent: n/a (k=" << fmt(*k) << " outside (0, "
                  << fmt(k_max) << "))\n";
      }
    }
  } else {
    std::cout << "multiplicative gain interval: n/a (needs connected undirected graph)\n";
    if (k) std::cout << "decay exponent: n/a\n";
  }

  if (sigma_min) {
    std::cout << "necessity bound (gains above this cannot reach consensus): "
              << fmt(dcns::necessity_bound(*sigma_min, g.n)) << "\n";
  }
  return kExitOk;
}

int cmd_resolvent(double lambda_re, double lambda_im, const std::string& gain_spec,
                  double tau1, double t0, double horizon, double dt,
                  const std::string& out_path) {
  dcns::GainFunction gain = dcns::GainFunction::parse(gain_spec);
  dcns::ResolventProblem p{{lambda_re, lambda_im}, gain, tau1, t0};

  std::cout << "lambda: " << fmt_complex(p.lambda) << "  tau1: " << fmt(tau1)
            << "  gain: " << gain.describe() << "\n";
  std::cout << "feasibility margin 1 - tau1*sup(c)*|l|^2/Re(l): "
            << fmt(p.feasibility_margin()) << "\n";
  dcns::DecayRate rate = dcns::decay_rate(p);  // throws Infeasible when margin <= 0
  std::cout << "rho1 (transcendental root): " << fmt(rate.rho1) << "\n";
  std::cout << "rho2 (log bound):           " << fmt(rate.rho2) << "\n";
  std::cout << "rho  (guaranteed rate):     " << fmt(rate.rho) << "\n";
  std::cout << "envelope constant b:        " << fmt(rate.fitted_b) << "\n";

  double cbar = p.gain_bound();
  if (horizon <= 0)
    horizon = t0 + std::clamp(std::max(30.0 * tau1, 6.0 / (rate.rho * cbar)), 1.0, 500.0);
  dcns::EnvelopeCheck env = dcns::verify_envelope(p, rate, horizon);
  std::cout << "envelope |G|^2 <= b*exp(-rho*int c) on [" << fmt(t0) << ", "
            << fmt(horizon) << "]: " << (env.holds ? "holds" : "violated") << "\n";

  if (!out_path.empty()) {
    if (dt <= 0) {
      if (tau1 > 0) {
        auto m = std::clamp<long long>(std::llround(100.0 * tau1), 8, 1024);
        dt = tau1 / static_cast<double>(m);
      } else {
        dt = (horizon - t0) / 10000.0;
      }
    }
    const auto n_steps = static_cast<std::int64_t>(std::ceil((horizon - t0) / dt - 1e-9));
    const double t_end = t0 + static_cast<double>(n_steps) * dt;
    dcns::ResolventPath path = dcns::solve_resolvent(p, t0, t_end, dt);
    std::vector<double> envelope(path.times.size());
    for (std::size_t i = 0; i < path.times.size(); ++i) {
      double cum = gain.integral(t0, path.times[i]);
      envelope[i] = std::sqrt(env.b_fit) * std::exp(-0.5 * rate.rho * cum);
    }
    dcns::write_resolvent_csv(out_path, path, envelope);
    std::cout << "wrote " << out_path << "\n";
  }
  return kExitOk;
}

/// Funnels every set CLI flag through the same key=value override channel used
/// by config files, so validation lives in one place.
void apply_cli_overrides(dcns::ExperimentSpec& spec, const CLI::App* app,
                         const std::vector<std::pair<std::string, std::string*>>& opts) {
  for (const auto& [key, value] : opts) {
    if (app->count("--" + key) > 0) dcns::apply_override(spec, key, *value);
  }
}

int run_and_report(dcns::ExperimentSpec& spec) {
  dcns::ExperimentResult res = dcns::run_experiment(spec);
  dcns::write_outputs(spec, res);
  const auto& st = res.stats;
  const double t_final = st.times.back();
  std::cout << "experiment '" << spec.name << "': " << st.trials << " trials, t in [0, "
            << fmt(t_final) << "]\n";
  std::cout << "  ms disagreement at end:  " << fmt(st.ms_disagreement.back()) << "\n";
  std::cout << "  max pairwise ms at end:  " << fmt(st.max_pairwise_ms.back()) << "\n";
  std::cout << "  centroid variance at end: " << fmt(st.centroid_var.back()) << "\n";
  if (st.diverged_trials > 0)
    std::cout << "  DIVERGED trials: " << st.diverged_trials << "\n";
  std::cout << "outputs under " << spec.out_dir << "/" << spec.name << "_*\n";
  return st.diverged_trials > 0 ? kExitDiverged : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator and design checker for networked consensus with delayed, noisy links"};
  app.require_subcommand(1);

  // ----- check -----
  auto* check = app.add_subcommand("check", "Verify consensus hypotheses for a graph/gain/delay triple");
  std::string ck_graph, ck_gain = "const:k=1", ck_guarantee = "as-strong";
  double ck_tau1 = 0.0, ck_t0 = 0.0;
  check->add_option("--graph", ck_graph, "Graph file")->required();
  check->add_option("--gain", ck_gain, "Gain spec, e.g. const:k=1 | power:a=1,beta=0.5 | loginv:s=4 | table:FILE");
  check->add_option("--tau1", ck_tau1, "State delay");
  check->add_option("--t0", ck_t0, "Start time");
  check->add_option("--guarantee", ck_guarantee, "Guarantee to check")
      ->check(CLI::IsMember({"deterministic", "ms-weak", "ms-strong", "as-weak", "as-strong"}));

  // ----- design -----
  auto* design = app.add_subcommand("design", "Print gain intervals and decay exponents");
  std::string dg_graph, dg_gain = "const:k=1";
  double dg_tau1 = 0.0, dg_tau2 = 0.0, dg_t0 = 0.0, dg_sigma_bar = 0.0;
  double dg_k = 0.0, dg_sigma_min = 0.0;
  design->add_option("--graph", dg_graph, "Graph file")->required();
  design->add_option("--gain", dg_gain, "Gain spec (additive path)");
  design->add_option("--tau1", dg_tau1, "State delay");
  design->add_option("--tau2", dg_tau2, "Transmission delay");
  design->add_option("--t0", dg_t0, "Start time");
  design->add_option("--k", dg_k, "Constant gain to evaluate");
  design->add_option("--sigma-bar", dg_sigma_bar, "Noise intensity slope bound");
  design->add_option("--sigma-min", dg_sigma_min, "Least noise slope over active links");

  // ----- resolvent -----
  auto* resolvent = app.add_subcommand("resolvent", "Solve the scalar delayed resolvent and its decay bound");
  std::string rv_gain = "const:k=1", rv_out;
  double rv_re = 0.0, rv_im = 0.0, rv_tau1 = 0.0, rv_t0 = 0.0, rv_horizon = 0.0, rv_dt = 0.0;
  resolvent->add_option("--lambda-re", rv_re, "Eigenvalue real part")->required();
  resolvent->add_option("--lambda-im", rv_im, "Eigenvalue imaginary part");
  resolvent->add_option("--gain", rv_gain, "Gain spec");
  resolvent->add_option("--tau1", rv_tau1, "State delay");
  resolvent->add_option("--t0", rv_t0, "Start time");
  resolvent->add_option("--horizon", rv_horizon, "End time (0 = auto)");
  resolvent->add_option("--dt", rv_dt, "Step size (0 = auto)");
  resolvent->add_option("--out", rv_out, "CSV output path");

  // ----- simulate -----
  auto* simulate = app.add_subcommand("simulate", "Run a Monte Carlo ensemble from a config file and/or flags");
  std::string sm_config;
  simulate->add_option("--config", sm_config, "key=value config file");
  std::string sm_name, sm_graph, sm_gain, sm_noise, sm_tau1, sm_tau2, sm_dt, sm_horizon,
      sm_trials, sm_seed, sm_out, sm_stride, sm_threads, sm_psi, sm_n_dim, sm_lyapunov;
  const std::vector<std::pair<std::string, std::string*>> sm_opts = {
      {"name", &sm_name},       {"graph", &sm_graph},     {"gain", &sm_gain},
      {"noise", &sm_noise},     {"tau1", &sm_tau1},       {"tau2", &sm_tau2},
      {"dt", &sm_dt},           {"horizon", &sm_horizon}, {"trials", &sm_trials},
      {"seed", &sm_seed},       {"out", &sm_out},         {"stride", &sm_stride},
      {"threads", &sm_threads}, {"psi", &sm_psi},         {"n_dim", &sm_n_dim},
      {"lyapunov", &sm_lyapunov}};
  simulate->add_option("--name", sm_name, "Experiment name");
  simulate->add_option("--graph", sm_graph, "Graph file");
  simulate->add_option("--gain", sm_gain, "Gain spec");
  simulate->add_option("--noise", sm_noise, "Noise spec, e.g. additive:sigma=2 | mult-linear:sigma=2,bar=2 | none:n=4");
  simulate->add_option("--tau1", sm_tau1, "State delay");
  simulate->add_option("--tau2", sm_tau2, "Transmission delay");
  simulate->add_option("--dt", sm_dt, "Step size");
  simulate->add_option("--horizon", sm_horizon, "End time");
  simulate->add_option("--trials", sm_trials, "Trial count");
  simulate->add_option("--seed", sm_seed, "Base seed");
  simulate->add_option("--out", sm_out, "Output directory");
  simulate->add_option("--stride", sm_stride, "Recording stride in steps");
  simulate->add_option("--threads", sm_threads, "Worker threads");
  simulate->add_option("--psi", sm_psi, "Initial state, comma separated");
  simulate->add_option("--n_dim", sm_n_dim, "State dimension per agent");
  simulate->add_option("--lyapunov", sm_lyapunov, "Collect the delay functional (0/1)");

  // ----- reproduce -----
  auto* reproduce = app.add_subcommand("reproduce", "Re-run a packaged benchmark scenario");
  std::string rp_id;
  std::string rp_trials, rp_seed, rp_out, rp_horizon, rp_threads, rp_stride, rp_dt;
  std::string ids;
  for (const auto& s : dcns::scenario_ids()) ids += (ids.empty() ? "" : ", ") + s;
  reproduce->add_option("--scenario", rp_id, "One of: " + ids)->required();
  const std::vector<std::pair<std::string, std::string*>> rp_opts = {
      {"trials", &rp_trials}, {"seed", &rp_seed},       {"out", &rp_out},
      {"horizon", &rp_horizon}, {"threads", &rp_threads}, {"stride", &rp_stride},
      {"dt", &rp_dt}};
  reproduce->add_option("--trials", rp_trials, "Trial count override");
  reproduce->add_option("--seed", rp_seed, "Seed override");
  reproduce->add_option("--out", rp_out, "Output directory override");
  reproduce->add_option("--horizon", rp_horizon, "End time override");
  reproduce->add_option("--threads", rp_threads, "Worker threads");
  reproduce->add_option("--stride", rp_stride, "Recording stride override");
  reproduce->add_option("--dt", rp_dt, "Step size override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (check->parsed())
      return cmd_check(ck_graph, ck_gain, ck_tau1, ck_t0, ck_guarantee);
    if (design->parsed())
      return cmd_design(dg_graph, dg_gain, dg_tau1, dg_tau2, dg_t0,
                        design->count("--k") ? std::optional<double>(dg_k) : std::nullopt,
                        dg_sigma_bar,
                        design->count("--sigma-min") ? std::optional<double>(dg_sigma_min)
                                                     : std::nullopt);
    if (resolvent->parsed())
      return cmd_resolvent(rv_re, rv_im, rv_gain, rv_tau1, rv_t0, rv_horizon, rv_dt, rv_out);
    if (simulate->parsed()) {
      dcns::ExperimentSpec spec;
      if (!sm_config.empty()) spec = dcns::load_experiment(sm_config);
      apply_cli_overrides(spec, simulate, sm_opts);
      if (spec.graph_path.empty() && !spec.inline_graph)
        throw dcns::ConfigError("no graph given (use --graph or a config file)");
      return run_and_report(spec);
    }
    if (reproduce->parsed()) {
      dcns::ExperimentSpec spec = dcns::scenario(rp_id);
      apply_cli_overrides(spec, reproduce, rp_opts);
      return run_and_report(spec);
    }
  } catch (const dcns::Infeasible& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitHypothesisFail;
  } catch (const dcns::GainOutOfRange& e) {
    std::cerr << "gain out of range: " << e.what() << "\n";
    return kExitHypothesisFail;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitOk;
}
