#include "dcns/experiment.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "dcns/errors.hpp"
#include "dcns/io.hpp"

namespace dcns {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v, int line) {
  try {
    std::size_t used = 0;
    const double out = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ParseError("value for '" + key + "' is not a number: " + v, line, 0);
  }
}

long long to_int(const std::string& key, const std::string& v, int line) {
  try {
    std::size_t used = 0;
    const long long out = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ParseError("value for '" + key + "' is not an integer: " + v, line, 0);
  }
}

std::vector<double> to_vector(const std::string& key, const std::string& v, int line) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item), line));
  if (out.empty()) throw ParseError("value for '" + key + "' is empty", line, 0);
  return out;
}

}  // namespace

void apply_override(ExperimentSpec& spec, const std::string& key, const std::string& value,
                    int line) {
  if (key == "name") spec.name = value;
  else if (key == "graph") spec.graph_path = value;
  else if (key == "gain") spec.gain_spec = value;
  else if (key == "noise") spec.noise_spec = value;
  else if (key == "tau1") spec.tau1 = to_double(key, value, line);
  else if (key == "tau2") spec.tau2 = to_double(key, value, line);
  else if (key == "dt") spec.dt = to_double(key, value, line);
  else if (key == "horizon") spec.horizon = to_double(key, value, line);
  else if (key == "trials") spec.trials = static_cast<int>(to_int(key, value, line));
  else if (key == "stride") spec.stride = static_cast<int>(to_int(key, value, line));
  else if (key == "threads") spec.threads = static_cast<int>(to_int(key, value, line));
  else if (key == "n_dim") spec.n_dim = static_cast<int>(to_int(key, value, line));
  else if (key == "seed") spec.seed = static_cast<std::uint64_t>(to_int(key, value, line));
  else if (key == "lyapunov") spec.collect_lyapunov = to_int(key, value, line) != 0;
  else if (key == "psi") spec.psi = to_vector(key, value, line);
  else if (key == "out") spec.out_dir = value;
  else throw ParseError("unknown config key '" + key + "'", line, 0);
}

ExperimentSpec load_experiment(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path);
  ExperimentSpec spec;
  std::string raw;
  int line = 0;
  while (std::getline(f, raw)) {
    ++line;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected key=value", line, 0);
    apply_override(spec, trim(s.substr(0, eq)), trim(s.substr(eq + 1)), line);
  }
  return spec;
}

Digraph experiment_graph(const ExperimentSpec& spec) {
  if (spec.inline_graph) return *spec.inline_graph;
  if (spec.graph_path.empty()) throw ConfigError("no graph given (set graph=<path>)");
  return load_digraph(spec.graph_path);
}

SimConfig experiment_config(const ExperimentSpec& spec, const Digraph& g) {
  SimConfig cfg;
  cfg.tau1 = spec.tau1;
  cfg.tau2 = spec.tau2;
  cfg.dt = spec.dt;
  cfg.horizon = spec.horizon;
  cfg.n_dim = spec.n_dim;
  cfg.trials = spec.trials;
  cfg.stride = spec.stride;
  cfg.threads = spec.threads;
  cfg.seed = spec.seed;
  cfg.collect_lyapunov = spec.collect_lyapunov;
  cfg.gain = GainFunction::parse(spec.gain_spec);
  cfg.noise = NoiseModel::parse(spec.noise_spec, g.n);
  if (spec.psi.empty()) throw ConfigError("psi (initial state) is required");
  if (spec.psi.size() != static_cast<std::size_t>(g.n) * spec.n_dim)
    throw ConfigError("psi needs n_agents * n_dim = " + std::to_string(g.n * spec.n_dim) +
                      " values, got " + std::to_string(spec.psi.size()));
  Eigen::VectorXd x0(static_cast<Eigen::Index>(spec.psi.size()));
  for (std::size_t i = 0; i < spec.psi.size(); ++i) x0[static_cast<Eigen::Index>(i)] = spec.psi[i];
  cfg.history = HistoryFunction::constant(std::move(x0));
  return cfg;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  ExperimentResult res;
  res.graph = experiment_graph(spec);
  const SimConfig cfg = experiment_config(spec, res.graph);
  res.stats = simulate_ensemble(res.graph, cfg);
  res.first_trial = Simulator(res.graph, cfg).run(0);
  return res;
}

std::vector<std::string> write_outputs(const ExperimentSpec& spec, const ExperimentResult& res) {
  namespace fs = std::filesystem;
  const fs::path dir(spec.out_dir.empty() ? "." : spec.out_dir);
  std::vector<std::string> written;

  const std::string traj_path = (dir / (spec.name + "_trajectory.csv")).string();
  write_trajectory_csv(traj_path, res.first_trial, res.graph.n, spec.n_dim);
  written.push_back(traj_path);

  const std::string stats_path = (dir / (spec.name + "_stats.csv")).string();
  write_stats_csv(stats_path, res.stats);
  written.push_back(stats_path);

  if (spec.collect_lyapunov) {
    const std::string ly_path = (dir / (spec.name + "_lyapunov.csv")).string();
    write_lyapunov_csv(ly_path, res.stats);
    written.push_back(ly_path);
  }

  nlohmann::ordered_json j;
  j["name"] = spec.name;
  j["graph"]["agents"] = res.graph.n;
  j["params"]["gain"] = spec.gain_spec;
  j["params"]["noise"] = spec.noise_spec;
  j["params"]["tau1"] = spec.tau1;
  j["params"]["tau2"] = spec.tau2;
  j["params"]["dt"] = spec.dt;
  j["params"]["horizon"] = spec.horizon;
  j["params"]["trials"] = spec.trials;
  j["params"]["seed"] = spec.seed;
  j["params"]["stride"] = spec.stride;
  j["params"]["n_dim"] = spec.n_dim;
  const auto& st = res.stats;
  j["results"]["final_time"] = st.times.back();
  j["results"]["final_ms_disagreement"] = st.ms_disagreement.back();
  j["results"]["final_max_pairwise_ms"] = st.max_pairwise_ms.back();
  j["results"]["final_centroid_mean"] = st.centroid_mean.back();
  j["results"]["final_centroid_var"] = st.centroid_var.back();
  j["results"]["as_rate_median"] = st.as_rate_median;
  j["results"]["as_rate_q10"] = st.as_rate_q10;
  j["results"]["as_rate_q90"] = st.as_rate_q90;
  j["results"]["diverged_trials"] = st.diverged_trials;

  const std::string sum_path = (dir / (spec.name + "_summary.json")).string();
  write_text(sum_path, j.dump() + "\n");
  written.push_back(sum_path);
  return written;
}

}  // namespace dcns
