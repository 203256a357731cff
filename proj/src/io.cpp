#include "dcns/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "dcns/errors.hpp"

namespace dcns {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
    if (ec) throw ConfigError("cannot create directory " + p.parent_path().string());
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open " + path + " for writing");
  return f;
}

}  // namespace

void write_trajectory_csv(const std::string& path, const Trajectory& traj, int n_agents,
                          int n_dim) {
  auto f = open_out(path);
  f << "t";
  for (int i = 1; i <= n_agents; ++i)
    for (int d = 1; d <= n_dim; ++d) f << ",agent_" << i << "_" << d;
  f << "\n";
  for (std::size_t r = 0; r < traj.times.size(); ++r) {
    f << format_double(traj.times[r]);
    const Eigen::VectorXd& x = traj.states[r];
    for (Eigen::Index j = 0; j < x.size(); ++j) f << "," << format_double(x[j]);
    f << "\n";
  }
}

void write_stats_csv(const std::string& path, const EnsembleStats& stats) {
  auto f = open_out(path);
  f << "t,ms_disagreement,max_pairwise_ms,centroid_mean,centroid_var\n";
  for (std::size_t r = 0; r < stats.times.size(); ++r)
    f << format_double(stats.times[r]) << "," << format_double(stats.ms_disagreement[r]) << ","
      << format_double(stats.max_pairwise_ms[r]) << "," << format_double(stats.centroid_mean[r])
      << "," << format_double(stats.centroid_var[r]) << "\n";
}

void write_lyapunov_csv(const std::string& path, const EnsembleStats& stats) {
  if (stats.lyapunov_mean.size() != stats.times.size())
    throw ConfigError("lyapunov series was not collected for this run");
  auto f = open_out(path);
  f << "t,lyapunov_mean\n";
  for (std::size_t r = 0; r < stats.times.size(); ++r)
    f << format_double(stats.times[r]) << "," << format_double(stats.lyapunov_mean[r]) << "\n";
}

void write_resolvent_csv(const std::string& path, const ResolventPath& rp,
                         const std::vector<double>& envelope) {
  if (envelope.size() != rp.times.size())
    throw ConfigError("envelope series does not match the resolvent grid");
  auto f = open_out(path);
  f << "t,re_gamma,im_gamma,envelope\n";
  for (std::size_t r = 0; r < rp.times.size(); ++r)
    f << format_double(rp.times[r]) << "," << format_double(rp.gamma[r].real()) << ","
      << format_double(rp.gamma[r].imag()) << "," << format_double(envelope[r]) << "\n";
}

void write_text(const std::string& path, const std::string& content) {
  auto f = open_out(path);
  f << content;
}

}  // namespace dcns
