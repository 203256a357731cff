#pragma once

#include <string>
#include <vector>

#include "dcns/metrics.hpp"
#include "dcns/resolvent.hpp"
#include "dcns/sdde.hpp"

namespace dcns {

/// snprintf %.12g; the single float format used by every CSV writer, so a
/// rerun with the same inputs reproduces files byte for byte.
[[nodiscard]] std::string format_double(double v);

/// Header "t,agent_1_1,...,agent_N_n"; one row per recorded time.
void write_trajectory_csv(const std::string& path, const Trajectory& traj, int n_agents,
                          int n_dim);

/// Header "t,ms_disagreement,max_pairwise_ms,centroid_mean,centroid_var".
void write_stats_csv(const std::string& path, const EnsembleStats& stats);

/// Header "t,lyapunov_mean"; only meaningful when the functional was collected.
void write_lyapunov_csv(const std::string& path, const EnsembleStats& stats);

/// Header "t,re_gamma,im_gamma,envelope"; envelope bounds |Gamma|.
void write_resolvent_csv(const std::string& path, const ResolventPath& rp,
                         const std::vector<double>& envelope);

/// Writes a string to a file, creating parent directories.
void write_text(const std::string& path, const std::string& content);

}  // namespace dcns
