#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dcns/errors.hpp"
#include "dcns/graph.hpp"

namespace dcns {

/// One measurement channel: agent `receiver` observes agent `source`.
struct Channel {
  int receiver = 0;
  int source = 0;
};

/// Channels {(j, i) : a_ij = 1}, enumerated by (receiver, source); the index
/// into this list keys the channel's Wiener stream.
[[nodiscard]] std::vector<Channel> active_channels(const Digraph& g);

/// Measurement noise attached to every active channel.
/// Additive: f_ji = sigma_ji * 1 (state independent).
/// MultLinear: f_ji(delta) = sigma_ji * delta.
/// MultCustom: user intensity with a declared linear bound sigma_bar.
class NoiseModel {
 public:
  enum class Kind { Additive, MultLinear, MultCustom };
  using Intensity = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

  static NoiseModel additive(Eigen::MatrixXd sigma);        // sigma(j, i) = sigma_ji
  static NoiseModel additive_uniform(double s, int n_agents);
  static NoiseModel mult_linear(Eigen::MatrixXd sigma, double sigma_bar = -1);
  static NoiseModel mult_linear_uniform(double s, int n_agents, double sigma_bar = -1);
  static NoiseModel mult_custom(Intensity f, double sigma_bar, int n_agents);

  /// "additive:sigma=2", "additive:file=<path>", "mult-linear:sigma=2,bar=2",
  /// "mult-linear:file=<path>,bar=2", "none:n=<agents>" (zero additive noise).
  static NoiseModel parse(const std::string& spec, int n_agents);

  /// f_ji(delta) for the channel; checks the declared bound for custom kinds.
  [[nodiscard]] Eigen::VectorXd intensity(const Channel& ch, const Eigen::VectorXd& delta) const;

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] bool multiplicative() const { return kind_ != Kind::Additive; }
  [[nodiscard]] double sigma(int source_j, int receiver_i) const { return sigma_(source_j, receiver_i); }
  [[nodiscard]] const Eigen::MatrixXd& sigma_matrix() const { return sigma_; }
  [[nodiscard]] double sigma_bar() const { return sigma_bar_; }
  [[nodiscard]] double sigma_min_active(const Digraph& g) const;  // min over active channels

 private:
  Kind kind_ = Kind::Additive;
  Eigen::MatrixXd sigma_;
  double sigma_bar_ = 0.0;
  Intensity custom_;
};

/// Address of one Wiener stream: (seed, trial, channel) identify the stream,
/// the step index selects the increment.  Draws are pure functions of the
/// address, so any worker layout produces identical increments.
struct NoiseStream {
  std::uint64_t seed = 0;
  std::uint32_t trial = 0;
  std::uint32_t channel = 0;
};

/// Standard normal draw for one (stream, step) address.  Fixed construction:
/// Philox4x32-10 counter cipher, two 53-bit uniforms, Box-Muller cosine leg.
[[nodiscard]] double normal_draw(const NoiseStream& s, std::uint64_t step);

/// Brownian increments over `steps` grid cells: N(0, dt) each.
[[nodiscard]] std::vector<double> brownian_increments(const NoiseStream& s, double dt,
                                                      std::size_t steps);

namespace philox {
/// Philox4x32-10 block: 128-bit counter, 64-bit key, 128-bit output.
[[nodiscard]] std::array<std::uint32_t, 4> block(const std::array<std::uint32_t, 4>& counter,
                                                 const std::array<std::uint32_t, 2>& key);
}  // namespace philox

}  // namespace dcns
