#include "dcns/noise.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace dcns {

std::vector<Channel> active_channels(const Digraph& g) {
  g.validate();
  std::vector<Channel> out;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      if (g.adj(i, j) == 1) out.push_back({i, j});
  return out;
}

namespace {

Eigen::MatrixXd load_sigma_matrix(const std::string& path, int n) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open sigma matrix: " + path);
  Eigen::MatrixXd m(n, n);
  std::string line;
  int row = 0, line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double first;
    if (!(ls >> first)) continue;
    if (row >= n) throw ParseError("too many sigma rows", line_no);
    m(row, 0) = first;
    for (int c = 1; c < n; ++c)
      if (!(ls >> m(row, c))) throw ParseError("sigma row needs " + std::to_string(n) + " values", line_no);
    double extra;
    if (ls >> extra) throw ParseError("trailing values in sigma row", line_no);
    ++row;
  }
  if (row != n) throw ConfigError("sigma matrix needs " + std::to_string(n) + " rows");
  return m;
}

void validate_sigma(const Eigen::MatrixXd& s) {
  for (int r = 0; r < s.rows(); ++r)
    for (int c = 0; c < s.cols(); ++c)
      if (!(s(r, c) >= 0) || !std::isfinite(s(r, c)))
        throw ConfigError("sigma entries must be finite and nonnegative");
}

}  // namespace

NoiseModel NoiseModel::additive(Eigen::MatrixXd sigma) {
  validate_sigma(sigma);
  NoiseModel m;
  m.kind_ = Kind::Additive;
  m.sigma_bar_ = sigma.maxCoeff();
  m.sigma_ = std::move(sigma);
  return m;
}

NoiseModel NoiseModel::additive_uniform(double s, int n_agents) {
  return additive(Eigen::MatrixXd::Constant(n_agents, n_agents, s));
}

NoiseModel NoiseModel::mult_linear(Eigen::MatrixXd sigma, double sigma_bar) {
  validate_sigma(sigma);
  double peak = sigma.maxCoeff();
  if (sigma_bar < 0) sigma_bar = peak;
  if (sigma_bar < peak - 1e-12)
    throw ConfigError("declared sigma_bar is below the largest channel sigma");
  NoiseModel m;
  m.kind_ = Kind::MultLinear;
  m.sigma_ = std::move(sigma);
  m.sigma_bar_ = sigma_bar;
  return m;
}

NoiseModel NoiseModel::mult_linear_uniform(double s, int n_agents, double sigma_bar) {
  return mult_linear(Eigen::MatrixXd::Constant(n_agents, n_agents, s), sigma_bar);
}

NoiseModel NoiseModel::mult_custom(Intensity f, double sigma_bar, int n_agents) {
  if (!f) throw ConfigError("custom noise needs an intensity function");
  if (!(sigma_bar >= 0)) throw ConfigError("custom noise needs sigma_bar >= 0");
  NoiseModel m;
  m.kind_ = Kind::MultCustom;
  m.custom_ = std::move(f);
  m.sigma_bar_ = sigma_bar;
  m.sigma_ = Eigen::MatrixXd::Constant(n_agents, n_agents, sigma_bar);
  return m;
}

NoiseModel NoiseModel::parse(const std::string& spec, int n_agents) {
  auto colon = spec.find(':');
  std::string fam = spec.substr(0, colon);
  std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  double sigma = -1, bar = -1;
  std::string file;
  if (!rest.empty()) {
    std::istringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto eq = item.find('=');
      if (eq == std::string::npos) throw ConfigError("noise spec expects key=value: '" + item + "'");
      std::string key = item.substr(0, eq), val = item.substr(eq + 1);
      try {
        if (key == "sigma") sigma = std::stod(val);
        else if (key == "bar") bar = std::stod(val);
        else if (key == "file") file = val;
        else if (key == "n") n_agents = std::stoi(val);
        else throw ConfigError("unknown noise key: " + key);
      } catch (const std::logic_error&) {
        throw ConfigError("bad value for noise key " + key + ": '" + val + "'");
      }
    }
  }
  if (n_agents <= 0) throw ConfigError("noise spec needs a positive agent count");
  if (fam == "none") return additive_uniform(0.0, n_agents);
  if (fam == "additive") {
    if (!file.empty()) return additive(load_sigma_matrix(file, n_agents));
    if (sigma < 0) throw ConfigError("additive noise needs sigma= or file=");
    return additive_uniform(sigma, n_agents);
  }
  if (fam == "mult-linear") {
    if (!file.empty()) return mult_linear(load_sigma_matrix(file, n_agents), bar);
    if (sigma < 0) throw ConfigError("mult-linear noise needs sigma= or file=");
    return mult_linear_uniform(sigma, n_agents, bar);
  }
  throw ConfigError("unknown noise kind: '" + fam + "'");
}

Eigen::VectorXd NoiseModel::intensity(const Channel& ch, const Eigen::VectorXd& delta) const {
  switch (kind_) {
    case Kind::Additive:
      return Eigen::VectorXd::Constant(delta.size(), sigma_(ch.source, ch.receiver));
    case Kind::MultLinear:
      return sigma_(ch.source, ch.receiver) * delta;
    case Kind::MultCustom: {
      Eigen::VectorXd f = custom_(delta);
      if (f.size() != delta.size()) throw ConfigError("custom intensity changed dimension");
      if (f.norm() > sigma_bar_ * delta.norm() + 1e-9)
        throw LinearBoundViolated("intensity exceeds declared linear bound");
      return f;
    }
  }
  return delta;
}

double NoiseModel::sigma_min_active(const Digraph& g) const {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& ch : active_channels(g)) lo = std::min(lo, sigma_(ch.source, ch.receiver));
  return std::isfinite(lo) ? lo : 0.0;
}

namespace philox {

namespace {
constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void round_once(std::array<std::uint32_t, 4>& x, const std::array<std::uint32_t, 2>& k) {
  std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * x[0];
  std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * x[2];
  std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
  std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
  x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
}
}  // namespace

std::array<std::uint32_t, 4> block(const std::array<std::uint32_t, 4>& counter,
                                   const std::array<std::uint32_t, 2>& key) {
  std::array<std::uint32_t, 4> x = counter;
  std::array<std::uint32_t, 2> k = key;
  for (int r = 0; r < 10; ++r) {
    round_once(x, k);
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  return x;
}

}  // namespace philox

double normal_draw(const NoiseStream& s, std::uint64_t step) {
  std::array<std::uint32_t, 4> ctr = {s.trial, s.channel, static_cast<std::uint32_t>(step),
                                      static_cast<std::uint32_t>(step >> 32)};
  std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(s.seed),
                                      static_cast<std::uint32_t>(s.seed >> 32)};
  auto y = philox::block(ctr, key);
  std::uint64_t a = (static_cast<std::uint64_t>(y[0]) << 32) | y[1];
  std::uint64_t b = (static_cast<std::uint64_t>(y[2]) << 32) | y[3];
  double u1 = (static_cast<double>(a >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
  double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;          // [0, 1)
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<double> brownian_increments(const NoiseStream& s, double dt, std::size_t steps) {
  if (!(dt > 0)) throw ConfigError("brownian increments need dt > 0");
  std::vector<double> out(steps);
  double root = std::sqrt(dt);
  for (std::size_t m = 0; m < steps; ++m) out[m] = root * normal_draw(s, m);
  return out;
}

}  // namespace dcns
