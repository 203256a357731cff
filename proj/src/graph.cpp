#include "dcns/graph.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace dcns {

namespace {

constexpr double kZeroSeparation = 1e-8;

// Strongly connected components of the relation i -> j iff adj(i, j) = 1,
// iterative Tarjan. Returns component id per node; ids are in reverse
// topological order of the condensation.
std::vector<int> tarjan_scc(const Eigen::MatrixXi& adj, int n, int& n_comp) {
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1), stack_mem;
  std::vector<char> on_stack(n, 0);
  stack_mem.reserve(n);
  int next_index = 0;
  n_comp = 0;

  struct Frame {
    int v;
    int next_child;
  };
  for (int start = 0; start < n; ++start) {
    if (index[start] >= 0) continue;
    std::vector<Frame> call;
    call.push_back({start, 0});
    index[start] = low[start] = next_index++;
    stack_mem.push_back(start);
    on_stack[start] = 1;
    while (!call.empty()) {
      Frame& f = call.back();
      int v = f.v;
      bool descended = false;
      for (int j = f.next_child; j < n; ++j) {
        if (adj(v, j) == 0) continue;
        f.next_child = j + 1;
        if (index[j] < 0) {
          index[j] = low[j] = next_index++;
          stack_mem.push_back(j);
          on_stack[j] = 1;
          call.push_back({j, 0});
          descended = true;
          break;
        }
        if (on_stack[j]) low[v] = std::min(low[v], index[j]);
      }
      if (descended) continue;
      // all children visited
      if (low[v] == index[v]) {
        while (true) {
          int w = stack_mem.back();
          stack_mem.pop_back();
          on_stack[w] = 0;
          comp[w] = n_comp;
          if (w == v) break;
        }
        ++n_comp;
      }
      call.pop_back();
      if (!call.empty()) {
        int parent = call.back().v;
        low[parent] = std::min(low[parent], low[v]);
      }
    }
  }
  return comp;
}

}  // namespace

Digraph Digraph::from_edges(int n_agents, const std::vector<std::pair<int, int>>& edges) {
  if (n_agents < 2) throw ConfigError("graph needs at least 2 agents");
  Digraph g;
  g.n = n_agents;
  g.adj = Eigen::MatrixXi::Zero(n_agents, n_agents);
  for (const auto& [i, j] : edges) {
    if (i < 1 || i > n_agents || j < 1 || j > n_agents)
      throw ConfigError("edge index out of range: " + std::to_string(i) + " " + std::to_string(j));
    if (i == j) throw ConfigError("self-loop rejected: " + std::to_string(i));
    g.adj(i - 1, j - 1) = 1;
  }
  return g;
}

void Digraph::validate() const {
  if (n < 2) throw ConfigError("graph needs at least 2 agents");
  if (adj.rows() != n || adj.cols() != n) throw ConfigError("adjacency size mismatch");
  for (int i = 0; i < n; ++i) {
    if (adj(i, i) != 0) throw ConfigError("nonzero diagonal in adjacency");
    for (int j = 0; j < n; ++j)
      if (adj(i, j) != 0 && adj(i, j) != 1) throw ConfigError("adjacency weights must be 0 or 1");
  }
}

Eigen::MatrixXd build_laplacian(const Digraph& g) {
  g.validate();
  Eigen::MatrixXi lap = Eigen::MatrixXi::Zero(g.n, g.n);
  for (int i = 0; i < g.n; ++i) {
    int deg = g.adj.row(i).sum();
    lap(i, i) = deg;
    for (int j = 0; j < g.n; ++j)
      if (j != i) lap(i, j) = -g.adj(i, j);
  }
  return lap.cast<double>();
}

bool has_spanning_tree(const Digraph& g) {
  g.validate();
  const int n = g.n;
  // From root r, information flows along j -> i whenever adj(i, j) = 1.
  for (int r = 0; r < n; ++r) {
    std::vector<char> seen(n, 0);
    std::vector<int> queue{r};
    seen[r] = 1;
    int reached = 1;
    while (!queue.empty()) {
      int v = queue.back();
      queue.pop_back();
      for (int i = 0; i < n; ++i) {
        if (!seen[i] && g.adj(i, v) == 1) {
          seen[i] = 1;
          ++reached;
          queue.push_back(i);
        }
      }
    }
    if (reached == n) return true;
  }
  return false;
}

double SpectralData::max_ratio() const {
  double worst = 0.0;
  for (const auto& ev : nonzero_eigs) {
    if (ev.real() <= 0.0) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, std::norm(ev) / ev.real());
  }
  return worst;
}

SpectralData spectral_decompose(const Digraph& g) {
  g.validate();
  const int n = g.n;
  SpectralData out;
  out.laplacian = build_laplacian(g);
  out.has_spanning_tree = has_spanning_tree(g);
  out.is_undirected = (g.adj == g.adj.transpose());
  out.is_balanced = true;
  for (int i = 0; i < n && out.is_balanced; ++i)
    out.is_balanced = (g.adj.row(i).sum() == g.adj.col(i).sum());

  // pi: stationary vector of the continuous chain with generator -L.
  // A terminal strongly connected class of the relation i -> j (adj(i,j)=1)
  // is closed, so L restricted to it is the induced Laplacian; the kernel of
  // its transpose gives the stationary weights, zero elsewhere.
  int n_comp = 0;
  std::vector<int> comp = tarjan_scc(g.adj, n, n_comp);
  std::vector<char> terminal(n_comp, 1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (g.adj(i, j) == 1 && comp[i] != comp[j]) terminal[comp[i]] = 0;
  int chosen = -1;
  int chosen_lead = n;  // deterministic pick: terminal class holding the smallest node
  for (int c = 0; c < n_comp; ++c) {
    if (!terminal[c]) continue;
    int lead = n;
    for (int i = 0; i < n; ++i)
      if (comp[i] == c) lead = std::min(lead, i);
    if (lead < chosen_lead) {
      chosen_lead = lead;
      chosen = c;
    }
  }
  std::vector<int> members;
  for (int i = 0; i < n; ++i)
    if (comp[i] == chosen) members.push_back(i);
  const int m = static_cast<int>(members.size());
  Eigen::MatrixXd sub(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) sub(a, b) = out.laplacian(members[a], members[b]);
  out.pi = Eigen::VectorXd::Zero(n);
  if (m == 1) {
    out.pi(members[0]) = 1.0;
  } else {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(sub.transpose());
    lu.setThreshold(1e-9);
    Eigen::MatrixXd kern = lu.kernel();
    Eigen::VectorXd v = kern.col(0);
    if (v.sum() < 0) v = -v;
    for (int a = 0; a < m; ++a) {
      double x = v(a);
      if (x < 0 && x > -1e-12) x = 0.0;
      out.pi(members[a]) = x;
    }
    double s = out.pi.sum();
    if (s <= 0) throw DegenerateSpectrum("stationary vector solve failed");
    out.pi /= s;
  }
  out.nu = std::sqrt(static_cast<double>(n)) * out.pi;

  // Spectrum: symmetric path for undirected graphs, general dense otherwise.
  if (out.is_undirected) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.laplacian);
    if (es.info() != Eigen::Success) throw DegenerateSpectrum("symmetric eigensolver failed");
    Eigen::VectorXd ev = es.eigenvalues();  // ascending
    int zero_idx = 0;
    for (int i = 1; i < n; ++i)
      if (std::abs(ev(i)) < std::abs(ev(zero_idx))) zero_idx = i;
    out.modes.resize(n, n - 1);
    int col = 0;
    for (int i = 0; i < n; ++i) {
      if (i == zero_idx) continue;
      out.nonzero_eigs.emplace_back(ev(i), 0.0);
      out.modes.col(col++) = es.eigenvectors().col(i);
    }
    out.lambda2 = out.nonzero_eigs.front().real();
    out.lambdaN = out.nonzero_eigs.back().real();
    if (out.has_spanning_tree && std::abs(out.lambda2) < kZeroSeparation)
      throw DegenerateSpectrum("zero eigenvalue not separated");
  } else {
    Eigen::EigenSolver<Eigen::MatrixXd> es(out.laplacian);
    if (es.info() != Eigen::Success) throw DegenerateSpectrum("eigensolver failed");
    std::vector<std::complex<double>> eigs(es.eigenvalues().data(), es.eigenvalues().data() + n);
    int zero_idx = 0;
    for (int i = 1; i < n; ++i)
      if (std::abs(eigs[i]) < std::abs(eigs[zero_idx])) zero_idx = i;
    for (int i = 0; i < n; ++i)
      if (i != zero_idx) out.nonzero_eigs.push_back(eigs[i]);
    std::sort(out.nonzero_eigs.begin(), out.nonzero_eigs.end(),
              [](const std::complex<double>& a, const std::complex<double>& b) {
                if (a.real() != b.real()) return a.real() < b.real();
                return a.imag() < b.imag();
              });
    if (out.has_spanning_tree) {
      for (const auto& ev : out.nonzero_eigs)
        if (std::abs(ev) < kZeroSeparation)
          throw DegenerateSpectrum("zero eigenvalue not separated");
    }
  }
  return out;
}

Digraph parse_digraph(std::istream& in) {
  std::string line;
  int line_no = 0;
  int n = -1;
  std::vector<std::pair<int, int>> edges;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;  // blank
    if (n < 0) {
      if (first != "agents") throw ParseError("expected 'agents N' header", line_no, 1);
      if (!(ls >> n) || n < 2) throw ParseError("bad agent count", line_no);
      std::string extra;
      if (ls >> extra) throw ParseError("trailing tokens after header", line_no);
      continue;
    }
    int i = 0, j = 0;
    try {
      i = std::stoi(first);
    } catch (...) {
      throw ParseError("bad edge index '" + first + "'", line_no, 1);
    }
    if (!(ls >> j)) throw ParseError("edge line needs two indices", line_no);
    std::string extra;
    if (ls >> extra) throw ParseError("trailing tokens after edge", line_no);
    if (i < 1 || i > n || j < 1 || j > n) throw ParseError("edge index out of range", line_no);
    if (i == j) throw ParseError("self-loop rejected", line_no);
    edges.emplace_back(i, j);
  }
  if (n < 0) throw ParseError("missing 'agents N' header", std::max(1, line_no));
  return Digraph::from_edges(n, edges);
}

Digraph load_digraph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open graph file: " + path);
  return parse_digraph(in);
}

}  // namespace dcns
