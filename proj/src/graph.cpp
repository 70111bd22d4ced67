#include "dopt/graph.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

#include "dopt/rng.hpp"

namespace dopt {

CommGraph::CommGraph(int n_agents,
                     const std::vector<std::pair<int, int>>& edge_list,
                     bool directed)
    : n_(n_agents), directed_(directed) {
  if (n_agents < 1) throw std::invalid_argument("CommGraph: need n >= 1");
  std::set<std::pair<int, int>> uniq;
  for (const auto& [i, j] : edge_list) {
    if (i < 0 || i >= n_agents || j < 0 || j >= n_agents)
      throw std::invalid_argument("CommGraph: edge endpoint out of range");
    if (i == j)
      throw std::invalid_argument("CommGraph: self-loops are not stored");
    uniq.insert({i, j});
    if (!directed) uniq.insert({j, i});
  }
  edges_.assign(uniq.begin(), uniq.end());
  in_.resize(n_agents);
  out_.resize(n_agents);
  for (const auto& [i, j] : edges_) {
    out_[i].push_back(j);
    in_[j].push_back(i);
  }
}

bool CommGraph::has_edge(int i, int j) const {
  return std::binary_search(edges_.begin(), edges_.end(), std::pair{i, j});
}

const std::vector<int>& CommGraph::neighbors(int i) const {
  if (directed_)
    throw std::invalid_argument("CommGraph: neighbors() needs an undirected graph");
  return out_[i];
}

Eigen::MatrixXd CommGraph::adjacency() const {
  Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(n_, n_);
  for (const auto& [i, j] : edges_) adj(i, j) = 1.0;
  return adj;
}

std::string CommGraph::to_edge_list() const {
  std::ostringstream os;
  for (const auto& [i, j] : edges_) os << (i + 1) << ' ' << (j + 1) << '\n';
  return os.str();
}

CommGraph CommGraph::from_edge_list(int n_agents, const std::string& text,
                                    bool directed) {
  std::istringstream is(text);
  std::vector<std::pair<int, int>> edges;
  int i, j;
  while (is >> i >> j) edges.push_back({i - 1, j - 1});
  return CommGraph(n_agents, edges, directed);
}

GraphSchedule GraphSchedule::fixed(const CommGraph& g) {
  GraphSchedule s;
  s.n = g.n();
  s.at = [g](int) { return g; };
  s.period = 1;
  s.trace = {g};
  return s;
}

GraphSchedule GraphSchedule::periodic(const std::vector<CommGraph>& graphs) {
  if (graphs.empty())
    throw std::invalid_argument("GraphSchedule: empty period");
  GraphSchedule s;
  s.n = graphs.front().n();
  for (const auto& g : graphs)
    if (g.n() != s.n)
      throw std::invalid_argument("GraphSchedule: inconsistent agent count");
  s.at = [graphs](int t) { return graphs[t % graphs.size()]; };
  s.period = static_cast<int>(graphs.size());
  s.trace = graphs;
  return s;
}

GraphSchedule GraphSchedule::finite_trace(const std::vector<CommGraph>& graphs) {
  GraphSchedule s = periodic(graphs);
  s.period.reset();
  s.at = [graphs](int t) {
    if (t < 0 || t >= static_cast<int>(graphs.size()))
      throw std::out_of_range("GraphSchedule: round outside recorded trace");
    return graphs[t];
  };
  return s;
}

void validate_weights(const WeightMatrix& w, const CommGraph* support) {
  const int n = w.n();
  if (w.a.cols() != n) throw std::invalid_argument("weights: not square");
  const double tol = 1e-12;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (w.a(i, j) < 0.0)
        throw std::invalid_argument("weights: negative entry");
      if (support && i != j && w.a(i, j) > 0.0 && !support->has_edge(j, i))
        throw std::invalid_argument("weights: positive entry off the graph support");
    }
  const bool want_rows =
      w.kind == Stochasticity::Row || w.kind == Stochasticity::Doubly;
  const bool want_cols =
      w.kind == Stochasticity::Column || w.kind == Stochasticity::Doubly;
  if (want_rows)
    for (int i = 0; i < n; ++i)
      if (std::abs(w.a.row(i).sum() - 1.0) > tol)
        throw std::invalid_argument("weights: row sum != 1");
  if (want_cols)
    for (int j = 0; j < n; ++j)
      if (std::abs(w.a.col(j).sum() - 1.0) > tol)
        throw std::invalid_argument("weights: column sum != 1");
  if (w.kind == Stochasticity::Doubly)
    for (int i = 0; i < n; ++i)
      if (w.a(i, i) <= 0.0)
        throw std::invalid_argument("weights: doubly stochastic needs a_ii > 0");
}

namespace {

// Nodes reachable from start following the given neighbor map.
int reachable_count(int n, const std::vector<std::vector<int>>& nbr, int start) {
  std::vector<char> seen(n, 0);
  std::deque<int> q{start};
  seen[start] = 1;
  int count = 1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop_front();
    for (int v : nbr[u])
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        q.push_back(v);
      }
  }
  return count;
}

std::vector<std::vector<int>> out_lists(const CommGraph& g) {
  std::vector<std::vector<int>> nbr(g.n());
  for (int i = 0; i < g.n(); ++i) nbr[i] = g.out_neighbors(i);
  return nbr;
}

std::vector<std::vector<int>> in_lists(const CommGraph& g) {
  std::vector<std::vector<int>> nbr(g.n());
  for (int i = 0; i < g.n(); ++i) nbr[i] = g.in_neighbors(i);
  return nbr;
}

CommGraph union_graph(const std::vector<CommGraph>& graphs, int from, int count,
                      bool wrap) {
  const int len = static_cast<int>(graphs.size());
  std::vector<std::pair<int, int>> edges;
  for (int k = 0; k < count; ++k) {
    const int idx = wrap ? (from + k) % len : from + k;
    if (idx >= len) break;
    const auto& e = graphs[idx].edges();
    edges.insert(edges.end(), e.begin(), e.end());
  }
  return CommGraph(graphs.front().n(), edges, /*directed=*/true);
}

}  // namespace

bool is_connected(const CommGraph& g) {
  if (g.directed())
    throw std::invalid_argument("is_connected: needs an undirected graph");
  return reachable_count(g.n(), out_lists(g), 0) == g.n();
}

bool is_strongly_connected(const CommGraph& g) {
  return reachable_count(g.n(), out_lists(g), 0) == g.n() &&
         reachable_count(g.n(), in_lists(g), 0) == g.n();
}

bool check_connectivity(const GraphSchedule& s, ConnectivityKind kind,
                        std::optional<int> T) {
  if (s.trace.empty())
    throw std::invalid_argument(
        "check_connectivity: unbounded aperiodic schedule without a trace is "
        "undecidable");
  const bool wrap = s.period.has_value();
  const int len = static_cast<int>(s.trace.size());
  switch (kind) {
    case ConnectivityKind::Connected: {
      for (const auto& g : s.trace)
        if (!is_connected(g)) return false;
      return true;
    }
    case ConnectivityKind::Strong: {
      for (const auto& g : s.trace)
        if (!is_strongly_connected(g)) return false;
      return true;
    }
    case ConnectivityKind::JointlyStrong: {
      // Union over every suffix window (full period when periodic).
      for (int start = 0; start < len; ++start) {
        const int count = wrap ? len : len - start;
        if (!is_strongly_connected(union_graph(s.trace, start, count, wrap)))
          return false;
      }
      return true;
    }
    case ConnectivityKind::TStrong: {
      const int window = T ? *T : s.window.value_or(0);
      if (window <= 0)
        throw std::invalid_argument("check_connectivity: T-strong check needs T");
      const int starts = wrap ? len : len - window + 1;
      if (starts <= 0)
        throw std::invalid_argument(
            "check_connectivity: trace shorter than the T-strong window");
      for (int start = 0; start < starts; ++start)
        if (!is_strongly_connected(union_graph(s.trace, start, window, wrap)))
          return false;
      return true;
    }
  }
  throw std::logic_error("check_connectivity: unknown kind");
}

int graph_diameter(const CommGraph& g) {
  const auto nbr = out_lists(g);
  int diam = 0;
  for (int s = 0; s < g.n(); ++s) {
    std::vector<int> dist(g.n(), -1);
    std::deque<int> q{s};
    dist[s] = 0;
    while (!q.empty()) {
      const int u = q.front();
      q.pop_front();
      for (int v : nbr[u])
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          q.push_back(v);
        }
    }
    for (int v = 0; v < g.n(); ++v) {
      if (dist[v] < 0)
        throw std::invalid_argument("graph_diameter: graph is not (strongly) connected");
      diam = std::max(diam, dist[v]);
    }
  }
  return diam;
}

CommGraph erdos_renyi_graph(int n, double p, std::uint64_t seed, bool directed,
                            ConnectivityRequirement require, int max_retries) {
  if (n < 2) throw std::invalid_argument("erdos_renyi_graph: need n >= 2");
  if (p < 0.0 || p > 1.0)
    throw std::invalid_argument("erdos_renyi_graph: p must be in [0, 1]");
  Rng rng(seed);
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
      for (int j = directed ? 0 : i + 1; j < n; ++j) {
        if (i == j) continue;
        if (rng.bernoulli(p)) edges.push_back({i, j});
      }
    CommGraph g(n, edges, directed);
    switch (require) {
      case ConnectivityRequirement::None:
        return g;
      case ConnectivityRequirement::Connected:
        if (!directed ? is_connected(g) : is_strongly_connected(g)) return g;
        break;
      case ConnectivityRequirement::StronglyConnected:
        if (is_strongly_connected(g)) return g;
        break;
    }
  }
  throw std::runtime_error(
      "erdos_renyi_graph: connectivity requirement not met within retry budget");
}

WeightMatrix metropolis_hastings_weights(const CommGraph& g) {
  if (g.directed())
    throw std::invalid_argument(
        "metropolis_hastings_weights: needs an undirected graph");
  if (!is_connected(g))
    throw std::invalid_argument(
        "metropolis_hastings_weights: needs a connected graph");
  const int n = g.n();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double off = 0.0;
    for (int j : g.neighbors(i)) {
      a(i, j) = 1.0 / (std::max(g.degree(i), g.degree(j)) + 1.0);
      off += a(i, j);
    }
    a(i, i) = 1.0 - off;
  }
  WeightMatrix w{a, Stochasticity::Doubly};
  validate_weights(w, &g);
  return w;
}

WeightMatrix out_degree_column_weights(const CommGraph& g) {
  const int n = g.n();
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    const double share = 1.0 / (g.out_degree(j) + 1.0);
    b(j, j) = share;
    for (int i : g.out_neighbors(j)) b(i, j) = share;
  }
  WeightMatrix w{b, Stochasticity::Column};
  validate_weights(w, &g);
  return w;
}

double contraction_factor(const WeightMatrix& w) {
  if (w.kind != Stochasticity::Doubly)
    throw std::invalid_argument("contraction_factor: needs doubly stochastic weights");
  validate_weights(w);
  const int n = w.n();
  const Eigen::MatrixXd m =
      w.a - Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  double sigma;
  if (w.a.isApprox(w.a.transpose(), 1e-12)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    sigma = es.eigenvalues().cwiseAbs().maxCoeff();
  } else {
    Eigen::EigenSolver<Eigen::MatrixXd> es(m);
    sigma = es.eigenvalues().cwiseAbs().maxCoeff();
  }
  if (sigma >= 1.0 - 1e-10)
    throw NoContractionError(
        "contraction_factor: sigma_A = 1, no contraction (disconnected support)");
  return sigma;
}

}  // namespace dopt
