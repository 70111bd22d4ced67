#ifndef DOPT_GRAPH_HPP
#define DOPT_GRAPH_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dopt {

// Communication graph over agents 0..n-1. Edges are ordered pairs (i, j)
// meaning "j can send to i" is NOT implied; (i, j) means i -> j. Self-loops
// are never stored: self-weights live in the weight matrix. For undirected
// graphs both orientations of every edge are stored, so the edge set is
// symmetric by construction.
class CommGraph {
 public:
  CommGraph() = default;
  // Throws std::invalid_argument on out-of-range endpoints or self-loops.
  // For undirected graphs, each input edge is mirrored.
  CommGraph(int n_agents, const std::vector<std::pair<int, int>>& edge_list,
            bool directed);

  int n() const { return n_; }
  bool directed() const { return directed_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  bool has_edge(int i, int j) const;

  // Agents j with an edge j -> i (senders to i).
  const std::vector<int>& in_neighbors(int i) const { return in_[i]; }
  // Agents j with an edge i -> j (receivers from i).
  const std::vector<int>& out_neighbors(int i) const { return out_[i]; }
  // Neighbor set of an undirected graph (throws if directed).
  const std::vector<int>& neighbors(int i) const;

  int out_degree(int i) const { return static_cast<int>(out_[i].size()); }
  int in_degree(int i) const { return static_cast<int>(in_[i].size()); }
  // Degree in an undirected graph (throws if directed).
  int degree(int i) const { return static_cast<int>(neighbors(i).size()); }

  // 0/1 adjacency matrix, adj(i, j) = 1 iff edge (i, j).
  Eigen::MatrixXd adjacency() const;

  // Edge-list text, one "i j" per line, 1-based agent ids.
  std::string to_edge_list() const;
  static CommGraph from_edge_list(int n_agents, const std::string& text,
                                  bool directed);

 private:
  int n_ = 0;
  bool directed_ = false;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> in_, out_;
};

// Time-varying graph sequence: a pure function of the round index plus an
// optional period and an optional finite recorded trace. Connectivity
// checks require either a period or a trace; an unbounded aperiodic
// schedule is rejected as undecidable.
struct GraphSchedule {
  int n = 0;
  std::function<CommGraph(int)> at;
  std::optional<int> period;
  std::vector<CommGraph> trace;  // used for checking when period is absent
  std::optional<int> window;     // declared T for T-strong connectivity

  static GraphSchedule fixed(const CommGraph& g);
  static GraphSchedule periodic(const std::vector<CommGraph>& graphs);
  static GraphSchedule finite_trace(const std::vector<CommGraph>& graphs);
};

enum class Stochasticity { Row, Column, Doubly };

// Consensus weight matrix paired with its declared stochasticity class.
// a(i, j) > 0 requires edge (j, i) (j sends to i) or i == j.
struct WeightMatrix {
  Eigen::MatrixXd a;
  Stochasticity kind = Stochasticity::Doubly;

  int n() const { return static_cast<int>(a.rows()); }
};

// Validates nonnegativity, the declared row/column sums (tolerance 1e-12)
// and, when a graph is supplied, the support pattern. Doubly stochastic
// matrices must additionally have a positive diagonal. Throws on violation.
void validate_weights(const WeightMatrix& w,
                      const CommGraph* support = nullptr);

enum class ConnectivityRequirement { None, Connected, StronglyConnected };

// Erdos-Renyi random graph: each (unordered for undirected, ordered for
// directed) pair is an edge independently with probability p. When a
// connectivity requirement is set, sampling repeats (bounded retries, one
// seed covers the whole retry sequence) until the requirement holds.
CommGraph erdos_renyi_graph(
    int n, double p, std::uint64_t seed, bool directed = false,
    ConnectivityRequirement require = ConnectivityRequirement::None,
    int max_retries = 1000);

// Metropolis-Hastings weights for a connected undirected graph:
// a_ij = 1/(max{deg_i, deg_j} + 1) for neighbors, diagonal completes rows
// to 1. Output is symmetric doubly stochastic. Throws on directed or
// disconnected input.
WeightMatrix metropolis_hastings_weights(const CommGraph& g);

// Column-stochastic weights for push-sum on a digraph:
// b_ij = 1/(out_degree(j) + 1) for every edge j -> i and for i == j.
WeightMatrix out_degree_column_weights(const CommGraph& g);

enum class ConnectivityKind { Connected, Strong, JointlyStrong, TStrong };

bool is_connected(const CommGraph& g);           // undirected graphs
bool is_strongly_connected(const CommGraph& g);  // digraphs

// Checks the requested property on the schedule. For JointlyStrong and
// TStrong the schedule must be periodic or carry a finite trace; TStrong
// additionally needs T (from the argument or schedule.window).
// Throws std::invalid_argument when the check is undecidable.
bool check_connectivity(const GraphSchedule& s, ConnectivityKind kind,
                        std::optional<int> T = std::nullopt);

// Longest shortest path (directed distances); throws if not strongly
// connected (or not connected for undirected graphs).
int graph_diameter(const CommGraph& g);

// Raised when a weight matrix admits no consensus contraction
// (disconnected support: sigma_A = 1).
class NoContractionError : public std::runtime_error {
 public:
  explicit NoContractionError(const std::string& what)
      : std::runtime_error(what) {}
};

// Contraction factor sigma_A: spectral radius of A - (1/N) 11^T, equal to
// max{|lambda_2|, |lambda_N|} for doubly stochastic A. Strictly inside
// (0, 1) iff the support is connected; otherwise NoContractionError.
double contraction_factor(const WeightMatrix& w);

}  // namespace dopt

#endif  // DOPT_GRAPH_HPP
