#ifndef SAP_GRAPH_HPP
#define SAP_GRAPH_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sap/linalg.hpp"

namespace sap {

// Undirected connected graph. Edges are stored lexicographically as (i, j)
// with i < j; the incidence matrix follows this order with +1 at the smaller
// index.
class Network {
 public:
  Network(int n, std::vector<std::pair<int, int>> edges,
          std::optional<Vector> node_weights = std::nullopt);

  int node_count() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const std::vector<std::vector<int>>& neighbours() const { return neighbours_; }
  int degree(int i) const { return static_cast<int>(neighbours_[static_cast<std::size_t>(i)].size()); }
  int min_degree() const;

  bool has_weights() const { return weights_.has_value(); }
  const Vector& weights() const;

 private:
  int n_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> neighbours_;
  std::optional<Vector> weights_;
};

Network cycle(int n);
Network path(int n);
Network grid2d(int a, int b);
Network complete(int n);
// n points uniform in the unit square, edges below Euclidean distance r
// (strict); regenerated until connected, up to 100 attempts.
Network rgg(int n, double r, std::uint64_t seed);
// Radius defaulting to sqrt(log(n)/n).
Network rgg(int n, std::uint64_t seed);

// Row e = (i,j): +1 in column i, -1 in column j.
Matrix incidence(const Network& g);
// Rows scaled by 1/sqrt(2) so every row has unit norm.
Matrix normalized_incidence(const Network& g);
Matrix laplacian(const Network& g);
Matrix degree_matrix(const Network& g);

// alpha(G): second smallest Laplacian eigenvalue.
double algebraic_connectivity(const Network& g);
// beta(G) = n / alpha(G).
double beta_of_graph(const Network& g);

// Edge-list file: first line "n m", then m lines "i j" (0-indexed).
Network load_network(std::istream& in);
Network load_network_file(const std::string& path);
void save_network(std::ostream& out, const Network& g);

// Generator spec strings: "cycle:10", "path:100", "grid:4x4", "complete:8",
// "rgg:100" (optional ":seed" suffix for rgg).
Network make_network(const std::string& spec);

}  // namespace sap

#endif
