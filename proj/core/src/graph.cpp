#include "sap/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sap/errors.hpp"
#include "sap/rng.hpp"

namespace sap {

namespace {

bool connected(int n, const std::vector<std::vector<int>>& adj) {
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::vector<int> stack = {0};
  seen[0] = 1;
  int visited = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v : adj[static_cast<std::size_t>(u)]) {
      if (!seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = 1;
        ++visited;
        stack.push_back(v);
      }
    }
  }
  return visited == n;
}

}  // namespace

Network::Network(int n, std::vector<std::pair<int, int>> edges, std::optional<Vector> node_weights)
    : n_(n), edges_(std::move(edges)), weights_(std::move(node_weights)) {
  if (n_ < 2) throw ValidationError("network: need at least two nodes");
  for (auto& [i, j] : edges_) {
    if (i == j) throw ValidationError("network: self-loop at node " + std::to_string(i));
    if (i < 0 || j < 0 || i >= n_ || j >= n_) throw ValidationError("network: edge index out of range");
    if (i > j) std::swap(i, j);
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
    throw ValidationError("network: duplicate edge");
  neighbours_.assign(static_cast<std::size_t>(n_), {});
  for (const auto& [i, j] : edges_) {
    neighbours_[static_cast<std::size_t>(i)].push_back(j);
    neighbours_[static_cast<std::size_t>(j)].push_back(i);
  }
  for (auto& list : neighbours_) std::sort(list.begin(), list.end());
  if (!connected(n_, neighbours_)) throw ValidationError("network: graph is not connected");
  if (weights_) {
    if (weights_->size() != n_) throw ValidationError("network: weight vector length mismatch");
    if ((weights_->array() <= 0.0).any()) throw ValidationError("network: weights must be positive");
  }
}

int Network::min_degree() const {
  int d = n_;
  for (int i = 0; i < n_; ++i) d = std::min(d, degree(i));
  return d;
}

const Vector& Network::weights() const {
  if (!weights_) throw ValidationError("network: no node weights set");
  return *weights_;
}

Network cycle(int n) {
  if (n < 3) throw ValidationError("cycle: need n >= 3");
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  e.emplace_back(0, n - 1);
  return Network(n, std::move(e));
}

Network path(int n) {
  if (n < 2) throw ValidationError("path: need n >= 2");
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return Network(n, std::move(e));
}

Network grid2d(int a, int b) {
  if (a < 1 || b < 1 || static_cast<long long>(a) * b < 2)
    throw ValidationError("grid2d: need at least two nodes");
  std::vector<std::pair<int, int>> e;
  const auto id = [b](int r, int c) { return r * b + c; };
  for (int r = 0; r < a; ++r)
    for (int c = 0; c < b; ++c) {
      if (c + 1 < b) e.emplace_back(id(r, c), id(r, c + 1));
      if (r + 1 < a) e.emplace_back(id(r, c), id(r + 1, c));
    }
  return Network(a * b, std::move(e));
}

Network complete(int n) {
  if (n < 2) throw ValidationError("complete: need n >= 2");
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return Network(n, std::move(e));
}

Network rgg(int n, double r, std::uint64_t seed) {
  if (n < 2) throw ValidationError("rgg: need n >= 2");
  if (!(r > 0.0)) throw ValidationError("rgg: radius must be positive");
  Rng rng(seed);
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<double> xs(static_cast<std::size_t>(n)), ys(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      xs[static_cast<std::size_t>(i)] = rng.uniform();
      ys[static_cast<std::size_t>(i)] = rng.uniform();
    }
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double dx = xs[static_cast<std::size_t>(i)] - xs[static_cast<std::size_t>(j)];
        const double dy = ys[static_cast<std::size_t>(i)] - ys[static_cast<std::size_t>(j)];
        if (std::sqrt(dx * dx + dy * dy) < r) e.emplace_back(i, j);
      }
    try {
      return Network(n, std::move(e));
    } catch (const ValidationError&) {
      // disconnected placement; try again
    }
  }
  throw ValidationError("rgg: failed to generate a connected graph in 100 attempts");
}

Network rgg(int n, std::uint64_t seed) {
  return rgg(n, std::sqrt(std::log(static_cast<double>(n)) / static_cast<double>(n)), seed);
}

Matrix incidence(const Network& g) {
  Matrix q = Matrix::Zero(g.edge_count(), g.node_count());
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto& [i, j] = g.edges()[static_cast<std::size_t>(e)];
    q(e, i) = 1.0;
    q(e, j) = -1.0;
  }
  return q;
}

Matrix normalized_incidence(const Network& g) {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  Matrix q = Matrix::Zero(g.edge_count(), g.node_count());
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto& [i, j] = g.edges()[static_cast<std::size_t>(e)];
    q(e, i) = inv_sqrt2;
    q(e, j) = -inv_sqrt2;
  }
  return q;
}

Matrix laplacian(const Network& g) {
  Matrix l = Matrix::Zero(g.node_count(), g.node_count());
  for (const auto& [i, j] : g.edges()) {
    l(i, i) += 1.0;
    l(j, j) += 1.0;
    l(i, j) -= 1.0;
    l(j, i) -= 1.0;
  }
  return l;
}

Matrix degree_matrix(const Network& g) {
  Matrix d = Matrix::Zero(g.node_count(), g.node_count());
  for (int i = 0; i < g.node_count(); ++i) d(i, i) = g.degree(i);
  return d;
}

double algebraic_connectivity(const Network& g) {
  const Spectrum s = spectrum_of_matrix(laplacian(g));
  return s.lambda_min_plus;
}

double beta_of_graph(const Network& g) {
  return static_cast<double>(g.node_count()) / algebraic_connectivity(g);
}

Network load_network(std::istream& in) {
  int n = 0;
  long long m = 0;
  if (!(in >> n >> m)) throw ValidationError("network loader: missing 'n m' header");
  std::vector<std::pair<int, int>> e;
  e.reserve(static_cast<std::size_t>(m));
  for (long long k = 0; k < m; ++k) {
    int i, j;
    if (!(in >> i >> j)) throw ValidationError("network loader: truncated edge list");
    e.emplace_back(i, j);
  }
  return Network(n, std::move(e));
}

Network load_network_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("network loader: cannot open " + path);
  return load_network(f);
}

void save_network(std::ostream& out, const Network& g) {
  out << g.node_count() << ' ' << g.edge_count() << '\n';
  for (const auto& [i, j] : g.edges()) out << i << ' ' << j << '\n';
}

Network make_network(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw ValidationError("network spec: expected '<kind>:<size>' in '" + spec + "'");
  const std::string kind = spec.substr(0, colon);
  const std::string arg = spec.substr(colon + 1);
  try {
    if (kind == "cycle") return cycle(std::stoi(arg));
    if (kind == "path") return path(std::stoi(arg));
    if (kind == "complete") return complete(std::stoi(arg));
    if (kind == "grid") {
      const auto x = arg.find('x');
      if (x == std::string::npos) throw ValidationError("network spec: grid wants AxB");
      return grid2d(std::stoi(arg.substr(0, x)), std::stoi(arg.substr(x + 1)));
    }
    if (kind == "rgg") {
      const auto second = arg.find(':');
      const int n = std::stoi(arg.substr(0, second));
      const std::uint64_t seed =
          second == std::string::npos ? 12345u : std::stoull(arg.substr(second + 1));
      return rgg(n, seed);
    }
  } catch (const std::invalid_argument&) {
    throw ValidationError("network spec: bad number in '" + spec + "'");
  } catch (const std::out_of_range&) {
    throw ValidationError("network spec: number out of range in '" + spec + "'");
  }
  throw ValidationError("network spec: unknown generator '" + kind + "'");
}

}  // namespace sap
