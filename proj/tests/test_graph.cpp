#include <cmath>
#include <sstream>

#include "doctest.h"
#include "sap/graph.hpp"
#include "util.hpp"

using namespace sap;

TEST_CASE("cycle and grid generators have the documented shape") {
  const Network c10 = cycle(10);
  CHECK(c10.edge_count() == 10);
  for (int i = 0; i < 10; ++i) CHECK(c10.degree(i) == 2);
  const Network g44 = grid2d(4, 4);
  CHECK(g44.node_count() == 16);
  CHECK(g44.edge_count() == 24);
  const Network p5 = path(5);
  CHECK(p5.edge_count() == 4);
  CHECK(p5.degree(0) == 1);
  CHECK(p5.degree(2) == 2);
  const Network k6 = complete(6);
  CHECK(k6.edge_count() == 15);
}

TEST_CASE("network validation rejects self-loops, duplicates and disconnection") {
  CHECK_THROWS_AS(Network(3, {{0, 0}, {1, 2}}), ValidationError);
  CHECK_THROWS_AS(Network(3, {{0, 1}, {1, 0}, {1, 2}}), ValidationError);
  CHECK_THROWS_AS(Network(4, {{0, 1}, {2, 3}}), ValidationError);
}

TEST_CASE("rgg with the standard radius is connected and reproducible") {
  const Network g1 = rgg(100, 2024);
  const Network g2 = rgg(100, 2024);
  CHECK(g1.edges() == g2.edges());
  CHECK(g1.node_count() == 100);
  // tiny radius cannot connect the graph
  CHECK_THROWS_AS(rgg(50, 1e-6, 1), ValidationError);
}

TEST_CASE("incidence of a single edge and its normalized variant") {
  const Network g(2, {{0, 1}});
  const Matrix q = incidence(g);
  REQUIRE(q.rows() == 1);
  CHECK(q(0, 0) == 1.0);
  CHECK(q(0, 1) == -1.0);
  const Matrix qn = normalized_incidence(g);
  CHECK(qn(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(qn(0, 1) == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("incidence rows are lexicographic with +1 at the smaller index") {
  const Network g(4, {{2, 3}, {0, 2}, {0, 1}});
  const auto& edges = g.edges();
  REQUIRE(edges.size() == 3);
  CHECK(edges[0] == std::pair<int, int>(0, 1));
  CHECK(edges[1] == std::pair<int, int>(0, 2));
  CHECK(edges[2] == std::pair<int, int>(2, 3));
  const Matrix q = incidence(g);
  for (int e = 0; e < 3; ++e) {
    CHECK(q(e, edges[static_cast<std::size_t>(e)].first) == 1.0);
    CHECK(q(e, edges[static_cast<std::size_t>(e)].second) == -1.0);
  }
}

TEST_CASE("structural identities: L = Q^T Q = D - Adj, normalized A^T A = L/2") {
  for (const char* spec : {"cycle:9", "grid:3x4", "rgg:40:7", "complete:6"}) {
    const Network g = make_network(spec);
    const Matrix q = incidence(g);
    const Matrix l = laplacian(g);
    CHECK((q.transpose() * q - l).norm() <= 1e-12 * std::max(1.0, l.norm()));
    Matrix adj = Matrix::Zero(g.node_count(), g.node_count());
    for (const auto& [i, j] : g.edges()) {
      adj(i, j) = 1.0;
      adj(j, i) = 1.0;
    }
    CHECK((l - (degree_matrix(g) - adj)).norm() == 0.0);
    const Matrix an = normalized_incidence(g);
    CHECK((an.transpose() * an - l / 2.0).norm() <= 1e-12 * std::max(1.0, l.norm()));
    for (Eigen::Index e = 0; e < an.rows(); ++e)
      CHECK(an.row(e).norm() == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("complete-graph Laplacian eigenvalues are {0, n, ..., n}") {
  const Network g = complete(7);
  const Spectrum s = spectrum_of_matrix(laplacian(g));
  CHECK(s.eigenvalues.back() <= 1e-10);
  for (std::size_t i = 0; i + 1 < s.eigenvalues.size(); ++i)
    CHECK(s.eigenvalues[i] == doctest::Approx(7.0).epsilon(1e-10));
  CHECK(algebraic_connectivity(g) == doctest::Approx(7.0).epsilon(1e-10));
  CHECK(beta_of_graph(g) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("paper table: cycle(100) and path(100) condition numbers") {
  CHECK(std::lround(1.0 / algebraic_connectivity(cycle(100))) == 253);
  CHECK(std::lround(1.0 / algebraic_connectivity(path(100))) == 1013);
}

TEST_CASE("line and cycle closed forms match the eigensolver") {
  for (int n : {10, 37, 100}) {
    CHECK(algebraic_connectivity(path(n)) ==
          doctest::Approx(2.0 * (1.0 - std::cos(std::numbers::pi / n))).epsilon(1e-8));
    CHECK(algebraic_connectivity(cycle(n)) ==
          doctest::Approx(2.0 * (1.0 - std::cos(2.0 * std::numbers::pi / n))).epsilon(1e-8));
  }
}

TEST_CASE("beta(G) * alpha(G) = n for all generators") {
  for (const char* spec : {"cycle:11", "path:8", "grid:3x5", "complete:9", "rgg:30:5"}) {
    const Network g = make_network(spec);
    CHECK(beta_of_graph(g) * algebraic_connectivity(g) ==
          doctest::Approx(static_cast<double>(g.node_count())).epsilon(1e-9));
  }
}

TEST_CASE("beta(G) bounds the all-pairs disagreement by the edge disagreement") {
  for (const char* spec : {"cycle:9", "grid:3x4", "rgg:25:9"}) {
    const Network g = make_network(spec);
    const double beta = beta_of_graph(g);
    Rng rng(77);
    for (int rep = 0; rep < 1000; ++rep) {
      Vector x(g.node_count());
      for (int i = 0; i < g.node_count(); ++i) x(i) = rng.normal();
      double all_pairs = 0.0;
      for (int i = 0; i < g.node_count(); ++i)
        for (int j = i + 1; j < g.node_count(); ++j)
          all_pairs += (x(i) - x(j)) * (x(i) - x(j));
      double on_edges = 0.0;
      for (const auto& [i, j] : g.edges()) on_edges += (x(i) - x(j)) * (x(i) - x(j));
      CHECK(all_pairs <= beta * on_edges * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("edge-list files round-trip and generator specs parse") {
  const Network g = grid2d(3, 3);
  std::stringstream s;
  save_network(s, g);
  const Network h = load_network(s);
  CHECK(g.edges() == h.edges());
  CHECK_THROWS_AS(make_network("moebius:7"), ValidationError);
  CHECK_THROWS_AS(make_network("cycle"), ValidationError);
  CHECK(make_network("path:100").edge_count() == 99);
}

TEST_CASE("node weights are validated and exposed") {
  Vector w(3);
  w << 1.0, 2.0, 3.0;
  const Network g(3, {{0, 1}, {1, 2}}, w);
  CHECK(g.has_weights());
  CHECK(g.weights()(2) == 3.0);
  Vector bad(3);
  bad << 1.0, 0.0, 3.0;
  CHECK_THROWS_AS(Network(3, {{0, 1}, {1, 2}}, bad), ValidationError);
}
