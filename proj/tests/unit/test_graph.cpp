#include <catch_amalgamated.hpp>

#include <cmath>

#include "transrad/core.hpp"
#include "transrad/error.hpp"
#include "transrad/graph.hpp"
#include "transrad/spectral.hpp"

using namespace transrad;
using Catch::Approx;

namespace {

Eigen::MatrixXd random_features(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
  CounterRng rng(seed, 0);
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = 2.0 * rng.uniform01() - 1.0;
  return x;
}

Eigen::MatrixXd path_weights(Eigen::Index n) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) w(i, i + 1) = w(i + 1, i) = 1.0;
  return w;
}

std::size_t zero_eigenvalues(const Eigen::MatrixXd& lap) {
  const EigenDecomposition ed = sym_eig(lap);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < ed.eigenvalues.size(); ++i) {
    if (std::abs(ed.eigenvalues[i]) <= 1e-8) ++k;
  }
  return k;
}

}  // namespace

TEST_CASE("cosine similarity") {
  Eigen::MatrixXd x(4, 2);
  x << 1, 2,
       2, 4,
       -2, 1,
       -1, -2;
  const Eigen::MatrixXd s = cosine_similarity(x);
  REQUIRE(s(0, 1) == Approx(1.0));
  REQUIRE(s(0, 2) == Approx(0.0).margin(1e-15));
  REQUIRE(s(0, 3) == 0.0);  // antiparallel, clamped
  REQUIRE(s.diagonal().isZero());
  REQUIRE(s == s.transpose());
  REQUIRE((s.array() >= 0.0).all());

  Eigen::MatrixXd bad = x;
  bad.row(2).setZero();
  try {
    cosine_similarity(bad);
    FAIL("expected a degenerate-feature error");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::kDegenerateFeature);
  }
}

TEST_CASE("complete kNN graph reproduces the similarity") {
  Eigen::MatrixXd x = random_features(9, 3, 1).array().abs() + 0.1;
  const Eigen::MatrixXd s = cosine_similarity(x);
  const GraphBundle g = knn_graph(s, 8);
  REQUIRE(g.w == s);
  REQUIRE(g.component_count == 1);
}

TEST_CASE("kNN graph is symmetric with the union rule") {
  const Eigen::MatrixXd s = cosine_similarity(random_features(40, 5, 2));
  const GraphBundle g = knn_graph(s, 3);
  REQUIRE(g.w == g.w.transpose());
  for (Eigen::Index i = 0; i < 40; ++i) {
    // Each vertex keeps at least its own 3 nearest neighbours (positive ones).
    Eigen::Index kept = 0;
    for (Eigen::Index j = 0; j < 40; ++j) kept += g.w(i, j) > 0.0;
    Eigen::VectorXd row = s.row(i);
    std::sort(row.data(), row.data() + row.size(), std::greater<>());
    if (row[2] > 0.0) REQUIRE(kept >= 3);
    for (Eigen::Index j = 0; j < 40; ++j) {
      if (g.w(i, j) > 0.0) REQUIRE(g.w(i, j) == s(i, j));
    }
  }
}

TEST_CASE("ties at the k-th rank are all kept") {
  Eigen::MatrixXd s = Eigen::MatrixXd::Constant(4, 4, 0.5);
  s.diagonal().setZero();
  s(0, 1) = s(1, 0) = 0.9;
  const GraphBundle g = knn_graph(s, 2);
  // Vertex 0: 0.9 then a tie at 0.5 between vertices 2 and 3.
  REQUIRE(g.w(0, 2) == 0.5);
  REQUIRE(g.w(0, 3) == 0.5);
}

TEST_CASE("isolated vertex is an error") {
  Eigen::MatrixXd s = Eigen::MatrixXd::Constant(4, 4, 0.5);
  s.diagonal().setZero();
  s.row(3).setZero();
  s.col(3).setZero();
  try {
    knn_graph(s, 1);
    FAIL("expected an isolated-vertex error");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::kIsolatedVertex);
  }
  REQUIRE_THROWS_AS(knn_graph(s, 4), Error);
  REQUIRE_THROWS_AS(knn_graph(s, 0), Error);
}

TEST_CASE("Laplacian invariants") {
  for (std::uint64_t seed = 3; seed < 8; ++seed) {
    const GraphBundle g = knn_graph(cosine_similarity(random_features(50, 4, seed)), 5);
    const Eigen::Index n = 50;
    REQUIRE((g.lap_unnorm * Eigen::VectorXd::Ones(n)).cwiseAbs().maxCoeff() <= 1e-10);
    REQUIRE(g.degrees.isApprox(g.w.rowwise().sum()));
    const EigenDecomposition lap = sym_eig(g.lap_unnorm);
    REQUIRE(lap.eigenvalues[0] >= -1e-8 * g.lap_unnorm.norm());
    REQUIRE(std::abs(lap.eigenvalues[0]) <= 1e-8 * g.lap_unnorm.norm());
    if (g.component_count == 1) {
      REQUIRE(lap.eigenvalues[1] > 1e-8);
      const double cosine = std::abs(lap.eigenvectors.col(0).sum()) / std::sqrt(static_cast<double>(n));
      REQUIRE(std::acos(std::min(1.0, cosine)) <= 1e-4);
    }
    const EigenDecomposition norm = sym_eig(g.lap_norm_sym);
    REQUIRE(norm.eigenvalues[0] >= -1.0 - 1e-10);
    REQUIRE(norm.eigenvalues[n - 1] == Approx(1.0).margin(1e-10));
  }
}

TEST_CASE("connected components") {
  REQUIRE(connected_components(path_weights(4)).count == 1);

  Eigen::MatrixXd two = Eigen::MatrixXd::Zero(4, 4);
  two(0, 1) = two(1, 0) = 1.0;
  two(2, 3) = two(3, 2) = 2.0;
  const Components c = connected_components(two);
  REQUIRE(c.count == 2);
  REQUIRE(c.label[0] == c.label[1]);
  REQUIRE(c.label[2] == c.label[3]);
  REQUIRE(c.label[0] != c.label[2]);
  REQUIRE(make_graph(two).component_count == 2);
  REQUIRE(zero_eigenvalues(make_graph(two).lap_unnorm) == 2);
}

TEST_CASE("component count equals the multiplicity of the zero eigenvalue") {
  for (std::uint64_t seed = 10; seed < 16; ++seed) {
    // Up to three well-separated clusters joined block-diagonally.
    const int blocks = 1 + static_cast<int>(seed % 3);
    const Eigen::Index per = 8;
    const Eigen::Index n = per * blocks;
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (int b = 0; b < blocks; ++b) {
      const GraphBundle g = knn_graph(cosine_similarity(random_features(per, 3, seed * 10 + b).array().abs() + 0.05), 3);
      w.block(b * per, b * per, per, per) = g.w;
    }
    const GraphBundle g = make_graph(w);
    REQUIRE(g.component_count == static_cast<std::size_t>(blocks));
    REQUIRE(zero_eigenvalues(g.lap_unnorm) == g.component_count);
  }
}
