#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace transrad {

struct GraphBundle {
  Eigen::MatrixXd w;             // symmetric, nonnegative, zero diagonal
  Eigen::VectorXd degrees;       // row sums of w
  Eigen::MatrixXd lap_unnorm;    // D - W
  Eigen::MatrixXd lap_norm_sym;  // D^{-1/2} W D^{-1/2}
  std::size_t component_count = 0;

  std::size_t size() const noexcept { return static_cast<std::size_t>(w.rows()); }
};

struct Components {
  std::size_t count = 0;
  std::vector<std::size_t> label;  // component id per vertex, numbered by first appearance
};

/// max(0, cos(x_i, x_j)) off the diagonal, 0 on it.
Eigen::MatrixXd cosine_similarity(const Eigen::MatrixXd& features);

/// Keeps edge (i, j) when either endpoint is among the other's k most similar
/// vertices. Every vertex tied with the k-th similarity is kept.
GraphBundle knn_graph(const Eigen::MatrixXd& sim, std::size_t k);

/// Builds degrees and Laplacians for an already symmetric weight matrix.
GraphBundle make_graph(Eigen::MatrixXd w);

/// Components of the graph with an edge wherever w(i, j) > 0.
Components connected_components(const Eigen::MatrixXd& w);

}  // namespace transrad
