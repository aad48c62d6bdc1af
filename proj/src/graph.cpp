#include "transrad/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "transrad/error.hpp"

namespace transrad {

Eigen::MatrixXd cosine_similarity(const Eigen::MatrixXd& features) {
  const Eigen::Index n = features.rows();
  Eigen::VectorXd norms = features.rowwise().norm();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (norms[i] == 0.0) {
      throw Error(ErrorCode::kDegenerateFeature,
                  "feature row " + std::to_string(i) + " is all zero; cosine similarity undefined");
    }
  }
  const Eigen::MatrixXd unit = norms.cwiseInverse().asDiagonal() * features;
  Eigen::MatrixXd sim = unit * unit.transpose();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      const double v = std::max(0.0, std::min(1.0, 0.5 * (sim(i, j) + sim(j, i))));
      sim(i, j) = v;
      sim(j, i) = v;
    }
    sim(j, j) = 0.0;
  }
  return sim;
}

GraphBundle knn_graph(const Eigen::MatrixXd& sim, std::size_t k) {
  const Eigen::Index n = sim.rows();
  if (sim.cols() != n) throw Error(ErrorCode::kShape, "knn_graph: similarity matrix must be square");
  if (k < 1 || k + 1 > static_cast<std::size_t>(n)) {
    throw Error(ErrorCode::kInvalidArgument,
                "knn_graph: need 1 <= k <= n-1, got k=" + std::to_string(k) + " n=" + std::to_string(n));
  }
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  std::vector<double> row;
  row.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    row.clear();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) row.push_back(sim(i, j));
    }
    std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(k - 1), row.end(),
                     std::greater<>());
    const double kth = row[k - 1];
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i && sim(i, j) >= kth) {
        w(i, j) = sim(i, j);
        w(j, i) = sim(j, i);
      }
    }
  }
  // The similarity may carry rounding asymmetry; make W exactly symmetric.
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      const double v = std::max(w(i, j), w(j, i));
      w(i, j) = v;
      w(j, i) = v;
    }
  }
  return make_graph(std::move(w));
}

GraphBundle make_graph(Eigen::MatrixXd w) {
  const Eigen::Index n = w.rows();
  if (w.cols() != n) throw Error(ErrorCode::kShape, "weight matrix must be square");
  for (Eigen::Index j = 0; j < n; ++j) {
    if (w(j, j) != 0.0) throw Error(ErrorCode::kInvalidArgument, "weight matrix must have zero diagonal");
    for (Eigen::Index i = 0; i < n; ++i) {
      if (w(i, j) < 0.0 || w(i, j) != w(j, i)) {
        throw Error(ErrorCode::kSymmetry, "weight matrix must be symmetric and nonnegative");
      }
    }
  }
  GraphBundle g;
  g.degrees = w.rowwise().sum();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(g.degrees[i] > 0.0)) {
      throw Error(ErrorCode::kIsolatedVertex,
                  "vertex " + std::to_string(i) + " has no edges; increase k_neighbors");
    }
  }
  g.lap_unnorm = -w;
  g.lap_unnorm.diagonal() = g.degrees;
  const Eigen::VectorXd inv_sqrt = g.degrees.cwiseSqrt().cwiseInverse();
  g.lap_norm_sym = inv_sqrt.asDiagonal() * w * inv_sqrt.asDiagonal();
  g.lap_norm_sym = 0.5 * (g.lap_norm_sym + g.lap_norm_sym.transpose()).eval();
  g.component_count = connected_components(w).count;
  g.w = std::move(w);
  return g;
}

Components connected_components(const Eigen::MatrixXd& w) {
  const auto n = static_cast<std::size_t>(w.rows());
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  Components c;
  c.label.assign(n, kUnset);
  std::deque<std::size_t> queue;
  for (std::size_t s = 0; s < n; ++s) {
    if (c.label[s] != kUnset) continue;
    c.label[s] = c.count;
    queue.push_back(s);
    while (!queue.empty()) {
      const std::size_t v = queue.front();
      queue.pop_front();
      for (std::size_t j = 0; j < n; ++j) {
        if (c.label[j] == kUnset && w(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(j)) > 0.0) {
          c.label[j] = c.count;
          queue.push_back(j);
        }
      }
    }
    ++c.count;
  }
  return c;
}

}  // namespace transrad
