#include "transrad/algorithms.hpp"

#include <cmath>
#include <string>

#include "transrad/error.hpp"

namespace transrad {
namespace {

void check_sizes(const GraphBundle& graph, const LabelVector& tau) {
  if (graph.size() != tau.size()) {
    throw Error(ErrorCode::kShape, "graph has " + std::to_string(graph.size()) +
                                       " vertices but the label vector has " +
                                       std::to_string(tau.size()) + " entries");
  }
}

void check_positive_c(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw Error(ErrorCode::kInvalidHyperparameter, "c must be positive and finite");
  }
}

// Diagonal of C: 1/m on training points.
Eigen::VectorXd train_weights(const LabelVector& tau) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(tau.size()));
  const double inv_m = 1.0 / static_cast<double>(tau.m());
  for (std::size_t i : tau.partition().train()) w[static_cast<Eigen::Index>(i)] = inv_m;
  return w;
}

// Number of leading eigenvalues of D - W that belong to the null space.
std::size_t null_dimension(const GraphBundle& graph, const EigenDecomposition& eig) {
  const std::size_t k = graph.component_count;
  const double scale = graph.lap_unnorm.norm();
  for (std::size_t i = 0; i < k; ++i) {
    if (std::abs(eig.eigenvalues[static_cast<Eigen::Index>(i)]) > 1e-8 * scale) {
      throw Error(ErrorCode::kConvergence,
                  "Laplacian spectrum disagrees with the component count");
    }
  }
  return k;
}

void check_laplacian_eig(const GraphBundle& graph, const EigenDecomposition& eig) {
  if (static_cast<std::size_t>(eig.eigenvalues.size()) != graph.size() ||
      static_cast<std::size_t>(eig.eigenvectors.rows()) != graph.size()) {
    throw Error(ErrorCode::kShape, "Laplacian eigendecomposition does not match the graph");
  }
}

}  // namespace

LabelVector::LabelVector(const Partition& part, const std::vector<int>& labels)
    : part_(part), tau_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(part.total()))) {
  if (labels.size() != part.total()) {
    throw Error(ErrorCode::kShape, "label count differs from the partition size");
  }
  for (std::size_t i : part_.train()) {
    if (labels[i] != 1 && labels[i] != -1) throw Error(ErrorCode::kLabel, "labels must be +1 or -1");
    tau_[static_cast<Eigen::Index>(i)] = labels[i];
  }
}

UlrModel consistency_method(const GraphBundle& graph, const LabelVector& tau, double beta,
                            bool materialize_u) {
  check_sizes(graph, tau);
  if (!(beta > 0.0 && beta < 1.0)) {
    throw Error(ErrorCode::kInvalidHyperparameter, "beta must lie in (0, 1)");
  }
  const auto n = static_cast<Eigen::Index>(graph.size());
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - beta * graph.lap_norm_sym;

  UlrModel model;
  model.alpha = tau.tau();
  model.h = solve_linear(a, (1.0 - beta) * tau.tau());
  model.mu1 = std::sqrt(static_cast<double>(tau.m()));
  model.mu2 = model.mu1;
  model.is_kernel = true;
  model.family = HypothesisFamily::kVanilla;
  if (materialize_u) model.u_mat = cm_kernel(graph, beta);
  return model;
}

Eigen::MatrixXd cm_kernel(const GraphBundle& graph, double beta) {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw Error(ErrorCode::kInvalidHyperparameter, "beta must lie in (0, 1)");
  }
  const auto n = static_cast<Eigen::Index>(graph.size());
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - beta * graph.lap_norm_sym;
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  if (!(lu.rcond() > 1e-14)) {
    throw Error(ErrorCode::kSingularSystem, "I - beta L is singular to working precision");
  }
  Eigen::MatrixXd u = (1.0 - beta) * lu.solve(Eigen::MatrixXd::Identity(n, n));
  if ((a * u - (1.0 - beta) * Eigen::MatrixXd::Identity(n, n)).norm() >
      1e-8 * (a.norm() * u.norm() + std::sqrt(static_cast<double>(n)))) {
    throw Error(ErrorCode::kSingularSystem, "CM kernel failed its residual check");
  }
  return 0.5 * (u + u.transpose());
}

UlrModel sgt(const GraphBundle& graph, const LabelVector& tau, double c, std::size_t r) {
  if (graph.component_count != 1) {
    throw Error(ErrorCode::kDisconnectedGraph,
                "SGT needs a connected graph; it has " + std::to_string(graph.component_count) +
                    " components");
  }
  return sgt(graph, tau, c, r, sym_eig(graph.lap_unnorm));
}

UlrModel sgt(const GraphBundle& graph, const LabelVector& tau, double c, std::size_t r,
             const EigenDecomposition& laplacian_eig) {
  check_sizes(graph, tau);
  check_positive_c(c);
  check_laplacian_eig(graph, laplacian_eig);
  const std::size_t n = graph.size();
  if (graph.component_count != 1) {
    throw Error(ErrorCode::kDisconnectedGraph,
                "SGT needs a connected graph; it has " + std::to_string(graph.component_count) +
                    " components");
  }
  if (r < 1 || r + 1 > n) {
    throw Error(ErrorCode::kInvalidRank,
                "need 1 <= r <= n-1, got r=" + std::to_string(r) + " n=" + std::to_string(n));
  }
  const auto ri = static_cast<Eigen::Index>(r);

  UlrModel model;
  model.u_mat = laplacian_eig.eigenvectors.middleCols(1, ri);
  const Eigen::VectorXd cw = c * train_weights(tau);
  const Eigen::MatrixXd weighted = cw.asDiagonal() * model.u_mat;

  Eigen::MatrixXd a = model.u_mat.transpose() * weighted;
  for (Eigen::Index i = 0; i < ri; ++i) {
    const double idx = static_cast<double>(i + 2);
    a(i, i) += idx * idx;
  }
  a = 0.5 * (a + a.transpose()).eval();
  const Eigen::VectorXd b = weighted.transpose() * tau.tau();

  const double radius = std::sqrt(static_cast<double>(n));
  model.alpha = sphere_constrained_min(a, b, radius).x;
  model.h = model.u_mat * model.alpha;
  model.mu1 = radius;
  model.is_kernel = false;
  model.family = HypothesisFamily::kBall;
  return model;
}

UlrModel tikhonov_belkin(const GraphBundle& graph, const LabelVector& tau, double c) {
  return tikhonov_belkin(graph, tau, c, sym_eig(graph.lap_unnorm));
}

UlrModel tikhonov_belkin(const GraphBundle& graph, const LabelVector& tau, double c,
                         const EigenDecomposition& laplacian_eig) {
  check_sizes(graph, tau);
  check_positive_c(c);
  check_laplacian_eig(graph, laplacian_eig);
  const auto n = static_cast<Eigen::Index>(graph.size());
  const std::size_t k = null_dimension(graph, laplacian_eig);
  const auto ki = static_cast<Eigen::Index>(k);

  // One zero-mean constraint per component, written with unit-norm indicators.
  const Components comps = connected_components(graph.w);
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, ki);
  for (Eigen::Index i = 0; i < n; ++i) e(i, static_cast<Eigen::Index>(comps.label[static_cast<std::size_t>(i)])) = 1.0;
  for (Eigen::Index j = 0; j < ki; ++j) e.col(j).normalize();

  const Eigen::VectorXd cw = c * train_weights(tau);
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + ki, n + ki);
  kkt.topLeftCorner(n, n) = 2.0 * graph.lap_unnorm;
  kkt.topLeftCorner(n, n).diagonal() += 2.0 * cw;
  kkt.topRightCorner(n, ki) = e;
  kkt.bottomLeftCorner(ki, n) = e.transpose();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + ki);
  rhs.head(n) = 2.0 * cw.cwiseProduct(tau.tau());

  UlrModel model;
  model.h = solve_linear(kkt, rhs).head(n);

  const Eigen::MatrixXd vr = laplacian_eig.eigenvectors.rightCols(n - ki);
  const Eigen::VectorXd lam = laplacian_eig.eigenvalues.tail(n - ki);
  model.u_mat = vr * lam.cwiseInverse().asDiagonal() * vr.transpose();
  model.u_mat = 0.5 * (model.u_mat + model.u_mat.transpose()).eval();
  model.alpha = vr * lam.asDiagonal() * (vr.transpose() * model.h);
  model.mu2 = std::sqrt(c);
  model.is_kernel = true;
  model.family = HypothesisFamily::kKernel;
  return model;
}

}  // namespace transrad
