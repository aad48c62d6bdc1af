#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "transrad/core.hpp"
#include "transrad/graph.hpp"
#include "transrad/spectral.hpp"

namespace transrad {

/// Which hypothesis set the certified norm describes.
///   kBall     {U a : ||a||_2 <= mu1}
///   kVanilla  {U a : a has m entries +-1, the rest 0}
///   kKernel   {U a : a^T U a <= mu2^2}, U positive semidefinite
enum class HypothesisFamily { kBall, kVanilla, kKernel };

/// Soft output h = U alpha together with the norms that certify its class.
struct UlrModel {
  Eigen::MatrixXd u_mat;  // may be empty when the algorithm did not need it
  Eigen::VectorXd alpha;
  Eigen::VectorXd h;
  std::optional<double> mu1;
  std::optional<double> mu2;
  bool is_kernel = false;
  HypothesisFamily family = HypothesisFamily::kBall;
};

/// tau_i = y_i on the training indices of `part`, 0 elsewhere.
class LabelVector {
 public:
  /// `labels` covers the full sample; only the training entries are read.
  LabelVector(const Partition& part, const std::vector<int>& labels);

  const Eigen::VectorXd& tau() const noexcept { return tau_; }
  const Partition& partition() const noexcept { return part_; }
  std::size_t m() const noexcept { return part_.m(); }
  std::size_t size() const noexcept { return part_.total(); }

 private:
  Partition part_;
  Eigen::VectorXd tau_;
};

/// Consistency method. h solves (I - beta L_norm) h = (1 - beta) tau. U is
/// only materialized on request.
UlrModel consistency_method(const GraphBundle& graph, const LabelVector& tau, double beta,
                            bool materialize_u = false);

/// (1 - beta)(I - beta L_norm)^{-1}, symmetrized.
Eigen::MatrixXd cm_kernel(const GraphBundle& graph, double beta);

/// Spectral graph transducer over the eigenvectors 2..r+1 of D - W with
/// eigenvalue i replaced by i^2; solved in coefficient space on the sphere
/// ||alpha|| = sqrt(m+u).
UlrModel sgt(const GraphBundle& graph, const LabelVector& tau, double c, std::size_t r);
UlrModel sgt(const GraphBundle& graph, const LabelVector& tau, double c, std::size_t r,
             const EigenDecomposition& laplacian_eig);

/// Tikhonov regularization with a zero-mean constraint per connected component.
/// U is the pseudo-inverse of D - W.
UlrModel tikhonov_belkin(const GraphBundle& graph, const LabelVector& tau, double c);
UlrModel tikhonov_belkin(const GraphBundle& graph, const LabelVector& tau, double c,
                         const EigenDecomposition& laplacian_eig);

}  // namespace transrad
