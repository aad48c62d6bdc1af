#pragma once

#include <Eigen/Dense>

namespace transrad {

struct EigenDecomposition {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // column i pairs with eigenvalues[i]
};

struct SpectralTolerances {
  double symmetry = 1e-10;        // max |a - a^T| relative to ||a||_F
  double jacobi_offdiag = 1e-12;  // stop when off-diagonal mass < this * ||a||_F
  int jacobi_max_sweeps = 100;
  double hard_case = 1e-10;       // bottom-eigenspace share of ||b|| treated as zero
  double secular_offset = 1e-12;  // lower bracket offset above -lambda_min
};

/// Cyclic Jacobi with threshold sweeps. Eigenvectors are normalized so that
/// their largest-magnitude entry is positive.
EigenDecomposition sym_eig(const Eigen::MatrixXd& a, const SpectralTolerances& tol = {});

/// Ascending singular values. Symmetric inputs use |eigenvalues|; others go
/// through the smaller Gram matrix.
Eigen::VectorXd singular_values(const Eigen::MatrixXd& u_mat, const SpectralTolerances& tol = {});

/// Dense LU solve; throws on a numerically singular system.
Eigen::VectorXd solve_linear(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

struct SphereSolution {
  Eigen::VectorXd x;
  double multiplier = 0.0;  // lambda* with (A + lambda* I) x = b
  bool hard_case = false;
};

/// Minimizes x^T A x - 2 b^T x over ||x||_2 = radius.
SphereSolution sphere_constrained_min(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                      double radius, const SpectralTolerances& tol = {});

/// Applies the sign convention used by sym_eig to a single vector.
void canonicalize_sign(Eigen::Ref<Eigen::VectorXd> v);

}  // namespace transrad
