#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>

#include <Eigen/Dense>

namespace transrad {

enum class ComplexityMethod { kGenericEq22, kKernelEq25, kMcEq26, kExactOracle };

const char* to_string(ComplexityMethod method) noexcept;

/// One estimate of (1/m + 1/u) E sup_v sigma^T v.
struct ComplexityEstimate {
  ComplexityMethod method = ComplexityMethod::kGenericEq22;
  double value = 0.0;                 // Monte-Carlo: the upper confidence bound
  std::optional<double> mc_mean;      // raw sample mean of the supremum (not scaled by Q)
  std::optional<double> mc_lower;     // Q (mean - slack); exact suprema only
  std::optional<std::size_t> n_samples;
  std::optional<double> delta;
  double p = 0.0;
};

/// mu1 sqrt(2 / (m u)) ||U||_F.
double generic_ulr_bound(const Eigen::MatrixXd& u_mat, double mu1, std::size_t m, std::size_t u);

/// Same bound from the singular values of U.
double generic_ulr_bound_from_spectrum(std::span<const double> singular_values, double mu1,
                                       std::size_t m, std::size_t u);

/// mu2 sqrt(2 trace(U) / (m u)); U must be symmetric positive semidefinite.
double kernel_ulr_bound(const Eigen::MatrixXd& u_mat, double mu2, std::size_t m, std::size_t u);

/// Same bound from the eigenvalues of a kernel U.
double kernel_ulr_bound_from_spectrum(std::span<const double> eigenvalues, double mu2,
                                      std::size_t m, std::size_t u);

/// sup over ||alpha|| <= mu1 of sigma^T U alpha = mu1 ||U^T sigma||.
double sup_ball(const Eigen::VectorXd& sigma, const Eigen::MatrixXd& u_mat, double mu1);

/// Sum of the m largest entries of |sigma^T U|.
double sup_vanilla(const Eigen::VectorXd& sigma, const Eigen::MatrixXd& u_mat, std::size_t m);

/// sup over alpha^T U alpha <= mu2^2 of sigma^T U alpha = mu2 sqrt(sigma^T U sigma).
double sup_kernel(const Eigen::VectorXd& sigma, const Eigen::MatrixXd& u_mat, double mu2);

/// sigma -> sup_{v in V} sigma^T v for some hypothesis set V.
class SupremumOracle {
 public:
  virtual ~SupremumOracle() = default;
  virtual std::size_t dimension() const = 0;
  virtual double sup(std::span<const double> sigma) const = 0;
  /// Columns of `sigmas` are independent draws; writes one supremum per column.
  virtual void sup_batch(const Eigen::MatrixXd& sigmas, std::span<double> out) const;
};

/// Ball family {U alpha : ||alpha|| <= mu1}.
class BallSupremum final : public SupremumOracle {
 public:
  BallSupremum(const Eigen::MatrixXd& u_mat, double mu1);
  /// U = V diag(lambda) V^T with orthonormal columns V.
  BallSupremum(const Eigen::MatrixXd& v, const Eigen::VectorXd& lambda, double mu1);

  std::size_t dimension() const override { return static_cast<std::size_t>(g_.cols()); }
  double sup(std::span<const double> sigma) const override;
  void sup_batch(const Eigen::MatrixXd& sigmas, std::span<double> out) const override;

 private:
  Eigen::MatrixXd g_;  // ||U^T sigma|| = ||g_ sigma||
  double mu1_;
};

/// Vanilla family: alpha with m entries +-1 and the rest 0.
class VanillaSupremum final : public SupremumOracle {
 public:
  VanillaSupremum(const Eigen::MatrixXd& u_mat, std::size_t m);
  /// Symmetric U = V diag(lambda) V^T; kept in factored form when that is cheaper.
  VanillaSupremum(const Eigen::MatrixXd& v, const Eigen::VectorXd& lambda, std::size_t m);

  std::size_t dimension() const override;
  double sup(std::span<const double> sigma) const override;
  void sup_batch(const Eigen::MatrixXd& sigmas, std::span<double> out) const override;

 private:
  double top_m_abs(Eigen::Ref<Eigen::VectorXd> t) const;

  Eigen::MatrixXd ut_;      // dense U^T, empty when factored
  Eigen::MatrixXd v_;       // factor, empty when dense
  Eigen::VectorXd lambda_;
  std::size_t m_;
};

/// Kernel family {U alpha : alpha^T U alpha <= mu2^2}.
class KernelSupremum final : public SupremumOracle {
 public:
  KernelSupremum(const Eigen::MatrixXd& u_mat, double mu2);
  KernelSupremum(const Eigen::MatrixXd& v, const Eigen::VectorXd& lambda, double mu2);

  std::size_t dimension() const override { return static_cast<std::size_t>(g_.cols()); }
  double sup(std::span<const double> sigma) const override;
  void sup_batch(const Eigen::MatrixXd& sigmas, std::span<double> out) const override;

 private:
  Eigen::MatrixXd g_;  // sigma^T U sigma = ||g_ sigma||^2
  double mu2_;
};

/// Finite hypothesis set; columns of `vectors` are the members.
class FiniteSetSupremum final : public SupremumOracle {
 public:
  explicit FiniteSetSupremum(Eigen::MatrixXd vectors);

  std::size_t dimension() const override { return static_cast<std::size_t>(vectors_.rows()); }
  double sup(std::span<const double> sigma) const override;
  void sup_batch(const Eigen::MatrixXd& sigmas, std::span<double> out) const override;

 private:
  Eigen::MatrixXd vectors_;
};

/// Wraps an arbitrary callable.
class FunctionSupremum final : public SupremumOracle {
 public:
  FunctionSupremum(std::size_t dimension, std::function<double(std::span<const double>)> f);

  std::size_t dimension() const override { return dim_; }
  double sup(std::span<const double> sigma) const override { return f_(sigma); }

 private:
  std::size_t dim_;
  std::function<double(std::span<const double>)> f_;
};

/// Monte-Carlo estimate with a one-sided Hoeffding band. The supremum is
/// bounded by b mu1 lambda_max with b = sqrt(m+u). Draw i uses stream i of
/// `seed`. p defaults to mu / (m+u)^2.
ComplexityEstimate mc_complexity(const SupremumOracle& oracle, std::size_t m, std::size_t u,
                                 std::size_t n_samples, double delta, std::uint64_t seed,
                                 double mu1, double lambda_max_sv, bool exact_sup,
                                 std::optional<double> p = std::nullopt);

/// As above with the bound on |sup| supplied directly.
ComplexityEstimate mc_complexity_with_range(const SupremumOracle& oracle, std::size_t m,
                                            std::size_t u, std::size_t n_samples, double delta,
                                            std::uint64_t seed, double sup_bound, bool exact_sup,
                                            std::optional<double> p = std::nullopt);

/// Largest m+u accepted by exact_oracle.
inline constexpr std::size_t kExactOracleMaxSize = 12;

/// (1/m + 1/u) E sup by enumerating every sigma in {-1, 0, 1}^{m+u}.
double exact_oracle(const SupremumOracle& oracle, std::size_t m, std::size_t u, double p);

}  // namespace transrad
