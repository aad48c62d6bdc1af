#include "transrad/rademacher.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "transrad/core.hpp"
#include "transrad/error.hpp"
#include "transrad/spectral.hpp"

namespace transrad {
namespace {

constexpr Eigen::Index kBatch = 512;

void check_counts(std::size_t m, std::size_t u) {
  if (m < 1 || u < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "need m >= 1 and u >= 1, got m=" + std::to_string(m) + " u=" + std::to_string(u));
  }
}

void check_nonnegative(double x, const char* name) {
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw Error(ErrorCode::kInvalidArgument, std::string(name) + " must be finite and >= 0");
  }
}

double q_const(std::size_t m, std::size_t u) {
  return 1.0 / static_cast<double>(m) + 1.0 / static_cast<double>(u);
}

double resolve_p(std::optional<double> p, std::size_t m, std::size_t u) {
  const double value = p ? *p : default_rademacher_p(m, u);
  if (!(value >= 0.0 && value <= 0.5)) {
    throw Error(ErrorCode::kInvalidProbability, "p must lie in [0, 1/2]");
  }
  return value;
}

Eigen::Map<const Eigen::VectorXd> as_vector(std::span<const double> s) {
  return {s.data(), static_cast<Eigen::Index>(s.size())};
}

void check_dimension(std::size_t expected, std::size_t got) {
  if (expected != got) {
    throw Error(ErrorCode::kShape, "sigma has length " + std::to_string(got) + ", expected " +
                                       std::to_string(expected));
  }
}

void check_factor(const Eigen::MatrixXd& v, const Eigen::VectorXd& lambda) {
  if (v.cols() != lambda.size()) {
    throw Error(ErrorCode::kShape, "factor has " + std::to_string(v.cols()) + " columns but " +
                                       std::to_string(lambda.size()) + " weights");
  }
}

double trace_bound_from_sum(double trace, double mu2, std::size_t m, std::size_t u) {
  return mu2 * std::sqrt(std::max(0.0, 2.0 * trace / (static_cast<double>(m) * static_cast<double>(u))));
}

}  // namespace

const char* to_string(ComplexityMethod method) noexcept {
  switch (method) {
    case ComplexityMethod::kGenericEq22: return "generic_eq22";
    case ComplexityMethod::kKernelEq25: return "kernel_eq25";
    case ComplexityMethod::kMcEq26: return "mc_eq26";
    case ComplexityMethod::kExactOracle: return "exact_oracle";
  }
  return "unknown";
}

double generic_ulr_bound(const Eigen::MatrixXd& u_mat, double mu1, std::size_t m, std::size_t u) {
  check_counts(m, u);
  check_nonnegative(mu1, "mu1");
  return mu1 * std::sqrt(2.0 / (static_cast<double>(m) * static_cast<double>(u))) * u_mat.norm();
}

double generic_ulr_bound_from_spectrum(std::span<const double> singular_values, double mu1,
                                       std::size_t m, std::size_t u) {
  check_counts(m, u);
  check_nonnegative(mu1, "mu1");
  CompensatedSum sq;
  for (double s : singular_values) sq.add(s * s);
  return mu1 * std::sqrt(2.0 * sq.value() / (static_cast<double>(m) * static_cast<double>(u)));
}

double kernel_ulr_bound(const Eigen::MatrixXd& u_mat, double mu2, std::size_t m, std::size_t u) {
  check_counts(m, u);
  check_nonnegative(mu2, "mu2");
  if (u_mat.rows() != u_mat.cols()) throw Error(ErrorCode::kShape, "kernel U must be square");
  if (u_mat.size() == 0) return 0.0;
  const EigenDecomposition ed = sym_eig(u_mat);
  if (ed.eigenvalues[0] < -1e-8 * u_mat.norm()) {
    throw Error(ErrorCode::kNotAKernel, "U has a negative eigenvalue; not a kernel");
  }
  return trace_bound_from_sum(u_mat.trace(), mu2, m, u);
}

double kernel_ulr_bound_from_spectrum(std::span<const double> eigenvalues, double mu2,
                                      std::size_t m, std::size_t u) {
  check_counts(m, u);
  check_nonnegative(mu2, "mu2");
  CompensatedSum trace;
  CompensatedSum sq;
  double lowest = 0.0;
  for (double l : eigenvalues) {
    trace.add(l);
    sq.add(l * l);
    lowest = std::min(lowest, l);
  }
  if (lowest < -1e-8 * std::sqrt(sq.value())) {
    throw Error(ErrorCode::kNotAKernel, "spectrum has a negative eigenvalue; not a kernel");
  }
  return trace_bound_from_sum(trace.value(), mu2, m, u);
}

double sup_ball(const Eigen::VectorXd& sigma, const Eigen::MatrixXd& u_mat, double mu1) {
  if (sigma.size() != u_mat.rows()) throw Error(ErrorCode::kShape, "sigma and U disagree in length");
  return mu1 * (u_mat.transpose() * sigma).norm();
}

double sup_vanilla(const Eigen::VectorXd& sigma, const Eigen::MatrixXd& u_mat, std::size_t m) {
  if (sigma.size() != u_mat.rows()) throw Error(ErrorCode::kShape, "sigma and U disagree in length");
  if (m > static_cast<std::size_t>(u_mat.cols())) {
    throw Error(ErrorCode::kInvalidArgument, "m exceeds the number of columns of U");
  }
  Eigen::VectorXd t = (u_mat.transpose() * sigma).cwiseAbs();
  std::sort(t.data(), t.data() + t.size(), std::greater<>());
  return t.head(static_cast<Eigen::Index>(m)).sum();
}

double sup_kernel(const Eigen::VectorXd& sigma, const Eigen::MatrixXd& u_mat, double mu2) {
  if (sigma.size() != u_mat.rows() || u_mat.rows() != u_mat.cols()) {
    throw Error(ErrorCode::kShape, "sigma and U disagree in length");
  }
  return mu2 * std::sqrt(std::max(0.0, sigma.dot(u_mat * sigma)));
}

void SupremumOracle::sup_batch(const Eigen::MatrixXd& sigmas, std::span<double> out) const {
  for (Eigen::Index j = 0; j < sigmas.cols(); ++j) {
    out[static_cast<std::size_t>(j)] =
        sup(std::span<const double>(sigmas.col(j).data(), static_cast<std::size_t>(sigmas.rows())));
  }
}

BallSupremum::BallSupremum(const Eigen::MatrixXd& u_mat, double mu1)
    : g_(u_mat.transpose()), mu1_(mu1) {
  check_nonnegative(mu1, "mu1");
}

BallSupremum::BallSupremum(const Eigen::MatrixXd& v, const Eigen::VectorXd& lambda, double mu1)
    : mu1_(mu1) {
  check_factor(v, lambda);
  check_nonnegative(mu1, "mu1");
  g_ = lambda.asDiagonal() * v.transpose();
}

double BallSupremum::sup(std::span<const double> sigma) const {
  check_dimension(dimension(), sigma.size());
  return mu1_ * (g_ * as_vector(sigma)).norm();
}

void BallSupremum::sup_batch(const Eigen::MatrixXd& sigmas, std::span<double> out) const {
  check_dimension(dimension(), static_cast<std::size_t>(sigmas.rows()));
  const Eigen::MatrixXd t = g_ * sigmas;
  for (Eigen::Index j = 0; j < t.cols(); ++j) out[static_cast<std::size_t>(j)] = mu1_ * t.col(j).norm();
}

VanillaSupremum::VanillaSupremum(const Eigen::MatrixXd& u_mat, std::size_t m)
    : ut_(u_mat.transpose()), m_(m) {
  if (m < 1 || m > static_cast<std::size_t>(u_mat.cols())) {
    throw Error(ErrorCode::kInvalidArgument, "vanilla family needs 1 <= m <= columns of U");
  }
}

VanillaSupremum::VanillaSupremum(const Eigen::MatrixXd& v, const Eigen::VectorXd& lambda,
                                 std::size_t m)
    : m_(m) {
  check_factor(v, lambda);
  if (m < 1 || m > static_cast<std::size_t>(v.rows())) {
    throw Error(ErrorCode::kInvalidArgument, "vanilla family needs 1 <= m <= m+u");
  }
  if (2 * v.cols() < v.rows()) {
    v_ = v;
    lambda_ = lambda;
  } else {
    ut_ = v * lambda.asDiagonal() * v.transpose();
  }
}

std::size_t VanillaSupremum::dimension() const {
  return static_cast<std::size_t>(v_.size() > 0 ? v_.rows() : ut_.cols());
}

double VanillaSupremum::top_m_abs(Eigen::Ref<Eigen::VectorXd> t) const {
  double* begin = t.data();
  double* end = begin + t.size();
  for (double* it = begin; it != end; ++it) *it = std::abs(*it);
  const auto k = static_cast<std::ptrdiff_t>(m_);
  if (k < t.size()) std::nth_element(begin, begin + k - 1, end, std::greater<>());
  std::sort(begin, begin + k, std::greater<>());  // fixed summation order
  double s = 0.0;
  for (std::ptrdiff_t i = 0; i < k; ++i) s += begin[i];
  return s;
}

double VanillaSupremum::sup(std::span<const double> sigma) const {
  check_dimension(dimension(), sigma.size());
  Eigen::VectorXd t = v_.size() > 0 ? Eigen::VectorXd(v_ * lambda_.cwiseProduct(v_.transpose() * as_vector(sigma)))
                                    : Eigen::VectorXd(ut_ * as_vector(sigma));
  return top_m_abs(t);
}

void VanillaSupremum::sup_batch(const Eigen::MatrixXd& sigmas, std::span<double> out) const {
  check_dimension(dimension(), static_cast<std::size_t>(sigmas.rows()));
  Eigen::MatrixXd t;
  if (v_.size() > 0) {
    t = v_ * (lambda_.asDiagonal() * (v_.transpose() * sigmas));
  } else {
    t = ut_ * sigmas;
  }
  for (Eigen::Index j = 0; j < t.cols(); ++j) out[static_cast<std::size_t>(j)] = top_m_abs(t.col(j));
}

KernelSupremum::KernelSupremum(const Eigen::MatrixXd& u_mat, double mu2) : mu2_(mu2) {
  check_nonnegative(mu2, "mu2");
  if (u_mat.rows() != u_mat.cols()) throw Error(ErrorCode::kShape, "kernel U must be square");
  const EigenDecomposition ed = sym_eig(u_mat);
  if (u_mat.size() > 0 && ed.eigenvalues[0] < -1e-8 * u_mat.norm()) {
    throw Error(ErrorCode::kNotAKernel, "U has a negative eigenvalue; not a kernel");
  }
  g_ = ed.eigenvalues.cwiseMax(0.0).cwiseSqrt().asDiagonal() * ed.eigenvectors.transpose();
}

KernelSupremum::KernelSupremum(const Eigen::MatrixXd& v, const Eigen::VectorXd& lambda, double mu2)
    : mu2_(mu2) {
  check_factor(v, lambda);
  check_nonnegative(mu2, "mu2");
  if (lambda.size() > 0 && lambda.minCoeff() < -1e-8 * lambda.norm()) {
    throw Error(ErrorCode::kNotAKernel, "spectrum has a negative eigenvalue; not a kernel");
  }
  g_ = lambda.cwiseMax(0.0).cwiseSqrt().asDiagonal() * v.transpose();
}

double KernelSupremum::sup(std::span<const double> sigma) const {
  check_dimension(dimension(), sigma.size());
  return mu2_ * (g_ * as_vector(sigma)).norm();
}

void KernelSupremum::sup_batch(const Eigen::MatrixXd& sigmas, std::span<double> out) const {
  check_dimension(dimension(), static_cast<std::size_t>(sigmas.rows()));
  const Eigen::MatrixXd t = g_ * sigmas;
  for (Eigen::Index j = 0; j < t.cols(); ++j) out[static_cast<std::size_t>(j)] = mu2_ * t.col(j).norm();
}

FiniteSetSupremum::FiniteSetSupremum(Eigen::MatrixXd vectors) : vectors_(std::move(vectors)) {
  if (vectors_.cols() == 0) throw Error(ErrorCode::kInvalidArgument, "hypothesis set is empty");
}

double FiniteSetSupremum::sup(std::span<const double> sigma) const {
  check_dimension(dimension(), sigma.size());
  return (vectors_.transpose() * as_vector(sigma)).maxCoeff();
}

void FiniteSetSupremum::sup_batch(const Eigen::MatrixXd& sigmas, std::span<double> out) const {
  check_dimension(dimension(), static_cast<std::size_t>(sigmas.rows()));
  const Eigen::MatrixXd t = vectors_.transpose() * sigmas;
  for (Eigen::Index j = 0; j < t.cols(); ++j) out[static_cast<std::size_t>(j)] = t.col(j).maxCoeff();
}

FunctionSupremum::FunctionSupremum(std::size_t dimension,
                                   std::function<double(std::span<const double>)> f)
    : dim_(dimension), f_(std::move(f)) {
  if (!f_) throw Error(ErrorCode::kInvalidArgument, "supremum function is empty");
}

ComplexityEstimate mc_complexity(const SupremumOracle& oracle, std::size_t m, std::size_t u,
                                 std::size_t n_samples, double delta, std::uint64_t seed,
                                 double mu1, double lambda_max_sv, bool exact_sup,
                                 std::optional<double> p) {
  check_nonnegative(mu1, "mu1");
  check_nonnegative(lambda_max_sv, "lambda_max_sv");
  const double b = std::sqrt(static_cast<double>(m + u));
  return mc_complexity_with_range(oracle, m, u, n_samples, delta, seed, b * mu1 * lambda_max_sv,
                                  exact_sup, p);
}

ComplexityEstimate mc_complexity_with_range(const SupremumOracle& oracle, std::size_t m,
                                            std::size_t u, std::size_t n_samples, double delta,
                                            std::uint64_t seed, double sup_bound, bool exact_sup,
                                            std::optional<double> p) {
  check_counts(m, u);
  if (n_samples == 0) throw Error(ErrorCode::kInvalidSampleCount, "need at least one sample");
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::kInvalidConfidence, "delta must lie in (0, 1)");
  check_nonnegative(sup_bound, "sup bound");
  const double prob = resolve_p(p, m, u);
  const std::size_t dim = m + u;
  check_dimension(oracle.dimension(), dim);

  const auto rows = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXd sigmas(rows, kBatch);
  std::vector<double> sups(static_cast<std::size_t>(kBatch));
  CompensatedSum sum;
  for (std::size_t start = 0; start < n_samples; start += static_cast<std::size_t>(kBatch)) {
    const auto count = static_cast<Eigen::Index>(std::min<std::size_t>(kBatch, n_samples - start));
    if (count != sigmas.cols()) sigmas.resize(rows, count);
    for (Eigen::Index j = 0; j < count; ++j) {
      CounterRng rng(seed, start + static_cast<std::size_t>(j));
      fill_rademacher(rng, prob, std::span<double>(sigmas.col(j).data(), dim));
    }
    oracle.sup_batch(sigmas, std::span<double>(sups.data(), static_cast<std::size_t>(count)));
    for (Eigen::Index j = 0; j < count; ++j) sum.add(sups[static_cast<std::size_t>(j)]);
  }

  const double q = q_const(m, u);
  const double mean = sum.value() / static_cast<double>(n_samples);
  const double slack = sup_bound * std::sqrt(2.0 * std::log(1.0 / delta) / static_cast<double>(n_samples));

  ComplexityEstimate est;
  est.method = ComplexityMethod::kMcEq26;
  est.value = q * (mean + slack);
  est.mc_mean = mean;
  if (exact_sup) est.mc_lower = q * (mean - slack);
  est.n_samples = n_samples;
  est.delta = delta;
  est.p = prob;
  return est;
}

double exact_oracle(const SupremumOracle& oracle, std::size_t m, std::size_t u, double p) {
  check_counts(m, u);
  const std::size_t n = m + u;
  if (n > kExactOracleMaxSize) {
    throw Error(ErrorCode::kTooLarge, "exact enumeration refused for m+u=" + std::to_string(n) +
                                          " (limit " + std::to_string(kExactOracleMaxSize) + ")");
  }
  const double prob = resolve_p(p, m, u);
  check_dimension(oracle.dimension(), n);

  // Alphabet and per-entry probabilities; zero-probability symbols are skipped.
  std::vector<double> symbols;
  std::vector<double> weights;
  if (prob < 0.5) {
    symbols.push_back(0.0);
    weights.push_back(1.0 - 2.0 * prob);
  }
  if (prob > 0.0) {
    symbols.insert(symbols.end(), {1.0, -1.0});
    weights.insert(weights.end(), {prob, prob});
  }
  const std::size_t base = symbols.size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= base;

  const auto rows = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd sigmas(rows, kBatch);
  std::vector<double> probs(static_cast<std::size_t>(kBatch));
  std::vector<double> sups(static_cast<std::size_t>(kBatch));
  CompensatedSum sum;
  for (std::size_t start = 0; start < total; start += static_cast<std::size_t>(kBatch)) {
    const auto count = static_cast<Eigen::Index>(std::min<std::size_t>(kBatch, total - start));
    if (count != sigmas.cols()) sigmas.resize(rows, count);
    for (Eigen::Index j = 0; j < count; ++j) {
      std::size_t code = start + static_cast<std::size_t>(j);
      double w = 1.0;
      for (Eigen::Index i = 0; i < rows; ++i) {
        const std::size_t digit = code % base;
        code /= base;
        sigmas(i, j) = symbols[digit];
        w *= weights[digit];
      }
      probs[static_cast<std::size_t>(j)] = w;
    }
    oracle.sup_batch(sigmas, std::span<double>(sups.data(), static_cast<std::size_t>(count)));
    for (Eigen::Index j = 0; j < count; ++j) {
      sum.add(probs[static_cast<std::size_t>(j)] * sups[static_cast<std::size_t>(j)]);
    }
  }
  return q_const(m, u) * sum.value();
}

}  // namespace transrad
