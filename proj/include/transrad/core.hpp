#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace transrad {

/// Seeded counter-based generator. Output k of stream (seed, stream) is a
/// pure function of (seed, stream, k), so independent draws can be evaluated
/// in any order. Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept;

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() noexcept;

  /// Uniform integer in [0, bound), unbiased. bound must be positive.
  std::uint64_t below(std::uint64_t bound) noexcept;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// The full sample: one feature row per point plus the +-1 labels used for scoring.
struct FullSample {
  Eigen::MatrixXd features;
  std::vector<int> labels;

  FullSample() = default;
  FullSample(Eigen::MatrixXd features, std::vector<int> labels);

  std::size_t size() const noexcept { return labels.size(); }
};

/// A train/test split of 0..m+u-1. Train indices keep the draw order.
class Partition {
 public:
  Partition(std::vector<std::size_t> train, std::size_t total);

  std::span<const std::size_t> train() const noexcept { return train_; }
  std::span<const std::size_t> test() const noexcept { return test_; }
  std::size_t m() const noexcept { return train_.size(); }
  std::size_t u() const noexcept { return test_.size(); }
  std::size_t total() const noexcept { return train_.size() + test_.size(); }
  bool is_train(std::size_t index) const { return in_train_.at(index); }

 private:
  std::vector<std::size_t> train_;
  std::vector<std::size_t> test_;
  std::vector<bool> in_train_;
};

struct RademacherVector {
  Eigen::VectorXd values;  // entries in {-1, 0, +1}
  double p = 0.0;
};

struct ErrorReport {
  double empirical_01 = 0.0;
  double empirical_margin = 0.0;
  double test_01 = 0.0;
  double test_margin = 0.0;
  double full_sample_01 = 0.0;
  double full_sample_margin = 0.0;
  double gamma = 1.0;
};

/// RANDPERM: for i = 0..m-1 draw d uniformly from {i..total-1} and swap
/// positions i and d of the identity permutation; the first m entries are the
/// training set. Uniform over m-subsets.
Partition sample_partition(std::size_t total, std::size_t m, std::uint64_t seed,
                           std::uint64_t stream = 0);

/// Entries i.i.d. with P(+1) = P(-1) = p and P(0) = 1 - 2p.
RademacherVector sample_rademacher(std::size_t size, double p, std::uint64_t seed,
                                   std::uint64_t stream = 0);

/// Fills `out` with a Rademacher draw from `rng`; shared by the Monte-Carlo code.
void fill_rademacher(CounterRng& rng, double p, std::span<double> out) noexcept;

/// p0 = mu / (m+u)^2.
double default_rademacher_p(std::size_t m, std::size_t u);

/// 0 if score*label >= gamma, otherwise min(1, 1 - score*label/gamma).
double margin_loss(double score, int label, double gamma);

/// sgn(0) counts as a mistake against either label.
double zero_one_loss(double score, int label) noexcept;

ErrorReport score_errors(const Eigen::VectorXd& h, const FullSample& sample,
                         const Partition& part, double gamma);

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

}  // namespace transrad
