#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "transrad/core.hpp"

namespace transrad {

/// Tail inequalities for functions of a uniformly random train/test split.
///   kLemma2    exp(-2 eps^2 (m+u-1/2) / (m u beta^2) * (1 - 1/(2 max(m,u))))
///   kLemma3    exp(-2 eps^2 / (beta^2 min(m,u)))
///   kEq4       test-minus-train mean of a 0/1 marking
///   kEq5       train mean minus full-sample mean of a 0/1 marking
///   kSerfling  Serfling's without-replacement bound for the same deviation as kEq5
enum class TailKind { kLemma2, kLemma3, kEq4, kEq5, kSerfling };

struct TailBoundQuery {
  TailKind kind = TailKind::kLemma2;
  std::size_t m = 1;
  std::size_t u = 1;
  std::optional<double> beta;  // only read by kLemma2 / kLemma3
  double epsilon = 0.0;
};

struct SlackConstants {
  double q_const = 0.0;  // 1/m + 1/u
  double s_const = 0.0;  // (m+u) / ((m+u-1/2)(1 - 1/(2 max(m,u))))
  double c0 = 0.0;       // sqrt(32 ln(4e) / 3)
};

/// sqrt(32 ln(4e) / 3).
double c0_constant() noexcept;

/// Right-hand side of the selected inequality, unclipped (may exceed 1).
double tail_bound(const TailBoundQuery& query);

SlackConstants slack_constants(std::size_t m, std::size_t u);

/// B_max c0 Q sqrt(min(m,u)) + B sqrt((S/2) Q ln(1/delta)) with B = b2 - b1 and
/// B_max = max(|b1|, |b2|).
double theorem1_slack(std::size_t m, std::size_t u, double b1, double b2, double delta);

/// A function of the split only. Receives the partition of 0..m+u-1.
using PartitionFunction = std::function<double(const Partition&)>;

struct EmpiricalTail {
  double mean = 0.0;             // sample mean of f over the drawn partitions
  std::vector<double> tail;      // P(f - mean >= eps) per requested eps
  std::size_t n_samples = 0;
};

/// Draws `n_samples` partitions (draw i uses stream i of `seed`), estimates
/// E f by the sample mean and reports the empirical upper tail at each epsilon.
EmpiricalTail empirical_tail(const PartitionFunction& f, std::size_t m, std::size_t u,
                             std::span<const double> epsilons, std::size_t n_samples,
                             std::uint64_t seed);

/// (1/u) sum_test g - (1/m) sum_train g for a fixed 0/1 marking g.
PartitionFunction test_minus_train_mean(std::vector<int> marking);

/// (1/m) sum_train g for a fixed 0/1 marking g.
PartitionFunction train_mean(std::vector<int> marking);

}  // namespace transrad
