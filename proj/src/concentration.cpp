#include "transrad/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "transrad/error.hpp"

namespace transrad {
namespace {

void check_counts(std::size_t m, std::size_t u) {
  if (m < 1 || u < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "need m >= 1 and u >= 1, got m=" + std::to_string(m) + " u=" + std::to_string(u));
  }
}

}  // namespace

double c0_constant() noexcept {
  return std::sqrt(32.0 * std::log(4.0 * std::numbers::e) / 3.0);
}

double tail_bound(const TailBoundQuery& q) {
  check_counts(q.m, q.u);
  if (!(q.epsilon >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "epsilon must be >= 0");
  const double m = static_cast<double>(q.m);
  const double u = static_cast<double>(q.u);
  const double n = m + u;
  const double big = static_cast<double>(std::max(q.m, q.u));
  const double small = static_cast<double>(std::min(q.m, q.u));
  const double eps2 = q.epsilon * q.epsilon;

  if (q.kind == TailKind::kLemma2 || q.kind == TailKind::kLemma3) {
    if (!q.beta) throw Error(ErrorCode::kMissingParameter, "beta is required for this tail bound");
    const double beta = *q.beta;
    if (!(beta >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "beta must be >= 0");
    if (q.epsilon == 0.0) return 1.0;
    if (beta == 0.0) return 0.0;
    const double b2 = beta * beta;
    if (q.kind == TailKind::kLemma2) {
      return std::exp(-2.0 * eps2 * (n - 0.5) / (m * u * b2) * (1.0 - 1.0 / (2.0 * big)));
    }
    return std::exp(-2.0 * eps2 / (b2 * small));
  }

  switch (q.kind) {
    case TailKind::kEq4:
      return std::exp(-eps2 * m * u * (n - 0.5) / (n * n) * (2.0 * big - 1.0) / big);
    case TailKind::kEq5:
      return std::exp(-eps2 * (n - 0.5) * m / u * (2.0 * big - 1.0) / big);
    case TailKind::kSerfling:
      return std::exp(-2.0 * eps2 * n * m / (u + 1.0));
    default:
      break;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown tail bound kind");
}

SlackConstants slack_constants(std::size_t m, std::size_t u) {
  check_counts(m, u);
  const double md = static_cast<double>(m);
  const double ud = static_cast<double>(u);
  const double big = static_cast<double>(std::max(m, u));
  SlackConstants k;
  k.q_const = 1.0 / md + 1.0 / ud;
  k.s_const = (md + ud) / ((md + ud - 0.5) * (1.0 - 1.0 / (2.0 * big)));
  k.c0 = c0_constant();
  return k;
}

double theorem1_slack(std::size_t m, std::size_t u, double b1, double b2, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw Error(ErrorCode::kInvalidConfidence, "delta must lie in (0, 1)");
  }
  if (!(b1 <= 0.0 && b2 >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "need b1 <= 0 <= b2");
  }
  const SlackConstants k = slack_constants(m, u);
  const double range = b2 - b1;
  const double bmax = std::max(std::abs(b1), std::abs(b2));
  const double sqrt_min = std::sqrt(static_cast<double>(std::min(m, u)));
  const double first = bmax * k.c0 * k.q_const * sqrt_min;
  const double second = range * std::sqrt(k.s_const / 2.0 * k.q_const * std::log(1.0 / delta));
  return first + second;
}

EmpiricalTail empirical_tail(const PartitionFunction& f, std::size_t m, std::size_t u,
                             std::span<const double> epsilons, std::size_t n_samples,
                             std::uint64_t seed) {
  if (n_samples == 0) throw Error(ErrorCode::kInvalidSampleCount, "n_samples must be positive");
  check_counts(m, u);

  std::vector<double> values(n_samples);
  CompensatedSum sum;
  for (std::size_t i = 0; i < n_samples; ++i) {
    values[i] = f(sample_partition(m + u, m, seed, i));
    sum.add(values[i]);
  }

  EmpiricalTail out;
  out.n_samples = n_samples;
  out.mean = sum.value() / static_cast<double>(n_samples);
  out.tail.reserve(epsilons.size());
  for (double eps : epsilons) {
    const auto hits = std::count_if(values.begin(), values.end(),
                                    [&](double v) { return v - out.mean >= eps; });
    out.tail.push_back(static_cast<double>(hits) / static_cast<double>(n_samples));
  }
  return out;
}

PartitionFunction test_minus_train_mean(std::vector<int> marking) {
  return [g = std::move(marking)](const Partition& part) {
    double train = 0.0;
    double test = 0.0;
    for (std::size_t i : part.train()) train += g.at(i);
    for (std::size_t i : part.test()) test += g.at(i);
    return test / static_cast<double>(part.u()) - train / static_cast<double>(part.m());
  };
}

PartitionFunction train_mean(std::vector<int> marking) {
  return [g = std::move(marking)](const Partition& part) {
    double train = 0.0;
    for (std::size_t i : part.train()) train += g.at(i);
    return train / static_cast<double>(part.m());
  };
}

}  // namespace transrad
