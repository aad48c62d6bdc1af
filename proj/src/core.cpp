#include "transrad/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "transrad/error.hpp"

namespace transrad {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_(mix64(seed + kGolden) ^ mix64(stream * kGolden + 0x632BE59BD9B4E019ULL)) {}

CounterRng::result_type CounterRng::operator()() noexcept {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double CounterRng::uniform01() noexcept {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

std::uint64_t CounterRng::below(std::uint64_t bound) noexcept {
  // Lemire's nearly-divisionless rejection.
  std::uint64_t x = (*this)();
  __uint128_t prod = static_cast<__uint128_t>(x) * bound;
  auto low = static_cast<std::uint64_t>(prod);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = (*this)();
      prod = static_cast<__uint128_t>(x) * bound;
      low = static_cast<std::uint64_t>(prod);
    }
  }
  return static_cast<std::uint64_t>(prod >> 64);
}

FullSample::FullSample(Eigen::MatrixXd f, std::vector<int> l)
    : features(std::move(f)), labels(std::move(l)) {
  if (static_cast<std::size_t>(features.rows()) != labels.size()) {
    throw Error(ErrorCode::kShape, "feature rows (" + std::to_string(features.rows()) +
                                       ") != label count (" + std::to_string(labels.size()) + ")");
  }
  for (int y : labels) {
    if (y != 1 && y != -1) throw Error(ErrorCode::kLabel, "labels must be +1 or -1");
  }
}

Partition::Partition(std::vector<std::size_t> train, std::size_t total)
    : train_(std::move(train)), in_train_(total, false) {
  if (train_.empty() || train_.size() >= total) {
    throw Error(ErrorCode::kInvalidPartition,
                "need 1 <= m < m+u, got m=" + std::to_string(train_.size()) +
                    " total=" + std::to_string(total));
  }
  for (std::size_t i : train_) {
    if (i >= total || in_train_[i]) {
      throw Error(ErrorCode::kInvalidPartition, "train indices must be distinct and < total");
    }
    in_train_[i] = true;
  }
  test_.reserve(total - train_.size());
  for (std::size_t i = 0; i < total; ++i) {
    if (!in_train_[i]) test_.push_back(i);
  }
}

Partition sample_partition(std::size_t total, std::size_t m, std::uint64_t seed,
                           std::uint64_t stream) {
  if (m == 0 || m >= total) {
    throw Error(ErrorCode::kInvalidPartition,
                "need 1 <= m < total, got m=" + std::to_string(m) + " total=" + std::to_string(total));
  }
  CounterRng rng(seed, stream);
  std::vector<std::size_t> z(total);
  std::iota(z.begin(), z.end(), std::size_t{0});
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t d = i + static_cast<std::size_t>(rng.below(total - i));
    std::swap(z[i], z[d]);
  }
  z.resize(m);
  return Partition(std::move(z), total);
}

void fill_rademacher(CounterRng& rng, double p, std::span<double> out) noexcept {
  const double two_p = 2.0 * p;
  for (double& s : out) {
    const double x = rng.uniform01();
    s = x < p ? 1.0 : (x < two_p ? -1.0 : 0.0);
  }
}

RademacherVector sample_rademacher(std::size_t size, double p, std::uint64_t seed,
                                   std::uint64_t stream) {
  if (!(p >= 0.0 && p <= 0.5)) {
    throw Error(ErrorCode::kInvalidProbability, "p must lie in [0, 1/2]");
  }
  RademacherVector r;
  r.p = p;
  r.values.resize(static_cast<Eigen::Index>(size));
  CounterRng rng(seed, stream);
  fill_rademacher(rng, p, std::span<double>(r.values.data(), size));
  return r;
}

double default_rademacher_p(std::size_t m, std::size_t u) {
  const double n = static_cast<double>(m + u);
  return static_cast<double>(m) * static_cast<double>(u) / (n * n);
}

double margin_loss(double score, int label, double gamma) {
  if (!(gamma > 0.0)) throw Error(ErrorCode::kInvalidMargin, "gamma must be positive");
  const double yh = score * static_cast<double>(label);
  if (yh >= gamma) return 0.0;
  return std::min(1.0, 1.0 - yh / gamma);
}

double zero_one_loss(double score, int label) noexcept {
  return score * static_cast<double>(label) > 0.0 ? 0.0 : 1.0;
}

ErrorReport score_errors(const Eigen::VectorXd& h, const FullSample& sample,
                         const Partition& part, double gamma) {
  if (static_cast<std::size_t>(h.size()) != sample.size() || part.total() != sample.size()) {
    throw Error(ErrorCode::kShape, "soft labels, sample and partition sizes disagree");
  }
  if (!(gamma > 0.0)) throw Error(ErrorCode::kInvalidMargin, "gamma must be positive");

  auto average = [&](std::span<const std::size_t> idx, auto loss) {
    CompensatedSum sum;
    for (std::size_t i : idx) sum.add(loss(h[static_cast<Eigen::Index>(i)], sample.labels[i]));
    return sum.value() / static_cast<double>(idx.size());
  };
  auto zo = [](double s, int y) { return zero_one_loss(s, y); };
  auto mg = [gamma](double s, int y) { return margin_loss(s, y, gamma); };

  ErrorReport r;
  r.gamma = gamma;
  r.empirical_01 = average(part.train(), zo);
  r.empirical_margin = average(part.train(), mg);
  r.test_01 = average(part.test(), zo);
  r.test_margin = average(part.test(), mg);
  std::vector<std::size_t> all(part.total());
  std::iota(all.begin(), all.end(), std::size_t{0});
  r.full_sample_01 = average(all, zo);
  r.full_sample_margin = average(all, mg);
  return r;
}

void CompensatedSum::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    compensation_ += (sum_ - t) + x;
  } else {
    compensation_ += (x - t) + sum_;
  }
  sum_ = t;
}

}  // namespace transrad
