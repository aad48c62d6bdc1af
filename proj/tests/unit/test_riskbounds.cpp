#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "transrad/algorithms.hpp"
#include "transrad/concentration.hpp"
#include "transrad/core.hpp"
#include "transrad/error.hpp"
#include "transrad/graph.hpp"
#include "transrad/rademacher.hpp"
#include "transrad/riskbounds.hpp"

using namespace transrad;
using Catch::Approx;

namespace {

ComplexityEstimate estimate(double v) {
  ComplexityEstimate e;
  e.value = v;
  return e;
}

struct CmInstance {
  FullSample sample;
  Partition part;
  GraphBundle graph;
};

CmInstance make_instance(Eigen::Index n, std::size_t m, std::uint64_t seed) {
  CounterRng rng(seed, 0);
  Eigen::MatrixXd x(n, 4);
  std::vector<int> y(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const int label = i % 2 == 0 ? 1 : -1;
    y[static_cast<std::size_t>(i)] = label;
    for (Eigen::Index j = 0; j < 4; ++j) {
      x(i, j) = 0.1 + rng.uniform01() + (label > 0 ? (j < 2 ? 1.0 : 0.0) : (j >= 2 ? 1.0 : 0.0));
    }
  }
  FullSample sample(x, y);
  Partition part = sample_partition(static_cast<std::size_t>(n), m, seed, 0);
  GraphBundle graph = knn_graph(cosine_similarity(x), 5);
  return {std::move(sample), std::move(part), std::move(graph)};
}

MixtureSpec cm_mixture(const CmInstance& inst) {
  const LabelVector tau(inst.part, inst.sample.labels);
  MixtureSpec spec;
  for (double beta : {0.2, 0.5, 0.8}) spec.bases.push_back(consistency_method(inst.graph, tau, beta).h);
  spec.prior = Eigen::VectorXd::Constant(3, 1.0 / 3.0);
  spec.posterior = spec.prior;
  return spec;
}

}  // namespace

TEST_CASE("transductive bound adds up its pieces") {
  const BoundReport r = theorem2_bound(0.1, estimate(0.3), 0.5, 40, 60, 0.05);
  const double q = 1.0 / 40 + 1.0 / 60;
  const double s = 100.0 / (99.5 * (1.0 - 1.0 / 120.0));
  REQUIRE(r.q_const == Approx(q).epsilon(1e-15));
  REQUIRE(r.s_const == Approx(s).epsilon(1e-15));
  REQUIRE(r.c0 == Approx(std::sqrt(32.0 * std::log(4.0 * std::numbers::e) / 3.0)).epsilon(1e-15));
  REQUIRE(r.c0 < 5.05);
  REQUIRE(r.slack_sqrt_min == Approx(r.c0 * q * std::sqrt(40.0)).epsilon(1e-14));
  REQUIRE(r.slack_confidence == Approx(std::sqrt(s / 2 * q * std::log(20.0))).epsilon(1e-14));
  REQUIRE(r.total == 0.1 + 0.3 / 0.5 + r.slack_sqrt_min + r.slack_confidence);
  REQUIRE(r.total_clipped == 1.0);
  // With loss range [0, 1] the slack coincides with the generic slack.
  REQUIRE(r.slack_sqrt_min + r.slack_confidence ==
          Approx(theorem1_slack(40, 60, 0.0, 1.0, 0.05)).epsilon(1e-14));

  const BoundReport small = theorem2_bound(0.0, estimate(0.0), 1.0, 100000, 100000, 0.5);
  REQUIRE(small.total_clipped == small.total);
  REQUIRE(small.total < 1.0);

  REQUIRE_THROWS_AS(theorem2_bound(0.1, estimate(0.3), 0.0, 40, 60, 0.05), Error);
  REQUIRE_THROWS_AS(theorem2_bound(0.1, estimate(0.3), 1.0, 40, 60, 1.0), Error);
  REQUIRE_THROWS_AS(theorem2_bound(0.1, estimate(0.3), 1.0, 0, 60, 0.1), Error);
}

TEST_CASE("inductive comparison bound") {
  REQUIRE(inductive_bound_eq16(0.2, 0.1, 0.5, 100, 0.05) ==
          Approx(0.2 + 0.2 + std::sqrt(2.0 * std::log(40.0) / 100.0)).epsilon(1e-15));
  // ln(2/delta) = 2 when delta = 2/e^2.
  const double delta = 2.0 / (std::numbers::e * std::numbers::e);
  REQUIRE(inductive_bound_eq16(0.0, 0.0, 1.0, 16, delta) == Approx(2.0 / 4.0).epsilon(1e-14));
  REQUIRE_THROWS_AS(inductive_bound_eq16(0.0, 0.0, 1.0, 0, 0.1), Error);
}

TEST_CASE("full-sample translation") {
  REQUIRE(full_sample_translate(0.1, 0.4, 30, 70) == Approx(0.1 + 0.7 * 0.4).epsilon(1e-15));
  REQUIRE(full_sample_translate(0.25, 0.0, 5, 5) == 0.25);
}

TEST_CASE("KL divergence") {
  const std::vector<double> p = {0.2, 0.3, 0.5};
  REQUIRE(kl_divergence(p, p) == 0.0);
  const std::vector<double> point = {1.0, 0.0};
  const std::vector<double> half = {0.5, 0.5};
  REQUIRE(kl_divergence(point, half) == Approx(std::log(2.0)).epsilon(1e-15));
  REQUIRE(std::isinf(kl_divergence(half, point)));
  const std::vector<double> bad = {0.7, 0.7};
  REQUIRE_THROWS_AS(kl_divergence(bad, half), Error);
  const std::vector<double> neg = {1.5, -0.5};
  REQUIRE_THROWS_AS(kl_divergence(neg, half), Error);
  REQUIRE_THROWS_AS(kl_divergence(p, half), Error);

  // Gibbs inequality on random pairs.
  CounterRng rng(3, 0);
  for (int k = 0; k < 50; ++k) {
    std::vector<double> a(4), b(4);
    double sa = 0, sb = 0;
    for (int i = 0; i < 4; ++i) {
      a[i] = rng.uniform01() + 1e-3;
      b[i] = rng.uniform01() + 1e-3;
      sa += a[i];
      sb += b[i];
    }
    for (int i = 0; i < 4; ++i) {
      a[i] /= sa;
      b[i] /= sb;
    }
    REQUIRE(kl_divergence(a, b) >= 0.0);
  }
}

TEST_CASE("mixture prediction and margin-loss convexity") {
  const CmInstance inst = make_instance(30, 10, 4);
  MixtureSpec spec = cm_mixture(inst);
  spec.posterior = Eigen::Vector3d(0.2, 0.3, 0.5);
  const Eigen::VectorXd h = mixture_predict(spec);
  REQUIRE((h - (0.2 * spec.bases[0] + 0.3 * spec.bases[1] + 0.5 * spec.bases[2])).norm() <= 1e-14);

  CounterRng rng(5, 0);
  for (int k = 0; k < 20; ++k) {
    Eigen::Vector3d q(rng.uniform01(), rng.uniform01(), rng.uniform01());
    q /= q.sum();
    spec.posterior = q;
    const Eigen::VectorXd mix = mixture_predict(spec);
    for (double gamma : {0.05, 0.2, 1.0}) {
      double gibbs = 0.0;
      for (int i = 0; i < 3; ++i) gibbs += q[i] * score_errors(spec.bases[i], inst.sample, inst.part, gamma).test_margin;
      REQUIRE(score_errors(mix, inst.sample, inst.part, gamma).test_margin <= gibbs + 1e-12);
    }
  }

  MixtureSpec bad = spec;
  bad.posterior = Eigen::Vector3d(0.5, 0.5, 0.5);
  REQUIRE_THROWS_AS(mixture_predict(bad), Error);
  bad = spec;
  bad.s = 1.0;
  REQUIRE_THROWS_AS(mixture_predict(bad), Error);
}

TEST_CASE("mixture bound at q = p") {
  const CmInstance inst = make_instance(30, 10, 6);
  const MixtureSpec spec = cm_mixture(inst);
  const PacBayesReport r = pac_bayes_bound(spec, inst.sample, inst.part, 0.5, 0.05);
  REQUIRE(r.kl == 0.0);
  REQUIRE(r.g_tilde == spec.s * spec.g0);
  REQUIRE(r.log_term == 0.0);
  REQUIRE(r.log_term_union == Approx(2.0 * std::log(2.0)).epsilon(1e-15));
  const SlackConstants k = slack_constants(10, 20);
  REQUIRE(r.q1 == Approx(std::sqrt(k.s_const / 2) * k.q_const * std::log(20.0)).epsilon(1e-14));
  double sup = 0;
  for (const auto& h : spec.bases) sup = std::max(sup, h.squaredNorm());
  REQUIRE(r.sup_norm_sq == sup);
  REQUIRE(r.complexity_term == Approx(k.q_const / 0.5 * std::sqrt(2 * r.g_tilde * sup)).epsilon(1e-14));
  REQUIRE(r.total == r.empirical_margin_error + r.complexity_term + r.slack_sqrt_min + r.q1);
}

TEST_CASE("mixture bound with one base") {
  const CmInstance inst = make_instance(24, 8, 7);
  MixtureSpec spec = cm_mixture(inst);
  spec.bases.resize(1);
  spec.prior = Eigen::VectorXd::Ones(1);
  spec.posterior = spec.prior;
  const PacBayesReport r = pac_bayes_bound(spec, inst.sample, inst.part, 0.3, 0.1);
  REQUIRE(r.kl == 0.0);
  REQUIRE(r.empirical_margin_error == score_errors(spec.bases[0], inst.sample, inst.part, 0.3).empirical_margin);
}

TEST_CASE("mixture bound grows with the divergence") {
  const CmInstance inst = make_instance(30, 10, 8);
  MixtureSpec spec = cm_mixture(inst);
  double prev_kl = -1, prev_term = -1;
  for (double w : {0.6, 0.7, 0.8, 0.9, 0.99}) {
    spec.posterior = Eigen::Vector3d(w, (1 - w) / 2, (1 - w) / 2);
    const PacBayesReport r = pac_bayes_bound(spec, inst.sample, inst.part, 0.5, 0.05);
    REQUIRE(r.kl > prev_kl);
    if (r.kl > spec.g0) REQUIRE(r.complexity_term > prev_term);
    REQUIRE(r.complexity_term >= prev_term);
    REQUIRE(r.log_term >= 0.0);
    prev_kl = r.kl;
    prev_term = r.complexity_term;
  }

  spec.prior = Eigen::Vector3d(0.5, 0.5, 0.0);
  spec.posterior = Eigen::Vector3d(0.2, 0.2, 0.6);
  try {
    pac_bayes_bound(spec, inst.sample, inst.part, 0.5, 0.05);
    FAIL("expected an unbounded-posterior error");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::kUnboundedPosterior);
  }
}

TEST_CASE("scaled-identity representation gives a vacuous bound") {
  for (std::uint64_t seed = 10; seed < 16; ++seed) {
    const CmInstance inst = make_instance(40, 13, seed);
    const LabelVector tau(inst.part, inst.sample.labels);
    const Eigen::VectorXd alpha = consistency_method(inst.graph, tau, 0.5).h;
    const std::size_t m = 13, u = 27;
    for (double c : {0.1, 1.0, 10.0}) {
      const Eigen::VectorXd h = c * alpha;
      const Eigen::MatrixXd u_mat = c * Eigen::MatrixXd::Identity(40, 40);
      const double r = generic_ulr_bound(u_mat, alpha.norm(), m, u);
      for (double gamma : {0.1, 0.5, 0.9}) {
        const double emp = score_errors(h, inst.sample, inst.part, gamma).empirical_margin;
        REQUIRE(theorem2_bound(emp, estimate(r), gamma, m, u, 0.05).total >= 1.0);
      }
    }
  }
}
