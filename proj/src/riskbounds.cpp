#include "transrad/riskbounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "transrad/concentration.hpp"
#include "transrad/error.hpp"

namespace transrad {
namespace {

void check_gamma_delta(double gamma, double delta) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw Error(ErrorCode::kInvalidMargin, "gamma must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::kInvalidConfidence, "delta must lie in (0, 1)");
}

double clip01(double x) { return std::clamp(x, 0.0, 1.0); }

void check_distribution(std::span<const double> d, double tol, const char* name) {
  if (d.empty()) throw Error(ErrorCode::kInvalidDistribution, std::string(name) + " is empty");
  CompensatedSum sum;
  for (double x : d) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw Error(ErrorCode::kInvalidDistribution, std::string(name) + " has a negative or non-finite entry");
    }
    sum.add(x);
  }
  if (std::abs(sum.value() - 1.0) > tol) {
    throw Error(ErrorCode::kInvalidDistribution, std::string(name) + " does not sum to 1");
  }
}

std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

void check_spec(const MixtureSpec& spec) {
  if (spec.bases.empty()) throw Error(ErrorCode::kInvalidArgument, "mixture has no base hypotheses");
  const auto n = spec.bases.front().size();
  for (const auto& h : spec.bases) {
    if (h.size() != n) throw Error(ErrorCode::kShape, "base hypotheses differ in length");
  }
  const auto k = static_cast<Eigen::Index>(spec.bases.size());
  if (spec.prior.size() != k || spec.posterior.size() != k) {
    throw Error(ErrorCode::kShape, "prior and posterior need one weight per base hypothesis");
  }
  check_distribution(as_span(spec.prior), 1e-10, "prior");
  check_distribution(as_span(spec.posterior), 1e-10, "posterior");
  if (!(spec.s > 1.0) || !std::isfinite(spec.s)) throw Error(ErrorCode::kInvalidHyperparameter, "s must exceed 1");
  if (!(spec.g0 > 0.0) || !std::isfinite(spec.g0)) throw Error(ErrorCode::kInvalidHyperparameter, "g0 must be positive");
}

}  // namespace

BoundReport theorem2_bound(double empirical_margin_error, const ComplexityEstimate& complexity,
                           double gamma, std::size_t m, std::size_t u, double delta) {
  check_gamma_delta(gamma, delta);
  const SlackConstants k = slack_constants(m, u);
  BoundReport r;
  r.empirical_margin_error = empirical_margin_error;
  r.complexity = complexity;
  r.gamma = gamma;
  r.delta = delta;
  r.m = m;
  r.u = u;
  r.q_const = k.q_const;
  r.s_const = k.s_const;
  r.c0 = k.c0;
  r.slack_sqrt_min = k.c0 * k.q_const * std::sqrt(static_cast<double>(std::min(m, u)));
  r.slack_confidence = std::sqrt(k.s_const / 2.0 * k.q_const * std::log(1.0 / delta));
  r.total = empirical_margin_error + complexity.value / gamma + r.slack_sqrt_min + r.slack_confidence;
  r.total_clipped = clip01(r.total);
  return r;
}

double inductive_bound_eq16(double empirical_margin_error, double r_ind, double gamma,
                            std::size_t m, double delta) {
  check_gamma_delta(gamma, delta);
  if (m < 1) throw Error(ErrorCode::kInvalidArgument, "m must be positive");
  return empirical_margin_error + r_ind / gamma +
         std::sqrt(2.0 * std::log(2.0 / delta) / static_cast<double>(m));
}

double full_sample_translate(double empirical_margin_error, double slack, std::size_t m,
                             std::size_t u) {
  if (m + u == 0) throw Error(ErrorCode::kInvalidArgument, "m+u must be positive");
  return empirical_margin_error + static_cast<double>(u) / static_cast<double>(m + u) * slack;
}

double kl_divergence(std::span<const double> q, std::span<const double> p) {
  if (q.size() != p.size()) throw Error(ErrorCode::kShape, "distributions differ in length");
  check_distribution(q, 1e-8, "q");
  check_distribution(p, 1e-8, "p");
  CompensatedSum sum;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] == 0.0) continue;
    if (p[i] == 0.0) return std::numeric_limits<double>::infinity();
    sum.add(q[i] * std::log(q[i] / p[i]));
  }
  return std::max(0.0, sum.value());
}

Eigen::VectorXd mixture_predict(const MixtureSpec& spec) {
  check_spec(spec);
  Eigen::VectorXd h = Eigen::VectorXd::Zero(spec.bases.front().size());
  for (std::size_t i = 0; i < spec.bases.size(); ++i) {
    h += spec.posterior[static_cast<Eigen::Index>(i)] * spec.bases[i];
  }
  return h;
}

PacBayesReport pac_bayes_bound(const MixtureSpec& spec, const FullSample& sample,
                               const Partition& part, double gamma, double delta) {
  check_gamma_delta(gamma, delta);
  const Eigen::VectorXd mixture = mixture_predict(spec);
  if (static_cast<std::size_t>(mixture.size()) != sample.size() || part.total() != sample.size()) {
    throw Error(ErrorCode::kShape, "mixture, sample and partition sizes disagree");
  }

  PacBayesReport r;
  r.gamma = gamma;
  r.delta = delta;
  r.m = part.m();
  r.u = part.u();
  r.kl = kl_divergence(as_span(spec.posterior), as_span(spec.prior));
  if (!std::isfinite(r.kl)) {
    throw Error(ErrorCode::kUnboundedPosterior, "posterior puts mass outside the prior's support");
  }
  r.empirical_margin_error = score_errors(mixture, sample, part, gamma).empirical_margin;

  const SlackConstants k = slack_constants(r.m, r.u);
  r.g_tilde = spec.s * std::max(r.kl, spec.g0);
  for (const auto& h : spec.bases) r.sup_norm_sq = std::max(r.sup_norm_sq, h.squaredNorm());
  r.complexity_term = k.q_const / gamma * std::sqrt(2.0 * r.g_tilde * r.sup_norm_sq);
  r.slack_sqrt_min = k.c0 * k.q_const * std::sqrt(static_cast<double>(std::min(r.m, r.u)));
  // log_s(g_tilde / g0) = 1 + log_s(max(kl, g0) / g0), which is exactly 1 when kl <= g0.
  const double excess = std::log(std::max(r.kl, spec.g0) / spec.g0) / std::log(spec.s);
  r.log_term = 2.0 * std::log(1.0 + excess);
  r.log_term_union = 2.0 * std::log(2.0 + excess);
  r.q1 = std::sqrt(k.s_const / 2.0) * k.q_const * (std::log(1.0 / delta) + r.log_term);
  r.total = r.empirical_margin_error + r.complexity_term + r.slack_sqrt_min + r.q1;
  r.total_clipped = clip01(r.total);
  return r;
}

}  // namespace transrad
