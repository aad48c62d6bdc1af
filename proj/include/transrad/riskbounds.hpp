#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "transrad/core.hpp"
#include "transrad/rademacher.hpp"

namespace transrad {

/// Test-error bound for a single soft-label vector. Every constant used is
/// kept so the total can be re-derived from the record.
struct BoundReport {
  double empirical_margin_error = 0.0;
  ComplexityEstimate complexity;
  double gamma = 1.0;
  double delta = 0.05;
  std::size_t m = 0;
  std::size_t u = 0;
  double q_const = 0.0;
  double s_const = 0.0;
  double c0 = 0.0;
  double slack_sqrt_min = 0.0;    // c0 Q sqrt(min(m,u))
  double slack_confidence = 0.0;  // sqrt((S/2) Q ln(1/delta))
  double total = 0.0;             // may exceed 1
  double total_clipped = 0.0;     // total clipped to [0, 1]
};

/// empirical + R/gamma + c0 Q sqrt(min(m,u)) + sqrt((S Q / 2) ln(1/delta)).
BoundReport theorem2_bound(double empirical_margin_error, const ComplexityEstimate& complexity,
                           double gamma, std::size_t m, std::size_t u, double delta);

/// Inductive comparison: empirical + r_ind/gamma + sqrt(2 ln(2/delta) / m).
double inductive_bound_eq16(double empirical_margin_error, double r_ind, double gamma,
                            std::size_t m, double delta);

/// Full-sample error bound: empirical + u/(m+u) * slack.
double full_sample_translate(double empirical_margin_error, double slack, std::size_t m,
                             std::size_t u);

/// D(q || p) in nats; +infinity when q puts mass where p has none.
double kl_divergence(std::span<const double> q, std::span<const double> p);

struct MixtureSpec {
  std::vector<Eigen::VectorXd> bases;  // soft labels over the full sample
  Eigen::VectorXd prior;
  Eigen::VectorXd posterior;
  double s = 2.0;
  double g0 = 0.05;
};

struct PacBayesReport {
  double empirical_margin_error = 0.0;  // of the mixture, on the training set
  double kl = 0.0;
  double g_tilde = 0.0;                 // s max(kl, g0)
  double sup_norm_sq = 0.0;             // max_i ||h_i||^2
  double complexity_term = 0.0;         // (Q/gamma) sqrt(2 g_tilde sup_norm_sq)
  double slack_sqrt_min = 0.0;          // c0 Q sqrt(min(m,u))
  double log_term = 0.0;                // 2 ln log_s(g_tilde / g0)
  double log_term_union = 0.0;          // 2 ln log_s(s g_tilde / g0), reported only
  double q1 = 0.0;                      // sqrt(S/2) Q (ln(1/delta) + log_term)
  double total = 0.0;
  double total_clipped = 0.0;
  double gamma = 1.0;
  double delta = 0.05;
  std::size_t m = 0;
  std::size_t u = 0;
};

/// Mixture bound for h = sum_i q_i h_i.
PacBayesReport pac_bayes_bound(const MixtureSpec& spec, const FullSample& sample,
                               const Partition& part, double gamma, double delta);

/// sum_i q_i h_i.
Eigen::VectorXd mixture_predict(const MixtureSpec& spec);

}  // namespace transrad
