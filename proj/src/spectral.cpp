#include "transrad/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "transrad/error.hpp"

namespace transrad {
namespace {

void require_square(const Eigen::MatrixXd& a, const char* what) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorCode::kShape, std::string(what) + ": matrix must be square, got " +
                                       std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
}

bool is_symmetric(const Eigen::MatrixXd& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  const double scale = a.norm();
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

double off_diagonal_norm(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  double sum = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) sum += a(i, j) * a(i, j);
  }
  return std::sqrt(2.0 * sum);
}

// One Jacobi rotation annihilating a(p, q). Columns are updated in place and
// then mirrored into the rows, which keeps the inner loop contiguous.
void rotate(Eigen::MatrixXd& a, Eigen::MatrixXd& v, Eigen::Index p, Eigen::Index q) {
  const Eigen::Index n = a.rows();
  const double apq = a(p, q);
  const double app = a(p, p);
  const double aqq = a(q, q);
  const double theta = (aqq - app) / (2.0 * apq);
  double t;
  if (std::abs(theta) > 1e150) {
    t = 0.5 / theta;
  } else {
    t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
    if (theta < 0.0) t = -t;
  }
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const double tau = s / (1.0 + c);

  double* cp = a.col(p).data();
  double* cq = a.col(q).data();
  for (Eigen::Index k = 0; k < n; ++k) {
    const double g = cp[k];
    const double h = cq[k];
    cp[k] = g - s * (h + g * tau);
    cq[k] = h + s * (g - h * tau);
  }
  a(p, p) = app - t * apq;
  a(q, q) = aqq + t * apq;
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (k == p || k == q) continue;
    a(p, k) = cp[k];
    a(q, k) = cq[k];
  }

  double* vp = v.col(p).data();
  double* vq = v.col(q).data();
  for (Eigen::Index k = 0; k < n; ++k) {
    const double g = vp[k];
    const double h = vq[k];
    vp[k] = g - s * (h + g * tau);
    vq[k] = h + s * (g - h * tau);
  }
}

}  // namespace

void canonicalize_sign(Eigen::Ref<Eigen::VectorXd> v) {
  if (v.size() == 0) return;
  Eigen::Index arg = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    // Ties within rounding go to the lowest index.
    if (std::abs(v[i]) > best * (1.0 + 1e-12)) {
      best = std::abs(v[i]);
      arg = i;
    }
  }
  if (v[arg] < 0.0) v = -v;
}

EigenDecomposition sym_eig(const Eigen::MatrixXd& a_in, const SpectralTolerances& tol) {
  require_square(a_in, "sym_eig");
  if (!is_symmetric(a_in, tol.symmetry)) {
    throw Error(ErrorCode::kSymmetry, "sym_eig: input is not symmetric");
  }
  const Eigen::Index n = a_in.rows();
  Eigen::MatrixXd a = 0.5 * (a_in + a_in.transpose());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double target = tol.jacobi_offdiag * a.norm();

  bool converged = false;
  for (int sweep = 0; sweep < tol.jacobi_max_sweeps; ++sweep) {
    const double off = off_diagonal_norm(a);
    if (off <= target) {
      converged = true;
      break;
    }
    const double threshold = sweep < 3 ? 0.2 * off / static_cast<double>(n * n) : 0.0;
    for (Eigen::Index q = 1; q < n; ++q) {
      for (Eigen::Index p = 0; p < q; ++p) {
        const double apq = a(p, q);
        const double g = 100.0 * std::abs(apq);
        if (sweep > 3 && std::abs(a(p, p)) + g == std::abs(a(p, p)) &&
            std::abs(a(q, q)) + g == std::abs(a(q, q))) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        if (apq == 0.0 || std::abs(apq) <= threshold) continue;
        rotate(a, v, p, q);
      }
    }
  }
  if (!converged && off_diagonal_norm(a) > target) {
    throw Error(ErrorCode::kConvergence, "sym_eig: Jacobi sweeps did not converge");
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });

  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    out.eigenvalues[k] = a(src, src);
    out.eigenvectors.col(k) = v.col(src);
    canonicalize_sign(out.eigenvectors.col(k));
  }
  return out;
}

Eigen::VectorXd singular_values(const Eigen::MatrixXd& u_mat, const SpectralTolerances& tol) {
  Eigen::VectorXd sv;
  if (u_mat.size() == 0) return sv;
  if (u_mat.rows() == u_mat.cols() && is_symmetric(u_mat, tol.symmetry)) {
    sv = sym_eig(u_mat, tol).eigenvalues.cwiseAbs();
  } else if (u_mat.rows() >= u_mat.cols()) {
    const Eigen::MatrixXd gram = u_mat.transpose() * u_mat;
    sv = sym_eig(gram, tol).eigenvalues.cwiseMax(0.0).cwiseSqrt();
  } else {
    const Eigen::MatrixXd gram = u_mat * u_mat.transpose();
    sv = sym_eig(gram, tol).eigenvalues.cwiseMax(0.0).cwiseSqrt();
  }
  std::sort(sv.data(), sv.data() + sv.size());
  return sv;
}

Eigen::VectorXd solve_linear(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  require_square(a, "solve_linear");
  if (a.rows() != b.size()) throw Error(ErrorCode::kShape, "solve_linear: rhs length mismatch");
  if (a.rows() == 0) return {};

  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  if (!(lu.rcond() > 1e-14)) {
    throw Error(ErrorCode::kSingularSystem, "solve_linear: matrix is singular to working precision");
  }
  Eigen::VectorXd x = lu.solve(b);
  const double a_norm = a.norm();
  auto acceptable = [&](const Eigen::VectorXd& y) {
    return y.allFinite() && (a * y - b).norm() <= 1e-8 * (a_norm * y.norm() + b.norm());
  };
  if (!acceptable(x)) {
    x += lu.solve(b - a * x);  // one step of iterative refinement
    if (!acceptable(x)) {
      throw Error(ErrorCode::kSingularSystem, "solve_linear: residual check failed");
    }
  }
  return x;
}

SphereSolution sphere_constrained_min(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                      double radius, const SpectralTolerances& tol) {
  require_square(a, "sphere_constrained_min");
  if (a.rows() != b.size()) throw Error(ErrorCode::kShape, "sphere_constrained_min: b length mismatch");
  if (!(radius > 0.0)) throw Error(ErrorCode::kInvalidArgument, "sphere_constrained_min: radius must be positive");

  const EigenDecomposition ed = sym_eig(a, tol);
  const Eigen::VectorXd& lam = ed.eigenvalues;
  const Eigen::VectorXd bt = ed.eigenvectors.transpose() * b;
  const Eigen::Index n = lam.size();
  const double lmin = lam[0];
  const double spread = std::max(1.0, lam.cwiseAbs().maxCoeff());

  std::vector<bool> bottom(static_cast<std::size_t>(n), false);
  double bottom_sq = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (lam[i] - lmin <= 1e-10 * spread) {
      bottom[static_cast<std::size_t>(i)] = true;
      bottom_sq += bt[i] * bt[i];
    }
  }
  const double b_norm = b.norm();
  const double r2 = radius * radius;

  SphereSolution sol;
  Eigen::VectorXd coef(n);

  if (std::sqrt(bottom_sq) <= tol.hard_case * b_norm) {
    double norm_sq = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      coef[i] = bottom[static_cast<std::size_t>(i)] ? 0.0 : bt[i] / (lam[i] - lmin);
      norm_sq += coef[i] * coef[i];
    }
    if (norm_sq <= r2) {
      coef[0] += std::sqrt(r2 - norm_sq);
      sol.x = ed.eigenvectors * coef;
      sol.multiplier = -lmin;
      sol.hard_case = true;
      return sol;
    }
  }

  auto norm_at = [&](double shift) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = bt[i] / (lam[i] + shift);
      s += d * d;
    }
    return std::sqrt(s);
  };

  // Secular equation ||x(shift)|| = radius on (-lmin, -lmin + ||b||/radius].
  double lo = -lmin + tol.secular_offset * spread;
  double hi = -lmin + b_norm / radius + tol.secular_offset * spread;
  double shift = lo;
  if (norm_at(lo) > radius) {
    shift = 0.5 * (lo + hi);
    for (int iter = 0; iter < 300; ++iter) {
      const double nrm = norm_at(shift);
      if (std::abs(nrm - radius) <= 1e-15 * radius) break;
      if (nrm > radius) {
        lo = shift;
      } else {
        hi = shift;
      }
      // Newton on 1/||x|| - 1/radius, which is close to linear in the shift.
      double d3 = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double den = lam[i] + shift;
        d3 += bt[i] * bt[i] / (den * den * den);
      }
      double next = shift - (1.0 / nrm - 1.0 / radius) * (nrm * nrm * nrm) / d3;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(shift))) {
        break;
      }
      shift = next;
    }
  }

  for (Eigen::Index i = 0; i < n; ++i) coef[i] = bt[i] / (lam[i] + shift);
  sol.x = ed.eigenvectors * coef;
  const double nrm = sol.x.norm();
  if (nrm > 0.0) sol.x *= radius / nrm;
  sol.multiplier = shift;
  return sol;
}

}  // namespace transrad
