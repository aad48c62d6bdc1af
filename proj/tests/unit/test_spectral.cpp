#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "transrad/core.hpp"
#include "transrad/error.hpp"
#include "transrad/spectral.hpp"

using namespace transrad;
using Catch::Approx;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
  CounterRng rng(seed, 0);
  Eigen::MatrixXd a(r, c);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = 2.0 * rng.uniform01() - 1.0;
  return a;
}

Eigen::MatrixXd random_symmetric(Eigen::Index n, std::uint64_t seed) {
  const Eigen::MatrixXd a = random_matrix(n, n, seed);
  return 0.5 * (a + a.transpose());
}

double objective(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& x) {
  return x.dot(a * x) - 2.0 * b.dot(x);
}

}  // namespace

TEST_CASE("eigenvalues of simple matrices") {
  const EigenDecomposition id = sym_eig(Eigen::MatrixXd::Identity(3, 3));
  REQUIRE(id.eigenvalues.isApprox(Eigen::Vector3d(1, 1, 1)));

  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = -1.0;
  const EigenDecomposition ed = sym_eig(d);
  REQUIRE(ed.eigenvalues[0] == -1.0);
  REQUIRE(ed.eigenvalues[1] == 2.0);
  REQUIRE(ed.eigenvectors(1, 0) == 1.0);
  REQUIRE(ed.eigenvectors(0, 1) == 1.0);
}

TEST_CASE("random symmetric decomposition meets the invariants") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Eigen::Index n = seed == 10 ? 60 : 8;
    const Eigen::MatrixXd a = random_symmetric(n, seed);
    const EigenDecomposition ed = sym_eig(a);
    const double fro = a.norm();
    const Eigen::MatrixXd& v = ed.eigenvectors;
    REQUIRE((v * ed.eigenvalues.asDiagonal() * v.transpose() - a).norm() <= 1e-8 * fro);
    REQUIRE((v.transpose() * v - Eigen::MatrixXd::Identity(n, n)).norm() <= 1e-8);
    for (Eigen::Index i = 0; i < n; ++i) {
      REQUIRE((a * v.col(i) - ed.eigenvalues[i] * v.col(i)).norm() <= 1e-8 * fro);
      if (i > 0) REQUIRE(ed.eigenvalues[i - 1] <= ed.eigenvalues[i]);
      Eigen::Index arg = 0;
      v.col(i).cwiseAbs().maxCoeff(&arg);
      REQUIRE(v(arg, i) > 0.0);
    }
    // Independent reference: Eigen's tridiagonal QR solver.
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(a);
    REQUIRE((ref.eigenvalues() - ed.eigenvalues).cwiseAbs().maxCoeff() <= 1e-10 * fro);
  }
}

TEST_CASE("asymmetric input is rejected") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(3, 3);
  a(0, 1) = 0.5;
  try {
    sym_eig(a);
    FAIL("expected a symmetry error");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::kSymmetry);
  }
  REQUIRE_THROWS_AS(sym_eig(Eigen::MatrixXd::Zero(2, 3)), Error);
}

TEST_CASE("sweep limit reports non-convergence") {
  SpectralTolerances tol;
  tol.jacobi_max_sweeps = 1;
  try {
    sym_eig(random_symmetric(30, 3), tol);
    FAIL("expected a convergence error");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::kConvergence);
  }
}

TEST_CASE("singular values") {
  const Eigen::VectorXd ones = singular_values(Eigen::MatrixXd::Identity(4, 4));
  REQUIRE(ones.isApprox(Eigen::VectorXd::Ones(4)));

  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = -4.0;
  const Eigen::VectorXd sv = singular_values(d);
  REQUIRE(sv[0] == Approx(3.0));
  REQUIRE(sv[1] == Approx(4.0));

  const Eigen::MatrixXd u = random_matrix(5, 3, 7);
  const Eigen::VectorXd s = singular_values(u);
  const EigenDecomposition gram = sym_eig(u.transpose() * u);
  for (Eigen::Index i = 0; i < 3; ++i) REQUIRE(s[i] == Approx(std::sqrt(gram.eigenvalues[i])).epsilon(1e-12));
  REQUIRE(s.squaredNorm() == Approx(u.squaredNorm()).epsilon(1e-10));

  const Eigen::MatrixXd wide = random_matrix(3, 7, 8);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(wide);
  const Eigen::VectorXd sw = singular_values(wide);
  REQUIRE(sw.size() == 3);
  for (Eigen::Index i = 0; i < 3; ++i) REQUIRE(sw[i] == Approx(svd.singularValues()[2 - i]).epsilon(1e-10));
  REQUIRE(sw.squaredNorm() == Approx(wide.squaredNorm()).epsilon(1e-10));

  const Eigen::MatrixXd sym = random_symmetric(9, 9);
  REQUIRE(singular_values(sym).squaredNorm() == Approx(sym.squaredNorm()).epsilon(1e-10));
}

TEST_CASE("linear solve") {
  const Eigen::VectorXd b = Eigen::Vector3d(1, -2, 3);
  REQUIRE(solve_linear(Eigen::MatrixXd::Identity(3, 3), b).isApprox(b));

  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
  d(0, 0) = 2;
  d(1, 1) = 4;
  const Eigen::VectorXd x = solve_linear(d, Eigen::Vector2d(2, 8));
  REQUIRE(x[0] == Approx(1.0));
  REQUIRE(x[1] == Approx(2.0));

  const Eigen::MatrixXd g = random_matrix(10, 10, 4);
  const Eigen::MatrixXd spd = g * g.transpose() + 0.1 * Eigen::MatrixXd::Identity(10, 10);
  const Eigen::VectorXd rhs = random_matrix(10, 1, 5);
  const Eigen::VectorXd sol = solve_linear(spd, rhs);
  REQUIRE((spd * sol - rhs).norm() <= 1e-8 * (spd.norm() * sol.norm() + rhs.norm()));

  Eigen::MatrixXd singular = Eigen::MatrixXd::Ones(3, 3);
  try {
    solve_linear(singular, b);
    FAIL("expected a singular-system error");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::kSingularSystem);
  }
}

TEST_CASE("sphere-constrained minimum: hand example") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
  a(0, 0) = 1;
  a(1, 1) = 3;
  const SphereSolution s = sphere_constrained_min(a, Eigen::Vector2d(2, 0), 1.0);
  REQUIRE(s.x[0] == Approx(1.0).margin(1e-10));
  REQUIRE(s.x[1] == Approx(0.0).margin(1e-10));
  REQUIRE(s.multiplier == Approx(1.0).epsilon(1e-9));
  REQUIRE_FALSE(s.hard_case);
}

TEST_CASE("sphere-constrained minimum: zero linear term gives the bottom eigenvector") {
  const Eigen::MatrixXd a = random_symmetric(5, 12);
  const SphereSolution s = sphere_constrained_min(a, Eigen::VectorXd::Zero(5), 1.0);
  const EigenDecomposition ed = sym_eig(a);
  REQUIRE(s.hard_case);
  REQUIRE((s.x - ed.eigenvectors.col(0)).norm() <= 1e-10);
}

TEST_CASE("sphere-constrained minimum: hard case") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
  a(0, 0) = 1;
  a(1, 1) = 3;
  const SphereSolution s = sphere_constrained_min(a, Eigen::Vector2d(0, 1), 2.0);
  REQUIRE(s.hard_case);
  REQUIRE(s.multiplier == Approx(-1.0));
  REQUIRE(s.x[1] == Approx(0.5));
  REQUIRE(std::abs(s.x[0]) == Approx(std::sqrt(4.0 - 0.25)));
  REQUIRE(s.x.norm() == Approx(2.0).epsilon(1e-12));
}

TEST_CASE("sphere-constrained minimum beats random sphere points") {
  for (std::uint64_t seed = 20; seed < 25; ++seed) {
    const Eigen::MatrixXd a = random_symmetric(6, seed);
    const Eigen::VectorXd b = random_matrix(6, 1, seed + 100);
    const double radius = 0.5 + static_cast<double>(seed - 20);
    const SphereSolution s = sphere_constrained_min(a, b, radius);
    REQUIRE(std::abs(s.x.norm() - radius) <= 1e-8 * radius);
    const double kkt = (a * s.x + s.multiplier * s.x - b).norm();
    REQUIRE(kkt <= 1e-6 * (a.norm() + std::abs(s.multiplier)) * radius);
    REQUIRE(s.multiplier >= -sym_eig(a).eigenvalues[0] - 1e-9);

    const double best = objective(a, b, s.x);
    CounterRng rng(seed, 1);
    double sampled = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 100000; ++k) {
      Eigen::VectorXd z(6);
      for (int i = 0; i < 6; ++i) z[i] = 2.0 * rng.uniform01() - 1.0;
      if (z.norm() == 0.0) continue;
      z *= radius / z.norm();
      sampled = std::min(sampled, objective(a, b, z));
    }
    REQUIRE(best <= sampled + 1e-9);
  }
}
