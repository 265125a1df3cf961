#include <gtest/gtest.h>

#include "fairpca/fpca.hpp"
#include "fairpca/weights.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace fairpca;

namespace {

Matrix col2(double a, double b) {
  Matrix m(2, 1);
  m << a, b;
  return m;
}

// n = 2, r = 1, R_1 = diag(1, 0), R_2 = diag(0, s), at U^t.
DualProblem diag_example(const Matrix& u_t, double s = 1.0) {
  ScatterSet set;
  set.n = 2;
  set.k = 2;
  set.r_k = {Matrix::Zero(2, 2), Matrix::Zero(2, 2)};
  set.r_k[0](0, 0) = 1.0;
  set.r_k[1](1, 1) = s;
  set.samples_per_class = {1, 1};
  return surrogate_params(u_t, set);
}

DualProblem random_problem(Eigen::Index n, Eigen::Index r, Eigen::Index k, std::mt19937_64& rng,
                           bool l1 = false) {
  ScatterSet s;
  s.n = n;
  s.k = static_cast<int>(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    s.r_k.push_back(oracle::random_psd(n, n + 2, rng));
    s.samples_per_class.push_back(n + 2);
  }
  DualProblem p = surrogate_params(oracle::orthonormal(n, r, rng), s);
  if (l1) {
    p.l1_mode = true;
    p.c_k.setZero();
  }
  return p;
}

double h_along(const DualProblem& p, double mu1) {
  Vector mu(2);
  mu << mu1, 1.0 - mu1;
  return dual_objective(p, Weights(mu));
}

} // namespace

TEST(Weights, SimplexInvariant) {
  EXPECT_NO_THROW(Weights((Vector(3) << 0.2, 0.3, 0.5).finished()));
  EXPECT_THROW(Weights((Vector(2) << -0.1, 1.1).finished()), InputError);
  EXPECT_THROW(Weights((Vector(2) << 0.5, 0.6).finished()), InputError);
  EXPECT_THROW(Weights(Vector(0)), InputError);
  EXPECT_NEAR(Weights::uniform(4).mu().sum(), 1.0, 1e-15);
}

TEST(Weights, DualProblemValidation) {
  DualProblem p;
  p.a_k = {Matrix::Ones(2, 1), Matrix::Ones(3, 1)};
  p.c_k = Vector::Zero(2);
  EXPECT_THROW(p.validate(), InputError);
  p.a_k[1] = Matrix::Ones(2, 1);
  EXPECT_NO_THROW(p.validate());
  p.l1_mode = true;
  p.c_k(0) = -1.0;
  EXPECT_THROW(p.validate(), InputError);
  p.c_k = Vector::Zero(3);
  EXPECT_THROW(p.validate(), InputError);
}

TEST(Weights, AssembleAExamples) {
  DualProblem p;
  p.a_k = {col2(1, 0), col2(0, 1)};
  p.c_k = Vector::Zero(2);
  EXPECT_EQ(assemble_a(Weights((Vector(2) << 0, 1).finished()), p), col2(0, 1));
  EXPECT_LT((assemble_a(Weights::uniform(2), p) - col2(0.5, 0.5)).norm(), 1e-15);
  DualProblem one;
  one.a_k = {col2(3, 4)};
  one.c_k = Vector::Zero(1);
  EXPECT_EQ(assemble_a(Weights::uniform(1), one), col2(3, 4));
}

TEST(Weights, SurrogateValuesUseKappa) {
  DualProblem p;
  p.a_k = {col2(1, 0)};
  p.c_k = (Vector(1) << -0.5).finished();
  EXPECT_NEAR(surrogate_value(p, col2(1, 0)), 1.5, 1e-15);
  p.l1_mode = true;
  p.c_k.setZero();
  EXPECT_NEAR(surrogate_value(p, col2(1, 0)), 1.0, 1e-15);
  EXPECT_NEAR(dual_objective(p, Weights::uniform(1)), 1.0, 1e-15);
}

TEST(Weights, ProjectSimplex) {
  const Vector inside = (Vector(3) << 0.2, 0.3, 0.5).finished();
  EXPECT_LT((project_simplex(inside) - inside).norm(), 1e-15);
  EXPECT_LT((project_simplex((Vector(2) << 5, 0).finished()) - (Vector(2) << 1, 0).finished()).norm(), 1e-15);
  EXPECT_LT((project_simplex((Vector(2) << 1, 1).finished()) - (Vector(2) << 0.5, 0.5).finished()).norm(), 1e-15);
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const Vector v = oracle::gaussian(5, 1, rng) * 3.0;
    const Vector p = project_simplex(v);
    EXPECT_GE(p.minCoeff(), 0.0);
    EXPECT_NEAR(p.sum(), 1.0, 1e-14);
    // optimality: (v - p)^T (z - p) <= 0 at every vertex z
    for (Eigen::Index i = 0; i < 5; ++i) {
      Vector z = Vector::Zero(5);
      z(i) = 1;
      EXPECT_LE((v - p).dot(z - p), 1e-12);
    }
  }
}

TEST(Weights, SimplexQpExamples) {
  const Weights lin = simplex_qp(Matrix::Zero(2, 2), (Vector(2) << 1, 2).finished());
  EXPECT_NEAR(lin[0], 1.0, 1e-12);
  const Weights sym = simplex_qp(Matrix::Identity(2, 2), Vector::Zero(2));
  EXPECT_NEAR(sym[0], 0.5, 1e-12);
  EXPECT_NEAR(sym[1], 0.5, 1e-12);
  EXPECT_NEAR(simplex_qp(Matrix::Identity(1, 1), Vector::Zero(1))[0], 1.0, 0.0);
}

TEST(Weights, SimplexQpMatchesGridK3) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix q = oracle::random_psd(3, 2 + trial % 3, rng) / 3.0;
    const Vector c = oracle::gaussian(3, 1, rng);
    const Vector mu = simplex_qp(q, c).mu();
    const double value = mu.dot(q * mu) + c.dot(mu);
    EXPECT_NEAR(value, oracle::simplex_grid_min3(q, c, 1000), 1e-5);
    EXPECT_LE(value, oracle::simplex_qp_exact(q, c) + 1e-9);
  }
}

TEST(Weights, SimplexQpKktResidual) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index k = 2 + trial % 5;
    const Matrix q = oracle::random_psd(k, 1 + trial % 4, rng);
    const Vector c = oracle::gaussian(k, 1, rng) * 2.0;
    const Vector mu = simplex_qp(q, c).mu();
    EXPECT_GE(mu.minCoeff(), 0.0);
    EXPECT_NEAR(mu.sum(), 1.0, 1e-12);
    const Vector g = 2.0 * q * mu + c;
    const double scale = std::max({1.0, q.cwiseAbs().maxCoeff(), c.cwiseAbs().maxCoeff()});
    const double gmin = g.minCoeff();
    for (Eigen::Index i = 0; i < k; ++i)
      if (mu(i) > 1e-9) {
        EXPECT_LE(g(i) - gmin, 1e-6 * scale);
      }
  }
}

TEST(Weights, SimplexQpErrors) {
  EXPECT_THROW(simplex_qp((Matrix(2, 2) << 1, 0, 0, -1).finished(), Vector::Zero(2)), InputError);
  EXPECT_THROW(simplex_qp((Matrix(2, 2) << 1, 1, 0, 1).finished(), Vector::Zero(2)), InputError);
  EXPECT_THROW(simplex_qp(Matrix::Identity(2, 2), Vector::Zero(3)), InputError);

  // Unreachable tolerance with one iteration: the diagnostic carries a
  // feasible best iterate.
  std::mt19937_64 rng(4);
  const Matrix q = oracle::random_psd(6, 2, rng);
  const Vector c = oracle::gaussian(6, 1, rng) * 5.0;
  try {
    simplex_qp(q, c, SimplexQpOptions{-1.0, 1});
    FAIL() << "expected QpNotConverged";
  } catch (const QpNotConverged& e) {
    EXPECT_NEAR(e.best().mu().sum(), 1.0, 1e-12);
    EXPECT_GE(e.gap(), 0.0);
  }
}

TEST(Weights, SolveWeightsSingleClass) {
  DualProblem p;
  p.a_k = {col2(1, 2)};
  p.c_k = (Vector(1) << -3.0).finished();
  const WeightSolution s = solve_weights(p, Weights::uniform(1));
  EXPECT_EQ(s.weights[0], 1.0);
  EXPECT_LE(s.iterations, 1);
}

TEST(Weights, WorkedSymmetricExample) {
  const double h = 1.0 / std::sqrt(2.0);
  const DualProblem p = diag_example(col2(h, h));
  EXPECT_LT((p.a_k[0] - col2(h, 0)).norm(), 1e-15);
  EXPECT_LT((p.a_k[1] - col2(0, h)).norm(), 1e-15);
  EXPECT_NEAR(p.c_k(0), -0.5, 1e-15);
  EXPECT_NEAR(p.c_k(1), -0.5, 1e-15);

  const double grid = oracle::grid_argmin_1d([&](double m) { return h_along(p, m); }, 100000);
  EXPECT_NEAR(grid, 0.5, 1e-5);
  const WeightSolution s = solve_weights(p, Weights((Vector(2) << 0.9, 0.1).finished()));
  EXPECT_NEAR(s.weights[0], 0.5, 1e-4);
  EXPECT_NEAR(solve_weights_bisection(p, 1e-10)[0], 0.5, 1e-9);
}

TEST(Weights, DominatedClassConcentrates) {
  const DualProblem p = diag_example(col2(1, 0), 1e-3);
  const double grid = oracle::grid_argmin_1d([&](double m) { return h_along(p, m); }, 100000);
  EXPECT_LT(grid, 0.01);
  const WeightSolution s = solve_weights(p, Weights::uniform(2));
  EXPECT_GT(s.weights[1], 0.99);
  EXPECT_GT(solve_weights_bisection(p)[1], 0.99);
}

TEST(Weights, SolveWeightsTraceNonincreasing) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = 2 + trial % 6, r = 1 + trial % std::min<Eigen::Index>(n, 3), k = 2 + trial % 4;
    const DualProblem p = random_problem(n, r, k, rng, trial % 3 == 0);
    const WeightSolution s = solve_weights(p, Weights::uniform(k));
    ASSERT_FALSE(s.trace.empty());
    for (std::size_t i = 1; i < s.trace.size(); ++i)
      EXPECT_LE(s.trace[i], s.trace[i - 1] + 1e-12 * std::abs(s.trace[i - 1]));
    EXPECT_NEAR(s.trace.back(), dual_objective(p, s.weights), 1e-12 * std::abs(s.trace.back()) + 1e-12);
  }
}

TEST(Weights, BisectionBoundary) {
  DualProblem p;
  p.a_k = {col2(1, 1), col2(1, 1)};
  p.c_k = (Vector(2) << -2.0, -1.0).finished();
  EXPECT_NEAR(solve_weights_bisection(p, 1e-10)[0], 1.0, 1e-9);
  p.c_k = (Vector(2) << -1.0, -2.0).finished();
  EXPECT_NEAR(solve_weights_bisection(p, 1e-10)[0], 0.0, 1e-9);
  p.a_k.push_back(col2(0, 1));
  p.c_k = Vector::Zero(3);
  EXPECT_THROW(solve_weights_bisection(p), InputError);
}

TEST(Weights, BisectionAgreesWithAlternating) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = 2 + trial % 7, r = 1 + trial % std::min<Eigen::Index>(n, 3);
    const DualProblem p = random_problem(n, r, 2, rng, trial % 4 == 0);
    const double h_alt = dual_objective(p, solve_weights(p, Weights::uniform(2)).weights);
    const double h_bis = dual_objective(p, solve_weights_bisection(p));
    EXPECT_NEAR(h_alt, h_bis, 1e-4 * std::max(1.0, std::abs(h_bis)));
    // both are upper bounds on the 1-D grid minimum up to grid resolution
    const double grid_arg = oracle::grid_argmin_1d([&](double m) { return h_along(p, m); }, 2000);
    EXPECT_LE(h_bis, h_along(p, grid_arg) + 1e-9 * std::max(1.0, std::abs(h_bis)));
  }
}

TEST(Weights, MinimaxSwapSpotCheck) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 3 + trial % 5, r = 1 + trial % 3, k = 2 + trial % 3;
    const DualProblem p = random_problem(n, r, k, rng, trial % 2 == 1);
    const Weights mu = solve_weights(p, Weights::uniform(k)).weights;
    const double primal = surrogate_value(p, polar_factor(assemble_a(mu, p)).matrix());
    for (int v = 0; v < 500; ++v)
      ASSERT_GE(primal, surrogate_value(p, oracle::feasible_v(n, r, rng)));
    // weak duality
    EXPECT_LE(primal, dual_objective(p, mu) + 1e-9 * std::max(1.0, std::abs(primal)));
  }
}
