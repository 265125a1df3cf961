#include "fairpca/fspca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fairpca {

void SparseConfig::validate(Eigen::Index n) const {
  base.validate(n);
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw InputError("SparseConfig: lambda must be a finite nonnegative number");
  if (!(zero_threshold > 0.0))
    throw InputError("SparseConfig: zero_threshold must be positive");
  if (inner_max_iters < 1 || b_steps < 1)
    throw InputError("SparseConfig: inner iteration counts must be positive");
}

BoxMatrix::BoxMatrix(Matrix b) : b_(std::move(b)) {
  require_finite(b_, "BoxMatrix");
  if (b_.cwiseAbs().maxCoeff() > 1.0)
    throw InputError("BoxMatrix: entries must lie in [-1, 1]");
}

ObjectiveValue fspca_objective_detail(const Matrix& u, const ScatterSet& s, double lambda) {
  ObjectiveValue out = fpca_objective(u, s);
  out.value -= lambda * u.cwiseAbs().sum();
  return out;
}

double fspca_objective(const Matrix& u, const ScatterSet& s, double lambda) {
  return fspca_objective_detail(u, s, lambda).value;
}

Eigen::Index count_nonzeros(const Matrix& u, double zero_threshold) {
  if (!(zero_threshold > 0.0))
    throw InputError("count_nonzeros: threshold must be positive");
  return (u.array().abs() > zero_threshold).count();
}

namespace {

Matrix sign_of(const Matrix& u) {
  return u.unaryExpr([](double x) { return static_cast<double>((x > 0.0) - (x < 0.0)); });
}

struct PhiEval {
  double nuclear = 0.0; // ||M||_*
  Matrix phi;           // (M^T M)^{-1/2}, eigenvalues floored
  double phi_max = 0.0;
};

PhiEval evaluate_phi(const Matrix& m, double scale) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinV);
  const Vector& sigma = svd.singularValues();
  const Eigen::Index r = m.cols();
  const double smax = sigma.size() > 0 ? sigma(0) : 0.0;
  const double floor = std::max({kDefaultRidgeRel * smax * smax,
                                 kDefaultRidgeRel * kDefaultRidgeRel * scale * scale,
                                 std::numeric_limits<double>::min()});
  Vector inv_root = Vector::Constant(r, 1.0 / std::sqrt(floor));
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    inv_root(i) = 1.0 / std::sqrt(std::max(sigma(i) * sigma(i), floor));
  const Matrix& v = svd.matrixV();
  return {sigma.sum(), v * inv_root.asDiagonal() * v.transpose(), inv_root.maxCoeff()};
}

} // namespace

SparseSurrogateSolution solve_surrogate_sparse(const DualProblem& p, const Matrix& u_t,
                                               double lambda, const SparseConfig& cfg) {
  p.validate();
  if (p.l1_mode)
    throw InputError("solve_surrogate_sparse: expects a quadratic-fit surrogate");
  if (!(lambda >= 0.0))
    throw InputError("solve_surrogate_sparse: lambda must be nonnegative");
  const Matrix& a0 = p.a_k.front();
  if (u_t.rows() != a0.rows() || u_t.cols() != a0.cols())
    throw InputError("solve_surrogate_sparse: U^t shape does not match A_k");

  if (lambda == 0.0) {
    StepResult step = mm_step(p, cfg.base);
    return {std::move(step.u_next), std::move(step.mu), BoxMatrix(-sign_of(u_t)),
            step.duality_gap, 0, true};
  }

  const Eigen::Index k = p.k();
  const double half_lambda = 0.5 * lambda;
  double scale = 0.0;
  for (const Matrix& a : p.a_k)
    scale = std::max(scale, a.norm());
  scale = std::max(scale, half_lambda * std::sqrt(static_cast<double>(a0.size())));

  std::vector<Matrix> gram(static_cast<std::size_t>(k * k));
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = i; j < k; ++j)
      gram[static_cast<std::size_t>(i * k + j)] =
          p.a_k[static_cast<std::size_t>(i)].transpose() * p.a_k[static_cast<std::size_t>(j)];

  Vector mu = Weights::uniform(k).mu();
  Matrix b = -sign_of(u_t);
  auto assemble = [&]() -> Matrix { return assemble_a(Weights(mu), p) + half_lambda * b; };
  auto penalized_surrogate = [&](const Matrix& u) {
    return surrogate_value(p, u) - lambda * u.cwiseAbs().sum();
  };

  Matrix m = assemble();
  PhiEval eval = evaluate_phi(m, scale);
  double h = 2.0 * eval.nuclear + mu.dot(p.c_k);
  double gap = h - penalized_surrogate(polar_factor(m).matrix());

  const double at_t = penalized_surrogate(u_t);
  const double gap_tol = cfg.base.gap_tol;
  const int max_iters = std::max(cfg.inner_max_iters, 5 * cfg.base.refine_iters);
  int it = 0;
  bool converged = false;
  Matrix q(k, k);
  Vector c_eff(k);
  while (it < max_iters) {
    ++it;
    // mu step: Tr(M^T M Phi) is quadratic in mu once B is fixed
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = i; j < k; ++j) {
        q(i, j) = eval.phi.cwiseProduct(gram[static_cast<std::size_t>(i * k + j)].transpose()).sum();
        q(j, i) = q(i, j);
      }
      c_eff(i) = p.c_k(i) +
                 lambda * (p.a_k[static_cast<std::size_t>(i)].transpose() * b).cwiseProduct(eval.phi).sum();
    }
    try {
      mu = simplex_qp(q, c_eff, cfg.base.weights.qp).mu();
    } catch (const QpNotConverged& e) {
      mu = e.best().mu();
    }

    // B step: projected gradient on the box
    const Matrix a_mu = assemble_a(Weights(mu), p);
    // 1 / L with L = (lambda^2 / 2) lambda_max(Phi)
    const double step = 2.0 / (lambda * lambda * eval.phi_max);
    for (int s = 0; s < cfg.b_steps; ++s) {
      const Matrix grad = lambda * (a_mu + half_lambda * b) * eval.phi;
      b = (b - step * grad).cwiseMax(-1.0).cwiseMin(1.0);
    }

    m = a_mu + half_lambda * b;
    eval = evaluate_phi(m, scale);
    const double h_next = 2.0 * eval.nuclear + mu.dot(p.c_k);
    const double change = std::abs(h - h_next);
    h = h_next;
    gap = h - penalized_surrogate(polar_factor(m).matrix());
    if (gap <= gap_tol * std::max(1.0, std::abs(h))) {
      converged = true;
      break;
    }
    // a stagnating dual may stop early only once the candidate ascends
    if (it >= cfg.inner_max_iters && change <= cfg.inner_tol * std::max(1.0, std::abs(h)) &&
        h - gap >= at_t)
      break;
  }
  return {polar_factor(m), Weights(mu), BoxMatrix(b), gap, it, converged};
}

SparseSurrogateSolution sparse_mm_step(const ScatterSet& s, const SemiOrthogonal& u_t, const SparseConfig& cfg) {
  const DualProblem p = surrogate_params(u_t.matrix(), s);
  SparseSurrogateSolution sol = solve_surrogate_sparse(p, u_t.matrix(), cfg.lambda, cfg);
  auto penalized = [&](const Matrix& v) { return surrogate_value(p, v) - cfg.lambda * v.cwiseAbs().sum(); };
  const double g_next = penalized(sol.u.matrix()), g_t = penalized(u_t.matrix());
  if (g_next >= g_t)
    return sol;
  const double h = sol.duality_gap + g_next;
  if (h - g_t > cfg.base.gap_tol * std::max(1.0, std::abs(h)))
    return sol;
  sol.u = u_t;
  sol.duality_gap = h - g_t;
  return sol;
}

FitResult fit_fspca(const ScatterSet& s, const SparseConfig& cfg,
                    const std::optional<SemiOrthogonal>& u0) {
  cfg.validate(s.n);
  if (u0 && (u0->rows() != s.n || u0->cols() != cfg.base.r))
    throw InputError("fit_fspca: initial U has the wrong shape");

  auto objective = [&](const Matrix& u) { return fspca_objective_detail(u, s, cfg.lambda); };
  auto step = [&](const SemiOrthogonal& u) {
    SparseSurrogateSolution sol = sparse_mm_step(s, u, cfg);
    return detail::MmStep{std::move(sol.u), std::move(sol.mu)};
  };

  std::optional<FitResult> best;
  for (int i = 0; i < cfg.base.restarts; ++i) {
    const SemiOrthogonal start =
        (i == 0 && u0) ? *u0
                       : random_semi_orthogonal(s.n, cfg.base.r,
                                                detail::split_seed(cfg.base.seed, static_cast<std::uint64_t>(i)));
    FitResult fit = detail::run_mm(start, cfg.base, s.k, objective, step);
    if (!best || fit.objective_trace.back() > best->objective_trace.back())
      best = std::move(fit);
  }
  return std::move(*best);
}

} // namespace fairpca
