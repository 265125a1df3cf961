#include "fairpca/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace fairpca {

Weights::Weights(Vector mu) : mu_(std::move(mu)) {
  if (mu_.size() < 1)
    throw InputError("Weights: empty vector");
  if (!mu_.allFinite() || mu_.minCoeff() < 0.0)
    throw InputError("Weights: entries must be finite and nonnegative");
  if (std::abs(mu_.sum() - 1.0) > 1e-10)
    throw InputError("Weights: entries must sum to one");
}

Weights Weights::uniform(Eigen::Index k) {
  if (k < 1)
    throw InputError("Weights::uniform: k must be positive");
  return Weights(Vector::Constant(k, 1.0 / static_cast<double>(k)));
}

void DualProblem::validate() const {
  if (a_k.empty())
    throw InputError("DualProblem: no classes");
  if (c_k.size() != k())
    throw InputError("DualProblem: c_k size does not match the number of classes");
  if (!c_k.allFinite())
    throw InputError("DualProblem: non-finite c_k");
  for (const Matrix& a : a_k) {
    require_finite(a, "DualProblem::a_k");
    if (a.rows() != a_k.front().rows() || a.cols() != a_k.front().cols())
      throw InputError("DualProblem: a_k dimensions differ");
  }
  if (l1_mode && c_k.cwiseAbs().maxCoeff() != 0.0)
    throw InputError("DualProblem: l1 mode requires c_k = 0");
}

Matrix assemble_a(const Weights& w, const DualProblem& p) {
  if (w.size() != p.k())
    throw InputError("assemble_a: weight count does not match the number of classes");
  Matrix a = Matrix::Zero(p.a_k.front().rows(), p.a_k.front().cols());
  for (Eigen::Index k = 0; k < p.k(); ++k)
    if (w[k] != 0.0)
      a += w[k] * p.a_k[static_cast<std::size_t>(k)];
  return a;
}

double dual_objective(const DualProblem& p, const Weights& w) {
  return p.kappa() * nuclear_norm(assemble_a(w, p)) + w.mu().dot(p.c_k);
}

Vector surrogate_values(const DualProblem& p, const Matrix& u) {
  Vector g(p.k());
  for (Eigen::Index k = 0; k < p.k(); ++k)
    g(k) = p.kappa() * (p.a_k[static_cast<std::size_t>(k)].cwiseProduct(u)).sum() + p.c_k(k);
  return g;
}

double surrogate_value(const DualProblem& p, const Matrix& u) {
  return surrogate_values(p, u).minCoeff();
}

namespace {

// Slope of h at mu along d, with the polar factor of A(mu) as the element of
// the nuclear norm subdifferential. For convex h its sign brackets the
// minimizer along the line even where h is not differentiable.
double directional_slope(const DualProblem& p, const Vector& mu, const Vector& d) {
  const SemiOrthogonal u = polar_factor(assemble_a(Weights(mu), p));
  double slope = d.dot(p.c_k);
  for (Eigen::Index k = 0; k < p.k(); ++k)
    if (d(k) != 0.0)
      slope += p.kappa() * d(k) * p.a_k[static_cast<std::size_t>(k)].cwiseProduct(u.matrix()).sum();
  return slope;
}

Vector clean_simplex_point(Vector mu) {
  mu = mu.cwiseMax(0.0);
  return mu / mu.sum();
}

// Minimizes h along mu_prev + t d for t in [1, t_max], where t = 1 is the
// alternating-minimization step and t_max reaches the simplex boundary.
// Returns the best point found; never worse than t = 1.
Vector extend_step(const DualProblem& p, const Vector& mu_prev, const Vector& mu_step) {
  const Vector d = mu_step - mu_prev;
  if (d.cwiseAbs().maxCoeff() == 0.0)
    return mu_step;
  double t_max = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < d.size(); ++i)
    if (d(i) < 0.0)
      t_max = std::min(t_max, mu_prev(i) / -d(i));
  if (!(t_max > 1.0) || !std::isfinite(t_max))
    return mu_step;
  auto point = [&](double t) { return clean_simplex_point(mu_prev + t * d); };
  if (directional_slope(p, mu_step, d) >= 0.0)
    return mu_step;
  double lo = 1.0, hi = t_max;
  if (directional_slope(p, point(hi), d) <= 0.0) {
    lo = hi;
  } else {
    for (int i = 0; i < 60 && hi - lo > 1e-12 * t_max; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (directional_slope(p, point(mid), d) < 0.0)
        lo = mid;
      else
        hi = mid;
    }
  }
  const Vector candidate = point(lo);
  return dual_objective(p, Weights(candidate)) <= dual_objective(p, Weights(mu_step)) ? candidate : mu_step;
}

} // namespace

Vector project_simplex(const Vector& v) {
  const Eigen::Index k = v.size();
  std::vector<double> sorted(v.data(), v.data() + k);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    cumulative += sorted[static_cast<std::size_t>(i)];
    const double candidate = (cumulative - 1.0) / static_cast<double>(i + 1);
    if (sorted[static_cast<std::size_t>(i)] - candidate > 0.0)
      theta = candidate;
  }
  Vector out = (v.array() - theta).cwiseMax(0.0);
  return out / out.sum();
}

QpNotConverged::QpNotConverged(Weights best, double gap)
    : std::runtime_error("simplex_qp: no convergence, Frank-Wolfe gap " + std::to_string(gap)),
      best_(std::move(best)), gap_(gap) {}

namespace {

struct Quadratic {
  const Matrix& q;
  const Vector& c;

  double value(const Vector& mu) const { return mu.dot(q * mu) + c.dot(mu); }
  Vector gradient(const Vector& mu) const { return 2.0 * (q * mu) + c; }
  double gap(const Vector& mu) const {
    const Vector g = gradient(mu);
    return std::max(0.0, g.dot(mu) - g.minCoeff());
  }
};

// Minimizer of the quadratic on the face spanned by the support of `mu`, or
// an empty vector if that point leaves the simplex.
Vector polish_on_support(const Quadratic& f, const Vector& mu) {
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < mu.size(); ++i)
    if (mu(i) > 0.0)
      support.push_back(i);
  const auto s = static_cast<Eigen::Index>(support.size());
  Matrix kkt = Matrix::Zero(s + 1, s + 1);
  Vector rhs(s + 1);
  for (Eigen::Index a = 0; a < s; ++a) {
    for (Eigen::Index b = 0; b < s; ++b)
      kkt(a, b) = 2.0 * f.q(support[a], support[b]);
    kkt(a, s) = 1.0;
    kkt(s, a) = 1.0;
    rhs(a) = -f.c(support[a]);
  }
  rhs(s) = 1.0;
  const Vector sol = kkt.completeOrthogonalDecomposition().solve(rhs);
  if (!sol.allFinite() || (kkt * sol - rhs).norm() > 1e-9 * (1.0 + rhs.norm()))
    return {};
  Vector out = Vector::Zero(mu.size());
  for (Eigen::Index a = 0; a < s; ++a) {
    if (sol(a) < -1e-13)
      return {};
    out(support[a]) = std::max(sol(a), 0.0);
  }
  return out / out.sum();
}

} // namespace

Weights simplex_qp(const Matrix& q, const Vector& c, const SimplexQpOptions& options) {
  const Eigen::Index k = c.size();
  if (k < 1 || q.rows() != k || q.cols() != k)
    throw InputError("simplex_qp: dimension mismatch");
  require_finite(q, "simplex_qp");
  if (!c.allFinite())
    throw InputError("simplex_qp: non-finite linear term");
  const double qmax = q.cwiseAbs().maxCoeff();
  if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, qmax))
    throw InputError("simplex_qp: Q is not symmetric");
  const Matrix qs = 0.5 * (q + q.transpose());
  const Vector eig = Eigen::SelfAdjointEigenSolver<Matrix>(qs, Eigen::EigenvaluesOnly).eigenvalues();
  const double spectral = eig.cwiseAbs().maxCoeff();
  if (eig.minCoeff() < -1e-8 * spectral)
    throw InputError("simplex_qp: Q is not positive semidefinite");

  const Quadratic f{qs, c};
  const double scale = std::max({1.0, qmax, c.cwiseAbs().maxCoeff()});
  const double target = options.tol * scale;
  // step 1/L with L the gradient's Lipschitz constant; a floor keeps Q = 0 finite
  const double lipschitz = std::max(2.0 * eig.maxCoeff(), 1e-12 * scale);

  Vector x = Vector::Constant(k, 1.0 / static_cast<double>(k));
  Vector best = x;
  double best_value = f.value(best);
  auto consider = [&](const Vector& candidate) {
    const double v = f.value(candidate);
    if (v <= best_value) {
      best = candidate;
      best_value = v;
    }
    return f.gap(candidate) <= target;
  };

  if (k == 1)
    return Weights(Vector::Ones(1));
  if (Vector polished = polish_on_support(f, x); polished.size() > 0 && consider(polished))
    return Weights(polished);

  Vector y = x;
  double t = 1.0;
  double x_value = f.value(x);
  for (int it = 1; it <= options.max_iters; ++it) {
    Vector x_next = project_simplex(y - f.gradient(y) / lipschitz);
    const double next_value = f.value(x_next);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    if (next_value > x_value) {
      // function-value restart of the momentum
      y = x_next;
      t = 1.0;
    } else {
      y = x_next + ((t - 1.0) / t_next) * (x_next - x);
      t = t_next;
    }
    x = std::move(x_next);
    x_value = next_value;
    if (consider(x))
      return Weights(best);
    if (it % 10 == 0) {
      Vector polished = polish_on_support(f, x);
      if (polished.size() > 0 && consider(polished) && f.value(polished) <= best_value)
        return Weights(polished);
    }
  }
  if (f.gap(best) <= target)
    return Weights(best);
  throw QpNotConverged(Weights(best), f.gap(best));
}

WeightSolution solve_weights(const DualProblem& p, const Weights& mu0,
                             const WeightSolverOptions& options) {
  p.validate();
  const Eigen::Index k = p.k();
  if (mu0.size() != k)
    throw InputError("solve_weights: mu0 size does not match the number of classes");
  if (k == 1)
    return {Weights(Vector::Ones(1)), {dual_objective(p, Weights(Vector::Ones(1)))}, 1, true};

  const double half_kappa = 0.5 * p.kappa();
  const Eigen::Index r = p.a_k.front().cols();

  // cross Gram matrices A_i^T A_j, fixed for the whole solve
  std::vector<Matrix> gram(static_cast<std::size_t>(k * k));
  double scale_a = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    scale_a = std::max(scale_a, half_kappa * p.a_k[static_cast<std::size_t>(i)].norm());
    for (Eigen::Index j = i; j < k; ++j)
      gram[static_cast<std::size_t>(i * k + j)] =
          p.a_k[static_cast<std::size_t>(i)].transpose() * p.a_k[static_cast<std::size_t>(j)];
  }

  struct Evaluated {
    double h;
    Matrix phi;
  };
  auto evaluate = [&](const Vector& mu) {
    const Matrix m = half_kappa * assemble_a(Weights(mu), p);
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinV);
    const Vector& sigma = svd.singularValues();
    const double h = 2.0 * sigma.sum() + mu.dot(p.c_k);
    if (scale_a == 0.0)
      return Evaluated{h, Matrix::Identity(r, r)};
    const double smax = sigma.size() > 0 ? sigma(0) : 0.0;
    const double floor = std::max(kDefaultRidgeRel * smax * smax,
                                  kDefaultRidgeRel * kDefaultRidgeRel * scale_a * scale_a);
    Vector inv_root = Vector::Constant(r, 1.0 / std::sqrt(floor));
    for (Eigen::Index i = 0; i < sigma.size(); ++i)
      inv_root(i) = 1.0 / std::sqrt(std::max(sigma(i) * sigma(i), floor));
    const Matrix& v = svd.matrixV();
    return Evaluated{h, v * inv_root.asDiagonal() * v.transpose()};
  };

  Vector mu = mu0.mu();
  Evaluated current = evaluate(mu);
  WeightSolution out{mu0, {current.h}, 0, false};
  const double h_slack = 1e-13;

  Matrix q(k, k);
  for (int it = 1; it <= options.max_iters; ++it) {
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index j = i; j < k; ++j) {
        const Matrix& g = gram[static_cast<std::size_t>(i * k + j)];
        q(i, j) = half_kappa * half_kappa * current.phi.cwiseProduct(g.transpose()).sum();
        q(j, i) = q(i, j);
      }

    Vector next;
    try {
      next = simplex_qp(q, p.c_k, options.qp).mu();
    } catch (const QpNotConverged& e) {
      next = e.best().mu();
    }
    if (options.line_search)
      next = extend_step(p, mu, next);
    Evaluated candidate = evaluate(next);
    if (candidate.h > current.h + h_slack * std::max(1.0, std::abs(current.h))) {
      // inexact inner solve; keep the better point
      out.converged = true;
      break;
    }
    const double change = (next - mu).norm() / mu.norm();
    mu = std::move(next);
    current = std::move(candidate);
    out.trace.push_back(current.h);
    out.iterations = it;
    if (change <= options.tol) {
      out.converged = true;
      break;
    }
  }
  out.weights = Weights(mu);
  return out;
}

Weights solve_weights_bisection(const DualProblem& p, double tol) {
  p.validate();
  if (p.k() != 2)
    throw InputError("solve_weights_bisection: requires exactly two classes");
  if (!(tol > 0.0))
    throw InputError("solve_weights_bisection: tol must be positive");
  auto h = [&](double m) { return dual_objective(p, Weights(Vector{{m, 1.0 - m}})); };
  const Vector d{{1.0, -1.0}};
  auto slope = [&](double m) { return directional_slope(p, Vector{{m, 1.0 - m}}, d); };
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (slope(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  double best = 0.5 * (lo + hi);
  double best_value = h(best);
  for (double edge : {0.0, 1.0}) {
    if (const double v = h(edge); v < best_value) {
      best = edge;
      best_value = v;
    }
  }
  return Weights(Vector{{best, 1.0 - best}});
}

} // namespace fairpca
