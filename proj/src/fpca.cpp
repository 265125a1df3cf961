#include "fairpca/fpca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fairpca {

std::string to_string(Termination t) {
  switch (t) {
    case Termination::converged: return "converged";
    case Termination::max_iters: return "max_iters";
    case Termination::stalled: return "stalled";
  }
  return "unknown";
}

void FitConfig::validate(Eigen::Index n) const {
  if (r < 1 || r > n)
    throw InputError("FitConfig: rank must satisfy 1 <= r <= n");
  if (!(epsilon > 0.0))
    throw InputError("FitConfig: epsilon must be positive");
  if (max_iters < 1)
    throw InputError("FitConfig: max_iters must be positive");
  if (restarts < 1)
    throw InputError("FitConfig: restarts must be positive");
}

ObjectiveValue fpca_objective(const Matrix& u, const ScatterSet& s) {
  if (u.rows() != s.n)
    throw InputError("fpca_objective: dimension mismatch");
  ObjectiveValue out;
  out.per_class.resize(s.k);
  for (int k = 0; k < s.k; ++k) {
    const Matrix& r = s.r_k[static_cast<std::size_t>(k)];
    out.per_class(k) = (u.transpose() * r * u).trace();
  }
  out.value = out.per_class.minCoeff(&out.argmin);
  return out;
}

DualProblem surrogate_params(const Matrix& u_t, const ScatterSet& s) {
  if (u_t.rows() != s.n)
    throw InputError("surrogate_params: dimension mismatch");
  DualProblem p;
  p.c_k.resize(s.k);
  p.a_k.reserve(static_cast<std::size_t>(s.k));
  for (int k = 0; k < s.k; ++k) {
    Matrix a = s.r_k[static_cast<std::size_t>(k)] * u_t;
    p.c_k(k) = -(u_t.cwiseProduct(a)).sum();
    p.a_k.push_back(std::move(a));
  }
  return p;
}

namespace {

StepResult finish_step(const DualProblem& p, Weights mu) {
  SemiOrthogonal u = polar_factor(assemble_a(mu, p));
  const double gap = dual_objective(p, mu) - surrogate_value(p, u.matrix());
  return {std::move(u), std::move(mu), gap};
}

} // namespace

StepResult certified_weight_step(const DualProblem& p, const FitConfig& cfg) {
  p.validate();
  if (cfg.weight_solver == WeightSolverKind::bisection && p.k() == 2)
    return finish_step(p, solve_weights_bisection(p, cfg.bisection_tol));

  WeightSolution sol = solve_weights(p, Weights::uniform(p.k()), cfg.weights);
  StepResult step = finish_step(p, sol.weights);

  WeightSolverOptions refine = cfg.weights;
  refine.tol = 0.0;
  int spent = 0;
  while (spent < cfg.refine_iters) {
    const double h = dual_objective(p, step.mu);
    if (step.duality_gap <= cfg.gap_tol * std::max(1.0, std::abs(h)))
      break;
    refine.max_iters = std::min(50, cfg.refine_iters - spent);
    sol = solve_weights(p, step.mu, refine);
    if (sol.iterations == 0)
      break;
    spent += sol.iterations;
    step = finish_step(p, sol.weights);
  }
  return step;
}

StepResult safeguarded_step(const DualProblem& p, const SemiOrthogonal& u_t, const FitConfig& cfg) {
  StepResult step = certified_weight_step(p, cfg);
  const double g_next = surrogate_value(p, step.u_next.matrix());
  const double g_t = surrogate_value(p, u_t.matrix());
  if (g_next >= g_t)
    return step;
  // Any simplex point bounds the surrogate from above. Dropping weights below
  // 1e-6 removes the residue left by an optimum on a face of the simplex.
  Vector snapped = step.mu.mu();
  for (Eigen::Index k = 0; k < snapped.size(); ++k)
    if (snapped(k) < 1e-6)
      snapped(k) = 0.0;
  Weights mu_snapped(snapped / snapped.sum());
  const double h_snapped = dual_objective(p, mu_snapped);
  const double h = std::min(h_snapped, step.duality_gap + g_next);
  const double gap_t = h - g_t;
  if (gap_t > cfg.gap_tol * std::max(1.0, std::abs(h)))
    return step;
  return {u_t, h_snapped < step.duality_gap + g_next ? std::move(mu_snapped) : std::move(step.mu), gap_t};
}

StepResult mm_step(const DualProblem& p, const FitConfig& cfg) {
  return certified_weight_step(p, cfg);
}

double relative_change(const Matrix& next, const Matrix& current) {
  return (next - current).norm() / current.norm();
}

namespace detail {

std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) {
  // splitmix64 finalizer over (master, index)
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

FitResult run_mm(const SemiOrthogonal& u0, const FitConfig& cfg, Eigen::Index k,
                 const std::function<ObjectiveValue(const Matrix&)>& objective,
                 const std::function<MmStep(const SemiOrthogonal&)>& step) {
  std::vector<double> values;
  std::vector<Vector> per_class;
  std::vector<Vector> mus;

  SemiOrthogonal u = u0;
  ObjectiveValue current = objective(u.matrix());
  values.push_back(current.value);
  per_class.push_back(current.per_class);
  mus.push_back(Vector::Constant(k, std::numeric_limits<double>::quiet_NaN()));

  Weights mu_final = Weights::uniform(k);
  Termination termination = Termination::max_iters;
  double max_tightness = u.tightness();
  int iterations = 0;

  for (int t = 1; t <= cfg.max_iters; ++t) {
    MmStep next = step(u);
    const ObjectiveValue next_value = objective(next.u_next.matrix());
    // MM ascent holds for an exact surrogate solve; refuse a step that loses
    // more than rounding noise.
    if (next_value.value < current.value - 1e-12 * std::max(1.0, std::abs(current.value))) {
      termination = Termination::stalled;
      break;
    }
    const double change = relative_change(next.u_next.matrix(), u.matrix());
    u = std::move(next.u_next);
    mu_final = std::move(next.mu);
    current = next_value;
    max_tightness = std::max(max_tightness, u.tightness());
    iterations = t;
    values.push_back(current.value);
    per_class.push_back(current.per_class);
    mus.push_back(mu_final.mu());
    if (change <= cfg.epsilon) {
      termination = Termination::converged;
      break;
    }
  }

  const auto rows = static_cast<Eigen::Index>(values.size());
  Matrix class_trace(rows, k);
  Matrix mu_trace(rows, k);
  for (Eigen::Index i = 0; i < rows; ++i) {
    class_trace.row(i) = per_class[static_cast<std::size_t>(i)].transpose();
    mu_trace.row(i) = mus[static_cast<std::size_t>(i)].transpose();
  }
  return FitResult{std::move(u),     std::move(values),       std::move(class_trace),
                   std::move(mu_trace), std::move(mu_final), iterations,
                   termination,      max_tightness};
}

} // namespace detail

FitResult fit_fpca(const ScatterSet& s, const FitConfig& cfg,
                   const std::optional<SemiOrthogonal>& u0) {
  cfg.validate(s.n);
  if (u0 && (u0->rows() != s.n || u0->cols() != cfg.r))
    throw InputError("fit_fpca: initial U has the wrong shape");

  auto objective = [&](const Matrix& u) { return fpca_objective(u, s); };
  auto step = [&](const SemiOrthogonal& u) {
    StepResult r = safeguarded_step(surrogate_params(u.matrix(), s), u, cfg);
    return detail::MmStep{std::move(r.u_next), std::move(r.mu)};
  };

  std::optional<FitResult> best;
  for (int i = 0; i < cfg.restarts; ++i) {
    const SemiOrthogonal start =
        (i == 0 && u0) ? *u0
                       : random_semi_orthogonal(s.n, cfg.r, detail::split_seed(cfg.seed, static_cast<std::uint64_t>(i)));
    FitResult fit = detail::run_mm(start, cfg, s.k, objective, step);
    if (!best || fit.objective_trace.back() > best->objective_trace.back())
      best = std::move(fit);
  }
  return std::move(*best);
}

} // namespace fairpca
