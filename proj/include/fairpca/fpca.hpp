#ifndef FAIRPCA_FPCA_HPP
#define FAIRPCA_FPCA_HPP

#include "fairpca/dataio.hpp"
#include "fairpca/linalg.hpp"
#include "fairpca/weights.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fairpca {

enum class WeightSolverKind { alternating, bisection };

enum class Termination {
  converged, // relative change of U at most epsilon
  max_iters,
  stalled,   // the next iterate would have lowered the objective; kept U^t
};

std::string to_string(Termination t);

struct FitConfig {
  Eigen::Index r = 1;
  double epsilon = 1e-5;
  int max_iters = 500;
  std::uint64_t seed = 0;
  WeightSolverKind weight_solver = WeightSolverKind::alternating;
  int restarts = 1;

  WeightSolverOptions weights;
  /// Extra Phi/mu alternations allowed per MM step while the surrogate
  /// duality gap exceeds gap_tol * max(1, |h|).
  int refine_iters = 2000;
  double gap_tol = 1e-11;
  double bisection_tol = 1e-12;

  void validate(Eigen::Index n) const;
};

struct FitResult {
  SemiOrthogonal u;
  std::vector<double> objective_trace;
  Matrix class_variance_trace; // (iterations + 1) x K
  Matrix mu_trace;             // (iterations + 1) x K; row 0 is NaN
  Weights mu_final;
  int iterations = 0;
  Termination termination = Termination::max_iters;
  double max_tightness = 0.0;  // worst ||U^T U - I||_F over all iterates
};

struct ObjectiveValue {
  double value = 0.0;
  Vector per_class;
  Eigen::Index argmin = 0; // smallest index attaining the minimum
};

/// Per-class Tr(U^T R_k U) and their minimum.
ObjectiveValue fpca_objective(const Matrix& u, const ScatterSet& s);

/// Tangent-plane minorizer at U^t: A_k = R_k U^t, c_k = -Tr(U^t^T R_k U^t).
DualProblem surrogate_params(const Matrix& u_t, const ScatterSet& s);

struct StepResult {
  SemiOrthogonal u_next;
  Weights mu;
  double duality_gap = 0.0; // h(mu) - min_k g_k(u_next) >= 0
};

/// One MM step: solve the weight problem and take the polar factor of A(mu*).
StepResult mm_step(const DualProblem& p, const FitConfig& cfg);

/// Weight solve followed by Phi/mu alternations from the current weights
/// until the duality gap certificate is met (or refine_iters run out).
/// Shared by the fair PCA variants whose surrogate is a DualProblem.
StepResult certified_weight_step(const DualProblem& p, const FitConfig& cfg);

/// certified_weight_step with the current iterate as a fallback. When A(mu*)
/// is rank deficient its polar factor leaves the null-space columns
/// arbitrary and can score below U^t on the surrogate. If so, and U^t meets
/// the duality gap certificate, U^t is a surrogate maximizer and is returned.
StepResult safeguarded_step(const DualProblem& p, const SemiOrthogonal& u_t, const FitConfig& cfg);

FitResult fit_fpca(const ScatterSet& s, const FitConfig& cfg,
                   const std::optional<SemiOrthogonal>& u0 = std::nullopt);

/// ||U^{t+1} - U^t||_F / ||U^t||_F
double relative_change(const Matrix& next, const Matrix& current);

namespace detail {

struct MmStep {
  SemiOrthogonal u_next;
  Weights mu;
};

/// Generic MM loop: evaluate, step, refuse non-ascent, stop on relative U
/// change. `objective` returns the quantity the MM iterates must not lower.
FitResult run_mm(const SemiOrthogonal& u0, const FitConfig& cfg, Eigen::Index k,
                 const std::function<ObjectiveValue(const Matrix&)>& objective,
                 const std::function<MmStep(const SemiOrthogonal&)>& step);

/// Seed of the i-th restart derived from a master seed.
std::uint64_t split_seed(std::uint64_t master, std::uint64_t index);

} // namespace detail

} // namespace fairpca

#endif // FAIRPCA_FPCA_HPP
