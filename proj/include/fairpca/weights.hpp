#ifndef FAIRPCA_WEIGHTS_HPP
#define FAIRPCA_WEIGHTS_HPP

#include "fairpca/linalg.hpp"

#include <stdexcept>
#include <vector>

namespace fairpca {

/// A point of the probability simplex: mu_k >= 0, sum mu_k = 1.
class Weights {
 public:
  explicit Weights(Vector mu);
  static Weights uniform(Eigen::Index k);

  const Vector& mu() const { return mu_; }
  Eigen::Index size() const { return mu_.size(); }
  double operator[](Eigen::Index i) const { return mu_(i); }

 private:
  Vector mu_;
};

/// Linearized surrogate of one MM step.
///
/// Class k contributes g_k(U) = kappa * Tr(A_k^T U) + c_k with kappa = 2
/// (quadratic fits) or kappa = 1 in l1 mode (robust fits, c_k = 0). The
/// weight problem is min over the simplex of
///     h(mu) = kappa * ||A(mu)||_* + sum_k mu_k c_k,   A(mu) = sum_k mu_k A_k.
struct DualProblem {
  std::vector<Matrix> a_k; // each n x r
  Vector c_k;
  bool l1_mode = false;

  Eigen::Index k() const { return static_cast<Eigen::Index>(a_k.size()); }
  double kappa() const { return l1_mode ? 1.0 : 2.0; }
  void validate() const;
};

Matrix assemble_a(const Weights& w, const DualProblem& p);

/// h(mu)
double dual_objective(const DualProblem& p, const Weights& w);

/// Per-class surrogate values g_k(U).
Vector surrogate_values(const DualProblem& p, const Matrix& u);

/// min_k g_k(U)
double surrogate_value(const DualProblem& p, const Matrix& u);

/// Euclidean projection onto the probability simplex.
Vector project_simplex(const Vector& v);

/// Simplex QP did not meet its tolerance; carries the best iterate found.
class QpNotConverged : public std::runtime_error {
 public:
  QpNotConverged(Weights best, double gap);
  const Weights& best() const { return best_; }
  double gap() const { return gap_; }

 private:
  Weights best_;
  double gap_;
};

struct SimplexQpOptions {
  double tol = 1e-9;
  int max_iters = 5000;
};

/// min mu^T Q mu + c^T mu over the simplex.
///
/// Accelerated projected gradient with exact simplex projection. Every few
/// iterations the KKT system is solved on the current support, which finishes
/// small problems exactly. Stops once the Frank-Wolfe gap
///     grad^T mu - min_i grad_i  (an upper bound on suboptimality)
/// is at most tol * max(1, max|Q|, max|c|).
Weights simplex_qp(const Matrix& q, const Vector& c, const SimplexQpOptions& options = {});

struct WeightSolution {
  Weights weights;
  std::vector<double> trace; // h(mu^t), t = 0..iterations
  int iterations = 0;
  bool converged = false;
};

struct WeightSolverOptions {
  double tol = 1e-5;    // relative mu change
  int max_iters = 50;
  /// After each mu step, search along the step direction up to the simplex
  /// boundary (exact for convex h, accepted only if h decreases).
  bool line_search = true;
  SimplexQpOptions qp;
};

/// Alternating minimization of Tr(Phi^-1) + Tr(M^T M Phi) + mu^T c over
/// Phi > 0 and mu in the simplex, with M = (kappa / 2) A(mu). The Phi step is
/// the closed form (M^T M)^{-1/2}; the mu step is a simplex QP with
///     Q_ij = (kappa / 2)^2 * (Tr(Phi A_i^T A_j) + Tr(Phi A_j^T A_i)) / 2.
/// With line_search the mu step is extended along its direction while h
/// keeps decreasing. A step that would increase h is rejected, so the trace
/// is nonincreasing.
WeightSolution solve_weights(const DualProblem& p, const Weights& mu0,
                             const WeightSolverOptions& options = {});

/// K = 2 only: bisection on the sign of the derivative of the convex scalar
/// function mu_1 -> h(mu_1, 1 - mu_1), computed in closed form as
/// kappa Tr(U^T (A_1 - A_2)) + c_1 - c_2 with U the polar factor of A(mu).
Weights solve_weights_bisection(const DualProblem& p, double tol = 1e-10);

} // namespace fairpca

#endif // FAIRPCA_WEIGHTS_HPP
