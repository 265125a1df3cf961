#ifndef FAIRPCA_FSPCA_HPP
#define FAIRPCA_FSPCA_HPP

#include "fairpca/fpca.hpp"

#include <optional>

namespace fairpca {

struct SparseConfig {
  FitConfig base;
  double lambda = 0.0;
  double zero_threshold = 1e-6;
  double inner_tol = 1e-8;    // relative change of the dual objective
  int inner_max_iters = 200;  // inner_tol is honored only past this and only once U ascends
  int b_steps = 10;           // projected-gradient steps on B per inner iteration

  void validate(Eigen::Index n) const;
};

/// Dual variable of the l1 penalty: an n x r matrix with entries in [-1, 1].
class BoxMatrix {
 public:
  explicit BoxMatrix(Matrix b);
  const Matrix& matrix() const { return b_; }

 private:
  Matrix b_;
};

/// min_k Tr(U^T R_k U) - lambda * sum |u_ij|. per_class holds the
/// unpenalized class variances.
ObjectiveValue fspca_objective_detail(const Matrix& u, const ScatterSet& s, double lambda);
double fspca_objective(const Matrix& u, const ScatterSet& s, double lambda);

/// Entries with |u_ij| > zero_threshold.
Eigen::Index count_nonzeros(const Matrix& u, double zero_threshold);

struct SparseSurrogateSolution {
  SemiOrthogonal u;
  Weights mu;
  BoxMatrix b;
  double duality_gap = 0.0;
  int inner_iterations = 0;
  bool converged = false; // false: inner cap hit before inner_tol and gap_tol
};

/// Maximizes min_k g_k(U) - lambda ||U||_1 over U^T U <= I through its dual
///     min over mu in the simplex, |B_ij| <= 1 of 2 ||A(mu) + (lambda/2) B||_* + mu^T c,
/// by block-coordinate descent on Tr(Phi^-1) + Tr(M^T M Phi) + mu^T c with
/// M = A(mu) + (lambda/2) B: Phi in closed form, mu by a simplex QP, B by
/// projected gradient with step 2 / (lambda^2 lambda_max(Phi)). B starts at
/// -sign(U^t), the tight point of the penalty minorizer. U is the polar
/// factor of the final M. The loop runs until the gap is certified, or until
/// the dual stagnates with an ascending candidate, capped at 5 refine_iters.
/// With lambda = 0 this is exactly mm_step.
SparseSurrogateSolution solve_surrogate_sparse(const DualProblem& p, const Matrix& u_t,
                                               double lambda, const SparseConfig& cfg);

/// One MM step from U^t. Like safeguarded_step, U^t is kept when it beats
/// the surrogate solution and meets the duality gap certificate itself.
SparseSurrogateSolution sparse_mm_step(const ScatterSet& s, const SemiOrthogonal& u_t, const SparseConfig& cfg);

FitResult fit_fspca(const ScatterSet& s, const SparseConfig& cfg,
                    const std::optional<SemiOrthogonal>& u0 = std::nullopt);

} // namespace fairpca

#endif // FAIRPCA_FSPCA_HPP
