#ifndef FAIRPCA_FRPCA_HPP
#define FAIRPCA_FRPCA_HPP

#include "fairpca/fpca.hpp"

#include <optional>
#include <vector>

namespace fairpca {

/// W_k = sgn(U^t^T Y_k), one r x N_k ternary matrix per class.
struct SignMatrices {
  std::vector<Matrix> w_k;
};

/// Per-class sum |U^T Y_k|_ij and their minimum.
ObjectiveValue frpca_objective(const Matrix& u, const ClassedDataset& d);

/// sign(0) = 0, which keeps Tr(U^t^T Y_k W_k^T) = ||U^t^T Y_k||_1 exact.
SignMatrices sign_matrices(const Matrix& u_t, const ClassedDataset& d);

/// Weight problem of the l1 minorizer: A_k = Y_k W_k^T (n x r), c_k = 0,
/// l1 mode. Then Tr(A_k^T U) = Tr(U^T Y_k W_k^T) = sum_ij (U^T Y_k)_ij (W_k)_ij.
DualProblem robust_dual(const SignMatrices& w, const ClassedDataset& d);

/// Maximizes min_k Tr(A_k^T U) over U^T U <= I via min over the simplex of
/// ||A(mu)||_*; returns the polar factor of A(mu*).
StepResult solve_surrogate_l1(const SignMatrices& w, const ClassedDataset& d, const FitConfig& cfg);

/// MM on min_k ||U^T Y_k||_1 starting from u0.
FitResult fit_frpca(const ClassedDataset& d, const FitConfig& cfg, const SemiOrthogonal& u0);

/// As above, started from the FPCA solution on class_scatter(d).
FitResult fit_frpca(const ClassedDataset& d, const FitConfig& cfg);

/// ||U_hat U_hat^T - U_ref U_ref^T||_F / ||U_ref U_ref^T||_F
double normalized_subspace_error(const Matrix& u_hat, const Matrix& u_ref);

} // namespace fairpca

#endif // FAIRPCA_FRPCA_HPP
