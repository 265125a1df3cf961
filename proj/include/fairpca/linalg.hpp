#ifndef FAIRPCA_LINALG_HPP
#define FAIRPCA_LINALG_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fairpca {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Thrown when an argument violates a documented precondition.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Throws InputError if any entry is NaN or Inf. `what` names the argument.
void require_finite(const Matrix& a, const std::string& what);

/// An n x r matrix with orthonormal columns (n >= r >= 1).
///
/// Construction measures ||U^T U - I||_F and rejects anything looser than
/// kTolerance, so every SemiOrthogonal in the program is feasible for the
/// UᵀU = I constraint.
class SemiOrthogonal {
 public:
  static constexpr double kTolerance = 1e-8;

  explicit SemiOrthogonal(Matrix u);

  const Matrix& matrix() const { return u_; }
  Eigen::Index rows() const { return u_.rows(); }
  Eigen::Index cols() const { return u_.cols(); }
  double tightness() const { return tightness_; }

  /// Orthogonal projector U U^T (n x n).
  Matrix projector() const { return u_ * u_.transpose(); }

 private:
  Matrix u_;
  double tightness_;
};

/// ||U^T U - I||_F
double orthogonality_defect(const Matrix& u);

struct ThinSvd {
  Matrix left;      // n x r
  Vector singulars; // r, nonincreasing
  Matrix right;     // r x r
};

/// Thin SVD of an n x r matrix with n >= r.
ThinSvd thin_svd(const Matrix& a);

/// Sum of singular values.
double nuclear_norm(const Matrix& a);

/// Semi-orthogonal maximizer of Tr(A^T U) over U^T U <= I.
///
/// Computed as left * right^T from the thin SVD. Singular directions below
/// 1e-12 * sigma_max are completed by Gram-Schmidt over the canonical basis
/// (e_1, e_2, ... in index order) so that the result is deterministic and
/// always semi-orthogonal, including for A = 0.
SemiOrthogonal polar_factor(const Matrix& a);

/// Default eigenvalue floor for inv_sqrt_psd: 1e-12 * lambda_max.
inline constexpr double kDefaultRidgeRel = 1e-12;

/// S^{-1/2} for symmetric PSD S, with eigenvalues floored at `ridge`.
///
/// Throws InputError when S is not symmetric (1e-10, relative), has an
/// eigenvalue below -1e-8 * lambda_max, or when a zero eigenvalue meets a
/// zero ridge.
Matrix inv_sqrt_psd(const Matrix& s, double ridge);

/// inv_sqrt_psd with ridge = kDefaultRidgeRel * lambda_max (and a tiny
/// absolute floor so that S = 0 maps to a large finite multiple of I).
Matrix inv_sqrt_psd(const Matrix& s);

/// Orthonormalized seeded Gaussian n x r matrix.
SemiOrthogonal random_semi_orthogonal(Eigen::Index n, Eigen::Index r, std::uint64_t seed);

struct SymmetricEigen {
  Vector values;  // decreasing
  Matrix vectors; // columns sign-canonicalized (largest |entry| positive)
};

/// Eigendecomposition of a symmetric matrix, ordered by decreasing value.
/// Ties are broken by the lexicographically smallest canonicalized vector.
SymmetricEigen symmetric_eigen(const Matrix& s);

/// Top-r eigenvectors of a symmetric PSD matrix: the vanilla PCA loadings.
SemiOrthogonal pca_baseline(const Matrix& r_total, Eigen::Index r);

/// ||P_a - P_b||_F for the projectors of two semi-orthogonal matrices.
double projector_distance(const Matrix& a, const Matrix& b);

} // namespace fairpca

#endif // FAIRPCA_LINALG_HPP
