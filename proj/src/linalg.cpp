#include "fairpca/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

namespace fairpca {

void require_finite(const Matrix& a, const std::string& what) {
  if (a.size() == 0)
    throw InputError(what + ": empty matrix");
  if (!a.allFinite())
    throw InputError(what + ": non-finite entry");
}

double orthogonality_defect(const Matrix& u) {
  const Matrix gram = u.transpose() * u;
  return (gram - Matrix::Identity(u.cols(), u.cols())).norm();
}

SemiOrthogonal::SemiOrthogonal(Matrix u) : u_(std::move(u)) {
  require_finite(u_, "SemiOrthogonal");
  if (u_.rows() < u_.cols())
    throw InputError("SemiOrthogonal: requires n >= r");
  tightness_ = orthogonality_defect(u_);
  if (!(tightness_ <= kTolerance))
    throw InputError("SemiOrthogonal: ||U^T U - I||_F = " + std::to_string(tightness_));
}

ThinSvd thin_svd(const Matrix& a) {
  require_finite(a, "thin_svd");
  if (a.rows() < a.cols())
    throw InputError("thin_svd: requires rows >= cols");
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

double nuclear_norm(const Matrix& a) {
  require_finite(a, "nuclear_norm");
  return Eigen::JacobiSVD<Matrix>(a).singularValues().sum();
}

namespace {

// Replace columns [first, r) of `basis` by an orthonormal completion drawn
// from e_1, e_2, ... in index order.
void complete_basis(Matrix& basis, Eigen::Index first) {
  const Eigen::Index n = basis.rows();
  Eigen::Index filled = first;
  for (Eigen::Index i = 0; i < n && filled < basis.cols(); ++i) {
    Vector v = Vector::Unit(n, i);
    // two passes of classical Gram-Schmidt
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index j = 0; j < filled; ++j)
        v -= basis.col(j).dot(v) * basis.col(j);
    const double norm = v.norm();
    if (norm > 1e-6) {
      basis.col(filled) = v / norm;
      ++filled;
    }
  }
}

} // namespace

SemiOrthogonal polar_factor(const Matrix& a) {
  ThinSvd svd = thin_svd(a);
  const double smax = svd.singulars.size() > 0 ? svd.singulars(0) : 0.0;
  Eigen::Index rank = 0;
  while (rank < svd.singulars.size() && smax > 0.0 &&
         svd.singulars(rank) >= 1e-12 * smax)
    ++rank;
  if (rank < a.cols())
    complete_basis(svd.left, rank);
  return SemiOrthogonal(svd.left * svd.right.transpose());
}

Matrix inv_sqrt_psd(const Matrix& s, double ridge) {
  require_finite(s, "inv_sqrt_psd");
  if (s.rows() != s.cols())
    throw InputError("inv_sqrt_psd: matrix is not square");
  if (ridge < 0.0)
    throw InputError("inv_sqrt_psd: negative ridge");
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw InputError("inv_sqrt_psd: matrix is not symmetric");

  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (s + s.transpose()));
  const Vector& lambda = eig.eigenvalues();
  const double lmax = lambda.cwiseAbs().maxCoeff();
  if (lambda.minCoeff() < -1e-8 * lmax)
    throw InputError("inv_sqrt_psd: matrix is not positive semidefinite");

  Vector scaled(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    const double floored = std::max(lambda(i), ridge);
    if (!(floored > 0.0))
      throw InputError("inv_sqrt_psd: singular matrix with zero ridge");
    scaled(i) = 1.0 / std::sqrt(floored);
  }
  return eig.eigenvectors() * scaled.asDiagonal() * eig.eigenvectors().transpose();
}

Matrix inv_sqrt_psd(const Matrix& s) {
  require_finite(s, "inv_sqrt_psd");
  const double lmax = s.rows() > 0 ? Eigen::SelfAdjointEigenSolver<Matrix>(
                                         0.5 * (s + s.transpose()), Eigen::EigenvaluesOnly)
                                         .eigenvalues()
                                         .maxCoeff()
                                   : 0.0;
  const double ridge = std::max(kDefaultRidgeRel * lmax, std::numeric_limits<double>::min());
  return inv_sqrt_psd(s, ridge);
}

SemiOrthogonal random_semi_orthogonal(Eigen::Index n, Eigen::Index r, std::uint64_t seed) {
  if (r < 1 || n < r)
    throw InputError("random_semi_orthogonal: requires n >= r >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(n, r);
  for (Eigen::Index j = 0; j < r; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      g(i, j) = normal(rng);

  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, r);
  // Fix the sign ambiguity so that R has a positive diagonal.
  const Matrix rr = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < r; ++j)
    if (rr(j, j) < 0.0)
      q.col(j) = -q.col(j);
  return SemiOrthogonal(std::move(q));
}

namespace {

void canonicalize_sign(Eigen::Ref<Vector> v) {
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  if (v(imax) < 0.0)
    v = -v;
}

bool lexicographic_less(const Vector& a, const Vector& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

} // namespace

SymmetricEigen symmetric_eigen(const Matrix& s) {
  require_finite(s, "symmetric_eigen");
  if (s.rows() != s.cols())
    throw InputError("symmetric_eigen: matrix is not square");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (s + s.transpose()));
  const Eigen::Index n = s.rows();

  std::vector<Vector> vecs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    vecs[i] = eig.eigenvectors().col(i);
    canonicalize_sign(vecs[i]);
  }
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return eig.eigenvalues()(a) > eig.eigenvalues()(b);
  });

  // Within runs of (numerically) tied eigenvalues, order by canonical vector.
  const double tie_tol = 1e-12 * std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
  for (Eigen::Index begin = 0; begin < n;) {
    Eigen::Index end = begin + 1;
    while (end < n && eig.eigenvalues()(order[begin]) - eig.eigenvalues()(order[end]) <= tie_tol)
      ++end;
    std::sort(order.begin() + begin, order.begin() + end,
              [&](Eigen::Index a, Eigen::Index b) { return lexicographic_less(vecs[a], vecs[b]); });
    begin = end;
  }

  SymmetricEigen out{Vector(n), Matrix(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = eig.eigenvalues()(order[i]);
    out.vectors.col(i) = vecs[order[i]];
  }
  return out;
}

SemiOrthogonal pca_baseline(const Matrix& r_total, Eigen::Index r) {
  if (r < 1 || r > r_total.rows())
    throw InputError("pca_baseline: requires 1 <= r <= n");
  return SemiOrthogonal(symmetric_eigen(r_total).vectors.leftCols(r));
}

double projector_distance(const Matrix& a, const Matrix& b) {
  return (a * a.transpose() - b * b.transpose()).norm();
}

} // namespace fairpca
