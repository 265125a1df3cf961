#include "fairpca/frpca.hpp"

namespace fairpca {

namespace {

Matrix signum(const Matrix& x) {
  return x.unaryExpr([](double v) { return static_cast<double>((v > 0.0) - (v < 0.0)); });
}

std::vector<Matrix> class_blocks(const ClassedDataset& d) {
  d.validate();
  std::vector<Matrix> blocks;
  blocks.reserve(static_cast<std::size_t>(d.k));
  for (int cls = 1; cls <= d.k; ++cls)
    blocks.push_back(d.class_block(cls));
  return blocks;
}

ObjectiveValue l1_objective(const Matrix& u, const std::vector<Matrix>& blocks) {
  ObjectiveValue out;
  out.per_class.resize(static_cast<Eigen::Index>(blocks.size()));
  for (std::size_t k = 0; k < blocks.size(); ++k)
    out.per_class(static_cast<Eigen::Index>(k)) = (u.transpose() * blocks[k]).cwiseAbs().sum();
  out.value = out.per_class.minCoeff(&out.argmin);
  return out;
}

DualProblem l1_dual(const Matrix& u_t, const std::vector<Matrix>& blocks) {
  DualProblem p;
  p.l1_mode = true;
  p.c_k = Vector::Zero(static_cast<Eigen::Index>(blocks.size()));
  for (const Matrix& y : blocks)
    p.a_k.push_back(y * signum(u_t.transpose() * y).transpose());
  return p;
}

} // namespace

ObjectiveValue frpca_objective(const Matrix& u, const ClassedDataset& d) {
  if (u.rows() != d.dim())
    throw InputError("frpca_objective: dimension mismatch");
  return l1_objective(u, class_blocks(d));
}

SignMatrices sign_matrices(const Matrix& u_t, const ClassedDataset& d) {
  if (u_t.rows() != d.dim())
    throw InputError("sign_matrices: dimension mismatch");
  SignMatrices w;
  for (const Matrix& y : class_blocks(d))
    w.w_k.push_back(signum(u_t.transpose() * y));
  return w;
}

DualProblem robust_dual(const SignMatrices& w, const ClassedDataset& d) {
  const std::vector<Matrix> blocks = class_blocks(d);
  if (w.w_k.size() != blocks.size())
    throw InputError("robust_dual: one sign matrix per class required");
  DualProblem p;
  p.l1_mode = true;
  p.c_k = Vector::Zero(d.k);
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    if (w.w_k[k].cols() != blocks[k].cols())
      throw InputError("robust_dual: sign matrix width does not match class size");
    p.a_k.push_back(blocks[k] * w.w_k[k].transpose());
  }
  return p;
}

StepResult solve_surrogate_l1(const SignMatrices& w, const ClassedDataset& d, const FitConfig& cfg) {
  return certified_weight_step(robust_dual(w, d), cfg);
}

FitResult fit_frpca(const ClassedDataset& d, const FitConfig& cfg, const SemiOrthogonal& u0) {
  cfg.validate(d.dim());
  if (u0.rows() != d.dim() || u0.cols() != cfg.r)
    throw InputError("fit_frpca: initial U has the wrong shape");
  const std::vector<Matrix> blocks = class_blocks(d);

  auto objective = [&](const Matrix& u) { return l1_objective(u, blocks); };
  auto step = [&](const SemiOrthogonal& u) {
    StepResult r = safeguarded_step(l1_dual(u.matrix(), blocks), u, cfg);
    return detail::MmStep{std::move(r.u_next), std::move(r.mu)};
  };
  return detail::run_mm(u0, cfg, d.k, objective, step);
}

FitResult fit_frpca(const ClassedDataset& d, const FitConfig& cfg) {
  const FitResult start = fit_fpca(class_scatter(d), cfg);
  return fit_frpca(d, cfg, start.u);
}

double normalized_subspace_error(const Matrix& u_hat, const Matrix& u_ref) {
  if (u_hat.rows() != u_ref.rows() || u_hat.cols() != u_ref.cols())
    throw InputError("normalized_subspace_error: shapes differ");
  const Matrix p_ref = u_ref * u_ref.transpose();
  return (u_hat * u_hat.transpose() - p_ref).norm() / p_ref.norm();
}

} // namespace fairpca
