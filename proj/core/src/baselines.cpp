#include "gpmm/baselines.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/SVD>

#include "gpmm/linalg.hpp"

namespace gpmm {

namespace {

// Sample covariance of column-sample data with the 1/T divisor, matching the
// divisor used for the per-variable standard deviations.
Matrix sample_covariance(const Matrix& data) {
  if (data.cols() < 2) throw std::invalid_argument("covariance needs at least two samples");
  const Vector mean = data.rowwise().mean();
  const Matrix centered = data.colwise() - mean;
  return symmetrize(centered * centered.transpose() / double(data.cols()));
}

}  // namespace

Normalization Normalization::fit(const Matrix& data) {
  if (data.cols() < 2) throw std::invalid_argument("normalization needs at least two samples");
  Normalization norm;
  norm.mean = data.rowwise().mean();
  const Matrix centered = data.colwise() - norm.mean;
  norm.std_dev = (centered.rowwise().squaredNorm() / double(data.cols())).cwiseSqrt();
  if (norm.std_dev.minCoeff() <= 0.0)
    throw std::runtime_error("constant variable: cannot normalize");
  return norm;
}

Matrix Normalization::apply(const Matrix& data) const {
  if (data.rows() != mean.size()) throw std::invalid_argument("normalization dimension mismatch");
  return ((data.colwise() - mean).array().colwise() / std_dev.array()).matrix();
}

Vector Normalization::apply(const Vector& sample) const {
  if (sample.size() != mean.size())
    throw std::invalid_argument("normalization dimension mismatch");
  return (sample - mean).cwiseQuotient(std_dev);
}

PcaModel pca_fit(const Matrix& y_data, int r) {
  if (r < 1 || r > y_data.rows()) throw std::invalid_argument("retained dimension out of range");
  PcaModel model;
  model.norm = Normalization::fit(y_data);
  const Matrix normalized = model.norm.apply(y_data);
  const Matrix cov = symmetrize(normalized * normalized.transpose() /
                                double(normalized.cols()));
  Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
  const int p = int(y_data.rows());
  model.eigenvectors.resize(p, p);
  model.eigenvalues.resize(p);
  for (int i = 0; i < p; ++i) {  // flip to descending order
    model.eigenvectors.col(i) = es.eigenvectors().col(p - 1 - i);
    model.eigenvalues[i] = std::max(es.eigenvalues()[p - 1 - i], 0.0);
  }
  model.retained = r;
  return model;
}

std::pair<double, double> pca_stats(const PcaModel& model, const Vector& y) {
  const Vector yn = model.norm.apply(y);
  const Vector scores = model.retained_vectors().transpose() * yn;
  const double floor = kEigenFloorRel * std::max(model.eigenvalues.maxCoeff(), 1.0);
  double t2 = 0.0;
  for (int i = 0; i < model.retained; ++i)
    t2 += scores[i] * scores[i] / std::max(model.eigenvalues[i], floor);
  const Vector residual = yn - model.retained_vectors() * scores;
  return {t2, residual.squaredNorm()};
}

CcaModel cca_fit(const Matrix& x_data, const Matrix& y_data, int r) {
  if (x_data.cols() != y_data.cols())
    throw std::invalid_argument("paired data must have equal sample counts");
  if (r < 1 || r > std::min(x_data.rows(), y_data.rows()))
    throw std::invalid_argument("retained dimension out of range");

  CcaModel model;
  model.norm_x = Normalization::fit(x_data);
  model.norm_y = Normalization::fit(y_data);
  const Matrix xn = model.norm_x.apply(x_data);
  const Matrix yn = model.norm_y.apply(y_data);
  const double divisor = double(x_data.cols());
  model.cov_xx = symmetrize(xn * xn.transpose() / divisor);
  model.cov_yy = symmetrize(yn * yn.transpose() / divisor);
  const Matrix cov_xy = xn * yn.transpose() / divisor;

  const Matrix wx = spd_inv_sqrt(model.cov_xx);
  const Matrix wy = spd_inv_sqrt(model.cov_yy);
  Eigen::JacobiSVD<Matrix> svd(wx * cov_xy * wy, Eigen::ComputeThinU | Eigen::ComputeThinV);

  model.singular_values = svd.singularValues().head(r).cwiseMin(1.0);
  model.dirs_x = svd.matrixU().leftCols(r);
  model.dirs_y = svd.matrixV().leftCols(r);
  model.proj_x = wx * model.dirs_x;
  model.proj_y = wy * model.dirs_y;
  return model;
}

std::pair<double, double> cca_stats(const CcaModel& model, const Vector& x, const Vector& y) {
  const Vector ux = model.proj_x.transpose() * model.norm_x.apply(x);
  const Vector uy = model.proj_y.transpose() * model.norm_y.apply(y);
  return {ux.squaredNorm(), uy.squaredNorm()};
}

SfaModel sfa_fit(const Matrix& y_sequence, int r) {
  const int p = int(y_sequence.rows());
  if (r < 1 || r > p) throw std::invalid_argument("retained dimension out of range");
  if (y_sequence.cols() < 3)
    throw std::invalid_argument("temporal fit needs at least three samples");

  SfaModel model;
  model.norm = Normalization::fit(y_sequence);
  const Matrix normalized = model.norm.apply(y_sequence);
  const Matrix cov = symmetrize(normalized * normalized.transpose() /
                                double(normalized.cols()));
  model.whitening = spd_inv_sqrt(cov);

  const Matrix whitened = model.whitening * normalized;
  const Matrix diffs = whitened.rightCols(whitened.cols() - 1) -
                       whitened.leftCols(whitened.cols() - 1);
  const Matrix diff_cov = symmetrize(diffs * diffs.transpose() / double(diffs.cols()));
  Eigen::SelfAdjointEigenSolver<Matrix> es(diff_cov);  // ascending: slow features first
  model.projection = es.eigenvectors().transpose();
  model.omega = es.eigenvalues().cwiseMax(0.0);
  model.slow_count = r;
  return model;
}

std::pair<double, double> sfa_static(const SfaModel& model, const Vector& y) {
  const Vector features = model.projection * (model.whitening * model.norm.apply(y));
  const double slow = features.head(model.slow_count).squaredNorm();
  return {slow, features.squaredNorm() - slow};
}

std::pair<double, double> sfa_temporal(const SfaModel& model, const Vector& y_dot) {
  const Vector diff_features =
      model.projection * (model.whitening * y_dot.cwiseQuotient(model.norm.std_dev));
  const double floor = kEigenFloorRel * std::max(model.omega.maxCoeff(), 1.0);
  // Only the fast index is variance-weighted; the slow index is a plain
  // sum of squares of the slow difference features.
  double slow = 0.0, fast = 0.0;
  for (Eigen::Index i = 0; i < diff_features.size(); ++i) {
    const double f2 = diff_features[i] * diff_features[i];
    if (i < model.slow_count)
      slow += f2;
    else
      fast += f2 / std::max(model.omega[i], floor);
  }
  return {slow, fast};
}

PpcaSolution ppca_from_covariance(const Matrix& covariance, int r) {
  const int q = int(covariance.rows());
  if (r < 1 || r >= q)
    throw std::invalid_argument("isotropic factor model needs 1 <= r < q");
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(covariance));

  PpcaSolution sol;
  sol.eigenvalues.resize(q);
  sol.eigenvectors.resize(q, q);
  for (int i = 0; i < q; ++i) {  // descending order
    sol.eigenvalues[i] = std::max(es.eigenvalues()[q - 1 - i], 0.0);
    sol.eigenvectors.col(i) = es.eigenvectors().col(q - 1 - i);
  }
  sol.noise_var = sol.eigenvalues.tail(q - r).mean();
  if (sol.noise_var <= 0.0) throw std::runtime_error("degenerate residual spectrum");

  sol.v_ml.resize(q, r);
  const double tol = 1e-12 * std::max(sol.eigenvalues[0], 1.0);
  for (int i = 0; i < r; ++i) {
    const double gap = sol.eigenvalues[i] - sol.noise_var;
    if (gap < -tol) throw std::runtime_error("insufficient signal eigenvalues");
    sol.v_ml.col(i) = sol.eigenvectors.col(i) * std::sqrt(std::max(gap, 0.0));
  }
  return sol;
}

PpcaSolution ppca_closed_form(const Matrix& data, int r) {
  return ppca_from_covariance(sample_covariance(data), r);
}

ModelParameters pcca_restricted(const CcaModel& cca) {
  const int q = int(cca.cov_xx.rows());
  const int p = int(cca.cov_yy.rows());
  const int r = int(cca.singular_values.size());

  const Matrix root_p = cca.singular_values.cwiseSqrt().asDiagonal();
  ModelParameters params;
  params.u_mat = spd_sqrt(cca.cov_yy) * cca.dirs_y * root_p;
  params.v_mat = spd_sqrt(cca.cov_xx) * cca.dirs_x * root_p;
  params.w_diag = Vector::Ones(r);
  params.lambda_eps_diag = Vector::Zero(r);
  params.lambda_y = symmetrize(cca.cov_yy - params.u_mat * params.u_mat.transpose());
  params.lambda_x = symmetrize(cca.cov_xx - params.v_mat * params.v_mat.transpose());
  params.c_y = Vector::Zero(p);
  params.c_x = Vector::Zero(q);
  return params;
}

ModelParameters ppca_restricted(const PpcaSolution& ppca, const Vector& c_x) {
  const int q = int(ppca.v_ml.rows());
  const int r = int(ppca.v_ml.cols());
  if (c_x.size() != q) throw std::invalid_argument("offset dimension mismatch");

  ModelParameters params;
  params.u_mat = Matrix::Zero(q, r);  // output channel carries no information
  params.v_mat = ppca.v_ml;
  params.w_diag = Vector::Ones(r);
  params.lambda_eps_diag = Vector::Zero(r);
  params.lambda_y = Matrix::Identity(q, q);
  params.lambda_x = ppca.noise_var * Matrix::Identity(q, q);
  params.c_y = Vector::Zero(q);
  params.c_x = c_x;
  return params;
}

SfaRandomModel sfa_diff_model(const PpcaSolution& ppca) {
  SfaRandomModel model;
  model.v_mat = ppca.v_ml;
  model.lambda_z = ppca.noise_var * Matrix::Identity(ppca.v_ml.rows(), ppca.v_ml.rows());
  return model;
}

}  // namespace gpmm
