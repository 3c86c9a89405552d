#include "gpmm/linalg.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace gpmm {

Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

namespace {

struct EigPair {
  Vector values;
  Matrix vectors;
};

EigPair sym_eig(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(a));
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

Matrix apply_spectral(const Matrix& a, const std::function<double(double, double)>& f) {
  EigPair e = sym_eig(a);
  const double emax = e.values.size() ? e.values.maxCoeff() : 0.0;
  Vector d(e.values.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = f(e.values[i], emax);
  return e.vectors * d.asDiagonal() * e.vectors.transpose();
}

}  // namespace

Matrix spd_inverse(const Matrix& a) {
  EigPair e = sym_eig(a);
  const double emax = e.values.maxCoeff();
  if (emax <= 0.0) throw std::runtime_error("ill-conditioned model");
  const double floor = kEigenFloorRel * emax;
  Vector d(e.values.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = 1.0 / std::max(e.values[i], floor);
  return e.vectors * d.asDiagonal() * e.vectors.transpose();
}

Matrix spd_sqrt(const Matrix& a) {
  return apply_spectral(a, [](double v, double emax) {
    const double floor = kEigenFloorRel * std::max(emax, 0.0);
    return std::sqrt(std::max(v, std::max(floor, 0.0)));
  });
}

Matrix spd_inv_sqrt(const Matrix& a) {
  EigPair e = sym_eig(a);
  const double emax = e.values.maxCoeff();
  if (emax <= 0.0) throw std::runtime_error("ill-conditioned model");
  const double floor = kEigenFloorRel * emax;
  Vector d(e.values.size());
  for (Eigen::Index i = 0; i < d.size(); ++i)
    d[i] = 1.0 / std::sqrt(std::max(e.values[i], floor));
  return e.vectors * d.asDiagonal() * e.vectors.transpose();
}

Matrix spd_pow(const Matrix& a, double theta) {
  EigPair e = sym_eig(a);
  const double emax = std::max(e.values.cwiseAbs().maxCoeff(), 1.0);
  Vector d(e.values.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    double v = e.values[i];
    if (v < -1e-10 * emax) throw std::runtime_error("matrix is not PSD");
    v = std::max(v, 0.0);
    d[i] = std::pow(v, theta);
  }
  return e.vectors * d.asDiagonal() * e.vectors.transpose();
}

Matrix restricted_inverse(const Matrix& a, double rel_threshold) {
  EigPair e = sym_eig(a);
  const double emax = e.values.cwiseAbs().maxCoeff();
  const double thresh = rel_threshold * std::max(emax, 0.0);
  Vector d(e.values.size());
  for (Eigen::Index i = 0; i < d.size(); ++i)
    d[i] = (e.values[i] > thresh && thresh > 0.0) ? 1.0 / e.values[i] : 0.0;
  return e.vectors * d.asDiagonal() * e.vectors.transpose();
}

int numerical_rank(const Matrix& a, double rel_threshold) {
  EigPair e = sym_eig(a);
  const double emax = e.values.cwiseAbs().maxCoeff();
  const double thresh = rel_threshold * std::max(emax, 0.0);
  int rank = 0;
  for (Eigen::Index i = 0; i < e.values.size(); ++i)
    if (e.values[i] > thresh && emax > 0.0) ++rank;
  return rank;
}

Vector symmetric_eigenvalues(const Matrix& a) {
  EigPair e = sym_eig(a);
  return e.values.reverse();
}

bool is_symmetric(const Matrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, a.cwiseAbs().maxCoeff());
}

bool is_psd(const Matrix& a, double tol) {
  if (!is_symmetric(a, tol)) return false;
  EigPair e = sym_eig(a);
  const double scale = std::max(1.0, e.values.cwiseAbs().maxCoeff());
  return e.values.minCoeff() >= -tol * scale;
}

double gaussian_log_density(const Vector& x, const Vector& mean, const Matrix& cov) {
  EigPair e = sym_eig(cov);
  const double emax = e.values.maxCoeff();
  if (emax <= 0.0) throw std::runtime_error("ill-conditioned model");
  const double floor = kEigenFloorRel * emax;
  const Vector delta = e.vectors.transpose() * (x - mean);
  double logdet = 0.0, quad = 0.0;
  for (Eigen::Index i = 0; i < e.values.size(); ++i) {
    const double v = std::max(e.values[i], floor);
    logdet += std::log(v);
    quad += delta[i] * delta[i] / v;
  }
  const double d = static_cast<double>(x.size());
  return -0.5 * (d * std::log(2.0 * M_PI) + logdet + quad);
}

}  // namespace gpmm
