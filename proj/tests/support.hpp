// Shared helpers for the unit and acceptance suites.
#ifndef GPMM_TESTS_SUPPORT_HPP
#define GPMM_TESTS_SUPPORT_HPP

#include <random>

#include "gpmm/datagen.hpp"
#include "gpmm/model.hpp"

namespace support {

using gpmm::Matrix;
using gpmm::Vector;

inline gpmm::ModelParameters benchmark_params() { return gpmm::Scenario::default_params(); }

inline Matrix random_matrix(std::mt19937& gen, int rows, int cols, double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, scale);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = dist(gen);
  return m;
}

inline Vector random_vector(std::mt19937& gen, int n, double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, scale);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = dist(gen);
  return v;
}

// Random symmetric positive-definite matrix with eigenvalues >= ridge.
inline Matrix random_spd(std::mt19937& gen, int n, double ridge = 0.1) {
  const Matrix a = random_matrix(gen, n, n);
  return a * a.transpose() / n + ridge * Matrix::Identity(n, n);
}

// Random valid model with interior coupling strengths.
inline gpmm::ModelParameters random_model(std::mt19937& gen, int p, int q, int r) {
  std::uniform_real_distribution<double> lam(0.1, 0.9);
  gpmm::ModelParameters params;
  params.u_mat = random_matrix(gen, p, r);
  params.v_mat = random_matrix(gen, q, r);
  params.w_diag.resize(r);
  for (int i = 0; i < r; ++i) params.w_diag[i] = lam(gen);
  params.lambda_eps_diag = Vector::Ones(r) - params.w_diag.cwiseAbs2();
  params.lambda_y = random_spd(gen, p);
  params.lambda_x = random_spd(gen, q);
  params.c_y = random_vector(gen, p);
  params.c_x = random_vector(gen, q);
  return params;
}

// Largest principal angle (radians) between the column spans of a and b.
inline double principal_angle(const Matrix& a, const Matrix& b) {
  const Eigen::HouseholderQR<Matrix> qa(a), qb(b);
  const Matrix qa_thin =
      qa.householderQ() * Matrix::Identity(a.rows(), a.cols());
  const Matrix qb_thin =
      qb.householderQ() * Matrix::Identity(b.rows(), b.cols());
  Eigen::JacobiSVD<Matrix> svd(qa_thin.transpose() * qb_thin);
  const double c = std::min(1.0, svd.singularValues().minCoeff());
  return std::acos(c);
}

}  // namespace support

#endif
