#ifndef GPMM_MODEL_HPP
#define GPMM_MODEL_HPP

#include <string>
#include <vector>

#include "gpmm/linalg.hpp"

namespace gpmm {

// Coupled input/output latent-variable model
//   y = U z + c_y + e_y,   e_y ~ N(0, Lambda_y)
//   x = V s + c_x + e_x,   e_x ~ N(0, Lambda_x)
//   z = W s + eps,         eps ~ N(0, Lambda_eps)
// with s ~ N(0, I_r), W = diag(lambda_i), Lambda_eps = diag(1 - lambda_i^2).
struct ModelParameters {
  Matrix u_mat;             // p x r output loading
  Matrix v_mat;             // q x r input loading
  Vector w_diag;            // r, transition diagonal (lambda_i)
  Matrix lambda_y;          // p x p output noise covariance
  Matrix lambda_x;          // q x q input noise covariance
  Vector lambda_eps_diag;   // r, coupling noise diagonal (1 - lambda_i^2)
  Vector c_y;               // p output offset
  Vector c_x;               // q input offset

  int p() const { return static_cast<int>(u_mat.rows()); }
  int q() const { return static_cast<int>(v_mat.rows()); }
  int r() const { return static_cast<int>(w_diag.size()); }

  Matrix w() const { return Matrix(w_diag.asDiagonal()); }
  Matrix lambda_eps() const { return Matrix(lambda_eps_diag.asDiagonal()); }
};

struct GaussianPosterior {
  Vector mean;        // r
  Matrix covariance;  // r x r, symmetric PSD, independent of the observation
};

// Marginal over (y; x) with the auxiliary matrices reused by monitoring.
struct JointObservationModel {
  Vector joint_mean;  // p+q, (c_y; c_x)
  Matrix joint_cov;   // (p+q) x (p+q)
  Matrix aux_m;       // q x r, loading of x on z
  Matrix aux_n;       // q x q, residual covariance of x given z
  Matrix omega;       // p x p, U Lambda_eps U^T + Lambda_y
};

// Empty iff all ModelParameters invariants hold; each entry names the violated
// invariant and the offending magnitude.
std::vector<std::string> validate_params(const ModelParameters& params);

// Closed-form Gaussian posteriors. Observations are raw; centering with
// c_x / c_y happens internally.
GaussianPosterior posterior_s_given_xy(const ModelParameters& params, const Vector& x,
                                       const Vector& y);
GaussianPosterior posterior_z_given_xy(const ModelParameters& params, const Vector& x,
                                       const Vector& y);
GaussianPosterior posterior_s_given_x(const ModelParameters& params, const Vector& x);
GaussianPosterior posterior_z_given_y(const ModelParameters& params, const Vector& y);

JointObservationModel joint_model(const ModelParameters& params);

// Posterior of the stacked latent (s; z) given (x, y), including the cross
// block E[s z^T | x, y] needed by the EM lambda update. Computed by block
// conditioning of the joint Gaussian over (s, z, y, x).
struct JointLatentPosterior {
  Vector mean_s, mean_z;
  Matrix cov_ss, cov_zz, cov_sz;  // cov_sz is r x r, Cov(s, z | x, y)
};
JointLatentPosterior posterior_sz_given_xy(const ModelParameters& params, const Vector& x,
                                           const Vector& y);

// Sum over columns of the log density of the marginal (y; x) Gaussian.
double log_likelihood(const ModelParameters& params, const Matrix& x_data,
                      const Matrix& y_data);

}  // namespace gpmm

#endif
