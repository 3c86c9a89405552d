#include "gpmm/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gpmm {

namespace {

constexpr double kCouplingTol = 1e-10;

void require_valid_dims(const ModelParameters& params, const Vector& x, const Vector& y) {
  if (x.size() != params.q() || y.size() != params.p())
    throw std::invalid_argument("observation dimension mismatch");
}

// The conditional z | s contributes the diagonal factors
//   [I + W^T Lambda_eps^{-1} W]^{-1}          = Lambda_eps (Lambda_eps + W^2)^{-1}
//   [I + W^T Lambda_eps^{-1} W]^{-1} W Lambda_eps^{-1} = W (Lambda_eps + W^2)^{-1}.
// The right-hand forms stay finite when a coupling strength reaches 1
// (noise-free channel), so they are used everywhere.
Vector channel_denominator(const ModelParameters& params) {
  Vector denom = params.lambda_eps_diag + params.w_diag.cwiseAbs2();
  if (denom.minCoeff() <= 0.0) throw std::runtime_error("ill-conditioned model");
  return denom;
}

}  // namespace

std::vector<std::string> validate_params(const ModelParameters& params) {
  std::vector<std::string> report;
  std::ostringstream os;

  const int p = params.p(), q = params.q(), r = params.r();
  if (params.v_mat.cols() != r || params.u_mat.cols() != r ||
      params.lambda_eps_diag.size() != r || params.lambda_y.rows() != p ||
      params.lambda_y.cols() != p || params.lambda_x.rows() != q ||
      params.lambda_x.cols() != q || params.c_y.size() != p || params.c_x.size() != q) {
    report.push_back("dimension consistency: field shapes disagree with (p, q, r)");
    return report;
  }
  if (r > std::min(p, q)) {
    os.str("");
    os << "latent dimension: r = " << r << " exceeds min(p, q) = " << std::min(p, q);
    report.push_back(os.str());
  }
  for (int i = 0; i < r; ++i) {
    const double lam = params.w_diag[i];
    if (lam < 0.0 || lam > 1.0) {
      os.str("");
      os << "lambda range: lambda_" << i + 1 << " = " << lam << " outside [0, 1]";
      report.push_back(os.str());
    }
    const double expected = 1.0 - lam * lam;
    if (std::abs(params.lambda_eps_diag[i] - expected) > kCouplingTol) {
      os.str("");
      os << "Lambda_eps coupling: entry " << i + 1 << " = " << params.lambda_eps_diag[i]
         << " but 1 - lambda^2 = " << expected;
      report.push_back(os.str());
    }
  }
  if (!is_symmetric(params.lambda_y)) {
    report.push_back("Lambda_y symmetry violated");
  } else {
    const double lo = symmetric_eigenvalues(params.lambda_y).minCoeff();
    if (lo <= 0.0) {
      os.str("");
      os << "Lambda_y positive definiteness: min eigenvalue = " << lo;
      report.push_back(os.str());
    }
  }
  if (!is_symmetric(params.lambda_x)) {
    report.push_back("Lambda_x symmetry violated");
  } else {
    const double lo = symmetric_eigenvalues(params.lambda_x).minCoeff();
    if (lo <= 0.0) {
      os.str("");
      os << "Lambda_x positive definiteness: min eigenvalue = " << lo;
      report.push_back(os.str());
    }
  }
  return report;
}

GaussianPosterior posterior_s_given_xy(const ModelParameters& params, const Vector& x,
                                       const Vector& y) {
  require_valid_dims(params, x, y);
  const Matrix w = params.w();
  const Matrix omega = symmetrize(params.u_mat * params.lambda_eps() * params.u_mat.transpose() +
                                  params.lambda_y);
  const Matrix omega_inv = spd_inverse(omega);
  const Matrix lx_inv = spd_inverse(params.lambda_x);
  const Matrix uw = params.u_mat * w;
  const Matrix precision = symmetrize(uw.transpose() * omega_inv * uw +
                                      params.v_mat.transpose() * lx_inv * params.v_mat +
                                      Matrix::Identity(params.r(), params.r()));
  GaussianPosterior post;
  post.covariance = spd_inverse(precision);
  post.mean = post.covariance * (uw.transpose() * omega_inv * (y - params.c_y) +
                                 params.v_mat.transpose() * lx_inv * (x - params.c_x));
  return post;
}

GaussianPosterior posterior_z_given_xy(const ModelParameters& params, const Vector& x,
                                       const Vector& y) {
  require_valid_dims(params, x, y);
  const Vector denom = channel_denominator(params);
  const Vector cond_cov = params.lambda_eps_diag.cwiseQuotient(denom);
  const Matrix aux_m =
      params.v_mat * (params.w_diag.cwiseQuotient(denom)).asDiagonal();
  const Matrix aux_n = symmetrize(
      params.lambda_x +
      params.v_mat * cond_cov.asDiagonal() * params.v_mat.transpose());
  const Matrix n_inv = spd_inverse(aux_n);
  const Matrix ly_inv = spd_inverse(params.lambda_y);
  const Matrix precision = symmetrize(aux_m.transpose() * n_inv * aux_m +
                                      params.u_mat.transpose() * ly_inv * params.u_mat +
                                      Matrix(denom.cwiseInverse().asDiagonal()));
  GaussianPosterior post;
  post.covariance = spd_inverse(precision);
  post.mean = post.covariance * (aux_m.transpose() * n_inv * (x - params.c_x) +
                                 params.u_mat.transpose() * ly_inv * (y - params.c_y));
  return post;
}

GaussianPosterior posterior_s_given_x(const ModelParameters& params, const Vector& x) {
  if (x.size() != params.q()) throw std::invalid_argument("observation dimension mismatch");
  const Matrix lx_inv = spd_inverse(params.lambda_x);
  const Matrix precision = symmetrize(params.v_mat.transpose() * lx_inv * params.v_mat +
                                      Matrix::Identity(params.r(), params.r()));
  GaussianPosterior post;
  post.covariance = spd_inverse(precision);
  post.mean = post.covariance * params.v_mat.transpose() * lx_inv * (x - params.c_x);
  return post;
}

GaussianPosterior posterior_z_given_y(const ModelParameters& params, const Vector& y) {
  if (y.size() != params.p()) throw std::invalid_argument("observation dimension mismatch");
  const Matrix ly_inv = spd_inverse(params.lambda_y);
  const Matrix precision = symmetrize(params.u_mat.transpose() * ly_inv * params.u_mat +
                                      Matrix::Identity(params.r(), params.r()));
  GaussianPosterior post;
  post.covariance = spd_inverse(precision);
  post.mean = post.covariance * params.u_mat.transpose() * ly_inv * (y - params.c_y);
  return post;
}

JointObservationModel joint_model(const ModelParameters& params) {
  const int p = params.p(), q = params.q();
  const Matrix uw = params.u_mat * params.w();

  JointObservationModel jm;
  jm.omega = symmetrize(params.u_mat * params.lambda_eps() * params.u_mat.transpose() +
                        params.lambda_y);
  jm.joint_mean.resize(p + q);
  jm.joint_mean << params.c_y, params.c_x;
  jm.joint_cov.resize(p + q, p + q);
  jm.joint_cov.topLeftCorner(p, p) = uw * uw.transpose() + jm.omega;
  jm.joint_cov.topRightCorner(p, q) = uw * params.v_mat.transpose();
  jm.joint_cov.bottomLeftCorner(q, p) = jm.joint_cov.topRightCorner(p, q).transpose();
  jm.joint_cov.bottomRightCorner(q, q) =
      params.v_mat * params.v_mat.transpose() + params.lambda_x;
  jm.joint_cov = symmetrize(jm.joint_cov);

  const Vector denom = channel_denominator(params);
  jm.aux_m = params.v_mat * (params.w_diag.cwiseQuotient(denom)).asDiagonal();
  jm.aux_n = symmetrize(params.lambda_x +
                        params.v_mat *
                            params.lambda_eps_diag.cwiseQuotient(denom).asDiagonal() *
                            params.v_mat.transpose());
  return jm;
}

JointLatentPosterior posterior_sz_given_xy(const ModelParameters& params, const Vector& x,
                                           const Vector& y) {
  require_valid_dims(params, x, y);
  const int p = params.p(), q = params.q(), r = params.r();
  const Matrix w = params.w();
  const Matrix var_z = symmetrize(w * w.transpose() + params.lambda_eps());

  // Joint covariance over (s, z, y, x).
  Matrix cov_latent(2 * r, 2 * r);
  cov_latent.topLeftCorner(r, r) = Matrix::Identity(r, r);
  cov_latent.topRightCorner(r, r) = w.transpose();
  cov_latent.bottomLeftCorner(r, r) = w;
  cov_latent.bottomRightCorner(r, r) = var_z;

  Matrix cov_latent_obs(2 * r, p + q);
  cov_latent_obs.block(0, 0, r, p) = w.transpose() * params.u_mat.transpose();  // Cov(s, y)
  cov_latent_obs.block(0, p, r, q) = params.v_mat.transpose();                  // Cov(s, x)
  cov_latent_obs.block(r, 0, r, p) = var_z * params.u_mat.transpose();          // Cov(z, y)
  cov_latent_obs.block(r, p, r, q) = w * params.v_mat.transpose();              // Cov(z, x)

  const JointObservationModel jm = joint_model(params);
  const Matrix obs_inv = spd_inverse(jm.joint_cov);
  Vector obs_centered(p + q);
  obs_centered << y - params.c_y, x - params.c_x;

  const Vector mean = cov_latent_obs * obs_inv * obs_centered;
  const Matrix cov =
      symmetrize(cov_latent - cov_latent_obs * obs_inv * cov_latent_obs.transpose());

  JointLatentPosterior post;
  post.mean_s = mean.head(r);
  post.mean_z = mean.tail(r);
  post.cov_ss = cov.topLeftCorner(r, r);
  post.cov_zz = cov.bottomRightCorner(r, r);
  post.cov_sz = cov.topRightCorner(r, r);
  return post;
}

double log_likelihood(const ModelParameters& params, const Matrix& x_data,
                      const Matrix& y_data) {
  if (x_data.rows() != params.q() || y_data.rows() != params.p() ||
      x_data.cols() != y_data.cols())
    throw std::invalid_argument("data dimension mismatch");
  const JointObservationModel jm = joint_model(params);
  const int d = params.p() + params.q();

  // Factor the marginal covariance once; per-sample work is one quadratic form.
  Eigen::SelfAdjointEigenSolver<Matrix> es(jm.joint_cov);
  const double floor = kEigenFloorRel * es.eigenvalues().maxCoeff();
  double logdet = 0.0;
  Vector inv_eval(d);
  for (int i = 0; i < d; ++i) {
    const double v = std::max(es.eigenvalues()[i], floor);
    logdet += std::log(v);
    inv_eval[i] = 1.0 / v;
  }
  const double constant = -0.5 * (d * std::log(2.0 * M_PI) + logdet);

  double total = 0.0;
  Vector obs(d);
  for (Eigen::Index t = 0; t < x_data.cols(); ++t) {
    obs << y_data.col(t) - params.c_y, x_data.col(t) - params.c_x;
    const Vector proj = es.eigenvectors().transpose() * obs;
    total += constant - 0.5 * proj.cwiseAbs2().dot(inv_eval);
  }
  return total;
}

}  // namespace gpmm
