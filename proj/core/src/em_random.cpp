#include "gpmm/em_random.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gpmm {

void EmConfig::validate() const {
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (!(rel_tol > 0.0 && rel_tol < 1.0))
    throw std::invalid_argument("rel_tol must lie in (0, 1)");
  if (!(0.0 <= min_lambda && min_lambda < max_lambda && max_lambda <= 1.0))
    throw std::invalid_argument("lambda clamp must satisfy 0 <= min < max <= 1");
}

std::string FitDiagnostics::to_table() const {
  std::ostringstream os;
  os << "iteration,log_likelihood,max_param_delta\n";
  for (std::size_t i = 0; i < log_likelihood.size(); ++i) {
    os << i + 1 << ',' << std::setprecision(17) << log_likelihood[i] << ','
       << (i < max_param_delta.size() ? max_param_delta[i] : 0.0) << '\n';
  }
  return os.str();
}

double solve_lambda_cubic(double a0, double a1, double a2, double a3, double min_lambda,
                          double max_lambda) {
  if (!(a3 > 0.0)) throw std::invalid_argument("leading cubic coefficient must be positive");
  const double scale = std::max(1.0, std::abs(a0) + std::abs(a1) + std::abs(a2) + std::abs(a3));

  // Companion matrix of the monic cubic l^3 + (a2/a3) l^2 + (a1/a3) l + a0/a3.
  Matrix companion = Matrix::Zero(3, 3);
  companion(0, 2) = -a0 / a3;
  companion(1, 2) = -a1 / a3;
  companion(2, 2) = -a2 / a3;
  companion(1, 0) = 1.0;
  companion(2, 1) = 1.0;
  Eigen::EigenSolver<Matrix> es(companion);

  const auto f = [&](double l) { return ((a3 * l + a2) * l + a1) * l + a0; };
  const auto fprime = [&](double l) { return (3.0 * a3 * l + 2.0 * a2) * l + a1; };

  const double imag_tol = 1e-9 * scale;
  const double widen = 1e-9;
  double best = std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i < 3; ++i) {
    const std::complex<double> root = es.eigenvalues()[i];
    if (std::abs(root.imag()) > imag_tol) continue;
    double l = root.real();
    // One Newton polish.
    const double fp = fprime(l);
    if (std::abs(fp) > 0.0) l -= f(l) / fp;
    if (l < -widen || l > 1.0 + widen) continue;
    l = std::clamp(l, 0.0, 1.0);
    if (std::isnan(best) || l > best) best = l;
  }
  if (std::isnan(best)) throw std::runtime_error("root bracket failure");
  if (std::abs(f(best)) > 1e-9 * scale) throw std::runtime_error("root bracket failure");
  return std::clamp(best, min_lambda, max_lambda);
}

SufficientStatsRandom e_step_random(const ModelParameters& params, const Matrix& x_data,
                                    const Matrix& y_data) {
  const int q = params.q(), p = params.p(), r = params.r();
  if (x_data.rows() != q || y_data.rows() != p || x_data.cols() != y_data.cols())
    throw std::invalid_argument("data dimension mismatch");

  SufficientStatsRandom stats;
  stats.samples = static_cast<int>(x_data.cols());
  stats.sum_x_s = Matrix::Zero(q, r);
  stats.sum_y_z = Matrix::Zero(p, r);
  stats.sum_ss = Matrix::Zero(r, r);
  stats.sum_zz = Matrix::Zero(r, r);
  stats.sum_sz_diag = Vector::Zero(r);
  stats.sum_xx = Matrix::Zero(q, q);
  stats.sum_yy = Matrix::Zero(p, p);

  // Posterior covariances and the linear maps from observations to posterior
  // means are sample-independent; precompute via the joint-latent conditioning.
  const Vector zero_x = params.c_x, zero_y = params.c_y;
  const JointLatentPosterior base = posterior_sz_given_xy(params, zero_x, zero_y);

  const JointObservationModel jm = joint_model(params);
  const Matrix obs_inv = spd_inverse(jm.joint_cov);
  const Matrix w = params.w();
  Matrix cov_latent_obs(2 * r, p + q);
  cov_latent_obs.block(0, 0, r, p) = w.transpose() * params.u_mat.transpose();
  cov_latent_obs.block(0, p, r, q) = params.v_mat.transpose();
  const Matrix var_z = symmetrize(w * w.transpose() + params.lambda_eps());
  cov_latent_obs.block(r, 0, r, p) = var_z * params.u_mat.transpose();
  cov_latent_obs.block(r, p, r, q) = w * params.v_mat.transpose();
  const Matrix gain = cov_latent_obs * obs_inv;  // (2r) x (p+q)

  Vector obs(p + q);
  for (Eigen::Index t = 0; t < x_data.cols(); ++t) {
    const Vector xbar = x_data.col(t) - params.c_x;
    const Vector ybar = y_data.col(t) - params.c_y;
    obs << ybar, xbar;
    const Vector mean = gain * obs;
    const Vector mean_s = mean.head(r);
    const Vector mean_z = mean.tail(r);

    stats.sum_x_s.noalias() += xbar * mean_s.transpose();
    stats.sum_y_z.noalias() += ybar * mean_z.transpose();
    stats.sum_ss.noalias() += base.cov_ss + mean_s * mean_s.transpose();
    stats.sum_zz.noalias() += base.cov_zz + mean_z * mean_z.transpose();
    for (int i = 0; i < r; ++i)
      stats.sum_sz_diag[i] += base.cov_sz(i, i) + mean_s[i] * mean_z[i];
    stats.sum_xx.noalias() += xbar * xbar.transpose();
    stats.sum_yy.noalias() += ybar * ybar.transpose();
  }
  stats.sum_ss = symmetrize(stats.sum_ss);
  stats.sum_zz = symmetrize(stats.sum_zz);
  return stats;
}

void m_step_random(const SufficientStatsRandom& stats, ModelParameters& params) {
  const double t = static_cast<double>(stats.samples);
  if (stats.samples <= 0) throw std::invalid_argument("empty statistics");
  const double ss_scale = std::max(stats.sum_ss.cwiseAbs().maxCoeff(),
                                   stats.sum_zz.cwiseAbs().maxCoeff());
  if (!(ss_scale > 0.0) ||
      symmetric_eigenvalues(stats.sum_ss).minCoeff() < 1e-12 * ss_scale ||
      symmetric_eigenvalues(stats.sum_zz).minCoeff() < 1e-12 * ss_scale)
    throw std::runtime_error("degenerate statistics");

  params.v_mat = stats.sum_x_s * spd_inverse(stats.sum_ss);
  params.u_mat = stats.sum_y_z * spd_inverse(stats.sum_zz);

  const Matrix lx = (stats.sum_xx - 2.0 * stats.sum_x_s * params.v_mat.transpose() +
                     params.v_mat * stats.sum_ss * params.v_mat.transpose()) /
                    t;
  const Matrix ly = (stats.sum_yy - 2.0 * stats.sum_y_z * params.u_mat.transpose() +
                     params.u_mat * stats.sum_zz * params.u_mat.transpose()) /
                    t;
  params.lambda_x = symmetrize(lx);
  params.lambda_y = symmetrize(ly);
}

namespace {

ModelParameters initialize_random(const Matrix& x_data, const Matrix& y_data, int r) {
  const int q = static_cast<int>(x_data.rows());
  const int p = static_cast<int>(y_data.rows());
  const double t = static_cast<double>(x_data.cols());

  ModelParameters params;
  params.c_x = x_data.rowwise().mean();
  params.c_y = y_data.rowwise().mean();

  const Matrix xc = x_data.colwise() - params.c_x;
  const Matrix yc = y_data.colwise() - params.c_y;
  const Matrix cross = yc * xc.transpose() / t;  // p x q

  Eigen::JacobiSVD<Matrix> svd(cross, Eigen::ComputeThinU | Eigen::ComputeThinV);
  params.u_mat = svd.matrixU().leftCols(r);
  params.v_mat = svd.matrixV().leftCols(r);

  params.w_diag = Vector::Constant(r, 0.5);
  params.lambda_eps_diag = Vector::Constant(r, 1.0 - 0.25);
  params.lambda_x = Matrix((xc.cwiseAbs2().rowwise().sum() / t).asDiagonal());
  params.lambda_y = Matrix((yc.cwiseAbs2().rowwise().sum() / t).asDiagonal());
  return params;
}

}  // namespace

std::pair<ModelParameters, FitDiagnostics> fit_random(const Matrix& x_data,
                                                      const Matrix& y_data, int r,
                                                      const EmConfig& config) {
  config.validate();
  const int q = static_cast<int>(x_data.rows());
  const int p = static_cast<int>(y_data.rows());
  const Eigen::Index t = x_data.cols();
  if (t != y_data.cols()) throw std::invalid_argument("paired data length mismatch");
  if (!x_data.allFinite() || !y_data.allFinite())
    throw std::invalid_argument("non-finite data");
  if (r < 1 || r > std::min(p, q)) throw std::invalid_argument("r out of range");
  if (t <= p + q) throw std::invalid_argument("too few samples: need T > p + q");

  ModelParameters params = initialize_random(x_data, y_data, r);
  FitDiagnostics diag;
  double prev_ll = log_likelihood(params, x_data, y_data);

  for (int iter = 0; iter < config.max_iters; ++iter) {
    const ModelParameters old = params;
    const SufficientStatsRandom stats = e_step_random(params, x_data, y_data);
    m_step_random(stats, params);
    for (int i = 0; i < r; ++i) {
      const double a0 = -stats.sum_sz_diag[i];
      const double a2 = a0;
      const double a1 = stats.sum_ss(i, i) + stats.sum_zz(i, i) - stats.samples;
      const double lam = solve_lambda_cubic(a0, a1, a2, static_cast<double>(stats.samples),
                                            config.min_lambda, config.max_lambda);
      params.w_diag[i] = lam;
      params.lambda_eps_diag[i] = 1.0 - lam * lam;
    }

    const double ll = log_likelihood(params, x_data, y_data);
    double delta = std::max((params.u_mat - old.u_mat).cwiseAbs().maxCoeff(),
                            (params.v_mat - old.v_mat).cwiseAbs().maxCoeff());
    delta = std::max(delta, (params.w_diag - old.w_diag).cwiseAbs().maxCoeff());
    delta = std::max(delta, (params.lambda_x - old.lambda_x).cwiseAbs().maxCoeff());
    delta = std::max(delta, (params.lambda_y - old.lambda_y).cwiseAbs().maxCoeff());
    diag.log_likelihood.push_back(ll);
    diag.max_param_delta.push_back(delta);
    diag.iterations = iter + 1;

    if (std::abs(ll - prev_ll) / (std::abs(ll) + 1.0) < config.rel_tol) {
      diag.converged = true;
      break;
    }
    prev_ll = ll;
  }
  return {params, diag};
}

}  // namespace gpmm
