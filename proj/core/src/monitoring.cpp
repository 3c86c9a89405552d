#include "gpmm/monitoring.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace gpmm {

std::string to_string(StatisticKind kind) {
  switch (kind) {
    case StatisticKind::TS_RAN: return "TS_RAN";
    case StatisticKind::TZ_RAN: return "TZ_RAN";
    case StatisticKind::Q_RAN: return "Q_RAN";
    case StatisticKind::TS_P: return "TS_P";
    case StatisticKind::TZ_P: return "TZ_P";
    case StatisticKind::T_SEQ: return "T_SEQ";
    case StatisticKind::Q_SEQ: return "Q_SEQ";
    case StatisticKind::SF_RAN: return "SF_RAN";
    case StatisticKind::SS_RAN: return "SS_RAN";
  }
  return "UNKNOWN";
}

double control_limit(double alpha, int dof) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (dof < 1) throw std::invalid_argument("dof must be >= 1");
  boost::math::chi_squared dist(static_cast<double>(dof));
  return boost::math::quantile(dist, 1.0 - alpha);
}

namespace {

// Count of eigenvalues of S^{1/2} A S^{1/2} that equal one. Chi-square
// quadratic forms have {0, 1} spectra; anything in between signals a broken
// idempotency assumption.
int unit_eigenvalue_count(const Matrix& weight, const Matrix& cov) {
  const Matrix root = spd_sqrt(cov);
  const Vector evals = symmetric_eigenvalues(symmetrize(root * weight * root));
  int count = 0;
  for (Eigen::Index i = 0; i < evals.size(); ++i)
    if (evals[i] > 0.5) ++count;
  return count;
}

struct LatentQuadratic {
  Matrix gain;       // posterior mean = gain * h
  Matrix inv_gap;    // restricted (I - Xi)^{-1}
  int dof;
};

LatentQuadratic latent_quadratic(const Matrix& gain_cov_times, const Matrix& post_cov) {
  const int r = static_cast<int>(post_cov.rows());
  const Matrix gap = symmetrize(Matrix::Identity(r, r) - post_cov);
  const int dof = numerical_rank(gap);
  if (dof == 0) throw std::runtime_error("uninformative statistic");
  return {gain_cov_times, restricted_inverse(gap), dof};
}

StatisticSpec make_t_spec(StatisticKind kind, double alpha, const LatentQuadratic& lq,
                          const Matrix& h_cov) {
  StatisticSpec spec;
  spec.kind = kind;
  spec.alpha = alpha;
  spec.dof = lq.dof;
  spec.control_limit = control_limit(alpha, lq.dof);
  spec.aux = lq.inv_gap;
  spec.weight_matrix = symmetrize(lq.gain.transpose() * lq.inv_gap * lq.gain);
  spec.h_cov = h_cov;
  return spec;
}

Matrix residual_weight(const Matrix& block_cov, const Matrix& loading) {
  // Phi^{-1/2} { I - rho (rho^T rho)^{-1} rho^T } Phi^{-1/2} with
  // rho = Phi^{-1/2} loading.
  const Matrix inv_root = spd_inv_sqrt(block_cov);
  const Matrix rho = inv_root * loading;
  const Matrix gram = symmetrize(rho.transpose() * rho);
  const int n = static_cast<int>(block_cov.rows());
  const Matrix projector =
      Matrix::Identity(n, n) - rho * restricted_inverse(gram) * rho.transpose();
  return symmetrize(inv_root * projector * inv_root);
}

}  // namespace

StatisticSpec build_spec_random(const ModelParameters& params, StatisticKind kind,
                                double alpha) {
  const auto violations = validate_params(params);
  if (!violations.empty()) throw std::invalid_argument("invalid parameters: " + violations.front());
  const int p = params.p(), q = params.q(), r = params.r();
  const Matrix w = params.w();
  const JointObservationModel jm = joint_model(params);
  const Matrix lx_inv = spd_inverse(params.lambda_x);
  const Matrix ly_inv = spd_inverse(params.lambda_y);
  const Matrix uw = params.u_mat * w;

  StatisticSpec spec;
  switch (kind) {
    case StatisticKind::TS_RAN: {  // posterior of s given (x, y)
      const Matrix omega_inv = spd_inverse(jm.omega);
      const Matrix precision = symmetrize(uw.transpose() * omega_inv * uw +
                                          params.v_mat.transpose() * lx_inv * params.v_mat +
                                          Matrix::Identity(r, r));
      const Matrix cov = spd_inverse(precision);
      Matrix gain(r, p + q);
      gain.leftCols(p) = cov * uw.transpose() * omega_inv;
      gain.rightCols(q) = cov * params.v_mat.transpose() * lx_inv;
      spec = make_t_spec(kind, alpha, latent_quadratic(gain, cov), jm.joint_cov);
      break;
    }
    case StatisticKind::TZ_RAN: {  // posterior of z given (x, y)
      const Matrix n_inv = spd_inverse(jm.aux_n);
      const Matrix z_prior = symmetrize(w * w.transpose() + params.lambda_eps());
      const Matrix precision = symmetrize(jm.aux_m.transpose() * n_inv * jm.aux_m +
                                          params.u_mat.transpose() * ly_inv * params.u_mat +
                                          spd_inverse(z_prior));
      const Matrix cov = spd_inverse(precision);
      Matrix gain(r, p + q);
      gain.leftCols(p) = cov * params.u_mat.transpose() * ly_inv;
      gain.rightCols(q) = cov * jm.aux_m.transpose() * n_inv;
      spec = make_t_spec(kind, alpha, latent_quadratic(gain, cov), jm.joint_cov);
      break;
    }
    case StatisticKind::Q_RAN: {  // reconstruction residual over l = (y_bar; x_bar)
      Matrix block_cov = Matrix::Zero(p + q, p + q);
      block_cov.topLeftCorner(p, p) = jm.omega;
      block_cov.bottomRightCorner(q, q) = params.lambda_x;
      Matrix loading(p + q, r);
      loading.topRows(p) = uw;
      loading.bottomRows(q) = params.v_mat;

      spec.kind = kind;
      spec.alpha = alpha;
      spec.weight_matrix = residual_weight(block_cov, loading);
      spec.h_cov = jm.joint_cov;
      spec.dof = unit_eigenvalue_count(spec.weight_matrix, jm.joint_cov);
      spec.control_limit = control_limit(alpha, spec.dof);
      break;
    }
    case StatisticKind::TS_P: {  // posterior of s given x alone; y gain block is zero
      const Matrix precision = symmetrize(params.v_mat.transpose() * lx_inv * params.v_mat +
                                          Matrix::Identity(r, r));
      const Matrix cov = spd_inverse(precision);
      Matrix gain = Matrix::Zero(r, p + q);
      gain.rightCols(q) = cov * params.v_mat.transpose() * lx_inv;
      spec = make_t_spec(kind, alpha, latent_quadratic(gain, cov), jm.joint_cov);
      break;
    }
    case StatisticKind::TZ_P: {  // posterior of z given y alone
      const Matrix precision = symmetrize(params.u_mat.transpose() * ly_inv * params.u_mat +
                                          Matrix::Identity(r, r));
      const Matrix cov = spd_inverse(precision);
      Matrix gain = Matrix::Zero(r, p + q);
      gain.leftCols(p) = cov * params.u_mat.transpose() * ly_inv;
      spec = make_t_spec(kind, alpha, latent_quadratic(gain, cov), jm.joint_cov);
      break;
    }
    default:
      throw std::invalid_argument("not a random-data statistic kind");
  }

  for (int i = 0; i < p; ++i) spec.variable_labels.push_back("y" + std::to_string(i + 1));
  for (int i = 0; i < q; ++i) spec.variable_labels.push_back("x" + std::to_string(i + 1));
  return spec;
}

std::vector<StatisticSpec> build_specs_random(const ModelParameters& params, double alpha) {
  std::vector<StatisticSpec> specs;
  for (StatisticKind kind : {StatisticKind::TS_RAN, StatisticKind::TZ_RAN,
                             StatisticKind::Q_RAN, StatisticKind::TS_P, StatisticKind::TZ_P})
    specs.push_back(build_spec_random(params, kind, alpha));
  return specs;
}

double stat_ts_ran(const StatisticSpec& spec, const ModelParameters& params, const Vector& x,
                   const Vector& y) {
  if (spec.kind != StatisticKind::TS_RAN) throw std::invalid_argument("spec kind mismatch");
  const GaussianPosterior post = posterior_s_given_xy(params, x, y);
  return post.mean.dot(spec.aux * post.mean);
}

double stat_tz_ran(const StatisticSpec& spec, const ModelParameters& params, const Vector& x,
                   const Vector& y) {
  if (spec.kind != StatisticKind::TZ_RAN) throw std::invalid_argument("spec kind mismatch");
  const GaussianPosterior post = posterior_z_given_xy(params, x, y);
  return post.mean.dot(spec.aux * post.mean);
}

double stat_q_ran(const StatisticSpec& spec, const ModelParameters& params, const Vector& x,
                  const Vector& y) {
  if (spec.kind != StatisticKind::Q_RAN) throw std::invalid_argument("spec kind mismatch");
  Vector h(params.p() + params.q());
  h << y - params.c_y, x - params.c_x;
  return h.dot(spec.weight_matrix * h);
}

double stat_ts_p(const StatisticSpec& spec, const ModelParameters& params, const Vector& x) {
  if (spec.kind != StatisticKind::TS_P) throw std::invalid_argument("spec kind mismatch");
  const GaussianPosterior post = posterior_s_given_x(params, x);
  return post.mean.dot(spec.aux * post.mean);
}

double stat_tz_p(const StatisticSpec& spec, const ModelParameters& params, const Vector& y) {
  if (spec.kind != StatisticKind::TZ_P) throw std::invalid_argument("spec kind mismatch");
  const GaussianPosterior post = posterior_z_given_y(params, y);
  return post.mean.dot(spec.aux * post.mean);
}

StatisticSpec build_spec_tseq(const ModelParameters& params,
                              const std::vector<Matrix>& training_subsequences, double alpha,
                              const TseqOptions& options) {
  const int r = params.r();
  Matrix moment = Matrix::Zero(r, r);
  long count = 0;
  for (const Matrix& sub : training_subsequences) {
    SmootherState state = kalman_forward(params, sub);
    if (!options.use_filtered) kalman_backward(params, state);
    const auto& means = options.use_filtered ? state.filtered_mean : state.smoothed_mean;
    for (std::size_t t = static_cast<std::size_t>(options.burn_in); t < means.size(); ++t) {
      moment.noalias() += means[t] * means[t].transpose();
      ++count;
    }
  }
  if (count < 50L * r) throw std::runtime_error("insufficient calibration data");
  moment = symmetrize(moment / static_cast<double>(count));

  StatisticSpec spec;
  spec.kind = StatisticKind::T_SEQ;
  spec.alpha = alpha;
  spec.h_cov = moment;
  spec.aux = restricted_inverse(moment);
  spec.weight_matrix = spec.aux;
  spec.dof = numerical_rank(moment);
  if (spec.dof == 0) throw std::runtime_error("uninformative statistic");
  spec.control_limit = control_limit(alpha, spec.dof);
  return spec;
}

double stat_t_seq(const StatisticSpec& spec, const Vector& smoothed_mean) {
  if (spec.kind != StatisticKind::T_SEQ) throw std::invalid_argument("spec kind mismatch");
  return smoothed_mean.dot(spec.aux * smoothed_mean);
}

StatisticSpec build_spec_qseq(const ModelParameters& params, double alpha) {
  const int q = params.q(), r = params.r();
  const Matrix w = params.w();
  const Matrix& v = params.v_mat;

  Matrix block_cov = Matrix::Zero(2 * q, 2 * q);
  block_cov.topLeftCorner(q, q) =
      symmetrize(v * params.lambda_eps() * v.transpose() + params.lambda_x);
  block_cov.bottomRightCorner(q, q) = params.lambda_x;
  Matrix loading(2 * q, r);
  loading.topRows(q) = v * w;
  loading.bottomRows(q) = v;

  // Stationary covariance of gamma = (x_bar_{t+tau}; x_bar_t): Var(s) = I_r,
  // Cov(s_{t+tau}, s_t) = W.
  const Matrix var_x = symmetrize(v * v.transpose() + params.lambda_x);
  Matrix gamma_cov(2 * q, 2 * q);
  gamma_cov.topLeftCorner(q, q) = var_x;
  gamma_cov.bottomRightCorner(q, q) = var_x;
  gamma_cov.topRightCorner(q, q) = v * w * v.transpose();
  gamma_cov.bottomLeftCorner(q, q) = gamma_cov.topRightCorner(q, q).transpose();

  StatisticSpec spec;
  spec.kind = StatisticKind::Q_SEQ;
  spec.alpha = alpha;
  spec.weight_matrix = residual_weight(block_cov, loading);
  spec.h_cov = symmetrize(gamma_cov);
  spec.dof = unit_eigenvalue_count(spec.weight_matrix, spec.h_cov);
  spec.control_limit = control_limit(alpha, spec.dof);
  for (int i = 0; i < q; ++i)
    spec.variable_labels.push_back("x" + std::to_string(i + 1) + "_lead");
  for (int i = 0; i < q; ++i) spec.variable_labels.push_back("x" + std::to_string(i + 1));
  return spec;
}

double stat_q_seq(const StatisticSpec& spec, const ModelParameters& params, const Vector& x_t,
                  const Vector& x_t_tau) {
  if (spec.kind != StatisticKind::Q_SEQ) throw std::invalid_argument("spec kind mismatch");
  Vector gamma(2 * params.q());
  gamma << x_t_tau - params.c_x, x_t - params.c_x;
  return gamma.dot(spec.weight_matrix * gamma);
}

std::vector<StatisticSpec> build_specs_sfa(const SfaRandomModel& model, double alpha) {
  const int q = static_cast<int>(model.v_mat.rows());
  const int r = static_cast<int>(model.v_mat.cols());
  const Matrix lz_inv = spd_inverse(model.lambda_z);
  const Matrix gram = symmetrize(model.v_mat.transpose() * lz_inv * model.v_mat);
  if (numerical_rank(gram) < r) throw std::runtime_error("degenerate slow-feature model");
  const Matrix h_cov = symmetrize(model.v_mat * model.v_mat.transpose() + model.lambda_z);

  std::vector<StatisticSpec> specs;

  // SF_RAN: latent statistic of the differenced model.
  {
    const Matrix cov = spd_inverse(symmetrize(gram + Matrix::Identity(r, r)));
    const Matrix gain = cov * model.v_mat.transpose() * lz_inv;
    specs.push_back(make_t_spec(StatisticKind::SF_RAN, alpha, latent_quadratic(gain, cov),
                                h_cov));
  }

  // SS_RAN: minimized reconstruction residual.
  {
    StatisticSpec spec;
    spec.kind = StatisticKind::SS_RAN;
    spec.alpha = alpha;
    spec.weight_matrix = symmetrize(
        lz_inv - lz_inv * model.v_mat * spd_inverse(gram) * model.v_mat.transpose() * lz_inv);
    spec.h_cov = h_cov;
    spec.dof = unit_eigenvalue_count(spec.weight_matrix, h_cov);
    if (spec.dof == 0) throw std::runtime_error("uninformative statistic");
    spec.control_limit = control_limit(alpha, spec.dof);
    specs.push_back(std::move(spec));
  }

  for (StatisticSpec& spec : specs)
    for (int i = 0; i < q; ++i) spec.variable_labels.push_back("zdot" + std::to_string(i + 1));
  return specs;
}

double stat_sf_ran(const StatisticSpec& spec, const SfaRandomModel& model,
                   const Vector& z_dot) {
  if (spec.kind != StatisticKind::SF_RAN) throw std::invalid_argument("spec kind mismatch");
  const Matrix lz_inv = spd_inverse(model.lambda_z);
  const int r = static_cast<int>(model.v_mat.cols());
  const Matrix cov = spd_inverse(
      symmetrize(model.v_mat.transpose() * lz_inv * model.v_mat + Matrix::Identity(r, r)));
  const Vector mean = cov * model.v_mat.transpose() * lz_inv * z_dot;
  return mean.dot(spec.aux * mean);
}

double stat_ss_ran(const StatisticSpec& spec, const SfaRandomModel& model,
                   const Vector& z_dot) {
  if (spec.kind != StatisticKind::SS_RAN) throw std::invalid_argument("spec kind mismatch");
  return z_dot.dot(spec.weight_matrix * z_dot);
}

std::map<std::string, double> MonitoringResult::alarm_rates() const {
  std::map<std::string, double> rates;
  for (std::size_t k = 0; k < specs.size(); ++k) {
    if (alarms[k].empty()) {
      rates[to_string(specs[k].kind)] = 0.0;
      continue;
    }
    long count = 0;
    for (bool a : alarms[k]) count += a ? 1 : 0;
    rates[to_string(specs[k].kind)] = static_cast<double>(count) / alarms[k].size();
  }
  return rates;
}

std::string MonitoringResult::to_csv() const {
  std::ostringstream os;
  os << "sample_index";
  for (const StatisticSpec& spec : specs) os << ',' << to_string(spec.kind);
  for (const StatisticSpec& spec : specs) os << ',' << to_string(spec.kind) << "_alarm";
  os << '\n';
  os << std::setprecision(17);
  for (std::size_t t = 0; t < sample_index.size(); ++t) {
    os << sample_index[t];
    for (std::size_t k = 0; k < specs.size(); ++k) os << ',' << values[k][t];
    for (std::size_t k = 0; k < specs.size(); ++k) os << ',' << (alarms[k][t] ? 1 : 0);
    os << '\n';
  }
  return os.str();
}

std::string MonitoringResult::metadata_json() const {
  nlohmann::json meta;
  for (const StatisticSpec& spec : specs) {
    meta[to_string(spec.kind)] = {{"dof", spec.dof},
                                  {"alpha", spec.alpha},
                                  {"control_limit", spec.control_limit}};
  }
  return meta.dump(2);
}

MonitoringResult monitor(const ModelParameters& params,
                         const std::vector<StatisticSpec>& specs, const Matrix& x_data,
                         const Matrix& y_data) {
  if (x_data.rows() != params.q() || y_data.rows() != params.p() ||
      x_data.cols() != y_data.cols())
    throw std::invalid_argument("data layout mismatch");
  for (const StatisticSpec& spec : specs) {
    if (spec.kind == StatisticKind::T_SEQ || spec.kind == StatisticKind::Q_SEQ ||
        spec.kind == StatisticKind::SF_RAN || spec.kind == StatisticKind::SS_RAN)
      throw std::invalid_argument("monitor expects random-data statistic specs");
  }

  MonitoringResult result;
  result.specs = specs;
  const Eigen::Index t_len = x_data.cols();
  result.values.assign(specs.size(), {});
  result.alarms.assign(specs.size(), {});
  Vector h(params.p() + params.q());
  for (Eigen::Index t = 0; t < t_len; ++t) {
    result.sample_index.push_back(static_cast<int>(t));
    h << y_data.col(t) - params.c_y, x_data.col(t) - params.c_x;
    for (std::size_t k = 0; k < specs.size(); ++k) {
      const double value = h.dot(specs[k].weight_matrix * h);
      result.values[k].push_back(value);
      result.alarms[k].push_back(value > specs[k].control_limit);
    }
  }
  return result;
}

MonitoringResult monitor_sequential(const ModelParameters& params, const StatisticSpec& spec,
                                    const Matrix& x_seq, int tau) {
  if (spec.kind != StatisticKind::Q_SEQ) throw std::invalid_argument("spec kind mismatch");
  if (x_seq.rows() != params.q()) throw std::invalid_argument("data layout mismatch");
  if (tau < 1) throw std::invalid_argument("tau must be >= 1");

  MonitoringResult result;
  result.specs = {spec};
  result.values.assign(1, {});
  result.alarms.assign(1, {});
  Vector gamma(2 * params.q());
  for (Eigen::Index t = 0; t + tau < x_seq.cols(); ++t) {
    result.sample_index.push_back(static_cast<int>(t));
    gamma << x_seq.col(t + tau) - params.c_x, x_seq.col(t) - params.c_x;
    const double value = gamma.dot(spec.weight_matrix * gamma);
    result.values[0].push_back(value);
    result.alarms[0].push_back(value > spec.control_limit);
  }
  return result;
}

}  // namespace gpmm
