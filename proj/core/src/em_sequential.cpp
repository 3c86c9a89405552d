#include "gpmm/em_sequential.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gpmm {

SubsequenceSet decompose_subsequences(const Matrix& x_data, int tau) {
  const Eigen::Index t = x_data.cols();
  if (tau < 1) throw std::invalid_argument("tau must be >= 1");
  if (t < 2 * tau) throw std::invalid_argument("sequence too short: need T >= 2 tau");

  SubsequenceSet set;
  set.tau = tau;
  for (int k = 0; k < tau; ++k) {
    std::vector<int> origins;
    for (Eigen::Index col = k; col < t; col += tau) origins.push_back(static_cast<int>(col));
    Matrix sub(x_data.rows(), origins.size());
    for (std::size_t j = 0; j < origins.size(); ++j) sub.col(j) = x_data.col(origins[j]);
    set.subsequences.push_back(std::move(sub));
    set.origin_index.push_back(std::move(origins));
  }
  return set;
}

SmootherState kalman_forward(const ModelParameters& params, const Matrix& x_seq) {
  const int q = params.q(), r = params.r();
  if (x_seq.rows() != q) throw std::invalid_argument("sequence dimension mismatch");
  const Eigen::Index t_len = x_seq.cols();
  const Matrix w = params.w();
  const Matrix eps = params.lambda_eps();
  const Matrix& v = params.v_mat;

  SmootherState state;
  state.filtered_mean.resize(t_len);
  state.filtered_cov.resize(t_len);
  state.kalman_gain.resize(t_len);

  Vector mu_prev = Vector::Zero(r);
  Matrix y_prev;
  for (Eigen::Index t = 0; t < t_len; ++t) {
    const Vector xbar = x_seq.col(t) - params.c_x;
    // Predicted state covariance: prior Lambda_eps + W W^T at t = 1.
    const Matrix pred = (t == 0) ? symmetrize(eps + w * w.transpose())
                                 : symmetrize(eps + w * y_prev * w.transpose());
    const Matrix innov_cov = symmetrize(v * pred * v.transpose() + params.lambda_x);
    const Matrix gain = pred * v.transpose() * spd_inverse(innov_cov);
    const Vector pred_mean = (t == 0) ? Vector(Vector::Zero(r)) : Vector(w * mu_prev);
    const Vector innovation = xbar - v * pred_mean;

    state.filtered_mean[t] = pred_mean + gain * innovation;
    state.filtered_cov[t] = symmetrize((Matrix::Identity(r, r) - gain * v) * pred);
    state.kalman_gain[t] = gain;
    state.log_likelihood += gaussian_log_density(innovation, Vector::Zero(q), innov_cov);

    mu_prev = state.filtered_mean[t];
    y_prev = state.filtered_cov[t];
  }
  return state;
}

void kalman_backward(const ModelParameters& params, SmootherState& state) {
  const std::size_t t_len = state.filtered_mean.size();
  if (t_len == 0) throw std::invalid_argument("forward pass missing");
  const Matrix w = params.w();
  const Matrix eps = params.lambda_eps();

  state.smoothed_mean.resize(t_len);
  state.smoothed_cov.resize(t_len);
  state.smoother_gain.resize(t_len);

  state.smoothed_mean[t_len - 1] = state.filtered_mean[t_len - 1];
  state.smoothed_cov[t_len - 1] = state.filtered_cov[t_len - 1];

  for (std::size_t i = t_len - 1; i-- > 0;) {
    const Matrix pred = symmetrize(w * state.filtered_cov[i] * w.transpose() + eps);
    const Matrix gain = state.filtered_cov[i] * w.transpose() * spd_inverse(pred);
    state.smoother_gain[i] = gain;
    state.smoothed_mean[i] =
        state.filtered_mean[i] + gain * (state.smoothed_mean[i + 1] - w * state.filtered_mean[i]);
    state.smoothed_cov[i] = symmetrize(
        state.filtered_cov[i] + gain * (state.smoothed_cov[i + 1] - pred) * gain.transpose());
  }
}

SufficientStatsSequential sufficient_stats_sequential(
    const ModelParameters& params, const std::vector<Matrix>& centered_subsequences,
    const std::vector<SmootherState>& states) {
  const int q = params.q(), r = params.r();
  SufficientStatsSequential stats;
  stats.sum_x_s = Matrix::Zero(q, r);
  stats.sum_ss = Matrix::Zero(r, r);
  stats.sum_ss_head = Matrix::Zero(r, r);
  stats.sum_ss_tail = Matrix::Zero(r, r);
  stats.sum_cross_diag = Vector::Zero(r);
  stats.sum_xx = Matrix::Zero(q, q);

  for (std::size_t k = 0; k < states.size(); ++k) {
    const SmootherState& st = states[k];
    const Matrix& xc = centered_subsequences[k];
    const std::size_t t_len = st.smoothed_mean.size();
    for (std::size_t t = 0; t < t_len; ++t) {
      const Vector& mu = st.smoothed_mean[t];
      const Matrix ess = st.smoothed_cov[t] + mu * mu.transpose();
      stats.sum_ss += ess;
      stats.sum_x_s.noalias() += xc.col(t) * mu.transpose();
      stats.sum_xx.noalias() += xc.col(t) * xc.col(t).transpose();
      if (t + 1 < t_len) stats.sum_ss_head += ess;
      if (t > 0) {
        stats.sum_ss_tail += ess;
        // E[s_t s_{t-1}^T] = J_{t-1} Y_hat_t + mu_hat_t mu_hat_{t-1}^T.
        const Matrix cross = st.smoother_gain[t - 1] * st.smoothed_cov[t] +
                             mu * st.smoothed_mean[t - 1].transpose();
        for (int i = 0; i < r; ++i) stats.sum_cross_diag[i] += cross(i, i);
        ++stats.transitions;
      }
      ++stats.samples;
    }
  }
  stats.sum_ss = symmetrize(stats.sum_ss);
  stats.sum_ss_head = symmetrize(stats.sum_ss_head);
  stats.sum_ss_tail = symmetrize(stats.sum_ss_tail);
  return stats;
}

namespace {

ModelParameters initialize_sequential(const std::vector<Matrix>& sequences, int r) {
  const int q = static_cast<int>(sequences.front().rows());
  Eigen::Index total = 0;
  Vector mean = Vector::Zero(q);
  for (const Matrix& seq : sequences) {
    mean += seq.rowwise().sum();
    total += seq.cols();
  }
  mean /= static_cast<double>(total);

  Matrix cov = Matrix::Zero(q, q);
  for (const Matrix& seq : sequences) {
    const Matrix centered = seq.colwise() - mean;
    cov.noalias() += centered * centered.transpose();
  }
  cov /= static_cast<double>(total);

  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(cov));
  // PPCA-style start: leading eigenvectors scaled by excess variance.
  const Vector evals = es.eigenvalues().reverse();
  const Matrix evecs = es.eigenvectors().rowwise().reverse();
  double noise = 0.0;
  for (int i = r; i < q; ++i) noise += evals[i];
  noise = (q > r) ? noise / (q - r) : 0.1 * evals[r - 1];

  ModelParameters params;
  params.c_x = mean;
  params.c_y = mean;
  params.v_mat.resize(q, r);
  for (int i = 0; i < r; ++i)
    params.v_mat.col(i) = evecs.col(i) * std::sqrt(std::max(evals[i] - noise, 1e-8));
  params.u_mat = params.v_mat;
  params.w_diag = Vector::Constant(r, 0.5);
  params.lambda_eps_diag = Vector::Constant(r, 0.75);
  params.lambda_x = Matrix(cov.diagonal().asDiagonal());
  params.lambda_y = params.lambda_x;
  return params;
}

}  // namespace

std::pair<ModelParameters, FitDiagnostics> fit_sequential(
    const std::vector<Matrix>& sequences, int tau, int r, const EmConfig& config) {
  config.validate();
  if (sequences.empty()) throw std::invalid_argument("no training sequences");
  const int q = static_cast<int>(sequences.front().rows());
  if (tau < 1) throw std::invalid_argument("tau must be >= 1");
  if (r < 1 || r > q) throw std::invalid_argument("r out of range");
  for (const Matrix& seq : sequences) {
    if (seq.rows() != q) throw std::invalid_argument("inconsistent sequence dimensions");
    if (!seq.allFinite()) throw std::invalid_argument("non-finite data");
    if (seq.cols() < 2 * tau) throw std::invalid_argument("sequence too short: need T >= 2 tau");
  }

  ModelParameters params = initialize_sequential(sequences, r);
  FitDiagnostics diag;
  double prev_ll = -std::numeric_limits<double>::infinity();

  std::vector<Matrix> subseqs;
  for (const Matrix& seq : sequences) {
    SubsequenceSet set = decompose_subsequences(seq, tau);
    for (Matrix& sub : set.subsequences) subseqs.push_back(std::move(sub));
  }

  for (int iter = 0; iter < config.max_iters; ++iter) {
    const ModelParameters old = params;

    std::vector<SmootherState> states;
    std::vector<Matrix> centered;
    states.reserve(subseqs.size());
    double ll = 0.0;
    for (const Matrix& sub : subseqs) {
      SmootherState st = kalman_forward(params, sub);
      kalman_backward(params, st);
      ll += st.log_likelihood;
      centered.push_back(sub.colwise() - params.c_x);
      states.push_back(std::move(st));
    }

    const SufficientStatsSequential stats =
        sufficient_stats_sequential(params, centered, states);

    // M-step: V and Lambda_x mirror the random-data updates on smoothed moments.
    params.v_mat = stats.sum_x_s * spd_inverse(stats.sum_ss);
    params.lambda_x = symmetrize(
        (stats.sum_xx - 2.0 * stats.sum_x_s * params.v_mat.transpose() +
         params.v_mat * stats.sum_ss * params.v_mat.transpose()) /
        static_cast<double>(stats.samples));
    for (int i = 0; i < r; ++i) {
      const double a0 = -stats.sum_cross_diag[i];
      const double a1 =
          stats.sum_ss_head(i, i) + stats.sum_ss_tail(i, i) - stats.transitions;
      const double lam =
          solve_lambda_cubic(a0, a1, a0, static_cast<double>(stats.transitions),
                             config.min_lambda, config.max_lambda);
      params.w_diag[i] = lam;
      params.lambda_eps_diag[i] = 1.0 - lam * lam;
    }
    params.u_mat = params.v_mat;
    params.lambda_y = params.lambda_x;
    params.c_y = params.c_x;

    double delta = (params.v_mat - old.v_mat).cwiseAbs().maxCoeff();
    delta = std::max(delta, (params.w_diag - old.w_diag).cwiseAbs().maxCoeff());
    delta = std::max(delta, (params.lambda_x - old.lambda_x).cwiseAbs().maxCoeff());
    diag.log_likelihood.push_back(ll);
    diag.max_param_delta.push_back(delta);
    diag.iterations = iter + 1;

    if (iter > 0 && std::abs(ll - prev_ll) / (std::abs(ll) + 1.0) < config.rel_tol) {
      diag.converged = true;
      break;
    }
    prev_ll = ll;
  }
  return {params, diag};
}

}  // namespace gpmm
