#ifndef GPMM_EM_SEQUENTIAL_HPP
#define GPMM_EM_SEQUENTIAL_HPP

#include <vector>

#include "gpmm/em_random.hpp"
#include "gpmm/model.hpp"

namespace gpmm {

// Stride-tau decomposition of a sequence: subsequence k holds columns
// k, k+tau, k+2tau, ... (0-based) of the parent.
struct SubsequenceSet {
  std::vector<Matrix> subsequences;            // tau matrices, q x T_k
  std::vector<std::vector<int>> origin_index;  // parent column of each entry
  int tau = 1;
};

SubsequenceSet decompose_subsequences(const Matrix& x_data, int tau);

// Forward (filtered) and backward (smoothed) state of one subsequence.
struct SmootherState {
  std::vector<Vector> filtered_mean;    // mu_t
  std::vector<Matrix> filtered_cov;     // Y_t
  std::vector<Matrix> kalman_gain;      // K_t
  std::vector<Vector> smoothed_mean;    // mu_hat_t
  std::vector<Matrix> smoothed_cov;     // Y_hat_t
  std::vector<Matrix> smoother_gain;    // J_t (defined for t < T-1)
  double log_likelihood = 0.0;          // prediction-error decomposition
};

// Forward recursion; x_seq columns are raw observations, centered with c_x
// internally. Uses only V, W, Lambda_eps, Lambda_x, c_x from params.
SmootherState kalman_forward(const ModelParameters& params, const Matrix& x_seq);

// RTS backward pass filling the smoothed fields in place.
void kalman_backward(const ModelParameters& params, SmootherState& state);

// Accumulated smoothed moments across subsequences (sums weighted by length).
struct SufficientStatsSequential {
  int samples = 0;      // total observations
  int transitions = 0;  // total t >= 2 pairs
  Matrix sum_x_s;       // q x r
  Matrix sum_ss;        // r x r, over all t
  Matrix sum_ss_head;   // r x r, over t <= T_k - 1 (the "previous" role)
  Matrix sum_ss_tail;   // r x r, over t >= 2 (the "current" role)
  Vector sum_cross_diag;  // r, per-coordinate sum of E[s_t^i s_{t-1}^i]
  Matrix sum_xx;        // q x q
};

SufficientStatsSequential sufficient_stats_sequential(
    const ModelParameters& params, const std::vector<Matrix>& centered_subsequences,
    const std::vector<SmootherState>& states);

// Fits the sequential model (U = V, c_y = c_x, Lambda_y = Lambda_x) to one or
// more training sequences decomposed at stride tau.
std::pair<ModelParameters, FitDiagnostics> fit_sequential(
    const std::vector<Matrix>& sequences, int tau, int r, const EmConfig& config);

inline std::pair<ModelParameters, FitDiagnostics> fit_sequential(const Matrix& x_data,
                                                                 int tau, int r,
                                                                 const EmConfig& config) {
  return fit_sequential(std::vector<Matrix>{x_data}, tau, r, config);
}

}  // namespace gpmm

#endif
