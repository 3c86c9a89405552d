#ifndef GPMM_EM_RANDOM_HPP
#define GPMM_EM_RANDOM_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "gpmm/model.hpp"

namespace gpmm {

struct EmConfig {
  int max_iters = 500;
  double rel_tol = 1e-8;       // relative log-likelihood change threshold
  std::uint64_t seed = 0;      // initialization RNG (initialization is deterministic,
                               // kept for reproducibility contracts)
  double min_lambda = 1e-6;
  double max_lambda = 1.0 - 1e-6;

  void validate() const;
};

struct FitDiagnostics {
  std::vector<double> log_likelihood;   // per accepted iterate
  std::vector<double> max_param_delta;  // per iteration
  int iterations = 0;
  bool converged = false;

  // "iteration, log-likelihood, max parameter delta" table.
  std::string to_table() const;
};

// Per-sample posterior moments plus the accumulated sums the M-step consumes.
struct SufficientStatsRandom {
  int samples = 0;
  Matrix sum_x_s;   // q x r, sum of x_bar E[s]^T
  Matrix sum_y_z;   // p x r, sum of y_bar E[z]^T
  Matrix sum_ss;    // r x r, sum of E[s s^T]
  Matrix sum_zz;    // r x r, sum of E[z z^T]
  Vector sum_sz_diag;  // r, per-coordinate sum of E[s^i z^i]
  Matrix sum_xx;    // q x q, sum of x_bar x_bar^T
  Matrix sum_yy;    // p x p, sum of y_bar y_bar^T
};

// Largest real root of a3 l^3 + a2 l^2 + a1 l + a0 in [0, 1], clamped into
// [min_lambda, max_lambda]. Companion-matrix eigenvalues plus one Newton
// polish; throws std::runtime_error("root bracket failure") if no real root
// survives the tolerance-widened [0, 1] filter.
double solve_lambda_cubic(double a0, double a1, double a2, double a3,
                          double min_lambda = 1e-6, double max_lambda = 1.0 - 1e-6);

SufficientStatsRandom e_step_random(const ModelParameters& params, const Matrix& x_data,
                                    const Matrix& y_data);

// Closed-form M-step updates for U, V, Lambda_x, Lambda_y (written in place);
// the lambda update is applied separately so the coupling constraint
// Lambda_eps = I - W^2 stays exact.
void m_step_random(const SufficientStatsRandom& stats, ModelParameters& params);

std::pair<ModelParameters, FitDiagnostics> fit_random(const Matrix& x_data,
                                                      const Matrix& y_data, int r,
                                                      const EmConfig& config);

}  // namespace gpmm

#endif
