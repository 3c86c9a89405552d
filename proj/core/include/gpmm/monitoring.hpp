#ifndef GPMM_MONITORING_HPP
#define GPMM_MONITORING_HPP

#include <map>
#include <string>
#include <vector>

#include "gpmm/em_sequential.hpp"
#include "gpmm/model.hpp"

namespace gpmm {

enum class StatisticKind {
  TS_RAN,  // latent s inferred from (x, y)
  TZ_RAN,  // latent z inferred from (x, y)
  Q_RAN,   // model residual, random data
  TS_P,    // latent s inferred from x alone
  TZ_P,    // latent z inferred from y alone
  T_SEQ,   // smoothed latent, sequential data
  Q_SEQ,   // model residual, sequential data
  SF_RAN,  // slow-feature latent on whitened differences
  SS_RAN,  // slow-feature residual on whitened differences
};

std::string to_string(StatisticKind kind);

// One statistic: cached quadratic form, degrees of freedom, control limit.
struct StatisticSpec {
  StatisticKind kind;
  int dof = 0;
  double alpha = 0.05;
  double control_limit = 0.0;
  Matrix weight_matrix;  // Pi acting on the statistic's h vector
  Matrix h_cov;          // Psi_h, analytic covariance of h under the model
  Matrix aux;            // statistic-specific cache: restricted (I - Xi)^{-1}
                         // for T statistics, the moment inverse for T_SEQ
  std::vector<std::string> variable_labels;
};

// (1 - alpha) quantile of chi-square with dof degrees of freedom.
double control_limit(double alpha, int dof);

// Specs for the five random-data statistics; h = (y_bar; x_bar) for all of
// them so contribution analysis shares one layout.
std::vector<StatisticSpec> build_specs_random(const ModelParameters& params, double alpha);

// One random-data spec; lets restricted models build only the statistics
// they support (an uninformative statistic throws std::runtime_error).
StatisticSpec build_spec_random(const ModelParameters& params, StatisticKind kind,
                                double alpha);

double stat_ts_ran(const StatisticSpec& spec, const ModelParameters& params, const Vector& x,
                   const Vector& y);
double stat_tz_ran(const StatisticSpec& spec, const ModelParameters& params, const Vector& x,
                   const Vector& y);
double stat_q_ran(const StatisticSpec& spec, const ModelParameters& params, const Vector& x,
                  const Vector& y);
double stat_ts_p(const StatisticSpec& spec, const ModelParameters& params, const Vector& x);
double stat_tz_p(const StatisticSpec& spec, const ModelParameters& params, const Vector& y);

// T_SEQ: the smoothed-mean moment is estimated empirically from training
// subsequences after a burn-in prefix.
struct TseqOptions {
  int burn_in = 20;
  bool use_filtered = false;  // causal mode; smoothed is the default
};
StatisticSpec build_spec_tseq(const ModelParameters& params,
                              const std::vector<Matrix>& training_subsequences, double alpha,
                              const TseqOptions& options = {});
double stat_t_seq(const StatisticSpec& spec, const Vector& smoothed_mean);

// Q_SEQ over gamma = (x_bar_{t+tau}; x_bar_t).
StatisticSpec build_spec_qseq(const ModelParameters& params, double alpha);
double stat_q_seq(const StatisticSpec& spec, const ModelParameters& params,
                  const Vector& x_t, const Vector& x_t_tau);

// SF/SS statistics for the differenced model z_dot = V s_dot + e_z on
// whitened first differences; h is the whitened difference itself.
struct SfaRandomModel {
  Matrix v_mat;      // q x r
  Matrix lambda_z;   // q x q
};
std::vector<StatisticSpec> build_specs_sfa(const SfaRandomModel& model, double alpha);
double stat_sf_ran(const StatisticSpec& spec, const SfaRandomModel& model,
                   const Vector& z_dot);
double stat_ss_ran(const StatisticSpec& spec, const SfaRandomModel& model,
                   const Vector& z_dot);

struct MonitoringResult {
  std::vector<StatisticSpec> specs;
  std::vector<int> sample_index;
  // values[k][t]: statistic k at sample t; alarms parallel.
  std::vector<std::vector<double>> values;
  std::vector<std::vector<bool>> alarms;

  std::map<std::string, double> alarm_rates() const;
  std::string to_csv() const;
  std::string metadata_json() const;
};

// Batch driver for the random-data statistics over paired columns.
MonitoringResult monitor(const ModelParameters& params,
                         const std::vector<StatisticSpec>& specs, const Matrix& x_data,
                         const Matrix& y_data);

// Batch driver for Q_SEQ over one sequence with the spec's stride.
MonitoringResult monitor_sequential(const ModelParameters& params, const StatisticSpec& spec,
                                    const Matrix& x_seq, int tau);

}  // namespace gpmm

#endif
