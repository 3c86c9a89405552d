#ifndef GPMM_CONTRIBUTION_HPP
#define GPMM_CONTRIBUTION_HPP

#include <string>
#include <vector>

#include "gpmm/monitoring.hpp"

namespace gpmm {

enum class ContributionMethod { GDC, RGDC, RBC, RRBC };

std::string to_string(ContributionMethod method);
ContributionMethod contribution_method_from_string(const std::string& name);

// Per-variable decompositions of a quadratic statistic h^T Pi h.
// gdc: i-th value = h^T Pi^{1-theta} xi_i xi_i^T Pi^theta h.
Vector gdc(const Matrix& weight, const Vector& h, double theta);

// rgdc: each GDC value divided by its in-control expectation
// xi^T Pi^theta Psi_h Pi^{1-theta} xi. Non-identifiable variables (zero
// denominator) are reported as NaN.
Vector rgdc(const Matrix& weight, const Vector& h, double theta, const Matrix& psi_h);

// rbc: (xi^T Pi h)^2 / (xi^T Pi xi); throws if a variable lies outside the
// statistic support (zero diagonal).
Vector rbc(const Matrix& weight, const Vector& h);

Vector rrbc(const Matrix& weight, const Vector& h, const Matrix& psi_h);

struct ContributionReport {
  ContributionMethod method;
  double theta = 0.5;
  StatisticKind statistic;
  std::vector<std::string> variable_labels;
  std::vector<int> sample_index;
  // values[t] holds one row of per-variable contributions.
  std::vector<Vector> values;

  std::string to_csv() const;        // sample x variable matrix
  std::string to_long_csv() const;   // sample, variable, value rows
  std::string metadata_json() const;
};

// Dispatcher assembling h_t and Pi from a spec. h columns follow the spec's
// layout: (y_bar; x_bar) for random statistics, (x_bar_{t+tau}; x_bar_t) for
// Q_SEQ, the whitened difference for SF/SS.
ContributionReport diagnose(const StatisticSpec& spec, const Matrix& h_samples,
                            ContributionMethod method, double theta = 0.5);

}  // namespace gpmm

#endif
