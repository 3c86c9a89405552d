#include "gpmm/contribution.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace gpmm {

std::string to_string(ContributionMethod method) {
  switch (method) {
    case ContributionMethod::GDC: return "gdc";
    case ContributionMethod::RGDC: return "rgdc";
    case ContributionMethod::RBC: return "rbc";
    case ContributionMethod::RRBC: return "rrbc";
  }
  return "unknown";
}

ContributionMethod contribution_method_from_string(const std::string& name) {
  if (name == "gdc") return ContributionMethod::GDC;
  if (name == "rgdc") return ContributionMethod::RGDC;
  if (name == "rbc") return ContributionMethod::RBC;
  if (name == "rrbc") return ContributionMethod::RRBC;
  throw std::invalid_argument("unknown contribution method: " + name);
}

Vector gdc(const Matrix& weight, const Vector& h, double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw std::invalid_argument("theta must lie in [0, 1]");
  const Matrix left = spd_pow(weight, 1.0 - theta);
  const Matrix right = spd_pow(weight, theta);
  const Vector lh = left * h;
  const Vector rh = right * h;
  return lh.cwiseProduct(rh);
}

Vector rgdc(const Matrix& weight, const Vector& h, double theta, const Matrix& psi_h) {
  const Vector raw = gdc(weight, h, theta);
  const Matrix left = spd_pow(weight, theta);
  const Matrix right = spd_pow(weight, 1.0 - theta);
  const Matrix expectation = left * psi_h * right;
  Vector out(raw.size());
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    const double denom = expectation(i, i);
    out[i] = denom > 0.0 ? raw[i] / denom : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

Vector rbc(const Matrix& weight, const Vector& h) {
  const Vector wh = weight * h;
  Vector out(h.size());
  for (Eigen::Index i = 0; i < h.size(); ++i) {
    const double denom = weight(i, i);
    if (!(denom > 0.0)) throw std::runtime_error("variable outside statistic support");
    out[i] = wh[i] * wh[i] / denom;
  }
  return out;
}

Vector rrbc(const Matrix& weight, const Vector& h, const Matrix& psi_h) {
  const Vector wh = weight * h;
  const Matrix expectation = weight * psi_h * weight;
  Vector out(h.size());
  for (Eigen::Index i = 0; i < h.size(); ++i) {
    const double denom = expectation(i, i);
    out[i] = denom > 0.0 ? wh[i] * wh[i] / denom
                         : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

std::string ContributionReport::to_csv() const {
  std::ostringstream os;
  os << "sample_index";
  for (const std::string& label : variable_labels) os << ',' << label;
  os << '\n' << std::setprecision(17);
  for (std::size_t t = 0; t < values.size(); ++t) {
    os << sample_index[t];
    for (Eigen::Index i = 0; i < values[t].size(); ++i) os << ',' << values[t][i];
    os << '\n';
  }
  return os.str();
}

std::string ContributionReport::to_long_csv() const {
  std::ostringstream os;
  os << "sample_index,variable,value\n" << std::setprecision(17);
  for (std::size_t t = 0; t < values.size(); ++t)
    for (Eigen::Index i = 0; i < values[t].size(); ++i)
      os << sample_index[t] << ',' << variable_labels[i] << ',' << values[t][i] << '\n';
  return os.str();
}

std::string ContributionReport::metadata_json() const {
  nlohmann::json meta;
  meta["method"] = to_string(method);
  meta["theta"] = theta;
  meta["statistic"] = gpmm::to_string(statistic);
  meta["variables"] = variable_labels;
  return meta.dump(2);
}

ContributionReport diagnose(const StatisticSpec& spec, const Matrix& h_samples,
                            ContributionMethod method, double theta) {
  if (h_samples.rows() != spec.weight_matrix.rows())
    throw std::invalid_argument("h layout does not match the statistic weight");
  if (spec.kind == StatisticKind::T_SEQ)
    throw std::invalid_argument("T_SEQ has no explicit variable-space weight");

  ContributionReport report;
  report.method = method;
  report.theta = theta;
  report.statistic = spec.kind;
  report.variable_labels = spec.variable_labels;
  if (report.variable_labels.empty())
    for (Eigen::Index i = 0; i < h_samples.rows(); ++i)
      report.variable_labels.push_back("v" + std::to_string(i + 1));

  for (Eigen::Index t = 0; t < h_samples.cols(); ++t) {
    const Vector h = h_samples.col(t);
    Vector row;
    switch (method) {
      case ContributionMethod::GDC: row = gdc(spec.weight_matrix, h, theta); break;
      case ContributionMethod::RGDC:
        row = rgdc(spec.weight_matrix, h, theta, spec.h_cov);
        break;
      case ContributionMethod::RBC: row = rbc(spec.weight_matrix, h); break;
      case ContributionMethod::RRBC: row = rrbc(spec.weight_matrix, h, spec.h_cov); break;
    }
    report.sample_index.push_back(static_cast<int>(t));
    report.values.push_back(std::move(row));
  }
  return report;
}

}  // namespace gpmm
