#include "gpmm/datagen.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

#include "gpmm/linalg.hpp"
#include "gpmm/rng.hpp"

namespace gpmm {

namespace {

Matrix noise_factor(const Matrix& covariance) {
  Eigen::LLT<Matrix> llt(symmetrize(covariance));
  if (llt.info() != Eigen::Success) throw std::runtime_error("ill-conditioned model");
  return llt.matrixL();
}

Vector draw(GaussianRng& rng, Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.gaussian();
  return v;
}

}  // namespace

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::RANDOM: return "random";
    case ScenarioKind::SEQ_STATIONARY: return "seq_stationary";
    case ScenarioKind::SEQ_RANDOM_WALK: return "random_walk";
  }
  throw std::invalid_argument("unknown scenario kind");
}

ScenarioKind scenario_kind_from_string(const std::string& name) {
  if (name == "random") return ScenarioKind::RANDOM;
  if (name == "seq_stationary") return ScenarioKind::SEQ_STATIONARY;
  if (name == "random_walk") return ScenarioKind::SEQ_RANDOM_WALK;
  throw std::invalid_argument("unknown scenario kind: " + name);
}

ModelParameters Scenario::default_params() {
  ModelParameters params;
  params.u_mat.resize(3, 2);
  params.u_mat << 2.3, 1.5,
                 -2.9, 2.4,
                  1.8, -3.1;
  params.v_mat.resize(3, 2);
  params.v_mat << 1.2, -2.3,
                  3.2, 1.7,
                  1.3, -2.4;
  params.lambda_y.resize(3, 3);
  params.lambda_y << 0.8, 0.2, 0.3,
                     0.2, 0.5, -0.4,
                     0.3, -0.4, 0.9;
  params.lambda_x.resize(3, 3);
  params.lambda_x << 0.8, 0.4, 0.3,
                     0.4, 0.9, -0.2,
                     0.3, -0.2, 0.8;
  params.w_diag.resize(2);
  params.w_diag << 0.54, 0.62;
  params.lambda_eps_diag = Vector::Ones(2) - params.w_diag.cwiseAbs2();
  params.c_y = Vector::Zero(3);
  params.c_x = Vector::Zero(3);
  return params;
}

void Scenario::validate() const {
  const auto issues = validate_params(params);
  if (!issues.empty()) throw std::invalid_argument("invalid scenario parameters: " + issues[0]);
  if (kind == ScenarioKind::SEQ_STATIONARY) {
    if (sequences < 1 || sequence_length < 1)
      throw std::invalid_argument("sequence counts must be at least 1");
  } else if (samples < 1) {
    throw std::invalid_argument("sample count must be at least 1");
  }
  if (fault) {
    const int horizon =
        kind == ScenarioKind::SEQ_STATIONARY ? sequence_length : samples;
    if (fault->onset < 0 || fault->onset >= horizon)
      throw std::invalid_argument("fault onset outside the sample range");
    if (fault->variable < 0) throw std::invalid_argument("fault variable index negative");
    if (fault->span < 0) throw std::invalid_argument("fault span negative");
  }
}

RandomData gen_random(const Scenario& scenario) {
  if (scenario.kind != ScenarioKind::RANDOM)
    throw std::invalid_argument("scenario kind mismatch");
  scenario.validate();
  const ModelParameters& mp = scenario.params;
  const int p = mp.p(), q = mp.q(), r = mp.r(), n = scenario.samples;
  const Matrix factor_y = noise_factor(mp.lambda_y);
  const Matrix factor_x = noise_factor(mp.lambda_x);
  const Vector eps_std = mp.lambda_eps_diag.cwiseSqrt();

  GaussianRng rng(scenario.seed, 0);
  RandomData data;
  data.x.resize(q, n);
  data.y.resize(p, n);
  for (int t = 0; t < n; ++t) {
    const Vector s = draw(rng, r);
    const Vector z = mp.w_diag.cwiseProduct(s) + eps_std.cwiseProduct(draw(rng, r));
    data.y.col(t) = mp.u_mat * z + mp.c_y + factor_y * draw(rng, p);
    data.x.col(t) = mp.v_mat * s + mp.c_x + factor_x * draw(rng, q);
  }
  return data;
}

std::vector<Matrix> gen_seq_stationary(const Scenario& scenario) {
  if (scenario.kind != ScenarioKind::SEQ_STATIONARY)
    throw std::invalid_argument("scenario kind mismatch");
  scenario.validate();
  const ModelParameters& mp = scenario.params;
  const int q = mp.q(), r = mp.r(), len = scenario.sequence_length;
  const Matrix factor_x = noise_factor(mp.lambda_x);
  const Vector eps_std = mp.lambda_eps_diag.cwiseSqrt();

  std::vector<Matrix> sequences(scenario.sequences);
  for (int k = 0; k < scenario.sequences; ++k) {
    GaussianRng rng(scenario.seed, std::uint64_t(k));
    Matrix seq(q, len);
    Vector s = draw(rng, r);
    for (int t = 0; t < len; ++t) {
      if (t > 0) s = mp.w_diag.cwiseProduct(s) + eps_std.cwiseProduct(draw(rng, r));
      seq.col(t) = mp.v_mat * s + mp.c_x + factor_x * draw(rng, q);
    }
    sequences[k] = std::move(seq);
  }
  return sequences;
}

Matrix gen_seq_random_walk(const Scenario& scenario) {
  if (scenario.kind != ScenarioKind::SEQ_RANDOM_WALK)
    throw std::invalid_argument("scenario kind mismatch");
  scenario.validate();
  const ModelParameters& mp = scenario.params;
  const int q = mp.q(), r = mp.r(), n = scenario.samples;
  const Matrix factor_x = noise_factor(mp.lambda_x);

  GaussianRng rng(scenario.seed, 0);
  Matrix seq(q, n);
  Vector s = Vector::Zero(r);
  for (int t = 0; t < n; ++t) {
    s += draw(rng, r);
    seq.col(t) = mp.v_mat * s + mp.c_x + factor_x * draw(rng, q);
  }
  return seq;
}

Matrix inject_fault(const Matrix& data, const FaultSpec& fault) {
  if (fault.variable < 0 || fault.variable >= data.rows())
    throw std::invalid_argument("fault variable index out of range");
  if (fault.onset < 0 || fault.onset >= data.cols())
    throw std::invalid_argument("fault onset outside the sample range");

  Matrix faulty = data;
  const Eigen::Index last = data.cols() - 1;
  const int span = fault.span > 0 ? fault.span : std::max<int>(int(last - fault.onset), 1);
  for (Eigen::Index t = fault.onset; t <= last; ++t) {
    double offset = fault.magnitude;
    if (fault.type == FaultType::DRIFT) {
      const double progress = double(t - fault.onset) / double(span);
      offset *= std::min(progress, 1.0);
    }
    faulty(fault.variable, t) += offset;
  }
  return faulty;
}

}  // namespace gpmm
