#include "doctest.h"

#include <cmath>

#include "gpmm/datagen.hpp"
#include "oracles.hpp"
#include "support.hpp"

using gpmm::Matrix;
using gpmm::Scenario;
using gpmm::ScenarioKind;
using gpmm::Vector;

TEST_CASE("scenario kind names round-trip") {
  for (auto kind : {ScenarioKind::RANDOM, ScenarioKind::SEQ_STATIONARY,
                    ScenarioKind::SEQ_RANDOM_WALK})
    CHECK(gpmm::scenario_kind_from_string(gpmm::to_string(kind)) == kind);
  CHECK_THROWS_AS(gpmm::scenario_kind_from_string("nope"), std::invalid_argument);
}

TEST_CASE("scenario validation enforces counts and fault ranges") {
  Scenario scenario;
  CHECK_NOTHROW(scenario.validate());
  scenario.samples = 0;
  CHECK_THROWS_AS(scenario.validate(), std::invalid_argument);
  scenario.samples = 100;
  gpmm::FaultSpec fault;
  fault.onset = 100;
  scenario.fault = fault;
  CHECK_THROWS_AS(scenario.validate(), std::invalid_argument);
  scenario.fault->onset = 50;
  CHECK_NOTHROW(scenario.validate());
  scenario.fault->span = -1;
  CHECK_THROWS_AS(scenario.validate(), std::invalid_argument);
}

TEST_CASE("benchmark parameters satisfy every model invariant") {
  const auto params = Scenario::default_params();
  CHECK(gpmm::validate_params(params).empty());
  CHECK(params.p() == 3);
  CHECK(params.q() == 3);
  CHECK(params.r() == 2);
  CHECK(params.w_diag[0] == doctest::Approx(0.54));
  CHECK(params.w_diag[1] == doctest::Approx(0.62));
  CHECK(params.u_mat(0, 0) == doctest::Approx(2.3));
  CHECK(params.v_mat(1, 0) == doctest::Approx(3.2));
  CHECK(params.lambda_eps_diag[0] == doctest::Approx(1.0 - 0.54 * 0.54));
}

TEST_CASE("generation is a pure function of the scenario") {
  Scenario scenario;
  scenario.samples = 300;
  scenario.seed = 91;
  const auto a = gpmm::gen_random(scenario);
  const auto b = gpmm::gen_random(scenario);
  CHECK((a.x - b.x).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.y - b.y).cwiseAbs().maxCoeff() == 0.0);
  scenario.seed = 92;
  const auto c = gpmm::gen_random(scenario);
  CHECK((a.x - c.x).cwiseAbs().maxCoeff() > 0.0);

  Scenario walk = scenario;
  walk.kind = ScenarioKind::SEQ_RANDOM_WALK;
  CHECK((gpmm::gen_seq_random_walk(walk) - gpmm::gen_seq_random_walk(walk))
            .cwiseAbs()
            .maxCoeff() == 0.0);
  CHECK_THROWS_AS(gpmm::gen_random(walk), std::invalid_argument);
  CHECK_THROWS_AS(gpmm::gen_seq_random_walk(scenario), std::invalid_argument);
  CHECK_THROWS_AS(gpmm::gen_seq_stationary(scenario), std::invalid_argument);
}

TEST_CASE("random data reproduces the analytic joint covariance") {
  Scenario scenario;
  scenario.samples = 100000;
  scenario.seed = 93;
  const auto data = gpmm::gen_random(scenario);
  Matrix joint(6, 100000);
  joint.topRows(3) = data.y;
  joint.bottomRows(3) = data.x;
  const Matrix empirical = oracle::covariance_1t(joint);
  const Matrix expected = gpmm::joint_model(scenario.params).joint_cov;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      CHECK(std::abs(empirical(i, j) - expected(i, j)) <
            0.05 * std::max(1.0, std::abs(expected(i, j))));
  CHECK(joint.rowwise().mean().cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("zero coupling decouples the input and output blocks") {
  Scenario scenario;
  scenario.params.w_diag.setZero();
  scenario.params.lambda_eps_diag.setOnes();
  scenario.samples = 50000;
  scenario.seed = 94;
  const auto data = gpmm::gen_random(scenario);
  const Matrix yc = data.y.colwise() - Vector(data.y.rowwise().mean());
  const Matrix xc = data.x.colwise() - Vector(data.x.rowwise().mean());
  const Matrix cross = yc * xc.transpose() / 50000.0;
  CHECK(cross.cwiseAbs().maxCoeff() < 0.2);
}

TEST_CASE("stationary sequences have the model's marginal and lag-one covariances") {
  Scenario scenario;
  scenario.kind = ScenarioKind::SEQ_STATIONARY;
  scenario.sequences = 100;
  scenario.sequence_length = 500;
  scenario.seed = 95;
  const auto sequences = gpmm::gen_seq_stationary(scenario);
  REQUIRE(sequences.size() == 100);
  for (const auto& seq : sequences) {
    CHECK(seq.rows() == 3);
    CHECK(seq.cols() == 500);
  }
  // Derived per-sequence streams differ.
  CHECK((sequences[0] - sequences[1]).cwiseAbs().maxCoeff() > 0.0);

  Matrix cov0 = Matrix::Zero(3, 3), cov1 = Matrix::Zero(3, 3);
  long n0 = 0, n1 = 0;
  for (const auto& seq : sequences) {
    for (int t = 0; t < seq.cols(); ++t, ++n0) cov0 += seq.col(t) * seq.col(t).transpose();
    for (int t = 0; t + 1 < seq.cols(); ++t, ++n1)
      cov1 += seq.col(t + 1) * seq.col(t).transpose();
  }
  cov0 /= double(n0);
  cov1 /= double(n1);
  const auto& mp = scenario.params;
  const Matrix expected0 = mp.v_mat * mp.v_mat.transpose() + mp.lambda_x;
  const Matrix expected1 = mp.v_mat * mp.w() * mp.v_mat.transpose();
  CHECK((cov0 - expected0).cwiseAbs().maxCoeff() < 0.25);
  CHECK((cov1 - expected1).cwiseAbs().maxCoeff() < 0.25);
}

TEST_CASE("random-walk differences carry the integrated-latent covariance") {
  Scenario scenario;
  scenario.kind = ScenarioKind::SEQ_RANDOM_WALK;
  scenario.samples = 100000;
  scenario.seed = 96;
  const Matrix x = gpmm::gen_seq_random_walk(scenario);
  const Matrix diffs = x.rightCols(x.cols() - 1) - x.leftCols(x.cols() - 1);
  const Matrix empirical = diffs * diffs.transpose() / double(diffs.cols());
  const auto& mp = scenario.params;
  // Unit-variance latent increments; observation noise enters twice.
  const Matrix expected = mp.v_mat * mp.v_mat.transpose() + 2.0 * mp.lambda_x;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(std::abs(empirical(i, j) - expected(i, j)) <
            0.05 * std::max(1.0, std::abs(expected(i, j))));
  // The level itself wanders: late samples have far more spread than early.
  CHECK(x.rightCols(1000).rowwise().squaredNorm().sum() >
        10.0 * x.leftCols(1000).rowwise().squaredNorm().sum());
}

TEST_CASE("fault injection adds steps and bounded drifts on one variable") {
  Matrix data = Matrix::Zero(2, 10);
  gpmm::FaultSpec step;
  step.variable = 1;
  step.onset = 4;
  step.magnitude = 2.5;
  const Matrix stepped = gpmm::inject_fault(data, step);
  CHECK(stepped.row(0).cwiseAbs().maxCoeff() == 0.0);
  for (int t = 0; t < 10; ++t)
    CHECK(stepped(1, t) == doctest::Approx(t >= 4 ? 2.5 : 0.0));

  gpmm::FaultSpec drift;
  drift.variable = 0;
  drift.onset = 2;
  drift.magnitude = 3.0;
  drift.type = gpmm::FaultType::DRIFT;
  drift.span = 4;
  const Matrix drifted = gpmm::inject_fault(data, drift);
  CHECK(drifted(0, 1) == 0.0);
  CHECK(drifted(0, 2) == doctest::Approx(0.0));
  CHECK(drifted(0, 4) == doctest::Approx(1.5));
  CHECK(drifted(0, 6) == doctest::Approx(3.0));
  CHECK(drifted(0, 9) == doctest::Approx(3.0));  // holds after the ramp

  gpmm::FaultSpec bad;
  bad.variable = 5;
  CHECK_THROWS_AS(gpmm::inject_fault(data, bad), std::invalid_argument);
  bad.variable = 0;
  bad.onset = 10;
  CHECK_THROWS_AS(gpmm::inject_fault(data, bad), std::invalid_argument);
}
