#include "doctest.h"

#include <cmath>
#include <random>

#include "gpmm/datagen.hpp"
#include "gpmm/em_random.hpp"
#include "oracles.hpp"
#include "support.hpp"

using gpmm::Matrix;
using gpmm::ModelParameters;
using gpmm::Vector;

TEST_CASE("EmConfig validation rejects bad ranges") {
  gpmm::EmConfig config;
  CHECK_NOTHROW(config.validate());
  config.max_iters = 0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = {};
  config.min_lambda = 0.9;
  config.max_lambda = 0.1;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}

TEST_CASE("cubic solver: perfectly correlated coefficients give coupling one") {
  // f(l) = l^3 - l^2 + l - 1 = (l - 1)(l^2 + 1).
  const double root = gpmm::solve_lambda_cubic(-1.0, 1.0, -1.0, 1.0, 0.0, 1.0);
  CHECK(root == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cubic solver: zero cross-moment gives coupling zero") {
  // f(l) = l^3 + l = l(l^2 + 1).
  const double root = gpmm::solve_lambda_cubic(0.0, 1.0, 0.0, 1.0, 0.0, 1.0);
  CHECK(root == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("cubic solver matches a bisection oracle on bracketed coefficients") {
  std::mt19937 gen(31);
  std::uniform_real_distribution<double> coeff(-5.0, 5.0);
  std::uniform_real_distribution<double> lead(0.5, 10.0);
  int tested = 0;
  while (tested < 200) {
    const double a3 = lead(gen), a2 = coeff(gen), a1 = coeff(gen), a0 = coeff(gen);
    const auto f = [&](double l) { return ((a3 * l + a2) * l + a1) * l + a0; };
    if (!(f(0.0) <= 0.0 && f(1.0) >= 0.0)) continue;
    ++tested;
    const double expected = oracle::largest_root_bisection(f, 0.0, 1.0);
    const double got = gpmm::solve_lambda_cubic(a0, a1, a2, a3, 0.0, 1.0);
    CHECK(std::abs(got - expected) < 1e-10);
    CHECK(got >= 0.0);
    CHECK(got <= 1.0);
  }
}

TEST_CASE("cubic solver reports failure when no root lies in [0, 1]") {
  // f(l) = l^3 + l + 1 has its only real root near -0.68.
  CHECK_THROWS_WITH_AS(gpmm::solve_lambda_cubic(1.0, 1.0, 0.0, 1.0, 0.0, 1.0),
                       "root bracket failure", std::runtime_error);
}

TEST_CASE("e-step at the offsets yields zero means and prior-conditional moments") {
  const ModelParameters mp = support::benchmark_params();
  Matrix x(3, 1), y(3, 1);
  x.col(0) = mp.c_x;
  y.col(0) = mp.c_y;
  const auto stats = gpmm::e_step_random(mp, x, y);
  const auto post = gpmm::posterior_sz_given_xy(mp, mp.c_x, mp.c_y);
  CHECK((stats.sum_x_s).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((stats.sum_ss - post.cov_ss).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((stats.sum_zz - post.cov_zz).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("e-step second moments equal covariance plus outer product of means") {
  std::mt19937 gen(32);
  const ModelParameters mp = support::random_model(gen, 3, 3, 2);
  Matrix x(3, 1), y(3, 1);
  x.col(0) = support::random_vector(gen, 3);
  y.col(0) = support::random_vector(gen, 3);
  const auto stats = gpmm::e_step_random(mp, x, y);
  const auto post = gpmm::posterior_sz_given_xy(mp, x.col(0), y.col(0));
  const Matrix expected_ss = post.cov_ss + post.mean_s * post.mean_s.transpose();
  CHECK((stats.sum_ss - expected_ss).cwiseAbs().maxCoeff() < 1e-10);
  for (int i = 0; i < 2; ++i)
    CHECK(stats.sum_sz_diag[i] ==
          doctest::Approx(post.cov_sz(i, i) + post.mean_s[i] * post.mean_z[i]).epsilon(1e-10));
}

TEST_CASE("e-step latent second moment averages to identity on true-model data") {
  gpmm::Scenario scenario;
  scenario.samples = 1000;
  scenario.seed = 3;
  const auto data = gpmm::gen_random(scenario);
  const auto stats = gpmm::e_step_random(scenario.params, data.x, data.y);
  const Matrix mean_ss = stats.sum_ss / 1000.0;
  CHECK((mean_ss - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 0.1);
}

TEST_CASE("m-step with analytic infinite-data moments is a fixed point") {
  const ModelParameters mp = support::benchmark_params();
  // Tower-property moments under the true model: E[x_bar E[s|x,y]^T] = V,
  // E[y_bar E[z|x,y]^T] = U, E[ss^T] = E[zz^T] = I, E[s^i z^i] = lambda_i.
  gpmm::SufficientStatsRandom stats;
  stats.samples = 1;
  stats.sum_x_s = mp.v_mat;
  stats.sum_y_z = mp.u_mat;
  stats.sum_ss = Matrix::Identity(2, 2);
  stats.sum_zz = Matrix::Identity(2, 2);
  stats.sum_sz_diag = mp.w_diag;
  stats.sum_xx = mp.v_mat * mp.v_mat.transpose() + mp.lambda_x;
  stats.sum_yy = mp.u_mat * mp.u_mat.transpose() + mp.lambda_y;  // E[zz^T] = I

  ModelParameters updated = mp;
  gpmm::m_step_random(stats, updated);
  CHECK((updated.v_mat - mp.v_mat).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((updated.u_mat - mp.u_mat).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((updated.lambda_x - mp.lambda_x).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((updated.lambda_y - mp.lambda_y).cwiseAbs().maxCoeff() < 1e-10);
  for (int i = 0; i < 2; ++i) {
    // Cubic coefficients from these moments factor as (l - lambda_i)(l^2 + 1).
    const double root = gpmm::solve_lambda_cubic(-mp.w_diag[i],
                                                 1.0 + 1.0 - 1.0, -mp.w_diag[i], 1.0, 0.0, 1.0);
    CHECK(root == doctest::Approx(mp.w_diag[i]).epsilon(1e-10));
  }
}

TEST_CASE("m-step matches scalar regression formulas in one dimension") {
  gpmm::SufficientStatsRandom stats;
  stats.samples = 4;
  stats.sum_x_s = Matrix::Constant(1, 1, 2.5);
  stats.sum_y_z = Matrix::Constant(1, 1, -1.5);
  stats.sum_ss = Matrix::Constant(1, 1, 5.0);
  stats.sum_zz = Matrix::Constant(1, 1, 4.0);
  stats.sum_sz_diag = Vector::Constant(1, 1.0);
  stats.sum_xx = Matrix::Constant(1, 1, 8.0);
  stats.sum_yy = Matrix::Constant(1, 1, 6.0);

  ModelParameters params;
  params.w_diag = Vector::Constant(1, 0.5);
  params.lambda_eps_diag = Vector::Constant(1, 0.75);
  params.c_x = params.c_y = Vector::Zero(1);
  gpmm::m_step_random(stats, params);
  const double v = 2.5 / 5.0, u = -1.5 / 4.0;
  CHECK(params.v_mat(0, 0) == doctest::Approx(v));
  CHECK(params.u_mat(0, 0) == doctest::Approx(u));
  CHECK(params.lambda_x(0, 0) == doctest::Approx((8.0 - 2 * 2.5 * v + v * 5.0 * v) / 4.0));
  CHECK(params.lambda_y(0, 0) == doctest::Approx((6.0 - 2 * (-1.5) * u + u * 4.0 * u) / 4.0));
}

TEST_CASE("m-step rejects zero-variance statistics") {
  gpmm::SufficientStatsRandom stats;
  stats.samples = 4;
  stats.sum_x_s = Matrix::Zero(2, 1);
  stats.sum_y_z = Matrix::Zero(2, 1);
  stats.sum_ss = Matrix::Zero(1, 1);
  stats.sum_zz = Matrix::Zero(1, 1);
  stats.sum_sz_diag = Vector::Zero(1);
  stats.sum_xx = Matrix::Zero(2, 2);
  stats.sum_yy = Matrix::Zero(2, 2);
  ModelParameters params;
  CHECK_THROWS_WITH_AS(gpmm::m_step_random(stats, params), "degenerate statistics",
                       std::runtime_error);
}

TEST_CASE("fit_random guards its preconditions") {
  const Matrix x = Matrix::Random(3, 5), y = Matrix::Random(3, 5);
  gpmm::EmConfig config;
  CHECK_THROWS_AS(gpmm::fit_random(x, y, 0, config), std::invalid_argument);
  CHECK_THROWS_AS(gpmm::fit_random(x, y, 4, config), std::invalid_argument);
  CHECK_THROWS_AS(gpmm::fit_random(x, y, 2, config), std::invalid_argument);  // T <= p+q
  Matrix bad = Matrix::Random(3, 20);
  bad(1, 3) = std::nan("");
  CHECK_THROWS_AS(gpmm::fit_random(bad, Matrix::Random(3, 20), 2, config),
                  std::invalid_argument);
}

TEST_CASE("fit_random recovers the generating joint covariance") {
  gpmm::Scenario scenario;
  scenario.samples = 100000;
  scenario.seed = 17;
  const auto data = gpmm::gen_random(scenario);
  gpmm::EmConfig config;
  config.max_iters = 300;
  const auto [fitted, diag] = gpmm::fit_random(data.x, data.y, 2, config);

  // Rotation-invariant comparison: the implied joint covariances must agree.
  const Matrix fitted_cov = gpmm::joint_model(fitted).joint_cov;
  const Matrix true_cov = gpmm::joint_model(scenario.params).joint_cov;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      CHECK(std::abs(fitted_cov(i, j) - true_cov(i, j)) <
            0.07 * std::max(1.0, std::abs(true_cov(i, j))));

  // Coupling constraint holds on the fitted model.
  for (int i = 0; i < 2; ++i)
    CHECK(fitted.lambda_eps_diag[i] ==
          doctest::Approx(1.0 - fitted.w_diag[i] * fitted.w_diag[i]).epsilon(1e-12));

  // Log-likelihood non-decreasing within slack.
  for (std::size_t i = 1; i < diag.log_likelihood.size(); ++i)
    CHECK(diag.log_likelihood[i] >= diag.log_likelihood[i - 1] - 1e-8);
}

TEST_CASE("identical input and output streams drive couplings to the clamp") {
  std::mt19937 gen(33);
  const int q = 2, t_len = 4000;
  Matrix x(q, t_len);
  const Matrix mix = support::random_matrix(gen, q, q);
  for (int t = 0; t < t_len; ++t) x.col(t) = mix * support::random_vector(gen, q);
  gpmm::EmConfig config;
  config.max_iters = 100;
  const auto [fitted, diag] = gpmm::fit_random(x, x, q, config);
  CHECK(fitted.w_diag.maxCoeff() > 0.99);
}

TEST_CASE("fit_random is deterministic for a fixed configuration") {
  gpmm::Scenario scenario;
  scenario.samples = 500;
  scenario.seed = 5;
  const auto data = gpmm::gen_random(scenario);
  gpmm::EmConfig config;
  config.max_iters = 20;
  const auto [a, diag_a] = gpmm::fit_random(data.x, data.y, 2, config);
  const auto [b, diag_b] = gpmm::fit_random(data.x, data.y, 2, config);
  CHECK((a.u_mat - b.u_mat).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.v_mat - b.v_mat).cwiseAbs().maxCoeff() == 0.0);
  CHECK(diag_a.log_likelihood == diag_b.log_likelihood);
}
