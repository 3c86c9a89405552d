// Independent reference implementations used only by the tests. These avoid
// the library's own numerical kernels: conditioning uses plain LU solves,
// root finding uses bisection, and the chi-square quantile is built on a
// hand-rolled regularized incomplete gamma.
#ifndef GPMM_TESTS_ORACLES_HPP
#define GPMM_TESTS_ORACLES_HPP

#include <cmath>
#include <functional>
#include <stdexcept>

#include <Eigen/Dense>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct ConditionalGaussian {
  Vector mean;
  Matrix cov;
};

// Condition the joint N(mean, cov) over (a; b) on b = b_obs using an LU
// solve, independent of the library's eigen-floored inverses.
inline ConditionalGaussian condition(const Vector& mean, const Matrix& cov,
                                     Eigen::Index dim_a, const Vector& b_obs) {
  const Eigen::Index dim_b = mean.size() - dim_a;
  const Matrix cov_aa = cov.topLeftCorner(dim_a, dim_a);
  const Matrix cov_ab = cov.topRightCorner(dim_a, dim_b);
  const Matrix cov_bb = cov.bottomRightCorner(dim_b, dim_b);
  const Eigen::PartialPivLU<Matrix> lu(cov_bb);
  ConditionalGaussian out;
  out.mean = mean.head(dim_a) + cov_ab * lu.solve(b_obs - mean.tail(dim_b));
  out.cov = cov_aa - cov_ab * lu.solve(cov_ab.transpose());
  return out;
}

// Largest root of f on [lo, hi] via sign-change scan plus bisection.
inline double largest_root_bisection(const std::function<double(double)>& f, double lo,
                                     double hi, int scan_steps = 4096) {
  double left = lo, right = hi;
  bool found = false;
  const double step = (hi - lo) / scan_steps;
  for (int i = scan_steps - 1; i >= 0; --i) {
    const double a = lo + i * step;
    const double b = (i == scan_steps - 1) ? hi : a + step;
    if (f(a) == 0.0) return a;
    if (f(b) == 0.0) return b;
    if (f(a) * f(b) < 0.0) {
      left = a;
      right = b;
      found = true;
      break;
    }
  }
  if (!found) throw std::runtime_error("oracle: no sign change found");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (left + right);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (f(left) * fm < 0.0)
      right = mid;
    else
      left = mid;
  }
  return 0.5 * (left + right);
}

// Regularized lower incomplete gamma P(a, x), series for x < a + 1 and
// continued fraction otherwise (classic Lentz iteration).
inline double regularized_gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("oracle: gamma domain");
  if (x == 0.0) return 0.0;
  const double log_prefix = a * std::log(x) - x - std::lgamma(a);
  if (x < a + 1.0) {
    double term = 1.0 / a, sum = term;
    for (int n = 1; n < 10000; ++n) {
      term *= x / (a + n);
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(log_prefix);
  }
  double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
  for (int n = 1; n < 10000; ++n) {
    const double an = -n * (n - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < 1e-30) d = 1e-30;
    c = b + an / c;
    if (std::abs(c) < 1e-30) c = 1e-30;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return 1.0 - std::exp(log_prefix) * h;
}

inline double chi_square_cdf(double x, int dof) {
  return regularized_gamma_p(0.5 * dof, 0.5 * x);
}

// (1 - alpha) chi-square quantile by bisection on the CDF.
inline double chi_square_quantile(double alpha, int dof) {
  const double target = 1.0 - alpha;
  double lo = 0.0, hi = 1.0;
  while (chi_square_cdf(hi, dof) < target) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (chi_square_cdf(mid, dof) < target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Sample covariance (1/T) and mean of column-sample data.
inline Matrix covariance_1t(const Matrix& data) {
  const Vector mean = data.rowwise().mean();
  const Matrix centered = data.colwise() - mean;
  return centered * centered.transpose() / double(data.cols());
}

}  // namespace oracle

#endif
