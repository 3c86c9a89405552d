#ifndef GPMM_LINALG_HPP
#define GPMM_LINALG_HPP

#include <Eigen/Dense>

namespace gpmm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Relative eigenvalue floor applied by all SPD inverses and square roots.
inline constexpr double kEigenFloorRel = 1e-12;

// Relative threshold used when counting the numerical rank of a PSD matrix.
inline constexpr double kRankThresholdRel = 1e-8;

Matrix symmetrize(const Matrix& a);

// Inverse of a symmetric positive (semi)definite matrix via eigendecomposition,
// flooring eigenvalues at kEigenFloorRel * max eigenvalue. Throws
// std::runtime_error("ill-conditioned model") if every eigenvalue is below floor.
Matrix spd_inverse(const Matrix& a);

// Symmetric square root / inverse square root with the same flooring policy.
Matrix spd_sqrt(const Matrix& a);
Matrix spd_inv_sqrt(const Matrix& a);

// Fractional power A^theta for symmetric PSD A; negative eigenvalues below
// tolerance are clamped to zero, others must be nonnegative.
Matrix spd_pow(const Matrix& a, double theta);

// Inverse restricted to the numerical column space: eigen-directions with
// eigenvalue below threshold * max are projected out rather than amplified.
Matrix restricted_inverse(const Matrix& a, double rel_threshold = kRankThresholdRel);

// Count of eigenvalues above rel_threshold * max(|eigenvalues|, 1).
int numerical_rank(const Matrix& a, double rel_threshold = kRankThresholdRel);

// Eigenvalues of a symmetric matrix, descending.
Vector symmetric_eigenvalues(const Matrix& a);

bool is_symmetric(const Matrix& a, double tol = 1e-10);
bool is_psd(const Matrix& a, double tol = 1e-10);

// Log density of N(mean, cov) evaluated at x; cov handled with the floored
// eigendecomposition so the result is finite for PSD cov.
double gaussian_log_density(const Vector& x, const Vector& mean, const Matrix& cov);

}  // namespace gpmm

#endif
