#ifndef GPMM_BASELINES_HPP
#define GPMM_BASELINES_HPP

#include <utility>

#include "gpmm/model.hpp"
#include "gpmm/monitoring.hpp"

namespace gpmm {

// Per-variable zero-mean / unit-variance normalization fitted on training data
// and reapplied verbatim to new samples.
struct Normalization {
  Vector mean;
  Vector std_dev;

  static Normalization fit(const Matrix& data);
  Matrix apply(const Matrix& data) const;
  Vector apply(const Vector& sample) const;
};

struct PcaModel {
  Normalization norm;
  Matrix eigenvectors;   // p x p, descending eigenvalue order
  Vector eigenvalues;    // descending, >= 0
  int retained = 0;

  Matrix retained_vectors() const { return eigenvectors.leftCols(retained); }
  Vector retained_values() const { return eigenvalues.head(retained); }
};

PcaModel pca_fit(const Matrix& y_data, int r);
// (T^2, SPE) of one raw sample.
std::pair<double, double> pca_stats(const PcaModel& model, const Vector& y);

struct CcaModel {
  Normalization norm_x, norm_y;
  Matrix proj_x;           // q x r
  Matrix proj_y;           // p x r
  Vector singular_values;  // nonincreasing, in [0, 1]
  Matrix cov_xx, cov_yy;   // training covariances of normalized data, 1/T divisor
  Matrix dirs_x, dirs_y;   // whitened-space singular vectors, retained columns
};

CcaModel cca_fit(const Matrix& x_data, const Matrix& y_data, int r);
// (T_x^2, T_y^2) of one raw sample pair.
std::pair<double, double> cca_stats(const CcaModel& model, const Vector& x, const Vector& y);

struct SfaModel {
  Normalization norm;
  Matrix whitening;      // p x p, Pi^{-1/2} A^T
  Matrix projection;     // p x p, full B, slow rows first (Omega ascending)
  Vector omega;          // ascending difference-feature variances
  int slow_count = 0;

  Matrix slow_rows() const { return projection.topRows(slow_count); }
  Matrix fast_rows() const { return projection.bottomRows(projection.rows() - slow_count); }
  Vector fast_omega() const { return omega.tail(omega.size() - slow_count); }
};

SfaModel sfa_fit(const Matrix& y_sequence, int r);
// Static indices (T_S^2, T_F^2) of one raw sample.
std::pair<double, double> sfa_static(const SfaModel& model, const Vector& y);
// Temporal indices (S_S^2, S_F^2) of one raw first difference.
std::pair<double, double> sfa_temporal(const SfaModel& model, const Vector& y_dot);

// Closed-form PPCA estimate: loading spanning the leading eigen-subspace and
// isotropic noise variance from the discarded eigenvalues.
struct PpcaSolution {
  Matrix v_ml;       // q x r
  double noise_var;  // pi^2
  Vector eigenvalues;  // descending spectrum of the sample covariance
  Matrix eigenvectors;
};
PpcaSolution ppca_closed_form(const Matrix& data, int r);
PpcaSolution ppca_from_covariance(const Matrix& covariance, int r);

// Parameter restrictions under which standard GPMM statistics reproduce the
// classical monitors.

// W = I_r (lambda = 1, Lambda_eps = 0): the coupled model collapses to a
// shared latent; with CCA-derived ML loadings this is the PCCA reduction.
ModelParameters pcca_restricted(const CcaModel& cca);

// Input-only PPCA model (isotropic noise); U is zeroed so only the
// x-marginal statistics are meaningful.
ModelParameters ppca_restricted(const PpcaSolution& ppca, const Vector& c_x);

// Differenced slow-feature model on whitened first differences with
// isotropic noise (the PPCA-form special case).
SfaRandomModel sfa_diff_model(const PpcaSolution& ppca);

}  // namespace gpmm

#endif
