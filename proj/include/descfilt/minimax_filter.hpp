#pragma once

// Recursive minimax (set-membership) estimator for descriptor systems.
//
// The triple (P_k, r_k, alpha_k) is the whole sufficient statistic: the
// value function of the least-squares problem over steps 0..k, with the
// last state p free, is  <P_k p, p> - 2 <r_k, p> + alpha_k.  The set of
// final states consistent with the data is the ellipsoid
//
//   X(k) = xhat_k + beta_k^{1/2} { x : <P_k x, x> <= 1 },
//
// with xhat_k = P_k+ r_k and beta_k = 1 - alpha_k + <P_k xhat_k, xhat_k>.
// Directions outside range(P_k) have unbounded worst-case error.
//
// Weight indexing: S_k weights the residual F_k x_k - C_{k-1} x_{k-1}, the
// same convention as the uncertainty ellipsoid.
//
// `step` propagates the statistic in square-root form, value function
// |G p - h|^2 + c with P = G'G, r = G'h, alpha = h'h + c, eliminating the
// previous state by an orthogonal projection. This is algebraically the
// B_{k-1}+ recursion (kept as `step_direct`) without the cancellation in
// S - S C B+ C' S, which destroys rank decisions on singular problems.

#include "descfilt/matrix_kernel.hpp"
#include "descfilt/model.hpp"

#include <limits>
#include <optional>
#include <utility>

namespace descfilt {

struct FilterOptions {
  /// Shared SVD cutoff for every pseudoinverse and rank decision.
  double rank_tol = 0.0;
  /// Relative tolerance for "ell lies in range(P)".
  double direction_tol = 1e-8;
  /// beta below -consistency_tol marks the data as inconsistent.
  double consistency_tol = 1e-9;
  /// Eigenvalue slack for the PSD check on P_k.
  double psd_tol = 1e-9;
};

/// Square-root form of the value function: |G p - h|^2 + c.
struct SqrtInformation {
  Mat G;  // at most n rows, upper trapezoidal
  Vec h;
  double c = 0.0;
};

struct FilterState {
  Index k = 0;
  Mat P;
  Vec r;
  double alpha = 0.0;
  /// Set by init/step; P, r, alpha are its Gram quantities. States built by
  /// hand may leave it empty, in which case it is derived from P, r, alpha.
  std::optional<SqrtInformation> factor;
};

struct EstimateReport {
  Vec xhat;
  double beta = 0.0;
  Mat projector;
  Index observable_rank = 0;
  Index noncausality_index = 0;
  bool consistent = true;
};

inline constexpr double kInfiniteError = std::numeric_limits<double>::infinity();

FilterState init(const DescriptorModel& model, const Vec& y0, const FilterOptions& opts = {});

/// Advances state.k -> state.k + 1 using model matrices at the new step.
FilterState step(const FilterState& state, const DescriptorModel& model, const Vec& y,
                 const FilterOptions& opts = {});

/// Direct evaluation of the B_{k-1}+ recursion on (P, r, alpha). Reference
/// route only: loses accuracy on rank-deficient problems.
FilterState step_direct(const FilterState& state, const DescriptorModel& model, const Vec& y,
                        const FilterOptions& opts = {});

/// Factor of a state (its own, or one derived from P by eigendecomposition).
/// Throws NumericalBreakdown if P is not PSD.
SqrtInformation factor_of(const FilterState& state, const FilterOptions& opts = {});

/// Runs init followed by steps over y_0..y_{ys.size()-1}.
FilterState run(const DescriptorModel& model, const VecSeq& ys, const FilterOptions& opts = {});

/// Geometry of the informational set X(k) derived from one filter state.
/// Construction performs the single SVD every query below reuses.
class InformationalSet {
 public:
  explicit InformationalSet(const FilterState& state, const FilterOptions& opts = {});

  const Vec& center() const { return xhat_; }
  double beta() const { return beta_; }
  const Mat& shape() const { return P_; }
  const Mat& shape_pinv() const { return P_pinv_; }
  const Mat& projector() const { return projector_; }
  Index observable_rank() const { return rank_; }
  Index noncausality_index() const { return P_.rows() - rank_; }
  bool consistent() const { return beta_ >= -opts_.consistency_tol; }

  bool observable(const Vec& ell) const;

  /// beta^{1/2} <P+ ell, ell>^{1/2}, or kInfiniteError outside range(P).
  double ell_error(const Vec& ell) const;

  /// <ell, xhat> -/+ ell_error; throws OutsideObservable for ell outside range(P).
  std::pair<double, double> direction_bounds(const Vec& ell) const;

  /// <P (x - xhat), x - xhat> <= beta + 1e-9.
  bool contains(const Vec& x) const;

  EstimateReport report() const;

 private:
  void require_consistent() const;
  void require_dimension(const Vec& v, const char* what) const;

  FilterOptions opts_;
  Mat P_;
  Mat G_;
  Mat P_pinv_;
  Mat projector_;
  Vec xhat_;
  double beta_ = 0.0;
  Index rank_ = 0;
};

EstimateReport estimate(const FilterState& state, const FilterOptions& opts = {});
double ell_error(const FilterState& state, const Vec& ell, const FilterOptions& opts = {});
std::pair<double, double> direction_bounds(const FilterState& state, const Vec& ell,
                                           const FilterOptions& opts = {});
bool membership(const FilterState& state, const Vec& x, const FilterOptions& opts = {});

}  // namespace descfilt
