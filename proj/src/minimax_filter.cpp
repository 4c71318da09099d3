#include "descfilt/minimax_filter.hpp"

#include "descfilt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace descfilt {

namespace {

void require_measurement(const Vec& y, Index p, Index k) {
  if (y.size() != p) {
    throw DimensionMismatch("y_" + std::to_string(k) + " has dimension " +
                            std::to_string(y.size()) + ", expected " + std::to_string(p));
  }
  if (!y.allFinite()) throw InvalidMatrix("y_" + std::to_string(k) + " has non-finite entries");
}

Mat checked_psd(const Mat& raw, Index k, const FilterOptions& opts) {
  Mat P = symmetrize(raw).mat;
  if (!is_psd(P, opts.psd_tol)) {
    throw NumericalBreakdown("P_" + std::to_string(k) + " lost positive semidefiniteness");
  }
  return P;
}

// Reduces rows of [G | h] to at most G.cols() by Householder QR; the
// discarded part of h moves into c.
SqrtInformation compress(const Mat& G, const Vec& h, double c) {
  const Index n = G.cols();
  if (G.rows() <= n) return {G, h, c};
  Eigen::HouseholderQR<Mat> qr(G);
  const Vec qth = qr.householderQ().transpose() * h;
  SqrtInformation out;
  out.G = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  out.h = qth.head(n);
  out.c = c + qth.tail(qth.size() - n).squaredNorm();
  return out;
}

void set_gram(FilterState& st, const SqrtInformation& f) {
  st.P = f.G.transpose() * f.G;
  st.P = 0.5 * (st.P + st.P.transpose());
  st.r = f.G.transpose() * f.h;
  st.alpha = f.h.squaredNorm() + f.c;
}

void require_state(const FilterState& state, const DescriptorModel& model, Index k) {
  if (k > model.tau) {
    throw DimensionMismatch("step " + std::to_string(k) + " beyond model horizon " +
                            std::to_string(model.tau));
  }
  if (state.P.rows() != model.n || state.P.cols() != model.n || state.r.size() != model.n) {
    throw DimensionMismatch("filter state dimensions do not match the model");
  }
}

}  // namespace

FilterState init(const DescriptorModel& model, const Vec& y0, const FilterOptions& opts) {
  require_valid(model);
  require_measurement(y0, model.p, 0);
  const Mat& F = model.F[0];
  const Mat& H = model.H[0];
  const Mat& S = model.S[0];
  const Mat& R = model.R[0];
  const Vec Ry = R * y0;
  FilterState st;
  st.k = 0;
  st.P = checked_psd(F.transpose() * S * F + H.transpose() * R * H, 0, opts);
  st.r = H.transpose() * Ry;
  st.alpha = y0.dot(Ry);

  const Mat US = chol_upper(S);
  const Mat UR = chol_upper(R);
  Mat G(model.m + model.p, model.n);
  G << US * F, UR * H;
  Vec h = Vec::Zero(model.m + model.p);
  h.tail(model.p) = UR * y0;
  st.factor = compress(G, h, 0.0);
  return st;
}

SqrtInformation factor_of(const FilterState& state, const FilterOptions& opts) {
  if (state.factor) return *state.factor;
  if (!is_psd(state.P, opts.psd_tol)) {
    throw NumericalBreakdown("P_" + std::to_string(state.k) + " is not positive semidefinite");
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(state.P);
  const Vec& ev = es.eigenvalues();
  const Index n = state.P.rows();
  const double top = n ? std::max(ev(n - 1), 0.0) : 0.0;
  const double cutoff = svd_cutoff(top, n, n, opts.rank_tol);
  Index first = 0;
  while (first < n && ev(first) <= cutoff) ++first;
  const Index rank = n - first;
  const Mat V = es.eigenvectors().rightCols(rank);
  const Vec s = ev.tail(rank).cwiseSqrt();
  SqrtInformation f;
  f.G = s.asDiagonal() * V.transpose();
  f.h = s.cwiseInverse().asDiagonal() * (V.transpose() * state.r);
  f.c = state.alpha - f.h.squaredNorm();
  return f;
}

FilterState step(const FilterState& state, const DescriptorModel& model, const Vec& y,
                 const FilterOptions& opts) {
  const Index k = state.k + 1;
  require_state(state, model, k);
  require_measurement(y, model.p, k);
  const SqrtInformation prev = factor_of(state, opts);

  const auto ku = static_cast<std::size_t>(k);
  const Mat& Cprev = model.C[ku - 1];
  const Mat& F = model.F[ku];
  const Mat& H = model.H[ku];
  const Mat US = chol_upper(model.S[ku]);
  const Mat UR = chol_upper(model.R[ku]);
  const Index n = model.n, m = model.m, p = model.p;
  const Index q = prev.G.rows();

  // Previous-state columns of the stacked residual; their Gram matrix is B_{k-1}.
  Mat Ax(q + m, n);
  Ax << prev.G, -US * Cprev;
  Mat Ap = Mat::Zero(q + m, n);
  Ap.bottomRows(m) = US * F;
  Vec b = Vec::Zero(q + m);
  b.head(q) = prev.h;

  // Left null space of Ax under the same cutoff B+ would use.
  Eigen::JacobiSVD<Mat> svd(Ax, Eigen::ComputeFullU);
  const Vec& sv = svd.singularValues();
  const double cutoff = sv.size() ? factor_cutoff(sv(0), n, opts.rank_tol) : 0.0;
  Index rank = 0;
  while (rank < sv.size() && sv(rank) > cutoff) ++rank;
  const Mat U2 = svd.matrixU().rightCols(q + m - rank);

  Mat G(U2.cols() + p, n);
  G << U2.transpose() * Ap, UR * H;
  Vec h(U2.cols() + p);
  h << U2.transpose() * b, UR * y;

  FilterState next;
  next.k = k;
  next.factor = compress(G, h, prev.c);
  set_gram(next, *next.factor);
  if (!next.P.allFinite() || !next.r.allFinite() || !std::isfinite(next.alpha)) {
    throw NumericalBreakdown("non-finite statistic at step " + std::to_string(k));
  }
  return next;
}

FilterState step_direct(const FilterState& state, const DescriptorModel& model, const Vec& y,
                        const FilterOptions& opts) {
  const Index k = state.k + 1;
  require_state(state, model, k);
  require_measurement(y, model.p, k);

  const auto ku = static_cast<std::size_t>(k);
  const Mat& Cprev = model.C[ku - 1];
  const Mat& F = model.F[ku];
  const Mat& H = model.H[ku];
  const Mat& S = model.S[ku];
  const Mat& R = model.R[ku];

  // B_{k-1} = P_{k-1} + C'_{k-1} S_k C_{k-1}
  const Mat SC = S * Cprev;
  const Mat B = symmetrize(state.P + Cprev.transpose() * SC).mat;
  const Mat Bp = pinv(B, opts.rank_tol);
  const Vec Bp_r = Bp * state.r;
  const Mat middle = S - SC * Bp * SC.transpose();
  const Vec Ry = R * y;

  FilterState next;
  next.k = k;
  next.P = checked_psd(H.transpose() * R * H + F.transpose() * middle * F, k, opts);
  next.r = F.transpose() * (SC * Bp_r) + H.transpose() * Ry;
  next.alpha = state.alpha + y.dot(Ry) - state.r.dot(Bp_r);
  if (!next.r.allFinite() || !std::isfinite(next.alpha)) {
    throw NumericalBreakdown("non-finite statistic at step " + std::to_string(k));
  }
  return next;
}

FilterState run(const DescriptorModel& model, const VecSeq& ys, const FilterOptions& opts) {
  if (ys.empty()) throw DimensionMismatch("measurement sequence is empty");
  FilterState st = init(model, ys.front(), opts);
  for (std::size_t k = 1; k < ys.size(); ++k) st = step(st, model, ys[k], opts);
  return st;
}

InformationalSet::InformationalSet(const FilterState& state, const FilterOptions& opts)
    : opts_(opts), P_(state.P) {
  require_finite(P_, "P");
  if (P_.rows() != P_.cols() || state.r.size() != P_.rows()) {
    throw DimensionMismatch("filter state has inconsistent dimensions");
  }
  const Index n = P_.rows();
  const SqrtInformation f = factor_of(state, opts);
  G_ = f.G;
  // P = G'G: eigenvalues of P are squared singular values of G.
  Eigen::JacobiSVD<Mat> svd(f.G, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec& sv = svd.singularValues();
  const double cutoff = sv.size() ? factor_cutoff(sv(0), n, opts.rank_tol) : 0.0;
  while (rank_ < sv.size() && sv(rank_) > cutoff) ++rank_;
  const Mat vr = svd.matrixV().leftCols(rank_);
  const Mat ur = svd.matrixU().leftCols(rank_);
  const Vec inv_s = sv.head(rank_).cwiseInverse();
  P_pinv_ = vr * inv_s.cwiseAbs2().asDiagonal() * vr.transpose();
  projector_ = vr * vr.transpose();
  xhat_ = vr * (inv_s.asDiagonal() * (ur.transpose() * f.h));
  // 1 - alpha + <P xhat, xhat> = 1 - c - |h - G xhat|^2
  beta_ = 1.0 - f.c - (f.h - f.G * xhat_).squaredNorm();
}

void InformationalSet::require_dimension(const Vec& v, const char* what) const {
  if (v.size() != P_.rows()) {
    throw DimensionMismatch(std::string(what) + " has dimension " + std::to_string(v.size()) +
                            ", expected " + std::to_string(P_.rows()));
  }
}

void InformationalSet::require_consistent() const {
  if (!consistent()) {
    throw InconsistentData("informational set is empty (beta = " + std::to_string(beta_) + ")");
  }
}

bool InformationalSet::observable(const Vec& ell) const {
  require_dimension(ell, "direction");
  return (projector_ * ell - ell).norm() <= opts_.direction_tol * ell.norm();
}

double InformationalSet::ell_error(const Vec& ell) const {
  require_consistent();
  if (!observable(ell)) return kInfiniteError;
  const double b = std::max(beta_, 0.0);
  return std::sqrt(b) * std::sqrt(std::max(quad(P_pinv_, ell), 0.0));
}

std::pair<double, double> InformationalSet::direction_bounds(const Vec& ell) const {
  const double err = ell_error(ell);
  if (std::isinf(err)) {
    throw OutsideObservable("direction lies outside the minimax observable subspace");
  }
  const double mid = ell.dot(xhat_);
  return {mid - err, mid + err};
}

bool InformationalSet::contains(const Vec& x) const {
  require_consistent();
  require_dimension(x, "point");
  return (G_ * (x - xhat_)).squaredNorm() <= beta_ + 1e-9;
}

EstimateReport InformationalSet::report() const {
  return {xhat_, beta_, projector_, rank_, noncausality_index(), consistent()};
}

EstimateReport estimate(const FilterState& state, const FilterOptions& opts) {
  return InformationalSet(state, opts).report();
}

double ell_error(const FilterState& state, const Vec& ell, const FilterOptions& opts) {
  return InformationalSet(state, opts).ell_error(ell);
}

std::pair<double, double> direction_bounds(const FilterState& state, const Vec& ell,
                                           const FilterOptions& opts) {
  return InformationalSet(state, opts).direction_bounds(ell);
}

bool membership(const FilterState& state, const Vec& x, const FilterOptions& opts) {
  return InformationalSet(state, opts).contains(x);
}

}  // namespace descfilt
