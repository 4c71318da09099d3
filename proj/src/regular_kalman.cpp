#include "descfilt/regular_kalman.hpp"

#include "descfilt/errors.hpp"

#include <string>

namespace descfilt {

namespace {

bool regular_at(const DescriptorModel& model, std::size_t k, double rank_tol) {
  Mat stacked(model.m + model.p, model.n);
  stacked << model.F[k], model.H[k];
  return numerical_rank(stacked, rank_tol) == model.n;
}

void require_regular(const DescriptorModel& model, std::size_t k, double rank_tol) {
  if (!regular_at(model, k, rank_tol)) {
    throw SingularMatrix("rank [F_" + std::to_string(k) + "; H_" + std::to_string(k) +
                         "] < n: the Kalman recursion is not applicable");
  }
}

}  // namespace

std::vector<bool> check_regularity(const DescriptorModel& model, double rank_tol) {
  require_valid(model);
  std::vector<bool> out;
  out.reserve(model.F.size());
  for (std::size_t k = 0; k < model.F.size(); ++k) out.push_back(regular_at(model, k, rank_tol));
  return out;
}

KalmanState kalman_init(const DescriptorModel& model, const Vec& y0, double rank_tol) {
  require_valid(model);
  if (y0.size() != model.p) throw DimensionMismatch("y_0 has wrong dimension");
  require_regular(model, 0, rank_tol);
  const Mat& F = model.F[0];
  const Mat& H = model.H[0];
  const Mat& R = model.R[0];
  KalmanState st;
  st.k = 0;
  st.P = spd_inverse(F.transpose() * model.S[0] * F + H.transpose() * R * H);
  st.x = st.P * (H.transpose() * (R * y0));
  return st;
}

KalmanState kalman_step(const KalmanState& state, const DescriptorModel& model, const Vec& y,
                        double rank_tol) {
  const Index k = state.k + 1;
  if (k > model.tau) throw DimensionMismatch("step beyond model horizon");
  if (y.size() != model.p) throw DimensionMismatch("y_" + std::to_string(k) + " has wrong dimension");
  if (state.P.rows() != model.n || state.x.size() != model.n) {
    throw DimensionMismatch("Kalman state dimensions do not match the model");
  }
  const auto ku = static_cast<std::size_t>(k);
  require_regular(model, ku, rank_tol);
  const Mat& Cprev = model.C[ku - 1];
  const Mat& F = model.F[ku];
  const Mat& H = model.H[ku];
  const Mat& R = model.R[ku];

  const Mat A = spd_inverse(spd_inverse(model.S[ku]) + Cprev * state.P * Cprev.transpose());
  KalmanState next;
  next.k = k;
  next.P = spd_inverse(F.transpose() * A * F + H.transpose() * R * H);
  next.x = next.P * (F.transpose() * (A * (Cprev * state.x)) + H.transpose() * (R * y));
  return next;
}

}  // namespace descfilt
