#pragma once

// Descriptor Kalman recursion for regular models, rank [F_k; H_k] = n at
// every step. Uses true inverses throughout so it stays an independent
// check on the pseudoinverse-based minimax filter:
//
//   A_{k-1}^{-1} = S_k^{-1} + C_{k-1} P_{k-1|k-1} C'_{k-1}
//   P_{k|k}^{-1} = F'_k A_{k-1} F_k + H'_k R_k H_k
//   x_{k|k}      = P_{k|k} (F'_k A_{k-1} C_{k-1} x_{k-1|k-1} + H'_k R_k y_k)

#include "descfilt/matrix_kernel.hpp"
#include "descfilt/model.hpp"

#include <vector>

namespace descfilt {

struct KalmanState {
  Index k = 0;
  Mat P;  // P_{k|k}
  Vec x;  // x_{k|k}
};

/// Per step k = 0..tau: whether [F_k; H_k] has numerical rank n.
std::vector<bool> check_regularity(const DescriptorModel& model, double rank_tol = 0.0);

KalmanState kalman_init(const DescriptorModel& model, const Vec& y0, double rank_tol = 0.0);

KalmanState kalman_step(const KalmanState& state, const DescriptorModel& model, const Vec& y,
                        double rank_tol = 0.0);

}  // namespace descfilt
