#pragma once

// Non-recursive solution of the estimation problem. The whole trajectory
// x = (x_0..x_tau) is stacked and the quadratic functional
//
//   I(x) = <Q1 L x, L x> + <Q2 (y - H x), y - H x>
//
// is minimized directly, L being block-bidiagonal (F_k on the diagonal,
// -C_k below it) and H block-diagonal. Used as the ground truth for the
// recursive filter.

#include "descfilt/matrix_kernel.hpp"
#include "descfilt/model.hpp"

namespace descfilt {

struct BatchProblem {
  Index n = 0, m = 0, p = 0, tau = 0;
  Mat L;   // (tau+1)m x (tau+1)n
  Mat H;   // (tau+1)p x (tau+1)n
  Mat Q1;  // diag(S_0..S_tau)
  Mat Q2;  // diag(R_0..R_tau)
  Vec y;   // (tau+1)p
};

struct BatchSolution {
  Vec xstack;         // minimum-norm minimizer
  double min_value = 0.0;
  Mat normal_matrix;  // L'Q1L + H'Q2H
  Vec rhs;            // H'Q2 y

  /// Block k of the stacked minimizer.
  Vec block(Index k, Index n) const { return xstack.segment(k * n, n); }
};

BatchProblem assemble(const DescriptorModel& model, const VecSeq& ys);

/// I(x).
double functional(const BatchProblem& problem, const Vec& x);

/// I_1(x) = <Q1 L x, L x> + <Q2 H x, H x>, the functional at zero data.
double functional_homogeneous(const BatchProblem& problem, const Vec& x);

BatchSolution solve(const BatchProblem& problem, double rank_tol = 0.0);

/// min over x_0..x_{tau-1} of I with the last block pinned to `last`.
double value_function(const BatchProblem& problem, const Vec& last, double rank_tol = 0.0);

/// |I(xhat - x) - I_1(x) - I(xhat)|.
double decomposition_check(const BatchProblem& problem, const BatchSolution& solution,
                           const Vec& x);

}  // namespace descfilt
