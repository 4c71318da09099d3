#include "descfilt/batch_oracle.hpp"

#include "descfilt/errors.hpp"

#include <cmath>
#include <string>

namespace descfilt {

namespace {

Mat block_diagonal(const MatSeq& blocks, Index dim) {
  const Index count = static_cast<Index>(blocks.size());
  Mat out = Mat::Zero(count * dim, count * dim);
  for (Index k = 0; k < count; ++k) out.block(k * dim, k * dim, dim, dim) = blocks[k];
  return out;
}

// Weighted residual operator W and target t with I(x) = |W x - t|^2.
struct LeastSquares {
  Mat W;
  Vec t;
};

LeastSquares weighted_system(const BatchProblem& pb) {
  const Mat U1 = chol_upper(pb.Q1);
  const Mat U2 = chol_upper(pb.Q2);
  LeastSquares ls;
  ls.W.resize(pb.L.rows() + pb.H.rows(), pb.L.cols());
  ls.W << U1 * pb.L, U2 * pb.H;
  ls.t = Vec::Zero(ls.W.rows());
  ls.t.tail(pb.H.rows()) = U2 * pb.y;
  return ls;
}

}  // namespace

BatchProblem assemble(const DescriptorModel& model, const VecSeq& ys) {
  require_valid(model);
  const Index steps = model.tau + 1;
  if (static_cast<Index>(ys.size()) != steps) {
    throw DimensionMismatch("expected " + std::to_string(steps) + " measurements, got " +
                            std::to_string(ys.size()));
  }
  const Index n = model.n, m = model.m, p = model.p;
  BatchProblem pb{n, m, p, model.tau, Mat::Zero(steps * m, steps * n),
                  Mat::Zero(steps * p, steps * n), block_diagonal(model.S, m),
                  block_diagonal(model.R, p), Vec::Zero(steps * p)};
  for (Index k = 0; k < steps; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    pb.L.block(k * m, k * n, m, n) = model.F[ku];
    if (k > 0) pb.L.block(k * m, (k - 1) * n, m, n) = -model.C[ku - 1];
    pb.H.block(k * p, k * n, p, n) = model.H[ku];
    if (ys[ku].size() != p) {
      throw DimensionMismatch("y_" + std::to_string(k) + " has dimension " +
                              std::to_string(ys[ku].size()) + ", expected " + std::to_string(p));
    }
    pb.y.segment(k * p, p) = ys[ku];
  }
  return pb;
}

double functional(const BatchProblem& pb, const Vec& x) {
  const Vec Lx = pb.L * x;
  const Vec e = pb.y - pb.H * x;
  return quad(pb.Q1, Lx) + quad(pb.Q2, e);
}

double functional_homogeneous(const BatchProblem& pb, const Vec& x) {
  const Vec Lx = pb.L * x;
  const Vec Hx = pb.H * x;
  return quad(pb.Q1, Lx) + quad(pb.Q2, Hx);
}

BatchSolution solve(const BatchProblem& pb, double rank_tol) {
  BatchSolution sol;
  sol.normal_matrix = pb.L.transpose() * pb.Q1 * pb.L + pb.H.transpose() * pb.Q2 * pb.H;
  sol.normal_matrix = 0.5 * (sol.normal_matrix + sol.normal_matrix.transpose());
  sol.rhs = pb.H.transpose() * (pb.Q2 * pb.y);
  // W+ t equals (W'W)+ W't, the minimum-norm minimizer, without squaring the
  // condition number; ranks are still decided on the scale of W'W.
  const LeastSquares ls = weighted_system(pb);
  sol.xstack = factor_pinv(ls.W, rank_tol) * ls.t;
  sol.min_value = functional(pb, sol.xstack);
  if (!sol.xstack.allFinite() || !std::isfinite(sol.min_value)) {
    throw NumericalBreakdown("batch solve produced non-finite values");
  }
  return sol;
}

double value_function(const BatchProblem& pb, const Vec& last, double rank_tol) {
  if (last.size() != pb.n) {
    throw DimensionMismatch("pinned state has dimension " + std::to_string(last.size()) +
                            ", expected " + std::to_string(pb.n));
  }
  const LeastSquares ls = weighted_system(pb);
  const Index free_cols = pb.tau * pb.n;
  const Vec v = ls.W.rightCols(pb.n) * last - ls.t;
  if (free_cols == 0) return v.squaredNorm();
  const Mat Wz = ls.W.leftCols(free_cols);
  const Vec z = factor_pinv(Wz, rank_tol) * v;
  return (v - Wz * z).squaredNorm();
}

double decomposition_check(const BatchProblem& pb, const BatchSolution& sol, const Vec& x) {
  if (x.size() != sol.xstack.size()) {
    throw DimensionMismatch("trajectory vector has wrong dimension");
  }
  return std::abs(functional(pb, sol.xstack - x) - functional_homogeneous(pb, x) -
                  functional(pb, sol.xstack));
}

}  // namespace descfilt
