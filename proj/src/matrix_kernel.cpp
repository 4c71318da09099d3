#include "descfilt/matrix_kernel.hpp"

#include "descfilt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace descfilt {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidMatrix: return "InvalidMatrix";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InconsistentDynamics: return "InconsistentDynamics";
    case ErrorKind::NumericalBreakdown: return "NumericalBreakdown";
    case ErrorKind::InconsistentData: return "InconsistentData";
    case ErrorKind::OutsideObservable: return "OutsideObservable";
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

namespace {

struct Decomposition {
  Eigen::JacobiSVD<Mat> svd;
  Index rank = 0;
};

Decomposition decompose(const Mat& m, double rank_tol, bool factor_scale = false) {
  require_finite(m);
  if (rank_tol < 0.0) {
    throw InvalidMatrix("rank_tol must be nonnegative");
  }
  Decomposition d{Eigen::JacobiSVD<Mat>(m, Eigen::ComputeFullU | Eigen::ComputeFullV)};
  const Vec& sv = d.svd.singularValues();
  if (sv.size() == 0) return d;
  const double cutoff = factor_scale ? factor_cutoff(sv(0), m.cols(), rank_tol)
                                     : svd_cutoff(sv(0), m.rows(), m.cols(), rank_tol);
  // Singular values are sorted in decreasing order.
  while (d.rank < sv.size() && sv(d.rank) > cutoff) ++d.rank;
  return d;
}

void require_square(const Mat& m, std::string_view what) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatch(std::string(what) + " must be square, got " +
                            std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

}  // namespace

double svd_cutoff(double sigma_max, Index rows, Index cols, double rank_tol) {
  if (rank_tol > 0.0) return rank_tol * sigma_max;
  return std::numeric_limits<double>::epsilon() *
         static_cast<double>(std::max(rows, cols)) * sigma_max;
}

double factor_cutoff(double sigma_max, Index gram_dim, double rank_tol) {
  return std::sqrt(svd_cutoff(sigma_max * sigma_max, gram_dim, gram_dim, rank_tol));
}

void require_finite(const Mat& m, std::string_view what) {
  if (!m.allFinite()) {
    throw InvalidMatrix(std::string(what) + " has non-finite entries");
  }
}

namespace {

Mat pinv_from(const Decomposition& d) {
  const Index r = d.rank;
  const Mat& u = d.svd.matrixU();
  const Mat& v = d.svd.matrixV();
  const Vec inv_sv = d.svd.singularValues().head(r).cwiseInverse();
  return v.leftCols(r) * inv_sv.asDiagonal() * u.leftCols(r).transpose();
}

}  // namespace

Mat pinv(const Mat& m, double rank_tol) { return pinv_from(decompose(m, rank_tol)); }

Mat factor_pinv(const Mat& a, double rank_tol) {
  return pinv_from(decompose(a, rank_tol, true));
}

Mat range_projector(const Mat& m, double rank_tol) {
  require_square(m, "range_projector input");
  const auto d = decompose(m, rank_tol);
  // For symmetric M, M+ M = V_r V_r'.
  const Mat vr = d.svd.matrixV().leftCols(d.rank);
  return vr * vr.transpose();
}

Index numerical_rank(const Mat& m, double rank_tol) {
  return decompose(m, rank_tol).rank;
}

Index sym_rank(const Mat& m, double rank_tol) {
  require_square(m, "sym_rank input");
  return numerical_rank(m, rank_tol);
}

Mat range_basis(const Mat& m, double rank_tol) {
  const auto d = decompose(m, rank_tol);
  return d.svd.matrixU().leftCols(d.rank);
}

Symmetrized symmetrize(const Mat& m, double warn_tol) {
  require_square(m, "symmetrize input");
  Symmetrized out;
  out.mat = 0.5 * (m + m.transpose());
  out.asymmetry = (m - m.transpose()).norm();
  out.exceeded = out.asymmetry > warn_tol * std::max(1.0, m.norm());
  return out;
}

double min_eigenvalue(const Mat& sym) {
  require_square(sym, "eigenvalue input");
  if (sym.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double max_eigenvalue(const Mat& sym) {
  require_square(sym, "eigenvalue input");
  if (sym.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

bool is_symmetric(const Mat& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.transpose()).norm() <= tol * std::max(1.0, m.norm());
}

bool is_psd(const Mat& sym, double tol) {
  if (!sym.allFinite() || !is_symmetric(sym)) return false;
  if (sym.size() == 0) return true;
  Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return ev(0) >= -tol * std::max(1.0, ev(ev.size() - 1));
}

bool is_positive_definite(const Mat& sym) {
  if (!sym.allFinite() || !is_symmetric(sym)) return false;
  if (sym.size() == 0) return true;
  return min_eigenvalue(sym) > 0.0;
}

Mat chol_upper(const Mat& m) {
  require_square(m, "Cholesky input");
  Eigen::LLT<Mat> llt(m);
  if (llt.info() != Eigen::Success) {
    throw SingularMatrix("matrix is not positive definite");
  }
  return llt.matrixU();
}

Mat spd_inverse(const Mat& m) {
  require_square(m, "inverse input");
  require_finite(m);
  Eigen::LLT<Mat> llt(m);
  if (llt.info() != Eigen::Success) {
    throw SingularMatrix("matrix is not positive definite");
  }
  Mat inv = llt.solve(Mat::Identity(m.rows(), m.cols()));
  return 0.5 * (inv + inv.transpose());
}

}  // namespace descfilt
