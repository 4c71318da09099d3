#pragma once

// Dense linear-algebra primitives shared by the estimators. Every rank
// decision in the library goes through `svd_cutoff`, so a single rank_tol
// value produces mutually consistent pseudoinverses, projectors and ranks.

#include <Eigen/Dense>

#include <string_view>

namespace descfilt {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Index = Eigen::Index;

/// Result of `symmetrize`: the symmetric part plus the asymmetry that was
/// removed, so callers can warn on drift.
struct Symmetrized {
  Mat mat;
  double asymmetry = 0.0;  // Frobenius norm of M - M'
  bool exceeded = false;   // asymmetry above the warn threshold
};

/// Singular-value cutoff. A positive rank_tol is relative to the largest
/// singular value; rank_tol == 0 selects eps * max(rows, cols) * sigma_max.
double svd_cutoff(double sigma_max, Index rows, Index cols, double rank_tol);

/// Cutoff on the singular values of a factor A that reproduces, on A'A,
/// the decision svd_cutoff would make for a gram_dim x gram_dim Gram matrix:
/// s_i is kept iff s_i^2 > svd_cutoff(s_max^2, gram_dim, gram_dim, rank_tol).
double factor_cutoff(double sigma_max, Index gram_dim, double rank_tol);

/// Throws InvalidMatrix if any entry is NaN or infinite.
void require_finite(const Mat& m, std::string_view what = "matrix");

/// Moore-Penrose pseudoinverse via full SVD.
Mat pinv(const Mat& m, double rank_tol = 0.0);

/// Pseudoinverse of a factor A with ranks decided on the scale of A'A
/// (see factor_cutoff). (A'A)+ A' == factor_pinv(A) in exact arithmetic.
Mat factor_pinv(const Mat& a, double rank_tol = 0.0);

/// Orthogonal projector M+ M onto the range of a square symmetric matrix.
Mat range_projector(const Mat& m, double rank_tol = 0.0);

/// Numerical rank of a (symmetric or general) matrix under the shared cutoff.
Index sym_rank(const Mat& m, double rank_tol = 0.0);

/// Numerical rank of an arbitrary rectangular matrix.
Index numerical_rank(const Mat& m, double rank_tol = 0.0);

/// Orthonormal basis (as columns) of the range of m.
Mat range_basis(const Mat& m, double rank_tol = 0.0);

Symmetrized symmetrize(const Mat& m, double warn_tol = 1e-8);

double min_eigenvalue(const Mat& sym);
double max_eigenvalue(const Mat& sym);

bool is_symmetric(const Mat& m, double tol = 1e-10);

/// Smallest eigenvalue >= -tol * max(1, largest eigenvalue).
bool is_psd(const Mat& sym, double tol = 1e-9);

/// Symmetric with strictly positive smallest eigenvalue.
bool is_positive_definite(const Mat& sym);

/// <M x, x>.
inline double quad(const Mat& m, const Vec& x) { return x.dot(m * x); }

/// Upper-triangular U with U'U = m (Cholesky); m must be positive definite.
Mat chol_upper(const Mat& m);

/// Inverse of a symmetric positive definite matrix; throws SingularMatrix.
Mat spd_inverse(const Mat& m);

}  // namespace descfilt
