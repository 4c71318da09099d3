#pragma once

#include "descfilt/matrix_kernel.hpp"

#include <string>
#include <vector>

namespace descfilt {

using VecSeq = std::vector<Vec>;
using MatSeq = std::vector<Mat>;

/// Linear discrete-time descriptor system over steps k = 0..tau:
///
///   F_0 x_0 = f_0,   F_{k+1} x_{k+1} - C_k x_k = f_{k+1},   y_k = H_k x_k + g_k,
///
/// with the uncertainty ellipsoid  sum_k <S_k f_k, f_k> + <R_k g_k, g_k> <= 1.
/// F, H, S, R carry tau+1 entries; C carries tau entries.
struct DescriptorModel {
  Index n = 0;    // state dimension
  Index m = 0;    // equation dimension
  Index p = 0;    // output dimension
  Index tau = 0;  // horizon
  MatSeq F, C, H, S, R;

  /// Same model restricted to steps 0..horizon.
  DescriptorModel prefix(Index horizon) const;
};

/// Every entry names one offending sequence element; empty means valid.
struct ValidationReport {
  std::vector<std::string> issues;
  bool ok() const { return issues.empty(); }
  std::string summary() const;
};

ValidationReport validate(const DescriptorModel& model);

/// Throws DimensionMismatch carrying the validation summary when invalid.
void require_valid(const DescriptorModel& model);

/// Input, noise and free-component sequences driving `simulate`.
struct InputSequences {
  VecSeq f;  // m-vectors f_0..f_tau
  VecSeq g;  // p-vectors g_0..g_tau
  VecSeq w;  // n-vectors w_0..w_tau
};

struct Trajectory {
  VecSeq states;   // x_0..x_tau
  VecSeq inputs;   // f_0..f_tau
  VecSeq noises;   // g_0..g_tau
  VecSeq outputs;  // y_0..y_tau
};

/// Forward solution of the state equation. The free component w_k selects
/// one solution when F_k has a nontrivial kernel:
///   x_k = F_k+ (C_{k-1} x_{k-1} + f_k) + (E - F_k+ F_k) w_k.
/// Throws InconsistentDynamics when the right-hand side leaves range(F_k).
Trajectory simulate(const DescriptorModel& model, const VecSeq& f, const VecSeq& g,
                    const VecSeq& w, double rank_tol = 0.0);

Trajectory simulate(const DescriptorModel& model, const InputSequences& inputs,
                    double rank_tol = 0.0);

/// Zero f, g and w over the model horizon.
InputSequences zero_inputs(const DescriptorModel& model);

/// sum_{i=0..tau} <S_i f_i, f_i> + <R_i g_i, g_i>.
double budget(const DescriptorModel& model, const VecSeq& f, const VecSeq& g);

/// Descriptor form of p_{k+1} = A_k p_k + v_k with unknown v_k: the state is
/// x_k = (p_k, v_k), F_k = (E, 0), C_k = (A_k, E), H_k = (Htilde_k, 0).
/// A has tau entries, Htilde/S/R have tau+1.
DescriptorModel augment_ode(const MatSeq& A, const MatSeq& Htilde, const MatSeq& S,
                            const MatSeq& R);

/// `count` copies of `m`.
MatSeq constant_sequence(const Mat& m, Index count);

VecSeq zero_sequence(Index dim, Index count);

}  // namespace descfilt
