#pragma once

// Random problem generators shared by the unit and acceptance suites.

#include "descfilt/model.hpp"

#include <random>

namespace descfilt::testing {

using Rng = std::mt19937_64;

inline Mat random_matrix(Rng& rng, Index rows, Index cols) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Mat m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = nd(rng);
  return m;
}

inline Vec random_vector(Rng& rng, Index dim) { return random_matrix(rng, dim, 1); }

/// Random rows x cols matrix of rank at most `rank`.
inline Mat random_low_rank(Rng& rng, Index rows, Index cols, Index rank) {
  return random_matrix(rng, rows, rank) * random_matrix(rng, rank, cols);
}

inline Mat random_spd(Rng& rng, Index dim) {
  const Mat g = random_matrix(rng, dim, dim);
  return g * g.transpose() / static_cast<double>(dim) + 0.2 * Mat::Identity(dim, dim);
}

inline Index uniform_index(Rng& rng, Index lo, Index hi) {
  return std::uniform_int_distribution<Index>(lo, hi)(rng);
}

/// Random model, dimensions fixed by the caller. With `rank_deficient_F`
/// some F_k are replaced by low-rank matrices so non-causal cases appear.
inline DescriptorModel random_model(Rng& rng, Index n, Index m, Index p, Index tau,
                                    bool rank_deficient_F = true) {
  DescriptorModel mdl{n, m, p, tau, {}, {}, {}, {}, {}};
  std::bernoulli_distribution coin(0.3);
  for (Index k = 0; k <= tau; ++k) {
    const Index max_rank = std::min(n, m);
    if (rank_deficient_F && max_rank > 1 && coin(rng)) {
      mdl.F.push_back(random_low_rank(rng, m, n, uniform_index(rng, 1, max_rank - 1)));
    } else {
      mdl.F.push_back(random_matrix(rng, m, n));
    }
    if (k < tau) mdl.C.push_back(random_matrix(rng, m, n));
    mdl.H.push_back(random_matrix(rng, p, n));
    mdl.S.push_back(random_spd(rng, m));
    mdl.R.push_back(random_spd(rng, p));
  }
  return mdl;
}

inline DescriptorModel random_model(Rng& rng, Index max_dim = 4, Index max_tau = 8) {
  const Index n = uniform_index(rng, 1, max_dim);
  const Index m = uniform_index(rng, 1, max_dim);
  const Index p = uniform_index(rng, 1, max_dim);
  const Index tau = uniform_index(rng, 1, max_tau);
  return random_model(rng, n, m, p, tau);
}

/// Regular model: rank [F_k; H_k] = n holds at every step because F_k
/// (m >= n) has full column rank.
inline DescriptorModel random_regular_model(Rng& rng, Index n, Index tau) {
  const Index m = uniform_index(rng, n, n + 1);
  const Index p = uniform_index(rng, 1, n);
  return random_model(rng, n, m, p, tau, false);
}

inline VecSeq random_measurements(Rng& rng, const DescriptorModel& mdl) {
  VecSeq ys;
  for (Index k = 0; k <= mdl.tau; ++k) ys.push_back(random_vector(rng, mdl.p));
  return ys;
}

/// A feasible trajectory with known (f, g): states are drawn freely and the
/// inputs are read back from the state equation, so F need not be onto.
/// The whole sample is then scaled so that budget(f, g) == target.
struct FeasibleSample {
  Trajectory traj;
  double budget = 0.0;
};

inline FeasibleSample random_feasible_trajectory(Rng& rng, const DescriptorModel& mdl,
                                                 double target_budget) {
  Trajectory t;
  for (Index k = 0; k <= mdl.tau; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    t.states.push_back(random_vector(rng, mdl.n));
    t.noises.push_back(random_vector(rng, mdl.p));
    const Vec lhs = mdl.F[ku] * t.states[ku];
    t.inputs.push_back(k == 0 ? lhs : Vec(lhs - mdl.C[ku - 1] * t.states[ku - 1]));
  }
  double b = 0.0;
  for (std::size_t k = 0; k < t.states.size(); ++k) {
    b += quad(mdl.S[k], t.inputs[k]) + quad(mdl.R[k], t.noises[k]);
  }
  const double scale = std::sqrt(target_budget / b);
  for (std::size_t k = 0; k < t.states.size(); ++k) {
    t.states[k] *= scale;
    t.inputs[k] *= scale;
    t.noises[k] *= scale;
    t.outputs.push_back(mdl.H[k] * t.states[k] + t.noises[k]);
  }
  return {std::move(t), target_budget};
}

}  // namespace descfilt::testing
