#include "descfilt/model.hpp"

#include "descfilt/errors.hpp"

#include <algorithm>
#include <sstream>

namespace descfilt {

namespace {

std::string shape(const Mat& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void check_sequence(ValidationReport& report, const MatSeq& seq, const char* name,
                    std::size_t expected_len, Index rows, Index cols) {
  if (seq.size() != expected_len) {
    report.issues.push_back(std::string(name) + " has " + std::to_string(seq.size()) +
                            " entries, expected " + std::to_string(expected_len));
  }
  for (std::size_t k = 0; k < seq.size(); ++k) {
    const Mat& m = seq[k];
    const std::string label = std::string(name) + "_" + std::to_string(k);
    if (m.rows() != rows || m.cols() != cols) {
      report.issues.push_back(label + " has shape " + shape(m) + ", expected " +
                              std::to_string(rows) + "x" + std::to_string(cols));
    } else if (!m.allFinite()) {
      report.issues.push_back(label + " has non-finite entries");
    }
  }
}

void check_weights(ValidationReport& report, const MatSeq& seq, const char* name, Index dim) {
  for (std::size_t k = 0; k < seq.size(); ++k) {
    const Mat& m = seq[k];
    if (m.rows() != dim || m.cols() != dim || !m.allFinite()) continue;
    if (!is_positive_definite(m)) {
      report.issues.push_back(std::string(name) + "_" + std::to_string(k) +
                              " not positive definite");
    }
  }
}

void check_vectors(const VecSeq& seq, const char* name, std::size_t len, Index dim) {
  if (seq.size() != len) {
    throw DimensionMismatch(std::string(name) + " sequence has " + std::to_string(seq.size()) +
                            " entries, expected " + std::to_string(len));
  }
  for (std::size_t k = 0; k < seq.size(); ++k) {
    if (seq[k].size() != dim) {
      throw DimensionMismatch(std::string(name) + "_" + std::to_string(k) + " has dimension " +
                              std::to_string(seq[k].size()) + ", expected " +
                              std::to_string(dim));
    }
  }
}

}  // namespace

DescriptorModel DescriptorModel::prefix(Index horizon) const {
  if (horizon < 0 || horizon > tau) {
    throw DimensionMismatch("prefix horizon " + std::to_string(horizon) +
                            " outside 0.." + std::to_string(tau));
  }
  const auto cut = [](const MatSeq& seq, Index len) {
    return MatSeq(seq.begin(), seq.begin() + std::min<Index>(len, seq.size()));
  };
  DescriptorModel out{n, m, p, horizon, {}, {}, {}, {}, {}};
  out.F = cut(F, horizon + 1);
  out.C = cut(C, horizon);
  out.H = cut(H, horizon + 1);
  out.S = cut(S, horizon + 1);
  out.R = cut(R, horizon + 1);
  return out;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < issues.size(); ++i) {
    if (i) os << "; ";
    os << issues[i];
  }
  return os.str();
}

ValidationReport validate(const DescriptorModel& model) {
  ValidationReport report;
  if (model.n <= 0 || model.m <= 0 || model.p <= 0) {
    report.issues.push_back("dimensions n, m, p must be positive");
  }
  if (model.tau < 0) {
    report.issues.push_back("horizon tau must be nonnegative");
    return report;
  }
  const auto steps = static_cast<std::size_t>(model.tau + 1);
  check_sequence(report, model.F, "F", steps, model.m, model.n);
  check_sequence(report, model.C, "C", steps - 1, model.m, model.n);
  check_sequence(report, model.H, "H", steps, model.p, model.n);
  check_sequence(report, model.S, "S", steps, model.m, model.m);
  check_sequence(report, model.R, "R", steps, model.p, model.p);
  check_weights(report, model.S, "S", model.m);
  check_weights(report, model.R, "R", model.p);
  return report;
}

void require_valid(const DescriptorModel& model) {
  const auto report = validate(model);
  if (!report.ok()) throw DimensionMismatch("invalid model: " + report.summary());
}

Trajectory simulate(const DescriptorModel& model, const VecSeq& f, const VecSeq& g,
                    const VecSeq& w, double rank_tol) {
  require_valid(model);
  const auto steps = static_cast<std::size_t>(model.tau + 1);
  check_vectors(f, "f", steps, model.m);
  check_vectors(g, "g", steps, model.p);
  check_vectors(w, "w", steps, model.n);

  constexpr double kResidualTol = 1e-9;
  Trajectory traj{{}, f, g, {}};
  traj.states.reserve(steps);
  traj.outputs.reserve(steps);
  const Mat eye = Mat::Identity(model.n, model.n);
  for (std::size_t k = 0; k < steps; ++k) {
    const Mat& Fk = model.F[k];
    const Vec rhs = k == 0 ? Vec(f[0]) : Vec(model.C[k - 1] * traj.states[k - 1] + f[k]);
    const Mat Fp = pinv(Fk, rank_tol);
    Vec x = Fp * rhs + (eye - Fp * Fk) * w[k];
    const double residual = (Fk * x - rhs).norm();
    if (!(residual <= kResidualTol * std::max(1.0, rhs.norm()))) {
      throw InconsistentDynamics("step " + std::to_string(k) +
                                 ": right-hand side not in range of F_" + std::to_string(k) +
                                 " (residual " + std::to_string(residual) + ")");
    }
    traj.outputs.push_back(model.H[k] * x + g[k]);
    traj.states.push_back(std::move(x));
  }
  return traj;
}

Trajectory simulate(const DescriptorModel& model, const InputSequences& inputs,
                    double rank_tol) {
  return simulate(model, inputs.f, inputs.g, inputs.w, rank_tol);
}

InputSequences zero_inputs(const DescriptorModel& model) {
  const Index steps = model.tau + 1;
  return {zero_sequence(model.m, steps), zero_sequence(model.p, steps),
          zero_sequence(model.n, steps)};
}

double budget(const DescriptorModel& model, const VecSeq& f, const VecSeq& g) {
  const auto steps = static_cast<std::size_t>(model.tau + 1);
  check_vectors(f, "f", steps, model.m);
  check_vectors(g, "g", steps, model.p);
  double total = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    total += quad(model.S[k], f[k]) + quad(model.R[k], g[k]);
  }
  return total;
}

DescriptorModel augment_ode(const MatSeq& A, const MatSeq& Htilde, const MatSeq& S,
                            const MatSeq& R) {
  if (Htilde.empty()) throw DimensionMismatch("Htilde sequence is empty");
  const Index tau = static_cast<Index>(Htilde.size()) - 1;
  const Index n = Htilde.front().cols();
  const Index p = Htilde.front().rows();
  if (static_cast<Index>(A.size()) != tau || static_cast<Index>(S.size()) != tau + 1 ||
      static_cast<Index>(R.size()) != tau + 1) {
    throw DimensionMismatch("augment_ode expects tau entries of A and tau+1 of Htilde, S, R");
  }
  DescriptorModel model{2 * n, n, p, tau, {}, {}, {}, S, R};
  const Mat eye = Mat::Identity(n, n);
  for (Index k = 0; k <= tau; ++k) {
    const Mat& Hk = Htilde[k];
    if (Hk.rows() != p || Hk.cols() != n) {
      throw DimensionMismatch("Htilde_" + std::to_string(k) + " has shape " + shape(Hk));
    }
    Mat F = Mat::Zero(n, 2 * n);
    F.leftCols(n) = eye;
    Mat H = Mat::Zero(p, 2 * n);
    H.leftCols(n) = Hk;
    model.F.push_back(std::move(F));
    model.H.push_back(std::move(H));
    if (k < tau) {
      const Mat& Ak = A[k];
      if (Ak.rows() != n || Ak.cols() != n) {
        throw DimensionMismatch("A_" + std::to_string(k) + " has shape " + shape(Ak));
      }
      Mat C(n, 2 * n);
      C << Ak, eye;
      model.C.push_back(std::move(C));
    }
  }
  for (Index k = 0; k <= tau; ++k) {
    if (S[k].rows() != n || S[k].cols() != n || R[k].rows() != p || R[k].cols() != p) {
      throw DimensionMismatch("weight shapes do not match the ODE dimensions at step " +
                              std::to_string(k));
    }
  }
  return model;
}

MatSeq constant_sequence(const Mat& m, Index count) {
  return MatSeq(static_cast<std::size_t>(std::max<Index>(count, 0)), m);
}

VecSeq zero_sequence(Index dim, Index count) {
  return VecSeq(static_cast<std::size_t>(std::max<Index>(count, 0)), Vec::Zero(dim));
}

}  // namespace descfilt
