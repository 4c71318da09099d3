#include "descfilt/reference_example.hpp"

#include <cmath>

namespace descfilt::reference {

Mat drift_matrix() {
  Mat A(2, 2);
  A << 0.1, -0.2, 0.28, -0.1;
  return A;
}

Vec drive(Index k) {
  const double kd = static_cast<double>(k);
  const double s = kd * std::sin(kd) / 10.0;
  return Vec{{-s, s}};
}

double noise(Index k) {
  const double kd = static_cast<double>(k);
  return 2.0 * std::sin(kd) / (kd + 1.0);
}

DescriptorModel oscillator_model(Index tau, double r0) {
  Mat Ht(1, 2);
  Ht << 1.0, 0.0;
  MatSeq R;
  R.reserve(static_cast<std::size_t>(tau + 1));
  for (Index k = 0; k <= tau; ++k) {
    const double kd = static_cast<double>(k);
    R.push_back(Mat::Constant(1, 1, k == 0 ? r0 : kd / (kd + 1.0)));
  }
  return augment_ode(constant_sequence(drift_matrix(), tau), constant_sequence(Ht, tau + 1),
                     constant_sequence(Mat::Identity(2, 2), tau + 1), R);
}

InputSequences oscillator_inputs(Index tau) {
  InputSequences in;
  for (Index k = 0; k <= tau; ++k) {
    in.f.push_back(k == 0 ? Vec{{0.1, 0.1}} : Vec(Vec::Zero(2)));
    in.g.push_back(Vec::Constant(1, noise(k)));
    Vec w = Vec::Zero(4);
    w.tail(2) = drive(k);
    in.w.push_back(std::move(w));
  }
  return in;
}

}  // namespace descfilt::reference
