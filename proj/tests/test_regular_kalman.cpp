#include "descfilt/errors.hpp"
#include "descfilt/minimax_filter.hpp"
#include "descfilt/reference_example.hpp"
#include "descfilt/regular_kalman.hpp"
#include "support/random_models.hpp"

#include <doctest.h>

#include <algorithm>

using namespace descfilt;
using namespace descfilt::testing;

namespace {

Mat scalar(double v) { return Mat::Constant(1, 1, v); }
Vec vec1(double v) { return Vec::Constant(1, v); }

DescriptorModel scalar_chain(Index tau) {
  return {1, 1, 1, tau,
          constant_sequence(scalar(1), tau + 1), constant_sequence(scalar(1), tau),
          constant_sequence(scalar(1), tau + 1), constant_sequence(scalar(1), tau + 1),
          constant_sequence(scalar(1), tau + 1)};
}

}  // namespace

TEST_CASE("Kalman recursion on the scalar chain") {
  const auto mdl = scalar_chain(1);
  const auto s0 = kalman_init(mdl, vec1(1.0));
  CHECK(s0.P(0, 0) == doctest::Approx(0.5));
  CHECK(s0.x(0) == doctest::Approx(0.5));
  // A_0 = (1 + 0.5)^-1 = 2/3, P_{1|1} = (2/3 + 1)^-1 = 3/5
  const auto s1 = kalman_step(s0, mdl, vec1(1.0));
  CHECK(s1.k == 1);
  CHECK(s1.P(0, 0) == doctest::Approx(0.6));
  CHECK(s1.x(0) == doctest::Approx(0.8));
}

TEST_CASE("regularity check") {
  SUBCASE("oscillator example is not regular") {
    const auto mdl = reference::oscillator_model(5, reference::kR0Substitute);
    const auto reg = check_regularity(mdl);
    CHECK(std::none_of(reg.begin(), reg.end(), [](bool b) { return b; }));
    CHECK_THROWS_AS(kalman_init(mdl, Vec::Zero(1)), SingularMatrix);
  }
  SUBCASE("F = 0 with full column rank H is regular") {
    auto mdl = scalar_chain(2);
    mdl.F = constant_sequence(scalar(0.0), 3);
    const auto reg = check_regularity(mdl);
    CHECK(std::all_of(reg.begin(), reg.end(), [](bool b) { return b; }));
    CHECK_NOTHROW(kalman_init(mdl, vec1(1.0)));
  }
  SUBCASE("a single singular step is flagged at that step") {
    auto mdl = scalar_chain(2);
    mdl.F[2] = scalar(0.0);
    mdl.H[2] = scalar(0.0);
    const auto reg = check_regularity(mdl);
    CHECK(reg == std::vector<bool>{true, true, false});
    auto st = kalman_step(kalman_init(mdl, vec1(1.0)), mdl, vec1(1.0));
    CHECK_THROWS_AS(kalman_step(st, mdl, vec1(1.0)), SingularMatrix);
  }
}

TEST_CASE("Kalman state dimension errors") {
  const auto mdl = scalar_chain(1);
  CHECK_THROWS_AS(kalman_init(mdl, Vec::Zero(2)), DimensionMismatch);
  auto st = kalman_init(mdl, vec1(1.0));
  st = kalman_step(st, mdl, vec1(1.0));
  CHECK_THROWS_AS(kalman_step(st, mdl, vec1(1.0)), DimensionMismatch);
}

TEST_CASE("Kalman and minimax filter agree on random regular models") {
  Rng rng(4242);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = uniform_index(rng, 1, 4);
    const auto mdl = random_regular_model(rng, n, 20);
    const auto ys = random_measurements(rng, mdl);
    auto ks = kalman_init(mdl, ys[0]);
    auto fs = init(mdl, ys[0]);
    for (Index k = 0; k <= mdl.tau; ++k) {
      if (k > 0) {
        ks = kalman_step(ks, mdl, ys[static_cast<std::size_t>(k)]);
        fs = step(fs, mdl, ys[static_cast<std::size_t>(k)]);
      }
      const auto rep = estimate(fs);
      CHECK(rep.observable_rank == n);
      CHECK((rep.xhat - ks.x).norm() <= 1e-8 * std::max(1.0, ks.x.norm()));
      CHECK((pinv(fs.P) - ks.P).norm() <= 1e-8 * std::max(1.0, ks.P.norm()));
    }
  }
}
