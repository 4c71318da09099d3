#pragma once

// Built-in test problem: a planar linear ODE p_{k+1} = A p_k + v_k with an
// unknown, unbounded drive v_k, observed through its first coordinate.
// Cast in descriptor form with state x_k = (p_k, v_k).
//
//   A = [[1/10, -1/5], [7/25, -1/10]],  v_k = (-k sin k / 10, k sin k / 10),
//   p_0 = (1/10, 1/10),  y_k = p_k[0] + 2 sin k / (k + 1),
//   S_k = E,  R_k = k / (k + 1).
//
// R_0 = 0 would break positive definiteness, so R_0 is replaced by a
// machine-level positive value (`kR0Substitute` unless overridden).

#include "descfilt/model.hpp"

#include <limits>

namespace descfilt::reference {

inline constexpr double kR0Substitute = std::numeric_limits<double>::epsilon();
inline constexpr Index kSimulationHorizon = 50;
inline constexpr Index kFigureHorizon = 40;

Mat drift_matrix();

/// Unknown drive v_k.
Vec drive(Index k);

/// Measurement noise g_k.
double noise(Index k);

DescriptorModel oscillator_model(Index tau, double r0 = kR0Substitute);

/// f_0 = p_0, f_k = 0 for k >= 1; w_k carries v_k in its last two slots.
InputSequences oscillator_inputs(Index tau);

}  // namespace descfilt::reference
