#pragma once

#include "fohs/stability.hpp"
#include "fohs/systems.hpp"

#include <array>
#include <vector>

namespace fohs::scenarios {

/// Two-subsystem switching benchmark (printed 2x2 pair).
SwitchingSystem example3();

/// Per-alpha stability evaluation of the benchmark pair: the determinant-form
/// phase condition is applied to the pair in both its fractional
/// representation and its sector-transformed integer-order representation;
/// the verdict is Stable only when both sweeps pass.
struct Example3Verdict {
  double alpha = 0.0;
  PhaseSweepReport fractional;
  PhaseSweepReport transformed;
  Verdict verdict = Verdict::Inconclusive;
};
Example3Verdict example3_verdict(double alpha, const FrequencyGrid& grid = {});

/// Networked-platform gain-scheduled family: 13 (delay, gain) pairs.
inline constexpr std::array<double, 13> kNetworkDelays = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6,
                                                          0.7, 0.8, 0.9, 1.0, 1.1, 1.2};
inline constexpr std::array<double, 13> kScheduledGains = {1.6, 1.35, 1.3, 1.15, 1.0, 0.9, 0.8,
                                                           0.7, 0.65, 0.6, 0.55, 0.5, 0.45};

/// Closed-loop pseudo-polynomial of subsystem j (1-based) at base order 0.1,
/// degree pade_order + 21, normalized monic. Constants are recomputed from
/// the primitive plant/controller parameters; `rounded` switches to the
/// printed rounded values for regression.
PseudoPolynomial smartwheel_polynomial(int j, int pade_order, bool rounded = false);

/// All 13 subsystems realized in companion form at base order 0.1.
SwitchingSystem smartwheel_family(int pade_order, bool rounded = false);

struct MultiControllerParams {
  double K1 = 1.0, tau1 = 0.2, kp1 = 0.1, ki1 = 2.0, alpha1 = 0.5;
  double K2 = 2.0, tau2 = 1.0, kp2 = 0.3, ki2 = 1.5, alpha2 = 0.5;
  double hysteresis = 0.05;
  ReferenceSignal reference{ReferenceSignal::Kind::Step, 1.0, 0.0};
};

/// Two fractional PI loops under hysteresis switching; each closed loop
/// (a_i s^alpha_i + b_i) / (s^(alpha_i+1) + (tau_i + a_i) s^alpha_i + b_i)
/// with a_i = K_i kp_i, b_i = K_i ki_i is realized at the common base order.
HybridScenario multicontroller(const MultiControllerParams& params = {});

/// First-order reset element loop, 3 states, base order 1 (printed matrices).
ResetClosedLoop fore_loop(double b);

/// Zero-crossing-reset integrator loop: fore_loop with b = 0.
ResetClosedLoop clegg_loop();

/// Fractional reset integrator loop, 5 states at base order 1/2.
ResetClosedLoop fci_loop();

/// Printed rational transfer family for the fore/clegg loops:
/// (s^2 + 0.2 s + 0.8 beta) / (s^3 + (b + 0.2) s^2 + (1 + 0.2 b) s + 1).
RationalTF fore_printed_family(double beta, double b);

/// Servomotor under a fractional proportional-reset-integrator, augmented to
/// 7 states at base order 1/4. `rounded` reproduces the printed matrices
/// verbatim (including their input column) instead of recomputing from the
/// primitive gains.
ResetClosedLoop servo_fpci(bool rounded = false);

/// The underlying 2-state mixed-order loop of servo_fpci, before augmentation.
StateSpaceBlock servo_plant();

}  // namespace fohs::scenarios
