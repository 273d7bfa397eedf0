#pragma once

#include "fohs/systems.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

namespace fohs {

struct SimConfig {
  double h = 1e-3;        // step, seconds
  double horizon = 20.0;  // seconds
  long memory = 4000;     // history window, samples; <= 0 means unbounded
  enum class Scheme { Explicit, Implicit };
  Scheme scheme = Scheme::Explicit;
  enum class ResetMemoryPolicy { Clear, Retain };
  ResetMemoryPolicy reset_memory = ResetMemoryPolicy::Clear;

  bool unbounded() const { return memory <= 0; }
  void validate() const;
};

struct Event {
  enum class Kind { Switch, Reset };
  double time = 0.0;
  Kind kind = Kind::Reset;
  Eigen::VectorXd pre_state;
  Eigen::VectorXd post_state;
  int mode_before = 1;
  int mode_after = 1;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<double> outputs;
  std::vector<int> modes;
  std::vector<Event> events;
  bool diverged = false;
};

/// Binomial weights c_0 = 1, c_j = (1 - (1+alpha)/j) c_{j-1}, j = 1..n.
std::vector<double> gl_weights(double alpha, std::size_t n);

/// One-parameter Mittag-Leffler function E_alpha(z) by truncated series,
/// summed until the term magnitude falls below tol. |z| <= 20; the partial
/// sums are monitored for catastrophic cancellation.
double mittag_leffler(double alpha, double z, double tol = 1e-12);

using Signal = std::function<double(double)>;

/// Fractional-order history integrator with deviation-form initialization
/// (weights act on x - x0, so equilibria are exact and the order-1 explicit
/// scheme is forward Euler).
Trajectory simulate_fractional_lti(const FractionalLTI& sys, const Signal& u,
                                   const Eigen::VectorXd& x0, const SimConfig& cfg);

/// Flow of the closed reset loop with input r, jump x+ = A_R x when the
/// tracking error r - C_cl x crosses zero with (I - A_R) x != 0. Crossings
/// are located by linear interpolation inside one step; at most one event
/// fires per step.
Trajectory simulate_reset(const ResetClosedLoop& rcl, const ReferenceSignal& r,
                          const SimConfig& cfg);

/// Hysteresis-switched flow of a two-mode scenario; the jump toggles the mode
/// and never alters the continuous state.
Trajectory simulate_switched(const HybridScenario& scenario, const SimConfig& cfg);

struct StepMetrics {
  double overshoot = 0.0;  // fraction of the reference
  std::optional<double> settling_time;      // last exit from the +-2% band
  std::optional<double> steady_state_error; // fraction, absent when diverging
};

StepMetrics metrics(const Trajectory& traj, double reference);

}  // namespace fohs
