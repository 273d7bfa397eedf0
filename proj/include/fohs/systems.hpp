#pragma once

#include "fohs/linalg.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fohs {

/// Commensurate-order linear state-space system D^alpha x = A x + B u, y = C x + D u.
struct FractionalLTI {
  double alpha = 1.0;  // base order, in (0, 2)
  RealMatrix A;
  RealMatrix B;
  RealMatrix C;
  RealMatrix D;

  Eigen::Index order() const { return A.rows(); }
  void validate() const;
};

/// Monic pseudo-polynomial d(s) = sum_k coeffs[k] s^(k*base_order).
struct PseudoPolynomial {
  double base_order = 1.0;  // in (0, 1]
  std::vector<double> coeffs;  // ascending, coeffs.back() == 1

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  void validate() const;
};

/// Finite family of subsystems sharing one base order and dimension.
struct SwitchingSystem {
  struct Subsystem {
    std::string label;
    RealMatrix A;
  };

  double alpha = 1.0;
  std::vector<Subsystem> subsystems;

  Eigen::Index dimension() const { return subsystems.empty() ? 0 : subsystems.front().A.rows(); }
  void validate() const;
};

/// Closed-loop reset control system. The state is partitioned as
/// (plant, linear controller, reset controller); the last `n_reset_states`
/// coordinates are zeroed by the jump map.
struct ResetClosedLoop {
  double alpha = 1.0;
  RealMatrix A_cl;
  Eigen::VectorXd B_cl;
  Eigen::RowVectorXd C_cl;
  int n_plant = 0;
  int n_controller = 0;
  int n_reset_controller = 0;
  int n_reset_states = 0;
  Eigen::RowVectorXd C_p;  // plant output row, width n_plant

  Eigen::Index order() const { return A_cl.rows(); }
  /// Jump map: identity on the first n - n_reset_states coordinates, zero on the rest.
  RealMatrix reset_map() const;
  void validate() const;
};

/// Rational transfer function, coefficients ascending in s, no trailing zeros.
struct RationalTF {
  std::vector<double> num;
  std::vector<double> den;

  Complex eval(Complex s) const;
  std::vector<Complex> poles() const;
  void validate() const;
};

/// Reference input descriptor: r(t) = amplitude (step) or amplitude*sin(frequency*t).
struct ReferenceSignal {
  enum class Kind { Step, Sinusoid };
  Kind kind = Kind::Step;
  double amplitude = 1.0;
  double frequency = 0.0;  // rad/s, sinusoid only

  double eval(double t) const;
  /// Steady-state fractional derivative of order alpha of the reference.
  double frac_derivative(double alpha, double t) const;
};

/// Two-mode (or more) switched scenario with hysteresis switching driven by
/// the tracking error against a reference.
struct HybridScenario {
  struct Mode {
    std::string label;
    RealMatrix A;
    Eigen::VectorXd B;
    Eigen::RowVectorXd C;
    // input u(t) = forcing_frac * D^alpha r(t) + forcing_prop * r(t)
    double forcing_prop = 0.0;
    double forcing_frac = 0.0;
  };

  double alpha = 1.0;
  std::vector<Mode> modes;
  ReferenceSignal reference;
  double hysteresis = 0.05;

  std::function<bool(const Eigen::VectorXd&, int, double)> flow_predicate;
  std::function<bool(const Eigen::VectorXd&, int, double)> jump_predicate;
  std::function<std::pair<Eigen::VectorXd, int>(const Eigen::VectorXd&, int)> jump_map;

  int mode_count() const { return static_cast<int>(modes.size()); }
  /// Subsystem family view (labels and flow matrices only).
  SwitchingSystem family() const;
  void validate() const;
};

/// Reduced fraction num/den.
struct Fraction {
  int num = 0;
  int den = 1;
};

/// Nearest reduced fraction with denominator at most max_den.
Fraction rationalize_order(double alpha, int max_den = 16);

/// Companion realization of a monic pseudo-polynomial: shift rows above a
/// bottom row of negated coefficients, B = e_n, C = e_1^T, D = 0.
FractionalLTI realize_commensurate(const PseudoPolynomial& poly);

/// Diagonal Pade approximant of exp(-T s) of order m (1 <= m <= 10).
RationalTF pade_delay(double T, int m);

/// SISO state-space block.
struct StateSpaceBlock {
  RealMatrix A;
  Eigen::VectorXd B;
  Eigen::RowVectorXd C;
};

/// Reset controller block with feedthrough; the last n_reset_states of its
/// states are zeroed on a jump.
struct ResetControllerBlock {
  RealMatrix A;
  Eigen::VectorXd B;
  Eigen::RowVectorXd C;
  double D = 0.0;
  int n_reset_states = 0;
};

/// Closed-loop assembly of plant, optional series linear controller and reset
/// controller under unity feedback e = r - y.
ResetClosedLoop assemble_reset_loop(const StateSpaceBlock& plant,
                                    const std::optional<StateSpaceBlock>& controller,
                                    const ResetControllerBlock& reset_ctrl,
                                    double alpha);

/// Chain expansion of a mixed-order system to a common base order 1/base_den.
/// State i of order nums[i]/base_den becomes a chain of nums[i] sub-states;
/// the chained shift rows carry identity entries, the final row of each chain
/// carries the original dynamics evaluated at the chain heads.
struct MixedOrderAugmentation {
  RealMatrix A;
  RealMatrix B;
  RealMatrix C;
  std::vector<int> heads;  // augmented index of each original state
};
MixedOrderAugmentation augment_mixed(const RealMatrix& A, const RealMatrix& B,
                                     const RealMatrix& C, const std::vector<int>& nums,
                                     int base_den);

/// Uniform-order convenience wrapper: every state of a base-alpha system with
/// alpha = u/v (reduced) is expanded into a chain of u * (base_den * alpha / u)...
/// Concretely: target base order 1/base_den, chain length alpha*base_den per state.
/// base_den = 0 picks the denominator of alpha itself.
FractionalLTI augment_base_order(const FractionalLTI& sys, int base_den = 0);

}  // namespace fohs
