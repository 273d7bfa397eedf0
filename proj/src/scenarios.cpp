#include "fohs/scenarios.hpp"

#include <cmath>

namespace fohs::scenarios {

namespace {

// gain-scheduled networked plant and controller primitives
constexpr double kPlantGain = 0.1484;
constexpr double kPlantTimeConstant = 0.045;
constexpr double kFixedDelay = 0.592;
constexpr double kCtrlProportional = 2.1586;
constexpr double kCtrlIntegral = 5.9853;

// servomotor and its reset PI gains
constexpr double kServoGain = 0.93;
constexpr double kServoTimeConstant = 0.61;
constexpr double kServoKp = 0.067;
constexpr double kServoKi = 13.4;

std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      out[i + j] += a[i] * b[j];
    }
  }
  return out;
}

}  // namespace

SwitchingSystem example3() {
  SwitchingSystem sys;
  sys.alpha = 1.0;
  RealMatrix a1(2, 2), a2(2, 2);
  a1 << -0.1, 0.1, -2.0, -0.1;
  a2 << -0.01, 2.0, -0.1, -0.01;
  sys.subsystems.push_back({"1", a1});
  sys.subsystems.push_back({"2", a2});
  return sys;
}

Example3Verdict example3_verdict(double alpha, const FrequencyGrid& grid) {
  const SwitchingSystem pair = example3();
  const RealMatrix& a1 = pair.subsystems[0].A;
  const RealMatrix& a2 = pair.subsystems[1].A;

  Example3Verdict out;
  out.alpha = alpha;
  out.fractional = phase_sweep_determinant(a1, a2, alpha, grid);
  out.transformed = phase_sweep_determinant(sector_transform(a1, alpha),
                                            sector_transform(a2, alpha), alpha, grid);
  out.verdict = (out.fractional.verdict == Verdict::Stable &&
                 out.transformed.verdict == Verdict::Stable)
                    ? Verdict::Stable
                    : Verdict::Inconclusive;
  return out;
}

PseudoPolynomial smartwheel_polynomial(int j, int pade_order, bool rounded) {
  if (j < 1 || j > 13) {
    throw std::invalid_argument("smartwheel_polynomial: subsystem index must lie in 1..13");
  }
  const double tau = kNetworkDelays[static_cast<std::size_t>(j - 1)];
  const double beta = kScheduledGains[static_cast<std::size_t>(j - 1)];
  const RationalTF pade = pade_delay(kFixedDelay + tau, pade_order);

  double plant_pole, prop_gain, int_gain;
  if (rounded) {
    plant_pole = 22.22;
    prop_gain = 7.12;
    int_gain = 19.74;
  } else {
    plant_pole = 1.0 / kPlantTimeConstant;
    prop_gain = kPlantGain * kCtrlProportional / kPlantTimeConstant;
    int_gain = kPlantGain * kCtrlIntegral / kPlantTimeConstant;
  }

  // loop term lambda^21 + plant_pole lambda^11 against the scheduled
  // controller term beta (prop_gain lambda^10 + int_gain)
  std::vector<double> loop(22, 0.0);
  loop[21] = 1.0;
  loop[11] = plant_pole;
  std::vector<double> ctrl(11, 0.0);
  ctrl[10] = prop_gain;
  ctrl[0] = int_gain;

  std::vector<double> poly = poly_mul(pade.den, loop);
  const std::vector<double> rhs = poly_mul(pade.num, ctrl);
  for (std::size_t k = 0; k < rhs.size(); ++k) {
    poly[k] += beta * rhs[k];
  }

  const double lead = poly.back();
  for (double& c : poly) {
    c /= lead;
  }
  poly.back() = 1.0;

  PseudoPolynomial out;
  out.base_order = 0.1;
  out.coeffs = std::move(poly);
  out.validate();
  return out;
}

SwitchingSystem smartwheel_family(int pade_order, bool rounded) {
  SwitchingSystem sys;
  sys.alpha = 0.1;
  for (int j = 1; j <= 13; ++j) {
    const FractionalLTI real = realize_commensurate(smartwheel_polynomial(j, pade_order, rounded));
    sys.subsystems.push_back({std::to_string(j), real.A});
  }
  sys.validate();
  return sys;
}

HybridScenario multicontroller(const MultiControllerParams& params) {
  const Fraction f1 = rationalize_order(params.alpha1);
  const Fraction f2 = rationalize_order(params.alpha2);
  if (f1.num != f2.num || f1.den != f2.den) {
    throw std::invalid_argument("multicontroller: subsystem base orders are incompatible; "
                                "augment to a common base first");
  }
  const int q = f1.num;
  const int p = f1.den;

  HybridScenario scenario;
  scenario.alpha = 1.0 / p;
  scenario.reference = params.reference;
  scenario.hysteresis = params.hysteresis;

  auto make_mode = [&](const std::string& label, double K, double tau, double kp, double ki) {
    const double a = K * kp;
    const double b = K * ki;
    // denominator s^(alpha+1) + (tau + a) s^alpha + b at base order 1/p:
    // lambda^(p+q) + (tau + a) lambda^q + b
    PseudoPolynomial den;
    den.base_order = 1.0 / p;
    den.coeffs.assign(static_cast<std::size_t>(p + q) + 1, 0.0);
    den.coeffs[0] = b;
    den.coeffs[static_cast<std::size_t>(q)] = tau + a;
    den.coeffs.back() = 1.0;
    const FractionalLTI real = realize_commensurate(den);

    HybridScenario::Mode mode;
    mode.label = label;
    mode.A = real.A;
    mode.B = real.B.col(0);
    // numerator a s^alpha + b: y = b x_1 + a x_{q+1}
    mode.C = Eigen::RowVectorXd::Zero(p + q);
    mode.C(0) = b;
    mode.C(q) = a;
    mode.forcing_prop = b;
    mode.forcing_frac = a;
    return mode;
  };

  scenario.modes.push_back(make_mode("1", params.K1, params.tau1, params.kp1, params.ki1));
  scenario.modes.push_back(make_mode("2", params.K2, params.tau2, params.kp2, params.ki2));

  const double eps = params.hysteresis;
  const ReferenceSignal ref = params.reference;
  auto output = [modes = scenario.modes](const Eigen::VectorXd& x, int mode) {
    return (modes[static_cast<std::size_t>(mode - 1)].C * x)(0);
  };
  scenario.flow_predicate = [output, ref, eps](const Eigen::VectorXd& x, int mode, double t) {
    const double y = output(x, mode);
    const double r = ref.eval(t);
    return mode == 1 ? y < r + eps : y > r - eps;
  };
  scenario.jump_predicate = [output, ref, eps](const Eigen::VectorXd& x, int mode, double t) {
    const double y = output(x, mode);
    const double r = ref.eval(t);
    return mode == 1 ? y >= r + eps : y <= r - eps;
  };
  scenario.jump_map = [](const Eigen::VectorXd& x, int mode) {
    return std::make_pair(x, 3 - mode);
  };

  scenario.validate();
  return scenario;
}

ResetClosedLoop fore_loop(double b) {
  // plant chain for 1/(s^2 + 0.2 s) with the series unit-zero compensator
  // folded into the measured output row
  StateSpaceBlock plant;
  plant.A = RealMatrix::Zero(2, 2);
  plant.A << 0.0, 1.0, 0.0, -0.2;
  plant.B = Eigen::VectorXd::Zero(2);
  plant.B(1) = 1.0;
  plant.C = Eigen::RowVectorXd::Zero(2);
  plant.C << 1.0, 1.0;

  ResetControllerBlock reset_ctrl;
  reset_ctrl.A = RealMatrix::Constant(1, 1, -b);
  reset_ctrl.B = Eigen::VectorXd::Constant(1, 1.0);
  reset_ctrl.C = Eigen::RowVectorXd::Constant(1, 1.0);
  reset_ctrl.D = 0.0;
  reset_ctrl.n_reset_states = 1;

  return assemble_reset_loop(plant, std::nullopt, reset_ctrl, 1.0);
}

ResetClosedLoop clegg_loop() { return fore_loop(0.0); }

ResetClosedLoop fci_loop() {
  const ResetClosedLoop base = fore_loop(0.0);
  // plant states carry order 1 = 2/2, the reset integrator order 1/2
  const std::vector<int> nums = {2, 2, 1};
  MixedOrderAugmentation aug =
      augment_mixed(base.A_cl, base.B_cl, base.C_cl, nums, 2);

  ResetClosedLoop rcl;
  rcl.alpha = 0.5;
  rcl.A_cl = std::move(aug.A);
  rcl.B_cl = aug.B.col(0);
  rcl.C_cl = aug.C.row(0);
  rcl.n_plant = 4;
  rcl.n_controller = 0;
  rcl.n_reset_controller = 1;
  rcl.n_reset_states = 1;
  rcl.C_p = Eigen::RowVectorXd::Zero(4);
  rcl.C_p << 1.0, 0.0, 1.0, 0.0;
  rcl.validate();
  return rcl;
}

RationalTF fore_printed_family(double beta, double b) {
  RationalTF tf;
  tf.num = {0.8 * beta, 0.2, 1.0};
  tf.den = {1.0, 1.0 + 0.2 * b, b + 0.2, 1.0};
  while (tf.num.size() > 1 && tf.num.back() == 0.0) {
    tf.num.pop_back();
  }
  return tf;
}

StateSpaceBlock servo_plant() {
  StateSpaceBlock plant;
  plant.A = RealMatrix::Constant(1, 1, -1.0 / kServoTimeConstant);
  plant.B = Eigen::VectorXd::Constant(1, kServoGain / kServoTimeConstant);
  plant.C = Eigen::RowVectorXd::Constant(1, 1.0);
  return plant;
}

ResetClosedLoop servo_fpci(bool rounded) {
  RealMatrix a2(2, 2);
  Eigen::VectorXd b2(2);
  if (rounded) {
    // printed matrices, including the printed input column
    a2 << -1.7415, 20.4295, -1.0, 0.0;
    b2 << 1.5246, 1.0;
  } else {
    ResetControllerBlock reset_ctrl;
    reset_ctrl.A = RealMatrix::Zero(1, 1);
    reset_ctrl.B = Eigen::VectorXd::Constant(1, 1.0);
    reset_ctrl.C = Eigen::RowVectorXd::Constant(1, kServoKi);
    reset_ctrl.D = kServoKp;
    reset_ctrl.n_reset_states = 1;
    const ResetClosedLoop base = assemble_reset_loop(servo_plant(), std::nullopt, reset_ctrl, 0.75);
    a2 = base.A_cl;
    b2 = base.B_cl;
  }
  Eigen::RowVectorXd c2(2);
  c2 << 1.0, 0.0;

  // plant order 1 = 4/4, reset integrator order 3/4
  const std::vector<int> nums = {4, 3};
  MixedOrderAugmentation aug = augment_mixed(a2, b2, c2, nums, 4);

  ResetClosedLoop rcl;
  rcl.alpha = 0.25;
  rcl.A_cl = std::move(aug.A);
  rcl.B_cl = aug.B.col(0);
  rcl.C_cl = aug.C.row(0);
  rcl.n_plant = 4;
  rcl.n_controller = 0;
  rcl.n_reset_controller = 3;
  rcl.n_reset_states = 1;
  rcl.C_p = Eigen::RowVectorXd::Zero(4);
  rcl.C_p(0) = 1.0;
  rcl.validate();
  return rcl;
}

}  // namespace fohs::scenarios
