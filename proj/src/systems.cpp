#include "fohs/systems.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numeric>

namespace fohs {

void FractionalLTI::validate() const {
  if (!(alpha > 0.0 && alpha < 2.0)) {
    throw std::invalid_argument("FractionalLTI: base order must lie in (0, 2)");
  }
  const Eigen::Index n = A.rows();
  if (A.cols() != n || n < 1) {
    throw std::invalid_argument("FractionalLTI: A must be square");
  }
  if (B.rows() != n || C.cols() != n) {
    throw std::invalid_argument("FractionalLTI: B/C dimensions inconsistent with A");
  }
  if (D.rows() != C.rows() || D.cols() != B.cols()) {
    throw std::invalid_argument("FractionalLTI: D dimensions inconsistent with B/C");
  }
}

void PseudoPolynomial::validate() const {
  if (!(base_order > 0.0 && base_order <= 1.0)) {
    throw std::invalid_argument("PseudoPolynomial: base order must lie in (0, 1]");
  }
  if (coeffs.size() < 2) {
    throw std::invalid_argument("PseudoPolynomial: need degree >= 1");
  }
  if (coeffs.back() != 1.0) {
    throw std::invalid_argument("PseudoPolynomial: must be monic (leading coefficient 1)");
  }
  for (double c : coeffs) {
    if (!std::isfinite(c)) {
      throw std::invalid_argument("PseudoPolynomial: non-finite coefficient");
    }
  }
}

void SwitchingSystem::validate() const {
  if (!(alpha > 0.0 && alpha < 2.0)) {
    throw std::invalid_argument("SwitchingSystem: base order must lie in (0, 2)");
  }
  if (subsystems.empty()) {
    throw std::invalid_argument("SwitchingSystem: need at least one subsystem");
  }
  const Eigen::Index n = subsystems.front().A.rows();
  for (const auto& sub : subsystems) {
    if (sub.A.rows() != n || sub.A.cols() != n || n < 1) {
      throw std::invalid_argument("SwitchingSystem: subsystem '" + sub.label +
                                  "' dimension mismatch");
    }
    if (!sub.A.allFinite()) {
      throw std::invalid_argument("SwitchingSystem: subsystem '" + sub.label +
                                  "' has non-finite entries");
    }
  }
}

RealMatrix ResetClosedLoop::reset_map() const {
  const Eigen::Index n = order();
  RealMatrix ar = RealMatrix::Identity(n, n);
  for (int k = 0; k < n_reset_states; ++k) {
    ar(n - 1 - k, n - 1 - k) = 0.0;
  }
  return ar;
}

void ResetClosedLoop::validate() const {
  const Eigen::Index n = order();
  if (A_cl.cols() != n || n < 1) {
    throw std::invalid_argument("ResetClosedLoop: A_cl must be square");
  }
  if (n_plant < 0 || n_controller < 0 || n_reset_controller < 0) {
    throw std::invalid_argument("ResetClosedLoop: negative block size");
  }
  if (n_plant + n_controller + n_reset_controller != n) {
    throw std::invalid_argument("ResetClosedLoop: block sizes must sum to the dimension");
  }
  if (n_reset_states < 0 || n_reset_states > n_reset_controller) {
    throw std::invalid_argument("ResetClosedLoop: n_reset_states exceeds the reset controller "
                                "block");
  }
  if (B_cl.size() != n || C_cl.size() != n) {
    throw std::invalid_argument("ResetClosedLoop: B_cl/C_cl length mismatch");
  }
  if (C_p.size() != n_plant) {
    throw std::invalid_argument("ResetClosedLoop: C_p width must equal n_plant");
  }
  if (!(alpha > 0.0 && alpha < 2.0)) {
    throw std::invalid_argument("ResetClosedLoop: base order must lie in (0, 2)");
  }
}

Complex RationalTF::eval(Complex s) const {
  auto horner = [&s](const std::vector<double>& c) {
    Complex acc(0.0, 0.0);
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
      acc = acc * s + *it;
    }
    return acc;
  };
  return horner(num) / horner(den);
}

std::vector<Complex> RationalTF::poles() const {
  const int deg = static_cast<int>(den.size()) - 1;
  if (deg < 1) {
    return {};
  }
  RealMatrix comp = RealMatrix::Zero(deg, deg);
  comp.block(0, 1, deg - 1, deg - 1).setIdentity();
  for (int k = 0; k < deg; ++k) {
    comp(deg - 1, k) = -den[static_cast<std::size_t>(k)] / den.back();
  }
  Eigen::EigenSolver<RealMatrix> es(comp, /*computeEigenvectors=*/false);
  std::vector<Complex> out(static_cast<std::size_t>(deg));
  for (int k = 0; k < deg; ++k) {
    out[static_cast<std::size_t>(k)] = es.eigenvalues()(k);
  }
  return out;
}

void RationalTF::validate() const {
  if (num.empty() || den.empty()) {
    throw std::invalid_argument("RationalTF: empty coefficient list");
  }
  if (den.back() == 0.0) {
    throw std::invalid_argument("RationalTF: denominator leading coefficient is zero");
  }
  if (num.size() > 1 && num.back() == 0.0) {
    throw std::invalid_argument("RationalTF: trailing-zero padding in numerator");
  }
}

double ReferenceSignal::eval(double t) const {
  switch (kind) {
    case Kind::Step:
      return amplitude;
    case Kind::Sinusoid:
      return amplitude * std::sin(frequency * t);
  }
  return 0.0;
}

double ReferenceSignal::frac_derivative(double alpha, double t) const {
  switch (kind) {
    case Kind::Step:
      // deviation-form derivative of a constant is zero
      return 0.0;
    case Kind::Sinusoid:
      // steady-state phase-shift rule
      return amplitude * std::pow(frequency, alpha) *
             std::sin(frequency * t + alpha * std::numbers::pi / 2.0);
  }
  return 0.0;
}

SwitchingSystem HybridScenario::family() const {
  SwitchingSystem sys;
  sys.alpha = alpha;
  for (const auto& mode : modes) {
    sys.subsystems.push_back({mode.label, mode.A});
  }
  return sys;
}

void HybridScenario::validate() const {
  if (modes.empty()) {
    throw std::invalid_argument("HybridScenario: no modes");
  }
  family().validate();
  if (!(hysteresis > 0.0)) {
    throw std::invalid_argument("HybridScenario: hysteresis band must be positive");
  }
  const Eigen::Index n = modes.front().A.rows();
  for (const auto& m : modes) {
    if (m.B.size() != n || m.C.size() != n) {
      throw std::invalid_argument("HybridScenario: mode '" + m.label + "' B/C size mismatch");
    }
  }
}

Fraction rationalize_order(double alpha, int max_den) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("rationalize_order: order must be positive and finite");
  }
  int best_num = 1, best_den = 1;
  double best_err = std::numeric_limits<double>::infinity();
  for (int den = 1; den <= max_den; ++den) {
    const int num = static_cast<int>(std::lround(alpha * den));
    if (num < 1) {
      continue;
    }
    const double err = std::abs(alpha - static_cast<double>(num) / den);
    if (err < best_err - 1e-15) {
      best_err = err;
      best_num = num;
      best_den = den;
    }
  }
  if (best_err > 1e-9) {
    throw std::invalid_argument("rationalize_order: order is not representable with denominator "
                                "up to " + std::to_string(max_den));
  }
  const int g = std::gcd(best_num, best_den);
  return {best_num / g, best_den / g};
}

FractionalLTI realize_commensurate(const PseudoPolynomial& poly) {
  poly.validate();
  const int n = poly.degree();
  FractionalLTI sys;
  sys.alpha = poly.base_order;
  sys.A = RealMatrix::Zero(n, n);
  if (n > 1) {
    sys.A.block(0, 1, n - 1, n - 1).setIdentity();
  }
  for (int k = 0; k < n; ++k) {
    sys.A(n - 1, k) = -poly.coeffs[static_cast<std::size_t>(k)];
  }
  sys.B = RealMatrix::Zero(n, 1);
  sys.B(n - 1, 0) = 1.0;
  sys.C = RealMatrix::Zero(1, n);
  sys.C(0, 0) = 1.0;
  sys.D = RealMatrix::Zero(1, 1);
  return sys;
}

RationalTF pade_delay(double T, int m) {
  if (!(T >= 0.0) || !std::isfinite(T)) {
    throw std::invalid_argument("pade_delay: delay must be finite and non-negative");
  }
  if (m < 1 || m > 10) {
    throw std::invalid_argument("pade_delay: order must lie in [1, 10]");
  }
  auto fact = [](int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) {
      f *= i;
    }
    return f;
  };
  RationalTF tf;
  tf.num.resize(static_cast<std::size_t>(m) + 1);
  tf.den.resize(static_cast<std::size_t>(m) + 1);
  for (int k = 0; k <= m; ++k) {
    const double c = fact(2 * m - k) * fact(m) / (fact(2 * m) * fact(k) * fact(m - k));
    tf.num[static_cast<std::size_t>(k)] = c * std::pow(-T, k);
    tf.den[static_cast<std::size_t>(k)] = c * std::pow(T, k);
  }
  while (tf.num.size() > 1 && tf.num.back() == 0.0) {
    tf.num.pop_back();
  }
  while (tf.den.size() > 1 && tf.den.back() == 0.0) {
    tf.den.pop_back();
  }
  tf.validate();
  return tf;
}

ResetClosedLoop assemble_reset_loop(const StateSpaceBlock& plant,
                                    const std::optional<StateSpaceBlock>& controller,
                                    const ResetControllerBlock& reset_ctrl, double alpha) {
  const Eigen::Index np = plant.A.rows();
  const Eigen::Index nr = reset_ctrl.A.rows();
  if (plant.A.cols() != np || plant.B.size() != np || plant.C.size() != np) {
    throw std::invalid_argument("assemble_reset_loop: plant block dimensions inconsistent");
  }
  if (reset_ctrl.A.cols() != nr || reset_ctrl.B.size() != nr || reset_ctrl.C.size() != nr) {
    throw std::invalid_argument("assemble_reset_loop: reset block dimensions inconsistent");
  }
  if (reset_ctrl.n_reset_states < 0 || reset_ctrl.n_reset_states > nr) {
    throw std::invalid_argument("assemble_reset_loop: n_reset_states exceeds the reset block");
  }

  ResetClosedLoop rcl;
  rcl.alpha = alpha;
  rcl.n_plant = static_cast<int>(np);
  rcl.n_reset_controller = static_cast<int>(nr);
  rcl.n_reset_states = reset_ctrl.n_reset_states;
  rcl.C_p = plant.C;

  if (controller.has_value()) {
    const Eigen::Index nc = controller->A.rows();
    if (controller->A.cols() != nc || controller->B.size() != nc || controller->C.size() != nc) {
      throw std::invalid_argument("assemble_reset_loop: controller block dimensions inconsistent");
    }
    const Eigen::Index n = np + nc + nr;
    rcl.n_controller = static_cast<int>(nc);
    rcl.A_cl = RealMatrix::Zero(n, n);
    rcl.A_cl.block(0, 0, np, np) = plant.A;
    rcl.A_cl.block(0, np, np, nc) = plant.B * controller->C;
    rcl.A_cl.block(np, 0, nc, np) = -controller->B * reset_ctrl.D * plant.C;
    rcl.A_cl.block(np, np, nc, nc) = controller->A;
    rcl.A_cl.block(np, np + nc, nc, nr) = controller->B * reset_ctrl.C;
    rcl.A_cl.block(np + nc, 0, nr, np) = -reset_ctrl.B * plant.C;
    rcl.A_cl.block(np + nc, np + nc, nr, nr) = reset_ctrl.A;

    rcl.B_cl = Eigen::VectorXd::Zero(n);
    rcl.B_cl.segment(np, nc) = controller->B * reset_ctrl.D;
    rcl.B_cl.segment(np + nc, nr) = reset_ctrl.B;

    rcl.C_cl = Eigen::RowVectorXd::Zero(n);
    rcl.C_cl.head(np) = plant.C;
  } else {
    const Eigen::Index n = np + nr;
    rcl.n_controller = 0;
    rcl.A_cl = RealMatrix::Zero(n, n);
    rcl.A_cl.block(0, 0, np, np) = plant.A - plant.B * reset_ctrl.D * plant.C;
    rcl.A_cl.block(0, np, np, nr) = plant.B * reset_ctrl.C;
    rcl.A_cl.block(np, 0, nr, np) = -reset_ctrl.B * plant.C;
    rcl.A_cl.block(np, np, nr, nr) = reset_ctrl.A;

    rcl.B_cl = Eigen::VectorXd::Zero(n);
    rcl.B_cl.head(np) = plant.B * reset_ctrl.D;
    rcl.B_cl.segment(np, nr) = reset_ctrl.B;

    rcl.C_cl = Eigen::RowVectorXd::Zero(n);
    rcl.C_cl.head(np) = plant.C;
  }
  rcl.validate();
  return rcl;
}

MixedOrderAugmentation augment_mixed(const RealMatrix& A, const RealMatrix& B,
                                     const RealMatrix& C, const std::vector<int>& nums,
                                     int base_den) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || static_cast<Eigen::Index>(nums.size()) != n) {
    throw std::invalid_argument("augment_mixed: per-state orders must match the dimension");
  }
  if (base_den < 1 || base_den > 16) {
    throw std::invalid_argument("augment_mixed: base denominator must lie in [1, 16]");
  }
  for (int u : nums) {
    if (u < 1) {
      throw std::invalid_argument("augment_mixed: chain lengths must be positive");
    }
  }

  MixedOrderAugmentation out;
  out.heads.reserve(nums.size());
  Eigen::Index total = 0;
  for (int u : nums) {
    out.heads.push_back(static_cast<int>(total));
    total += u;
  }

  out.A = RealMatrix::Zero(total, total);
  out.B = RealMatrix::Zero(total, B.cols());
  out.C = RealMatrix::Zero(C.rows(), total);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index head = out.heads[static_cast<std::size_t>(i)];
    const int u = nums[static_cast<std::size_t>(i)];
    for (int k = 0; k + 1 < u; ++k) {
      out.A(head + k, head + k + 1) = 1.0;
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      out.A(head + u - 1, out.heads[static_cast<std::size_t>(j)]) = A(i, j);
    }
    out.B.row(head + u - 1) = B.row(i);
    out.C.col(head) = C.col(i);
  }
  return out;
}

FractionalLTI augment_base_order(const FractionalLTI& sys, int base_den) {
  sys.validate();
  const Fraction frac = rationalize_order(sys.alpha);
  if (base_den == 0) {
    base_den = frac.den;
  }
  if (base_den % frac.den != 0) {
    throw std::invalid_argument("augment_base_order: target base must refine the system order");
  }
  const int chain = frac.num * (base_den / frac.den);
  if (chain == 1 && base_den == frac.den) {
    return sys;
  }
  const std::vector<int> nums(static_cast<std::size_t>(sys.order()), chain);
  MixedOrderAugmentation aug = augment_mixed(sys.A, sys.B, sys.C, nums, base_den);

  FractionalLTI out;
  out.alpha = 1.0 / base_den;
  out.A = std::move(aug.A);
  out.B = std::move(aug.B);
  out.C = std::move(aug.C);
  out.D = sys.D;
  return out;
}

}  // namespace fohs
