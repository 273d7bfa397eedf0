#include "fohs/simulate.hpp"

#include <Eigen/LU>

#include <cmath>
#include <numbers>

namespace fohs {

namespace {

constexpr std::size_t kMaxEvents = 10000;

}  // namespace

void SimConfig::validate() const {
  if (!(h > 0.0) || !(horizon > 0.0) || h > horizon) {
    throw std::invalid_argument("SimConfig: need 0 < h <= horizon");
  }
  if (!unbounded() && memory < 1) {
    throw std::invalid_argument("SimConfig: bounded memory window must be >= 1");
  }
}

std::vector<double> gl_weights(double alpha, std::size_t n) {
  std::vector<double> c(n + 1);
  c[0] = 1.0;
  for (std::size_t j = 1; j <= n; ++j) {
    c[j] = (1.0 - (1.0 + alpha) / static_cast<double>(j)) * c[j - 1];
  }
  return c;
}

double mittag_leffler(double alpha, double z, double tol) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("mittag_leffler: order must lie in (0, 1]");
  }
  if (!(tol > 0.0)) {
    throw std::invalid_argument("mittag_leffler: tolerance must be positive");
  }
  if (std::abs(z) > 20.0) {
    throw std::invalid_argument("mittag_leffler: |z| above the series regime cap of 20");
  }
  constexpr int kCap = 2000;
  double sum = 0.0;
  double max_term = 0.0;
  const double labs = std::abs(z) > 0.0 ? std::log(std::abs(z)) : 0.0;
  for (int k = 0; k < kCap; ++k) {
    double mag;
    if (z == 0.0) {
      mag = k == 0 ? 1.0 : 0.0;
    } else {
      mag = std::exp(k * labs - std::lgamma(alpha * k + 1.0));
    }
    const double term = (z < 0.0 && (k % 2 == 1)) ? -mag : mag;
    sum += term;
    max_term = std::max(max_term, mag);
    if (mag < tol && k > 1) {
      if (max_term > 1e13 * std::max(std::abs(sum), 1e-300)) {
        throw NumericError("mittag_leffler: catastrophic cancellation; result unreliable");
      }
      return sum;
    }
  }
  throw NumericError("mittag_leffler: term cap reached before tolerance");
}

namespace {

// Shared fractional history state. Each coordinate can restart its memory at
// a later sample (after a reset) with a new deviation reference.
class GlIntegrator {
 public:
  GlIntegrator(double alpha, const SimConfig& cfg, const Eigen::VectorXd& x0)
      : alpha_(alpha),
        cfg_(cfg),
        weights_(gl_weights(alpha, 256)),
        start_(Eigen::VectorXi::Zero(x0.size())),
        ref_(x0) {
    states_.push_back(x0);
  }

  const Eigen::VectorXd& current() const { return states_.back(); }
  std::size_t steps() const { return states_.size(); }
  const std::vector<Eigen::VectorXd>& states() const { return states_; }

  // history sum  sum_{j>=1} c_j (x_{k+1-j} - ref)  for the next sample k+1
  Eigen::VectorXd history(std::size_t next_index) {
    const Eigen::Index n = ref_.size();
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const std::size_t si = static_cast<std::size_t>(start_(i));
      std::size_t span = next_index - si;
      if (!cfg_.unbounded()) {
        span = std::min<std::size_t>(span, static_cast<std::size_t>(cfg_.memory));
      }
      ensure_weights(span);
      double s = 0.0;
      for (std::size_t j = 1; j <= span; ++j) {
        s += weights_[j] * (states_[next_index - j](i) - ref_(i));
      }
      acc(i) = s;
    }
    return acc;
  }

  void push(const Eigen::VectorXd& x) { states_.push_back(x); }

  // replace the not-yet-pushed prediction after an interpolated event
  void push_event_state(const Eigen::VectorXd& post, const std::vector<int>& reset_coords,
                        SimConfig::ResetMemoryPolicy policy) {
    states_.push_back(post);
    if (policy == SimConfig::ResetMemoryPolicy::Clear) {
      for (int i : reset_coords) {
        start_(i) = static_cast<int>(states_.size()) - 1;
        ref_(i) = post(i);
      }
    }
  }

  const Eigen::VectorXd& reference() const { return ref_; }

 private:
  void ensure_weights(std::size_t span) {
    while (weights_.size() <= span) {
      const std::size_t j = weights_.size();
      weights_.push_back((1.0 - (1.0 + alpha_) / static_cast<double>(j)) * weights_[j - 1]);
    }
  }

  double alpha_;
  SimConfig cfg_;
  std::vector<double> weights_;
  std::vector<Eigen::VectorXd> states_;
  Eigen::VectorXi start_;
  Eigen::VectorXd ref_;
};

bool finite(const Eigen::VectorXd& x) { return x.allFinite(); }

}  // namespace

Trajectory simulate_fractional_lti(const FractionalLTI& sys, const Signal& u,
                                   const Eigen::VectorXd& x0, const SimConfig& cfg) {
  sys.validate();
  cfg.validate();
  if (x0.size() != sys.order()) {
    throw std::invalid_argument("simulate_fractional_lti: initial state dimension mismatch");
  }
  if (sys.B.cols() != 1) {
    throw std::invalid_argument("simulate_fractional_lti: single-input systems only");
  }

  const double ha = std::pow(cfg.h, sys.alpha);
  const std::size_t steps = static_cast<std::size_t>(std::llround(cfg.horizon / cfg.h));
  GlIntegrator gl(sys.alpha, cfg, x0);

  Trajectory traj;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  auto output = [&sys, &u](const Eigen::VectorXd& x, double t) {
    return (sys.C * x + sys.D * Eigen::VectorXd::Constant(1, u(t)))(0);
  };
  traj.times.push_back(0.0);
  traj.states.push_back(x0);
  traj.outputs.push_back(output(x0, 0.0));
  traj.modes.push_back(1);

  std::optional<Eigen::PartialPivLU<RealMatrix>> implicit_lu;
  if (cfg.scheme == SimConfig::Scheme::Implicit) {
    const RealMatrix lhs = RealMatrix::Identity(sys.order(), sys.order()) - ha * sys.A;
    implicit_lu.emplace(lhs);
    if ((lhs * implicit_lu->inverse() - RealMatrix::Identity(sys.order(), sys.order())).norm() >
        1e-6) {
      throw NumericError("simulate_fractional_lti: implicit step matrix is singular");
    }
  }

  for (std::size_t k = 1; k <= steps; ++k) {
    const double t_prev = (k - 1) * cfg.h;
    const Eigen::VectorXd hist = gl.history(k);
    Eigen::VectorXd next;
    if (cfg.scheme == SimConfig::Scheme::Explicit) {
      next = gl.reference() - hist +
             ha * (sys.A * gl.current() + sys.B.col(0) * u(t_prev));
    } else {
      const Eigen::VectorXd rhs =
          gl.reference() - hist + ha * sys.B.col(0) * u(k * cfg.h);
      next = implicit_lu->solve(rhs);
    }
    if (!finite(next)) {
      traj.diverged = true;
      break;
    }
    gl.push(next);
    const double t = k * cfg.h;
    traj.times.push_back(t);
    traj.states.push_back(next);
    traj.outputs.push_back(output(next, t));
    traj.modes.push_back(1);
  }
  return traj;
}

Trajectory simulate_reset(const ResetClosedLoop& rcl, const ReferenceSignal& r,
                          const SimConfig& cfg) {
  rcl.validate();
  cfg.validate();

  const Eigen::Index n = rcl.order();
  const double ha = std::pow(cfg.h, rcl.alpha);
  const RealMatrix ar = rcl.reset_map();

  std::vector<int> reset_coords;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (ar(i, i) == 0.0) {
      reset_coords.push_back(static_cast<int>(i));
    }
  }

  GlIntegrator gl(rcl.alpha, cfg, Eigen::VectorXd::Zero(n));

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(gl.current());
  traj.outputs.push_back((rcl.C_cl * gl.current())(0));
  traj.modes.push_back(1);

  std::optional<Eigen::PartialPivLU<RealMatrix>> implicit_lu;
  if (cfg.scheme == SimConfig::Scheme::Implicit) {
    implicit_lu.emplace(RealMatrix::Identity(n, n) - ha * rcl.A_cl);
  }

  double t = 0.0;
  double e_prev = r.eval(0.0) - (rcl.C_cl * gl.current())(0);
  while (t < cfg.horizon - cfg.h * 0.5) {
    const std::size_t k = gl.steps();
    const Eigen::VectorXd hist = gl.history(k);
    Eigen::VectorXd next;
    if (cfg.scheme == SimConfig::Scheme::Explicit) {
      next = gl.reference() - hist +
             ha * (rcl.A_cl * gl.current() + rcl.B_cl * r.eval(t));
    } else {
      next = implicit_lu->solve(gl.reference() - hist + ha * rcl.B_cl * r.eval(t + cfg.h));
    }
    if (!finite(next)) {
      traj.diverged = true;
      break;
    }

    const double t_next = t + cfg.h;
    const double e_next = r.eval(t_next) - (rcl.C_cl * next)(0);

    bool jumped = false;
    if (e_prev != 0.0 && e_prev * e_next < 0.0) {
      // linear interpolation to the crossing of the reset surface
      const double theta = e_prev / (e_prev - e_next);
      const double t_ev = t + theta * cfg.h;
      const Eigen::VectorXd pre = gl.current() + theta * (next - gl.current());
      if (((RealMatrix::Identity(n, n) - ar) * pre).norm() > 1e-12) {
        const Eigen::VectorXd post = ar * pre;
        Event ev;
        ev.time = t_ev;
        ev.kind = Event::Kind::Reset;
        ev.pre_state = pre;
        ev.post_state = post;
        traj.events.push_back(ev);
        if (traj.events.size() > kMaxEvents) {
          throw NumericError("simulate_reset: event cap exceeded (chattering?)");
        }

        gl.push_event_state(post, reset_coords, cfg.reset_memory);
        t = t_ev;
        traj.times.push_back(t);
        traj.states.push_back(post);
        traj.outputs.push_back((rcl.C_cl * post)(0));
        traj.modes.push_back(1);
        e_prev = r.eval(t) - (rcl.C_cl * post)(0);
        jumped = true;
      }
    }
    if (jumped) {
      continue;
    }

    gl.push(next);
    t = t_next;
    traj.times.push_back(t);
    traj.states.push_back(next);
    traj.outputs.push_back((rcl.C_cl * next)(0));
    traj.modes.push_back(1);
    e_prev = e_next;
  }
  return traj;
}

Trajectory simulate_switched(const HybridScenario& scenario, const SimConfig& cfg) {
  scenario.validate();
  cfg.validate();
  if (scenario.mode_count() != 2) {
    throw std::invalid_argument("simulate_switched: exactly two modes are supported");
  }

  const Eigen::Index n = scenario.modes.front().A.rows();
  const double ha = std::pow(cfg.h, scenario.alpha);
  GlIntegrator gl(scenario.alpha, cfg, Eigen::VectorXd::Zero(n));

  auto forcing = [&scenario](int mode, double t) {
    const auto& m = scenario.modes[static_cast<std::size_t>(mode - 1)];
    return m.forcing_prop * scenario.reference.eval(t) +
           m.forcing_frac * scenario.reference.frac_derivative(scenario.alpha, t);
  };
  // band edge whose crossing fires the jump: r + eps in mode 1, r - eps in mode 2
  auto edge_gap = [&scenario](int mode, double t, double y) {
    const double r = scenario.reference.eval(t);
    return mode == 1 ? y - (r + scenario.hysteresis) : (r - scenario.hysteresis) - y;
  };

  int mode = 1;
  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(gl.current());
  traj.outputs.push_back((scenario.modes[0].C * gl.current())(0));
  traj.modes.push_back(mode);

  double t = 0.0;
  while (t < cfg.horizon - cfg.h * 0.5) {
    const auto& m = scenario.modes[static_cast<std::size_t>(mode - 1)];
    const std::size_t k = gl.steps();
    const Eigen::VectorXd hist = gl.history(k);
    Eigen::VectorXd next;
    if (cfg.scheme == SimConfig::Scheme::Explicit) {
      next = gl.reference() - hist + ha * (m.A * gl.current() + m.B * forcing(mode, t));
    } else {
      const RealMatrix lhs = RealMatrix::Identity(n, n) - ha * m.A;
      next = Eigen::PartialPivLU<RealMatrix>(lhs).solve(gl.reference() - hist +
                                                        ha * m.B * forcing(mode, t + cfg.h));
    }
    if (!finite(next)) {
      traj.diverged = true;
      break;
    }

    const double t_next = t + cfg.h;
    const double g_prev = edge_gap(mode, t, (m.C * gl.current())(0));
    const double g_next = edge_gap(mode, t_next, (m.C * next)(0));

    if (g_prev < 0.0 && g_next >= 0.0) {
      const double theta = g_prev / (g_prev - g_next);
      const double t_ev = t + theta * cfg.h;
      const Eigen::VectorXd at_edge = gl.current() + theta * (next - gl.current());

      auto [post_state, post_mode] =
          scenario.jump_map ? scenario.jump_map(at_edge, mode) : std::make_pair(at_edge, 3 - mode);

      Event ev;
      ev.time = t_ev;
      ev.kind = Event::Kind::Switch;
      ev.pre_state = at_edge;
      ev.post_state = post_state;
      ev.mode_before = mode;
      ev.mode_after = post_mode;
      traj.events.push_back(ev);
      if (traj.events.size() > kMaxEvents) {
        throw NumericError("simulate_switched: switch cap exceeded (chattering?)");
      }

      mode = post_mode;
      gl.push(post_state);
      t = t_ev;
      traj.times.push_back(t);
      traj.states.push_back(post_state);
      traj.outputs.push_back(
          (scenario.modes[static_cast<std::size_t>(mode - 1)].C * post_state)(0));
      traj.modes.push_back(mode);
      continue;
    }

    gl.push(next);
    t = t_next;
    traj.times.push_back(t);
    traj.states.push_back(next);
    traj.outputs.push_back((m.C * next)(0));
    traj.modes.push_back(mode);
  }
  return traj;
}

StepMetrics metrics(const Trajectory& traj, double reference) {
  if (traj.outputs.empty()) {
    throw std::invalid_argument("metrics: empty trajectory");
  }
  const double scale = std::abs(reference) > 0.0 ? std::abs(reference) : 1.0;

  StepMetrics out;
  double peak = -std::numeric_limits<double>::infinity();
  for (double y : traj.outputs) {
    peak = std::max(peak, (y - reference) * (reference >= 0.0 ? 1.0 : -1.0));
  }
  out.overshoot = std::max(0.0, peak / scale);

  const double band = 0.02 * scale;
  std::optional<std::size_t> last_exit;
  for (std::size_t k = 0; k < traj.outputs.size(); ++k) {
    if (std::abs(traj.outputs[k] - reference) > band) {
      last_exit = k;
    }
  }
  if (!last_exit.has_value()) {
    out.settling_time = 0.0;
  } else if (*last_exit + 1 < traj.times.size()) {
    out.settling_time = traj.times[*last_exit + 1];
  }  // else: never settles within the horizon

  const double final_dev = std::abs(traj.outputs.back() - reference);
  const bool diverging = traj.diverged ||
                         (!out.settling_time.has_value() && final_dev > 5.0 * scale);
  if (!diverging) {
    out.steady_state_error = final_dev / scale;
  }
  return out;
}

}  // namespace fohs
