#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fohs/scenarios.hpp"
#include "fohs/simulate.hpp"

#include <cmath>
#include <numbers>

using namespace fohs;
namespace sc = fohs::scenarios;

namespace {

FractionalLTI scalar_system(double alpha, double a) {
  FractionalLTI sys;
  sys.alpha = alpha;
  sys.A = RealMatrix::Constant(1, 1, a);
  sys.B = RealMatrix::Zero(1, 1);
  sys.C = RealMatrix::Constant(1, 1, 1.0);
  sys.D = RealMatrix::Zero(1, 1);
  return sys;
}

const Signal kZero = [](double) { return 0.0; };

}  // namespace

TEST_CASE("binomial weights") {
  const std::vector<double> w1 = gl_weights(1.0, 5);
  CHECK(w1[0] == 1.0);
  CHECK(w1[1] == -1.0);
  CHECK(w1[2] == 0.0);
  CHECK(w1[3] == 0.0);

  const std::vector<double> wh = gl_weights(0.5, 3);
  CHECK(wh[1] == doctest::Approx(-0.5));
  CHECK(wh[2] == doctest::Approx(-0.125));

  // partial sums decay to zero from above for orders in (0, 1)
  const std::vector<double> w = gl_weights(0.3, 1000);
  double partial = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j <= 1000; ++j) {
    partial += w[j];
    if (j >= 1) {
      CHECK(partial >= 0.0);
      CHECK(partial <= prev);
    }
    prev = partial;
  }
  CHECK(partial < 0.02);
}

TEST_CASE("mittag-leffler values") {
  CHECK(mittag_leffler(1.0, -1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(mittag_leffler(0.5, 0.0) == 1.0);
  CHECK(mittag_leffler(0.25, 0.0) == 1.0);
  CHECK(mittag_leffler(0.5, -1.0) == doctest::Approx(0.4275835762).epsilon(1e-8));
  CHECK_THROWS_AS(mittag_leffler(0.5, -25.0), std::invalid_argument);
}

TEST_CASE("mittag-leffler matches the squared-exponential identity at half order") {
  // E_{1/2}(-x) = exp(x^2) erfc(x)
  for (double x : {0.3, 1.0, 2.0}) {
    const double series = mittag_leffler(0.5, -x);
    const double identity = std::exp(x * x) * std::erfc(x);
    CHECK(series == doctest::Approx(identity).epsilon(1e-10));
  }
}

TEST_CASE("zero dynamics hold a constant trajectory") {
  FractionalLTI sys = scalar_system(0.7, 0.0);
  SimConfig cfg;
  cfg.h = 0.01;
  cfg.horizon = 1.0;
  const Trajectory traj = simulate_fractional_lti(sys, kZero, Eigen::VectorXd::Constant(1, 2.5),
                                                  cfg);
  for (double y : traj.outputs) {
    CHECK(y == 2.5);
  }
}

TEST_CASE("order one explicit scheme is forward Euler") {
  SimConfig cfg;
  cfg.h = 1e-3;
  cfg.horizon = 1.0;
  cfg.memory = 0;  // unbounded
  const Trajectory traj = simulate_fractional_lti(scalar_system(1.0, -1.0), kZero,
                                                  Eigen::VectorXd::Constant(1, 1.0), cfg);
  double euler = 1.0;
  for (std::size_t k = 0; k < traj.outputs.size(); ++k) {
    CHECK(std::abs(traj.outputs[k] - euler) <= 1e-12 * std::abs(euler));
    euler *= (1.0 - cfg.h);
  }
}

TEST_CASE("half-order decay tracks the series oracle") {
  SimConfig cfg;
  cfg.h = 1e-3;
  cfg.horizon = 2.0;
  cfg.memory = 0;
  const Trajectory traj = simulate_fractional_lti(scalar_system(0.5, -1.0), kZero,
                                                  Eigen::VectorXd::Constant(1, 1.0), cfg);
  double worst = 0.0;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const double t = traj.times[k];
    if (t < 0.1) {
      continue;
    }
    const double exact = mittag_leffler(0.5, -std::sqrt(t));
    worst = std::max(worst, std::abs(traj.outputs[k] - exact) / exact);
  }
  CHECK(worst < 1e-2);
  CHECK(worst > 0.0);
}

TEST_CASE("halving the step roughly halves the benchmark error") {
  auto max_err = [](double h) {
    SimConfig cfg;
    cfg.h = h;
    cfg.horizon = 2.0;
    cfg.memory = 0;
    const Trajectory traj = simulate_fractional_lti(scalar_system(0.5, -1.0), kZero,
                                                    Eigen::VectorXd::Constant(1, 1.0), cfg);
    double worst = 0.0;
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
      if (traj.times[k] < 0.1) {
        continue;
      }
      const double exact = mittag_leffler(0.5, -std::sqrt(traj.times[k]));
      worst = std::max(worst, std::abs(traj.outputs[k] - exact));
    }
    return worst;
  };
  const double ratio = max_err(2e-3) / max_err(1e-3);
  CHECK(ratio > 1.5);
  CHECK(ratio < 2.5);
}

TEST_CASE("implicit scheme stays close to the oracle as well") {
  SimConfig cfg;
  cfg.h = 1e-3;
  cfg.horizon = 1.0;
  cfg.memory = 0;
  cfg.scheme = SimConfig::Scheme::Implicit;
  const Trajectory traj = simulate_fractional_lti(scalar_system(0.5, -1.0), kZero,
                                                  Eigen::VectorXd::Constant(1, 1.0), cfg);
  const double t = traj.times.back();
  const double exact = mittag_leffler(0.5, -std::sqrt(t));
  CHECK(std::abs(traj.outputs.back() - exact) / exact < 1e-2);
}

TEST_CASE("short memory stays close to the unbounded run") {
  SimConfig full;
  full.h = 1e-3;
  full.horizon = 2.0;
  full.memory = 0;
  SimConfig windowed = full;
  windowed.memory = 2000;
  const auto sys = scalar_system(0.5, -1.0);
  const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(1, 1.0);
  const Trajectory a = simulate_fractional_lti(sys, kZero, x0, full);
  const Trajectory b = simulate_fractional_lti(sys, kZero, x0, windowed);
  double worst = 0.0;
  for (std::size_t k = 0; k < a.outputs.size(); ++k) {
    worst = std::max(worst, std::abs(a.outputs[k] - b.outputs[k]) / std::abs(a.outputs[k]));
  }
  CHECK(worst < 1e-3);
}

TEST_CASE("divergence aborts with a partial trajectory") {
  SimConfig cfg;
  cfg.h = 1e-2;
  cfg.horizon = 50.0;
  const Trajectory traj = simulate_fractional_lti(scalar_system(1.0, 400.0), kZero,
                                                  Eigen::VectorXd::Constant(1, 1.0), cfg);
  CHECK(traj.diverged);
  CHECK(traj.times.size() < 5001);
}

TEST_CASE("identity reset map reproduces the plain flow bit for bit") {
  const ResetClosedLoop rcl = []{
    ResetClosedLoop r;
    r.alpha = 0.5;
    r.A_cl = RealMatrix(2, 2);
    r.A_cl << -0.4, 1.0, -1.0, -0.4;
    r.B_cl = Eigen::VectorXd::Zero(2);
    r.B_cl << 0.5, 1.0;
    r.C_cl = Eigen::RowVectorXd::Zero(2);
    r.C_cl << 1.0, 0.0;
    r.n_plant = 1;
    r.n_controller = 0;
    r.n_reset_controller = 1;
    r.n_reset_states = 0;  // nothing resets
    r.C_p = Eigen::RowVectorXd::Constant(1, 1.0);
    return r;
  }();

  SimConfig cfg;
  cfg.h = 1e-2;
  cfg.horizon = 3.0;
  const ReferenceSignal step{ReferenceSignal::Kind::Step, 1.0, 0.0};
  const Trajectory reset_run = simulate_reset(rcl, step, cfg);
  CHECK(reset_run.events.empty());

  FractionalLTI sys;
  sys.alpha = rcl.alpha;
  sys.A = rcl.A_cl;
  sys.B = rcl.B_cl;
  sys.C = RealMatrix(rcl.C_cl);
  sys.D = RealMatrix::Zero(1, 1);
  const Trajectory plain = simulate_fractional_lti(sys, [](double) { return 1.0; },
                                                   Eigen::VectorXd::Zero(2), cfg);
  REQUIRE(plain.times.size() == reset_run.times.size());
  for (std::size_t k = 0; k < plain.times.size(); ++k) {
    CHECK(plain.states[k] == reset_run.states[k]);
  }
}

TEST_CASE("integrator resetting at error zero-crossings follows the closed form") {
  // D x = e with e(t) = sin t; state 1 - cos t until the crossing at pi,
  // then -(1 + cos t) until 2 pi
  ResetClosedLoop rcl;
  rcl.alpha = 1.0;
  rcl.A_cl = RealMatrix::Zero(1, 1);
  rcl.B_cl = Eigen::VectorXd::Constant(1, 1.0);
  rcl.C_cl = Eigen::RowVectorXd::Zero(1);
  rcl.n_plant = 0;
  rcl.n_controller = 0;
  rcl.n_reset_controller = 1;
  rcl.n_reset_states = 1;
  rcl.C_p = Eigen::RowVectorXd(0);

  SimConfig cfg;
  cfg.h = 1e-3;
  cfg.horizon = 7.0;
  const ReferenceSignal sine{ReferenceSignal::Kind::Sinusoid, 1.0, 1.0};
  const Trajectory traj = simulate_reset(rcl, sine, cfg);

  REQUIRE(traj.events.size() == 2);
  CHECK(traj.events[0].time == doctest::Approx(std::numbers::pi).epsilon(1e-3));
  CHECK(traj.events[1].time == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-3));

  auto value_at = [&traj](double t) {
    const auto it = std::lower_bound(traj.times.begin(), traj.times.end(), t);
    return traj.states[static_cast<std::size_t>(it - traj.times.begin())](0);
  };
  CHECK(value_at(2.0) == doctest::Approx(1.0 - std::cos(2.0)).epsilon(2e-3));
  CHECK(value_at(4.0) == doctest::Approx(-1.0 - std::cos(4.0)).epsilon(2e-2));
}

TEST_CASE("reset events satisfy the surface condition and the jump map") {
  const ResetClosedLoop rcl = sc::servo_fpci();
  SimConfig cfg;
  cfg.h = 2e-3;
  cfg.horizon = 10.0;
  const ReferenceSignal step{ReferenceSignal::Kind::Step, 1.0, 0.0};
  const Trajectory traj = simulate_reset(rcl, step, cfg);

  REQUIRE(!traj.events.empty());
  const RealMatrix ar = rcl.reset_map();
  for (const Event& ev : traj.events) {
    CHECK(ev.kind == Event::Kind::Reset);
    CHECK(std::abs((rcl.C_cl * ev.pre_state)(0) - 1.0) <= 1e-8);
    CHECK((ev.post_state - ar * ev.pre_state).norm() == 0.0);
  }
}

TEST_CASE("servo loop settles into the one percent band") {
  const ResetClosedLoop rcl = sc::servo_fpci();
  SimConfig cfg;
  cfg.h = 2e-3;
  cfg.horizon = 14.0;
  const Trajectory traj = simulate_reset(rcl, {ReferenceSignal::Kind::Step, 1.0, 0.0}, cfg);
  CHECK_FALSE(traj.diverged);

  std::size_t last_out = 0;
  for (std::size_t k = 0; k < traj.outputs.size(); ++k) {
    if (std::abs(traj.outputs[k] - 1.0) >= 0.01) {
      last_out = k;
    }
  }
  CHECK(traj.times[last_out] < 8.0);
  for (std::size_t k = last_out + 1; k < traj.outputs.size(); ++k) {
    CHECK(std::abs(traj.outputs[k] - 1.0) < 0.01);
  }
}

TEST_CASE("retain policy keeps the pre-jump history influence") {
  const ResetClosedLoop rcl = sc::servo_fpci();
  SimConfig clear_cfg;
  clear_cfg.h = 2e-3;
  clear_cfg.horizon = 4.0;
  SimConfig retain_cfg = clear_cfg;
  retain_cfg.reset_memory = SimConfig::ResetMemoryPolicy::Retain;
  const ReferenceSignal step{ReferenceSignal::Kind::Step, 1.0, 0.0};
  const Trajectory a = simulate_reset(rcl, step, clear_cfg);
  const Trajectory b = simulate_reset(rcl, step, retain_cfg);
  REQUIRE(!a.events.empty());
  REQUIRE(!b.events.empty());
  // same first event, different continuations
  CHECK(a.events[0].time == doctest::Approx(b.events[0].time).epsilon(1e-6));
  CHECK(std::abs(a.outputs.back() - b.outputs.back()) > 0.0);
}

TEST_CASE("oversized hysteresis band yields a single-mode run") {
  sc::MultiControllerParams params;
  params.hysteresis = 100.0;
  const HybridScenario scenario = sc::multicontroller(params);
  SimConfig cfg;
  cfg.h = 1e-2;
  cfg.horizon = 5.0;
  const Trajectory traj = simulate_switched(scenario, cfg);
  CHECK(traj.events.empty());
  for (int mode : traj.modes) {
    CHECK(mode == 1);
  }
}

TEST_CASE("identical modes leave the trajectory unchanged by switching") {
  sc::MultiControllerParams params;
  params.K2 = params.K1;
  params.tau2 = params.tau1;
  params.kp2 = params.kp1;
  params.ki2 = params.ki1;
  params.hysteresis = 0.02;
  const HybridScenario scenario = sc::multicontroller(params);
  SimConfig cfg;
  cfg.h = 1e-3;
  cfg.horizon = 6.0;
  const Trajectory traj = simulate_switched(scenario, cfg);

  sc::MultiControllerParams calm = params;
  calm.hysteresis = 1e6;
  const Trajectory solo = simulate_switched(sc::multicontroller(calm), cfg);

  // event log may be non-empty, but the flow never changes
  double worst = 0.0;
  std::size_t i = 0;
  for (std::size_t k = 0; k < solo.times.size(); ++k) {
    while (i + 1 < traj.times.size() && traj.times[i] < solo.times[k] - 1e-12) {
      ++i;
    }
    if (std::abs(traj.times[i] - solo.times[k]) < 1e-12) {
      worst = std::max(worst, std::abs(traj.outputs[i] - solo.outputs[k]));
    }
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("nominal two-mode run alternates modes at increasing times") {
  const HybridScenario scenario = sc::multicontroller({});
  SimConfig cfg;
  cfg.h = 1e-3;
  cfg.horizon = 12.0;
  const Trajectory traj = simulate_switched(scenario, cfg);
  REQUIRE(traj.events.size() >= 2);
  int expected_before = 1;
  double prev_time = 0.0;
  for (const Event& ev : traj.events) {
    CHECK(ev.kind == Event::Kind::Switch);
    CHECK(ev.mode_before == expected_before);
    CHECK(ev.mode_after == 3 - expected_before);
    CHECK(ev.time > prev_time);
    CHECK((ev.pre_state - ev.post_state).norm() == 0.0);
    prev_time = ev.time;
    expected_before = ev.mode_after;
  }
}

TEST_CASE("step metrics") {
  Trajectory flat;
  for (int k = 0; k <= 100; ++k) {
    flat.times.push_back(0.01 * k);
    flat.outputs.push_back(1.0);
    flat.states.push_back(Eigen::VectorXd::Constant(1, 1.0));
    flat.modes.push_back(1);
  }
  const StepMetrics m0 = metrics(flat, 1.0);
  CHECK(m0.overshoot == 0.0);
  CHECK(m0.settling_time.value() == 0.0);
  CHECK(m0.steady_state_error.value() == 0.0);

  Trajectory lag;
  const double h = 1e-3;
  for (int k = 0; k <= 8000; ++k) {
    const double t = h * k;
    lag.times.push_back(t);
    lag.outputs.push_back(1.0 - std::exp(-t));
    lag.states.push_back(Eigen::VectorXd::Constant(1, lag.outputs.back()));
    lag.modes.push_back(1);
  }
  const StepMetrics m1 = metrics(lag, 1.0);
  CHECK(m1.overshoot == 0.0);
  CHECK(m1.settling_time.value() == doctest::Approx(std::log(50.0)).epsilon(1e-3));

  Trajectory bad;
  for (int k = 0; k <= 100; ++k) {
    bad.times.push_back(0.01 * k);
    bad.outputs.push_back(std::exp(0.2 * k));
    bad.states.push_back(Eigen::VectorXd::Constant(1, bad.outputs.back()));
    bad.modes.push_back(1);
  }
  const StepMetrics m2 = metrics(bad, 1.0);
  CHECK_FALSE(m2.settling_time.has_value());
  CHECK_FALSE(m2.steady_state_error.has_value());
}
