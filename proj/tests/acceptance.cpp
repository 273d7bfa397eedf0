// Acceptance suite: each check prints one PASS/FAIL line; the binary exits
// nonzero when any check fails. Budgets are wall-clock seconds.

#include "fohs/io.hpp"
#include "fohs/scenarios.hpp"
#include "fohs/simulate.hpp"
#include "fohs/stability.hpp"

#include "test_util.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

using namespace fohs;
namespace sc = fohs::scenarios;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failures = 0;

void run(int index, const std::string& name, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome outcome;
  try {
    outcome = body();
  } catch (const std::exception& err) {
    outcome.pass = false;
    outcome.detail = std::string("exception: ") + err.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("[%2d] %s  %s (%.1fs) %s\n", index, outcome.pass ? "PASS" : "FAIL", name.c_str(),
              secs, outcome.detail.c_str());
  std::fflush(stdout);
  if (!outcome.pass) {
    ++g_failures;
  }
}

double seconds_since(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Outcome benchmark_pair_verdicts() {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  out.pass = true;
  std::string verdicts;
  for (int k = 1; k <= 10; ++k) {
    const double alpha = 0.1 * k;
    const sc::Example3Verdict v = sc::example3_verdict(alpha);
    const bool expect_stable = alpha < 0.65;
    const bool got_stable = v.verdict == Verdict::Stable;
    verdicts += (got_stable ? "S" : "I");
    if (expect_stable != got_stable) {
      out.pass = false;
    }
  }
  const double secs = seconds_since(start);
  out.detail = "verdicts=" + verdicts + " (expect SSSSSSIIII)";
  if (secs >= 5.0) {
    out.pass = false;
    out.detail += " runtime budget exceeded";
  }
  return out;
}

Outcome scheduled_family_margins() {
  const auto start = std::chrono::steady_clock::now();
  const SwitchingSystem family = sc::smartwheel_family(3);
  const MultiCheckResult res =
      multi_check(family, PairMode::Consecutive, SweepForm::Determinant, {});
  Outcome out;
  out.pass = res.reports.size() == 12;
  double worst = std::numbers::pi / 2.0;
  for (const auto& rep : res.reports) {
    worst = std::min(worst, rep.margin);
    if (rep.verdict != Verdict::Stable || rep.margin <= 0.0) {
      out.pass = false;
    }
  }
  const double secs = seconds_since(start);
  out.detail = "12 consecutive pairs, min margin " + std::to_string(worst) + " rad";
  if (secs >= 60.0) {
    out.pass = false;
    out.detail += " runtime budget exceeded";
  }
  return out;
}

Outcome reset_element_beta_interval() {
  auto family = [](double beta) {
    return spr_phase_check(sc::fore_printed_family(beta, 1.0), FrequencyGrid{}).spr;
  };
  const std::vector<BetaInterval> intervals = beta_range(family, 0.0, 2.0, 0.01);
  Outcome out;
  if (intervals.size() != 1) {
    out.detail = "expected one interval, got " + std::to_string(intervals.size());
    return out;
  }
  const double lo = intervals[0].lower;
  const double hi = intervals[0].upper;
  out.pass = std::abs(lo - 0.42) <= 0.02 && std::abs(hi - 1.46) <= 0.02;
  out.detail = "interval (" + std::to_string(lo) + ", " + std::to_string(hi) +
               "] vs (0.42, 1.46] +-0.02";
  return out;
}

Outcome fractional_integrator_beta_interval() {
  const ResetClosedLoop fci = sc::fci_loop();
  const TransferEvaluator base = hbeta_build(fci, 0.0, {});
  auto family = [&fci](double beta) {
    return reset_stability(fci, beta, {}, {}).spr;
  };
  const std::vector<BetaInterval> intervals = beta_range(family, 0.05, 2.0, 0.01);
  Outcome out;
  if (intervals.empty()) {
    out.detail = "no interval detected";
    return out;
  }
  const double hi = intervals.back().upper;
  const ResetStabilityReport at_half = reset_stability(fci, 0.5, {}, {});
  out.pass = std::abs(hi - 0.62) <= 0.02 && at_half.verdict == Verdict::Stable;
  out.detail = "upper endpoint " + std::to_string(hi) + " vs 0.62 +-0.02; beta=0.5 " +
               to_string(at_half.verdict);
  (void)base;
  return out;
}

Outcome integrator_loop_empty_set() {
  auto family = [](double beta) {
    return spr_phase_check(sc::fore_printed_family(beta, 0.0), FrequencyGrid{}).spr;
  };
  const std::vector<BetaInterval> intervals = beta_range(family, 0.01, 5.0, 0.05);
  Outcome out;
  out.pass = intervals.empty();
  out.detail = "intervals found: " + std::to_string(intervals.size());
  return out;
}

Outcome transform_identity_at_order_one() {
  std::mt19937_64 rng(424242);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 1 + static_cast<int>(rng() % 6);
    const RealMatrix a = testutil::random_hurwitz(rng, n);
    worst = std::max(worst, (sector_transform(a, 1.0) - a).norm());
  }
  Outcome out;
  out.pass = worst < 1e-10;
  out.detail = "max ||T(A,1) - A|| = " + std::to_string(worst);
  return out;
}

Outcome certificate_implies_stable_sweep() {
  std::mt19937_64 rng(777);
  int pairs = 0;
  int certified = 0;
  int counterexamples = 0;
  for (double alpha : {0.3, 0.5, 0.8, 1.0}) {
    for (int n : {2, 3}) {
      for (int rep = 0; rep < 32; ++rep) {
        const RealMatrix a1 = testutil::random_sector_companion(rng, n, alpha);
        const RealMatrix a2 = testutil::random_sector_companion(rng, n, alpha);
        ++pairs;
        const auto p = pairwise_lyapunov_oracle(a1, a2, alpha);
        if (!p.has_value()) {
          continue;
        }
        ++certified;
        const PhaseSweepReport rep4 = phase_sweep_resolvent(a1, a2, alpha, {});
        if (rep4.verdict != Verdict::Stable) {
          ++counterexamples;
        }
      }
    }
  }
  Outcome out;
  out.pass = pairs >= 200 && certified >= 50 && counterexamples == 0;
  out.detail = std::to_string(pairs) + " pairs, " + std::to_string(certified) +
               " certificates, " + std::to_string(counterexamples) + " counterexamples";
  return out;
}

Outcome simulator_matches_oracles() {
  const auto start = std::chrono::steady_clock::now();
  FractionalLTI half;
  half.alpha = 0.5;
  half.A = RealMatrix::Constant(1, 1, -1.0);
  half.B = RealMatrix::Zero(1, 1);
  half.C = RealMatrix::Constant(1, 1, 1.0);
  half.D = RealMatrix::Zero(1, 1);

  SimConfig cfg;
  cfg.h = 1e-3;
  cfg.horizon = 5.0;
  cfg.memory = 0;
  const Trajectory traj =
      simulate_fractional_lti(half, [](double) { return 0.0; },
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

  FractionalLTI unit = half;
  unit.alpha = 1.0;
  const Trajectory tr1 = simulate_fractional_lti(unit, [](double) { return 0.0; },
                                                 Eigen::VectorXd::Constant(1, 1.0), cfg);
  double euler = 1.0;
  double euler_err = 0.0;
  for (std::size_t k = 0; k < tr1.times.size(); ++k) {
    euler_err = std::max(euler_err, std::abs(tr1.outputs[k] - euler) / std::abs(euler));
    euler *= (1.0 - cfg.h);
  }

  const double secs = seconds_since(start);
  Outcome out;
  out.pass = worst < 1e-2 && euler_err <= 1e-12 && secs < 10.0;
  out.detail = "series-oracle rel err " + std::to_string(worst) + ", order-one vs Euler " +
               std::to_string(euler_err) + " (" + std::to_string(secs) + "s)";
  return out;
}

Outcome reset_event_correctness() {
  const ResetClosedLoop rcl = sc::servo_fpci();
  SimConfig cfg;
  cfg.h = 1e-3;
  cfg.horizon = 14.0;
  const Trajectory traj = simulate_reset(rcl, {ReferenceSignal::Kind::Step, 1.0, 0.0}, cfg);

  Outcome out;
  if (traj.events.empty()) {
    out.detail = "no reset events fired";
    return out;
  }
  const RealMatrix ar = rcl.reset_map();
  double worst_surface = 0.0;
  bool jump_exact = true;
  for (const Event& ev : traj.events) {
    worst_surface = std::max(worst_surface, std::abs((rcl.C_cl * ev.pre_state)(0) - 1.0));
    if ((ev.post_state - ar * ev.pre_state).norm() != 0.0) {
      jump_exact = false;
    }
  }

  std::size_t last_out = 0;
  for (std::size_t k = 0; k < traj.outputs.size(); ++k) {
    if (std::abs(traj.outputs[k] - 1.0) >= 0.01) {
      last_out = k;
    }
  }
  const bool settles = last_out + 1 < traj.outputs.size();

  out.pass = worst_surface <= 1e-8 && jump_exact && settles;
  out.detail = std::to_string(traj.events.size()) + " events, max surface residual " +
               std::to_string(worst_surface) + ", jump map exact: " +
               (jump_exact ? "yes" : "no") + ", settles at t=" +
               std::to_string(settles ? traj.times[last_out + 1] : -1.0);
  return out;
}

Outcome lyapunov_residuals() {
  std::mt19937_64 rng(31337);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 9);
    const RealMatrix a = testutil::random_hurwitz(rng, n);
    RealMatrix q = testutil::random_matrix(rng, n);
    q = (0.5 * (q + q.transpose()) + static_cast<double>(n) * RealMatrix::Identity(n, n)).eval();
    const RealMatrix p = solve_lyapunov(a, q);
    worst = std::max(worst, (a.transpose() * p + p * a + q).norm() / q.norm());
  }
  Outcome out;
  out.pass = worst < 1e-9;
  out.detail = "max relative residual " + std::to_string(worst);
  return out;
}

}  // namespace

int main() {
  std::printf("acceptance checks\n");
  run(1, "two-subsystem benchmark verdict table (stable through 0.6, inconclusive above)",
      benchmark_pair_verdicts);
  run(2, "scheduled 13-subsystem family: 12 consecutive margins positive at base 0.1",
      scheduled_family_margins);
  run(3, "reset element family: certified interval endpoints near (0.42, 1.46]",
      reset_element_beta_interval);
  run(4, "fractional reset integrator: upper endpoint near 0.62 and beta=0.5 stable",
      fractional_integrator_beta_interval);
  run(5, "plain reset integrator: empty certified set over (0, 5]", integrator_loop_empty_set);
  run(6, "sector transform at order one is the identity (100 random systems)",
      transform_identity_at_order_one);
  run(7, "common-certificate pairs are declared stable by the resolvent sweep",
      certificate_implies_stable_sweep);
  run(8, "history integrator matches series and Euler oracles", simulator_matches_oracles);
  run(9, "servo reset events: surface residual, exact jump map, 1% settling",
      reset_event_correctness);
  run(10, "stacked Lyapunov solver residuals below 1e-9 (100 random systems)",
      lyapunov_residuals);

  if (g_failures > 0) {
    std::printf("%d acceptance check(s) FAILED\n", g_failures);
    return 1;
  }
  std::printf("all acceptance checks passed\n");
  return 0;
}
