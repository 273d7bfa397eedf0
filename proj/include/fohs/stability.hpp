#pragma once

#include "fohs/linalg.hpp"
#include "fohs/systems.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fohs {

/// Logarithmically spaced frequency grid, endpoints included.
struct FrequencyGrid {
  double w_min = 1e-4;
  double w_max = 1e4;
  int points = 4000;

  std::vector<double> samples() const;
  void validate() const;
};

enum class Verdict { Stable, Inconclusive };

std::string to_string(Verdict v);

struct MatignonResult {
  bool stable = false;
  double margin = 0.0;  // min_i |arg lambda_i| - alpha*pi/2
};

/// Sector criterion for D^alpha x = A x: stable iff
/// every eigenvalue satisfies |arg lambda| > alpha*pi/2.
MatignonResult matignon_check(const RealMatrix& a, double alpha);

/// Symmetric 2n x 2n block whose negative definiteness certifies sector
/// stability for base orders in [1, 2):
///   [[ S sin(phi),  D cos(phi)], [-D cos(phi),  S sin(phi)]]
/// with S = A^T P + P A, D = A^T P - P A and phi = alpha*pi/2.
RealMatrix sector_lmi_block(const RealMatrix& a, const RealMatrix& p, double alpha);

/// True iff the block above is negative definite.
bool sector_lmi_predicate(const RealMatrix& a, const RealMatrix& p, double alpha);

/// Lyapunov inequality on the transformed matrix, for base orders in (0, 1]:
/// true iff T^T P + P T < 0 with T = sector_transform(a, alpha).
bool transformed_lyapunov_predicate(const RealMatrix& a, const RealMatrix& p, double alpha);

/// Sufficient-only search for a common Lyapunov matrix of a pair of
/// subsystems at base order alpha in (0, 1]. Tries the single-system
/// solutions and their average; absence of a result proves nothing.
std::optional<RealMatrix> pairwise_lyapunov_oracle(const RealMatrix& a1, const RealMatrix& a2,
                                                   double alpha);

struct PhaseSweepReport {
  FrequencyGrid grid;           // requested grid
  std::vector<double> omega;    // final samples, refined
  std::vector<double> phase_a;
  std::vector<double> phase_b;
  std::vector<double> delta;    // |phase_a - phase_b| per sample
  double max_delta = 0.0;
  double margin = 0.0;          // pi/2 - max_delta
  Verdict verdict = Verdict::Inconclusive;
  bool refined = false;
  std::string reason;           // non-empty when the verdict is forced
  std::string label_a = "1", label_b = "2";
};

/// Phase-difference condition in resolvent form for base order alpha in (0, 1]:
/// phase_x(w) = unwrapped arg det(T_x - j w I) with T_x = sector_transform(A_x, alpha).
/// Stable iff sup |phase_1 - phase_2| < pi/2 over the (adaptively refined) grid.
PhaseSweepReport phase_sweep_resolvent(const RealMatrix& a1, const RealMatrix& a2, double alpha,
                                       const FrequencyGrid& grid = {});

/// Phase-difference condition in determinant form with phi = alpha*pi/2:
/// phase_x(w) = unwrapped arg det((A_x^2 - w^2 I) - 2 j w sin(phi) A_x).
/// Canonical for base orders in [1, 2); also evaluable below 1, where the
/// gain-scheduled scenario applies it directly.
PhaseSweepReport phase_sweep_determinant(const RealMatrix& a1, const RealMatrix& a2, double alpha,
                                         const FrequencyGrid& grid = {});

enum class PairMode { Consecutive, AllPairs };
enum class SweepForm { Resolvent, Determinant };

struct MultiCheckResult {
  std::vector<PhaseSweepReport> reports;
  Verdict aggregate = Verdict::Inconclusive;
};

/// Pairwise phase-difference conditions over a subsystem family.
/// Consecutive mode emits L-1 reports, all-pairs L(L-1)/2. With a single
/// subsystem the report list is empty and the aggregate is its sector check.
MultiCheckResult multi_check(const SwitchingSystem& sys, PairMode mode, SweepForm form,
                             const FrequencyGrid& grid = {});

/// State-space transfer function H(s) = C (sI - A)^{-1} B built from a reset
/// loop: A is the sector transform of the closed-loop matrix, C stacks
/// beta * C_p, zeros over non-reset states and P_R, B selects reset states.
/// Scalar for one reset state, matrix-valued otherwise.
struct TransferEvaluator {
  RealMatrix C;  // n_reset_states x n
  RealMatrix A;  // n x n
  RealMatrix B;  // n x n_reset_states

  ComplexMatrix eval_matrix(Complex s) const;
  Complex eval(Complex s) const;  // requires the scalar case
};

TransferEvaluator hbeta_build(const ResetClosedLoop& rcl, double beta, const RealMatrix& p_r);

struct SprResult {
  bool spr = false;
  double max_abs_phase = 0.0;
  std::string reason;        // non-empty when forced (unstable poles, axis pole)
  std::vector<double> omega;
  std::vector<double> phase;
  std::vector<double> magnitude;
};

/// Strict positive realness by phase: poles strictly in the open left
/// half-plane and sup |unwrapped arg H(jw)| < pi/2 over the grid.
SprResult spr_phase_check(const TransferEvaluator& h, const FrequencyGrid& grid = {});
SprResult spr_phase_check(const RationalTF& h, const FrequencyGrid& grid = {});

struct ResetStabilityReport {
  double beta = 0.0;
  RealMatrix P_R;
  double max_abs_phase = 0.0;
  bool spr = false;
  Verdict verdict = Verdict::Inconclusive;  // Stable here means asymptotically stable
  SprResult detail;
};

/// Reset-loop stability through the SPR phase condition on the constructed
/// transfer function. P_R defaults to the identity when empty.
ResetStabilityReport reset_stability(const ResetClosedLoop& rcl, double beta,
                                     const RealMatrix& p_r = {}, const FrequencyGrid& grid = {});

struct BetaInterval {
  double lower = 0.0;  // open end: first beta where the condition starts to hold
  double upper = 0.0;  // closed end within scan resolution
};

/// Scans beta over [beta_min, beta_max] with the given step, then refines
/// every detected boundary by bisection to width <= step/100.
std::vector<BetaInterval> beta_range(const std::function<bool(double)>& spr_at_beta,
                                     double beta_min, double beta_max, double step);

}  // namespace fohs
