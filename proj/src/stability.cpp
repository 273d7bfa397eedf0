#include "fohs/stability.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace fohs {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
// verdicts within this band of the threshold are reported Inconclusive
constexpr double kTieTolerance = 1e-6;

bool negative_definite(const RealMatrix& m) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(0.5 * (m + m.transpose()),
                                               Eigen::EigenvaluesOnly);
  return es.eigenvalues()(es.eigenvalues().size() - 1) < 0.0;
}

}  // namespace

std::vector<double> FrequencyGrid::samples() const {
  validate();
  std::vector<double> out(static_cast<std::size_t>(points));
  const double l0 = std::log10(w_min);
  const double l1 = std::log10(w_max);
  for (int k = 0; k < points; ++k) {
    out[static_cast<std::size_t>(k)] = std::pow(10.0, l0 + (l1 - l0) * k / (points - 1));
  }
  out.front() = w_min;
  out.back() = w_max;
  return out;
}

void FrequencyGrid::validate() const {
  if (!(w_min > 0.0) || !(w_max > w_min)) {
    throw std::invalid_argument("FrequencyGrid: need 0 < w_min < w_max");
  }
  if (points < 16) {
    throw std::invalid_argument("FrequencyGrid: need at least 16 points");
  }
}

std::string to_string(Verdict v) {
  return v == Verdict::Stable ? "stable" : "inconclusive";
}

MatignonResult matignon_check(const RealMatrix& a, double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) {
    throw std::invalid_argument("matignon_check: base order must lie in (0, 2)");
  }
  const EigenDecomposition dec = complex_eigendecomposition(a);
  double min_arg = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < dec.eigenvalues.size(); ++i) {
    min_arg = std::min(min_arg, std::abs(std::arg(dec.eigenvalues(i))));
  }
  const double margin = min_arg - alpha * kHalfPi;
  return {margin > 0.0, margin};
}

RealMatrix sector_lmi_block(const RealMatrix& a, const RealMatrix& p, double alpha) {
  if (a.rows() != a.cols() || p.rows() != p.cols() || a.rows() != p.rows()) {
    throw std::invalid_argument("sector_lmi_block: dimension mismatch");
  }
  const double phi = alpha * kHalfPi;
  const RealMatrix s = (a.transpose() * p + p * a) * std::sin(phi);
  const RealMatrix d = (a.transpose() * p - p * a) * std::cos(phi);
  const Eigen::Index n = a.rows();
  RealMatrix block(2 * n, 2 * n);
  block.topLeftCorner(n, n) = s;
  block.topRightCorner(n, n) = d;
  block.bottomLeftCorner(n, n) = -d;
  block.bottomRightCorner(n, n) = s;
  return block;
}

bool sector_lmi_predicate(const RealMatrix& a, const RealMatrix& p, double alpha) {
  return negative_definite(sector_lmi_block(a, p, alpha));
}

bool transformed_lyapunov_predicate(const RealMatrix& a, const RealMatrix& p, double alpha) {
  const RealMatrix t = sector_transform(a, alpha);
  return negative_definite(t.transpose() * p + p * t);
}

std::optional<RealMatrix> pairwise_lyapunov_oracle(const RealMatrix& a1, const RealMatrix& a2,
                                                   double alpha) {
  const RealMatrix t1 = sector_transform(a1, alpha);
  const RealMatrix t2 = sector_transform(a2, alpha);
  const RealMatrix eye = RealMatrix::Identity(a1.rows(), a1.cols());

  auto satisfies_both = [&](const RealMatrix& p) {
    return negative_definite(t1.transpose() * p + p * t1) &&
           negative_definite(t2.transpose() * p + p * t2);
  };

  const RealMatrix p1 = solve_lyapunov(t1, eye);
  if (satisfies_both(p1)) {
    return p1;
  }
  const RealMatrix p2 = solve_lyapunov(t2, eye);
  if (satisfies_both(p2)) {
    return p2;
  }
  const RealMatrix p3 = 0.5 * (p1 + p2);
  if (satisfies_both(p3)) {
    return p3;
  }
  return std::nullopt;
}

namespace {

// Unit-modulus determinant samples of one subsystem curve; only arguments matter.
class CurveEvaluator {
 public:
  virtual ~CurveEvaluator() = default;
  virtual Complex eval(double w) const = 0;
};

class ResolventCurve final : public CurveEvaluator {
 public:
  explicit ResolventCurve(RealMatrix t) : t_(std::move(t)) {}
  Complex eval(double w) const override {
    ComplexMatrix m = t_.cast<Complex>();
    m.diagonal().array() -= Complex(0.0, w);
    return complex_determinant(m);
  }

 private:
  RealMatrix t_;
};

class DeterminantFormCurve final : public CurveEvaluator {
 public:
  DeterminantFormCurve(const RealMatrix& a, double sin_phi) : a_(a), a2_(a * a), sin_phi_(sin_phi) {}
  Complex eval(double w) const override {
    ComplexMatrix m = a2_.cast<Complex>();
    m -= Complex(0.0, 2.0 * w * sin_phi_) * a_.cast<Complex>();
    m.diagonal().array() -= w * w;
    return complex_determinant(m);
  }

 private:
  RealMatrix a_;
  RealMatrix a2_;
  double sin_phi_;
};

Complex normalized(const Complex det, double w) {
  const double mag = std::abs(det);
  if (!(mag > 0.0) || !std::isfinite(mag)) {
    throw NumericError("phase sweep: zero or non-finite determinant at omega = " +
                       std::to_string(w));
  }
  return det / mag;
}

struct SweepSamples {
  std::vector<double> omega;
  std::vector<Complex> f1, f2;
};

// Up to four rounds of geometric-midpoint insertion: every interval whose
// phase increment exceeds pi/2 on either curve, plus the intervals adjacent
// to the current delta maximizer.
PhaseSweepReport run_sweep(const CurveEvaluator& c1, const CurveEvaluator& c2,
                           const FrequencyGrid& grid) {
  SweepSamples s;
  s.omega = grid.samples();
  s.f1.reserve(s.omega.size());
  s.f2.reserve(s.omega.size());
  for (double w : s.omega) {
    s.f1.push_back(normalized(c1.eval(w), w));
    s.f2.push_back(normalized(c2.eval(w), w));
  }

  PhaseSweepReport report;
  report.grid = grid;

  UnwrappedPhase u1, u2;
  for (int round = 0; round < 4; ++round) {
    u1 = unwrap_phase_lenient(s.f1);
    u2 = unwrap_phase_lenient(s.f2);

    std::set<std::size_t> targets(u1.coarse_steps.begin(), u1.coarse_steps.end());
    targets.insert(u2.coarse_steps.begin(), u2.coarse_steps.end());

    std::size_t arg_max = 0;
    double max_delta = -1.0;
    for (std::size_t k = 0; k < s.omega.size(); ++k) {
      const double d = std::abs(u1.phase[k] - u2.phase[k]);
      if (d > max_delta) {
        max_delta = d;
        arg_max = k;
      }
    }
    if (arg_max > 0) {
      targets.insert(arg_max);
    }
    if (arg_max + 1 < s.omega.size()) {
      targets.insert(arg_max + 1);
    }

    // relative spacing below which maximizer refinement has converged
    bool need_more = !u1.coarse_steps.empty() || !u2.coarse_steps.empty();
    for (std::size_t k : targets) {
      if (s.omega[k] / s.omega[k - 1] > 1.0 + 1e-4) {
        need_more = true;
      }
    }
    if (!need_more) {
      break;
    }

    SweepSamples next;
    next.omega.reserve(s.omega.size() + targets.size());
    next.f1.reserve(s.omega.size() + targets.size());
    next.f2.reserve(s.omega.size() + targets.size());
    for (std::size_t k = 0; k < s.omega.size(); ++k) {
      if (targets.count(k) && k > 0) {
        const double mid = std::sqrt(s.omega[k - 1] * s.omega[k]);
        if (mid > s.omega[k - 1] && mid < s.omega[k]) {
          next.omega.push_back(mid);
          next.f1.push_back(normalized(c1.eval(mid), mid));
          next.f2.push_back(normalized(c2.eval(mid), mid));
          report.refined = true;
        }
      }
      next.omega.push_back(s.omega[k]);
      next.f1.push_back(s.f1[k]);
      next.f2.push_back(s.f2[k]);
    }
    s = std::move(next);
  }

  u1 = unwrap_phase_lenient(s.f1);
  u2 = unwrap_phase_lenient(s.f2);

  report.omega = s.omega;
  report.phase_a = u1.phase;
  report.phase_b = u2.phase;
  report.delta.resize(s.omega.size());
  report.max_delta = 0.0;
  for (std::size_t k = 0; k < s.omega.size(); ++k) {
    report.delta[k] = std::abs(u1.phase[k] - u2.phase[k]);
    report.max_delta = std::max(report.max_delta, report.delta[k]);
  }
  report.margin = kHalfPi - report.max_delta;

  if (!u1.coarse_steps.empty() || !u2.coarse_steps.empty()) {
    report.verdict = Verdict::Inconclusive;
    report.reason = "phase increments above pi/2 persist after refinement";
  } else if (report.margin > kTieTolerance) {
    report.verdict = Verdict::Stable;
  } else {
    report.verdict = Verdict::Inconclusive;
  }
  return report;
}

PhaseSweepReport precondition_failed(const FrequencyGrid& grid, const std::string& reason) {
  PhaseSweepReport report;
  report.grid = grid;
  report.verdict = Verdict::Inconclusive;
  report.reason = reason;
  report.margin = -kHalfPi;
  return report;
}

}  // namespace

PhaseSweepReport phase_sweep_resolvent(const RealMatrix& a1, const RealMatrix& a2, double alpha,
                                       const FrequencyGrid& grid) {
  if (a1.rows() != a2.rows() || a1.cols() != a2.cols()) {
    throw std::invalid_argument("phase_sweep_resolvent: subsystem dimensions differ");
  }
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("phase_sweep_resolvent: base order must lie in (0, 1]");
  }
  const MatignonResult m1 = matignon_check(a1, alpha);
  const MatignonResult m2 = matignon_check(a2, alpha);
  if (!m1.stable || !m2.stable) {
    return precondition_failed(grid, std::string("subsystem ") + (m1.stable ? "2" : "1") +
                                         " fails the sector precondition");
  }
  const ResolventCurve c1(sector_transform(a1, alpha));
  const ResolventCurve c2(sector_transform(a2, alpha));
  return run_sweep(c1, c2, grid);
}

PhaseSweepReport phase_sweep_determinant(const RealMatrix& a1, const RealMatrix& a2, double alpha,
                                         const FrequencyGrid& grid) {
  if (a1.rows() != a2.rows() || a1.cols() != a2.cols()) {
    throw std::invalid_argument("phase_sweep_determinant: subsystem dimensions differ");
  }
  if (!(alpha > 0.0 && alpha < 2.0)) {
    throw std::invalid_argument("phase_sweep_determinant: base order must lie in (0, 2)");
  }
  const MatignonResult m1 = matignon_check(a1, alpha);
  const MatignonResult m2 = matignon_check(a2, alpha);
  if (!m1.stable || !m2.stable) {
    return precondition_failed(grid, std::string("subsystem ") + (m1.stable ? "2" : "1") +
                                         " fails the sector precondition");
  }
  const double sin_phi = std::sin(alpha * kHalfPi);
  const DeterminantFormCurve c1(a1, sin_phi);
  const DeterminantFormCurve c2(a2, sin_phi);
  return run_sweep(c1, c2, grid);
}

MultiCheckResult multi_check(const SwitchingSystem& sys, PairMode mode, SweepForm form,
                             const FrequencyGrid& grid) {
  sys.validate();
  MultiCheckResult result;

  auto sweep = [&](const SwitchingSystem::Subsystem& a, const SwitchingSystem::Subsystem& b) {
    PhaseSweepReport rep = form == SweepForm::Resolvent
                               ? phase_sweep_resolvent(a.A, b.A, sys.alpha, grid)
                               : phase_sweep_determinant(a.A, b.A, sys.alpha, grid);
    rep.label_a = a.label;
    rep.label_b = b.label;
    return rep;
  };

  const std::size_t count = sys.subsystems.size();
  if (count == 1) {
    result.aggregate = matignon_check(sys.subsystems.front().A, sys.alpha).stable
                           ? Verdict::Stable
                           : Verdict::Inconclusive;
    return result;
  }

  if (mode == PairMode::Consecutive) {
    for (std::size_t j = 1; j < count; ++j) {
      result.reports.push_back(sweep(sys.subsystems[j - 1], sys.subsystems[j]));
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t j = i + 1; j < count; ++j) {
        result.reports.push_back(sweep(sys.subsystems[i], sys.subsystems[j]));
      }
    }
  }

  result.aggregate = Verdict::Stable;
  for (const auto& rep : result.reports) {
    if (rep.verdict != Verdict::Stable) {
      result.aggregate = Verdict::Inconclusive;
      break;
    }
  }
  return result;
}

ComplexMatrix TransferEvaluator::eval_matrix(Complex s) const {
  ComplexMatrix m = (-A).cast<Complex>();
  m.diagonal().array() += s;
  Eigen::PartialPivLU<ComplexMatrix> lu(m);
  const ComplexMatrix x = lu.solve(B.cast<Complex>());
  return C.cast<Complex>() * x;
}

Complex TransferEvaluator::eval(Complex s) const {
  if (C.rows() != 1 || B.cols() != 1) {
    throw std::invalid_argument("TransferEvaluator::eval: transfer function is matrix-valued");
  }
  return eval_matrix(s)(0, 0);
}

TransferEvaluator hbeta_build(const ResetClosedLoop& rcl, double beta, const RealMatrix& p_r) {
  rcl.validate();
  const int n = static_cast<int>(rcl.order());
  const int nr = rcl.n_reset_states;
  if (nr < 1) {
    throw std::invalid_argument("hbeta_build: the loop has no reset states");
  }
  RealMatrix pr = p_r;
  if (pr.size() == 0) {
    pr = RealMatrix::Identity(nr, nr);
  }
  if (pr.rows() != nr || pr.cols() != nr) {
    throw std::invalid_argument("hbeta_build: P_R must be n_reset_states square");
  }
  if (!is_positive_definite(pr)) {
    throw std::invalid_argument("hbeta_build: P_R must be symmetric positive definite");
  }

  TransferEvaluator h;
  h.A = sector_transform(rcl.A_cl, rcl.alpha);
  h.C = RealMatrix::Zero(nr, n);
  for (int i = 0; i < nr; ++i) {
    h.C.row(i).head(rcl.n_plant) = beta * rcl.C_p;
  }
  h.C.rightCols(nr) = pr;
  h.B = RealMatrix::Zero(n, nr);
  h.B.bottomRows(nr).setIdentity();
  return h;
}

namespace {

SprResult spr_sweep(const std::function<Complex(double)>& at_jw, const FrequencyGrid& grid) {
  SprResult result;
  result.omega = grid.samples();
  std::vector<Complex> values;
  values.reserve(result.omega.size());
  result.magnitude.reserve(result.omega.size());
  for (double w : result.omega) {
    const Complex v = at_jw(w);
    if (!std::isfinite(std::abs(v))) {
      throw NumericError("spr_phase_check: non-finite response at omega = " + std::to_string(w));
    }
    if (v == Complex(0.0, 0.0)) {
      throw NumericError("spr_phase_check: response vanishes at omega = " + std::to_string(w));
    }
    values.push_back(v);
    result.magnitude.push_back(std::abs(v));
  }
  result.phase = unwrapped_phase(values);
  result.max_abs_phase = 0.0;
  for (double ph : result.phase) {
    result.max_abs_phase = std::max(result.max_abs_phase, std::abs(ph));
  }
  result.spr = result.max_abs_phase < kHalfPi;
  return result;
}

// Throws when a pole sits on or hugs the imaginary axis; false for poles in
// the open right half-plane; true when all poles are strictly left.
bool poles_strictly_left(const std::vector<Complex>& poles) {
  constexpr double axis_tol = 1e-9;
  bool left = true;
  for (const Complex& p : poles) {
    if (std::abs(p.real()) <= axis_tol * std::max(1.0, std::abs(p))) {
      throw NumericError("spr_phase_check: pole on or near the imaginary axis");
    }
    if (p.real() > 0.0) {
      left = false;
    }
  }
  return left;
}

}  // namespace

SprResult spr_phase_check(const TransferEvaluator& h, const FrequencyGrid& grid) {
  Eigen::EigenSolver<RealMatrix> es(h.A, /*computeEigenvectors=*/false);
  std::vector<Complex> poles(static_cast<std::size_t>(es.eigenvalues().size()));
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    poles[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
  }
  if (!poles_strictly_left(poles)) {
    SprResult r;
    r.spr = false;
    r.reason = "poles are not strictly in the open left half-plane";
    return r;
  }
  return spr_sweep([&h](double w) { return h.eval(Complex(0.0, w)); }, grid);
}

SprResult spr_phase_check(const RationalTF& h, const FrequencyGrid& grid) {
  h.validate();
  if (!poles_strictly_left(h.poles())) {
    SprResult r;
    r.spr = false;
    r.reason = "denominator is not Hurwitz";
    return r;
  }
  return spr_sweep([&h](double w) { return h.eval(Complex(0.0, w)); }, grid);
}

ResetStabilityReport reset_stability(const ResetClosedLoop& rcl, double beta,
                                     const RealMatrix& p_r, const FrequencyGrid& grid) {
  RealMatrix pr = p_r;
  if (pr.size() == 0) {
    pr = RealMatrix::Identity(rcl.n_reset_states, rcl.n_reset_states);
  }
  const TransferEvaluator h = hbeta_build(rcl, beta, pr);
  ResetStabilityReport report;
  report.beta = beta;
  report.P_R = pr;
  report.detail = spr_phase_check(h, grid);
  report.max_abs_phase = report.detail.max_abs_phase;
  report.spr = report.detail.spr;
  report.verdict = report.spr ? Verdict::Stable : Verdict::Inconclusive;
  return report;
}

std::vector<BetaInterval> beta_range(const std::function<bool(double)>& spr_at_beta,
                                     double beta_min, double beta_max, double step) {
  if (!(beta_min < beta_max) || !(step > 0.0)) {
    throw std::invalid_argument("beta_range: need beta_min < beta_max and step > 0");
  }

  std::vector<double> betas;
  for (double b = beta_min; b < beta_max + step * 0.5; b += step) {
    betas.push_back(std::min(b, beta_max));
  }
  std::vector<char> inside(betas.size());
  for (std::size_t i = 0; i < betas.size(); ++i) {
    inside[i] = spr_at_beta(betas[i]) ? 1 : 0;
  }

  auto bisect = [&](double lo, double hi) {
    // invariant: spr(lo) != spr(hi)
    const bool lo_val = spr_at_beta(lo);
    while (hi - lo > step / 100.0) {
      const double mid = 0.5 * (lo + hi);
      if (spr_at_beta(mid) == lo_val) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  };

  std::vector<BetaInterval> out;
  std::optional<double> open_lower;
  if (inside[0]) {
    open_lower = beta_min;
  }
  for (std::size_t i = 1; i < betas.size(); ++i) {
    if (inside[i] && !inside[i - 1]) {
      open_lower = bisect(betas[i - 1], betas[i]);
    } else if (!inside[i] && inside[i - 1]) {
      out.push_back({open_lower.value_or(beta_min), bisect(betas[i - 1], betas[i])});
      open_lower.reset();
    }
  }
  if (open_lower.has_value()) {
    out.push_back({*open_lower, beta_max});
  }
  return out;
}

}  // namespace fohs
