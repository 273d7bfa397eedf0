#include "fohs/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <numbers>

namespace fohs {

namespace {

void require_square(const Eigen::Index rows, const Eigen::Index cols, const char* what) {
  if (rows != cols || rows < 1) {
    throw std::invalid_argument(std::string(what) + ": matrix must be square, got " +
                                std::to_string(rows) + "x" + std::to_string(cols));
  }
}

void require_finite(const RealMatrix& a, const char* what) {
  if (!a.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": matrix has non-finite entries");
  }
}

}  // namespace

EigenDecomposition complex_eigendecomposition(const RealMatrix& a) {
  require_square(a.rows(), a.cols(), "complex_eigendecomposition");
  require_finite(a, "complex_eigendecomposition");

  Eigen::EigenSolver<RealMatrix> solver(a, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success) {
    throw NumericError("complex_eigendecomposition: iteration failed to converge");
  }

  EigenDecomposition dec;
  dec.eigenvalues = solver.eigenvalues();
  dec.right_eigenvectors = solver.eigenvectors();

  Eigen::JacobiSVD<ComplexMatrix> svd(dec.right_eigenvectors);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  dec.vector_condition = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
  return dec;
}

ComplexMatrix principal_matrix_power(const RealMatrix& a, double p, double cond_threshold,
                                     double branch_tol) {
  require_square(a.rows(), a.cols(), "principal_matrix_power");
  require_finite(a, "principal_matrix_power");

  const EigenDecomposition dec = complex_eigendecomposition(a);
  if (!(dec.vector_condition < cond_threshold)) {
    throw NumericError("principal_matrix_power: eigenvector condition " +
                       std::to_string(dec.vector_condition) +
                       " exceeds threshold; matrix treated as defective");
  }
  for (Eigen::Index i = 0; i < dec.eigenvalues.size(); ++i) {
    const Complex lambda = dec.eigenvalues(i);
    if (lambda == Complex(0.0, 0.0)) {
      throw NumericError("principal_matrix_power: zero eigenvalue lies on the branch cut");
    }
    if (std::numbers::pi - std::abs(std::arg(lambda)) < branch_tol) {
      throw NumericError("principal_matrix_power: eigenvalue within tolerance of the negative "
                         "real axis branch cut");
    }
  }

  // The identity exponent needs no reconstruction; returning the input keeps
  // A^1 = A exact instead of eigendecomposition-accurate.
  if (p == 1.0) {
    return a.cast<Complex>();
  }

  Eigen::VectorXcd powered(dec.eigenvalues.size());
  for (Eigen::Index i = 0; i < dec.eigenvalues.size(); ++i) {
    const Complex lambda = dec.eigenvalues(i);
    powered(i) = std::exp(p * (std::log(std::abs(lambda)) + Complex(0.0, 1.0) * std::arg(lambda)));
  }

  Eigen::PartialPivLU<ComplexMatrix> lu(dec.right_eigenvectors);
  return dec.right_eigenvectors * powered.asDiagonal() * lu.inverse();
}

RealMatrix sector_transform(const RealMatrix& a, double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) {
    throw std::invalid_argument("sector_transform: base order must lie in (0, 2)");
  }
  const ComplexMatrix powered = principal_matrix_power(-a, 1.0 / (2.0 - alpha));
  const double scale = std::max(1.0, a.norm());
  const double residue = powered.imag().cwiseAbs().maxCoeff();
  if (residue > 1e-8 * scale) {
    throw NumericError("sector_transform: imaginary residue " + std::to_string(residue) +
                       " above tolerance; spectrum is not conjugate-symmetric");
  }
  return -powered.real();
}

Complex complex_determinant(const ComplexMatrix& m) {
  require_square(m.rows(), m.cols(), "complex_determinant");
  if (!m.allFinite()) {
    throw std::invalid_argument("complex_determinant: matrix has non-finite entries");
  }
  return Eigen::PartialPivLU<ComplexMatrix>(m).determinant();
}

UnwrappedPhase unwrap_phase_lenient(const std::vector<Complex>& values) {
  if (values.empty()) {
    throw std::invalid_argument("unwrap_phase: empty sequence");
  }
  UnwrappedPhase out;
  out.phase.resize(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] == Complex(0.0, 0.0)) {
      throw NumericError("unwrap_phase: zero value at index " + std::to_string(k));
    }
  }
  out.phase[0] = std::arg(values[0]);
  for (std::size_t k = 1; k < values.size(); ++k) {
    const double inc = std::arg(values[k] * std::conj(values[k - 1]));
    if (std::abs(inc) > std::numbers::pi / 2.0) {
      out.coarse_steps.push_back(k);
    }
    out.phase[k] = out.phase[k - 1] + inc;
  }
  return out;
}

std::vector<double> unwrapped_phase(const std::vector<Complex>& values) {
  UnwrappedPhase res = unwrap_phase_lenient(values);
  if (!res.coarse_steps.empty()) {
    throw GridTooCoarse("unwrapped_phase: increment above pi/2 at index " +
                        std::to_string(res.coarse_steps.front()) + "; refine the grid");
  }
  return std::move(res.phase);
}

bool is_positive_definite(const RealMatrix& p) {
  if (p.rows() != p.cols() || p.rows() < 1) {
    return false;
  }
  const double scale = p.norm();
  if (!(scale > 0.0) || (p - p.transpose()).norm() >= 1e-9 * scale) {
    return false;
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(0.5 * (p + p.transpose()),
                                               Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0) > 0.0;
}

RealMatrix solve_lyapunov(const RealMatrix& a, const RealMatrix& q) {
  require_square(a.rows(), a.cols(), "solve_lyapunov");
  const Eigen::Index n = a.rows();
  if (n > 64) {
    throw std::invalid_argument("solve_lyapunov: dimension cap is 64");
  }
  if (q.rows() != n || q.cols() != n) {
    throw std::invalid_argument("solve_lyapunov: Q must match the dimension of A");
  }
  if ((q - q.transpose()).norm() > 1e-9 * std::max(1.0, q.norm())) {
    throw std::invalid_argument("solve_lyapunov: Q must be symmetric");
  }

  // Stacked system (I (x) A^T + A^T (x) I) vec(P) = -vec(Q), column-major vec.
  const RealMatrix at = a.transpose();
  RealMatrix big = RealMatrix::Zero(n * n, n * n);
  for (Eigen::Index col = 0; col < n; ++col) {
    big.block(col * n, col * n, n, n) += at;
  }
  for (Eigen::Index bc = 0; bc < n; ++bc) {
    for (Eigen::Index br = 0; br < n; ++br) {
      big.block(br * n, bc * n, n, n) += at(br, bc) * RealMatrix::Identity(n, n);
    }
  }

  Eigen::VectorXd rhs(n * n);
  for (Eigen::Index col = 0; col < n; ++col) {
    rhs.segment(col * n, n) = -q.col(col);
  }

  Eigen::FullPivLU<RealMatrix> lu(big);
  if (!lu.isInvertible()) {
    throw NumericError("solve_lyapunov: stacked system is singular; A is not Hurwitz "
                       "(eigenvalue pair summing to zero)");
  }
  const Eigen::VectorXd sol = lu.solve(rhs);

  RealMatrix p(n, n);
  for (Eigen::Index col = 0; col < n; ++col) {
    p.col(col) = sol.segment(col * n, n);
  }
  p = 0.5 * (p + p.transpose()).eval();

  const double residual = (at * p + p * a + q).norm();
  if (residual > 1e-9 * std::max(1.0, q.norm())) {
    throw NumericError("solve_lyapunov: residual " + std::to_string(residual) +
                       " above tolerance");
  }
  return p;
}

}  // namespace fohs
