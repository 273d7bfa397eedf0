#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace fohs {

using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

/// Numerical failure (defective matrix, branch cut, singular solve, divergence).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A sampled curve is too coarse for reliable phase tracking.
struct GridTooCoarse : NumericError {
  using NumericError::NumericError;
};

struct EigenDecomposition {
  Eigen::VectorXcd eigenvalues;
  ComplexMatrix right_eigenvectors;
  // 2-norm condition number of the eigenvector matrix
  double vector_condition = 0.0;
};

/// Full eigendecomposition of a real square matrix.
/// Eigenvalues of a real input come in conjugate pairs.
EigenDecomposition complex_eigendecomposition(const RealMatrix& a);

/// Principal matrix power A^p through the eigendecomposition,
/// with lambda^p = exp(p(ln|lambda| + i Arg lambda)), Arg in (-pi, pi).
///
/// Rejects defective matrices (eigenvector condition above `cond_threshold`)
/// and eigenvalues within `branch_tol` radians of the negative real axis.
ComplexMatrix principal_matrix_power(const RealMatrix& a, double p,
                                     double cond_threshold = 1e8,
                                     double branch_tol = 1e-8);

/// Maps the Matignon sector question for D^alpha x = A x, alpha in (0,1],
/// onto an ordinary half-plane question: returns -(-A)^(1/(2-alpha)).
/// The result of the power must be real up to 1e-8 * ||A||; the imaginary
/// part is checked and discarded.
RealMatrix sector_transform(const RealMatrix& a, double alpha);

/// Determinant via pivoted elimination.
Complex complex_determinant(const ComplexMatrix& m);

struct UnwrappedPhase {
  std::vector<double> phase;
  // indices k where the increment from sample k-1 to k exceeded pi/2
  std::vector<std::size_t> coarse_steps;
};

/// Continuous phase along a sampled complex curve:
///   phase[0] = Arg(values[0]),  phase[k] = phase[k-1] + Arg(values[k]/values[k-1]).
/// Zero samples are an error. Increments above pi/2 are reported so the
/// caller can refine the sampling.
UnwrappedPhase unwrap_phase_lenient(const std::vector<Complex>& values);

/// Strict variant: throws GridTooCoarse if any increment exceeds pi/2.
std::vector<double> unwrapped_phase(const std::vector<Complex>& values);

/// True iff P is symmetric to 1e-9 relative and its smallest eigenvalue is positive.
bool is_positive_definite(const RealMatrix& p);

/// Solves A^T P + P A = -Q as a dense linear system in the stacked unknowns.
/// A must be Hurwitz, Q symmetric, dimension at most 64. The residual
/// ||A^T P + P A + Q|| is verified against 1e-9 * ||Q||.
RealMatrix solve_lyapunov(const RealMatrix& a, const RealMatrix& q);

}  // namespace fohs
