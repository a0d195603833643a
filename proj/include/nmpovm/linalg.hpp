#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace nmpovm {

using complexd = std::complex<double>;
using cmatrix = Eigen::MatrixXcd;
using rmatrix = Eigen::MatrixXd;
using rvector = Eigen::VectorXd;

/// Numerical tolerances shared across the library. Each field names the
/// class of check it guards; functions take the relevant field as their
/// default and accept an override where the contract allows one.
struct tolerances {
  double hermiticity = 1e-10;       // max|A - A^dag| budget on operator inputs
  double positivity = 1e-10;        // min-eigenvalue slack for PSD checks
  double symmetry = 1e-10;          // deviation budget for the defining trace relations
  double rank_rel = 1e-8;           // relative spectral cutoff for rank decisions
  double classification = 1e-8;     // slack when comparing x against special values
  double detection_margin = 1e-10;  // one-sided slack before a criterion flags a state
  double window_margin = 1e-12;     // strict-inequality margin at the lower x boundary
};

inline const tolerances& default_tolerances() {
  static const tolerances t{};
  return t;
}

namespace detail {

inline std::string shape_of(const cmatrix& a) {
  return std::to_string(a.rows()) + "x" + std::to_string(a.cols());
}

inline void require_square(const cmatrix& a, const char* who) {
  if (a.rows() != a.cols() || a.rows() == 0)
    throw std::invalid_argument(std::string(who) + ": matrix is " + shape_of(a) +
                                ", expected square and non-empty");
}

}  // namespace detail

/// max|A - A^dag| over entries; zero iff A is exactly Hermitian.
inline double hermiticity_defect(const cmatrix& a) {
  detail::require_square(a, "hermiticity_defect");
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

inline void require_hermitian(const cmatrix& a, const char* who,
                              double tol = default_tolerances().hermiticity) {
  const double defect = hermiticity_defect(a);
  if (!(defect <= tol)) {
    std::ostringstream msg;
    msg << who << ": input is not Hermitian, max|A - A^dag| = " << defect
        << " exceeds tolerance " << tol;
    throw std::invalid_argument(msg.str());
  }
}

/// Eigendecomposition of a Hermitian matrix.
struct spectrum {
  rvector eigenvalues;   // ascending
  cmatrix eigenvectors;  // orthonormal columns, eigenvectors[:,i] pairs with eigenvalues[i]
};

inline spectrum herm_eig(const cmatrix& a, double tol = default_tolerances().hermiticity) {
  detail::require_square(a, "herm_eig");
  require_hermitian(a, "herm_eig", tol);
  Eigen::SelfAdjointEigenSolver<cmatrix> solver(((a + a.adjoint()) * 0.5).eval());
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("herm_eig: eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

/// Eigenvalues only (ascending); cheaper than herm_eig when vectors are unused.
inline rvector herm_eigenvalues(const cmatrix& a,
                                double tol = default_tolerances().hermiticity) {
  detail::require_square(a, "herm_eigenvalues");
  require_hermitian(a, "herm_eigenvalues", tol);
  Eigen::SelfAdjointEigenSolver<cmatrix> solver(((a + a.adjoint()) * 0.5).eval(),
                                                Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("herm_eigenvalues: eigensolver did not converge");
  return solver.eigenvalues();
}

inline double min_eigenvalue(const cmatrix& a,
                             double tol = default_tolerances().hermiticity) {
  return herm_eigenvalues(a, tol)(0);
}

/// Sum of singular values. Equals the trace norm ||P||_tr; for square P it
/// dominates |Tr P|.
inline double trace_norm(const rmatrix& p) {
  if (p.rows() == 0 || p.cols() == 0)
    throw std::invalid_argument("trace_norm: matrix is empty");
  Eigen::JacobiSVD<rmatrix> svd(p);
  return svd.singularValues().sum();
}

/// Hilbert-Schmidt inner product Tr(A^dag B).
inline complexd hs_inner(const cmatrix& a, const cmatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("hs_inner: shapes " + detail::shape_of(a) + " and " +
                                detail::shape_of(b) + " do not match");
  return a.conjugate().cwiseProduct(b).sum();
}

/// Kronecker product, row-major block convention: (A (x) B)(ib+m, jb+n) = A(i,j)B(m,n).
inline cmatrix kron(const cmatrix& a, const cmatrix& b) {
  if (a.size() == 0 || b.size() == 0)
    throw std::invalid_argument("kron: factors must be non-empty");
  cmatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Tr(rho^2) with a symmetrization guard; real and in [1/d, 1] for states.
inline double purity(const cmatrix& rho) {
  detail::require_square(rho, "purity");
  return ((rho + rho.adjoint()) * 0.5).squaredNorm();
}

/// Random rank-constrained density matrix: rho = G G^dag / Tr(G G^dag) with
/// G a dim x rank matrix of iid standard complex Gaussians.
inline cmatrix ginibre_density(int dim, int rank, std::mt19937_64& rng) {
  if (dim < 1)
    throw std::invalid_argument("ginibre_density: dimension must be positive");
  if (rank < 1 || rank > dim)
    throw std::invalid_argument("ginibre_density: rank " + std::to_string(rank) +
                                " outside [1, " + std::to_string(dim) + "]");
  std::normal_distribution<double> gauss(0.0, 1.0);
  cmatrix g(dim, rank);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < rank; ++j) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      g(i, j) = complexd(re, im);
    }
  cmatrix rho = g * g.adjoint();
  rho = ((rho + rho.adjoint()) * 0.5).eval();
  rho /= rho.trace().real();
  return rho;
}

inline cmatrix random_density(int dim, int rank, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return ginibre_density(dim, rank, rng);
}

/// Deterministic per-stream seed derivation (splitmix64 step), so one master
/// seed can drive many independent generators reproducibly.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Contract check for density-matrix inputs: square of the stated dimension,
/// Hermitian, unit trace, positive semidefinite within tolerance.
inline void require_state(const cmatrix& rho, int dim,
                          const tolerances& tol = default_tolerances()) {
  if (rho.rows() != dim || rho.cols() != dim)
    throw std::invalid_argument("require_state: matrix is " + detail::shape_of(rho) +
                                ", expected " + std::to_string(dim) + "x" +
                                std::to_string(dim));
  require_hermitian(rho, "require_state", tol.hermiticity);
  const double trace_defect = std::abs(rho.trace().real() - 1.0) +
                              std::abs(rho.trace().imag());
  if (trace_defect > tol.positivity)
    throw std::invalid_argument("require_state: trace deviates from 1 by " +
                                std::to_string(trace_defect));
  const double lam = min_eigenvalue(rho, tol.hermiticity);
  if (lam < -tol.positivity) {
    std::ostringstream msg;
    msg << "require_state: matrix is not positive semidefinite, min eigenvalue = " << lam;
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace nmpovm
