#pragma once

// Independent oracles for the test suite. Everything here recomputes expected
// values through a different route than the library (closed-form spectra,
// combinatorial coefficient bookkeeping, bisection), so agreement is evidence
// rather than tautology.

#include <nmpovm/basis.hpp>
#include <nmpovm/measurement.hpp>

#include <cmath>
#include <random>
#include <vector>

namespace oracle {

using nmpovm::cmatrix;
using nmpovm::complexd;

inline double max_abs_diff(const cmatrix& a, const cmatrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

inline cmatrix random_hermitian(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  cmatrix g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = complexd(gauss(rng), gauss(rng));
  return ((g + g.adjoint()) * 0.5).eval();
}

// Eigenvalues of a 2x2 Hermitian matrix from the quadratic formula.
inline std::array<double, 2> eig2(const cmatrix& a) {
  const double mean = 0.5 * (a(0, 0).real() + a(1, 1).real());
  const double half_gap = 0.5 * (a(0, 0).real() - a(1, 1).real());
  const double r = std::sqrt(half_gap * half_gap + std::norm(a(0, 1)));
  return {mean - r, mean + r};
}

// Eigenvalues of a 3x3 Hermitian matrix via the trigonometric solution of the
// characteristic polynomial (ascending).
inline std::array<double, 3> eig3(const cmatrix& a) {
  const double q = (a(0, 0).real() + a(1, 1).real() + a(2, 2).real()) / 3.0;
  const double p1 = std::norm(a(0, 1)) + std::norm(a(0, 2)) + std::norm(a(1, 2));
  const double p2 = std::pow(a(0, 0).real() - q, 2) + std::pow(a(1, 1).real() - q, 2) +
                    std::pow(a(2, 2).real() - q, 2) + 2.0 * p1;
  if (p2 < 1e-30) return {q, q, q};
  const double p = std::sqrt(p2 / 6.0);
  cmatrix b = (a - q * cmatrix::Identity(3, 3)) / p;
  const complexd det = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) -
                       b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0)) +
                       b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
  const double r = std::clamp(det.real() / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double hi = q + 2.0 * p * std::cos(phi);
  const double lo = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
  return {lo, 3.0 * q - hi - lo, hi};
}

// Expected overlaps Tr(h[a][k] h[b][l]) from the grouping combinatorics
// alone: each h operator is a known coefficient vector over orthonormal
// basis operators, so overlaps reduce to dot products of coefficients.
inline double h_overlap_from_coefficients(const nmpovm::grouped_basis& g, int a, int k,
                                          int b, int l) {
  const int gs = g.group_size;
  const int m = gs + 1;
  const double root_m = std::sqrt(static_cast<double>(m));
  const double shift = root_m * (root_m + 1.0);
  const int total = g.n_groups * gs;
  const auto coeffs = [&](int grp, int out) {
    std::vector<double> c(total, 0.0);
    for (int j = 0; j < gs; ++j) {
      const int flat = g.permutation[grp * gs + j];
      c[flat] += out == m - 1 ? root_m + 1.0 : 1.0;
    }
    if (out < m - 1) c[g.permutation[grp * gs + out]] -= shift;
    return c;
  };
  const auto ca = coeffs(a, k);
  const auto cb = coeffs(b, l);
  double dot = 0.0;
  for (int i = 0; i < total; ++i) dot += ca[i] * cb[i];
  return dot;
}

// Largest t >= 0 keeping every element I/M + t h positive semidefinite,
// found by doubling + bisection instead of the spectral formula.
inline double bisect_positive_t(const std::vector<std::vector<cmatrix>>& h_ops,
                                double slack = 1e-12) {
  const int m = static_cast<int>(h_ops.front().size());
  const int d = static_cast<int>(h_ops.front().front().rows());
  const auto feasible = [&](double t) {
    for (const auto& row : h_ops)
      for (const auto& h : row) {
        const cmatrix e = cmatrix::Identity(d, d) / static_cast<double>(m) + t * h;
        if (nmpovm::min_eigenvalue(e) < -slack) return false;
      }
    return true;
  };
  double hi = 1e-3;
  while (feasible(hi)) hi *= 2.0;
  double lo = 0.0;
  for (int iter = 0; iter < 200 && hi - lo > 1e-12; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Partial trace over the second factor of a d_a x d_b bipartite state.
inline cmatrix partial_trace_b(const cmatrix& rho, int dim_a, int dim_b) {
  cmatrix out = cmatrix::Zero(dim_a, dim_a);
  for (int i = 0; i < dim_a; ++i)
    for (int j = 0; j < dim_a; ++j)
      for (int mIdx = 0; mIdx < dim_b; ++mIdx)
        out(i, j) += rho(i * dim_b + mIdx, j * dim_b + mIdx);
  return out;
}

}  // namespace oracle
