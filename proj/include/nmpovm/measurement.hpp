#pragma once

#include "nmpovm/basis.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace nmpovm {

/// One admissible (N, M) family at a given dimension. The defining count
/// constraint is N(M - 1) = d^2 - 1; tags mark the named special families
/// and projective_possible records whether M >= d (rank-1 elements need at
/// least d outcomes per POVM).
struct admissible_class {
  int num_povms = 0;     // N
  int num_outcomes = 0;  // M
  std::vector<std::string> tags;
  bool projective_possible = false;
};

namespace detail {

inline std::vector<std::string> class_tags(int d, int num_outcomes) {
  std::vector<std::string> tags;
  if (num_outcomes == d * d) tags.push_back("SIC");
  if (num_outcomes == d) tags.push_back("MUM");
  if (num_outcomes == 2) tags.push_back("M=2");
  if (num_outcomes == d + 2) tags.push_back("M=d+2");
  return tags;
}

}  // namespace detail

/// All (N, M) with N(M - 1) = d^2 - 1, ascending in M. One family per
/// divisor of d^2 - 1; the four canonical families (SIC, MUM, M=2, M=d+2)
/// always appear, and dimensions whose d^2 - 1 has further divisors get
/// additional untagged rows.
inline std::vector<admissible_class> admissible_pairs(int d) {
  if (d < 2)
    throw std::invalid_argument("admissible_pairs: dimension must be at least 2");
  const int total = d * d - 1;
  std::vector<admissible_class> out;
  for (int q = 1; q <= total; ++q) {
    if (total % q != 0) continue;
    admissible_class c;
    c.num_outcomes = q + 1;
    c.num_povms = total / q;
    c.tags = detail::class_tags(d, c.num_outcomes);
    c.projective_possible = c.num_outcomes >= d;
    out.push_back(std::move(c));
  }
  return out;
}

/// Defining parameters of an (N, M)-POVM family. w, x, y, z are the four
/// trace values: Tr E = w, Tr E^2 = x, Tr(E E') = y within a POVM, and z
/// across POVMs. Only x is free; the admissible window is
/// d/M^2 < x <= min(d^2/M^2, d/M). t is the construction parameter that x
/// derives from: x = d/M^2 + t^2 (M - 1)(sqrt(M) + 1)^2.
struct measurement_params {
  int dim = 0;
  int num_povms = 0;
  int num_outcomes = 0;
  double w = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double t = 0.0;
};

namespace detail {

inline double y_from_x(int dim, int num_outcomes, double x) {
  const double m = num_outcomes;
  return (dim - m * x) / (m * (m - 1.0));
}

inline measurement_params make_params(int dim, int num_povms, int num_outcomes, double t) {
  measurement_params p;
  p.dim = dim;
  p.num_povms = num_povms;
  p.num_outcomes = num_outcomes;
  const double m = num_outcomes;
  const double root_m = std::sqrt(m);
  p.w = dim / m;
  p.z = dim / (m * m);
  p.x = p.z + t * t * (m - 1.0) * (root_m + 1.0) * (root_m + 1.0);
  p.y = y_from_x(dim, num_outcomes, p.x);
  p.t = t;
  return p;
}

inline void require_grouping(const grouped_basis& g, const char* who) {
  if (g.dim < 2 || g.n_groups < 1 || g.group_size < 1)
    throw std::invalid_argument(std::string(who) + ": malformed grouping");
  if (g.n_groups * g.group_size != g.dim * g.dim - 1)
    throw std::invalid_argument(std::string(who) + ": " + std::to_string(g.n_groups) +
                                " groups of " + std::to_string(g.group_size) +
                                " do not match dimension " + std::to_string(g.dim));
  if (static_cast<int>(g.ops.size()) != g.n_groups)
    throw std::invalid_argument(std::string(who) + ": grouping holds wrong group count");
  for (const auto& row : g.ops) {
    if (static_cast<int>(row.size()) != g.group_size)
      throw std::invalid_argument(std::string(who) + ": ragged grouping");
    for (const auto& op : row)
      if (op.rows() != g.dim || op.cols() != g.dim)
        throw std::invalid_argument(std::string(who) + ": operator shape mismatch");
  }
}

}  // namespace detail

/// N compatible POVMs of M elements each, elements[a][k] being the k-th
/// element of the a-th POVM. Invariants (enforced by assemble, measured by
/// validate_symmetry): each POVM sums to the identity, every element is PSD,
/// and all pairwise traces take the family values in params.
struct symmetric_measurement {
  measurement_params params;
  std::vector<std::vector<cmatrix>> elements;
  std::string basis_id;
  std::vector<int> permutation;
};

/// The N x M array of traceless Hermitian directions the construction mixes
/// into the identity. Group sums S_a = sum_k ops[a][k] enter as
/// h[a][k] = S_a - sqrt(M)(sqrt(M)+1) ops[a][k] for k < M - 1 and
/// h[a][M-1] = (sqrt(M)+1) S_a; each row itself sums to zero.
inline std::vector<std::vector<cmatrix>> build_h_operators(const grouped_basis& g) {
  detail::require_grouping(g, "build_h_operators");
  const int m = g.group_size + 1;
  const double root_m = std::sqrt(static_cast<double>(m));
  const double shift = root_m * (root_m + 1.0);
  std::vector<std::vector<cmatrix>> h(g.n_groups);
  for (int a = 0; a < g.n_groups; ++a) {
    cmatrix group_sum = cmatrix::Zero(g.dim, g.dim);
    for (const auto& op : g.ops[a]) group_sum += op;
    h[a].resize(m);
    for (int k = 0; k + 1 < m; ++k) h[a][k] = group_sum - shift * g.ops[a][k];
    h[a][m - 1] = (root_m + 1.0) * group_sum;
  }
  return h;
}

/// Closed interval of construction parameters t for which every element
/// I/M + t h stays positive semidefinite. Contains 0 in the interior.
struct t_interval {
  double t_min = 0.0;
  double t_max = 0.0;
};

inline t_interval t_range(const std::vector<std::vector<cmatrix>>& h_ops) {
  if (h_ops.empty() || h_ops.front().empty())
    throw std::invalid_argument("t_range: empty operator array");
  const int m = static_cast<int>(h_ops.front().size());
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& row : h_ops) {
    if (static_cast<int>(row.size()) != m)
      throw std::invalid_argument("t_range: ragged operator array");
    for (const auto& h : row) {
      const rvector ev = herm_eigenvalues(h);
      lo = std::min(lo, ev(0));
      hi = std::max(hi, ev(ev.size() - 1));
    }
  }
  constexpr double tiny = 1e-14;
  if (!(hi > tiny) || !(lo < -tiny))
    throw std::domain_error(
        "t_range: operators have no two-sided spectrum (degenerate grouping); "
        "the parameter range is undefined");
  return {-1.0 / (m * hi), 1.0 / (m * (-lo))};
}

/// Build the measurement E[a][k] = I/M + t h[a][k] from a grouping. t may be
/// anywhere in t_range (t = 0 gives the degenerate family with every element
/// I/M, which fails informational completeness but is a valid measurement).
inline symmetric_measurement assemble(const grouped_basis& g, double t,
                                      const tolerances& tol = default_tolerances()) {
  const auto h = build_h_operators(g);
  const int m = g.group_size + 1;
  const cmatrix base = cmatrix::Identity(g.dim, g.dim) / static_cast<double>(m);
  symmetric_measurement meas;
  meas.params = detail::make_params(g.dim, g.n_groups, m, t);
  meas.basis_id = g.basis_id;
  meas.permutation = g.permutation;
  meas.elements.assign(g.n_groups, std::vector<cmatrix>(m));
  for (int a = 0; a < g.n_groups; ++a)
    for (int k = 0; k < m; ++k) {
      cmatrix e = base + t * h[a][k];
      const double lam = min_eigenvalue(e);
      if (lam < -tol.positivity) {
        const t_interval range = t_range(h);
        std::ostringstream msg;
        msg << "assemble: t = " << t << " leaves element (povm " << a << ", outcome "
            << k << ") with eigenvalue " << lam << "; admissible range is ["
            << range.t_min << ", " << range.t_max << "]";
        throw std::domain_error(msg.str());
      }
      meas.elements[a][k] = std::move(e);
    }
  return meas;
}

/// Measured deviations of a candidate measurement from its declared family
/// values, plus the structural checks (completeness, positivity, parameter
/// window). passed iff everything is within tol.
struct symmetry_report {
  double max_trace_dev = 0.0;         // |Tr E - w|
  double max_self_overlap_dev = 0.0;  // |Tr E^2 - x|
  double max_intra_overlap_dev = 0.0; // |Tr(E E') - y|, same POVM
  double max_inter_overlap_dev = 0.0; // |Tr(E E') - z|, different POVMs
  double completeness_defect = 0.0;   // max|sum_k E[a][k] - I|
  double min_element_eigenvalue = 0.0;
  bool window_ok = false;             // d/M^2 < x <= min(d^2/M^2, d/M)
  bool intra_nonneg = false;          // y >= 0
  bool passed = false;
};

inline symmetry_report validate_symmetry(const symmetric_measurement& meas,
                                         double tol = default_tolerances().symmetry) {
  const auto& p = meas.params;
  if (p.dim < 2 || p.num_povms < 1 || p.num_outcomes < 2)
    throw std::invalid_argument("validate_symmetry: malformed parameters");
  if (static_cast<int>(meas.elements.size()) != p.num_povms)
    throw std::invalid_argument("validate_symmetry: wrong POVM count");
  symmetry_report r;
  r.min_element_eigenvalue = std::numeric_limits<double>::infinity();
  const cmatrix identity = cmatrix::Identity(p.dim, p.dim);
  std::vector<const cmatrix*> flat;
  std::vector<int> povm_of;
  for (int a = 0; a < p.num_povms; ++a) {
    const auto& row = meas.elements[a];
    if (static_cast<int>(row.size()) != p.num_outcomes)
      throw std::invalid_argument("validate_symmetry: wrong outcome count in povm " +
                                  std::to_string(a));
    cmatrix sum = cmatrix::Zero(p.dim, p.dim);
    for (const auto& e : row) {
      if (e.rows() != p.dim || e.cols() != p.dim)
        throw std::invalid_argument("validate_symmetry: element shape mismatch");
      sum += e;
      r.max_trace_dev = std::max(r.max_trace_dev, std::abs(e.trace() - complexd(p.w)));
      r.min_element_eigenvalue = std::min(r.min_element_eigenvalue, min_eigenvalue(e));
      flat.push_back(&e);
      povm_of.push_back(a);
    }
    r.completeness_defect =
        std::max(r.completeness_defect, (sum - identity).cwiseAbs().maxCoeff());
  }
  for (std::size_t i = 0; i < flat.size(); ++i)
    for (std::size_t j = i; j < flat.size(); ++j) {
      const double overlap = hs_inner(*flat[i], *flat[j]).real();
      if (i == j)
        r.max_self_overlap_dev = std::max(r.max_self_overlap_dev, std::abs(overlap - p.x));
      else if (povm_of[i] == povm_of[j])
        r.max_intra_overlap_dev = std::max(r.max_intra_overlap_dev, std::abs(overlap - p.y));
      else
        r.max_inter_overlap_dev = std::max(r.max_inter_overlap_dev, std::abs(overlap - p.z));
    }
  const double m = p.num_outcomes;
  const double upper = std::min(static_cast<double>(p.dim) * p.dim / (m * m), p.dim / m);
  r.window_ok = p.x > p.z + default_tolerances().window_margin && p.x <= upper + tol;
  r.intra_nonneg = p.y >= -tol;
  r.passed = r.max_trace_dev <= tol && r.max_self_overlap_dev <= tol &&
             r.max_intra_overlap_dev <= tol && r.max_inter_overlap_dev <= tol &&
             r.completeness_defect <= tol && r.min_element_eigenvalue >= -tol &&
             r.window_ok && r.intra_nonneg;
  return r;
}

/// Rank of the NM x NM Gram matrix of the elements; informationally complete
/// iff the rank reaches d^2 (the elements then span all Hermitian operators).
struct ic_result {
  bool complete = false;
  int rank = 0;
};

inline ic_result ic_check(const symmetric_measurement& meas,
                          double rel_tol = default_tolerances().rank_rel) {
  const int n = meas.params.num_povms * meas.params.num_outcomes;
  rmatrix gram(n, n);
  std::vector<const cmatrix*> flat;
  flat.reserve(n);
  for (const auto& row : meas.elements)
    for (const auto& e : row) flat.push_back(&e);
  if (static_cast<int>(flat.size()) != n)
    throw std::invalid_argument("ic_check: element count does not match parameters");
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      gram(i, j) = hs_inner(*flat[i], *flat[j]).real();
      gram(j, i) = gram(i, j);
    }
  Eigen::SelfAdjointEigenSolver<rmatrix> solver(gram, Eigen::EigenvaluesOnly);
  const rvector ev = solver.eigenvalues();
  const double top = ev(ev.size() - 1);
  ic_result r;
  if (top > 0.0)
    for (int i = 0; i < ev.size(); ++i)
      if (ev(i) > rel_tol * top) ++r.rank;
  r.complete = r.rank == meas.params.dim * meas.params.dim;
  return r;
}

/// Dual frame F[a][k] = (E[a][k] - A I)/(x - y) with A = ((N-1)z + y)/(Nw);
/// states reconstruct as rho = sum p[a][k] F[a][k]. Singular exactly when x
/// sits at the degenerate value d/M^2 (t = 0).
inline std::vector<std::vector<cmatrix>> dual_frame(
    const symmetric_measurement& meas,
    const tolerances& tol = default_tolerances()) {
  const auto& p = meas.params;
  if (p.x - p.z <= tol.window_margin)
    throw std::domain_error(
        "dual_frame: x is at the degenerate value d/M^2; the frame is singular");
  const double shift = ((p.num_povms - 1) * p.z + p.y) / (p.num_povms * p.w);
  const double scale = 1.0 / (p.x - p.y);
  const cmatrix identity = cmatrix::Identity(p.dim, p.dim);
  std::vector<std::vector<cmatrix>> f(meas.elements.size());
  for (std::size_t a = 0; a < meas.elements.size(); ++a) {
    f[a].reserve(meas.elements[a].size());
    for (const auto& e : meas.elements[a])
      f[a].push_back(scale * (e - shift * identity));
  }
  return f;
}

/// Outcome probability table, rows indexed by POVM and columns by outcome.
using probability_table = rmatrix;

inline probability_table probabilities(const symmetric_measurement& meas,
                                       const cmatrix& rho,
                                       const tolerances& tol = default_tolerances()) {
  const auto& p = meas.params;
  require_state(rho, p.dim, tol);
  probability_table table(p.num_povms, p.num_outcomes);
  for (int a = 0; a < p.num_povms; ++a)
    for (int k = 0; k < p.num_outcomes; ++k) {
      double prob = hs_inner(meas.elements[a][k], rho).real();
      if (prob < -1e-12) {
        std::ostringstream msg;
        msg << "probabilities: outcome (" << a << ", " << k << ") has probability "
            << prob << "; measurement or state violates positivity";
        throw std::domain_error(msg.str());
      }
      table(a, k) = std::max(prob, 0.0);
    }
  return table;
}

/// Linear inversion through the dual frame. Exact (up to roundoff) for any
/// informationally complete member of the family.
inline cmatrix reconstruct(const symmetric_measurement& meas, const probability_table& table,
                           const tolerances& tol = default_tolerances()) {
  const auto& p = meas.params;
  if (p.num_povms * (p.num_outcomes - 1) != p.dim * p.dim - 1)
    throw std::invalid_argument("reconstruct: family is not informationally complete");
  if (table.rows() != p.num_povms || table.cols() != p.num_outcomes)
    throw std::invalid_argument("reconstruct: probability table is " +
                                std::to_string(table.rows()) + "x" +
                                std::to_string(table.cols()) + ", expected " +
                                std::to_string(p.num_povms) + "x" +
                                std::to_string(p.num_outcomes));
  const auto frame = dual_frame(meas, tol);
  cmatrix rho = cmatrix::Zero(p.dim, p.dim);
  for (int a = 0; a < p.num_povms; ++a)
    for (int k = 0; k < p.num_outcomes; ++k) rho += table(a, k) * frame[a][k];
  return rho;
}

/// Invert the construction: recover the grouped basis from the elements and
/// the stored t. G[a][k] = (I + sqrt(M) E[a][M-1] - sqrt(M)(sqrt(M)+1)
/// E[a][k]) / (t M (sqrt(M)+1)^2).
inline grouped_basis recover_basis(const symmetric_measurement& meas) {
  const auto& p = meas.params;
  if (p.t == 0.0)
    throw std::domain_error("recover_basis: t = 0 carries no basis information");
  const double m = p.num_outcomes;
  const double root_m = std::sqrt(m);
  const double denom = p.t * m * (root_m + 1.0) * (root_m + 1.0);
  const cmatrix identity = cmatrix::Identity(p.dim, p.dim);
  grouped_basis g;
  g.dim = p.dim;
  g.n_groups = p.num_povms;
  g.group_size = p.num_outcomes - 1;
  g.basis_id = meas.basis_id;
  g.permutation = meas.permutation;
  g.ops.assign(p.num_povms, std::vector<cmatrix>(g.group_size));
  for (int a = 0; a < p.num_povms; ++a) {
    const cmatrix& last = meas.elements[a][p.num_outcomes - 1];
    for (int k = 0; k + 1 < p.num_outcomes; ++k)
      g.ops[a][k] =
          (identity + root_m * last - root_m * (root_m + 1.0) * meas.elements[a][k]) / denom;
  }
  return g;
}

/// Where x sits in its window: projective iff x = d^2/M^2 (elements are
/// scaled rank-1 projectors, requires M >= d), optimal iff x reaches
/// min(d^2/M^2, d/M).
struct classification {
  bool projective = false;
  bool optimal = false;
  std::vector<std::string> tags;
};

inline classification classify(const symmetric_measurement& meas,
                               double tol = default_tolerances().classification) {
  const auto& p = meas.params;
  const double m = p.num_outcomes;
  const double proj_x = static_cast<double>(p.dim) * p.dim / (m * m);
  const double max_x = std::min(proj_x, p.dim / m);
  classification c;
  c.projective = std::abs(p.x - proj_x) <= tol;
  c.optimal = std::abs(p.x - max_x) <= tol;
  c.tags = detail::class_tags(p.dim, p.num_outcomes);
  return c;
}

/// Elementwise transpose of every element. Preserves all family values and
/// positivity, so the result is a valid measurement of the same class.
inline symmetric_measurement transpose_elements(const symmetric_measurement& meas) {
  symmetric_measurement out = meas;
  for (auto& row : out.elements)
    for (auto& e : row) e = e.transpose().eval();
  out.basis_id = meas.basis_id + ":transposed";
  return out;
}

}  // namespace nmpovm
