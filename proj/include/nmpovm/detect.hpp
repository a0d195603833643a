#pragma once

#include "nmpovm/info.hpp"

#include <optional>

namespace nmpovm {

/// Joint outcome correlations P(ra, cb) = Tr[rho (E_A (x) E_B)], rows
/// flattening the A side as a * M_A + k and columns the B side likewise.
using correlation_table = rmatrix;

inline correlation_table correlation_matrix(const cmatrix& rho,
                                            const symmetric_measurement& meas_a,
                                            const symmetric_measurement& meas_b,
                                            const tolerances& tol = default_tolerances()) {
  const int da = meas_a.params.dim;
  const int db = meas_b.params.dim;
  require_state(rho, da * db, tol);
  const int rows = meas_a.params.num_povms * meas_a.params.num_outcomes;
  const int cols = meas_b.params.num_povms * meas_b.params.num_outcomes;
  correlation_table table(rows, cols);
  // Contract the B side first: T(i, j) = Tr(rho_block(i, j) E_B), then each
  // A element costs only a d_A x d_A trace.
  cmatrix t(da, da);
  int cb = 0;
  for (const auto& row_b : meas_b.elements)
    for (const auto& eb : row_b) {
      for (int i = 0; i < da; ++i)
        for (int j = 0; j < da; ++j)
          t(i, j) = rho.block(i * db, j * db, db, db).cwiseProduct(eb.transpose()).sum();
      int ra = 0;
      for (const auto& row_a : meas_a.elements)
        for (const auto& ea : row_a) {
          table(ra, cb) = ea.transpose().cwiseProduct(t).sum().real();
          ++ra;
        }
      ++cb;
    }
  return table;
}

/// Outcome of one separability criterion: the state is flagged entangled iff
/// value exceeds bound by more than the detection margin.
struct criterion_result {
  double value = 0.0;
  double bound = 0.0;
  bool entangled = false;
};

/// Trace-norm criterion: every separable state obeys
/// ||P||_tr <= sqrt(bound_a * bound_b) with the two sides' coincidence bounds.
inline criterion_result criterion_trace_norm(const correlation_table& table,
                                             double coincidence_bound_a,
                                             double coincidence_bound_b,
                                             const tolerances& tol = default_tolerances()) {
  criterion_result r;
  r.value = trace_norm(table);
  r.bound = std::sqrt(coincidence_bound_a * coincidence_bound_b);
  r.entangled = r.value > r.bound + tol.detection_margin;
  return r;
}

/// Trace criterion for square configurations (both sides the same family at
/// the same x): every separable state obeys Tr P <= bound. Tr P never
/// exceeds ||P||_tr, so this can only be tighter in the flagged direction.
inline criterion_result criterion_trace(const correlation_table& table,
                                        double coincidence_bound_value,
                                        const tolerances& tol = default_tolerances()) {
  if (table.rows() != table.cols())
    throw std::invalid_argument("criterion_trace: correlation matrix is " +
                                std::to_string(table.rows()) + "x" +
                                std::to_string(table.cols()) +
                                "; the trace criterion needs a square configuration");
  criterion_result r;
  r.value = table.trace();
  const double tn = trace_norm(table);
  if (r.value > tn + 1e-9)
    throw std::logic_error("criterion_trace: trace exceeds the trace norm; "
                           "numerical failure");
  r.bound = coincidence_bound_value;
  r.entangled = r.value > r.bound + tol.detection_margin;
  return r;
}

/// Both criteria evaluated on one bipartite state. The trace criterion is
/// present only when the two sides form a square configuration (equal
/// dimension, class, and x); mismatched families are never compared by trace.
struct detection_report {
  int dim_a = 0;
  int dim_b = 0;
  std::string class_a;  // "N,M"
  std::string class_b;
  bool b_side_transposed = false;
  criterion_result trace_norm_criterion;
  std::optional<criterion_result> trace_criterion;
};

namespace detail {

inline std::string class_label(const measurement_params& p) {
  return std::to_string(p.num_povms) + "," + std::to_string(p.num_outcomes);
}

inline bool square_configuration(const measurement_params& a, const measurement_params& b) {
  return a.dim == b.dim && a.num_povms == b.num_povms &&
         a.num_outcomes == b.num_outcomes && std::abs(a.x - b.x) <= 1e-10;
}

}  // namespace detail

inline detection_report detect(const cmatrix& rho, const symmetric_measurement& meas_a,
                               const symmetric_measurement& meas_b, bool transpose_b = false,
                               const tolerances& tol = default_tolerances()) {
  const symmetric_measurement& mb = meas_b;
  const symmetric_measurement mb_t = transpose_b ? transpose_elements(meas_b) : symmetric_measurement{};
  const symmetric_measurement& used_b = transpose_b ? mb_t : mb;
  detection_report rep;
  rep.dim_a = meas_a.params.dim;
  rep.dim_b = used_b.params.dim;
  rep.class_a = detail::class_label(meas_a.params);
  rep.class_b = detail::class_label(used_b.params);
  rep.b_side_transposed = transpose_b;
  const auto table = correlation_matrix(rho, meas_a, used_b, tol);
  const double bound_a = coincidence_bound(meas_a.params.dim, meas_a.params.num_outcomes,
                                           meas_a.params.x);
  const double bound_b = coincidence_bound(used_b.params.dim, used_b.params.num_outcomes,
                                           used_b.params.x);
  rep.trace_norm_criterion = criterion_trace_norm(table, bound_a, bound_b, tol);
  if (detail::square_configuration(meas_a.params, used_b.params))
    rep.trace_criterion = criterion_trace(table, bound_a, tol);
  return rep;
}

/// Maximally entangled state |Phi><Phi| with |Phi> = sum_i |ii>/sqrt(d).
inline cmatrix bell_state(int d) {
  if (d < 2) throw std::invalid_argument("bell_state: dimension must be at least 2");
  cmatrix rho = cmatrix::Zero(d * d, d * d);
  const double v = 1.0 / d;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) rho(i * d + i, j * d + j) = v;
  return rho;
}

/// Isotropic family p |Phi><Phi| + (1 - p) I/d^2, separable iff p <= 1/(d+1).
inline cmatrix isotropic(int d, double p) {
  if (p < 0.0 || p > 1.0)
    throw std::domain_error("isotropic: mixing parameter " + std::to_string(p) +
                            " outside [0, 1]");
  const int dd = d * d;
  return p * bell_state(d) + (1.0 - p) * cmatrix::Identity(dd, dd) / dd;
}

/// Product state rho_a (x) rho_b; both factors are validated as states.
inline cmatrix product(const cmatrix& rho_a, const cmatrix& rho_b,
                       const tolerances& tol = default_tolerances()) {
  require_state(rho_a, static_cast<int>(rho_a.rows()), tol);
  require_state(rho_b, static_cast<int>(rho_b.rows()), tol);
  return kron(rho_a, rho_b);
}

inline cmatrix random_product(int dim_a, int dim_b, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> rank_a(1, dim_a);
  std::uniform_int_distribution<int> rank_b(1, dim_b);
  return kron(ginibre_density(dim_a, rank_a(rng), rng),
              ginibre_density(dim_b, rank_b(rng), rng));
}

/// Random separable state: a Dirichlet-weighted mixture of up to max_terms
/// random product states.
inline cmatrix random_separable(int dim_a, int dim_b, int max_terms, std::mt19937_64& rng) {
  if (max_terms < 1)
    throw std::invalid_argument("random_separable: need at least one term");
  std::uniform_int_distribution<int> term_count(1, max_terms);
  const int n = term_count(rng);
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> weights(n);
  double total = 0.0;
  for (double& w : weights) {
    w = expo(rng);
    total += w;
  }
  cmatrix rho = cmatrix::Zero(dim_a * dim_b, dim_a * dim_b);
  for (int i = 0; i < n; ++i) rho += (weights[i] / total) * random_product(dim_a, dim_b, rng);
  return rho;
}

inline cmatrix random_separable(int dim_a, int dim_b, int max_terms, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_separable(dim_a, dim_b, max_terms, rng);
}

enum class criterion_kind { trace_norm, trace };

/// One grid point of a threshold scan over the isotropic family.
struct scan_point {
  double p = 0.0;
  double trace_norm_value = 0.0;
  double trace_norm_bound = 0.0;
  double trace_value = 0.0;
  double trace_bound = 0.0;
  bool flagged_trace_norm = false;
  bool flagged_trace = false;
};

struct scan_result {
  std::optional<double> p_star;  // smallest p the selected criterion flags
  std::vector<scan_point> grid;
};

/// Scan the isotropic family isotropic(d, p) for the detection threshold of
/// the selected criterion. Both measurements must act on the same dimension;
/// any B-side transposition is applied by the caller beforehand. The
/// correlation matrix is affine in p, so the two endpoint tables determine
/// every grid point; the threshold is refined by bisection to refine_tol.
inline scan_result threshold_scan(const symmetric_measurement& meas_a,
                                  const symmetric_measurement& meas_b,
                                  criterion_kind which, int grid_points = 41,
                                  double refine_tol = 1e-6,
                                  const tolerances& tol = default_tolerances()) {
  const int d = meas_a.params.dim;
  if (meas_b.params.dim != d)
    throw std::invalid_argument("threshold_scan: sides act on different dimensions");
  if (grid_points < 2)
    throw std::invalid_argument("threshold_scan: need at least two grid points");
  const bool square = detail::square_configuration(meas_a.params, meas_b.params);
  if (which == criterion_kind::trace && !square)
    throw std::invalid_argument(
        "threshold_scan: trace criterion needs a square configuration");
  const auto table_mixed = correlation_matrix(isotropic(d, 0.0), meas_a, meas_b, tol);
  const auto table_bell = correlation_matrix(bell_state(d), meas_a, meas_b, tol);
  const double bound_a = coincidence_bound(d, meas_a.params.num_outcomes, meas_a.params.x);
  const double bound_b = coincidence_bound(d, meas_b.params.num_outcomes, meas_b.params.x);
  const double tn_bound = std::sqrt(bound_a * bound_b);

  const auto evaluate = [&](double p) {
    const correlation_table table = p * table_bell + (1.0 - p) * table_mixed;
    scan_point pt;
    pt.p = p;
    pt.trace_norm_value = trace_norm(table);
    pt.trace_norm_bound = tn_bound;
    pt.flagged_trace_norm = pt.trace_norm_value > tn_bound + tol.detection_margin;
    if (square) {
      const auto trace_res = criterion_trace(table, bound_a, tol);
      pt.trace_value = trace_res.value;
      pt.trace_bound = trace_res.bound;
      pt.flagged_trace = trace_res.entangled;
    } else {
      pt.trace_value = std::numeric_limits<double>::quiet_NaN();
      pt.trace_bound = std::numeric_limits<double>::quiet_NaN();
    }
    return pt;
  };
  const auto selected = [&](const scan_point& pt) {
    return which == criterion_kind::trace ? pt.flagged_trace : pt.flagged_trace_norm;
  };

  scan_result result;
  result.grid.reserve(grid_points);
  int first_flagged = -1;
  for (int i = 0; i < grid_points; ++i) {
    const double p = static_cast<double>(i) / (grid_points - 1);
    result.grid.push_back(evaluate(p));
    if (first_flagged < 0 && selected(result.grid.back())) first_flagged = i;
  }
  if (first_flagged < 0) return result;
  if (first_flagged == 0) {
    result.p_star = 0.0;
    return result;
  }
  double lo = result.grid[first_flagged - 1].p;  // not flagged
  double hi = result.grid[first_flagged].p;      // flagged
  while (hi - lo > refine_tol) {
    const double mid = 0.5 * (lo + hi);
    if (selected(evaluate(mid)))
      hi = mid;
    else
      lo = mid;
  }
  result.p_star = hi;
  return result;
}

}  // namespace nmpovm
