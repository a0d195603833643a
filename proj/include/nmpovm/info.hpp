#pragma once

#include "nmpovm/measurement.hpp"

#include <cmath>
#include <numbers>

namespace nmpovm {

namespace detail {

inline void require_window(int dim, int num_outcomes, double x, const char* who) {
  if (dim < 2 || num_outcomes < 2)
    throw std::invalid_argument(std::string(who) + ": malformed family parameters");
  const double m = num_outcomes;
  const double lower = dim / (m * m);
  const double upper = std::min(static_cast<double>(dim) * dim / (m * m), dim / m);
  if (!(x > lower + default_tolerances().window_margin) || !(x <= upper + 1e-9)) {
    std::ostringstream msg;
    msg << who << ": x = " << x << " outside the admissible window (" << lower << ", "
        << upper << "]";
    throw std::domain_error(msg.str());
  }
}

}  // namespace detail

/// Index of coincidence sum_{a,k} p[a][k]^2 of an outcome table.
inline double index_of_coincidence(const probability_table& table) {
  if (table.size() == 0)
    throw std::invalid_argument("index_of_coincidence: empty table");
  return table.array().square().sum();
}

/// The index of coincidence depends on the state only through its purity:
/// C = [d (M^2 x - d) Tr(rho^2) + d^3 - M^2 x] / (d M (M - 1)).
inline double coincidence_closed_form(int dim, int num_outcomes, double x,
                                      double state_purity) {
  detail::require_window(dim, num_outcomes, x, "coincidence_closed_form");
  if (state_purity < 1.0 / dim - 1e-9 || state_purity > 1.0 + 1e-9)
    throw std::domain_error("coincidence_closed_form: purity " +
                            std::to_string(state_purity) + " outside [1/d, 1]");
  const double d = dim;
  const double m = num_outcomes;
  return (d * (m * m * x - d) * state_purity + d * d * d - m * m * x) /
         (d * m * (m - 1.0));
}

/// Purity-independent upper bound on the index of coincidence:
/// C <= ((d - 1)/d) (d^2 + M^2 x) / (M (M - 1)), attained by pure states.
inline double coincidence_bound(int dim, int num_outcomes, double x) {
  detail::require_window(dim, num_outcomes, x, "coincidence_bound");
  const double d = dim;
  const double m = num_outcomes;
  return ((d - 1.0) / d) * (d * d + m * m * x) / (m * (m - 1.0));
}

/// coincidence_bound at the projective value x = d^2/M^2, where it reduces
/// to 2d(d - 1)/(M(M - 1)).
inline double projective_coincidence_bound(int dim, int num_outcomes) {
  const double d = dim;
  const double m = num_outcomes;
  if (num_outcomes < dim)
    throw std::domain_error("projective_coincidence_bound: projective families need M >= d");
  return 2.0 * d * (d - 1.0) / (m * (m - 1.0));
}

/// Index of coincidence of a state under a measurement, with the closed form
/// and the purity-independent bound alongside for cross-checking.
struct coincidence_report {
  double value = 0.0;        // sum of squared outcome probabilities
  double closed_form = 0.0;  // same quantity predicted from purity alone
  double bound = 0.0;        // purity-independent upper bound
  double state_purity = 0.0;
};

inline coincidence_report coincidence_analysis(const symmetric_measurement& meas,
                                               const cmatrix& rho,
                                               const tolerances& tol = default_tolerances()) {
  const auto table = probabilities(meas, rho, tol);
  coincidence_report r;
  r.value = index_of_coincidence(table);
  r.state_purity = purity(rho);
  const double clamped = std::clamp(r.state_purity, 1.0 / meas.params.dim, 1.0);
  r.closed_form = coincidence_closed_form(meas.params.dim, meas.params.num_outcomes,
                                          meas.params.x, clamped);
  r.bound = coincidence_bound(meas.params.dim, meas.params.num_outcomes, meas.params.x);
  return r;
}

/// Shannon entropies (natural log) of each POVM's outcome row, with their
/// average. Zero-probability outcomes contribute zero.
struct entropy_profile {
  std::vector<double> per_povm;
  double average = 0.0;
};

inline entropy_profile shannon_entropies(const probability_table& table) {
  if (table.size() == 0)
    throw std::invalid_argument("shannon_entropies: empty table");
  entropy_profile prof;
  prof.per_povm.reserve(table.rows());
  for (Eigen::Index a = 0; a < table.rows(); ++a) {
    double h = 0.0;
    for (Eigen::Index k = 0; k < table.cols(); ++k) {
      const double p = table(a, k);
      if (p > 0.0) h -= p * std::log(p);
    }
    prof.per_povm.push_back(h);
    prof.average += h;
  }
  prof.average /= static_cast<double>(table.rows());
  return prof;
}

inline double nats_to_bits(double nats) { return nats / std::numbers::ln2; }

/// The averaged-entropy lower bound: (1/N) sum_a H(p_a) >= ln(N / C), with C
/// the index of coincidence of the same table.
struct entropy_bound_result {
  double average_entropy = 0.0;
  double bound = 0.0;
  bool satisfied = false;
};

inline entropy_bound_result entropy_bound_check(const symmetric_measurement& meas,
                                                const cmatrix& rho,
                                                const tolerances& tol = default_tolerances()) {
  const auto table = probabilities(meas, rho, tol);
  entropy_bound_result r;
  r.average_entropy = shannon_entropies(table).average;
  r.bound = std::log(meas.params.num_povms / index_of_coincidence(table));
  r.satisfied = r.average_entropy >= r.bound - tol.detection_margin;
  return r;
}

/// One row of the analysis output: everything measured for one state under
/// one measurement. ok iff the closed form matches the measured value, the
/// coincidence bound holds, and the entropy bound holds.
struct analysis_row {
  std::string class_tag;
  int dim = 0;
  int num_povms = 0;
  int num_outcomes = 0;
  double x = 0.0;
  double state_purity = 0.0;
  double coincidence = 0.0;
  double coincidence_closed = 0.0;
  double coincidence_bound = 0.0;
  double average_entropy = 0.0;
  double entropy_bound = 0.0;
  bool ok = false;
};

inline analysis_row analyze_state(const symmetric_measurement& meas, const cmatrix& rho,
                                  const std::string& class_tag,
                                  const tolerances& tol = default_tolerances()) {
  const auto table = probabilities(meas, rho, tol);
  analysis_row row;
  row.class_tag = class_tag;
  row.dim = meas.params.dim;
  row.num_povms = meas.params.num_povms;
  row.num_outcomes = meas.params.num_outcomes;
  row.x = meas.params.x;
  row.state_purity = purity(rho);
  row.coincidence = index_of_coincidence(table);
  const double clamped = std::clamp(row.state_purity, 1.0 / row.dim, 1.0);
  row.coincidence_closed =
      coincidence_closed_form(row.dim, row.num_outcomes, row.x, clamped);
  row.coincidence_bound = coincidence_bound(row.dim, row.num_outcomes, row.x);
  row.average_entropy = shannon_entropies(table).average;
  row.entropy_bound = std::log(row.num_povms / row.coincidence);
  row.ok = std::abs(row.coincidence - row.coincidence_closed) <= 1e-10 &&
           row.coincidence <= row.coincidence_bound + tol.detection_margin &&
           row.average_entropy >= row.entropy_bound - tol.detection_margin;
  return row;
}

}  // namespace nmpovm
