#pragma once

#include "nmpovm/detect.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace nmpovm {

using json = nlohmann::json;

/// Complex matrices serialize as flat row-major arrays of [re, im] pairs.
inline json matrix_to_json(const cmatrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
  return out;
}

inline cmatrix matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows * cols)
    throw std::runtime_error("matrix_from_json: expected " + std::to_string(rows * cols) +
                             " entries, got " + std::to_string(j.size()));
  cmatrix m(rows, cols);
  Eigen::Index idx = 0;
  for (const auto& entry : j) {
    if (!entry.is_array() || entry.size() != 2)
      throw std::runtime_error("matrix_from_json: entries must be [re, im] pairs");
    m(idx / cols, idx % cols) = complexd(entry[0].get<double>(), entry[1].get<double>());
    ++idx;
  }
  return m;
}

inline json basis_to_json(const hermitian_basis& b) {
  json ops = json::array();
  for (const auto& op : b.ops) ops.push_back(matrix_to_json(op));
  return json{{"dim", b.dim}, {"ops", std::move(ops)}};
}

inline hermitian_basis basis_from_json(const json& j, const std::string& name,
                                       double tol = default_tolerances().hermiticity) {
  if (!j.contains("dim") || !j.contains("ops"))
    throw std::runtime_error("basis_from_json: missing dim or ops");
  hermitian_basis b;
  b.dim = j.at("dim").get<int>();
  b.name = name;
  for (const auto& op : j.at("ops")) b.ops.push_back(matrix_from_json(op, b.dim, b.dim));
  const basis_report report = validate_basis(b, tol);
  if (!report.passed) {
    std::ostringstream msg;
    msg << "basis_from_json: basis fails validation (hermiticity defect "
        << report.max_hermiticity_defect << ", trace defect " << report.max_trace_defect
        << ", gram deviation " << report.max_gram_deviation << ", arity "
        << (report.arity_ok ? "ok" : "wrong") << ") at tolerance " << tol;
    throw std::runtime_error(msg.str());
  }
  return b;
}

namespace detail {

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  return j;
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("failed writing " + path);
}

/// Round-trippable decimal rendering for CSV cells.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline void save_basis(const std::string& path, const hermitian_basis& b) {
  detail::write_json_file(path, basis_to_json(b));
}

inline hermitian_basis load_basis(const std::string& path,
                                  double tol = default_tolerances().hermiticity) {
  return basis_from_json(detail::read_json_file(path), "file:" + path, tol);
}

inline json measurement_to_json(const symmetric_measurement& meas) {
  json elements = json::array();
  for (const auto& row : meas.elements) {
    json jrow = json::array();
    for (const auto& e : row) jrow.push_back(matrix_to_json(e));
    elements.push_back(std::move(jrow));
  }
  return json{{"d", meas.params.dim},
              {"N", meas.params.num_povms},
              {"M", meas.params.num_outcomes},
              {"t", meas.params.t},
              {"x", meas.params.x},
              {"elements", std::move(elements)},
              {"basis_id", meas.basis_id},
              {"permutation", meas.permutation}};
}

inline symmetric_measurement measurement_from_json(const json& j) {
  for (const char* key : {"d", "N", "M", "t", "x", "elements", "basis_id", "permutation"})
    if (!j.contains(key))
      throw std::runtime_error(std::string("measurement_from_json: missing key ") + key);
  symmetric_measurement meas;
  auto& p = meas.params;
  p.dim = j.at("d").get<int>();
  p.num_povms = j.at("N").get<int>();
  p.num_outcomes = j.at("M").get<int>();
  p.t = j.at("t").get<double>();
  p.x = j.at("x").get<double>();
  if (p.dim < 2 || p.num_povms < 1 || p.num_outcomes < 2)
    throw std::runtime_error("measurement_from_json: malformed parameters");
  const double m = p.num_outcomes;
  p.w = p.dim / m;
  p.z = p.dim / (m * m);
  p.y = detail::y_from_x(p.dim, p.num_outcomes, p.x);
  meas.basis_id = j.at("basis_id").get<std::string>();
  meas.permutation = j.at("permutation").get<std::vector<int>>();
  const auto& elements = j.at("elements");
  if (static_cast<int>(elements.size()) != p.num_povms)
    throw std::runtime_error("measurement_from_json: expected " +
                             std::to_string(p.num_povms) + " POVMs, got " +
                             std::to_string(elements.size()));
  for (const auto& jrow : elements) {
    if (static_cast<int>(jrow.size()) != p.num_outcomes)
      throw std::runtime_error("measurement_from_json: wrong outcome count in a POVM");
    std::vector<cmatrix> row;
    row.reserve(p.num_outcomes);
    for (const auto& je : jrow) row.push_back(matrix_from_json(je, p.dim, p.dim));
    meas.elements.push_back(std::move(row));
  }
  return meas;
}

inline void save_measurement(const std::string& path, const symmetric_measurement& meas) {
  detail::write_json_file(path, measurement_to_json(meas));
}

inline symmetric_measurement load_measurement(const std::string& path) {
  return measurement_from_json(detail::read_json_file(path));
}

/// Density matrices serialize as {"dim": d, "entries": [[re, im], ...]}.
inline json state_to_json(const cmatrix& rho) {
  return json{{"dim", rho.rows()}, {"entries", matrix_to_json(rho)}};
}

inline cmatrix state_from_json(const json& j) {
  if (!j.contains("dim") || !j.contains("entries"))
    throw std::runtime_error("state_from_json: missing dim or entries");
  const int d = j.at("dim").get<int>();
  return matrix_from_json(j.at("entries"), d, d);
}

inline cmatrix load_state(const std::string& path) {
  return state_from_json(detail::read_json_file(path));
}

inline void save_state(const std::string& path, const cmatrix& rho) {
  detail::write_json_file(path, state_to_json(rho));
}

inline const char* verdict_string(const criterion_result& r) {
  return r.entangled ? "entangled" : "consistent-with-separable";
}

/// Detection report JSON. The pinned keys are always present; when the trace
/// criterion is inapplicable its value/bound are null and the verdict reads
/// "not-applicable". An optional config echo is attached for reproducibility.
inline json detection_report_to_json(const detection_report& rep,
                                     const json& config = json()) {
  json verdicts{{"trace_norm", verdict_string(rep.trace_norm_criterion)}};
  json out{{"dA", rep.dim_a},
           {"dB", rep.dim_b},
           {"classA", rep.class_a},
           {"classB", rep.class_b},
           {"b_side_transposed", rep.b_side_transposed},
           {"trace_norm", rep.trace_norm_criterion.value},
           {"tn_bound", rep.trace_norm_criterion.bound}};
  if (rep.trace_criterion) {
    out["trace"] = rep.trace_criterion->value;
    out["tr_bound"] = rep.trace_criterion->bound;
    verdicts["trace"] = verdict_string(*rep.trace_criterion);
  } else {
    out["trace"] = nullptr;
    out["tr_bound"] = nullptr;
    verdicts["trace"] = "not-applicable";
  }
  out["verdicts"] = std::move(verdicts);
  if (!config.is_null()) out["config"] = config;
  return out;
}

inline void write_analysis_csv(std::ostream& out, const std::vector<analysis_row>& rows,
                               const std::string& config_echo = {}) {
  if (!config_echo.empty()) out << "# config: " << config_echo << '\n';
  out << "class,d,N,M,x,purity,C,C_closed,C_bound,avgH,bound,ok\n";
  for (const auto& r : rows) {
    out << r.class_tag << ',' << r.dim << ',' << r.num_povms << ',' << r.num_outcomes
        << ',' << detail::format_double(r.x) << ',' << detail::format_double(r.state_purity)
        << ',' << detail::format_double(r.coincidence) << ','
        << detail::format_double(r.coincidence_closed) << ','
        << detail::format_double(r.coincidence_bound) << ','
        << detail::format_double(r.average_entropy) << ','
        << detail::format_double(r.entropy_bound) << ',' << (r.ok ? "true" : "false")
        << '\n';
  }
}

inline void write_scan_csv(std::ostream& out, const scan_result& result,
                           const std::string& config_echo = {}) {
  if (!config_echo.empty()) out << "# config: " << config_echo << '\n';
  out << "p,trace_norm,tn_bound,trace,tr_bound,flag_trace_norm,flag_trace\n";
  for (const auto& pt : result.grid) {
    out << detail::format_double(pt.p) << ',' << detail::format_double(pt.trace_norm_value)
        << ',' << detail::format_double(pt.trace_norm_bound) << ','
        << detail::format_double(pt.trace_value) << ','
        << detail::format_double(pt.trace_bound) << ','
        << (pt.flagged_trace_norm ? "true" : "false") << ','
        << (pt.flagged_trace ? "true" : "false") << '\n';
  }
}

}  // namespace nmpovm
