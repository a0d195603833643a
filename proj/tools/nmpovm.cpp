// Command-line front end: pairs / build / validate / analyze / detect / scan.
//
// Conventions shared by every subcommand:
//   - a config echo (JSON, sorted keys) appears in every output so a run can
//     be reproduced from its artifacts alone;
//   - default output is human-readable text; --quiet switches stdout to the
//     machine payload only (JSON, or CSV for analyze/scan);
//   - exit code 0 means "ran and validated"; any validation failure or error
//     exits nonzero with an explanation on stderr. Detection verdicts are
//     results, not failures, and exit 0 either way.

#include <nmpovm/nmpovm.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace {

using namespace nmpovm;

struct cli_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

tolerances resolve_tol(double base) {
  tolerances tol = default_tolerances();
  tol.hermiticity = base;
  tol.positivity = base;
  tol.symmetry = base;
  return tol;
}

std::string class_string(const admissible_class& c) {
  return std::to_string(c.num_povms) + "," + std::to_string(c.num_outcomes);
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string admissible_list(int d) {
  std::vector<std::string> labels;
  for (const auto& c : admissible_pairs(d)) labels.push_back(class_string(c));
  return join(labels, " ");
}

std::pair<int, int> parse_class(int d, const std::string& spec) {
  const auto comma = spec.find(',');
  int n = 0, m = 0;
  try {
    std::size_t pos_n = 0, pos_m = 0;
    if (comma == std::string::npos) throw std::invalid_argument("");
    n = std::stoi(spec.substr(0, comma), &pos_n);
    const std::string rest = spec.substr(comma + 1);
    m = std::stoi(rest, &pos_m);
    if (pos_n != comma || pos_m != rest.size()) throw std::invalid_argument("");
  } catch (const std::exception&) {
    throw cli_error("--class must be N,M (e.g. 4,3); got '" + spec + "'");
  }
  if (n < 1 || m < 2 || n * (m - 1) != d * d - 1)
    throw cli_error("class " + spec + " is not admissible at d = " + std::to_string(d) +
                    " (need N(M-1) = d^2 - 1); admissible classes: " + admissible_list(d));
  return {n, m};
}

hermitian_basis resolve_basis(int d, const std::string& spec) {
  if (spec == "gellmann") return gell_mann_basis(d);
  if (spec == "pauli") {
    int n = 0;
    while ((1 << n) < d) ++n;
    if ((1 << n) != d)
      throw cli_error("the pauli basis needs a power-of-two dimension; got d = " +
                      std::to_string(d));
    return pauli_tensor_basis(n);
  }
  if (spec.rfind("file:", 0) == 0) {
    hermitian_basis b = load_basis(spec.substr(5));
    if (b.dim != d)
      throw cli_error("basis file has dimension " + std::to_string(b.dim) +
                      ", expected " + std::to_string(d));
    return b;
  }
  throw cli_error("unknown basis '" + spec + "' (expected gellmann, pauli, or file:PATH)");
}

double resolve_t_value(const std::string& spec, const t_interval& range) {
  if (spec == "max") return range.t_max;
  if (spec == "min") return range.t_min;
  try {
    std::size_t pos = 0;
    const double v = std::stod(spec, &pos);
    if (pos != spec.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw cli_error("--t must be max, min, or a number; got '" + spec + "'");
  }
}

std::string basis_label(const std::string& spec) {
  if (spec.rfind("file:", 0) == 0)
    return std::filesystem::path(spec.substr(5)).stem().string();
  return spec;
}

struct construction {
  symmetric_measurement meas;
  t_interval range{};
  json echo;
};

construction construct_measurement(int d, const std::string& cls, const std::string& basis_spec,
                                   const std::string& t_spec,
                                   std::optional<std::uint64_t> perm_seed,
                                   const tolerances& tol) {
  if (d < 2) throw cli_error("--d must be at least 2");
  const auto [n, m] = parse_class(d, cls);
  const hermitian_basis basis = resolve_basis(d, basis_spec);
  std::optional<std::vector<int>> perm;
  if (perm_seed) {
    std::vector<int> p(static_cast<std::size_t>(d) * d - 1);
    std::iota(p.begin(), p.end(), 0);
    std::mt19937_64 rng(*perm_seed);
    std::shuffle(p.begin(), p.end(), rng);
    perm = std::move(p);
  }
  const grouped_basis g = group(basis, n, m - 1, perm);
  const t_interval range = t_range(build_h_operators(g));
  const double t = resolve_t_value(t_spec, range);
  construction c;
  c.meas = assemble(g, t, tol);
  c.range = range;
  c.echo = json{{"d", d},
                {"class", cls},
                {"basis", basis_spec},
                {"t", t},
                {"t_spec", t_spec},
                {"perm_seed", perm_seed ? json(*perm_seed) : json()}};
  return c;
}

json symmetry_to_json(const symmetry_report& r) {
  return json{{"max_trace_dev", r.max_trace_dev},
              {"max_self_overlap_dev", r.max_self_overlap_dev},
              {"max_intra_overlap_dev", r.max_intra_overlap_dev},
              {"max_inter_overlap_dev", r.max_inter_overlap_dev},
              {"completeness_defect", r.completeness_defect},
              {"min_element_eigenvalue", r.min_element_eigenvalue},
              {"window_ok", r.window_ok},
              {"intra_nonneg", r.intra_nonneg},
              {"passed", r.passed}};
}

json classification_to_json(const classification& c) {
  return json{{"projective", c.projective}, {"optimal", c.optimal}, {"tags", c.tags}};
}

void print_validation_human(std::ostream& out, const symmetric_measurement& meas,
                            const symmetry_report& rep, const ic_result& ic,
                            const classification& cls) {
  const auto& p = meas.params;
  out << "x = " << p.x << "  (w = " << p.w << ", y = " << p.y << ", z = " << p.z
      << ", t = " << p.t << ")\n";
  out << "symmetry: trace dev " << rep.max_trace_dev << ", self overlap dev "
      << rep.max_self_overlap_dev << ", intra dev " << rep.max_intra_overlap_dev
      << ", inter dev " << rep.max_inter_overlap_dev << ", completeness "
      << rep.completeness_defect << ", min eigenvalue " << rep.min_element_eigenvalue
      << " -> " << (rep.passed ? "pass" : "FAIL") << "\n";
  out << "informational completeness: gram rank " << ic.rank << " of " << p.dim * p.dim
      << " -> " << (ic.complete ? "complete" : "INCOMPLETE") << "\n";
  out << "classification: projective=" << (cls.projective ? "yes" : "no")
      << " optimal=" << (cls.optimal ? "yes" : "no");
  if (!cls.tags.empty()) out << " tags=" << join(cls.tags, "|");
  out << "\n";
}

void explain_failures(const symmetric_measurement& meas, const symmetry_report& rep,
                      const ic_result& ic) {
  if (!rep.passed) {
    std::cerr << "error: symmetry validation failed";
    if (!rep.window_ok)
      std::cerr << " (x = " << meas.params.x << " is outside the admissible window ("
                << meas.params.z << ", "
                << std::min(static_cast<double>(meas.params.dim) * meas.params.dim /
                                (meas.params.num_outcomes * meas.params.num_outcomes),
                            static_cast<double>(meas.params.dim) / meas.params.num_outcomes)
                << "])";
    std::cerr << "\n";
  }
  if (!ic.complete) {
    std::cerr << "error: not informationally complete: gram rank " << ic.rank << " of "
              << meas.params.dim * meas.params.dim
              << "; state reconstruction is impossible";
    if (meas.params.t == 0.0)
      std::cerr << " (t = 0 collapses every element to I/M)";
    std::cerr << "\n";
  }
}

// ---------------------------------------------------------------- pairs ----

int cmd_pairs(int d, bool quiet) {
  const auto classes = admissible_pairs(d);
  const json config{{"command", "pairs"}, {"d", d}};
  int untagged = 0;
  for (const auto& c : classes)
    if (c.tags.empty()) ++untagged;
  std::string note;
  if (untagged > 0)
    note = std::to_string(untagged) + " of " + std::to_string(classes.size()) +
           " classes carry no standard tag; every divisor of d^2 - 1 = " +
           std::to_string(d * d - 1) + " yields an admissible class";
  if (quiet) {
    json out{{"config", config}, {"classes", json::array()}};
    for (const auto& c : classes)
      out["classes"].push_back(json{{"N", c.num_povms},
                                    {"M", c.num_outcomes},
                                    {"tags", c.tags},
                                    {"projective_possible", c.projective_possible}});
    if (!note.empty()) out["note"] = note;
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "config: " << config.dump() << "\n";
    for (const auto& c : classes) {
      std::cout << "N=" << c.num_povms << " M=" << c.num_outcomes;
      if (!c.tags.empty()) std::cout << " tags=" << join(c.tags, "|");
      std::cout << " projective-possible=" << (c.projective_possible ? "yes" : "no") << "\n";
    }
    if (!note.empty()) std::cout << "note: " << note << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------- build ----

int cmd_build(int d, const std::string& cls_arg, const std::string& basis_spec,
              const std::string& t_spec, std::optional<std::uint64_t> perm_seed,
              const std::string& out_arg, double tol_base, bool quiet) {
  const tolerances tol = resolve_tol(tol_base);
  std::vector<std::string> classes;
  if (cls_arg == "all") {
    if (d < 2) throw cli_error("--d must be at least 2");
    for (const auto& c : admissible_pairs(d)) classes.push_back(class_string(c));
  } else {
    classes.push_back(cls_arg);
  }

  bool all_ok = true;
  json results = json::array();
  for (const auto& cls : classes) {
    construction c = construct_measurement(d, cls, basis_spec, t_spec, perm_seed, tol);
    const symmetry_report rep = validate_symmetry(c.meas, tol.symmetry);
    const ic_result ic = ic_check(c.meas);
    const classification cl = classify(c.meas);
    const bool ok = rep.passed && ic.complete;

    const auto [n, m] = parse_class(d, cls);
    const std::string derived = "nmpovm_d" + std::to_string(d) + "_" + std::to_string(n) +
                                "x" + std::to_string(m) + "_" + basis_label(basis_spec) +
                                ".json";
    std::string path;
    if (cls_arg == "all")
      path = ((out_arg.empty() ? std::filesystem::path(".") : std::filesystem::path(out_arg)) /
              derived)
                 .string();
    else
      path = out_arg.empty() ? derived : out_arg;
    if (ok) save_measurement(path, c.meas);

    json config{{"command", "build"}, {"tol", tol_base}, {"out", path}};
    config.update(c.echo);
    json summary{{"config", config},
                 {"out", ok ? json(path) : json()},
                 {"params",
                  json{{"t", c.meas.params.t},
                       {"x", c.meas.params.x},
                       {"w", c.meas.params.w},
                       {"y", c.meas.params.y},
                       {"z", c.meas.params.z},
                       {"t_range", json::array({c.range.t_min, c.range.t_max})}}},
                 {"symmetry", symmetry_to_json(rep)},
                 {"ic", json{{"rank", ic.rank}, {"complete", ic.complete}}},
                 {"classification", classification_to_json(cl)}};
    results.push_back(summary);

    if (!quiet) {
      std::cout << "config: " << config.dump() << "\n";
      std::cout << "t = " << c.meas.params.t << " selected from [" << c.range.t_min << ", "
                << c.range.t_max << "]\n";
      print_validation_human(std::cout, c.meas, rep, ic, cl);
      if (ok)
        std::cout << "wrote " << path << "\n";
      else
        std::cout << "not written (validation failed)\n";
    }
    if (!ok) {
      all_ok = false;
      explain_failures(c.meas, rep, ic);
    }
  }
  if (quiet)
    std::cout << (classes.size() == 1 ? results[0] : json{{"results", results}}).dump(2)
              << "\n";
  return all_ok ? 0 : 1;
}

// ------------------------------------------------------------- validate ----

int cmd_validate(const std::string& in, double tol_base, bool quiet) {
  const tolerances tol = resolve_tol(tol_base);
  const symmetric_measurement meas = load_measurement(in);
  const symmetry_report rep = validate_symmetry(meas, tol.symmetry);
  const ic_result ic = ic_check(meas);
  const classification cl = classify(meas);
  const auto& p = meas.params;
  const double m = p.num_outcomes;
  const double root_m = std::sqrt(m);
  const double expected_x =
      p.z + p.t * p.t * (m - 1.0) * (root_m + 1.0) * (root_m + 1.0);
  const bool coherent = std::abs(p.x - expected_x) <= 1e-9 * std::max(1.0, std::abs(p.x));
  const bool ok = rep.passed && ic.complete && coherent;

  const json config{{"command", "validate"}, {"in", in}, {"tol", tol_base}};
  if (quiet) {
    json out{{"config", config},
             {"class", std::to_string(p.num_povms) + "," + std::to_string(p.num_outcomes)},
             {"d", p.dim},
             {"symmetry", symmetry_to_json(rep)},
             {"ic", json{{"rank", ic.rank}, {"complete", ic.complete}}},
             {"classification", classification_to_json(cl)},
             {"params_coherent", coherent},
             {"passed", ok}};
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "config: " << config.dump() << "\n";
    std::cout << "measurement: d=" << p.dim << " class " << p.num_povms << ","
              << p.num_outcomes << " basis " << meas.basis_id << "\n";
    print_validation_human(std::cout, meas, rep, ic, cl);
    std::cout << "stored x vs t: " << (coherent ? "coherent" : "INCOHERENT") << "\n";
    std::cout << (ok ? "valid\n" : "INVALID\n");
  }
  if (!ok) {
    explain_failures(meas, rep, ic);
    if (!coherent)
      std::cerr << "error: stored x = " << p.x << " does not match t = " << p.t
                << " (expected x = " << expected_x << ")\n";
  }
  return ok ? 0 : 1;
}

// -------------------------------------------------------------- analyze ----

std::vector<cmatrix> make_states(const std::string& spec, int d, std::mt19937_64& rng) {
  const auto parse_count = [&](const std::string& s) {
    try {
      std::size_t pos = 0;
      const int k = std::stoi(s, &pos);
      if (pos != s.size() || k < 1) throw std::invalid_argument("");
      return k;
    } catch (const std::exception&) {
      throw cli_error("--states count must be a positive integer; got '" + s + "'");
    }
  };
  std::vector<cmatrix> states;
  if (spec == "mixed") {
    states.push_back(cmatrix::Identity(d, d) / static_cast<double>(d));
  } else if (spec.rfind("pure:", 0) == 0) {
    const int k = parse_count(spec.substr(5));
    states.reserve(k);
    for (int i = 0; i < k; ++i) states.push_back(ginibre_density(d, 1, rng));
  } else if (spec.rfind("random:", 0) == 0) {
    const int k = parse_count(spec.substr(7));
    std::uniform_int_distribution<int> rank(1, d);
    states.reserve(k);
    for (int i = 0; i < k; ++i) states.push_back(ginibre_density(d, rank(rng), rng));
  } else {
    throw cli_error("unknown state source '" + spec +
                    "' (expected mixed, pure:K, or random:K)");
  }
  return states;
}

int cmd_analyze(const std::string& in, const std::string& states_spec, std::uint64_t seed,
                const std::string& out_arg, double tol_base, bool quiet) {
  const tolerances tol = resolve_tol(tol_base);
  const symmetric_measurement meas = load_measurement(in);
  std::mt19937_64 rng(seed);
  const std::vector<cmatrix> states = make_states(states_spec, meas.params.dim, rng);
  const std::string tag = std::to_string(meas.params.num_povms) + "x" +
                          std::to_string(meas.params.num_outcomes);
  std::vector<analysis_row> rows;
  rows.reserve(states.size());
  int failed = 0;
  for (const auto& rho : states) {
    rows.push_back(analyze_state(meas, rho, tag, tol));
    if (!rows.back().ok) ++failed;
  }
  const json config{{"command", "analyze"},
                    {"in", in},
                    {"states", states_spec},
                    {"seed", seed},
                    {"tol", tol_base}};
  if (out_arg.empty()) {
    write_analysis_csv(std::cout, rows, config.dump());
  } else {
    std::ofstream out(out_arg);
    if (!out) throw cli_error("cannot open " + out_arg + " for writing");
    write_analysis_csv(out, rows, config.dump());
    if (!quiet)
      std::cout << "wrote " << rows.size() << " rows to " << out_arg << "; "
                << (failed == 0 ? "all ok" : std::to_string(failed) + " rows FAILED")
                << "\n";
  }
  if (failed > 0)
    std::cerr << "error: " << failed << " of " << rows.size()
              << " rows violate a coincidence/entropy identity or bound\n";
  return failed == 0 ? 0 : 1;
}

// --------------------------------------------------------- detect / scan ----

struct side_options {
  std::string in;  // measurement file; empty means construct from the fields below
  std::string cls;
  std::string basis;
  std::string t_spec;
};

struct resolved_side {
  symmetric_measurement meas;
  json echo;
};

resolved_side resolve_side(const side_options& side, int d,
                           std::optional<std::uint64_t> perm_seed, const tolerances& tol) {
  resolved_side r;
  if (!side.in.empty()) {
    r.meas = load_measurement(side.in);
    r.echo = json{{"file", side.in}};
    return r;
  }
  if (side.cls.empty())
    throw cli_error("measurement side needs either a file (--in-a/--in-b) or --class");
  construction c = construct_measurement(d, side.cls, side.basis, side.t_spec, perm_seed, tol);
  r.meas = std::move(c.meas);
  r.echo = std::move(c.echo);
  return r;
}

cmatrix resolve_state(const std::string& spec, int da, int db, std::mt19937_64& rng) {
  const auto require_equal_sides = [&](const char* what) {
    if (da != db)
      throw cli_error(std::string(what) + " needs equal side dimensions; got " +
                      std::to_string(da) + " and " + std::to_string(db));
  };
  if (spec == "bell") {
    require_equal_sides("the maximally entangled state");
    return bell_state(da);
  }
  if (spec == "product-mixed") {
    const int n = da * db;
    return cmatrix::Identity(n, n) / static_cast<double>(n);
  }
  if (spec == "product-random") return random_product(da, db, rng);
  if (spec == "separable-random") return random_separable(da, db, 8, rng);
  if (spec.rfind("isotropic:", 0) == 0) {
    require_equal_sides("the isotropic family");
    double p = 0.0;
    try {
      std::size_t pos = 0;
      const std::string rest = spec.substr(10);
      p = std::stod(rest, &pos);
      if (pos != rest.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw cli_error("isotropic:P needs a numeric mixing parameter; got '" + spec + "'");
    }
    return isotropic(da, p);
  }
  if (spec.rfind("file:", 0) == 0) {
    cmatrix rho = load_state(spec.substr(5));
    if (rho.rows() != da * db)
      throw cli_error("state file has dimension " + std::to_string(rho.rows()) +
                      ", expected " + std::to_string(da * db));
    return rho;
  }
  throw cli_error("unknown state '" + spec +
                  "' (expected bell, product-mixed, product-random, separable-random, "
                  "isotropic:P, or file:PATH)");
}

int cmd_detect(const std::string& state_spec, int d, const side_options& a,
               const side_options& b, bool same_b, bool transpose_b,
               std::optional<std::uint64_t> perm_seed, std::uint64_t seed,
               const std::string& out_arg, double tol_base, bool quiet) {
  const tolerances tol = resolve_tol(tol_base);
  resolved_side side_a = resolve_side(a, d, perm_seed, tol);
  resolved_side side_b;
  if (same_b)
    side_b = side_a;
  else
    side_b = resolve_side(b, d > 0 ? d : side_a.meas.params.dim, perm_seed, tol);

  std::mt19937_64 rng(seed);
  const cmatrix rho = resolve_state(state_spec, side_a.meas.params.dim,
                                    side_b.meas.params.dim, rng);
  const detection_report rep = detect(rho, side_a.meas, side_b.meas, transpose_b, tol);
  const json config{{"command", "detect"},    {"state", state_spec},
                    {"seed", seed},           {"transpose_b", transpose_b},
                    {"a", side_a.echo},       {"b", side_b.echo},
                    {"tol", tol_base}};
  const json out_json = detection_report_to_json(rep, config);
  if (!out_arg.empty()) detail::write_json_file(out_arg, out_json);
  if (quiet) {
    std::cout << out_json.dump(2) << "\n";
  } else {
    std::cout << "config: " << config.dump() << "\n";
    std::cout << "A: d=" << rep.dim_a << " class " << rep.class_a << "; B: d=" << rep.dim_b
              << " class " << rep.class_b << (rep.b_side_transposed ? " (transposed)" : "")
              << "\n";
    const auto& tn = rep.trace_norm_criterion;
    std::cout << "trace-norm criterion: value " << tn.value << " vs bound " << tn.bound
              << " -> " << verdict_string(tn) << "\n";
    if (rep.trace_criterion) {
      const auto& tr = *rep.trace_criterion;
      std::cout << "trace criterion: value " << tr.value << " vs bound " << tr.bound
                << " -> " << verdict_string(tr) << "\n";
    } else {
      std::cout << "trace criterion: not applicable (non-square configuration)\n";
    }
    if (!out_arg.empty()) std::cout << "wrote " << out_arg << "\n";
  }
  return 0;
}

int cmd_scan(int d, const side_options& a, const side_options& b, bool same_b,
             bool transpose_b, std::optional<std::uint64_t> perm_seed,
             const std::string& criterion, int grid, const std::string& out_arg,
             double tol_base, bool quiet) {
  const tolerances tol = resolve_tol(tol_base);
  resolved_side side_a = resolve_side(a, d, perm_seed, tol);
  resolved_side side_b;
  if (same_b)
    side_b = side_a;
  else
    side_b = resolve_side(b, d > 0 ? d : side_a.meas.params.dim, perm_seed, tol);
  if (transpose_b) side_b.meas = transpose_elements(side_b.meas);

  criterion_kind kind;
  if (criterion == "trace-norm")
    kind = criterion_kind::trace_norm;
  else if (criterion == "trace")
    kind = criterion_kind::trace;
  else
    throw cli_error("--criterion must be trace-norm or trace; got '" + criterion + "'");

  const scan_result res = threshold_scan(side_a.meas, side_b.meas, kind, grid);
  const json config{{"command", "scan"},   {"criterion", criterion},
                    {"grid", grid},        {"transpose_b", transpose_b},
                    {"a", side_a.echo},    {"b", side_b.echo},
                    {"tol", tol_base}};
  const std::string p_star_line =
      res.p_star ? detail::format_double(*res.p_star) : std::string("none");
  const auto emit = [&](std::ostream& out) {
    out << "# config: " << config.dump() << "\n";
    out << "# p_star: " << p_star_line << "\n";
    write_scan_csv(out, res);
  };
  if (out_arg.empty()) {
    emit(std::cout);
  } else {
    std::ofstream out(out_arg);
    if (!out) throw cli_error("cannot open " + out_arg + " for writing");
    emit(out);
    if (!quiet)
      std::cout << "p_star = " << p_star_line << "; wrote " << res.grid.size()
                << " grid points to " << out_arg << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Construct, validate, and apply informationally complete symmetric "
               "measurements ((N,M)-POVMs)"};
  app.require_subcommand(1);

  // pairs
  auto* pairs = app.add_subcommand("pairs", "List the admissible (N,M) classes at a dimension");
  int pairs_d = 0;
  bool pairs_quiet = false;
  pairs->add_option("--d", pairs_d, "Hilbert space dimension")->required();
  pairs->add_flag("--quiet", pairs_quiet, "Machine-readable JSON only");

  // build
  auto* build = app.add_subcommand("build", "Construct a measurement and write it to a file");
  int build_d = 0;
  std::string build_class, build_basis = "gellmann", build_t = "max", build_out;
  std::uint64_t build_perm_seed = 0;
  double build_tol = 1e-10;
  bool build_quiet = false;
  build->add_option("--d", build_d, "Hilbert space dimension")->required();
  build->add_option("--class", build_class, "Class as N,M, or 'all'")->required();
  build->add_option("--basis", build_basis, "gellmann, pauli, or file:PATH");
  build->add_option("--t", build_t, "Construction parameter: max, min, or a number");
  auto* build_perm = build->add_option("--perm-seed", build_perm_seed,
                                       "Shuffle the basis-to-POVM assignment with this seed");
  build->add_option("--out", build_out, "Output path (directory when --class all)");
  build->add_option("--tol", build_tol, "Validation tolerance")->envname("NMPOVM_TOL");
  build->add_flag("--quiet", build_quiet, "Machine-readable JSON only");

  // validate
  auto* validate = app.add_subcommand("validate", "Validate a measurement file");
  std::string validate_in;
  double validate_tol = 1e-10;
  bool validate_quiet = false;
  validate->add_option("--in", validate_in, "Measurement file")->required();
  validate->add_option("--tol", validate_tol, "Validation tolerance")->envname("NMPOVM_TOL");
  validate->add_flag("--quiet", validate_quiet, "Machine-readable JSON only");

  // analyze
  auto* analyze = app.add_subcommand(
      "analyze", "Index-of-coincidence and entropy analysis over a batch of states");
  std::string analyze_in, analyze_states = "random:20", analyze_out;
  std::uint64_t analyze_seed = 12345;
  double analyze_tol = 1e-10;
  bool analyze_quiet = false;
  analyze->add_option("--in", analyze_in, "Measurement file")->required();
  analyze->add_option("--states", analyze_states, "mixed, pure:K, or random:K");
  analyze->add_option("--seed", analyze_seed, "RNG seed for the state batch");
  analyze->add_option("--out", analyze_out, "CSV output path (default: stdout)");
  analyze->add_option("--tol", analyze_tol, "Validation tolerance")->envname("NMPOVM_TOL");
  analyze->add_flag("--quiet", analyze_quiet, "Suppress the human summary line");

  // detect
  auto* detect_cmd = app.add_subcommand("detect", "Entanglement criteria on a bipartite state");
  std::string detect_state;
  int detect_d = 0;
  side_options detect_a{"", "", "gellmann", "max"}, detect_b{"", "", "", ""};
  std::uint64_t detect_perm_seed = 0, detect_seed = 12345;
  std::string detect_out;
  double detect_tol = 1e-10;
  bool detect_transpose = false, detect_quiet = false;
  detect_cmd
      ->add_option("--state", detect_state,
                   "bell, product-mixed, product-random, separable-random, isotropic:P, "
                   "or file:PATH")
      ->required();
  detect_cmd->add_option("--d", detect_d, "Dimension when constructing measurements");
  detect_cmd->add_option("--in-a", detect_a.in, "Measurement file for side A");
  detect_cmd->add_option("--in-b", detect_b.in, "Measurement file for side B");
  detect_cmd->add_option("--class", detect_a.cls, "Side A class as N,M");
  detect_cmd->add_option("--basis", detect_a.basis, "Side A basis");
  detect_cmd->add_option("--t", detect_a.t_spec, "Side A construction parameter");
  detect_cmd->add_option("--class-b", detect_b.cls, "Side B class (default: same as A)");
  detect_cmd->add_option("--basis-b", detect_b.basis, "Side B basis (default: same as A)");
  detect_cmd->add_option("--t-b", detect_b.t_spec, "Side B parameter (default: same as A)");
  auto* detect_perm = detect_cmd->add_option("--perm-seed", detect_perm_seed,
                                             "Basis-to-POVM shuffle seed for both sides");
  detect_cmd->add_flag("--transpose-b", detect_transpose,
                       "Transpose every side B element before measuring");
  detect_cmd->add_option("--seed", detect_seed, "RNG seed for random state specs");
  detect_cmd->add_option("--out", detect_out, "Write the report JSON here as well");
  detect_cmd->add_option("--tol", detect_tol, "Validation tolerance")->envname("NMPOVM_TOL");
  detect_cmd->add_flag("--quiet", detect_quiet, "Machine-readable JSON only");

  // scan
  auto* scan = app.add_subcommand(
      "scan", "Detection threshold of a criterion over the isotropic family");
  int scan_d = 0;
  side_options scan_a{"", "", "gellmann", "max"}, scan_b{"", "", "", ""};
  std::uint64_t scan_perm_seed = 0;
  std::string scan_criterion = "trace-norm", scan_out;
  int scan_grid = 41;
  double scan_tol = 1e-10;
  bool scan_transpose = false, scan_quiet = false;
  scan->add_option("--d", scan_d, "Dimension when constructing measurements");
  scan->add_option("--in-a", scan_a.in, "Measurement file for side A");
  scan->add_option("--in-b", scan_b.in, "Measurement file for side B");
  scan->add_option("--class", scan_a.cls, "Side A class as N,M");
  scan->add_option("--basis", scan_a.basis, "Side A basis");
  scan->add_option("--t", scan_a.t_spec, "Side A construction parameter");
  scan->add_option("--class-b", scan_b.cls, "Side B class (default: same as A)");
  scan->add_option("--basis-b", scan_b.basis, "Side B basis (default: same as A)");
  scan->add_option("--t-b", scan_b.t_spec, "Side B parameter (default: same as A)");
  auto* scan_perm = scan->add_option("--perm-seed", scan_perm_seed,
                                     "Basis-to-POVM shuffle seed for both sides");
  scan->add_flag("--transpose-b", scan_transpose,
                 "Transpose every side B element before scanning");
  scan->add_option("--criterion", scan_criterion, "trace-norm or trace");
  scan->add_option("--grid", scan_grid, "Number of grid points")->check(CLI::Range(2, 100001));
  scan->add_option("--out", scan_out, "CSV output path (default: stdout)");
  scan->add_option("--tol", scan_tol, "Validation tolerance")->envname("NMPOVM_TOL");
  scan->add_flag("--quiet", scan_quiet, "Suppress the human summary line");

  CLI11_PARSE(app, argc, argv);

  const auto fill_b_defaults = [](side_options& b, const side_options& a) -> bool {
    // Returns true when side B is literally side A (no overrides at all).
    const bool same = b.in.empty() && b.cls.empty() && b.basis.empty() && b.t_spec.empty();
    if (b.cls.empty()) b.cls = a.cls;
    if (b.basis.empty()) b.basis = a.basis;
    if (b.t_spec.empty()) b.t_spec = a.t_spec;
    return same;
  };

  try {
    if (*pairs) return cmd_pairs(pairs_d, pairs_quiet);
    if (*build) {
      std::optional<std::uint64_t> perm;
      if (build_perm->count() > 0) perm = build_perm_seed;
      return cmd_build(build_d, build_class, build_basis, build_t, perm, build_out,
                       build_tol, build_quiet);
    }
    if (*validate) return cmd_validate(validate_in, validate_tol, validate_quiet);
    if (*analyze)
      return cmd_analyze(analyze_in, analyze_states, analyze_seed, analyze_out, analyze_tol,
                         analyze_quiet);
    if (*detect_cmd) {
      std::optional<std::uint64_t> perm;
      if (detect_perm->count() > 0) perm = detect_perm_seed;
      const bool same_b = fill_b_defaults(detect_b, detect_a);
      return cmd_detect(detect_state, detect_d, detect_a, detect_b, same_b,
                        detect_transpose, perm, detect_seed, detect_out, detect_tol,
                        detect_quiet);
    }
    if (*scan) {
      std::optional<std::uint64_t> perm;
      if (scan_perm->count() > 0) perm = scan_perm_seed;
      const bool same_b = fill_b_defaults(scan_b, scan_a);
      return cmd_scan(scan_d, scan_a, scan_b, same_b, scan_transpose, perm, scan_criterion,
                      scan_grid, scan_out, scan_tol, scan_quiet);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
