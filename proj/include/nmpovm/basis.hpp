#pragma once

#include "nmpovm/linalg.hpp"

#include <array>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

namespace nmpovm {

/// Traceless part of an orthonormal Hermitian operator basis: d^2 - 1
/// operators G_i with Tr G_i = 0 and Tr(G_i G_j) = delta_ij. Together with
/// I/sqrt(d) they span the Hermitian operators on C^d.
struct hermitian_basis {
  int dim = 0;
  std::string name;
  std::vector<cmatrix> ops;
};

/// Generalized Gell-Mann basis: symmetric pairs, then antisymmetric pairs
/// (each block lexicographic in (j, k)), then the diagonal ladder. For d = 2
/// this is the Pauli triple scaled by 1/sqrt(2), in (x, y, z) order.
inline hermitian_basis gell_mann_basis(int d) {
  if (d < 2)
    throw std::invalid_argument("gell_mann_basis: dimension must be at least 2");
  hermitian_basis b;
  b.dim = d;
  b.name = "gellmann:" + std::to_string(d);
  b.ops.reserve(static_cast<std::size_t>(d) * d - 1);
  const double s = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k) {
      cmatrix m = cmatrix::Zero(d, d);
      m(j, k) = s;
      m(k, j) = s;
      b.ops.push_back(m);
    }
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k) {
      cmatrix m = cmatrix::Zero(d, d);
      m(j, k) = complexd(0.0, -s);
      m(k, j) = complexd(0.0, s);
      b.ops.push_back(m);
    }
  for (int l = 1; l < d; ++l) {
    cmatrix m = cmatrix::Zero(d, d);
    const double norm = 1.0 / std::sqrt(static_cast<double>(l) * (l + 1));
    for (int i = 0; i < l; ++i) m(i, i) = norm;
    m(l, l) = -static_cast<double>(l) * norm;
    b.ops.push_back(m);
  }
  return b;
}

/// Tensor products of normalized single-qubit Paulis for d = 2^n. The index
/// written in base 4 (most significant digit = leftmost factor) selects the
/// factors, with digit 0 mapping to I/sqrt(2); index 0 (all identities) is
/// excluded. For n = 1 this coincides with gell_mann_basis(2).
inline hermitian_basis pauli_tensor_basis(int n_qubits) {
  if (n_qubits < 1)
    throw std::invalid_argument("pauli_tensor_basis: need at least one qubit");
  if (n_qubits > 12)
    throw std::invalid_argument("pauli_tensor_basis: dimension exceeds intended scale");
  const hermitian_basis single = gell_mann_basis(2);
  std::array<cmatrix, 4> sigma = {cmatrix::Identity(2, 2) / std::sqrt(2.0),
                                  single.ops[0], single.ops[1], single.ops[2]};
  hermitian_basis b;
  b.dim = 1 << n_qubits;
  b.name = "pauli:" + std::to_string(n_qubits);
  const std::uint64_t total = (1ULL << (2 * n_qubits)) - 1;
  b.ops.reserve(total);
  for (std::uint64_t v = 1; v <= total; ++v) {
    cmatrix op = sigma[(v >> (2 * (n_qubits - 1))) & 3];
    for (int pos = 1; pos < n_qubits; ++pos)
      op = kron(op, sigma[(v >> (2 * (n_qubits - 1 - pos))) & 3]);
    b.ops.push_back(std::move(op));
  }
  return b;
}

/// Validation evidence for a candidate basis; passed iff the operator count
/// and shapes are right and every measured defect is within tol.
struct basis_report {
  double max_hermiticity_defect = 0.0;
  double max_trace_defect = 0.0;
  double max_gram_deviation = 0.0;  // max|Tr(G_i G_j) - delta_ij|
  bool arity_ok = false;
  bool passed = false;
};

inline basis_report validate_basis(const hermitian_basis& b,
                                   double tol = default_tolerances().hermiticity) {
  basis_report r;
  const std::size_t expected =
      b.dim >= 2 ? static_cast<std::size_t>(b.dim) * b.dim - 1 : 0;
  r.arity_ok = b.dim >= 2 && b.ops.size() == expected;
  for (const auto& op : b.ops) {
    if (op.rows() != b.dim || op.cols() != b.dim) {
      r.arity_ok = false;
      continue;
    }
    r.max_hermiticity_defect = std::max(r.max_hermiticity_defect, hermiticity_defect(op));
    r.max_trace_defect = std::max(r.max_trace_defect, std::abs(op.trace()));
  }
  if (r.arity_ok) {
    for (std::size_t i = 0; i < b.ops.size(); ++i)
      for (std::size_t j = i; j < b.ops.size(); ++j) {
        const double target = i == j ? 1.0 : 0.0;
        r.max_gram_deviation = std::max(
            r.max_gram_deviation, std::abs(hs_inner(b.ops[i], b.ops[j]) - target));
      }
  }
  r.passed = r.arity_ok && r.max_hermiticity_defect <= tol &&
             r.max_trace_defect <= tol && r.max_gram_deviation <= tol;
  return r;
}

/// A basis split into n_groups groups of group_size operators, the shape the
/// measurement construction consumes. ops[a][k] = source.ops[permutation[a *
/// group_size + k]]; the permutation and source name are kept as provenance.
struct grouped_basis {
  int dim = 0;
  int n_groups = 0;
  int group_size = 0;
  std::vector<std::vector<cmatrix>> ops;
  std::vector<int> permutation;
  std::string basis_id;
};

inline grouped_basis group(const hermitian_basis& b, int n_groups, int group_size,
                           const std::optional<std::vector<int>>& permutation = std::nullopt) {
  if (b.dim < 2)
    throw std::invalid_argument("group: basis dimension must be at least 2");
  const int total = b.dim * b.dim - 1;
  if (static_cast<int>(b.ops.size()) != total)
    throw std::invalid_argument("group: basis holds " + std::to_string(b.ops.size()) +
                                " operators, expected " + std::to_string(total));
  if (n_groups < 1 || group_size < 1 || n_groups * group_size != total)
    throw std::invalid_argument("group: " + std::to_string(n_groups) + " groups of " +
                                std::to_string(group_size) + " do not cover " +
                                std::to_string(total) + " operators");
  std::vector<int> perm(total);
  if (permutation) {
    if (static_cast<int>(permutation->size()) != total)
      throw std::invalid_argument("group: permutation has " +
                                  std::to_string(permutation->size()) + " entries, expected " +
                                  std::to_string(total));
    std::vector<bool> seen(total, false);
    for (int p : *permutation) {
      if (p < 0 || p >= total || seen[p])
        throw std::invalid_argument("group: permutation is not a bijection on [0, " +
                                    std::to_string(total) + ")");
      seen[p] = true;
    }
    perm = *permutation;
  } else {
    std::iota(perm.begin(), perm.end(), 0);
  }
  grouped_basis g;
  g.dim = b.dim;
  g.n_groups = n_groups;
  g.group_size = group_size;
  g.basis_id = b.name;
  g.permutation = perm;
  g.ops.assign(n_groups, std::vector<cmatrix>(group_size));
  for (int a = 0; a < n_groups; ++a)
    for (int k = 0; k < group_size; ++k)
      g.ops[a][k] = b.ops[perm[static_cast<std::size_t>(a) * group_size + k]];
  return g;
}

/// Transpose of the grouping: n_groups and group_size swap roles, so an
/// (N, M) grouping becomes the (M - 1, N + 1) one over the same operators.
/// Involutive: dual_regroup(dual_regroup(g)) == g.
inline grouped_basis dual_regroup(const grouped_basis& g) {
  grouped_basis out;
  out.dim = g.dim;
  out.n_groups = g.group_size;
  out.group_size = g.n_groups;
  out.basis_id = g.basis_id;
  out.permutation.assign(g.permutation.size(), 0);
  out.ops.assign(out.n_groups, std::vector<cmatrix>(out.group_size));
  for (int a = 0; a < g.n_groups; ++a)
    for (int k = 0; k < g.group_size; ++k) {
      out.ops[k][a] = g.ops[a][k];
      out.permutation[static_cast<std::size_t>(k) * g.n_groups + a] =
          g.permutation[static_cast<std::size_t>(a) * g.group_size + k];
    }
  return out;
}

}  // namespace nmpovm
