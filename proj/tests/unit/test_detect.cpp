#include "oracles.hpp"

#include <nmpovm/detect.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace nmpovm;
using oracle::max_abs_diff;
using Catch::Matchers::WithinAbs;

namespace {

symmetric_measurement standard_measurement(int d, int n, int m, double t_fraction = 1.0) {
  const grouped_basis g = group(gell_mann_basis(d), n, m - 1);
  const t_interval r = t_range(build_h_operators(g));
  return assemble(g, t_fraction * r.t_max);
}

double family_bound(const symmetric_measurement& meas) {
  return coincidence_bound(meas.params.dim, meas.params.num_outcomes, meas.params.x);
}

}  // namespace

TEST_CASE("correlation matrix of a product of maximally mixed qubits", "[detect]") {
  const symmetric_measurement meas = standard_measurement(2, 3, 2);
  const cmatrix rho = kron(cmatrix::Identity(2, 2) / 2, cmatrix::Identity(2, 2) / 2);
  const correlation_table table = correlation_matrix(rho, meas, meas);
  REQUIRE(table.rows() == 6);
  REQUIRE(table.cols() == 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) CHECK_THAT(table(i, j), WithinAbs(0.25, 1e-14));
  CHECK_THAT(trace_norm(table), WithinAbs(1.5, 1e-12));
  CHECK_THAT(table.trace(), WithinAbs(1.5, 1e-13));
}

TEST_CASE("correlation matrix of a product state is the outer probability product",
          "[detect]") {
  std::mt19937_64 rng(53);
  const symmetric_measurement ma = standard_measurement(2, 3, 2);
  const symmetric_measurement mb = standard_measurement(3, 4, 3, 0.8);
  for (int trial = 0; trial < 8; ++trial) {
    const cmatrix rho_a = ginibre_density(2, 1 + trial % 2, rng);
    const cmatrix rho_b = ginibre_density(3, 1 + trial % 3, rng);
    const correlation_table table = correlation_matrix(kron(rho_a, rho_b), ma, mb);

    const probability_table pa = probabilities(ma, rho_a);
    const probability_table pb = probabilities(mb, rho_b);
    Eigen::VectorXd va(6), vb(12);
    for (int a = 0; a < 3; ++a)
      for (int k = 0; k < 2; ++k) va(a * 2 + k) = pa(a, k);
    for (int b = 0; b < 4; ++b)
      for (int l = 0; l < 3; ++l) vb(b * 3 + l) = pb(b, l);
    CHECK((table - va * vb.transpose()).cwiseAbs().maxCoeff() < 1e-12);

    // Rank-one identity: trace norm equals sqrt(C_A * C_B).
    const double expected =
        std::sqrt(index_of_coincidence(pa) * index_of_coincidence(pb));
    CHECK_THAT(trace_norm(table), WithinAbs(expected, 1e-10));
  }
}

TEST_CASE("correlation matrix rejects mismatched dimensions", "[detect]") {
  const symmetric_measurement ma = standard_measurement(2, 3, 2);
  CHECK_THROWS_AS(correlation_matrix(cmatrix::Identity(6, 6) / 6.0, ma, ma),
                  std::invalid_argument);
}

TEST_CASE("Bell state correlations with identical qubit triples", "[detect]") {
  const symmetric_measurement meas = standard_measurement(2, 3, 2);
  const cmatrix bell = bell_state(2);

  SECTION("untransposed: trace sits exactly on the boundary") {
    const correlation_table table = correlation_matrix(bell, meas, meas);
    // Frozen block structure: x/y/z-direction diagonal blocks diag(1/2, 1/2),
    // antidiag(1/2), diag(1/2, 1/2); all cross blocks constant 1/4.
    for (int a = 0; a < 3; ++a)
      for (int k = 0; k < 2; ++k)
        for (int b = 0; b < 3; ++b)
          for (int l = 0; l < 2; ++l) {
            const double got = table(a * 2 + k, b * 2 + l);
            double expected = 0.25;
            if (a == b) {
              const bool aligned = (a == 1) ? (k != l) : (k == l);
              expected = aligned ? 0.5 : 0.0;
            }
            CHECK_THAT(got, WithinAbs(expected, 1e-13));
          }
    CHECK_THAT(table.trace(), WithinAbs(2.0, 1e-12));
    CHECK_THAT(trace_norm(table), WithinAbs(3.0, 1e-12));

    const criterion_result tr = criterion_trace(table, family_bound(meas));
    CHECK_FALSE(tr.entangled);  // value equals the bound; never flag the boundary
    const criterion_result tn =
        criterion_trace_norm(table, family_bound(meas), family_bound(meas));
    CHECK(tn.entangled);  // 3 > 2
  }
  SECTION("transposed B side: both criteria flag") {
    const detection_report rep = detect(bell, meas, meas, true);
    REQUIRE(rep.trace_criterion.has_value());
    CHECK_THAT(rep.trace_criterion->value, WithinAbs(3.0, 1e-12));
    CHECK_THAT(rep.trace_criterion->bound, WithinAbs(2.0, 1e-13));
    CHECK(rep.trace_criterion->entangled);
    CHECK_THAT(rep.trace_norm_criterion.value, WithinAbs(3.0, 1e-12));
    CHECK_THAT(rep.trace_norm_criterion.bound, WithinAbs(2.0, 1e-13));
    CHECK(rep.trace_norm_criterion.entangled);
    CHECK(rep.b_side_transposed);
    CHECK(rep.class_a == "3,2");
    CHECK(rep.class_b == "3,2");
  }
}

TEST_CASE("criterion mechanics", "[detect]") {
  SECTION("trace criterion requires a square table") {
    CHECK_THROWS_AS(criterion_trace(correlation_table::Constant(2, 3, 0.1), 1.0),
                    std::invalid_argument);
  }
  SECTION("detection margin is one-sided") {
    correlation_table tiny(1, 1);
    tiny(0, 0) = 2.0 + 0.5e-10;
    CHECK_FALSE(criterion_trace(tiny, 2.0).entangled);
    tiny(0, 0) = 2.0 + 1e-9;
    CHECK(criterion_trace(tiny, 2.0).entangled);
    CHECK(criterion_trace_norm(tiny, 2.0 + 1e-9, 2.0 + 1e-9).bound ==
          Catch::Approx(2.0 + 1e-9));
  }
}

TEST_CASE("detect reports only applicable criteria", "[detect]") {
  const symmetric_measurement triple = standard_measurement(2, 3, 2);
  const symmetric_measurement sic = standard_measurement(2, 1, 4);
  const symmetric_measurement qutrit = standard_measurement(3, 4, 3);

  SECTION("same family: both criteria") {
    const detection_report rep =
        detect(kron(cmatrix::Identity(2, 2) / 2, cmatrix::Identity(2, 2) / 2), triple,
               triple);
    CHECK(rep.trace_criterion.has_value());
  }
  SECTION("same dimension, different class: trace omitted") {
    const detection_report rep =
        detect(kron(cmatrix::Identity(2, 2) / 2, cmatrix::Identity(2, 2) / 2), triple,
               sic);
    CHECK_FALSE(rep.trace_criterion.has_value());
    CHECK(rep.class_b == "1,4");
  }
  SECTION("different dimensions: trace omitted") {
    const detection_report rep =
        detect(kron(cmatrix::Identity(2, 2) / 2, cmatrix::Identity(3, 3) / 3), triple,
               qutrit);
    CHECK_FALSE(rep.trace_criterion.has_value());
    CHECK(rep.dim_a == 2);
    CHECK(rep.dim_b == 3);
  }
  SECTION("state dimension must match the sides") {
    CHECK_THROWS_AS(detect(cmatrix::Identity(4, 4) / 4.0, triple, qutrit),
                    std::invalid_argument);
  }
}

TEST_CASE("no false positives on random separable states", "[detect]") {
  std::mt19937_64 rng(59);
  const symmetric_measurement m2 = standard_measurement(2, 3, 2);
  const symmetric_measurement m3 = standard_measurement(3, 4, 3);
  const struct {
    const symmetric_measurement* a;
    const symmetric_measurement* b;
  } configs[] = {{&m2, &m2}, {&m3, &m3}, {&m2, &m3}, {&m3, &m2}};

  for (const auto& cfg : configs) {
    for (int trial = 0; trial < 100; ++trial) {
      const cmatrix rho =
          random_separable(cfg.a->params.dim, cfg.b->params.dim, 10, rng);
      for (bool flip : {false, true}) {
        const detection_report rep = detect(rho, *cfg.a, *cfg.b, flip);
        CHECK_FALSE(rep.trace_norm_criterion.entangled);
        if (rep.trace_criterion) CHECK_FALSE(rep.trace_criterion->entangled);
      }
    }
  }
}

TEST_CASE("product states respect both bounds with the rank-one identity", "[detect]") {
  std::mt19937_64 rng(61);
  const symmetric_measurement meas = standard_measurement(3, 4, 3);
  for (int trial = 0; trial < 20; ++trial) {
    const cmatrix rho_a = ginibre_density(3, 1 + trial % 3, rng);
    const cmatrix rho_b = ginibre_density(3, 1 + (trial + 1) % 3, rng);
    const correlation_table table = correlation_matrix(product(rho_a, rho_b), meas, meas);
    const double ca = index_of_coincidence(probabilities(meas, rho_a));
    const double cb = index_of_coincidence(probabilities(meas, rho_b));
    CHECK_THAT(trace_norm(table), WithinAbs(std::sqrt(ca * cb), 1e-10));
    CHECK(trace_norm(table) <= family_bound(meas) + 1e-10);
    CHECK(table.trace() <= family_bound(meas) + 1e-10);
    CHECK(table.trace() <= trace_norm(table) + 1e-12);
  }
}

TEST_CASE("state constructors", "[detect]") {
  SECTION("bell state is pure with maximally mixed marginal") {
    const cmatrix bell = bell_state(3);
    CHECK_THAT(purity(bell), WithinAbs(1.0, 1e-14));
    CHECK_THAT(bell.trace().real(), WithinAbs(1.0, 1e-14));
    CHECK(max_abs_diff(oracle::partial_trace_b(bell, 3, 3),
                       cmatrix::Identity(3, 3) / 3.0) < 1e-14);
  }
  SECTION("isotropic endpoints and range check") {
    CHECK(max_abs_diff(isotropic(2, 0.0), cmatrix::Identity(4, 4) / 4.0) == 0.0);
    CHECK(max_abs_diff(isotropic(2, 1.0), bell_state(2)) < 1e-15);
    CHECK_THROWS_AS(isotropic(2, -0.1), std::domain_error);
    CHECK_THROWS_AS(isotropic(2, 1.1), std::domain_error);
  }
  SECTION("product validates its factors") {
    CHECK_THROWS_AS(product(cmatrix::Identity(2, 2), cmatrix::Identity(2, 2) / 2),
                    std::invalid_argument);
  }
  SECTION("random_separable is deterministic per seed and a valid state") {
    const cmatrix first = random_separable(2, 3, 10, std::uint64_t{77});
    const cmatrix second = random_separable(2, 3, 10, std::uint64_t{77});
    CHECK(max_abs_diff(first, second) == 0.0);
    CHECK_NOTHROW(require_state(first, 6));
  }
}

TEST_CASE("criterion values are linear (trace) and convex (trace norm) in the state",
          "[detect]") {
  std::mt19937_64 rng(67);
  const symmetric_measurement meas = standard_measurement(2, 3, 2);
  for (int trial = 0; trial < 10; ++trial) {
    const cmatrix rho1 = random_separable(2, 2, 4, rng);
    const cmatrix rho2 = bell_state(2);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double q = unif(rng);
    const cmatrix mix = q * rho1 + (1.0 - q) * rho2;

    const auto t1 = correlation_matrix(rho1, meas, meas);
    const auto t2 = correlation_matrix(rho2, meas, meas);
    const auto tm = correlation_matrix(mix, meas, meas);

    CHECK_THAT(tm.trace(), WithinAbs(q * t1.trace() + (1.0 - q) * t2.trace(), 1e-12));
    CHECK(trace_norm(tm) <= q * trace_norm(t1) + (1.0 - q) * trace_norm(t2) + 1e-12);
  }
}

TEST_CASE("threshold scan on the isotropic family", "[detect]") {
  const symmetric_measurement meas = standard_measurement(2, 3, 2);
  const symmetric_measurement flipped = transpose_elements(meas);

  SECTION("transposed trace criterion crosses at p = 1/3") {
    const scan_result res = threshold_scan(meas, flipped, criterion_kind::trace, 21);
    REQUIRE(res.p_star.has_value());
    CHECK_THAT(*res.p_star, WithinAbs(1.0 / 3.0, 2e-6));
    for (const auto& pt : res.grid) {
      CHECK(pt.flagged_trace == (pt.p > *res.p_star - 1e-9));
      // Linear value profile: Tr P(p) = 3/2 + 3p/2.
      CHECK_THAT(pt.trace_value, WithinAbs(1.5 + 1.5 * pt.p, 1e-12));
    }
  }
  SECTION("trace norm crosses at p = 1/3 with or without transposition") {
    const scan_result with = threshold_scan(meas, flipped, criterion_kind::trace_norm, 21);
    REQUIRE(with.p_star.has_value());
    CHECK_THAT(*with.p_star, WithinAbs(1.0 / 3.0, 2e-6));
    const scan_result without = threshold_scan(meas, meas, criterion_kind::trace_norm, 21);
    REQUIRE(without.p_star.has_value());
    CHECK_THAT(*without.p_star, WithinAbs(1.0 / 3.0, 2e-6));
  }
  SECTION("untransposed trace criterion never flags") {
    const scan_result res = threshold_scan(meas, meas, criterion_kind::trace, 21);
    CHECK_FALSE(res.p_star.has_value());
    for (const auto& pt : res.grid) {
      CHECK_FALSE(pt.flagged_trace);
      // Linear profile: Tr P(p) = 3/2 + p/2, at most 2.
      CHECK_THAT(pt.trace_value, WithinAbs(1.5 + 0.5 * pt.p, 1e-12));
    }
  }
  SECTION("separable endpoint is never flagged") {
    const scan_result res = threshold_scan(meas, flipped, criterion_kind::trace_norm, 11);
    CHECK_FALSE(res.grid.front().flagged_trace_norm);
    CHECK_FALSE(res.grid.front().flagged_trace);
  }
  SECTION("mismatched families reject the trace criterion and mark rows") {
    const symmetric_measurement other = standard_measurement(2, 1, 4);
    CHECK_THROWS_AS(threshold_scan(meas, other, criterion_kind::trace, 11),
                    std::invalid_argument);
    const scan_result res = threshold_scan(meas, other, criterion_kind::trace_norm, 5);
    for (const auto& pt : res.grid) CHECK(std::isnan(pt.trace_value));
  }
  SECTION("dimension mismatch is rejected") {
    const symmetric_measurement qutrit = standard_measurement(3, 4, 3);
    CHECK_THROWS_AS(threshold_scan(meas, qutrit, criterion_kind::trace_norm, 11),
                    std::invalid_argument);
  }
}
