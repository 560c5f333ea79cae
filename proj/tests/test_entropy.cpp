#include "doctest.h"
#include "helpers.hpp"
#include "oracles.hpp"

#include <cmath>
#include <numbers>

#include "symplab/entropy.hpp"

using namespace symplab;
using namespace testing_helpers;

namespace {

constexpr double pi = std::numbers::pi;

Matrix cat() { return m2(2, 1, 1, 1); }

// log of the larger root of lambda^2 - tr lambda + 1.
double toral_oracle(double trace) { return std::log(oracle::char_poly_roots_2x2(trace)[0]); }

TorusMap identity_map() {
  return TorusMap{2, [](const Vector& x) { return x; }};
}

// h(q, p) = (q + 0.1 sin(2 pi p), p) and its inverse; area preserving.
Vector h_fwd(const Vector& x) {
  Vector y = x;
  y(0) += 0.1 * std::sin(2 * pi * x(1));
  return wrap_torus(y);
}
Vector h_inv(const Vector& x) {
  Vector y = x;
  y(0) -= 0.1 * std::sin(2 * pi * x(1));
  return wrap_torus(y);
}

} // namespace

TEST_CASE("exact_entropy_toral examples") {
  CHECK(exact_entropy_toral(cat()) == doctest::Approx(toral_oracle(3.0)).epsilon(1e-12));
  CHECK(toral_oracle(3.0) == doctest::Approx(0.9624).epsilon(1e-4));
  CHECK(exact_entropy_toral(symplectic_sum({cat(), cat()})) == doctest::Approx(2 * toral_oracle(3.0)).epsilon(1e-12));
  CHECK(throws_kind([] { exact_entropy_toral(m2(1, 1, 0, 1)); }, ErrorKind::NotHyperbolic));
}

TEST_CASE("horseshoe_entropy examples") {
  CHECK(horseshoe_entropy(4, 10) == doctest::Approx(0.13863).epsilon(1e-4));
  CHECK(horseshoe_entropy(2, 1) == std::log(2.0));
  CHECK(horseshoe_entropy(16, 8) == doctest::Approx(horseshoe_entropy(4, 4)).epsilon(1e-15));
  std::string warning;
  CHECK(horseshoe_entropy(1, 3, &warning) == 0.0);
  CHECK_FALSE(warning.empty());
  CHECK(throws_kind([] { horseshoe_entropy(4, 0); }, ErrorKind::InvalidInput));
}

TEST_CASE("count_separated examples") {
  // identity: d_n = d, so the count does not depend on n and packs at most 3x3 points at eps 0.3
  const auto id = identity_map();
  const auto c1 = count_separated(id, 1, 0.3, 5000, 3);
  CHECK(c1 >= 3);
  CHECK(c1 <= 9);
  for (int n : {2, 5, 10}) CHECK(count_separated(id, n, 0.3, 5000, 3) == c1);

  // translation is an isometry
  const auto tr = as_torus_map(MapFamily::translation(Vector::Constant(2, std::sqrt(2.0) - 1)));
  const auto t1 = count_separated(tr, 1, 0.1, 20000, 5);
  for (int n : {3, 7}) CHECK(count_separated(tr, n, 0.1, 20000, 5) == t1);

  const auto c = count_separated(MapFamily::toral(cat()), 12, 0.1, 100000, 1);
  CHECK(std::abs(std::log(static_cast<double>(c)) / 12 - toral_oracle(3.0)) <= 0.25 * toral_oracle(3.0));

  CHECK(throws_kind([&] { count_separated(id, 0, 0.1, 10, 1); }, ErrorKind::InvalidInput));
  CHECK(throws_kind([&] { count_separated(id, 1, 0.0, 10, 1); }, ErrorKind::InvalidInput));
}

TEST_CASE("property: separated counts are monotone") {
  const auto f = as_torus_map(MapFamily::standard(1.5));
  const std::vector<int> ns{2, 4, 6};
  const std::vector<double> es{0.05, 0.1, 0.2};
  std::vector<std::vector<std::vector<std::size_t>>> tables;
  for (std::size_t b : {2000u, 6000u, 18000u}) {
    auto t = separated_table(f, ns, es, b, 9);
    // budget growth only extends the sample
    if (!tables.empty())
      for (std::size_t i = 0; i < es.size(); ++i)
        for (std::size_t j = 0; j < ns.size(); ++j) CHECK(t[i][j] >= tables.back()[i][j]);
    tables.push_back(t);
  }
  for (auto t : tables) {
    monotone_envelope(t, ns, es);
    for (std::size_t i = 0; i < es.size(); ++i)
      for (std::size_t j = 0; j < ns.size(); ++j) {
        if (j + 1 < ns.size()) CHECK(t[i][j] <= t[i][j + 1]);
        if (i + 1 < es.size()) CHECK(t[i][j] >= t[i + 1][j]);
      }
  }
  for (std::size_t k = 0; k + 1 < tables.size(); ++k) {
    auto a = tables[k], b = tables[k + 1];
    monotone_envelope(a, ns, es);
    monotone_envelope(b, ns, es);
    for (std::size_t i = 0; i < es.size(); ++i)
      for (std::size_t j = 0; j < ns.size(); ++j) CHECK(a[i][j] <= b[i][j]);
  }
}

TEST_CASE("estimate_entropy examples") {
  EntropyConfig cfg;
  cfg.budget = 50000;
  cfg.n_grid = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const auto cat_rep = estimate_entropy(MapFamily::toral(cat()), cfg);
  CHECK(cat_rep.estimate >= 0.75);
  CHECK(cat_rep.estimate <= 1.05);
  CHECK(cat_rep.rates.size() == cfg.eps_grid.size());

  const auto id_rep = estimate_entropy(identity_map(), cfg);
  CHECK(id_rep.estimate <= 0.02);

  const auto prod = estimate_entropy(MapFamily::product({MapFamily::toral(cat()), MapFamily::toral(cat())}), cfg);
  CHECK(std::abs(prod.estimate - 2 * toral_oracle(3.0)) <= 0.25 * 2 * toral_oracle(3.0));
  // product additivity surrogate
  CHECK(prod.estimate >= 1.5 * cat_rep.estimate);

  // reported counts are monotone
  for (std::size_t i = 0; i < cat_rep.eps_grid.size(); ++i)
    for (std::size_t j = 0; j + 1 < cat_rep.n_grid.size(); ++j) CHECK(cat_rep.counts[i][j] <= cat_rep.counts[i][j + 1]);

  cfg.n_grid = {3, 2};
  CHECK(throws_kind([&] { estimate_entropy(identity_map(), cfg); }, ErrorKind::InvalidInput));
}

TEST_CASE("property: estimator does not overshoot toral oracles") {
  EntropyConfig cfg;
  cfg.budget = 40000;
  cfg.n_grid = {1, 2, 3, 4, 5, 6, 7, 8};
  const std::vector<Matrix> maps{cat(), m2(3, 1, 2, 1), m2(1, 1, 1, 2), m2(3, 2, 1, 1),
                                 symplectic_sum({cat(), cat()}), symplectic_sum({m2(1, 1, 1, 2), cat()})};
  for (const auto& a : maps) {
    const double truth = exact_entropy_toral(a);
    const double est = estimate_entropy(MapFamily::toral(a), cfg).estimate;
    INFO("oracle " << truth << " estimate " << est);
    CHECK(est <= 1.1 * truth);
    CHECK(est >= 0.5 * truth);
  }
}

TEST_CASE("property: entropy estimate is stable under a smooth conjugacy") {
  EntropyConfig cfg;
  cfg.budget = 50000;
  cfg.n_grid = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const auto f = MapFamily::toral(cat());
  const TorusMap conj{2, [&](const Vector& x) { return h_fwd(f.evaluate(h_inv(x))); }};
  const double a = estimate_entropy(f, cfg).estimate;
  const double b = estimate_entropy(conj, cfg).estimate;
  CHECK(std::abs(a - b) <= 0.15 * a);
}

TEST_CASE("entropy output is independent of thread count") {
  EntropyConfig cfg;
  cfg.budget = 20000;
  cfg.n_grid = {1, 2, 3, 4, 5, 6};
  const auto f = MapFamily::standard(2.0);
  const auto one = entropy_to_json(estimate_entropy(f, cfg)).dump();
  cfg.threads = 3;
  const auto rep = estimate_entropy(f, cfg);
  CHECK(entropy_to_json(rep).dump() == one);
  const auto plot = entropy_plot_data(rep);
  CHECK(plot.rfind("# eps n logN", 0) == 0);
}
