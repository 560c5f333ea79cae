#include "doctest.h"
#include "helpers.hpp"
#include "oracles.hpp"

#include <numbers>
#include <random>

#include "symplab/spectrum.hpp"

using namespace symplab;
using namespace testing_helpers;

namespace {

constexpr double pi = std::numbers::pi;

Matrix cat() { return m2(2, 1, 1, 1); }

SymplecticMatrix sm(const Matrix& m) { return SymplecticMatrix(m); }

SymplecticMatrix cat_rot(double theta) { return sm(symplectic_sum({cat(), rotation2(theta)})); }

std::vector<double> sorted_abs(const CVector& v) {
  std::vector<double> out;
  for (const auto& x : v) out.push_back(std::abs(x));
  std::sort(out.begin(), out.end());
  return out;
}

// Random block-structured symplectic matrix with a known tag.
Matrix random_blocks(int d, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kind(0, 4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Matrix> blocks;
  for (int i = 0; i < d; ++i) {
    switch (kind(rng)) {
      case 0: blocks.push_back(rotation2(0.3 + 2.5 * u(rng))); break;
      case 1: {
        const double a = 1.5 + 3.0 * u(rng);
        blocks.push_back(diag({a, 1.0 / a}));
        break;
      }
      case 2: {
        const double a = 1.5 + 3.0 * u(rng);
        blocks.push_back(diag({-a, -1.0 / a}));
        break;
      }
      case 3: blocks.push_back(m2(1, 1, 0, 1)); break;
      default: blocks.push_back(cat()); break;
    }
  }
  return symplectic_sum(blocks);
}

} // namespace

TEST_CASE("eigen_quadruples examples") {
  auto e = eigen_quadruples(sm(diag({2, 0.5})));
  REQUIRE(e.groups.size() == 1);
  CHECK(e.groups[0].size() == 2);
  CHECK(sorted_abs(e.values)[0] == doctest::Approx(0.5));
  CHECK(sorted_abs(e.values)[1] == doctest::Approx(2.0));

  e = eigen_quadruples(sm(rotation2(pi / 3)));
  REQUIRE(e.groups.size() == 1);
  for (const auto& v : e.values) {
    CHECK(std::abs(v) == doctest::Approx(1.0));
    CHECK(std::abs(std::arg(v)) == doctest::Approx(pi / 3));
  }

  e = eigen_quadruples(sm(cat()));
  const auto roots = oracle::char_poly_roots_2x2(3.0);
  const auto mods = sorted_abs(e.values);
  CHECK(mods[0] == doctest::Approx(roots[1]).epsilon(1e-12));
  CHECK(mods[1] == doctest::Approx(roots[0]).epsilon(1e-12));
  CHECK(e.product_defect < 1e-12);
  CHECK(e.symmetry_defect < 1e-12);
  CHECK(e.diagonalizable);
}

TEST_CASE("eigen_quadruples groups a complex quadruple") {
  // rotation scaled in one plane of a 4x4 symplectic block: eigenvalues r e^{+-i t}, (1/r) e^{+-i t}
  const double r = 2.0, t = 0.7;
  Matrix a = r * rotation2(t);
  Matrix m = Matrix::Zero(4, 4);
  m.block(0, 0, 2, 2) = a;
  m.block(2, 2, 2, 2) = a.inverse().transpose();
  REQUIRE(is_symplectic(m).ok);
  const auto e = eigen_quadruples(sm(m));
  REQUIRE(e.groups.size() == 1);
  CHECK(e.groups[0].size() == 4);
}

TEST_CASE("classify_point examples") {
  auto c = classify_point(sm(diag({2, 3, 0.5, 1.0 / 3})));
  CHECK(c.tag == PointTag::HyperbolicDiagonalizable);
  CHECK(c.unit_circle_count == 0);

  c = classify_point(sm(symplectic_sum({rotation2(pi / 5), diag({2, 0.5})})));
  CHECK(c.tag == PointTag::MElliptic);
  CHECK(c.m == 1);
  CHECK(c.unit_circle_count == 2);

  c = classify_point(sm(symplectic_sum({rotation2(pi / 5), rotation2(pi / 7)})));
  CHECK(c.tag == PointTag::TotallyElliptic);
  CHECK(c.unit_circle_count == 4);

  CHECK(classify_point(sm(Matrix::Identity(2, 2))).tag == PointTag::Degenerate);
  CHECK(classify_point(sm(-Matrix::Identity(2, 2))).tag == PointTag::Degenerate);
  CHECK(classify_point(sm(m2(1, 1, 0, 1))).tag == PointTag::Degenerate);
  CHECK(classify_point(sm(diag({-2, -0.5}))).tag == PointTag::Hyperbolic);
  // repeated unit pair is not simple
  CHECK(classify_point(sm(symplectic_sum({rotation2(0.4), rotation2(0.4)}))).tag == PointTag::Degenerate);
  // repeated real pair: hyperbolic but not diagonalizable-simple
  CHECK(classify_point(sm(diag({2, 2, 0.5, 0.5}))).tag == PointTag::Hyperbolic);
}

TEST_CASE("lyapunov_exponents_periodic examples") {
  const double top = std::log(oracle::char_poly_roots_2x2(3.0)[0]);
  auto x = lyapunov_exponents_periodic(sm(cat()), 1);
  CHECK(x[0] == doctest::Approx(top).epsilon(1e-12));
  CHECK(x[1] == doctest::Approx(-top).epsilon(1e-12));
  CHECK(x[0] == doctest::Approx(0.9624).epsilon(1e-4));

  x = lyapunov_exponents_periodic(sm(rotation2(1.1)), 1);
  CHECK(std::abs(x[0]) < 1e-12);
  CHECK(std::abs(x[1]) < 1e-12);

  x = lyapunov_exponents_periodic(sm(diag({4, 0.25})), 2);
  CHECK(x[0] == doctest::Approx(std::log(2.0)));
  CHECK(x[1] == doctest::Approx(-std::log(2.0)));

  CHECK(throws_kind([] { lyapunov_exponents_periodic(sm(cat()), 0); }, ErrorKind::InvalidInput));
}

TEST_CASE("s_statistic examples") {
  const double top = std::log(oracle::char_poly_roots_2x2(3.0)[0]);
  std::vector<OrbitMonodromy> orbits{{"cat", 1, sm(cat())}};
  REQUIRE(s_statistic(orbits).has_value());
  CHECK(*s_statistic(orbits) == doctest::Approx(top));

  orbits = {{"a", 1, sm(diag({2, 0.5}))}, {"b", 3, sm(diag({8, 0.125}))}};
  CHECK(*s_statistic(orbits) == doctest::Approx(std::log(2.0)));

  CHECK_FALSE(s_statistic(std::vector<OrbitMonodromy>{}).has_value());

  orbits = {{"a", 1, sm(diag({2, 0.5}))}, {"elliptic-7", 2, sm(rotation2(0.3))}};
  try {
    s_statistic(orbits);
    FAIL("expected a precondition error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Precondition);
    CHECK(std::string(e.what()).find("elliptic-7") != std::string::npos);
  }
}

TEST_CASE("S_statistic examples") {
  const double top = std::log(oracle::char_poly_roots_2x2(3.0)[0]);
  std::vector<OrbitMonodromy> orbits{{"p", 1, cat_rot(0.9)}};
  // rotation occupies coordinates 1 and 3
  auto rot_plane = [](const OrbitMonodromy&) { return Subspace::coordinate(4, {1, 3}); };
  auto full = [](const OrbitMonodromy& o) { return Subspace::full(o.monodromy.dim()); };
  CHECK(std::abs(*S_statistic(orbits, rot_plane)) < 1e-12);
  CHECK(*S_statistic(orbits, full) == doctest::Approx(top));
  CHECK_FALSE(S_statistic(std::vector<OrbitMonodromy>{}, full).has_value());

  auto bad = [](const OrbitMonodromy&) { return Subspace::coordinate(4, {0, 1}); };
  CHECK(throws_kind([&] { S_statistic(orbits, bad); }, ErrorKind::Precondition));
}

TEST_CASE("strong_splitting examples") {
  auto s = strong_splitting(sm(diag({1.0 / 3, 0.5, 3, 2})), 1);
  CHECK(span_distance(s.ss, Subspace::coordinate(4, {0})) < 1e-12);
  CHECK(span_distance(s.uu, Subspace::coordinate(4, {2})) < 1e-12);
  CHECK(span_distance(s.c, Subspace::coordinate(4, {1, 3})) < 1e-12);

  s = strong_splitting(cat_rot(0.9), 1);
  CHECK(s.ss.dim() == 1);
  CHECK(s.uu.dim() == 1);
  CHECK(span_distance(s.c, Subspace::coordinate(4, {1, 3})) < 1e-10);
  CHECK(s.invariance_defect <= 1e-7);

  CHECK(throws_kind([] { strong_splitting(sm(diag({2, 2, 0.5, 0.5})), 1); }, ErrorKind::NoGap));
  CHECK(throws_kind([] { strong_splitting(sm(cat()), 2); }, ErrorKind::InvalidInput));
}

TEST_CASE("strong_splitting invariants on random hyperbolic matrices") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 2 + trial % 2;
    std::vector<Matrix> blocks;
    for (int i = 0; i < d; ++i) {
      const double a = 1.3 + i + 0.5 * u(rng);
      blocks.push_back(diag({a, 1.0 / a}));
    }
    const Matrix s = random_symplectic(d, 1000 + static_cast<std::uint64_t>(trial), 0.5).matrix();
    const Matrix m = s * symplectic_sum(blocks) * (-standard_j(2 * d) * s.transpose() * standard_j(2 * d));
    const int k = 1 + trial % (d - 1);
    const auto sp = strong_splitting(sm(m), k);
    INFO("trial " << trial);
    CHECK(sp.ss.dim() == k);
    CHECK(sp.uu.dim() == k);
    CHECK(sp.c.dim() == 2 * d - 2 * k);
    CHECK(sp.invariance_defect <= 1e-7);
    CHECK(classify_subspace(sp.c) == SubspaceKind::Symplectic);
    Matrix both(2 * d, 2 * k);
    both << sp.ss.basis(), sp.uu.basis();
    CHECK(span_distance(Subspace(both), symplectic_orthogonal(sp.c)) <= 1e-7);
    const auto cos_sc = principal_cosines(sp.ss, sp.c);
    const auto cos_su = principal_cosines(sp.ss, sp.uu);
    CHECK(cos_sc.maxCoeff() < 1.0 - 1e-8);
    CHECK(cos_su.maxCoeff() < 1.0 - 1e-8);
    ++checked;
  }
  CHECK(checked == 200);
}

TEST_CASE("select_center_by_gap") {
  CHECK(span_distance(select_center_by_gap(cat_rot(0.9)), Subspace::coordinate(4, {1, 3})) < 1e-10);
  CHECK(select_center_by_gap(sm(diag({1.1, 1.05, 1 / 1.1, 1 / 1.05}))).dim() == 4);
  CHECK(select_center_by_gap(sm(cat())).dim() == 2);
}

TEST_CASE("domination_test examples") {
  const double lambda = oracle::char_poly_roots_2x2(3.0)[0];
  const auto m = cat_rot(0.9);
  auto r = domination_test(Word::constant(m), strong_splitting(m, 1), 1);
  CHECK(r.dominated);
  CHECK(r.margin == doctest::Approx(1.0 / lambda).epsilon(1e-9));

  const auto rr = sm(symplectic_sum({rotation2(0.4), rotation2(1.1)}));
  SplittingData split{Subspace::coordinate(4, {0}), Subspace::coordinate(4, {1, 3}), Subspace::coordinate(4, {2}), 1, 0.0};
  for (int l : {1, 3, 10})
    CHECK_FALSE(domination_test(Word::constant(sm(symplectic_sum({rotation2(0.0), rotation2(1.1)}))), split, l).dominated);
  CHECK(throws_kind([&] { domination_test(Word::constant(rr), split, 1); }, ErrorKind::Precondition));

  const auto dm = sm(diag({4, 1, 0.25, 1}));
  r = domination_test(Word::constant(dm), strong_splitting(dm, 1), 1);
  CHECK(r.dominated);
  CHECK(r.margin == doctest::Approx(0.25));
}

TEST_CASE("domination_test on a non-constant word") {
  const auto a = cat_rot(0.9);
  const auto b = cat_rot(0.2);
  const Word w(std::vector<SymplecticMatrix>{a, b});
  const auto sp = strong_splitting(monodromy(w), 1);
  const auto r = domination_test(w, sp, 2);
  CHECK(r.dominated);
  CHECK(r.margin < 0.5);
}

TEST_CASE("elliptify examples") {
  const auto id = SymplecticMatrix::identity(4);
  const Subspace center = Subspace::coordinate(4, {0, 2});
  const auto e = elliptify(id, center, pi / 6);
  const auto composed = sm(diag({1, 2, 1, 0.5}) * e.matrix());
  const auto c = classify_point(composed);
  CHECK(c.tag == PointTag::MElliptic);
  CHECK(c.m == 1);

  const auto m = cat_rot(0.9);
  CHECK(max_abs(elliptify(m, Subspace::coordinate(4, {1, 3}), 0.0).matrix() - m.matrix()) == 0.0);

  CHECK(classify_point(elliptify(SymplecticMatrix::identity(2), Subspace::full(2), pi / 4)).tag ==
        PointTag::TotallyElliptic);

  Matrix tilted = Matrix::Zero(4, 2);
  tilted(0, 0) = tilted(1, 0) = 1.0;
  tilted(2, 1) = 1.0;
  CHECK(throws_kind([&] { elliptify(m, Subspace(tilted), 0.3); }, ErrorKind::Precondition));
  CHECK(throws_kind([&] { elliptify(m, Subspace::coordinate(4, {0, 1}), 0.3); }, ErrorKind::Precondition));
}

TEST_CASE("spectral_shear examples") {
  const std::vector<double> one{0.5};
  CHECK(max_abs(spectral_shear(one).matrix() - diag({0.5, 2})) == 0.0);
  const std::vector<double> two{0.5, 0.25};
  CHECK(max_abs(spectral_shear(two).matrix() - diag({0.5, 0.75, 2, 4.0 / 3})) < 1e-15);
  CHECK(classify_point(spectral_shear(two)).tag == PointTag::HyperbolicDiagonalizable);
  const std::vector<double> small{1e-3, 1e-4};
  const double dev = max_abs(spectral_shear(small).matrix() - Matrix::Identity(4, 4));
  CHECK(dev == doctest::Approx(1e-3 / (1 - 1e-3)).epsilon(1e-12));

  for (const auto& bad : std::vector<std::vector<double>>{{0.0}, {1.0}, {-0.1}, {0.2, 0.3}, {}})
    CHECK(throws_kind([&] { spectral_shear(bad); }, ErrorKind::Precondition));
}

TEST_CASE("property: reciprocal spectral symmetry") {
  for (int i = 0; i < 1000; ++i) {
    const int d = 1 + i % 4;
    const auto m = random_symplectic(d, 50000 + static_cast<std::uint64_t>(i), 0.3 + 0.002 * i);
    const auto e = eigen_quadruples(m);
    INFO("instance " << i);
    CHECK(e.symmetry_defect <= 1e-6);
    CHECK(e.product_defect <= 1e-6);
  }
}

TEST_CASE("property: classification is conjugation invariant") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 500; ++i) {
    const int d = 1 + i % 3;
    const Matrix m = random_blocks(d, rng);
    const Matrix s = random_symplectic(d, 70000 + static_cast<std::uint64_t>(i), 0.8).matrix();
    Eigen::JacobiSVD<Matrix> svd(s);
    REQUIRE(svd.singularValues()(0) / svd.singularValues()(2 * d - 1) < 100.0);
    const Matrix s_inv = -standard_j(2 * d) * s.transpose() * standard_j(2 * d);
    const auto a = classify_point(sm(m));
    const auto b = classify_point(SymplecticMatrix(s_inv * m * s, 1e-8));
    INFO("instance " << i);
    CHECK(a.tag == b.tag);
    CHECK(a.m == b.m);
  }
}

TEST_CASE("property: exponents are antisymmetric") {
  for (int i = 0; i < 300; ++i) {
    const int d = 1 + i % 4;
    const auto m = random_symplectic(d, 90000 + static_cast<std::uint64_t>(i), 1.5);
    const auto x = lyapunov_exponents_periodic(m, 1 + i % 5);
    double sum = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      CHECK(std::abs(x[j] + x[x.size() - 1 - j]) <= 1e-6);
      sum += x[j];
    }
    CHECK(std::abs(sum) <= 1e-6);
  }
}

TEST_CASE("property: statistics are monotone under adding orbits") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(1.2, 6.0);
  std::vector<OrbitMonodromy> orbits;
  auto full = [](const OrbitMonodromy& o) { return Subspace::full(o.monodromy.dim()); };
  std::optional<double> s_prev, big_prev;
  for (int i = 0; i < 60; ++i) {
    const double a = u(rng), b = u(rng);
    const Matrix m = symplectic_sum({diag({a, 1 / a}), diag({b, 1 / b})});
    orbits.push_back({"o" + std::to_string(i), 1 + i % 4, sm(m)});
    const auto s_now = s_statistic(orbits);
    const auto big_now = S_statistic(orbits, full);
    REQUIRE(s_now.has_value());
    REQUIRE(big_now.has_value());
    if (s_prev) CHECK(*s_now >= *s_prev);
    if (big_prev) CHECK(*big_now >= *big_prev);
    s_prev = s_now;
    big_prev = big_now;
  }
}

TEST_CASE("property: domination at l implies domination at 2l") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int passes = 0;
  for (int i = 0; i < 200; ++i) {
    const double a = 1.2 + 3.0 * u(rng);
    const Matrix base = symplectic_sum({diag({a, 1 / a}), rotation2(3.0 * u(rng))});
    const Matrix s = random_symplectic(2, 123000 + static_cast<std::uint64_t>(i), 0.4).matrix();
    const Matrix s_inv = -standard_j(4) * s.transpose() * standard_j(4);
    const auto m = SymplecticMatrix(s * base * s_inv, 1e-8);
    const auto sp = strong_splitting(m, 1);
    const Word w = Word::constant(m);
    for (int l : {1, 2, 3}) {
      const auto r1 = domination_test(w, sp, l);
      if (!r1.dominated) continue;
      ++passes;
      const auto r2 = domination_test(w, sp, 2 * l);
      INFO("instance " << i << " l " << l);
      CHECK(r2.dominated);
      CHECK(r2.margin <= r1.margin * r1.margin + 1e-9);
    }
  }
  CHECK(passes > 50);
}

TEST_CASE("property: elliptify unit count bound") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 300; ++i) {
    const int d = 2 + i % 2;
    const Matrix m = random_blocks(d, rng);
    // center: coordinate plane of the first block, which is invariant
    const Subspace center = Subspace::coordinate(2 * d, {0, d});
    const Subspace rest = symplectic_orthogonal(center);
    const Matrix restricted = rest.basis().transpose() * m * rest.basis();
    int rest_units = 0;
    Eigen::EigenSolver<Matrix> es(restricted, false);
    for (const auto& v : es.eigenvalues())
      if (std::abs(std::abs(v) - 1.0) <= tol::unit) ++rest_units;
    const auto e = elliptify(sm(m), center, 0.1 + 0.01 * i);
    const auto c = classify_point(e);
    INFO("instance " << i);
    CHECK(c.unit_circle_count <= center.dim() + rest_units);
  }
}
