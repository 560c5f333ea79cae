#include "doctest.h"
#include "helpers.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <numbers>
#include <random>

#include "symplab/cocycle.hpp"

using namespace symplab;
using namespace testing_helpers;

namespace {

constexpr double pi = std::numbers::pi;

SymplecticMatrix sm(const Matrix& m) { return SymplecticMatrix(m); }

Word word_of(std::initializer_list<Matrix> ms) {
  std::vector<SymplecticMatrix> v;
  for (const auto& m : ms) v.emplace_back(m);
  return Word(std::move(v));
}

Word random_word(int d, int length, std::uint64_t seed, double radius) {
  std::vector<SymplecticMatrix> v;
  for (int i = 0; i < length; ++i) v.push_back(random_symplectic(d, seed * 1000 + static_cast<std::uint64_t>(i), radius));
  return Word(std::move(v));
}

// 2x2 product by explicit loops.
Matrix hand_product(const Matrix& a, const Matrix& b) {
  Matrix c = Matrix::Zero(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j)
      for (int k = 0; k < a.cols(); ++k) c(i, j) += a(i, k) * b(k, j);
  return c;
}

PeriodicLinearSystem single(const std::string& id, const Word& w) {
  PeriodicLinearSystem s(w.dim());
  s.add(id, w);
  return s;
}

} // namespace

TEST_CASE("monodromy examples") {
  CHECK(max_abs(monodromy(Word::constant(SymplecticMatrix::identity(2), 5)).matrix() - Matrix::Identity(2, 2)) == 0.0);
  const Matrix j = standard_j(2);
  CHECK(max_abs(monodromy(word_of({j, j})).matrix() + Matrix::Identity(2, 2)) == 0.0);
  const Matrix a = diag({2, 0.5}), r = rotation2(pi / 2);
  CHECK(max_abs(monodromy(word_of({a, r})).matrix() - hand_product(a, r)) < 1e-15);
  CHECK(throws_kind([] { monodromy(Word()); }, ErrorKind::InvalidInput));
  CHECK(throws_kind([] { word_of({Matrix::Identity(2, 2), Matrix::Identity(4, 4)}); }, ErrorKind::InvalidDimension));
}

TEST_CASE("property: monodromy of a concatenation") {
  for (int i = 0; i < 200; ++i) {
    const int d = 1 + i % 3;
    const Word a = random_word(d, 10, 2 * static_cast<std::uint64_t>(i) + 1, 0.4);
    const Word b = random_word(d, 10, 2 * static_cast<std::uint64_t>(i) + 2, 0.4);
    const Matrix lhs = monodromy(concat(a, b)).matrix();
    const Matrix rhs = monodromy(a).matrix() * monodromy(b).matrix();
    CHECK(max_abs(lhs - rhs) <= 1e-10 * std::max(1.0, max_abs(rhs)));
  }
}

TEST_CASE("word_distance examples") {
  const Word a = random_word(2, 4, 7, 0.3);
  CHECK(word_distance(a, a).value() == 0.0);
  CHECK(word_distance(a, a.power(2)).is_infinite());
  CHECK(word_distance(word_of({diag({2, 0.5})}), word_of({diag({2.1, 1 / 2.1})})).value() ==
        doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("compose_with_transitions examples") {
  const Word wx = random_word(1, 3, 11, 0.5);
  const Word wy = random_word(1, 2, 12, 0.5);
  PeriodicLinearSystem sys(2);
  sys.add("x", wx);
  sys.add("y", wy);
  CHECK(sys.period("x") == 3);

  TransitionTable tt;
  tt[{"x", "x"}] = Transition{"x", "x", Word(), 0.1};
  const Word own = compose_with_transitions(sys, {{"x", 1}}, tt);
  CHECK(word_distance(own, wx).value() == 0.0);

  tt[{"y", "x"}] = Transition{"x", "y", random_word(1, 4, 13, 0.2), 0.1};
  tt[{"x", "y"}] = Transition{"y", "x", random_word(1, 5, 14, 0.2), 0.1};
  const Word two = compose_with_transitions(sys, {{"x", 1}, {"y", 1}}, tt);
  CHECK(two.size() == 3 + 2 + 4 + 5);
  // [t^{x,y}][M(y)][t^{y,x}][M(x)]
  const Word expected = concat(concat(tt[{"x", "y"}].word, wy), concat(tt[{"y", "x"}].word, wx));
  CHECK(word_distance(two, expected).value() == 0.0);

  const Word repeated = compose_with_transitions(sys, {{"x", 3}, {"y", 2}}, tt);
  CHECK(repeated.size() == 9 + 4 + 5 + 4);

  CHECK(throws_kind([&] { compose_with_transitions(sys, {{"x", 1}, {"x", 1}}, tt); }, ErrorKind::NotAPower));
  CHECK(throws_kind([&] { compose_with_transitions(sys, {{"x", 1}, {"y", 2}, {"x", 1}, {"y", 2}}, tt); },
                    ErrorKind::NotAPower));
  TransitionTable partial;
  partial[{"y", "x"}] = tt[{"y", "x"}];
  CHECK(throws_kind([&] { compose_with_transitions(sys, {{"x", 1}, {"y", 1}}, partial); },
                    ErrorKind::MissingTransition));
  CHECK(is_primitive({{"x", 1}, {"x", 2}}));
  CHECK_FALSE(is_primitive({{"x", 1}, {"y", 1}, {"x", 1}, {"y", 1}}));
}

TEST_CASE("realify_spectrum examples") {
  const double eps = 0.05;
  auto r = realify(word_of({rotation2(pi / 4)}), eps);
  CHECK(r.k == 8);
  CHECK(r.word.size() == 8);
  CHECK(r.distance <= eps);
  {
    Eigen::EigenSolver<Matrix> es(monodromy(r.word).matrix(), false);
    const CVector v = es.eigenvalues();
    CHECK(std::abs(v(0).imag()) < 1e-12);
    CHECK(std::abs(v(1).imag()) < 1e-12);
    CHECK(std::abs(v(0) - v(1)) > 1e-6);
    CHECK(std::abs(std::log(std::abs(v(0)))) / 8 < eps / 2);
    CHECK(std::abs(v(0) * v(1) - 1.0) < 1e-10);
  }

  const Word hyp = word_of({diag({3, 1.0 / 3}), m2(2, 1, 1, 1)});
  r = realify(hyp, eps);
  CHECK(r.k == 1);
  CHECK(word_distance(r.word, hyp).value() == 0.0);

  const Word tilted = word_of({Matrix(diag({2, 0.5}) * rotation2(0.1))});
  r = realify(tilted, eps);
  const auto x = lyapunov_exponents_periodic(monodromy(r.word), static_cast<int>(r.word.size()));
  CHECK(std::abs(x[0] - std::log(2.0)) < eps / 2);
  CHECK(classify_point(monodromy(r.word)).tag == PointTag::HyperbolicDiagonalizable);

  CHECK(throws_kind([] { realify(word_of({symplectic_sum({rotation2(0.4), rotation2(0.4)})}), 0.05); },
                    ErrorKind::Precondition));
}

TEST_CASE("realify handles negative and complex hyperbolic spectra") {
  const double eps = 0.05;
  auto r = realify(word_of({diag({-2, -0.5})}), eps);
  CHECK(r.k == 2);
  CHECK(classify_point(monodromy(r.word)).tag == PointTag::HyperbolicDiagonalizable);

  // complex quadruple r e^{+-it}, (1/r) e^{+-it}
  Matrix q = Matrix::Zero(4, 4);
  const Matrix a = 1.5 * rotation2(0.9);
  q.block(0, 0, 2, 2) = a;
  q.block(2, 2, 2, 2) = a.inverse().transpose();
  r = realify(word_of({q}), eps);
  CHECK(r.distance <= eps);
  const auto c = classify_point(monodromy(r.word));
  CHECK(c.tag == PointTag::HyperbolicDiagonalizable);
  const auto x = lyapunov_exponents_periodic(monodromy(r.word), static_cast<int>(r.word.size()));
  CHECK(std::abs(x[0] - std::log(1.5)) < eps / 2);
}

TEST_CASE("property: realify output is close and spectrally symmetric") {
  int complex_cases = 0;
  for (int i = 0; i < 60; ++i) {
    const int d = 1 + i % 2;
    const Word w = random_word(d, 1 + i % 5, 300 + static_cast<std::uint64_t>(i), 0.6);
    Realification r;
    try {
      r = realify(w, 0.05);
    } catch (const Error& e) {
      // only a budget failure is acceptable
      CHECK(e.kind() == ErrorKind::Rationalization);
      continue;
    }
    if (r.k > 1) ++complex_cases;
    INFO("instance " << i);
    CHECK(word_distance(r.word, w.power(r.k)).value() <= 0.05);
    for (const auto& l : r.word.letters()) CHECK(is_symplectic(l.matrix(), 1e-10).ok);
    // reciprocal pairing, compared on log moduli up to the conditioning of the product
    const Matrix mono = monodromy(r.word).matrix();
    const double tol = 1e-4 + 1e-15 * max_abs(mono) * max_abs(mono);
    Eigen::EigenSolver<Matrix> es(mono, false);
    std::vector<double> logs;
    for (const auto& v : es.eigenvalues()) logs.push_back(std::log(std::abs(v)));
    std::sort(logs.begin(), logs.end());
    for (std::size_t a = 0; a < logs.size(); ++a) CHECK(std::abs(logs[a] + logs[logs.size() - 1 - a]) <= tol);
  }
  CHECK(complex_cases > 0);
}

TEST_CASE("diagonalize_with_transition: d=1 diagonal orbit") {
  const double eps = 0.05;
  const auto sys = single("x", word_of({diag({4, 0.25})}));
  const auto res = diagonalize_with_transition(sys, "x", Transition{"x", "x", word_of({rotation2(0.3)}), eps}, eps);
  const auto& rep = res.report;
  CHECK(rep.line_defect <= 1e-6);
  CHECK(rep.simple_real);
  CHECK(std::abs(rep.output_top - std::log(4.0)) < eps);
  CHECK(rep.admissible_distance <= eps);
  // lines are the coordinate axes
  CHECK(sin(std::acos(std::min(1.0, std::abs(res.eigenlines.col(0).normalized()(1)))) ) < 1e-9);
}

TEST_CASE("diagonalize_with_transition: identity transition is a pure power") {
  const double eps = 0.05;
  const Word w = word_of({diag({4, 0.25})});
  const auto sys = single("x", w);
  const auto res = diagonalize_with_transition(sys, "x", Transition{"x", "x", Word(), eps}, eps);
  CHECK(res.report.admissible_distance == 0.0);
  CHECK(word_distance(res.word, w.power(static_cast<int>(res.word.size()))).value() == 0.0);
  CHECK(res.report.line_defect <= 1e-12);
}

TEST_CASE("diagonalize_with_transition: d=2 diagonal orbit with a random transition") {
  const double eps = 0.05;
  const auto sys = single("x", word_of({diag({2, 3, 0.5, 1.0 / 3})}));
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Transition t{"x", "x", Word({random_symplectic(2, 500 + seed, 0.5)}), eps};
    const auto res = diagonalize_with_transition(sys, "x", t, eps, seed);
    const auto& rep = res.report;
    INFO("seed " << seed);
    CHECK(rep.line_defect <= 1e-6);
    CHECK(rep.simple_real);
    CHECK(rep.admissible_distance <= eps);
    CHECK(std::abs(rep.output_top - std::log(3.0)) < eps);
    REQUIRE(rep.stages.size() == 2);
    CHECK(rep.stages[0].middle_defect <= 1e-7);
  }
}

TEST_CASE("diagonalize_with_transition: cat map with rotation transitions") {
  const double eps = 0.05;
  const double top = std::log(oracle::char_poly_roots_2x2(3.0)[0]);
  const auto sys = single("cat", word_of({m2(2, 1, 1, 1)}));
  for (double theta : {0.1, 0.3}) {
    const auto res =
        diagonalize_with_transition(sys, "cat", Transition{"cat", "cat", word_of({rotation2(theta)}), eps}, eps);
    INFO("theta " << theta);
    CHECK(std::abs(res.report.output_top - top) < eps);
    CHECK(res.report.line_defect <= 1e-6);
    CHECK(res.report.simple_real);
  }
}

TEST_CASE("diagonalize_with_transition: complex hyperbolic orbit") {
  const double eps = 0.05;
  Matrix q = Matrix::Zero(4, 4);
  const Matrix a = 1.5 * rotation2(0.9);
  q.block(0, 0, 2, 2) = a;
  q.block(2, 2, 2, 2) = a.inverse().transpose();
  const auto sys = single("x", word_of({q}));
  const Transition t{"x", "x", Word({random_symplectic(2, 77, 0.4)}), eps};
  const auto res = diagonalize_with_transition(sys, "x", t, eps, 3);
  const auto& rep = res.report;
  CHECK(rep.k > 1);
  CHECK(rep.line_defect <= 1e-6);
  CHECK(rep.simple_real);
  CHECK(std::abs(rep.output_top - std::log(1.5)) < eps);
  CHECK(rep.admissible_distance <= eps);
}

TEST_CASE("property: random words with large monodromy") {
  const double eps = 0.05;
  int tried = 0;
  for (std::uint64_t seed = 1; tried < 24 && seed < 400; ++seed) {
    const int d = 1 + static_cast<int>(seed % 2);
    const Word w = random_word(d, 4 + static_cast<int>(seed % 14), 3000 + seed, 0.6);
    const auto c = classify_point(monodromy(w));
    if (c.unit_circle_count != 0 || c.exponents.front() < 0.05) continue;
    ++tried;
    const auto sys = single("x", w);
    const Transition t{"x", "x", Word({random_symplectic(d, 900 + seed, 0.5)}), eps};
    const auto rep = diagonalize_with_transition(sys, "x", t, eps, seed).report;
    INFO("seed " << seed << " tag " << to_string(c.tag));
    CHECK(rep.simple_real);
    CHECK(rep.line_defect <= 1e-6);
    CHECK(std::abs(rep.output_top - rep.input_top) < eps);
  }
  CHECK(tried == 24);
}

TEST_CASE("certify_eigenlines flags a moved line") {
  const Word w = word_of({diag({3, 2, 1.0 / 3, 0.5})});
  Matrix lines = Matrix::Identity(4, 4);
  // increasing modulus: 1/3, 1/2, 2, 3
  lines.col(0) = Matrix::Identity(4, 4).col(2);
  lines.col(1) = Matrix::Identity(4, 4).col(3);
  lines.col(2) = Matrix::Identity(4, 4).col(1);
  lines.col(3) = Matrix::Identity(4, 4).col(0);
  std::vector<double> ex;
  std::vector<int> signs;
  CHECK(certify_eigenlines(w, lines, ex, signs) <= 1e-14);
  REQUIRE(ex.size() == 4);
  CHECK(ex[3] == doctest::Approx(std::log(3.0)).epsilon(1e-14));
  CHECK(ex[0] == doctest::Approx(-std::log(3.0)).epsilon(1e-14));
  lines.col(2) = (lines.col(2) + 0.01 * lines.col(3)).normalized();
  CHECK(certify_eigenlines(w, lines, ex, signs) > 1e-3);
}
