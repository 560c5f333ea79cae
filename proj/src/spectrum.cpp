#include "symplab/spectrum.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <limits>
#include <cmath>
#include <numeric>

namespace symplab {

namespace {

Eigen::EigenSolver<Matrix> solve_eigen(const Matrix& m, bool vectors) {
  Eigen::EigenSolver<Matrix> es(m, vectors);
  if (es.info() != Eigen::Success) {
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& s = svd.singularValues();
    throw Error(ErrorKind::Numerical, "eigen-solver failed (condition estimate " +
                                          std::to_string(s(0) / s(s.size() - 1)) + ")");
  }
  return es;
}

// Indices sorted by modulus ascending, then real part, then imaginary part.
std::vector<int> modulus_order(const CVector& v) {
  std::vector<int> idx(static_cast<std::size_t>(v.size()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    const double ma = std::abs(v(a)), mb = std::abs(v(b));
    if (ma != mb) return ma < mb;
    if (v(a).real() != v(b).real()) return v(a).real() < v(b).real();
    return v(a).imag() < v(b).imag();
  });
  return idx;
}

// Real basis spanning the (complexified) eigenvectors with the given indices.
Subspace real_span(const CMatrix& vecs, const std::vector<int>& idx) {
  Matrix cols(vecs.rows(), 2 * static_cast<Eigen::Index>(idx.size()));
  Eigen::Index c = 0;
  for (int i : idx) {
    cols.col(c++) = vecs.col(i).real();
    cols.col(c++) = vecs.col(i).imag();
  }
  return Subspace(cols, 1e-8);
}

// Dominant k-dimensional invariant subspace by orthogonal iteration.
Subspace dominant_subspace(const Matrix& m, Eigen::Index k) {
  const Eigen::Index n = m.rows();
  Matrix q = Matrix::Identity(n, k);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < k; ++j) q(i, j) += 0.1 * std::sin(1.0 + 3.0 * i + 7.0 * j);
  Subspace current(q);
  for (int it = 0; it < 5000; ++it) {
    Eigen::HouseholderQR<Matrix> qr(m * current.basis());
    const Matrix next = qr.householderQ() * Matrix::Identity(n, k);
    const Subspace s(next);
    const double moved = span_distance(s, current);
    current = s;
    if (moved < 1e-15) break;
  }
  return current;
}

} // namespace

double reciprocal_symmetry_defect(const CVector& values) {
  const int n = static_cast<int>(values.size());
  std::vector<Complex> recip(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) recip[static_cast<std::size_t>(i)] = 1.0 / values(i);
  auto dist = [&](int i, int j) { return std::abs(values(i) - recip[static_cast<std::size_t>(j)]); };
  if (n <= 16) {
    // bottleneck assignment by DP over subsets of the reciprocal side
    const std::size_t full = std::size_t{1} << n;
    std::vector<double> dp(full, std::numeric_limits<double>::infinity());
    dp[0] = 0.0;
    for (std::size_t mask = 0; mask < full; ++mask) {
      if (!std::isfinite(dp[mask])) continue;
      const int i = std::popcount(mask);
      if (i >= n) continue;
      for (int j = 0; j < n; ++j) {
        if (mask & (std::size_t{1} << j)) continue;
        const std::size_t nm = mask | (std::size_t{1} << j);
        dp[nm] = std::min(dp[nm], std::max(dp[mask], dist(i, j)));
      }
    }
    return dp[full - 1];
  }
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    int best = -1;
    for (int j = 0; j < n; ++j)
      if (!used[static_cast<std::size_t>(j)] && (best < 0 || dist(i, j) < dist(i, best))) best = j;
    used[static_cast<std::size_t>(best)] = true;
    worst = std::max(worst, dist(i, best));
  }
  return worst;
}

EigenData eigen_quadruples(const SymplecticMatrix& m, double tolerance) {
  const auto es = solve_eigen(m.matrix(), true);
  EigenData out;
  out.values = es.eigenvalues();
  out.vectors = es.eigenvectors();
  Eigen::JacobiSVD<CMatrix> svd(out.vectors);
  const auto& s = svd.singularValues();
  out.condition = s(s.size() - 1) > 0 ? s(0) / s(s.size() - 1) : std::numeric_limits<double>::infinity();
  out.diagonalizable = out.condition < 1e8;
  out.symmetry_defect = reciprocal_symmetry_defect(out.values);
  Complex prod = 1.0;
  for (const auto& v : out.values) prod *= v;
  out.product_defect = std::abs(prod - 1.0);

  // greedy grouping: by modulus (descending), then argument
  std::vector<int> order(static_cast<std::size_t>(out.values.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double ma = std::abs(out.values(a)), mb = std::abs(out.values(b));
    if (ma != mb) return ma > mb;
    return std::arg(out.values(a)) > std::arg(out.values(b));
  });
  std::vector<bool> taken(order.size(), false);
  for (int lead : order) {
    if (taken[static_cast<std::size_t>(lead)]) continue;
    const Complex l = out.values(lead);
    std::vector<int> group{lead};
    taken[static_cast<std::size_t>(lead)] = true;
    for (const Complex target : {std::conj(l), 1.0 / l, 1.0 / std::conj(l)}) {
      int best = -1;
      double bd = 0.0;
      for (int j : order) {
        if (taken[static_cast<std::size_t>(j)]) continue;
        const double dd = std::abs(out.values(j) - target);
        if (dd <= tolerance * std::max(1.0, std::abs(target)) && (best < 0 || dd < bd)) best = j, bd = dd;
      }
      if (best >= 0) {
        taken[static_cast<std::size_t>(best)] = true;
        group.push_back(best);
      }
    }
    out.groups.push_back(std::move(group));
  }
  return out;
}

const char* to_string(PointTag tag) {
  switch (tag) {
    case PointTag::HyperbolicDiagonalizable: return "HyperbolicDiagonalizable";
    case PointTag::Hyperbolic: return "Hyperbolic";
    case PointTag::MElliptic: return "MElliptic";
    case PointTag::TotallyElliptic: return "TotallyElliptic";
    case PointTag::Degenerate: return "Degenerate";
  }
  return "?";
}

SpectralClassification classify_point(const SymplecticMatrix& m, double tol_unit, double tol_simple) {
  const auto es = solve_eigen(m.matrix(), false);
  const CVector& v = es.eigenvalues();
  const int n = static_cast<int>(v.size());
  SpectralClassification out;

  std::vector<bool> isolated(static_cast<std::size_t>(n), true);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(v(i) - v(j)) <= tol_simple) isolated[static_cast<std::size_t>(i)] = isolated[static_cast<std::size_t>(j)] = false;
  out.simple = std::all_of(isolated.begin(), isolated.end(), [](bool b) { return b; });

  bool all_real_positive = true;
  bool unit_ok = true;
  for (int i = 0; i < n; ++i) {
    const Complex l = v(i);
    const bool real = std::abs(l.imag()) <= tol_simple;
    out.exponents.push_back(std::log(std::abs(l)));
    if (!real || l.real() <= 0) all_real_positive = false;
    if (std::abs(std::abs(l) - 1.0) <= tol_unit) {
      ++out.unit_circle_count;
      if (real) {
        out.tag = PointTag::Degenerate; // real eigenvalue at +-1
        unit_ok = false;
      } else if (!isolated[static_cast<std::size_t>(i)]) {
        unit_ok = false;
      }
    }
  }
  std::sort(out.exponents.begin(), out.exponents.end(), std::greater<>());

  if (!unit_ok) {
    out.tag = PointTag::Degenerate;
  } else if (out.unit_circle_count == 0) {
    out.tag = all_real_positive && out.simple ? PointTag::HyperbolicDiagonalizable : PointTag::Hyperbolic;
  } else if (out.unit_circle_count == n) {
    out.tag = PointTag::TotallyElliptic;
    out.m = n / 2;
  } else {
    out.tag = PointTag::MElliptic;
    out.m = out.unit_circle_count / 2;
  }
  return out;
}

std::vector<double> lyapunov_exponents_periodic(const SymplecticMatrix& m, int period) {
  if (period < 1) throw Error(ErrorKind::InvalidInput, "period must be >= 1");
  const auto es = solve_eigen(m.matrix(), false);
  std::vector<double> out;
  for (const auto& l : es.eigenvalues()) {
    if (std::abs(l) == 0.0) throw Error(ErrorKind::Numerical, "zero eigenvalue of a symplectic matrix");
    out.push_back(std::log(std::abs(l)) / period);
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

std::optional<double> s_statistic(std::span<const OrbitMonodromy> orbits) {
  std::optional<double> best;
  for (const auto& o : orbits) {
    const auto es = solve_eigen(o.monodromy.matrix(), false);
    double lmin = std::numeric_limits<double>::infinity();
    for (const auto& l : es.eigenvalues()) {
      const double a = std::abs(l);
      if (std::abs(a - 1.0) <= tol::unit)
        throw Error(ErrorKind::Precondition, "orbit '" + o.id + "' is not hyperbolic");
      if (a > 1.0) lmin = std::min(lmin, a);
    }
    const double value = std::log(lmin) / o.period;
    if (!best || value > *best) best = value;
  }
  return best;
}

double invariance_defect(const Matrix& m, const Subspace& e) {
  if (e.dim() == 0) return 0.0;
  const Matrix& b = e.basis();
  return max_abs(m * b - b * (b.transpose() * m * b)) / std::max(1.0, max_abs(m));
}

double restricted_spectral_radius(const Matrix& m, const Subspace& e, double max_defect) {
  if (e.dim() == 0) return 0.0;
  const double defect = invariance_defect(m, e);
  if (defect > max_defect)
    throw Error(ErrorKind::Precondition, "subspace is not invariant (defect " + std::to_string(defect) + ")");
  const Matrix r = e.basis().transpose() * m * e.basis();
  const auto es = solve_eigen(r, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

std::optional<double> S_statistic(std::span<const OrbitMonodromy> orbits, const CenterSelector& center_of) {
  std::optional<double> best;
  for (const auto& o : orbits) {
    const Subspace c = center_of(o);
    double sigma = 0.0;
    try {
      sigma = restricted_spectral_radius(o.monodromy.matrix(), c);
    } catch (const Error& e) {
      throw Error(ErrorKind::Precondition, "orbit '" + o.id + "': " + e.what());
    }
    if (sigma <= 0.0) continue;
    const double value = std::log(sigma) / o.period;
    if (!best || value > *best) best = value;
  }
  return best;
}

SplittingData strong_splitting(const SymplecticMatrix& sm, int k) {
  const Matrix& m = sm.matrix();
  const int n = static_cast<int>(m.rows()), d = n / 2;
  if (k < 1 || k > d) throw Error(ErrorKind::InvalidInput, "strong dimension must lie in [1, d]");
  const auto es = solve_eigen(m, true);
  const CVector& v = es.eigenvalues();
  const auto order = modulus_order(v);
  auto mod = [&](int pos) { return std::abs(v(order[static_cast<std::size_t>(pos)])); };
  auto separated = [&](int lo, int hi) { return mod(hi) - mod(lo) > tol::simple * std::max(1.0, mod(hi)); };
  if (!separated(k - 1, k) || !separated(n - k - 1, n - k))
    throw Error(ErrorKind::NoGap, "eigenvalue moduli tie at the strong cut");

  std::vector<int> low(order.begin(), order.begin() + k), high(order.end() - k, order.end());
  Subspace ss = real_span(es.eigenvectors(), low);
  Subspace uu = real_span(es.eigenvectors(), high);
  if (ss.dim() != k || invariance_defect(m, ss) > 1e-9) {
    const Matrix j = standard_j(n);
    ss = dominant_subspace(Matrix(-j * m.transpose() * j), k);
  }
  if (uu.dim() != k || invariance_defect(m, uu) > 1e-9) uu = dominant_subspace(m, k);

  Matrix both(n, 2 * k);
  both << ss.basis(), uu.basis();
  Subspace c = k == d ? Subspace::zero(n) : symplectic_orthogonal(Subspace(both));
  SplittingData out{ss, c, uu, k, 0.0};
  out.invariance_defect =
      std::max({invariance_defect(m, ss), invariance_defect(m, uu), invariance_defect(m, c)});
  return out;
}

Subspace select_center_by_gap(const SymplecticMatrix& sm, double min_gap) {
  const int n = static_cast<int>(sm.dim()), d = n / 2;
  const auto es = solve_eigen(sm.matrix(), false);
  std::vector<double> mods;
  for (const auto& l : es.eigenvalues()) mods.push_back(std::abs(l));
  std::sort(mods.begin(), mods.end());
  int best_k = 0;
  double best_gap = min_gap;
  for (int k = 1; k < d; ++k) {
    const double gap = mods[static_cast<std::size_t>(n - k)] / mods[static_cast<std::size_t>(n - k - 1)];
    if (gap > best_gap) best_gap = gap, best_k = k;
  }
  if (best_k == 0) return Subspace::full(n);
  try {
    return strong_splitting(sm, best_k).c;
  } catch (const Error&) {
    return Subspace::full(n);
  }
}

DominationResult domination_test(const Word& word, const SplittingData& split, int l) {
  if (word.empty() || l < 1) throw Error(ErrorKind::InvalidInput, "empty word or l < 1");
  const std::size_t n = word.size();
  const Matrix j = standard_j(word.dim());
  // transport each block along the word
  std::array<std::vector<Subspace>, 3> blocks;
  const std::array<const Subspace*, 3> base{&split.ss, &split.c, &split.uu};
  for (int b = 0; b < 3; ++b) {
    blocks[b].push_back(*base[b]);
    for (std::size_t i = 0; i < n; ++i) {
      const Subspace& cur = blocks[b].back();
      blocks[b].push_back(cur.dim() == 0 ? cur : Subspace(Matrix(word.acting(i).matrix() * cur.basis())));
    }
    if (base[b]->dim() > 0 && span_distance(blocks[b].back(), *base[b]) > 1e-6)
      throw Error(ErrorKind::Precondition, "splitting is not invariant along the word");
  }
  DominationResult out{true, 0.0};
  const std::array<std::pair<int, int>, 3> pairs{{{0, 1}, {0, 2}, {1, 2}}};
  for (std::size_t x = 0; x < n; ++x) {
    const Matrix fwd = cyclic_product(word, x, static_cast<std::size_t>(l));
    const Matrix bwd = -j * fwd.transpose() * j;
    const std::size_t y = (x + static_cast<std::size_t>(l)) % n;
    for (const auto& [bi, bj] : pairs) {
      const Subspace& ei = blocks[bi][x];
      const Subspace& ej = blocks[bj][y];
      if (ei.dim() == 0 || ej.dim() == 0) continue;
      const double ratio = spectral_norm(fwd * ei.basis()) * spectral_norm(bwd * ej.basis());
      out.margin = std::max(out.margin, ratio);
    }
  }
  out.dominated = out.margin <= 0.5;
  return out;
}

SymplecticMatrix elliptify(const SymplecticMatrix& m, const Subspace& center, double theta) {
  if (classify_subspace(center) != SubspaceKind::Symplectic)
    throw Error(ErrorKind::Precondition, "center is not a symplectic subspace");
  const double defect = invariance_defect(m.matrix(), center);
  if (defect > 1e-6)
    throw Error(ErrorKind::Precondition, "center is not invariant (defect " + std::to_string(defect) + ")");
  if (theta == 0.0) return m;
  const Eigen::Index pairs = center.dim() / 2;
  const Matrix rot = symplectic_sum(std::vector<Matrix>(static_cast<std::size_t>(pairs), rotation2(theta)));
  const auto ext = extend_block_in_basis(rot, symplectic_basis(center));
  return ext.transform * m;
}

SymplecticMatrix spectral_shear(std::span<const double> eps) {
  if (eps.empty()) throw Error(ErrorKind::Precondition, "no shear parameters");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0 && eps[i] < 1.0)) throw Error(ErrorKind::Precondition, "epsilon outside (0, 1)");
    if (i > 0 && eps[i] > eps[i - 1]) throw Error(ErrorKind::Precondition, "epsilons must be nonincreasing");
  }
  const Eigen::Index m = static_cast<Eigen::Index>(eps.size());
  Vector diag(2 * m);
  for (Eigen::Index i = 0; i < m; ++i) {
    diag(i) = 1.0 - eps[static_cast<std::size_t>(i)];
    diag(m + i) = 1.0 / diag(i);
  }
  return SymplecticMatrix(Matrix(diag.asDiagonal()));
}

} // namespace symplab
