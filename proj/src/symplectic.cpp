#include "symplab/symplectic.hpp"

#include <cmath>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

namespace symplab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidDimension: return "invalid-dimension";
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::GraphDegeneracy: return "graph-degeneracy";
    case ErrorKind::DegenerateRestriction: return "degenerate-restriction";
    case ErrorKind::Numerical: return "numerical";
    case ErrorKind::NoGap: return "no-gap";
    case ErrorKind::NotHyperbolic: return "not-hyperbolic";
    case ErrorKind::NotAPower: return "not-a-power";
    case ErrorKind::MissingTransition: return "missing-transition";
    case ErrorKind::Rationalization: return "rationalization";
    case ErrorKind::DominationTooWeak: return "domination-too-weak";
    case ErrorKind::Geometry: return "geometry";
    case ErrorKind::ModelTooWeak: return "model-too-weak";
    case ErrorKind::Config: return "config";
  }
  return "unknown";
}

std::string Extended::str() const {
  if (infinite_) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value_);
  return buf;
}

StandardForm standard_form(int d) {
  if (d < 1) throw Error(ErrorKind::InvalidDimension, "half-dimension must be >= 1");
  return {d, standard_j(2 * d)};
}

Matrix standard_j(Eigen::Index n) {
  if (n <= 0 || n % 2 != 0)
    throw Error(ErrorKind::InvalidDimension, "ambient dimension must be even and positive");
  const Eigen::Index d = n / 2;
  Matrix j = Matrix::Zero(n, n);
  j.topRightCorner(d, d).setIdentity();
  j.bottomLeftCorner(d, d) = -Matrix::Identity(d, d);
  return j;
}

SymplecticCheck is_symplectic(const Matrix& a, double tolerance) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::InvalidDimension, "matrix is not square");
  const Matrix j = standard_j(a.rows());
  const double defect = max_abs(a.transpose() * j * a - j);
  return {defect <= tolerance, defect};
}

SymplecticMatrix::SymplecticMatrix(Matrix a, double tolerance) : a_(std::move(a)) {
  const auto check = is_symplectic(a_, tolerance);
  defect_ = check.defect;
  if (!check.ok)
    throw Error(ErrorKind::Precondition,
                "matrix is not symplectic (defect " + std::to_string(defect_) + ")");
  if (std::abs(a_.determinant() - 1.0) > 1e-6 * std::max(1.0, std::pow(a_.norm(), static_cast<double>(a_.rows()))))
    throw Error(ErrorKind::Numerical, "symplectic matrix with determinant != 1");
}

SymplecticMatrix SymplecticMatrix::identity(Eigen::Index n) {
  standard_j(n);
  return SymplecticMatrix(Matrix::Identity(n, n), 0.0, 0);
}

SymplecticMatrix SymplecticMatrix::inverse() const {
  const Matrix j = standard_j(dim());
  return SymplecticMatrix(Matrix(-j * a_.transpose() * j), defect_, 0);
}

SymplecticMatrix operator*(const SymplecticMatrix& a, const SymplecticMatrix& b) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::InvalidDimension, "dimension mismatch in product");
  Matrix p = a.a_ * b.a_;
  const double defect = is_symplectic(p, 0.0).defect;
  return SymplecticMatrix(std::move(p), defect, 0);
}

// ---------------------------------------------------------------------------
// Subspaces

Subspace::Subspace(const Matrix& spanning, double rank_tol) {
  const Eigen::Index n = spanning.rows();
  // Modified Gram-Schmidt with re-orthogonalization: keeps column order, so
  // span(first j basis vectors) = span(first j independent inputs).
  const double scale = std::max(1.0, max_abs(spanning));
  std::vector<Vector> kept;
  for (Eigen::Index c = 0; c < spanning.cols(); ++c) {
    Vector v = spanning.col(c);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : kept) v -= q.dot(v) * q;
    const double nv = v.norm();
    if (nv > rank_tol * scale) kept.push_back(v / nv);
  }
  basis_.resize(n, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t i = 0; i < kept.size(); ++i) basis_.col(static_cast<Eigen::Index>(i)) = kept[i];
}

Subspace Subspace::zero(Eigen::Index ambient) { return Subspace(Raw{}, Matrix(ambient, 0)); }

Subspace Subspace::full(Eigen::Index ambient) {
  return Subspace(Raw{}, Matrix::Identity(ambient, ambient));
}

Subspace Subspace::coordinate(Eigen::Index ambient, std::initializer_list<int> indices) {
  Matrix b = Matrix::Zero(ambient, static_cast<Eigen::Index>(indices.size()));
  Eigen::Index c = 0;
  for (int i : indices) {
    if (i < 0 || i >= ambient) throw Error(ErrorKind::InvalidInput, "coordinate index out of range");
    b(i, c++) = 1.0;
  }
  return Subspace(b);
}

Vector principal_cosines(const Subspace& a, const Subspace& b) {
  if (a.dim() == 0 || b.dim() == 0) return Vector();
  Eigen::JacobiSVD<Matrix> svd(a.basis().transpose() * b.basis());
  return svd.singularValues().cwiseMin(1.0);
}

double span_distance(const Subspace& a, const Subspace& b) {
  if (a.dim() != b.dim()) return M_PI / 2;
  if (a.dim() == 0) return 0.0;
  // sin of the largest principal angle = ||(I - P_b) A||
  const Matrix resid = a.basis() - b.basis() * (b.basis().transpose() * a.basis());
  return std::asin(std::min(1.0, spectral_norm(resid)));
}

namespace {

// Orthonormal basis of the orthogonal complement of span(cols).
Matrix orthogonal_complement(const Matrix& cols, Eigen::Index n) {
  if (cols.cols() == 0) return Matrix::Identity(n, n);
  Eigen::JacobiSVD<Matrix> svd(cols.transpose(), Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  Eigen::Index rank = 0;
  const double cut = 1e-10 * std::max(1.0, s.size() ? s(0) : 0.0);
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cut) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

} // namespace

Subspace symplectic_orthogonal(const Subspace& w) {
  const Eigen::Index n = w.ambient_dim();
  const Matrix j = standard_j(n);
  // omega(v, w) = v^T J w = 0 for all w  <=>  v orthogonal to J W.
  return Subspace(orthogonal_complement(j * w.basis(), n));
}

const char* to_string(SubspaceKind kind) {
  switch (kind) {
    case SubspaceKind::Symplectic: return "Symplectic";
    case SubspaceKind::Isotropic: return "Isotropic";
    case SubspaceKind::Lagrangian: return "Lagrangian";
    case SubspaceKind::Generic: return "Generic";
  }
  return "?";
}

SubspaceKind classify_subspace(const Subspace& w, double tolerance) {
  const Eigen::Index n = w.ambient_dim();
  const Matrix j = standard_j(n);
  const Matrix gram = w.basis().transpose() * j * w.basis();
  if (max_abs(gram) <= tolerance)
    return w.dim() == n / 2 ? SubspaceKind::Lagrangian : SubspaceKind::Isotropic;
  const Subspace wo = symplectic_orthogonal(w);
  if (wo.dim() == 0) return SubspaceKind::Symplectic;
  const Vector cosines = principal_cosines(w, wo);
  const double smallest_angle = std::acos(std::min(1.0, cosines(0)));
  return smallest_angle > tolerance ? SubspaceKind::Symplectic : SubspaceKind::Generic;
}

Matrix symplectic_basis(const Subspace& w) {
  const Eigen::Index n = w.ambient_dim();
  if (w.dim() == 0 || w.dim() % 2 != 0)
    throw Error(ErrorKind::DegenerateRestriction, "subspace of odd or zero dimension");
  const Eigen::Index m = w.dim() / 2;
  Matrix us(n, m), vs(n, m);
  Matrix rest = w.basis();
  for (Eigen::Index step = 0; step < m; ++step) {
    // pivot: the pair with the largest |omega|
    double best = 0.0;
    Eigen::Index bi = 0, bj = 0;
    for (Eigen::Index i = 0; i < rest.cols(); ++i)
      for (Eigen::Index j = i + 1; j < rest.cols(); ++j) {
        const double o = std::abs(omega(rest.col(i), rest.col(j)));
        if (o > best) best = o, bi = i, bj = j;
      }
    if (best <= 1e-9)
      throw Error(ErrorKind::DegenerateRestriction, "omega degenerates on the subspace");
    Vector u = rest.col(bi);
    Vector v = rest.col(bj) / omega(u, rest.col(bj));
    // balance norms, keeping omega(u, v) = 1
    const double bal = std::sqrt(v.norm() / u.norm());
    u *= bal;
    v /= bal;
    us.col(step) = u;
    vs.col(step) = v;
    // project the others onto span(u, v)^omega
    Matrix next(n, rest.cols());
    Eigen::Index c = 0;
    for (Eigen::Index i = 0; i < rest.cols(); ++i) {
      if (i == bi || i == bj) continue;
      const Vector x = rest.col(i);
      next.col(c++) = x + omega(v, x) * u - omega(u, x) * v;
    }
    next.conservativeResize(n, c);
    rest = Subspace(next, 1e-12).basis();
    if (rest.cols() != 2 * (m - step - 1))
      throw Error(ErrorKind::DegenerateRestriction, "rank loss during symplectic reduction");
  }
  Matrix out(n, 2 * m);
  out << us, vs;
  return out;
}

// ---------------------------------------------------------------------------
// Local perturbations

Alignment align_isotropic(const Subspace& w, const Subspace& e, const Subspace& f) {
  const Eigen::Index n = e.ambient_dim();
  const Eigen::Index k = e.dim();
  if (w.ambient_dim() != n || f.ambient_dim() != n)
    throw Error(ErrorKind::InvalidDimension, "subspaces live in different spaces");
  if (w.dim() != k) throw Error(ErrorKind::Precondition, "dim W != dim E");
  if (k + f.dim() != n) throw Error(ErrorKind::Precondition, "dim E + dim F != dim V");
  const auto ek = classify_subspace(e);
  if (ek != SubspaceKind::Isotropic && ek != SubspaceKind::Lagrangian)
    throw Error(ErrorKind::Precondition, "E is not isotropic");
  const auto wk = classify_subspace(w);
  if (wk != SubspaceKind::Isotropic && wk != SubspaceKind::Lagrangian)
    throw Error(ErrorKind::Precondition, "W is not isotropic");

  Matrix p(n, n);
  p << e.basis(), f.basis();
  Eigen::FullPivLU<Matrix> plu(p);
  if (!plu.isInvertible() || std::abs(plu.determinant()) < 1e-10)
    throw Error(ErrorKind::Precondition, "E and F do not span V");
  const Matrix coords = plu.solve(w.basis()); // [X; Y]
  const Matrix x = coords.topRows(k);
  const Matrix y = coords.bottomRows(n - k);
  Eigen::FullPivLU<Matrix> xlu(x);
  if (!xlu.isInvertible() || Eigen::JacobiSVD<Matrix>(x).singularValues().minCoeff() < 1e-10)
    throw Error(ErrorKind::GraphDegeneracy, "W meets F nontrivially");
  Matrix a = y * xlu.inverse();

  Matrix bc = Matrix::Identity(n, n);
  bc.bottomLeftCorner(n - k, k) = -a;
  Matrix b = p * bc * plu.inverse();

  const auto check = is_symplectic(b, tol::sympl * std::max(1.0, b.norm()));
  if (!check.ok)
    throw Error(ErrorKind::Precondition,
                "graph map leaves F cap F^omega; no symplectic alignment fixing F (defect " +
                    std::to_string(check.defect) + ")");

  Alignment out{SymplecticMatrix(b, std::max(tol::sympl, check.defect)), a, 0.0, 0.0, 0.0};
  out.graph_norm = spectral_norm(a);
  out.deviation = spectral_norm(bc - Matrix::Identity(n, n));
  out.ambient_deviation = spectral_norm(b - Matrix::Identity(n, n));
  return out;
}

BlockExtension extend_block_in_basis(const Matrix& a_w, const Matrix& sb) {
  const Eigen::Index n = sb.rows();
  const Eigen::Index m = sb.cols() / 2;
  if (a_w.rows() != 2 * m || a_w.cols() != 2 * m)
    throw Error(ErrorKind::InvalidDimension, "A_W does not match dim W");
  if (!is_symplectic(a_w, tol::sympl).ok)
    throw Error(ErrorKind::Precondition, "A_W is not symplectic on W");
  const Eigen::Index d = n / 2;

  const Subspace w(sb);
  const Subspace wo = symplectic_orthogonal(w);
  Matrix cb = wo.dim() > 0 ? symplectic_basis(wo) : Matrix(n, 0);
  const Eigen::Index r = d - m;

  // P = [u_W, u_C, v_W, v_C] is a symplectic basis for the standard form.
  Matrix p(n, n);
  p << sb.leftCols(m), cb.leftCols(r), sb.rightCols(m), cb.rightCols(r);

  Matrix block = Matrix::Identity(n, n);
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < m; ++i) idx.push_back(i);
  for (Eigen::Index i = 0; i < m; ++i) idx.push_back(d + i);
  for (Eigen::Index i = 0; i < 2 * m; ++i)
    for (Eigen::Index j = 0; j < 2 * m; ++j) block(idx[i], idx[j]) = a_w(i, j);

  const Matrix j = standard_j(n);
  const Matrix pinv = -j * p.transpose() * j;
  Matrix b = p * block * pinv;
  const double scale = std::max(1.0, b.norm());
  BlockExtension out{SymplecticMatrix(b, tol::sympl * scale * scale), p, 1.0, 1.0};
  out.conditioning = spectral_norm(p) * spectral_norm(pinv);
  const double base = spectral_norm(a_w - Matrix::Identity(2 * m, 2 * m));
  out.amplification = base > 0 ? spectral_norm(b - Matrix::Identity(n, n)) / base : 1.0;
  return out;
}

BlockExtension extend_block(const Matrix& a_w, const Subspace& w) {
  if (classify_subspace(w) != SubspaceKind::Symplectic)
    throw Error(ErrorKind::Precondition, "W is not a symplectic subspace");
  return extend_block_in_basis(a_w, symplectic_basis(w));
}

Extended angle(const Subspace& e, const Subspace& f) {
  if (e.dim() == 0 || f.dim() == 0) throw Error(ErrorKind::InvalidInput, "zero subspace");
  const double c = principal_cosines(e, f)(0);
  if (c <= 1e-15) return Extended::infinity();
  return Extended(std::sqrt(std::max(0.0, 1.0 - c * c)) / c);
}

Extended graph_angle(const Subspace& e, const Subspace& f) {
  if (e.dim() == 0 || f.dim() == 0) throw Error(ErrorKind::InvalidInput, "zero subspace");
  const Eigen::Index n = e.ambient_dim();
  if (e.dim() + f.dim() != n) throw Error(ErrorKind::Precondition, "E and F are not complementary");
  const Matrix eperp = orthogonal_complement(e.basis(), n);
  const Matrix a = e.basis().transpose() * f.basis();     // E-components
  const Matrix bperp = eperp.transpose() * f.basis();     // E^perp-components
  Eigen::FullPivLU<Matrix> lu(bperp);
  if (!lu.isInvertible()) throw Error(ErrorKind::Precondition, "F is not transverse to E");
  const double norm_l = spectral_norm(a * lu.inverse());
  if (norm_l <= 1e-15) return Extended::infinity();
  return Extended(1.0 / norm_l);
}

SymplecticMatrix random_symplectic(int d, std::uint64_t seed, double radius) {
  const Matrix j = standard_form(d).J;
  const Eigen::Index n = 2 * d;
  if (radius < 0) throw Error(ErrorKind::InvalidInput, "radius must be nonnegative");
  if (radius == 0) return SymplecticMatrix::identity(n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(n, n);
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index r = 0; r < n; ++r) g(r, c) = normal(rng);
  Matrix s = 0.5 * (g + g.transpose());
  s *= radius / spectral_norm(s);
  Matrix h = j * s;
  Matrix a = h.exp();
  const double scale = std::max(1.0, a.norm());
  return SymplecticMatrix(std::move(a), tol::sympl * scale * scale);
}

Matrix rotation2(double theta) {
  Matrix r(2, 2);
  r << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
  return r;
}

Matrix symplectic_sum(const std::vector<Matrix>& blocks) {
  Eigen::Index d = 0;
  for (const auto& b : blocks) {
    if (b.rows() != b.cols() || b.rows() % 2 != 0)
      throw Error(ErrorKind::InvalidDimension, "block must be square of even dimension");
    d += b.rows() / 2;
  }
  Matrix out = Matrix::Zero(2 * d, 2 * d);
  Eigen::Index off = 0;
  for (const auto& b : blocks) {
    const Eigen::Index h = b.rows() / 2;
    for (Eigen::Index i = 0; i < 2 * h; ++i)
      for (Eigen::Index j = 0; j < 2 * h; ++j) {
        const Eigen::Index gi = i < h ? off + i : d + off + (i - h);
        const Eigen::Index gj = j < h ? off + j : d + off + (j - h);
        out(gi, gj) = b(i, j);
      }
    off += h;
  }
  return out;
}

} // namespace symplab
