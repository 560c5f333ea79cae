#pragma once

#include <cstdint>
#include <vector>

#include "symplab/common.hpp"

namespace symplab {

/// The standard symplectic form on R^{2d}: omega(u, v) = u^T J v with
/// J = [[0, I_d], [-I_d, 0]].
struct StandardForm {
  int d = 0;
  Matrix J;
};

StandardForm standard_form(int d);

/// J for ambient dimension n = 2d. Throws InvalidDimension for odd or zero n.
Matrix standard_j(Eigen::Index n);

inline double omega(const Vector& u, const Vector& v) {
  const Eigen::Index d = u.size() / 2;
  return u.head(d).dot(v.tail(d)) - u.tail(d).dot(v.head(d));
}

struct SymplecticCheck {
  bool ok = false;
  double defect = 0.0; // ||A^T J A - J||_max
};

SymplecticCheck is_symplectic(const Matrix& a, double tolerance = tol::sympl);

/// Square matrix of even dimension verified to satisfy A^T J A = J.
class SymplecticMatrix {
public:
  /// Validates the defect against `tolerance` and det(A) = 1 within 1e-6.
  explicit SymplecticMatrix(Matrix a, double tolerance = tol::sympl);

  static SymplecticMatrix identity(Eigen::Index n);

  const Matrix& matrix() const { return a_; }
  Eigen::Index dim() const { return a_.rows(); }
  int half_dim() const { return static_cast<int>(a_.rows() / 2); }
  double defect() const { return defect_; }

  /// Inverse via -J A^T J.
  SymplecticMatrix inverse() const;

  friend SymplecticMatrix operator*(const SymplecticMatrix& a, const SymplecticMatrix& b);

private:
  SymplecticMatrix(Matrix a, double defect, int) : a_(std::move(a)), defect_(defect) {}
  Matrix a_;
  double defect_ = 0.0;
};

/// Linear subspace of R^{2d} stored with an orthonormal basis.
class Subspace {
public:
  /// Orthonormalizes the columns of `spanning` by Gram-Schmidt, so the
  /// leading flags of the given columns are preserved.
  /// Columns whose residual falls below `rank_tol` are dropped.
  explicit Subspace(const Matrix& spanning, double rank_tol = 1e-10);
  static Subspace zero(Eigen::Index ambient);
  static Subspace full(Eigen::Index ambient);
  /// span of the standard basis vectors e_{i+1} for the given 0-based indices.
  static Subspace coordinate(Eigen::Index ambient, std::initializer_list<int> indices);

  Eigen::Index ambient_dim() const { return basis_.rows(); }
  Eigen::Index dim() const { return basis_.cols(); }
  const Matrix& basis() const { return basis_; }
  Matrix projector() const { return basis_ * basis_.transpose(); }

private:
  struct Raw {};
  Subspace(Raw, Matrix basis) : basis_(std::move(basis)) {}
  Matrix basis_;
};

enum class SubspaceKind { Symplectic, Isotropic, Lagrangian, Generic };
const char* to_string(SubspaceKind kind);

/// Cosines of the principal angles between two subspaces, descending.
Vector principal_cosines(const Subspace& a, const Subspace& b);
/// Largest principal angle between two subspaces of equal dimension
/// (0 when they coincide).
double span_distance(const Subspace& a, const Subspace& b);

Subspace symplectic_orthogonal(const Subspace& w);
SubspaceKind classify_subspace(const Subspace& w, double tolerance = 1e-9);

/// Symplectic basis (u_1..u_m, v_1..v_m) of a symplectic subspace, returned
/// as the columns of a 2d x 2m matrix. omega(u_i, v_j) = delta_ij and all
/// other pairings vanish.
Matrix symplectic_basis(const Subspace& w);

/// Outcome of aligning an isotropic subspace W onto E while fixing F.
struct Alignment {
  SymplecticMatrix transform;
  /// Graph map A : E -> F in coordinates adapted to E (+) F (orthonormal
  /// bases of E and F taken as coordinates), so that W = {x + A x}.
  Matrix graph_map;
  double graph_norm = 0.0; // ||A||_2 in adapted coordinates
  double deviation = 0.0;  // ||B - Id||_2 in adapted coordinates
  double ambient_deviation = 0.0; // ||B - Id||_2 in the standard basis
};

/// B(x, y) = (x, y - A x) in coordinates of V = E (+) F. Requires E and W
/// isotropic of equal dimension, W transverse to F, and the range of A inside
/// F cap F^omega (otherwise no symplectic B with B|F = Id maps W onto E).
Alignment align_isotropic(const Subspace& w, const Subspace& e, const Subspace& f);

struct BlockExtension {
  SymplecticMatrix transform;
  /// Symplectic basis of W followed by one of W^omega, interleaved so that
  /// the resulting 2d x 2d basis P satisfies P^T J P = J.
  Matrix adapted_basis;
  double conditioning = 1.0; // ||P|| * ||P^{-1}||
  /// ||B - Id|| / ||A_W - Id|| (1 when A_W is the identity).
  double amplification = 1.0;
};

/// Extends A_W (given in the symplectic basis returned by symplectic_basis(W))
/// to B with B|W = A_W and B|W^omega = Id.
BlockExtension extend_block(const Matrix& a_w, const Subspace& w);

/// Same as extend_block but A_W is given in an explicit symplectic basis of W
/// (columns u_1..u_m, v_1..v_m).
BlockExtension extend_block_in_basis(const Matrix& a_w, const Matrix& w_symplectic_basis);

/// min over unit w in E of |tan(arccos(cos angle(w, F)))|.
Extended angle(const Subspace& e, const Subspace& f);
/// ||L||^{-1} for F = {w + L w : w in E^perp}; requires dim F = codim E and
/// F transverse to E.
Extended graph_angle(const Subspace& e, const Subspace& f);

/// exp(J S) for a seeded random symmetric S with ||S||_2 = radius.
SymplecticMatrix random_symplectic(int d, std::uint64_t seed, double radius);

/// Rotation by theta in the (e_1, e_2) plane, i.e. [[c, s], [-s, c]].
Matrix rotation2(double theta);
/// Direct sum of symplectic blocks, each given in its own standard ordering.
Matrix symplectic_sum(const std::vector<Matrix>& blocks);

} // namespace symplab
