#pragma once
// Independent reference computations used only by tests. Nothing here calls
// into the code path it is meant to check.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "symplab/symplectic.hpp"

namespace oracle {

using symplab::Matrix;
using symplab::Vector;

// J built entry by entry from omega(e_i, e_{d+i}) = 1.
inline Matrix form(int d) {
  Matrix j = Matrix::Zero(2 * d, 2 * d);
  for (int i = 0; i < d; ++i) {
    j(i, d + i) = 1.0;
    j(d + i, i) = -1.0;
  }
  return j;
}

// max_ij |(A^T J A - J)_ij| with explicit loops.
inline double defect(const Matrix& a) {
  const int n = static_cast<int>(a.rows());
  const Matrix j = form(n / 2);
  double worst = 0.0;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      double s = 0.0;
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) s += a(p, r) * j(p, q) * a(q, c);
      worst = std::max(worst, std::abs(s - j(r, c)));
    }
  return worst;
}

// True when every column of `a` lies in span(b) within tol (b orthonormal).
inline double residual_outside(const Matrix& a, const Matrix& b_orthonormal) {
  Matrix r = a - b_orthonormal * (b_orthonormal.transpose() * a);
  return r.cwiseAbs().maxCoeff();
}

inline Matrix orthonormalize(const Matrix& m) {
  Eigen::HouseholderQR<Matrix> qr(m);
  return qr.householderQ() * Matrix::Identity(m.rows(), m.cols());
}

inline std::vector<double> char_poly_roots_2x2(double tr) {
  // lambda^2 - tr lambda + 1 = 0
  const double disc = std::sqrt(tr * tr - 4.0);
  return {(tr + disc) / 2.0, (tr - disc) / 2.0};
}

// Random instance of the isotropic alignment problem: E isotropic of dim k,
// F a complement with F^omega inside F, W the graph of a symmetric map of
// norm <= max_graph into F cap F^omega, all carried by a random symplectic
// change of basis S.
struct AlignInstance {
  Matrix e, f, w;
  Matrix s; // change of basis
  Matrix m; // symmetric graph coefficients
  int k = 0;
};

inline AlignInstance random_align_instance(int d, std::uint64_t seed, double max_graph = 0.2) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> kdist(1, d);
  std::normal_distribution<double> normal;
  AlignInstance inst;
  inst.k = kdist(rng);
  const int k = inst.k, n = 2 * d;
  inst.s = symplab::random_symplectic(d, seed * 7919 + 1, 0.6).matrix();
  Matrix g(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) g(i, j) = normal(rng);
  Matrix m = 0.5 * (g + g.transpose());
  Eigen::JacobiSVD<Matrix> svd(m);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  m *= max_graph * frac(rng) / std::max(1e-12, svd.singularValues()(0));
  inst.m = m;
  Matrix e0 = Matrix::Zero(n, k), w0 = Matrix::Zero(n, k), f0 = Matrix::Zero(n, n - k);
  for (int i = 0; i < k; ++i) {
    e0(i, i) = 1.0;
    w0(i, i) = 1.0;
    for (int j = 0; j < k; ++j) w0(d + j, i) = m(j, i);
  }
  int c = 0;
  for (int i = k; i < d; ++i) f0(i, c++) = 1.0;
  for (int i = d; i < n; ++i) f0(i, c++) = 1.0;
  inst.e = inst.s * e0;
  inst.f = inst.s * f0;
  inst.w = inst.s * w0;
  return inst;
}

} // namespace oracle
