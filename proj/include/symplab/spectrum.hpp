#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "symplab/symplectic.hpp"
#include "symplab/word.hpp"

namespace symplab {

/// Eigenvalues of a symplectic matrix grouped into symmetry classes
/// {lambda, 1/lambda, conj lambda, 1/conj lambda}.
struct EigenData {
  CVector values;
  CMatrix vectors;            // eigenvector columns (meaningful when diagonalizable)
  bool diagonalizable = false;
  std::vector<std::vector<int>> groups;
  double symmetry_defect = 0.0; // optimal-pairing distance of the spectrum to its reciprocal image
  double product_defect = 0.0;  // |prod lambda - 1|
  double condition = 1.0;       // condition number of the eigenvector matrix
};

EigenData eigen_quadruples(const SymplecticMatrix& m, double tolerance = tol::eig);

/// Bottleneck distance between the multisets {lambda_i} and {1/lambda_i}:
/// the smallest achievable max |lambda_i - 1/lambda_pi(i)| over matchings pi
/// (exact for n <= 16, greedy beyond).
double reciprocal_symmetry_defect(const CVector& values);

enum class PointTag { HyperbolicDiagonalizable, Hyperbolic, MElliptic, TotallyElliptic, Degenerate };
const char* to_string(PointTag tag);

struct SpectralClassification {
  PointTag tag = PointTag::Degenerate;
  int m = 0; // number of elliptic pairs for MElliptic / TotallyElliptic
  int unit_circle_count = 0;
  bool simple = false;
  std::vector<double> exponents; // log|lambda| (period 1), descending
};

SpectralClassification classify_point(const SymplecticMatrix& m, double tol_unit = tol::unit,
                                      double tol_simple = tol::simple);

/// (1/period) log|lambda_i|, sorted descending.
std::vector<double> lyapunov_exponents_periodic(const SymplecticMatrix& m, int period);

/// A periodic orbit reduced to what the exponent statistics need.
struct OrbitMonodromy {
  std::string id;
  int period = 1;
  SymplecticMatrix monodromy;
};

/// max over orbits of (1/tau) log lambda_min, lambda_min the smallest modulus
/// above one. nullopt for an empty input.
std::optional<double> s_statistic(std::span<const OrbitMonodromy> orbits);

using CenterSelector = std::function<Subspace(const OrbitMonodromy&)>;

/// max over orbits of (1/tau) log sigma(M | center(orbit)).
std::optional<double> S_statistic(std::span<const OrbitMonodromy> orbits, const CenterSelector& center_of);

/// Spectral radius of M restricted to an invariant subspace; throws
/// Precondition when the invariance defect exceeds `max_defect`.
double restricted_spectral_radius(const Matrix& m, const Subspace& e, double max_defect = 1e-6);

/// ||M B - B (B^T M B)||_max for the orthonormal basis B of E.
double invariance_defect(const Matrix& m, const Subspace& e);

struct SplittingData {
  Subspace ss, c, uu;
  int k = 0;
  double invariance_defect = 0.0;
};

/// E^ss = sum of the k smallest-modulus eigenspaces, E^uu the k largest,
/// E^c the rest. Throws NoGap on a modulus tie at either cut.
SplittingData strong_splitting(const SymplecticMatrix& m, int k);

/// Center selection by the largest multiplicative modulus gap among cuts
/// k = 1..d-1; returns the full space when no gap exceeds `min_gap`.
Subspace select_center_by_gap(const SymplecticMatrix& m, double min_gap = 1.2);

struct DominationResult {
  bool dominated = false;
  double margin = 0.0; // worst l-step norm product over positions and pairs
};

/// l-step domination of the splitting (given at the word's base point) along
/// the cyclic word, bound 1/2 for pairs (s,c), (s,u), (c,u).
DominationResult domination_test(const Word& word, const SplittingData& split, int l);

/// B o M where B rotates every (u_i, v_i) plane of a symplectic basis of the
/// center by theta and fixes the symplectic orthogonal of the center.
SymplecticMatrix elliptify(const SymplecticMatrix& m, const Subspace& center, double theta);

/// diag(1 - eps_1, ..., 1 - eps_m, 1/(1 - eps_1), ..., 1/(1 - eps_m)).
SymplecticMatrix spectral_shear(std::span<const double> epsilons);

} // namespace symplab
