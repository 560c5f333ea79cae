#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "symplab/common.hpp"
#include "symplab/spectrum.hpp"
#include "symplab/symplectic.hpp"
#include "symplab/word.hpp"

namespace symplab {

/// Symplectic maps of the 2d-torus in coordinates (q_1..q_d, p_1..p_d).
class MapFamily {
public:
  enum class Kind { Toral, CoupledStandard, Rotation, Translation, Product };

  /// Integer symplectic matrix acting on R^2d / Z^2d.
  static MapFamily toral(const Matrix& a);
  /// p' = p + grad W(q), q' = q + p' with
  /// W(q) = -sum_i K_i/(4 pi^2) cos(2 pi q_i) - c/(4 pi^2) sum_i cos(2 pi (q_i - q_{i+1})).
  static MapFamily coupled_standard(std::vector<double> kicks, double coupling);
  static MapFamily standard(double kick) { return coupled_standard({kick}, 0.0); }
  /// Standard map with K = 2 cos(theta) - 2: the origin is a fixed point
  /// whose derivative has eigenvalues exp(+-i theta).
  static MapFamily rotation(double theta);
  /// x -> x + v; v = 0 gives the identity.
  static MapFamily translation(const Vector& v);
  static MapFamily product(std::vector<MapFamily> factors);

  /// {"kind": ..., "params": {...}}
  static MapFamily from_json(const nlohmann::json& config);
  nlohmann::json to_json() const;

  Kind kind() const { return kind_; }
  int d() const { return d_; }
  Eigen::Index dim() const { return 2 * d_; }

  /// Image in the lift (no reduction mod 1).
  Vector lift(const Vector& x) const;
  /// Image reduced to [0,1)^2d.
  Vector evaluate(const Vector& x) const;
  SymplecticMatrix derivative(const Vector& x) const;
  Matrix derivative_matrix(const Vector& x) const;
  /// Upper bound on the sup norm of the derivative (max row sum).
  double lipschitz() const;
  std::string name() const;

private:
  MapFamily() = default;
  void validate() const;

  Kind kind_ = Kind::Translation;
  int d_ = 1;
  Matrix matrix_;           // Toral
  std::vector<double> kicks_; // CoupledStandard
  double coupling_ = 0.0;
  double theta_ = 0.0;      // Rotation
  Vector shift_;            // Translation
  std::vector<MapFamily> factors_;
};

/// Reduce coordinates to [0,1).
Vector wrap_torus(const Vector& x);
/// Max-coordinate distance with wraparound.
double torus_distance(const Vector& a, const Vector& b);

struct PeriodicOrbit {
  std::vector<Vector> points;
  int period = 1;
  Word word; // (Df(p_{tau-1}), ..., Df(p_0))
  SymplecticMatrix monodromy = SymplecticMatrix::identity(2);
  SpectralClassification classification;
};

/// Builds the orbit record starting at x (period tau), checking closure.
PeriodicOrbit make_orbit(const MapFamily& map, const Vector& x, int period);
/// Same from explicit points; each consecutive pair is checked.
PeriodicOrbit make_orbit(const MapFamily& map, std::vector<Vector> points);

struct OrbitSearchConfig {
  int max_period = 1;
  int grid = 8;           // seeds per axis of each (q_i, p_i) pair
  int winding_radius = 1; // neighbours of the rounded winding vector
  int newton_iterations = 40;
  double residual_tol = 1e-11;
  double dedup_tol = 1e-6;
  int threads = 1;
};

/// Newton search on f^n(x) - x - w = 0 for n <= max_period. Orbits come back
/// sorted by (period, canonical point); each is listed once with its minimal period.
std::vector<PeriodicOrbit> find_periodic_orbits(const MapFamily& map, const OrbitSearchConfig& config);

/// Number of points with f^n(x) = x implied by a list of orbits.
int count_period_points(const std::vector<PeriodicOrbit>& orbits, int n);

struct OrbitCensus {
  std::map<std::string, int> counts; // by PointTag name
  int elliptic_orbits = 0;           // MElliptic or TotallyElliptic
  int probe_grid = 32;
  Extended covering_radius = Extended::infinity(); // finite proxy for Hausdorff density
};

OrbitCensus orbit_census(const MapFamily& map, const std::vector<PeriodicOrbit>& orbits, int probe_grid = 32,
                         int threads = 1);

/// One CSV row per orbit: period, point_0 coordinates, tag, exponents.
std::string orbits_to_csv(const std::vector<PeriodicOrbit>& orbits);
nlohmann::json orbits_to_json(const std::vector<PeriodicOrbit>& orbits);
nlohmann::json census_to_json(const OrbitCensus& census);

} // namespace symplab
