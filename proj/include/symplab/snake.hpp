#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "symplab/common.hpp"
#include "symplab/spectrum.hpp"
#include "symplab/symplectic.hpp"

namespace symplab {

struct SnakeParams {
  int d = 1;         // half-dimension of the chart
  int m = 0;         // center half-dimension
  double r = 0.1;    // neighbourhood radius
  int N = 4;         // oscillation count
  double delta = 0.05;
  double R = 1.0;    // chart constant
  int K = 1;         // transit iterate count (bookkeeping only)
  int t = 0;         // return time, filled by build_horseshoe

  /// 2 R r delta / (pi N), recomputed on every call.
  double amplitude() const;
  /// Throws InvalidInput for bad ranges and Geometry when A >= r.
  void validate() const;
};

/// Linearized f at p with diagonal Dp = diag(l_1..l_d, 1/l_1..1/l_d).
struct LinearModel {
  SymplecticMatrix dp = SymplecticMatrix::identity(2);
  int k = 1;               // strong dimension, min(d - m + 1, d)
  std::optional<SplittingData> splitting;
  int pair = 0;            // coordinate pair (q_pair, p_pair) carrying the snake
  std::pair<double, double> segment{-1.0, 1.0}; // interval I on the x_s axis
};

/// Requires a diagonal symplectic Dp. The snake pair is the most expanding one.
/// The segment defaults to [-r, r].
LinearModel make_linear_model(const Matrix& dp, int m, double r);

/// Theta on the 2d-dimensional chart centred at q: x_u = q_pair is displaced by
/// A cos(pi x_s N / 2r), x_s = p_pair. Built from a generating function with a
/// radial bump equal to 1 on |x| <= r and 0 beyond 1.1 r, so it is symplectic
/// everywhere and the identity outside radius 1.1 r. Throws Geometry when
/// A/r is too large for the collar, roughly 414 R delta / N^2 + 13 R delta / N > 1/2.
class SnakeMap {
public:
  SnakeMap(const SnakeParams& params, int pair = 0);

  Vector apply(const Vector& x) const;
  Matrix jacobian(const Vector& x) const;
  /// max over sampled points of |D Theta - I| (operator 2-norm).
  double c1_distance(int samples = 2000, std::uint64_t seed = 1) const;

  const SnakeParams& params() const { return params_; }
  int pair() const { return pair_; }

private:
  struct Solved {
    Vector qy, py;   // y = (p, -q) coordinates and the solved image momentum
    Vector grad;     // gradient of the generating term at (qy, py)
    Matrix hess;
  };
  Solved solve(const Vector& x) const;
  void generating(const Vector& z, double& value, Vector& grad, Matrix& hess) const;

  SnakeParams params_;
  int pair_;
  double a_;
};

struct CrossingReport {
  int crossings = 0;
  bool degenerate = false; // A = 0: the whole segment is an intersection
  int refinements = 0;
  std::vector<double> zeros;
  double min_slope = 0.0;
};

/// Transversal zeros of A cos(pi x_s N / 2r) along the segment, which is
/// half-open [a, b). Sign-change scan at resolution r / (100 N).
CrossingReport count_crossings(const SnakeParams& params, std::pair<double, double> segment);
CrossingReport count_crossings(const SnakeParams& params);

struct Horseshoe {
  int t = 0;
  int t_predicted = 0;  // ceil(log(r/A) / log sigma)
  double sigma = 1.0;   // expansion of the snake pair
  double h = 0.0;       // half-height of D_t (A/2)
  double stretch_margin = 0.0;
  int components = 0;
  bool full_crossings = false;
  std::vector<std::pair<double, double>> component_intervals; // in x_s
  std::vector<long long> cylinder_counts; // j = 1..5
  bool full_shift = false;
  double entropy = 0.0; // (1/t) log N
};

constexpr int horseshoe_t_max = 200;

/// Return map of the chart model at return time t:
/// (x_s, x_u) -> (mu x_u, -nu x_s + A cos(pi mu x_u N / 2r)), mu = sigma^t, nu = 1/mu.
Vector horseshoe_return(const SnakeParams& params, double sigma, int t, const Vector& x);

Horseshoe build_horseshoe(const LinearModel& model, SnakeParams& params, int max_block = 5);

struct NormBound {
  double norm_uu = 0.0; // ||Dp^{-t}|E^uu||
  double norm_ss = 0.0; // ||Dp^{t}|E^ss||
  double k1 = 0.0;      // A / max(norm_uu, norm_ss)
  double margin = 0.0;  // log of k1 relative to the family's fitted constant
};

NormBound norm_bound(const LinearModel& model, const SnakeParams& params, int t);

struct NormBoundFamily {
  std::vector<int> Ns;
  std::vector<int> ts;
  std::vector<double> amplitudes;
  std::vector<NormBound> bounds;
  double k1 = 0.0;       // smallest constant valid for every run
  long long k1_integer = 0;
  double spread = 0.0;   // max k1 / min k1 across runs
  bool bounded = false;  // spread < 4
};

NormBoundFamily check_norm_bound(const LinearModel& model, const SnakeParams& base, const std::vector<int>& Ns);

struct EntropyComparison {
  double N = 0.0; // a double so scans can reach far beyond int range
  int t = 0;
  double left = 0.0;      // (1/t) log N
  double min_term = 0.0;  // min of the two normalized log-norms
  double slack = 0.0;     // 1/(2k)
  double strong_exponent = 0.0; // smallest positive exponent of Dp on E^ss + E^uu
  bool holds = false;
};

/// Evaluates the closing inequality at params.N (t from the model criterion).
EntropyComparison verify_entropy_comparison(const LinearModel& model, const SnakeParams& params, int k);

struct ThresholdScan {
  std::vector<EntropyComparison> rows; // N = 2, 4, 8, ... up to 2^max_log2
  double threshold = 0.0;  // smallest scanned N from which the inequality holds for all larger scanned N
  bool found = false;
};

/// Scans N = 2^1 .. 2^max_log2 with t from the closed-form stretching criterion
/// (checked against the simulated t where the horseshoe is built).
ThresholdScan entropy_threshold(const LinearModel& model, const SnakeParams& base, int k, int max_log2 = 256);

/// t from the stretching criterion sigma^t * A/2 >= 2 r, evaluated in closed form.
/// Returns -1 when sigma <= 1 or t would exceed t_max.
int stretching_time(double sigma, double amplitude, double r, int t_max = 1 << 20);

nlohmann::json horseshoe_to_json(const Horseshoe& h, const SnakeParams& p);
std::string snake_family_csv(const std::vector<SnakeParams>& params, const std::vector<Horseshoe>& runs,
                             const std::vector<NormBound>& bounds);

} // namespace symplab
