#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "symplab/common.hpp"
#include "symplab/dynamics.hpp"

namespace symplab {

/// A self-map of the torus [0,1)^dim.
struct TorusMap {
  Eigen::Index dim = 2;
  std::function<Vector(const Vector&)> apply;
};

TorusMap as_torus_map(const MapFamily& map);

/// Greedy (n, eps)-separated subset of `budget` uniformly sampled points in
/// the metric d_n(x,y) = max_{0<=i<=n} d(f^i x, f^i y), d the max-coordinate
/// torus distance. A lower bound on N(n, eps); a larger budget only extends
/// the sample, so the count is nondecreasing in budget.
std::size_t count_separated(const TorusMap& map, int n, double eps, std::size_t budget, std::uint64_t seed);
std::size_t count_separated(const MapFamily& map, int n, double eps, std::size_t budget, std::uint64_t seed);

/// Raw greedy counts for every (eps, n) cell, indexed [eps][n]. With a finite
/// `stop_above`, each eps row stops after its first count above it; later
/// cells stay 0 and `computed` receives the number of cells filled per row.
std::vector<std::vector<std::size_t>> separated_table(
    const TorusMap& map, const std::vector<int>& n_grid, const std::vector<double>& eps_grid, std::size_t budget,
    std::uint64_t seed, int threads = 1, std::size_t stop_above = std::numeric_limits<std::size_t>::max(),
    std::vector<std::size_t>* computed = nullptr);

/// Replaces each cell by the max over cells with n' <= n and eps' >= eps.
/// Every such set is separated for (n, eps) too, so this stays a lower bound.
void monotone_envelope(std::vector<std::vector<std::size_t>>& counts, const std::vector<int>& n_grid,
                       const std::vector<double>& eps_grid);

struct EntropyConfig {
  std::vector<double> eps_grid{0.05, 0.1, 0.2};
  std::vector<int> n_grid{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14};
  std::size_t budget = 100000;
  std::uint64_t seed = 1;
  int threads = 1;
  double saturation = 0.125; // counts above this fraction of the budget are not fitted
};

struct EntropyReport {
  std::vector<double> eps_grid;
  std::vector<int> n_grid;
  std::vector<std::vector<std::size_t>> counts; // [eps][n], after the monotone envelope
  std::vector<std::size_t> computed;            // per eps: cells counted before the sample saturated
  std::vector<double> rates;                    // fitted slope per eps
  std::vector<std::pair<int, int>> windows;     // fitted n-range per eps
  double estimate = 0.0;
  std::size_t sample_budget = 0;
  bool low_confidence = false;
  bool capped = false;
};

EntropyReport estimate_entropy(const TorusMap& map, const EntropyConfig& config);
EntropyReport estimate_entropy(const MapFamily& map, const EntropyConfig& config);

/// Sum of log|lambda| over eigenvalues of modulus > 1. Throws NotHyperbolic
/// when some eigenvalue has modulus within 1e-9 of one.
double exact_entropy_toral(const Matrix& a);

/// (1/t) log N; returns 0 and sets `warning` for N < 2.
double horseshoe_entropy(int symbols, int t, std::string* warning = nullptr);

nlohmann::json entropy_to_json(const EntropyReport& report);
/// Three columns: eps, n, log N(n, eps).
std::string entropy_plot_data(const EntropyReport& report);

} // namespace symplab
