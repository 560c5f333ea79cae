#include "symplab/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>
#include <unordered_map>

#include "symplab/parallel.hpp"

namespace symplab {

TorusMap as_torus_map(const MapFamily& map) {
  return TorusMap{map.dim(), [map](const Vector& x) { return map.evaluate(x); }};
}

namespace {

// Sampled orbit segments, flat [sample][time][coordinate].
struct Segments {
  std::size_t count = 0;
  int length = 0; // times 0..length-1
  Eigen::Index dim = 0;
  std::vector<double> data;

  const double* at(std::size_t s, int t) const {
    return data.data() + (s * static_cast<std::size_t>(length) + static_cast<std::size_t>(t)) * static_cast<std::size_t>(dim);
  }
};

Segments sample_segments(const TorusMap& map, int n_max, std::size_t budget, std::uint64_t seed, int threads) {
  Segments seg;
  seg.count = budget;
  seg.length = n_max + 1;
  seg.dim = map.dim;
  seg.data.resize(budget * static_cast<std::size_t>(seg.length) * static_cast<std::size_t>(seg.dim));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t s = 0; s < budget; ++s)
    for (Eigen::Index j = 0; j < seg.dim; ++j) seg.data[s * static_cast<std::size_t>(seg.length * seg.dim) + static_cast<std::size_t>(j)] = u(rng);
  parallel_for(budget, threads, [&](std::size_t s) {
    double* base = seg.data.data() + s * static_cast<std::size_t>(seg.length * seg.dim);
    Vector x = Eigen::Map<Vector>(base, seg.dim);
    for (int t = 1; t < seg.length; ++t) {
      x = map.apply(x);
      std::copy(x.data(), x.data() + seg.dim, base + static_cast<std::size_t>(t * seg.dim));
    }
  });
  return seg;
}

inline double coord_distance(double a, double b) {
  double t = std::abs(a - b);
  t -= std::floor(t);
  return std::min(t, 1.0 - t);
}

bool close_along(const Segments& seg, std::size_t a, std::size_t b, int n, double eps) {
  for (int t = 0; t <= n; ++t) {
    const double* x = seg.at(a, t);
    const double* y = seg.at(b, t);
    for (Eigen::Index j = 0; j < seg.dim; ++j)
      if (coord_distance(x[j], y[j]) >= eps) return false;
  }
  return true;
}

struct Entry {
  double key[4];
  std::uint32_t index;
};

// Greedy pass over the first `budget` samples; candidates are pruned by a grid
// on (q_1, p_1) at times 0 and n, with those coordinates kept in the buckets.
std::size_t greedy_count(const Segments& seg, std::size_t budget, int n, double eps) {
  const auto d = seg.dim / 2;
  const std::int64_t c = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(1.0 / eps)));
  auto cell_of = [&](double v) { return std::min<std::int64_t>(c - 1, static_cast<std::int64_t>(std::floor(v * static_cast<double>(c)))); };
  std::vector<std::int64_t> shifts;
  for (std::int64_t o = -1; o <= 1; ++o) {
    const std::int64_t m = ((o % c) + c) % c;
    if (std::find(shifts.begin(), shifts.end(), m) == shifts.end()) shifts.push_back(m);
  }
  std::unordered_map<std::int64_t, std::vector<Entry>> grid;
  std::size_t accepted = 0;
  for (std::size_t s = 0; s < budget; ++s) {
    const double* x0 = seg.at(s, 0);
    const double* xn = seg.at(s, n);
    const Entry me{{x0[0], x0[d], xn[0], xn[d]}, static_cast<std::uint32_t>(s)};
    std::int64_t k[4];
    for (int i = 0; i < 4; ++i) k[i] = cell_of(me.key[i]);
    bool separated = true;
    for (std::int64_t a : shifts) {
      for (std::int64_t b : shifts) {
        for (std::int64_t e : shifts) {
          for (std::int64_t f : shifts) {
            const std::int64_t key =
                (((k[0] + a) % c * c + (k[1] + b) % c) * c + (k[2] + e) % c) * c + (k[3] + f) % c;
            const auto it = grid.find(key);
            if (it == grid.end()) continue;
            for (const Entry& y : it->second) {
              if (coord_distance(me.key[0], y.key[0]) >= eps || coord_distance(me.key[1], y.key[1]) >= eps ||
                  coord_distance(me.key[2], y.key[2]) >= eps || coord_distance(me.key[3], y.key[3]) >= eps)
                continue;
              if (close_along(seg, s, y.index, n, eps)) {
                separated = false;
                break;
              }
            }
            if (!separated) break;
          }
          if (!separated) break;
        }
        if (!separated) break;
      }
      if (!separated) break;
    }
    if (!separated) continue;
    grid[((k[0] * c + k[1]) * c + k[2]) * c + k[3]].push_back(me);
    ++accepted;
  }
  return accepted;
}

void check_cell(int n, double eps) {
  if (n < 1) throw Error(ErrorKind::InvalidInput, "n must be at least 1");
  if (!(eps > 0.0) || !std::isfinite(eps)) throw Error(ErrorKind::InvalidInput, "eps must be positive");
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
  return buf;
}

} // namespace

std::vector<std::vector<std::size_t>> separated_table(const TorusMap& map, const std::vector<int>& n_grid,
                                                      const std::vector<double>& eps_grid, std::size_t budget,
                                                      std::uint64_t seed, int threads, std::size_t stop_above,
                                                      std::vector<std::size_t>* computed) {
  if (n_grid.empty() || eps_grid.empty()) throw Error(ErrorKind::InvalidInput, "grids must be nonempty");
  if (map.dim < 2 || map.dim % 2 != 0) throw Error(ErrorKind::InvalidDimension, "torus dimension must be even");
  if (budget > std::numeric_limits<std::uint32_t>::max()) throw Error(ErrorKind::InvalidInput, "budget too large");
  for (int n : n_grid)
    for (double e : eps_grid) check_cell(n, e);
  const int n_max = *std::max_element(n_grid.begin(), n_grid.end());
  const Segments seg = sample_segments(map, n_max, budget, seed, threads);
  std::vector<std::vector<std::size_t>> out(eps_grid.size(), std::vector<std::size_t>(n_grid.size(), 0));
  std::vector<std::size_t> done(eps_grid.size(), n_grid.size());
  if (stop_above == std::numeric_limits<std::size_t>::max()) {
    const std::size_t cells = eps_grid.size() * n_grid.size();
    parallel_for(cells, threads, [&](std::size_t c) {
      const std::size_t i = c / n_grid.size(), j = c % n_grid.size();
      out[i][j] = greedy_count(seg, budget, n_grid[j], eps_grid[i]);
    });
  } else {
    // rows in increasing n, stopping after the first count above stop_above
    parallel_for(eps_grid.size(), threads, [&](std::size_t i) {
      for (std::size_t j = 0; j < n_grid.size(); ++j) {
        out[i][j] = greedy_count(seg, budget, n_grid[j], eps_grid[i]);
        if (out[i][j] > stop_above) {
          done[i] = j + 1;
          break;
        }
      }
    });
  }
  if (computed) *computed = done;
  return out;
}

std::size_t count_separated(const TorusMap& map, int n, double eps, std::size_t budget, std::uint64_t seed) {
  return separated_table(map, {n}, {eps}, budget, seed, 1, std::numeric_limits<std::size_t>::max(), nullptr)[0][0];
}

std::size_t count_separated(const MapFamily& map, int n, double eps, std::size_t budget, std::uint64_t seed) {
  return count_separated(as_torus_map(map), n, eps, budget, seed);
}

void monotone_envelope(std::vector<std::vector<std::size_t>>& counts, const std::vector<int>& n_grid,
                       const std::vector<double>& eps_grid) {
  const auto raw = counts;
  for (std::size_t i = 0; i < eps_grid.size(); ++i)
    for (std::size_t j = 0; j < n_grid.size(); ++j) {
      std::size_t best = raw[i][j];
      for (std::size_t a = 0; a < eps_grid.size(); ++a)
        for (std::size_t b = 0; b < n_grid.size(); ++b)
          if (eps_grid[a] >= eps_grid[i] && n_grid[b] <= n_grid[j]) best = std::max(best, raw[a][b]);
      counts[i][j] = best;
    }
}

namespace {

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const auto m = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = m * sxx - sx * sx;
  return den == 0.0 ? 0.0 : (m * sxy - sx * sy) / den;
}

} // namespace

EntropyReport estimate_entropy(const TorusMap& map, const EntropyConfig& cfg) {
  if (!std::is_sorted(cfg.n_grid.begin(), cfg.n_grid.end()) || !std::is_sorted(cfg.eps_grid.begin(), cfg.eps_grid.end()))
    throw Error(ErrorKind::InvalidInput, "grids must be increasing");
  if (std::adjacent_find(cfg.n_grid.begin(), cfg.n_grid.end()) != cfg.n_grid.end() ||
      std::adjacent_find(cfg.eps_grid.begin(), cfg.eps_grid.end()) != cfg.eps_grid.end())
    throw Error(ErrorKind::InvalidInput, "grids must be strictly increasing");
  if (cfg.budget < 2) throw Error(ErrorKind::InvalidInput, "budget must be at least 2");

  EntropyReport rep;
  rep.eps_grid = cfg.eps_grid;
  rep.n_grid = cfg.n_grid;
  rep.sample_budget = cfg.budget;
  const double limit = cfg.saturation * static_cast<double>(cfg.budget);
  rep.counts = separated_table(map, cfg.n_grid, cfg.eps_grid, cfg.budget, cfg.seed, cfg.threads,
                               static_cast<std::size_t>(limit), &rep.computed);
  monotone_envelope(rep.counts, cfg.n_grid, cfg.eps_grid);

  for (std::size_t i = 0; i < cfg.eps_grid.size(); ++i) {
    std::vector<double> xs, ys;
    for (std::size_t j = 0; j < cfg.n_grid.size(); ++j) {
      if (static_cast<double>(rep.counts[i][j]) > limit) {
        rep.capped = true;
        break;
      }
      xs.push_back(cfg.n_grid[j]);
      ys.push_back(std::log(static_cast<double>(std::max<std::size_t>(1, rep.counts[i][j]))));
    }
    if (xs.size() < 2) {
      rep.rates.push_back(0.0);
      rep.windows.emplace_back(cfg.n_grid.front(), cfg.n_grid.front());
      rep.low_confidence = true;
      continue;
    }
    std::vector<double> inc;
    for (std::size_t j = 0; j + 1 < xs.size(); ++j) inc.push_back((ys[j + 1] - ys[j]) / (xs[j + 1] - xs[j]));
    // longest run of increments that change by less than 10%; ties go to the larger mean
    std::size_t best_a = 0, best_b = 0;
    double best_mean = inc[0];
    for (std::size_t a = 0; a < inc.size(); ++a) {
      std::size_t b = a;
      while (b + 1 < inc.size() && std::abs(inc[b + 1] - inc[b]) <= 0.1 * std::max(std::abs(inc[b]), std::abs(inc[b + 1])))
        ++b;
      double mean = 0.0;
      for (std::size_t t = a; t <= b; ++t) mean += inc[t];
      mean /= static_cast<double>(b - a + 1);
      if (b - a > best_b - best_a || (b - a == best_b - best_a && mean > best_mean)) {
        best_a = a;
        best_b = b;
        best_mean = mean;
      }
    }
    const std::vector<double> wx(xs.begin() + static_cast<std::ptrdiff_t>(best_a), xs.begin() + static_cast<std::ptrdiff_t>(best_b + 2));
    const std::vector<double> wy(ys.begin() + static_cast<std::ptrdiff_t>(best_a), ys.begin() + static_cast<std::ptrdiff_t>(best_b + 2));
    rep.rates.push_back(std::max(0.0, fit_slope(wx, wy)));
    rep.windows.emplace_back(static_cast<int>(wx.front()), static_cast<int>(wx.back()));
    if (wx.size() < 3) rep.low_confidence = true;
  }
  rep.estimate = *std::max_element(rep.rates.begin(), rep.rates.end());
  return rep;
}

EntropyReport estimate_entropy(const MapFamily& map, const EntropyConfig& config) {
  return estimate_entropy(as_torus_map(map), config);
}

double exact_entropy_toral(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) throw Error(ErrorKind::InvalidDimension, "matrix must be square");
  Eigen::EigenSolver<Matrix> es(a, false);
  double h = 0.0;
  for (const auto& v : es.eigenvalues()) {
    const double r = std::abs(v);
    if (std::abs(r - 1.0) <= 1e-9) throw Error(ErrorKind::NotHyperbolic, "eigenvalue on the unit circle");
    if (r > 1.0) h += std::log(r);
  }
  return h;
}

double horseshoe_entropy(int symbols, int t, std::string* warning) {
  if (t < 1) throw Error(ErrorKind::InvalidInput, "return time must be at least 1");
  if (symbols < 2) {
    if (warning) *warning = "degenerate horseshoe: fewer than two symbols";
    return 0.0;
  }
  return std::log(static_cast<double>(symbols)) / t;
}

nlohmann::json entropy_to_json(const EntropyReport& r) {
  nlohmann::json j = nlohmann::json::object();
  j["eps_grid"] = r.eps_grid;
  j["n_grid"] = r.n_grid;
  j["counts"] = r.counts;
  j["rates"] = r.rates;
  nlohmann::json w = nlohmann::json::array();
  for (const auto& [a, b] : r.windows) w.push_back({a, b});
  j["windows"] = w;
  j["estimate"] = r.estimate;
  j["sample_budget"] = r.sample_budget;
  j["computed_cells"] = r.computed;
  j["low_confidence"] = r.low_confidence;
  j["capped"] = r.capped;
  return j;
}

std::string entropy_plot_data(const EntropyReport& r) {
  std::ostringstream os;
  os << "# eps n logN\n";
  for (std::size_t i = 0; i < r.eps_grid.size(); ++i) {
    for (std::size_t j = 0; j < r.n_grid.size(); ++j)
      os << fmt(r.eps_grid[i]) << ' ' << r.n_grid[j] << ' '
         << fmt(std::log(static_cast<double>(std::max<std::size_t>(1, r.counts[i][j])))) << '\n';
    os << '\n';
  }
  return os.str();
}

} // namespace symplab
