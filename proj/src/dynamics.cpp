#include "symplab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>
#include <unordered_map>

#include "symplab/parallel.hpp"

namespace symplab {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
  return buf;
}

Vector sub_vector(const Vector& x, int d, int offset, int h) {
  Vector out(2 * h);
  out.head(h) = x.segment(offset, h);
  out.tail(h) = x.segment(d + offset, h);
  return out;
}

void put_sub_vector(Vector& x, int d, int offset, int h, const Vector& part) {
  x.segment(offset, h) = part.head(h);
  x.segment(d + offset, h) = part.tail(h);
}

} // namespace

Vector wrap_torus(const Vector& x) {
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double v = x(i) - std::floor(x(i));
    if (v >= 1.0) v = 0.0;
    out(i) = v;
  }
  return out;
}

double torus_distance(const Vector& a, const Vector& b) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    double t = std::abs(a(i) - b(i));
    t -= std::floor(t);
    worst = std::max(worst, std::min(t, 1.0 - t));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// MapFamily

MapFamily MapFamily::toral(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() % 2 != 0 || a.rows() == 0)
    throw Error(ErrorKind::InvalidDimension, "toral automorphism needs a square matrix of even size");
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (std::abs(a.data()[i] - std::round(a.data()[i])) > 1e-12)
      throw Error(ErrorKind::InvalidInput, "toral automorphism matrix must be integer");
  if (!is_symplectic(a, 1e-12).ok) throw Error(ErrorKind::Precondition, "toral automorphism matrix is not symplectic");
  MapFamily f;
  f.kind_ = Kind::Toral;
  f.d_ = static_cast<int>(a.rows() / 2);
  f.matrix_ = a.array().round().matrix();
  f.validate();
  return f;
}

MapFamily MapFamily::coupled_standard(std::vector<double> kicks, double coupling) {
  if (kicks.empty()) throw Error(ErrorKind::InvalidInput, "coupled standard map needs at least one kick strength");
  for (double k : kicks)
    if (!std::isfinite(k)) throw Error(ErrorKind::InvalidInput, "kick strength must be finite");
  if (!std::isfinite(coupling)) throw Error(ErrorKind::InvalidInput, "coupling must be finite");
  MapFamily f;
  f.kind_ = Kind::CoupledStandard;
  f.d_ = static_cast<int>(kicks.size());
  f.kicks_ = std::move(kicks);
  f.coupling_ = coupling;
  f.validate();
  return f;
}

MapFamily MapFamily::rotation(double theta) {
  if (!std::isfinite(theta)) throw Error(ErrorKind::InvalidInput, "rotation angle must be finite");
  MapFamily f = coupled_standard({2.0 * std::cos(theta) - 2.0}, 0.0);
  f.kind_ = Kind::Rotation;
  f.theta_ = theta;
  return f;
}

MapFamily MapFamily::translation(const Vector& v) {
  if (v.size() == 0 || v.size() % 2 != 0) throw Error(ErrorKind::InvalidDimension, "translation needs an even-size vector");
  MapFamily f;
  f.kind_ = Kind::Translation;
  f.d_ = static_cast<int>(v.size() / 2);
  f.shift_ = v;
  return f;
}

MapFamily MapFamily::product(std::vector<MapFamily> factors) {
  if (factors.empty()) throw Error(ErrorKind::InvalidInput, "product map needs at least one factor");
  MapFamily f;
  f.kind_ = Kind::Product;
  f.d_ = 0;
  for (const auto& g : factors) f.d_ += g.d_;
  f.factors_ = std::move(factors);
  f.validate();
  return f;
}

void MapFamily::validate() const {
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    Vector x(dim());
    for (Eigen::Index j = 0; j < x.size(); ++j) x(j) = u(rng);
    const double defect = is_symplectic(derivative_matrix(x), 0.0).defect;
    if (defect > 1e-9 * std::max(1.0, lipschitz() * lipschitz()))
      throw Error(ErrorKind::Numerical, "map derivative is not symplectic at a sample point");
  }
}

Vector MapFamily::lift(const Vector& x) const {
  if (x.size() != dim()) throw Error(ErrorKind::InvalidDimension, "point has the wrong dimension");
  switch (kind_) {
  case Kind::Toral:
    return matrix_ * x;
  case Kind::CoupledStandard:
  case Kind::Rotation: {
    const int d = d_;
    Vector out = x;
    for (int i = 0; i < d; ++i) out(d + i) += kicks_[static_cast<std::size_t>(i)] / two_pi * std::sin(two_pi * x(i));
    for (int i = 0; i + 1 < d; ++i) {
      const double s = coupling_ / two_pi * std::sin(two_pi * (x(i) - x(i + 1)));
      out(d + i) += s;
      out(d + i + 1) -= s;
    }
    for (int i = 0; i < d; ++i) out(i) = x(i) + out(d + i);
    return out;
  }
  case Kind::Translation:
    return x + shift_;
  case Kind::Product: {
    Vector out(dim());
    int off = 0;
    for (const auto& g : factors_) {
      put_sub_vector(out, d_, off, g.d_, g.lift(sub_vector(x, d_, off, g.d_)));
      off += g.d_;
    }
    return out;
  }
  }
  return x;
}

Vector MapFamily::evaluate(const Vector& x) const { return wrap_torus(lift(x)); }

Matrix MapFamily::derivative_matrix(const Vector& x) const {
  if (x.size() != dim()) throw Error(ErrorKind::InvalidDimension, "point has the wrong dimension");
  const int d = d_;
  switch (kind_) {
  case Kind::Toral:
    return matrix_;
  case Kind::CoupledStandard:
  case Kind::Rotation: {
    Matrix h = Matrix::Zero(d, d);
    for (int i = 0; i < d; ++i) h(i, i) = kicks_[static_cast<std::size_t>(i)] * std::cos(two_pi * x(i));
    for (int i = 0; i + 1 < d; ++i) {
      const double s = coupling_ * std::cos(two_pi * (x(i) - x(i + 1)));
      h(i, i) += s;
      h(i + 1, i + 1) += s;
      h(i, i + 1) -= s;
      h(i + 1, i) -= s;
    }
    Matrix out(2 * d, 2 * d);
    const Matrix id = Matrix::Identity(d, d);
    out << id + h, id, h, id;
    return out;
  }
  case Kind::Translation:
    return Matrix::Identity(2 * d, 2 * d);
  case Kind::Product: {
    std::vector<Matrix> blocks;
    int off = 0;
    for (const auto& g : factors_) {
      blocks.push_back(g.derivative_matrix(sub_vector(x, d, off, g.d_)));
      off += g.d_;
    }
    return symplectic_sum(blocks);
  }
  }
  return Matrix::Identity(2 * d, 2 * d);
}

SymplecticMatrix MapFamily::derivative(const Vector& x) const {
  const Matrix m = derivative_matrix(x);
  return SymplecticMatrix(m, 1e-9 * std::max(1.0, max_abs(m) * max_abs(m)));
}

double MapFamily::lipschitz() const {
  switch (kind_) {
  case Kind::Toral:
    return matrix_.cwiseAbs().rowwise().sum().maxCoeff();
  case Kind::CoupledStandard:
  case Kind::Rotation: {
    double worst = 0.0;
    for (double k : kicks_) worst = std::max(worst, std::abs(k));
    return 2.0 + worst + 4.0 * std::abs(coupling_);
  }
  case Kind::Translation:
    return 1.0;
  case Kind::Product: {
    double worst = 0.0;
    for (const auto& g : factors_) worst = std::max(worst, g.lipschitz());
    return worst;
  }
  }
  return 1.0;
}

std::string MapFamily::name() const {
  switch (kind_) {
  case Kind::Toral: {
    std::string s = "toral[";
    for (Eigen::Index i = 0; i < matrix_.rows(); ++i) {
      if (i) s += ';';
      for (Eigen::Index j = 0; j < matrix_.cols(); ++j) {
        if (j) s += ',';
        s += fmt(matrix_(i, j));
      }
    }
    return s + "]";
  }
  case Kind::CoupledStandard: {
    std::string s = "standard(K=";
    for (std::size_t i = 0; i < kicks_.size(); ++i) s += (i ? "," : "") + fmt(kicks_[i]);
    return s + (d_ > 1 ? ";c=" + fmt(coupling_) : "") + ")";
  }
  case Kind::Rotation:
    return "rotation(" + fmt(theta_) + ")";
  case Kind::Translation: {
    std::string s = "translation(";
    for (Eigen::Index i = 0; i < shift_.size(); ++i) s += (i ? "," : "") + fmt(shift_(i));
    return s + ")";
  }
  case Kind::Product: {
    std::string s;
    for (std::size_t i = 0; i < factors_.size(); ++i) s += (i ? "+" : "") + factors_[i].name();
    return s;
  }
  }
  return "?";
}

// ---------------------------------------------------------------------------
// JSON

namespace {

const nlohmann::json& require(const nlohmann::json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key))
    throw Error(ErrorKind::Config, std::string("missing key \"") + key + "\"");
  return obj.at(key);
}

double number(const nlohmann::json& v, const char* what) {
  if (!v.is_number()) throw Error(ErrorKind::Config, std::string(what) + " must be a number");
  return v.get<double>();
}

Matrix matrix_from_json(const nlohmann::json& v) {
  if (!v.is_array() || v.empty()) throw Error(ErrorKind::Config, "matrix must be a nonempty array of rows");
  const auto n = static_cast<Eigen::Index>(v.size());
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = v[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
      throw Error(ErrorKind::Config, "matrix must be square");
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = number(row[static_cast<std::size_t>(j)], "matrix entry");
  }
  return m;
}

} // namespace

MapFamily MapFamily::from_json(const nlohmann::json& config) {
  const std::string kind = require(config, "kind").is_string() ? config.at("kind").get<std::string>() : "";
  const nlohmann::json params = config.contains("params") ? config.at("params") : nlohmann::json::object();
  if (!params.is_object()) throw Error(ErrorKind::Config, "params must be an object");
  if (kind == "toral") return toral(matrix_from_json(require(params, "matrix")));
  if (kind == "cat") {
    Matrix a(2, 2);
    a << 2, 1, 1, 1;
    return toral(a);
  }
  if (kind == "standard") {
    const auto& k = require(params, "K");
    std::vector<double> kicks;
    if (k.is_array()) {
      for (const auto& v : k) kicks.push_back(number(v, "K"));
    } else {
      kicks.push_back(number(k, "K"));
    }
    const double c = params.contains("c") ? number(params.at("c"), "c") : 0.0;
    return coupled_standard(std::move(kicks), c);
  }
  if (kind == "rotation") return rotation(number(require(params, "angle"), "angle"));
  if (kind == "translation" || kind == "identity") {
    if (kind == "identity") {
      const double d = params.contains("d") ? number(params.at("d"), "d") : 1.0;
      if (d < 1 || d != std::floor(d)) throw Error(ErrorKind::Config, "d must be a positive integer");
      return translation(Vector::Zero(2 * static_cast<Eigen::Index>(d)));
    }
    const auto& v = require(params, "shift");
    if (!v.is_array()) throw Error(ErrorKind::Config, "shift must be an array");
    Vector s(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) s(static_cast<Eigen::Index>(i)) = number(v[i], "shift entry");
    return translation(s);
  }
  if (kind == "product") {
    const auto& fs = require(params, "factors");
    if (!fs.is_array() || fs.empty()) throw Error(ErrorKind::Config, "factors must be a nonempty array");
    std::vector<MapFamily> factors;
    for (const auto& f : fs) factors.push_back(from_json(f));
    return product(std::move(factors));
  }
  throw Error(ErrorKind::Config, "unknown map kind \"" + kind + "\"");
}

nlohmann::json MapFamily::to_json() const {
  nlohmann::json out = nlohmann::json::object();
  switch (kind_) {
  case Kind::Toral: {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < matrix_.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index j = 0; j < matrix_.cols(); ++j) row.push_back(static_cast<long long>(matrix_(i, j)));
      rows.push_back(row);
    }
    out["kind"] = "toral";
    out["params"] = {{"matrix", rows}};
    break;
  }
  case Kind::CoupledStandard:
    out["kind"] = "standard";
    out["params"] = {{"K", kicks_}, {"c", coupling_}};
    break;
  case Kind::Rotation:
    out["kind"] = "rotation";
    out["params"] = {{"angle", theta_}};
    break;
  case Kind::Translation: {
    std::vector<double> s(shift_.data(), shift_.data() + shift_.size());
    out["kind"] = "translation";
    out["params"] = {{"shift", s}};
    break;
  }
  case Kind::Product: {
    nlohmann::json fs = nlohmann::json::array();
    for (const auto& g : factors_) fs.push_back(g.to_json());
    out["kind"] = "product";
    out["params"] = {{"factors", fs}};
    break;
  }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Periodic orbits

namespace {

// Points f^i(x), i < period, iterated in the lift and reduced afterwards.
std::vector<Vector> orbit_points(const MapFamily& map, const Vector& x, int period) {
  std::vector<Vector> pts;
  Vector y = x;
  for (int i = 0; i < period; ++i) {
    pts.push_back(wrap_torus(y));
    y = map.lift(y);
  }
  return pts;
}

} // namespace

PeriodicOrbit make_orbit(const MapFamily& map, std::vector<Vector> points) {
  if (points.empty()) throw Error(ErrorKind::InvalidInput, "orbit needs at least one point");
  const int period = static_cast<int>(points.size());
  for (int i = 0; i < period; ++i)
    if (torus_distance(map.evaluate(points[static_cast<std::size_t>(i)]), points[static_cast<std::size_t>((i + 1) % period)]) > 1e-9)
      throw Error(ErrorKind::Numerical, "orbit does not close within 1e-9");
  PeriodicOrbit orbit;
  orbit.period = period;
  orbit.points = std::move(points);
  std::vector<SymplecticMatrix> letters;
  for (int i = period - 1; i >= 0; --i) letters.push_back(map.derivative(orbit.points[static_cast<std::size_t>(i)]));
  orbit.word = Word(std::move(letters));
  orbit.monodromy = monodromy(orbit.word);
  orbit.classification = classify_point(orbit.monodromy);
  return orbit;
}

PeriodicOrbit make_orbit(const MapFamily& map, const Vector& x, int period) {
  if (period < 1) throw Error(ErrorKind::InvalidInput, "period must be positive");
  return make_orbit(map, orbit_points(map, x, period));
}

namespace {

struct Candidate {
  Vector x;
  int period = 0;
};

// f^n in the lift together with its derivative.
std::pair<Vector, Matrix> iterate_lift(const MapFamily& map, const Vector& x, int n) {
  Vector y = x;
  Matrix jac = Matrix::Identity(x.size(), x.size());
  for (int i = 0; i < n; ++i) {
    jac = map.derivative_matrix(y) * jac;
    y = map.lift(y);
  }
  return {y, jac};
}

std::optional<Vector> newton(const MapFamily& map, Vector x, int n, const Vector& w, const OrbitSearchConfig& cfg) {
  for (int it = 0; it <= cfg.newton_iterations; ++it) {
    auto [y, jac] = iterate_lift(map, x, n);
    const Vector r = y - x - w;
    if (!r.allFinite()) return std::nullopt;
    if (r.cwiseAbs().maxCoeff() < cfg.residual_tol) return x;
    if (it == cfg.newton_iterations) break;
    const Matrix a = jac - Matrix::Identity(x.size(), x.size());
    const Vector step = a.completeOrthogonalDecomposition().solve(r);
    if (!step.allFinite()) return std::nullopt;
    x -= step;
    if (x.cwiseAbs().maxCoeff() > 4.0) return std::nullopt;
  }
  return std::nullopt;
}

int minimal_period(const MapFamily& map, const Vector& x, int n) {
  Vector y = x;
  for (int m = 1; m <= n; ++m) {
    y = map.lift(y);
    if (torus_distance(y, x) < 1e-8) return m;
  }
  return 0;
}

std::vector<double> rounded(const Vector& x) {
  std::vector<double> out(static_cast<std::size_t>(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double v = std::round(x(i) * 1e8) / 1e8;
    if (v >= 1.0) v = 0.0;
    out[static_cast<std::size_t>(i)] = v;
  }
  return out;
}

// Orbit of x rotated so that its lexicographically smallest point comes first.
std::vector<Vector> canonical_points(const MapFamily& map, const Vector& x, int period) {
  std::vector<Vector> pts = orbit_points(map, x, period);
  std::size_t best = 0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (rounded(pts[i]) < rounded(pts[best])) best = i;
  std::rotate(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(best), pts.end());
  return pts;
}

struct CellHash {
  std::size_t operator()(const std::vector<long long>& v) const {
    std::size_t h = 1469598103934665603ull;
    for (long long c : v) h = (h ^ static_cast<std::size_t>(c)) * 1099511628211ull;
    return h;
  }
};

class OrbitIndex {
public:
  OrbitIndex(int dim, double tol) : dim_(dim), tol_(tol), cells_(static_cast<long long>(std::ceil(1.0 / tol))) {}

  bool contains(const Vector& x) const {
    const auto base = cell(x);
    std::vector<long long> probe(base.size());
    const long long combos = ipow(3, dim_);
    for (long long c = 0; c < combos; ++c) {
      long long rest = c;
      for (int i = 0; i < dim_; ++i) {
        const long long off = rest % 3 - 1;
        rest /= 3;
        probe[static_cast<std::size_t>(i)] = ((base[static_cast<std::size_t>(i)] + off) % cells_ + cells_) % cells_;
      }
      auto it = map_.find(probe);
      if (it == map_.end()) continue;
      for (const auto& y : it->second)
        if (torus_distance(x, y) < tol_) return true;
    }
    return false;
  }

  void insert(const Vector& x) { map_[cell(x)].push_back(x); }

private:
  static long long ipow(long long b, int e) {
    long long r = 1;
    while (e-- > 0) r *= b;
    return r;
  }
  std::vector<long long> cell(const Vector& x) const {
    std::vector<long long> c(static_cast<std::size_t>(x.size()));
    for (Eigen::Index i = 0; i < x.size(); ++i)
      c[static_cast<std::size_t>(i)] = std::min(cells_ - 1, static_cast<long long>(std::floor(x(i) * static_cast<double>(cells_))));
    return c;
  }

  int dim_;
  double tol_;
  long long cells_;
  std::unordered_map<std::vector<long long>, std::vector<Vector>, CellHash> map_;
};

} // namespace

std::vector<PeriodicOrbit> find_periodic_orbits(const MapFamily& map, const OrbitSearchConfig& cfg) {
  if (cfg.max_period < 1) throw Error(ErrorKind::InvalidInput, "max_period must be positive");
  if (cfg.grid < 1 || cfg.winding_radius < 0) throw Error(ErrorKind::InvalidInput, "invalid seed grid");
  const int dim = static_cast<int>(map.dim());

  std::size_t seeds = 1;
  for (int i = 0; i < dim; ++i) seeds *= static_cast<std::size_t>(cfg.grid);
  std::size_t offsets = 1;
  for (int i = 0; i < dim; ++i) offsets *= static_cast<std::size_t>(2 * cfg.winding_radius + 1);

  auto seed_point = [&](std::size_t s) {
    Vector x(dim);
    for (int i = 0; i < dim; ++i) {
      x(i) = (static_cast<double>(s % static_cast<std::size_t>(cfg.grid)) + 0.5) / cfg.grid;
      s /= static_cast<std::size_t>(cfg.grid);
    }
    return x;
  };
  auto offset_vector = [&](std::size_t o) {
    Vector w(dim);
    const auto base = static_cast<std::size_t>(2 * cfg.winding_radius + 1);
    for (int i = 0; i < dim; ++i) {
      w(i) = static_cast<double>(static_cast<long long>(o % base) - cfg.winding_radius);
      o /= base;
    }
    return w;
  };

  OrbitIndex index(dim, cfg.dedup_tol);
  std::vector<std::vector<Vector>> kept;
  std::vector<int> kept_period;

  for (int n = 1; n <= cfg.max_period; ++n) {
    std::vector<std::vector<Candidate>> found(seeds);
    parallel_for(seeds, cfg.threads, [&](std::size_t s) {
      const Vector x0 = seed_point(s);
      const Vector w0 = (iterate_lift(map, x0, n).first - x0).array().round().matrix();
      for (std::size_t o = 0; o < offsets; ++o) {
        const auto x = newton(map, x0, n, w0 + offset_vector(o), cfg);
        if (!x) continue;
        const int m = minimal_period(map, *x, n);
        if (m > 0) found[s].push_back({*x, m});
      }
    });
    for (const auto& list : found)
      for (const auto& c : list) {
        if (index.contains(wrap_torus(c.x))) continue;
        auto pts = canonical_points(map, c.x, c.period);
        for (const auto& p : pts) index.insert(p);
        kept.push_back(std::move(pts));
        kept_period.push_back(c.period);
      }
  }

  std::vector<std::size_t> order(kept.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (kept_period[a] != kept_period[b]) return kept_period[a] < kept_period[b];
    return rounded(kept[a].front()) < rounded(kept[b].front());
  });
  std::vector<PeriodicOrbit> out;
  out.reserve(order.size());
  for (std::size_t i : order) out.push_back(make_orbit(map, kept[i]));
  return out;
}

int count_period_points(const std::vector<PeriodicOrbit>& orbits, int n) {
  int total = 0;
  for (const auto& o : orbits)
    if (n % o.period == 0) total += o.period;
  return total;
}

OrbitCensus orbit_census(const MapFamily& map, const std::vector<PeriodicOrbit>& orbits, int probe_grid, int threads) {
  if (probe_grid < 1) throw Error(ErrorKind::InvalidInput, "probe grid must be positive");
  OrbitCensus census;
  census.probe_grid = probe_grid;
  for (const char* tag : {"HyperbolicDiagonalizable", "Hyperbolic", "MElliptic", "TotallyElliptic", "Degenerate"})
    census.counts[tag] = 0;
  std::vector<Vector> elliptic;
  for (const auto& o : orbits) {
    ++census.counts[to_string(o.classification.tag)];
    if (o.classification.tag == PointTag::MElliptic || o.classification.tag == PointTag::TotallyElliptic) {
      ++census.elliptic_orbits;
      elliptic.insert(elliptic.end(), o.points.begin(), o.points.end());
    }
  }
  if (elliptic.empty()) return census;

  const int dim = static_cast<int>(map.dim());
  std::size_t probes = 1;
  for (int i = 0; i < dim; ++i) probes *= static_cast<std::size_t>(probe_grid);
  const std::size_t chunk = 4096;
  const std::size_t chunks = (probes + chunk - 1) / chunk;
  std::vector<double> worst(chunks, 0.0);
  parallel_for(chunks, threads, [&](std::size_t c) {
    Vector x(dim);
    for (std::size_t s = c * chunk; s < std::min(probes, (c + 1) * chunk); ++s) {
      std::size_t rest = s;
      for (int i = 0; i < dim; ++i) {
        x(i) = static_cast<double>(rest % static_cast<std::size_t>(probe_grid)) / probe_grid;
        rest /= static_cast<std::size_t>(probe_grid);
      }
      double best = 1.0;
      for (const auto& e : elliptic) best = std::min(best, torus_distance(x, e));
      worst[c] = std::max(worst[c], best);
    }
  });
  census.covering_radius = Extended(*std::max_element(worst.begin(), worst.end()));
  return census;
}

// ---------------------------------------------------------------------------
// Serialization

std::string orbits_to_csv(const std::vector<PeriodicOrbit>& orbits) {
  std::ostringstream os;
  const Eigen::Index dim = orbits.empty() ? 0 : orbits.front().points.front().size();
  os << "period";
  for (Eigen::Index i = 0; i < dim; ++i) os << ",x" << i;
  os << ",tag,m";
  for (Eigen::Index i = 0; i < dim; ++i) os << ",exponent" << i;
  os << "\n";
  for (const auto& o : orbits) {
    os << o.period;
    for (Eigen::Index i = 0; i < dim; ++i) os << ',' << fmt(o.points.front()(i));
    os << ',' << to_string(o.classification.tag) << ',' << o.classification.m;
    for (double e : lyapunov_exponents_periodic(o.monodromy, o.period)) os << ',' << fmt(e);
    os << "\n";
  }
  return os.str();
}

nlohmann::json orbits_to_json(const std::vector<PeriodicOrbit>& orbits) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& o : orbits) {
    nlohmann::json j = nlohmann::json::object();
    j["period"] = o.period;
    std::vector<double> p(o.points.front().data(), o.points.front().data() + o.points.front().size());
    j["point"] = p;
    j["tag"] = to_string(o.classification.tag);
    j["m"] = o.classification.m;
    j["exponents"] = lyapunov_exponents_periodic(o.monodromy, o.period);
    out.push_back(j);
  }
  return out;
}

nlohmann::json census_to_json(const OrbitCensus& census) {
  nlohmann::json out = nlohmann::json::object();
  out["counts"] = census.counts;
  out["elliptic_orbits"] = census.elliptic_orbits;
  out["probe_grid"] = census.probe_grid;
  out["covering_radius_proxy"] =
      census.covering_radius.is_infinite() ? nlohmann::json("inf") : nlohmann::json(census.covering_radius.value());
  return out;
}

} // namespace symplab
