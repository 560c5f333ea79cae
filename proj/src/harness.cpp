#include "symplab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "symplab/parallel.hpp"

namespace symplab {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
  return buf;
}

OrbitMonodromy as_monodromy(const PeriodicOrbit& o, std::size_t index) {
  return OrbitMonodromy{"orbit" + std::to_string(index), o.period, o.monodromy};
}

// Level at which the strong splitting of dimension k is dominated along the
// orbit word, or 0.
int dominated_level(const PeriodicOrbit& orbit, int k) {
  try {
    const SplittingData split = strong_splitting(orbit.monodromy, k);
    for (int l : domination_levels)
      if (domination_test(orbit.word, split, l).dominated) return l;
  } catch (const Error&) {
  }
  return 0;
}

std::optional<Matrix> constant_derivative(const MapFamily& map) {
  const Eigen::Index n = map.dim();
  const Matrix a = map.derivative_matrix(Vector::Constant(n, 0.1234));
  for (double c : {0.377, 0.861})
    if ((map.derivative_matrix(Vector::Constant(n, c)) - a).lpNorm<Eigen::Infinity>() != 0.0) return std::nullopt;
  return a;
}

} // namespace

const char* to_string(CenterMode mode) { return mode == CenterMode::Full ? "full" : "gap"; }

CenterMode center_mode_from_string(const std::string& s) {
  if (s == "full") return CenterMode::Full;
  if (s == "gap") return CenterMode::Gap;
  throw Error(ErrorKind::Config, "center mode must be \"full\" or \"gap\", got \"" + s + "\"");
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Consistent: return "consistent";
    case Verdict::Inconclusive: return "inconclusive";
    case Verdict::ViolationFlag: return "violation-flag";
  }
  return "?";
}

const char* to_string(Signature s) {
  switch (s) {
    case Signature::Anosov: return "anosov";
    case Signature::PartiallyHyperbolic: return "partially-hyperbolic";
    case Signature::Elliptic: return "elliptic";
    case Signature::Unresolved: return "unresolved";
  }
  return "?";
}

Subspace certified_center(const PeriodicOrbit& orbit, double min_gap) {
  const Eigen::Index n = orbit.monodromy.dim();
  const Subspace c = select_center_by_gap(orbit.monodromy, min_gap);
  if (c.dim() == n) return c;
  const int k = static_cast<int>((n - c.dim()) / 2);
  if (dominated_level(orbit, k) == 0) return Subspace::full(n);
  return strong_splitting(orbit.monodromy, k).c.dim() == c.dim() ? c : Subspace::full(n);
}

Verdict decide_verdict(double estimate, const Extended& width, const std::optional<double>& s) {
  if (!s) return Verdict::Inconclusive;
  const double margin = estimate - *s;
  if (margin >= -harness_tol::consistent_band) return Verdict::Consistent;
  if (!width.is_infinite() && estimate + width.value() < *s - harness_tol::violation) return Verdict::ViolationFlag;
  return Verdict::Inconclusive;
}

InequalityReport run_inequality(const MapFamily& map, const OrbitSearchConfig& orbit_config,
                                const EntropyConfig& entropy_config, CenterMode mode) {
  InequalityReport rep;
  rep.map_id = map.name();
  rep.center_mode = mode;

  const auto orbits = find_periodic_orbits(map, orbit_config);
  rep.orbits = orbits.size();
  std::vector<OrbitMonodromy> mono;
  std::vector<Subspace> centers;
  for (std::size_t i = 0; i < orbits.size(); ++i) mono.push_back(as_monodromy(orbits[i], i));
  const Eigen::Index n = map.dim();
  centers.assign(orbits.size(), Subspace::full(n));
  if (mode == CenterMode::Gap) {
    parallel_for(orbits.size(), orbit_config.threads, [&](std::size_t i) { centers[i] = certified_center(orbits[i]); });
    for (const auto& c : centers) rep.certified_centers += c.dim() < n ? 1 : 0;
  }
  rep.S = S_statistic(mono, [&](const OrbitMonodromy& o) { return centers[static_cast<std::size_t>(&o - mono.data())]; });

  rep.entropy = estimate_entropy(map, entropy_config);
  rep.estimate = rep.entropy.estimate;
  const auto [lo, hi] = std::minmax_element(rep.entropy.rates.begin(), rep.entropy.rates.end());
  double width = std::max(harness_tol::min_width, *hi - *lo);
  if (rep.entropy.low_confidence) width = std::max(width, 0.25 * rep.estimate);
  rep.confidence_width = Extended(width);
  rep.margin = rep.S ? rep.estimate - *rep.S : 0.0;
  rep.verdict = decide_verdict(rep.estimate, rep.confidence_width, rep.S);

  if (const auto a = constant_derivative(map)) {
    const Eigen::ComplexEigenSolver<Matrix> es(*a);
    double h = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) h += std::max(0.0, std::log(std::abs(es.eigenvalues()(i))));
    rep.exact_entropy = h;
    if (rep.S) rep.exact_check = h - *rep.S;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// trichotomy scan

namespace {

CellResult scan_cell(const ScanCell& cell, const OrbitSearchConfig& cfg, int probe_grid) {
  CellResult res;
  res.key = cell.key;
  res.map_name = cell.map.name();
  OrbitSearchConfig one = cfg;
  one.threads = 1;
  const auto orbits = find_periodic_orbits(cell.map, one);
  res.orbits = orbits.size();
  res.census = orbit_census(cell.map, orbits, probe_grid, 1);
  if (orbits.empty()) {
    res.note = "no periodic orbits found";
    return res;
  }
  const int d = cell.map.d();

  // strong dimensions certified along every orbit, with the worst level used
  std::vector<int> level(static_cast<std::size_t>(d + 1), 0);
  for (int k = d; k >= 1; --k) {
    int worst = 0;
    for (const auto& o : orbits) {
      const int l = dominated_level(o, k);
      if (l == 0) {
        worst = 0;
        break;
      }
      worst = std::max(worst, l);
    }
    level[static_cast<std::size_t>(k)] = worst;
  }
  for (int k = d; k >= 1; --k)
    if (level[static_cast<std::size_t>(k)] > 0) {
      res.dominated_k = k;
      res.domination_level = level[static_cast<std::size_t>(k)];
      break;
    }

  bool totally_elliptic = false;
  std::vector<int> m_elliptic;
  for (const auto& o : orbits) {
    if (o.classification.tag == PointTag::TotallyElliptic) totally_elliptic = true;
    if (o.classification.tag == PointTag::MElliptic) m_elliptic.push_back(o.classification.m);
  }
  std::sort(m_elliptic.begin(), m_elliptic.end());

  if (level[static_cast<std::size_t>(d)] > 0 && res.census.elliptic_orbits == 0) {
    res.signature = Signature::Anosov;
    res.note = "dominated splitting with trivial center on every orbit, no elliptic orbit";
    return res;
  }
  for (int m : m_elliptic) {
    const int k = d - m;
    if (k >= 1 && level[static_cast<std::size_t>(k)] > 0) {
      res.signature = Signature::PartiallyHyperbolic;
      res.center_half_dim = m;
      res.dominated_k = k;
      res.domination_level = level[static_cast<std::size_t>(k)];
      res.note = "dominated splitting with " + std::to_string(2 * m) + "-dimensional center and an m-elliptic orbit";
      return res;
    }
  }
  if (totally_elliptic && !res.dominated_k) {
    res.signature = Signature::Elliptic;
    res.note = "totally elliptic orbit and no dominated splitting on the orbits found";
    return res;
  }
  res.note = "no signature matched";
  return res;
}

} // namespace

std::vector<CellResult> run_trichotomy_scan(const std::vector<ScanCell>& cells, const OrbitSearchConfig& orbit_config,
                                            int probe_grid, int threads) {
  std::vector<const ScanCell*> order;
  for (const auto& c : cells) order.push_back(&c);
  std::sort(order.begin(), order.end(), [](const ScanCell* a, const ScanCell* b) { return a->key < b->key; });
  for (std::size_t i = 1; i < order.size(); ++i)
    if (order[i]->key == order[i - 1]->key) throw Error(ErrorKind::Config, "duplicate scan cell key " + order[i]->key);
  std::vector<CellResult> out(order.size());
  parallel_for(order.size(), threads, [&](std::size_t i) { out[i] = scan_cell(*order[i], orbit_config, probe_grid); });
  return out;
}

std::vector<ScanCell> scan_cells_from_json(const nlohmann::json& j) {
  std::vector<ScanCell> cells;
  if (!j.is_object()) throw Error(ErrorKind::Config, "scan config must be an object");
  if (j.contains("cells")) {
    if (!j["cells"].is_array()) throw Error(ErrorKind::Config, "\"cells\" must be an array");
    for (const auto& c : j["cells"]) {
      if (!c.is_object() || !c.contains("key") || !c["key"].is_string() || !c.contains("map"))
        throw Error(ErrorKind::Config, "each cell needs a string \"key\" and a \"map\"");
      cells.push_back({c["key"].get<std::string>(), MapFamily::from_json(c["map"])});
    }
  }
  if (j.contains("sweep")) {
    const auto& s = j["sweep"];
    if (!s.is_object() || !s.contains("base") || !s.contains("path") || !s.contains("values") || !s["values"].is_array() ||
        !s["path"].is_string())
      throw Error(ErrorKind::Config, "\"sweep\" needs \"base\", a string \"path\" and an array \"values\"");
    nlohmann::json::json_pointer ptr;
    try {
      ptr = nlohmann::json::json_pointer(s["path"].get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Config, std::string("bad sweep path: ") + e.what());
    }
    const std::string prefix = s.value("prefix", std::string("cell"));
    for (std::size_t i = 0; i < s["values"].size(); ++i) {
      nlohmann::json m = s["base"];
      m[ptr] = s["values"][i];
      char key[32];
      std::snprintf(key, sizeof key, "%04zu", i);
      cells.push_back({prefix + key, MapFamily::from_json(m)});
    }
  }
  if (cells.empty()) throw Error(ErrorKind::Config, "scan config has no cells");
  return cells;
}

// ---------------------------------------------------------------------------
// serialization

nlohmann::json inequality_to_json(const InequalityReport& r) {
  nlohmann::json j;
  j["map"] = r.map_id;
  j["entropy_estimate"] = r.estimate;
  j["confidence_width"] = r.confidence_width.is_infinite() ? nlohmann::json("inf") : nlohmann::json(r.confidence_width.value());
  j["S"] = r.S ? nlohmann::json(*r.S) : nlohmann::json(nullptr);
  j["S_empty"] = !r.S.has_value();
  j["center_mode"] = to_string(r.center_mode);
  j["orbits"] = r.orbits;
  j["certified_centers"] = r.certified_centers;
  j["margin"] = r.margin;
  j["verdict"] = to_string(r.verdict);
  j["exact_entropy"] = r.exact_entropy ? nlohmann::json(*r.exact_entropy) : nlohmann::json(nullptr);
  j["exact_check"] = r.exact_check ? nlohmann::json(*r.exact_check) : nlohmann::json(nullptr);
  j["entropy"] = entropy_to_json(r.entropy);
  j["note"] = "margin compares two lower-bound estimates; it is not a test of the inequality for the true values";
  return j;
}

nlohmann::json scan_to_json(const std::vector<CellResult>& cells) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : cells) {
    nlohmann::json j;
    j["key"] = c.key;
    j["map"] = c.map_name;
    j["signature"] = to_string(c.signature);
    j["center_half_dim"] = c.center_half_dim;
    j["orbits"] = c.orbits;
    j["census"] = census_to_json(c.census);
    j["dominated_k"] = c.dominated_k ? nlohmann::json(*c.dominated_k) : nlohmann::json(nullptr);
    j["domination_level"] = c.domination_level;
    j["note"] = c.note;
    arr.push_back(j);
  }
  nlohmann::json out;
  out["cells"] = arr;
  out["note"] = "signatures summarize finitely many orbits; they are not classifications of the map";
  return out;
}

std::string scan_to_csv(const std::vector<CellResult>& cells) {
  std::ostringstream os;
  os << "key,signature,m,orbits,elliptic_orbits,dominated_k,domination_level,covering_radius\n";
  for (const auto& c : cells) {
    os << c.key << ',' << to_string(c.signature) << ',' << c.center_half_dim << ',' << c.orbits << ','
       << c.census.elliptic_orbits << ',' << (c.dominated_k ? std::to_string(*c.dominated_k) : std::string("")) << ','
       << c.domination_level << ','
       << (c.census.covering_radius.is_infinite() ? std::string("inf") : fmt(c.census.covering_radius.value())) << '\n';
  }
  return os.str();
}

} // namespace symplab
