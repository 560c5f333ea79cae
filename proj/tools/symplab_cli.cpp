// symplab command line: one subcommand per experiment, JSON config in,
// CSV/JSON/plot files out.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "symplab/cocycle.hpp"
#include "symplab/dynamics.hpp"
#include "symplab/entropy.hpp"
#include "symplab/harness.hpp"
#include "symplab/parallel.hpp"
#include "symplab/snake.hpp"
#include "symplab/spectrum.hpp"

using namespace symplab;
using nlohmann::json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

struct Options {
  std::string config = "-";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string out = ".";
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_all(std::istream& in) { return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()}; }

json load_config(const std::string& path) {
  std::string text;
  if (path == "-") {
    text = read_all(std::cin);
  } else {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file " + path);
    text = read_all(f);
  }
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // byte offset -> line and column
    std::size_t line = 1, col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') ++line, col = 1;
      else ++col;
    }
    throw ConfigError("malformed JSON at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                      e.what());
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for \"") + key + "\": " + e.what());
  }
}

const json& need(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("missing \"") + key + "\"");
  return j.at(key);
}

Matrix matrix_of(const json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("matrix must be a nonempty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array()) throw ConfigError("matrix rows must be arrays");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) throw ConfigError("ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) throw ConfigError("matrix entries must be numbers");
      m(r, c) = v.get<double>();
    }
  }
  return m;
}

Word word_of(const json& j) {
  if (!j.is_array()) throw ConfigError("word must be an array of matrices");
  std::vector<SymplecticMatrix> letters;
  for (const auto& m : j) letters.emplace_back(matrix_of(m));
  return letters.empty() ? Word() : Word(std::move(letters));
}

void write_file(const Options& opt, const std::string& name, const std::string& content) {
  std::error_code ec;
  std::filesystem::create_directories(opt.out, ec);
  const auto path = std::filesystem::path(opt.out) / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << content;
  std::cout << path.string() << '\n';
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

int threads_of(const Options& opt, const json& cfg) { return opt.threads.value_or(get_or<int>(cfg, "threads", 1)); }
std::uint64_t seed_of(const Options& opt, const json& cfg) {
  return opt.seed.value_or(get_or<std::uint64_t>(cfg, "seed", 1));
}

OrbitSearchConfig orbit_config(const Options& opt, const json& cfg) {
  OrbitSearchConfig oc;
  oc.max_period = get_or<int>(cfg, "max_period", oc.max_period);
  oc.grid = get_or<int>(cfg, "grid", oc.grid);
  oc.winding_radius = get_or<int>(cfg, "winding_radius", oc.winding_radius);
  oc.newton_iterations = get_or<int>(cfg, "newton_iterations", oc.newton_iterations);
  oc.residual_tol = get_or<double>(cfg, "residual_tol", oc.residual_tol);
  oc.dedup_tol = get_or<double>(cfg, "dedup_tol", oc.dedup_tol);
  oc.threads = threads_of(opt, cfg);
  if (oc.max_period < 1 || oc.grid < 1) throw ConfigError("max_period and grid must be positive");
  return oc;
}

EntropyConfig entropy_config(const Options& opt, const json& cfg) {
  EntropyConfig ec;
  ec.eps_grid = get_or<std::vector<double>>(cfg, "eps", ec.eps_grid);
  ec.n_grid = get_or<std::vector<int>>(cfg, "n", ec.n_grid);
  ec.budget = get_or<std::size_t>(cfg, "budget", ec.budget);
  ec.saturation = get_or<double>(cfg, "saturation", ec.saturation);
  ec.seed = seed_of(opt, cfg);
  ec.threads = threads_of(opt, cfg);
  return ec;
}

// ---------------------------------------------------------------------------
// subcommands

json classification_json(const SymplecticMatrix& m) {
  const auto c = classify_point(m);
  const auto eig = eigen_quadruples(m);
  json j;
  j["tag"] = to_string(c.tag);
  j["m"] = c.m;
  j["unit_circle_count"] = c.unit_circle_count;
  j["simple"] = c.simple;
  j["exponents"] = c.exponents;
  json ev = json::array();
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) ev.push_back({eig.values(i).real(), eig.values(i).imag()});
  j["eigenvalues"] = ev;
  j["symmetry_defect"] = eig.symmetry_defect;
  return j;
}

int run_classify(const Options& opt, const json& cfg) {
  json out = json::array();
  if (cfg.contains("map")) {
    const auto map = MapFamily::from_json(cfg["map"]);
    const auto& pts = need(cfg, "points");
    if (!pts.is_array()) throw ConfigError("\"points\" must be an array");
    for (const auto& p : pts) {
      const auto v = get_or<std::vector<double>>(json{{"p", p}}, "p", {});
      if (static_cast<Eigen::Index>(v.size()) != map.dim()) throw ConfigError("point has the wrong dimension");
      json j = classification_json(map.derivative(Eigen::Map<const Vector>(v.data(), map.dim())));
      j["point"] = v;
      out.push_back(j);
    }
  } else {
    const auto& ms = cfg.contains("matrices") ? cfg["matrices"] : json::array({need(cfg, "matrix")});
    for (const auto& m : ms) out.push_back(classification_json(SymplecticMatrix(matrix_of(m))));
  }
  write_file(opt, "classify.json", dump(out));
  return exit_ok;
}

int run_orbits(const Options& opt, const json& cfg) {
  const auto map = MapFamily::from_json(need(cfg, "map"));
  const auto oc = orbit_config(opt, cfg);
  const auto orbits = find_periodic_orbits(map, oc);
  const auto census = orbit_census(map, orbits, get_or<int>(cfg, "probe_grid", 32), oc.threads);
  json j;
  j["map"] = map.name();
  j["max_period"] = oc.max_period;
  j["orbits"] = orbits_to_json(orbits);
  j["census"] = census_to_json(census);
  json counts = json::object();
  for (int n = 1; n <= oc.max_period; ++n) counts[std::to_string(n)] = count_period_points(orbits, n);
  j["period_point_counts"] = counts;
  write_file(opt, "orbits.csv", orbits_to_csv(orbits));
  write_file(opt, "orbits.json", dump(j));
  return exit_ok;
}

int run_entropy(const Options& opt, const json& cfg) {
  const auto map = MapFamily::from_json(need(cfg, "map"));
  const auto rep = estimate_entropy(map, entropy_config(opt, cfg));
  json j = entropy_to_json(rep);
  j["map"] = map.name();
  if (map.kind() == MapFamily::Kind::Toral)
    j["exact_toral"] = exact_entropy_toral(map.derivative_matrix(Vector::Zero(map.dim())));
  write_file(opt, "entropy.json", dump(j));
  write_file(opt, "entropy_plot.dat", entropy_plot_data(rep));
  return exit_ok;
}

int run_snake(const Options& opt, const json& cfg) {
  const Matrix dp = matrix_of(need(cfg, "dp"));
  SnakeParams base;
  base.d = static_cast<int>(dp.rows() / 2);
  base.m = get_or<int>(cfg, "m", base.d > 1 ? 1 : 0);
  base.r = get_or<double>(cfg, "r", base.r);
  base.delta = get_or<double>(cfg, "delta", base.delta);
  base.R = get_or<double>(cfg, "R", base.R);
  base.K = get_or<int>(cfg, "K", base.K);
  const auto ns = get_or<std::vector<int>>(cfg, "N", {2, 4, 8, 16});
  const int k = get_or<int>(cfg, "k", 10);
  const int max_block = get_or<int>(cfg, "max_block", 5);
  if (ns.empty()) throw ConfigError("\"N\" must list at least one oscillation count");
  const auto model = make_linear_model(dp, base.m, base.r);

  std::vector<SnakeParams> ps(ns.size(), base);
  std::vector<Horseshoe> runs(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) ps[i].N = ns[i];
  for (auto& p : ps) p.validate();
  parallel_for(ns.size(), threads_of(opt, cfg), [&](std::size_t i) { runs[i] = build_horseshoe(model, ps[i], max_block); });
  const auto fam = check_norm_bound(model, base, ns);
  const auto scan = entropy_threshold(model, base, k);

  json j;
  json arr = json::array();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    json r = horseshoe_to_json(runs[i], ps[i]);
    const auto cmp = verify_entropy_comparison(model, ps[i], k);
    r["crossings"] = count_crossings(ps[i], model.segment).crossings;
    r["K1"] = fam.bounds[i].k1;
    r["comparison_left"] = cmp.left;
    r["comparison_right"] = cmp.min_term - cmp.slack;
    r["comparison_holds"] = cmp.holds;
    arr.push_back(r);
  }
  j["runs"] = arr;
  j["K1"] = fam.k1;
  j["K1_integer"] = fam.k1_integer;
  j["K1_spread"] = fam.spread;
  j["K1_bounded"] = fam.bounded;
  j["k"] = k;
  j["strong_exponent"] = scan.rows.empty() ? 0.0 : scan.rows.front().strong_exponent;
  j["threshold_found"] = scan.found;
  j["threshold_log2_N"] = scan.found ? std::log2(scan.threshold) : 0.0;
  write_file(opt, "snake.csv", snake_family_csv(ps, runs, fam.bounds));
  write_file(opt, "snake.json", dump(j));
  return exit_ok;
}

int run_scan(const Options& opt, const json& cfg) {
  const auto cells = scan_cells_from_json(cfg);
  const auto res = run_trichotomy_scan(cells, orbit_config(opt, cfg), get_or<int>(cfg, "probe_grid", 32),
                                       threads_of(opt, cfg));
  write_file(opt, "scan.csv", scan_to_csv(res));
  write_file(opt, "scan.json", dump(scan_to_json(res)));
  return exit_ok;
}

int run_diagonalize(const Options& opt, const json& cfg) {
  const Word w = word_of(need(cfg, "word"));
  if (w.empty()) throw ConfigError("word must not be empty");
  const Word t = cfg.contains("transition") ? word_of(cfg["transition"]) : Word();
  const double eps = get_or<double>(cfg, "epsilon", 0.05);
  PeriodicLinearSystem sys(w.dim());
  sys.add("x", w);
  const auto res = diagonalize_with_transition(sys, "x", Transition{"x", "x", t, eps}, eps, seed_of(opt, cfg));
  const auto& r = res.report;
  json j;
  j["k"] = r.k;
  j["l"] = r.l;
  j["length"] = r.length;
  j["nudges"] = r.nudges;
  j["realify_distance"] = r.realify_distance;
  j["admissible_distance"] = r.admissible_distance;
  j["input_top"] = r.input_top;
  j["realified_top"] = r.realified_top;
  j["output_top"] = r.output_top;
  j["output_exponents"] = r.output_exponents;
  j["line_defect"] = r.line_defect;
  j["simple_real"] = r.simple_real;
  j["positive"] = r.positive;
  json stages = json::array();
  for (const auto& s : r.stages)
    stages.push_back({{"pair", s.pair}, {"j_out", s.j_out}, {"j_in", s.j_in}, {"distance_out", s.distance_out},
                      {"distance_in", s.distance_in}, {"middle_defect", s.middle_defect}});
  j["stages"] = stages;
  write_file(opt, "diagonalize.json", dump(j));
  return exit_ok;
}

int run_inequality_cmd(const Options& opt, const json& cfg) {
  const auto map = MapFamily::from_json(need(cfg, "map"));
  const auto mode = center_mode_from_string(get_or<std::string>(cfg, "center", "gap"));
  const auto rep = run_inequality(map, orbit_config(opt, cfg), entropy_config(opt, cfg), mode);
  write_file(opt, "inequality.json", dump(inequality_to_json(rep)));
  return exit_ok;
}

int dispatch(const std::string& cmd, const Options& opt) {
  const json cfg = load_config(opt.config);
  if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
  if (cmd == "classify") return run_classify(opt, cfg);
  if (cmd == "orbits") return run_orbits(opt, cfg);
  if (cmd == "entropy") return run_entropy(opt, cfg);
  if (cmd == "snake") return run_snake(opt, cfg);
  if (cmd == "scan") return run_scan(opt, cfg);
  if (cmd == "diagonalize") return run_diagonalize(opt, cfg);
  return run_inequality_cmd(opt, cfg);
}

bool is_config_kind(ErrorKind k) {
  return k == ErrorKind::Config || k == ErrorKind::InvalidInput || k == ErrorKind::InvalidDimension;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"symplab: experiments with symplectic maps and periodic orbits"};
  app.require_subcommand(1, 1);
  Options opt;
  std::uint64_t seed = 0;
  int threads = 1;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"classify", "spectral class of matrices or of a map's derivative at points"},
      {"orbits", "periodic orbit search and census"},
      {"entropy", "separated-set entropy estimate"},
      {"snake", "snake perturbation horseshoe family"},
      {"scan", "signature scan over map cells"},
      {"diagonalize", "diagonalize a periodic cocycle word with a transition"},
      {"inequality", "entropy estimate against the periodic exponent statistic"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "JSON config path, - for stdin")->capture_default_str();
    sub->add_option("--seed", seed, "random seed (overrides the config)");
    sub->add_option("--threads", threads, "worker threads (overrides the config)")->check(CLI::PositiveNumber);
    sub->add_option("--out", opt.out, "output directory")->capture_default_str();
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    if (argc > 1 && argv[1][0] != '-' &&
        std::none_of(commands.begin(), commands.end(), [&](const auto& c) { return c.first == argv[1]; }))
      std::cerr << "unknown subcommand: " << argv[1] << '\n';
    else
      app.exit(e);
    std::cerr << app.help();
    return exit_config;
  }
  const auto* sub = app.get_subcommands().front();
  if (sub->count("--seed")) opt.seed = seed;
  if (sub->count("--threads")) opt.threads = threads;

  try {
    return dispatch(sub->get_name(), opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const Error& e) {
    std::cerr << (is_config_kind(e.kind()) ? "config error: " : "numerical failure: ") << e.what() << '\n';
    return is_config_kind(e.kind()) ? exit_config : exit_numerical;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return exit_numerical;
  }
}
