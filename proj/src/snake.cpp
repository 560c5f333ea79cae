#include "symplab/snake.hpp"

#include "symplab/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace symplab {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double collar = 0.1; // bump falls from 1 to 0 over [r, (1 + collar) r]

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
  return buf;
}

double bump_f(double u) { return u <= 0.0 ? 0.0 : std::exp(-1.0 / u); }
double bump_f1(double u) { return u <= 0.0 ? 0.0 : bump_f(u) / (u * u); }
double bump_f2(double u) {
  return u <= 0.0 ? 0.0 : bump_f(u) * (1.0 / (u * u * u * u) - 2.0 / (u * u * u));
}

// rho(s) = 1 - S((s - r) / (collar r)) with S the smooth step a / (a + b).
void bump(double s, double r, double& rho, double& d1, double& d2) {
  const double w = collar * r;
  const double u = (s - r) / w;
  if (u <= 0.0) {
    rho = 1.0, d1 = d2 = 0.0;
    return;
  }
  if (u >= 1.0) {
    rho = 0.0, d1 = d2 = 0.0;
    return;
  }
  const double a = bump_f(u), b = bump_f(1.0 - u);
  const double a1 = bump_f1(u), b1 = -bump_f1(1.0 - u);
  const double a2 = bump_f2(u), b2 = bump_f2(1.0 - u);
  const double s0 = a + b;
  const double n1 = a1 * b - a * b1;
  const double step1 = n1 / (s0 * s0);
  const double step2 = ((a2 * b - a * b2) * s0 - 2.0 * n1 * (a1 + b1)) / (s0 * s0 * s0);
  rho = 1.0 - a / s0;
  d1 = -step1 / w;
  d2 = -step2 / (w * w);
}

Matrix j_matrix(Eigen::Index n) {
  const Eigen::Index d = n / 2;
  Matrix j = Matrix::Zero(n, n);
  j.topRightCorner(d, d) = Matrix::Identity(d, d);
  j.bottomLeftCorner(d, d) = -Matrix::Identity(d, d);
  return j;
}

struct PairRates {
  double sigma = 1.0;     // expansion of the snake pair
  double weakest_uu = 1.0;
  double strongest_ss = 1.0; // largest modulus in E^ss (< 1)
};

PairRates rates(const LinearModel& model) {
  const Matrix& a = model.dp.matrix();
  const int d = model.dp.half_dim();
  std::vector<double> lam;
  for (int i = 0; i < d; ++i) lam.push_back(std::max(std::abs(a(i, i)), std::abs(a(d + i, d + i))));
  std::sort(lam.begin(), lam.end(), std::greater<>());
  const int k = model.k;
  PairRates out;
  out.sigma = std::max(std::abs(a(model.pair, model.pair)), std::abs(a(d + model.pair, d + model.pair)));
  out.weakest_uu = lam[static_cast<std::size_t>(k - 1)];
  out.strongest_ss = 1.0 / out.weakest_uu;
  return out;
}

// theta = pi X N / (2r) of the branch-m solution of A cos(theta) = c.
double branch_theta(int m, double c_over_a) {
  const double c = std::clamp(c_over_a, -1.0, 1.0);
  return m * pi + ((m % 2 == 0) ? std::acos(c) : std::acos(-c));
}

} // namespace

double SnakeParams::amplitude() const { return 2.0 * R * r * delta / (pi * N); }

void SnakeParams::validate() const {
  if (d < 1) throw Error(ErrorKind::InvalidInput, "snake chart needs d >= 1");
  if (m < 0 || m >= d) throw Error(ErrorKind::InvalidInput, "center half-dimension must lie in [0, d)");
  if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorKind::InvalidInput, "radius must be positive");
  if (N < 1) throw Error(ErrorKind::InvalidInput, "oscillation count must be at least 1");
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw Error(ErrorKind::InvalidInput, "delta must be nonnegative");
  if (!(R > 0.0) || !std::isfinite(R)) throw Error(ErrorKind::InvalidInput, "chart constant must be positive");
  if (K < 0) throw Error(ErrorKind::InvalidInput, "transit count must be nonnegative");
  if (amplitude() >= r) throw Error(ErrorKind::Geometry, "snake amplitude " + fmt(amplitude()) + " leaves the chart radius");
}

LinearModel make_linear_model(const Matrix& dp, int m, double r) {
  const Eigen::Index n = dp.rows();
  if (n < 2 || n % 2 != 0 || dp.cols() != n) throw Error(ErrorKind::InvalidDimension, "Dp must be square of even size");
  Matrix off = dp;
  off.diagonal().setZero();
  if (off.cwiseAbs().maxCoeff() > 0.0) throw Error(ErrorKind::InvalidInput, "Dp must be diagonal");
  const int d = static_cast<int>(n / 2);
  if (m < 0 || m >= d) throw Error(ErrorKind::InvalidInput, "center half-dimension must lie in [0, d)");
  LinearModel model;
  model.dp = SymplecticMatrix(dp);
  int best = 0;
  double sigma = 0.0;
  for (int i = 0; i < d; ++i) {
    const double l = std::max(std::abs(dp(i, i)), std::abs(dp(d + i, d + i)));
    if (l > sigma) sigma = l, best = i;
  }
  if (sigma <= 1.0 + 1e-12) throw Error(ErrorKind::ModelTooWeak, "Dp has no stretching direction");
  model.pair = best;
  model.k = std::min(d - m + 1, d);
  model.splitting = strong_splitting(model.dp, model.k);
  model.segment = {-r, r};
  return model;
}

// ---------------------------------------------------------------------------
// Theta

SnakeMap::SnakeMap(const SnakeParams& params, int pair) : params_(params), pair_(pair) {
  params_.validate();
  if (pair < 0 || pair >= params.d) throw Error(ErrorKind::InvalidInput, "snake pair out of range");
  a_ = params_.amplitude();
  // bound on the mixed block of the generating Hessian; the bump has |S'| <= 2, |S''| <= 9.9
  const double len = 2.0 / (pi * params_.N);
  const double load = a_ / params_.r * (len * (9.9 / (collar * collar) + 2.0 / collar) + 2.0 / collar);
  if (load > 0.5)
    throw Error(ErrorKind::Geometry, "amplitude too large for a C1-small cut-off over [r, 1.1 r]");
}

void SnakeMap::generating(const Vector& z, double& value, Vector& grad, Matrix& hess) const {
  const Eigen::Index n = z.size();
  const double r = params_.r;
  const double len = 2.0 * r / (pi * params_.N);
  const double s = z.norm();
  double rho, r1, r2;
  bump(s, r, rho, r1, r2);
  const double arg = z(pair_) / len;
  const double phi = a_ * len * std::sin(arg);
  const double phi1 = a_ * std::cos(arg);
  const double phi2 = -a_ / len * std::sin(arg);
  value = rho * phi;
  grad = Vector::Zero(n);
  hess = Matrix::Zero(n, n);
  grad(pair_) = rho * phi1;
  hess(pair_, pair_) = rho * phi2;
  if (r1 != 0.0 || r2 != 0.0) {
    const Vector e = z / s;
    const Vector gr = r1 * e;
    const Matrix hr = r2 * e * e.transpose() + (r1 / s) * (Matrix::Identity(n, n) - e * e.transpose());
    grad += phi * gr;
    hess += phi * hr;
    hess.col(pair_) += phi1 * gr;
    hess.row(pair_) += phi1 * gr.transpose();
  }
}

// In y = J x = (p, -q) the snake is a momentum shear; it is generated by
// F(y_q, P) = y_q . P + psi(y_q, P), y_p = P + psi_q, Q = y_q + psi_P.
SnakeMap::Solved SnakeMap::solve(const Vector& x) const {
  const Eigen::Index n = x.size(), d = n / 2;
  if (n != 2 * params_.d) throw Error(ErrorKind::InvalidDimension, "chart point has the wrong dimension");
  Solved out;
  out.qy = x.tail(d);
  const Vector yp = -x.head(d);
  Vector p = yp;
  Vector z(n);
  double value;
  bool converged = false;
  for (int it = 0; it < 60 && !converged; ++it) {
    z << out.qy, p;
    generating(z, value, out.grad, out.hess);
    const Vector f = p + out.grad.head(d) - yp;
    const Matrix jac = Matrix::Identity(d, d) + out.hess.block(0, d, d, d);
    const Vector step = jac.partialPivLu().solve(f);
    p -= step;
    converged = step.lpNorm<Eigen::Infinity>() <= 1e-15 * std::max(params_.r, p.lpNorm<Eigen::Infinity>());
  }
  if (!converged) throw Error(ErrorKind::Numerical, "snake generating equation did not converge");
  z << out.qy, p;
  generating(z, value, out.grad, out.hess);
  out.py = p;
  return out;
}

Vector SnakeMap::apply(const Vector& x) const {
  const Eigen::Index d = x.size() / 2;
  const Solved s = solve(x);
  Vector out(x.size());
  // x' = -J y' with y' = (Q, P)
  out.head(d) = -s.py;
  out.tail(d) = s.qy + s.grad.tail(d);
  return out;
}

Matrix SnakeMap::jacobian(const Vector& x) const {
  const Eigen::Index n = x.size(), d = n / 2;
  const Solved s = solve(x);
  const Matrix hqq = s.hess.topLeftCorner(d, d), hqp = s.hess.topRightCorner(d, d);
  const Matrix hpq = s.hess.bottomLeftCorner(d, d), hpp = s.hess.bottomRightCorner(d, d);
  const Matrix id = Matrix::Identity(d, d);
  const Matrix m = (id + hqp).inverse();
  Matrix dy(n, n);
  dy.topLeftCorner(d, d) = id + hpq - hpp * m * hqq;
  dy.topRightCorner(d, d) = hpp * m;
  dy.bottomLeftCorner(d, d) = -m * hqq;
  dy.bottomRightCorner(d, d) = m;
  const Matrix j = j_matrix(n);
  return -j * dy * j;
}

double SnakeMap::c1_distance(int samples, std::uint64_t seed) const {
  const Eigen::Index n = 2 * params_.d;
  std::mt19937_64 rng(seed);
  const double reach = (1.0 + collar) * params_.r;
  std::uniform_real_distribution<double> u(-reach, reach);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    Vector x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = u(rng);
    const Matrix dev = jacobian(x) - Matrix::Identity(n, n);
    worst = std::max(worst, Eigen::JacobiSVD<Matrix>(dev).singularValues()(0));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// crossings

CrossingReport count_crossings(const SnakeParams& params, std::pair<double, double> segment) {
  params.validate();
  CrossingReport rep;
  const double a = params.amplitude();
  if (a == 0.0) {
    rep.degenerate = true;
    return rep;
  }
  const double len = 2.0 * params.r / (pi * params.N);
  auto f = [&](double s) { return a * std::cos(s / len); };
  auto df = [&](double s) { return -a / len * std::sin(s / len); };
  const auto [lo, hi] = segment;
  if (!(hi > lo)) throw Error(ErrorKind::InvalidInput, "segment must have positive length");

  double res = params.r / (100.0 * params.N);
  for (int level = 0; level <= 3; ++level) {
    rep.zeros.clear();
    bool ambiguous = false;
    const auto cells = static_cast<long long>(std::ceil((hi - lo) / res));
    for (long long c = 0; c < cells; ++c) {
      const double x0 = lo + c * res, x1 = std::min(hi, lo + (c + 1) * res);
      const double f0 = f(x0), f1 = f(x1);
      if (f0 == 0.0) {
        rep.zeros.push_back(x0);
        continue;
      }
      if (f0 * f1 < 0.0) {
        double l = x0, h = x1;
        for (int it = 0; it < 200 && h - l > 1e-15 * std::max(1.0, std::abs(l)); ++it) {
          const double mid = 0.5 * (l + h);
          (f(l) * f(mid) <= 0.0 ? h : l) = mid;
        }
        rep.zeros.push_back(0.5 * (l + h));
      } else if (df(x0) * df(x1) < 0.0 && std::min(std::abs(f0), std::abs(f1)) < std::abs(df(x0)) * res) {
        ambiguous = true; // a critical point close to zero may hide a pair of roots
      }
    }
    if (!ambiguous || level == 3) break;
    res /= 10.0;
    ++rep.refinements;
  }
  rep.crossings = static_cast<int>(rep.zeros.size());
  rep.min_slope = std::numeric_limits<double>::infinity();
  for (double z : rep.zeros) rep.min_slope = std::min(rep.min_slope, std::abs(df(z)));
  if (rep.zeros.empty()) rep.min_slope = 0.0;
  return rep;
}

CrossingReport count_crossings(const SnakeParams& params) { return count_crossings(params, {-params.r, params.r}); }

// ---------------------------------------------------------------------------
// horseshoe

int stretching_time(double sigma, double amplitude, double r, int t_max) {
  if (!(sigma > 1.0) || !(amplitude > 0.0)) return -1;
  const double need = std::log(4.0 * r / amplitude) / std::log(sigma);
  int t = std::max(1, static_cast<int>(std::ceil(need - 1e-12)));
  // guard the ceiling against rounding in the logs
  while (t > 1 && std::pow(sigma, t - 1) * amplitude / 2.0 >= 2.0 * r) --t;
  while (std::pow(sigma, t) * amplitude / 2.0 < 2.0 * r) ++t;
  return t > t_max ? -1 : t;
}

Vector horseshoe_return(const SnakeParams& params, double sigma, int t, const Vector& x) {
  const double mu = std::pow(sigma, t);
  const double a = params.amplitude();
  Vector y(2);
  y(0) = mu * x(1);
  y(1) = -x(0) / mu + a * std::cos(pi * y(0) * params.N / (2.0 * params.r));
  return y;
}

namespace {

// Orbit of the return map following a block, solved as a boundary value
// problem: x_s(0) = 0 and x_u(j) = 0. Unstable coordinates are recovered
// backwards through the branch inverse, stable ones forwards.
struct BlockTracker {
  const SnakeParams* params = nullptr;
  double sigma = 1.0, a = 0, h = 0, mu = 0, nu = 0, r = 0;
  int n = 0, t = 0;

  int symbol(const Vector& x) const {
    const double xs = mu * x(1);
    if (!(std::abs(xs) < r)) return -1;
    const Vector y = horseshoe_return(*params, sigma, t, x);
    if (!(std::abs(y(1)) <= h)) return -1;
    return static_cast<int>(std::floor(xs * n / (2.0 * r))) + n / 2;
  }

  bool track(const std::vector<int>& block) const {
    const std::size_t j = block.size();
    std::vector<double> xs(j + 1, 0.0), xu(j + 1, 0.0);
    const double scale = 2.0 * r / (pi * n * mu);
    for (int pass = 0; pass < 50; ++pass) {
      double change = 0.0;
      for (std::size_t i = j; i-- > 0;) {
        const double c = (xu[i + 1] + nu * xs[i]) / a;
        if (std::abs(c) > 1.0) return false;
        const double v = branch_theta(block[i] - n / 2, c) * scale;
        change = std::max(change, std::abs(v - xu[i]));
        xu[i] = v;
      }
      for (std::size_t i = 0; i < j; ++i) xs[i + 1] = mu * xu[i];
      if (change <= 1e-16 * h && pass > 0) break;
    }
    Vector x(2);
    x << xs[0], xu[0];
    for (std::size_t i = 0; i < j; ++i) {
      if (symbol(x) != block[i]) return false;
      x = horseshoe_return(*params, sigma, t, x);
    }
    return true;
  }
};

} // namespace

Horseshoe build_horseshoe(const LinearModel& model, SnakeParams& params, int max_block) {
  params.validate();
  if (params.N < 2 || params.N % 2 != 0)
    throw Error(ErrorKind::Geometry, "the chart horseshoe needs an even oscillation count N >= 2");
  if (model.dp.half_dim() != params.d) throw Error(ErrorKind::InvalidDimension, "model and snake dimensions differ");
  const CrossingReport cr = count_crossings(params, model.segment);
  if (cr.degenerate) throw Error(ErrorKind::Geometry, "zero amplitude: the intersection is not transverse");
  if (cr.crossings != params.N)
    throw Error(ErrorKind::Geometry, "segment carries " + std::to_string(cr.crossings) + " crossings, expected " +
                                         std::to_string(params.N));

  Horseshoe hs;
  const double a = params.amplitude(), r = params.r;
  hs.sigma = rates(model).sigma;
  hs.h = a / 2.0;
  hs.t_predicted = static_cast<int>(std::ceil(std::log(r / a) / std::log(hs.sigma)));

  // iterate the model until the image of D_t spans its x_s side with margin 2
  Vector corner(2);
  corner << 0.0, hs.h;
  int t = 0;
  for (int step = 1; step <= horseshoe_t_max; ++step) {
    const double reach = std::abs(horseshoe_return(params, hs.sigma, step, corner)(0));
    if (reach / r >= 2.0) {
      t = step;
      hs.stretch_margin = reach / r;
      break;
    }
  }
  if (t == 0)
    throw Error(ErrorKind::ModelTooWeak, "no stretching across D_t within " + std::to_string(horseshoe_t_max) +
                                             " iterates (closed form needs " +
                                             std::to_string(stretching_time(hs.sigma, a, r)) + ")");
  hs.t = t;
  params.t = t;
  const double mu = std::pow(hs.sigma, t), nu = 1.0 / mu;
  const int n = params.N;

  // components of R(D_t) n D_t: a scan in x_s for |A cos| <= h + nu r
  const double band = hs.h + nu * r;
  auto inside = [&](double xs) { return std::abs(a * std::cos(pi * xs * n / (2.0 * r))) <= band; };
  const double res = r / (100.0 * n);
  bool in = false;
  double start = 0.0;
  for (double xs = -r; xs < r; xs += res) {
    const bool now = inside(xs);
    if (now && !in) start = xs;
    if (!now && in) hs.component_intervals.push_back({start, xs});
    in = now;
  }
  if (in) hs.component_intervals.push_back({start, r});
  hs.components = static_cast<int>(hs.component_intervals.size());

  // each component is a full crossing: both ends leave D_t on opposite sides
  hs.full_crossings = hs.components == n;
  for (int s = 0; s < n && hs.full_crossings; ++s) {
    const int m = s - n / 2;
    const double scale = 2.0 * r / (pi * n);
    const double x0 = branch_theta(m, band / a) * scale, x1 = branch_theta(m, -band / a) * scale;
    for (double xs : {-r, r}) {
      const double y0 = -nu * xs + a * std::cos(x0 / scale);
      const double y1 = -nu * xs + a * std::cos(x1 / scale);
      if (!(y0 * y1 < 0.0 && std::min(std::abs(y0), std::abs(y1)) >= hs.h - 1e-12 * a)) hs.full_crossings = false;
    }
    if (std::max(std::abs(x0), std::abs(x1)) >= r) hs.full_crossings = false;
  }

  BlockTracker tr;
  tr.params = &params, tr.sigma = hs.sigma, tr.a = a, tr.h = hs.h, tr.mu = mu, tr.nu = nu, tr.r = r;
  tr.n = n, tr.t = t;
  hs.full_shift = hs.full_crossings;
  long long total = 1;
  for (int j = 1; j <= max_block; ++j) {
    total *= n;
    if (total > (1LL << 20)) break;
    long long count = 0;
    std::vector<int> block(static_cast<std::size_t>(j), 0);
    for (long long code = 0; code < total; ++code) {
      long long c = code;
      for (int i = j - 1; i >= 0; --i, c /= n) block[static_cast<std::size_t>(i)] = static_cast<int>(c % n);
      if (tr.track(block)) ++count;
    }
    hs.cylinder_counts.push_back(count);
    if (count != total) hs.full_shift = false;
  }
  hs.entropy = horseshoe_entropy(n, t);
  return hs;
}

// ---------------------------------------------------------------------------
// norm bound and the closing inequality

NormBound norm_bound(const LinearModel& model, const SnakeParams& params, int t) {
  const PairRates pr = rates(model);
  NormBound nb;
  nb.norm_uu = std::pow(pr.weakest_uu, -t);
  nb.norm_ss = std::pow(pr.strongest_ss, t);
  nb.k1 = params.amplitude() / std::max(nb.norm_uu, nb.norm_ss);
  return nb;
}

NormBoundFamily check_norm_bound(const LinearModel& model, const SnakeParams& base, const std::vector<int>& Ns) {
  NormBoundFamily fam;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int n : Ns) {
    SnakeParams p = base;
    p.N = n;
    build_horseshoe(model, p, 0);
    const NormBound nb = norm_bound(model, p, p.t);
    fam.Ns.push_back(n);
    fam.ts.push_back(p.t);
    fam.amplitudes.push_back(p.amplitude());
    fam.bounds.push_back(nb);
    lo = std::min(lo, nb.k1), hi = std::max(hi, nb.k1);
  }
  if (fam.bounds.empty()) return fam;
  fam.k1 = hi;
  fam.k1_integer = static_cast<long long>(std::floor(hi)) + 1;
  for (auto& b : fam.bounds) b.margin = std::log(fam.k1_integer / b.k1);
  fam.spread = hi / lo;
  fam.bounded = fam.spread < 4.0;
  return fam;
}

namespace {

EntropyComparison compare_at(const LinearModel& model, double log_n, double amplitude, double r, int t, int k) {
  const PairRates pr = rates(model);
  EntropyComparison ec;
  ec.N = std::exp(log_n);
  ec.t = t;
  ec.left = log_n / t;
  ec.min_term = std::min(std::log(pr.weakest_uu), -std::log(pr.strongest_ss));
  ec.strong_exponent = std::log(pr.weakest_uu);
  ec.slack = 1.0 / (2.0 * k);
  ec.holds = ec.left > ec.min_term - ec.slack;
  (void)amplitude, (void)r;
  return ec;
}

} // namespace

EntropyComparison verify_entropy_comparison(const LinearModel& model, const SnakeParams& params, int k) {
  if (k < 1) throw Error(ErrorKind::InvalidInput, "k must be positive");
  params.validate();
  const int t = params.t > 0 ? params.t : stretching_time(rates(model).sigma, params.amplitude(), params.r);
  if (t < 1) throw Error(ErrorKind::ModelTooWeak, "no stretching time for this model");
  return compare_at(model, std::log(static_cast<double>(params.N)), params.amplitude(), params.r, t, k);
}

ThresholdScan entropy_threshold(const LinearModel& model, const SnakeParams& base, int k, int max_log2) {
  if (k < 1) throw Error(ErrorKind::InvalidInput, "k must be positive");
  base.validate();
  const double sigma = rates(model).sigma;
  ThresholdScan scan;
  for (int e = 1; e <= max_log2; ++e) {
    const double log_n = e * std::log(2.0);
    const double amp = 2.0 * base.R * base.r * base.delta / pi * std::exp(-log_n);
    const int t = stretching_time(sigma, amp, base.r);
    if (t < 1) break;
    scan.rows.push_back(compare_at(model, log_n, amp, base.r, t, k));
  }
  for (std::size_t i = scan.rows.size(); i-- > 0;) {
    if (!scan.rows[i].holds) break;
    scan.threshold = scan.rows[i].N;
    scan.found = true;
  }
  return scan;
}

// ---------------------------------------------------------------------------
// serialization

nlohmann::json horseshoe_to_json(const Horseshoe& h, const SnakeParams& p) {
  nlohmann::json j;
  j["N"] = p.N;
  j["delta"] = p.delta;
  j["r"] = p.r;
  j["R"] = p.R;
  j["A"] = p.amplitude();
  j["t"] = h.t;
  j["t_predicted"] = h.t_predicted;
  j["sigma"] = h.sigma;
  j["stretch_margin"] = h.stretch_margin;
  j["components"] = h.components;
  j["full_crossings"] = h.full_crossings;
  j["cylinder_counts"] = h.cylinder_counts;
  j["full_shift"] = h.full_shift;
  j["entropy"] = h.entropy;
  return j;
}

std::string snake_family_csv(const std::vector<SnakeParams>& params, const std::vector<Horseshoe>& runs,
                             const std::vector<NormBound>& bounds) {
  std::ostringstream os;
  os << "N,delta,A,t,crossings,entropy,bound_margin\n";
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& p = params[i];
    os << p.N << ',' << fmt(p.delta) << ',' << fmt(p.amplitude()) << ',' << runs[i].t << ','
       << count_crossings(p).crossings << ',' << fmt(runs[i].entropy) << ','
       << (i < bounds.size() ? fmt(bounds[i].margin) : std::string("nan")) << '\n';
  }
  return os.str();
}

} // namespace symplab
