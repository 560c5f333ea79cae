#include "symplab/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>

namespace symplab {

void PeriodicLinearSystem::add(const std::string& id, Word word) {
  if (word.empty()) throw Error(ErrorKind::InvalidInput, "orbit '" + id + "' has an empty word");
  if (word.dim() != dim_) throw Error(ErrorKind::InvalidDimension, "orbit '" + id + "' has the wrong dimension");
  words_.insert_or_assign(id, std::move(word));
}

const Word& PeriodicLinearSystem::word(const std::string& id) const {
  const auto it = words_.find(id);
  if (it == words_.end()) throw Error(ErrorKind::InvalidInput, "unknown orbit '" + id + "'");
  return it->second;
}

std::vector<std::string> PeriodicLinearSystem::points() const {
  std::vector<std::string> out;
  for (const auto& [id, w] : words_) out.push_back(id);
  return out;
}

bool is_primitive(const std::vector<ItineraryStep>& s) {
  const std::size_t m = s.size();
  for (std::size_t p = 1; p < m; ++p) {
    if (m % p != 0) continue;
    bool periodic = true;
    for (std::size_t i = 0; i < m && periodic; ++i) periodic = s[i] == s[(i + p) % m];
    if (periodic) return false;
  }
  return true;
}

Word compose_with_transitions(const PeriodicLinearSystem& system, const std::vector<ItineraryStep>& itinerary,
                              const TransitionTable& transitions) {
  if (itinerary.empty()) throw Error(ErrorKind::InvalidInput, "empty itinerary");
  if (!is_primitive(itinerary)) throw Error(ErrorKind::NotAPower, "itinerary is a power");
  const std::size_t m = itinerary.size();
  std::vector<SymplecticMatrix> letters;
  for (std::size_t k = m; k-- > 0;) {
    const auto& [id, alpha] = itinerary[k];
    if (alpha < 1) throw Error(ErrorKind::InvalidInput, "repeat counts must be >= 1");
    const std::string& next = itinerary[(k + 1) % m].first;
    const auto it = transitions.find({next, id});
    if (it == transitions.end())
      throw Error(ErrorKind::MissingTransition, "no transition from '" + id + "' to '" + next + "'");
    const auto& t = it->second.word;
    if (!t.empty() && t.dim() != system.dim())
      throw Error(ErrorKind::InvalidDimension, "transition of the wrong dimension");
    letters.insert(letters.end(), t.letters().begin(), t.letters().end());
    const Word block = system.word(id).power(alpha);
    letters.insert(letters.end(), block.letters().begin(), block.letters().end());
  }
  return Word(std::move(letters));
}

namespace {

Matrix sym_inverse(const Matrix& m) {
  const Matrix j = standard_j(m.rows());
  return -j * m.transpose() * j;
}

// Newton steps B <- B (I + J E / 2), E = B^T J B - J.
Matrix polish(Matrix b) {
  const Matrix j = standard_j(b.rows());
  for (int it = 0; it < 3; ++it) {
    const Matrix e = b.transpose() * j * b - j;
    if (max_abs(e) < 1e-15) break;
    b = b * (Matrix::Identity(b.rows(), b.cols()) + 0.5 * j * e);
  }
  return b;
}

double max_letter_change(const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, max_abs(a[i] - b[i]));
  return worst;
}

std::vector<Matrix> matrices(const Word& w) {
  std::vector<Matrix> out;
  for (const auto& l : w.letters()) out.push_back(l.matrix());
  return out;
}

Word to_word(const std::vector<Matrix>& letters) {
  std::vector<SymplecticMatrix> out;
  out.reserve(letters.size());
  for (const Matrix& m : letters) out.emplace_back(m, 1e-8);
  return Word(std::move(out));
}

Matrix product(const std::vector<Matrix>& letters) {
  Matrix p = Matrix::Identity(letters.front().rows(), letters.front().cols());
  for (const Matrix& m : letters) p = p * m;
  return p;
}

// Product a_0 ... a_{n-1} divided by exp(log_scale).
struct Scaled {
  Matrix matrix;
  double log_scale = 0.0;
};

Scaled scaled_product(const std::vector<Matrix>& letters) {
  Scaled out{Matrix::Identity(letters.front().rows(), letters.front().cols()), 0.0};
  for (const Matrix& m : letters) {
    out.matrix = out.matrix * m;
    const double s = max_abs(out.matrix);
    if (s > 1e100 || s < 1e-100) {
      out.matrix /= s;
      out.log_scale += std::log(s);
    }
  }
  return out;
}

// Eigenvalues as phase and log-modulus. Expanding eigenpairs are read from
// the product, contracting ones from its symplectic inverse.
struct Spectrum {
  CVector phase;
  std::vector<double> log_mod;
  CMatrix vectors;
  bool same(int i, int j, double tol) const {
    return std::abs(log_mod[static_cast<std::size_t>(i)] - log_mod[static_cast<std::size_t>(j)]) <= tol &&
           std::abs(phase(i) - phase(j)) <= tol;
  }
};

Spectrum split_spectrum(const Scaled& m) {
  const Eigen::Index n = m.matrix.rows(), d = n / 2;
  Eigen::ComplexEigenSolver<Matrix> es(m.matrix), esi(sym_inverse(m.matrix));
  if (es.info() != Eigen::Success || esi.info() != Eigen::Success)
    throw Error(ErrorKind::Numerical, "eigen-solver failed on the monodromy");
  auto descending = [](const CVector& l) {
    std::vector<int> order(static_cast<std::size_t>(l.size()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return std::abs(l(a)) > std::abs(l(b)); });
    return order;
  };
  const auto top = descending(es.eigenvalues()), topi = descending(esi.eigenvalues());
  Eigen::Index e = 0;
  while (e < d && m.log_scale + std::log(std::abs(es.eigenvalues()(top[static_cast<std::size_t>(e)]))) > 1e-9) ++e;
  Spectrum sp;
  sp.phase = CVector(n);
  sp.log_mod.assign(static_cast<std::size_t>(n), 0.0);
  sp.vectors = CMatrix(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool contracting = i >= n - e;
    const int src = contracting ? topi[static_cast<std::size_t>(i - (n - e))] : top[static_cast<std::size_t>(i)];
    const std::complex<double> v = contracting ? esi.eigenvalues()(src) : es.eigenvalues()(src);
    // 1/mu has the phase of conj(mu)
    sp.phase(i) = contracting ? std::conj(v) / std::abs(v) : v / std::abs(v);
    sp.log_mod[static_cast<std::size_t>(i)] =
        contracting ? -(std::log(std::abs(v)) + m.log_scale) : std::log(std::abs(v)) + m.log_scale;
    sp.vectors.col(i) = contracting ? esi.eigenvectors().col(src) : es.eigenvectors().col(src);
  }
  return sp;
}

// An M-invariant real plane (columns) and whether M expands it.
struct Plane {
  Matrix basis;
  bool expanding = false;
};

// Plane bases carried along the word: entry [g][t] spans Q_t^{-1} P_g with
// Q_t = a_0 ... a_{t-1}. Expanding planes travel backward with the letters,
// the others forward with their inverses, so rounding never grows.
std::vector<std::vector<Matrix>> transport_planes(const std::vector<Matrix>& a, const std::vector<Plane>& planes) {
  const std::size_t n = a.size();
  std::vector<std::vector<Matrix>> out(planes.size(), std::vector<Matrix>(n));
  for (std::size_t g = 0; g < planes.size(); ++g) {
    Matrix x = planes[g].basis / planes[g].basis.norm();
    if (planes[g].expanding) {
      for (std::size_t t = n; t-- > 0;) {
        x = a[t] * x;
        x /= x.norm();
        out[g][t] = x;
      }
    } else {
      for (std::size_t t = 0; t < n; ++t) {
        out[g][t] = x;
        x = sym_inverse(a[t]) * x;
        x /= x.norm();
      }
    }
  }
  return out;
}

// h acts on plane g by `h` in its basis and is the identity on every plane
// omega-paired with something other than `partner`.
struct PlaneAction {
  int plane = 0, partner = 0;
  Matrix h;
};

// Letters c_t a_t with c_t = Q_t^{-1} h Q_t; their product is h^n a_0 ... a_{n-1}.
std::vector<Matrix> spread_planes(const std::vector<Matrix>& a, const std::vector<std::vector<Matrix>>& moved,
                                  const std::vector<PlaneAction>& actions) {
  const Eigen::Index dim = a.front().rows();
  const Matrix j = standard_j(dim);
  std::vector<Matrix> out;
  out.reserve(a.size());
  for (std::size_t t = 0; t < a.size(); ++t) {
    Matrix c = Matrix::Identity(dim, dim);
    for (const auto& act : actions) {
      const Matrix& x = moved[static_cast<std::size_t>(act.plane)][t];
      const Matrix pair = moved[static_cast<std::size_t>(act.partner)][t].transpose() * j;
      c += x * (act.h - Matrix::Identity(2, 2)) * (pair * x).inverse() * pair;
    }
    out.push_back(polish(c * a[t]));
  }
  return out;
}

struct Cluster {
  double phi = 0.0;
  std::vector<int> members;
};

} // namespace

Realification realify(const Word& w, double eps, int q_max) {
  if (w.empty()) throw Error(ErrorKind::InvalidInput, "empty word");
  if (!(eps > 0.0)) throw Error(ErrorKind::InvalidInput, "eps must be positive");
  const auto n = static_cast<double>(w.size());
  const std::vector<Matrix> a = matrices(w);
  const Spectrum sp = split_spectrum(scaled_product(a));
  const Eigen::Index dim = sp.phase.size();
  const int size = static_cast<int>(dim);
  for (int i = 0; i < size; ++i)
    for (int j = i + 1; j < size; ++j)
      if (sp.same(i, j, tol::simple)) throw Error(ErrorKind::Precondition, "monodromy spectrum is not simple");

  bool negative = false;
  std::vector<int> cplx;
  for (int i = 0; i < size; ++i) {
    if (std::abs(sp.phase(i).imag()) > 1e-12) cplx.push_back(i);
    else if (sp.phase(i).real() < 0) negative = true;
  }
  Realification out;
  if (cplx.empty() && !negative) {
    out.word = w;
    return out;
  }
  // eigenvalues sharing an argument (up to sign) form one cluster
  auto arg = [&](int i) { return std::abs(std::arg(sp.phase(i))); };
  std::sort(cplx.begin(), cplx.end(), [&](int x, int y) { return arg(x) < arg(y); });
  std::vector<Cluster> clusters;
  for (int i : cplx) {
    if (clusters.empty() || arg(i) - clusters.back().phi > 1e-7) clusters.push_back({arg(i), {i}});
    else clusters.back().members.push_back(i);
  }

  // real planes per cluster: [Re v, Im v] of the upper member(s); a quadruple
  // gives an outer (expanding) plane omega-paired with an inner one
  std::vector<Plane> planes;
  std::vector<std::vector<std::pair<int, int>>> pairs(clusters.size());
  for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
    auto& c = clusters[ci];
    if (c.members.size() != 2 && c.members.size() != 4)
      throw Error(ErrorKind::Precondition, "unexpected complex eigenvalue multiplicity");
    double s = 0.0;
    for (int i : c.members) s += arg(i);
    c.phi = s / static_cast<double>(c.members.size());
    int up = -1, up_inner = -1;
    for (int i : c.members) {
      if (sp.phase(i).imag() <= 0) continue;
      if (sp.log_mod[static_cast<std::size_t>(i)] > 1e-9 && up < 0) up = i;
      else up_inner = i;
    }
    auto plane_of = [&](int i, bool expanding) {
      Matrix b(dim, 2);
      b << sp.vectors.col(i).real(), sp.vectors.col(i).imag();
      return Plane{b, expanding};
    };
    const int g = static_cast<int>(planes.size());
    if (c.members.size() == 2) {
      planes.push_back(plane_of(up >= 0 ? up : up_inner, false));
      pairs[ci] = {{g, g}};
    } else {
      if (up < 0 || up_inner < 0) throw Error(ErrorKind::Precondition, "malformed eigenvalue quadruple");
      planes.push_back(plane_of(up, true));
      planes.push_back(plane_of(up_inner, false));
      pairs[ci] = {{g, g + 1}, {g + 1, g}};
    }
  }

  // argument shift: per-letter rotation of each plane, commuting with the monodromy
  const auto moved = transport_planes(a, planes);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::vector<Matrix> b;
  int k = 0;
  for (int K = 1; K <= q_max; ++K) {
    if (negative && K % 2 == 1) continue;
    std::vector<PlaneAction> actions;
    for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
      const double target = two_pi * std::round(K * clusters[ci].phi / two_pi) / K;
      const double shift = (target - clusters[ci].phi) / n;
      Matrix h(2, 2);
      h << std::cos(shift), std::sin(shift), -std::sin(shift), std::cos(shift);
      for (const auto& [g, partner] : pairs[ci]) actions.push_back({g, partner, h});
    }
    auto candidate = actions.empty() ? a : spread_planes(a, moved, actions);
    const double dist = max_letter_change(a, candidate);
    if (dist <= eps / 4) {
      b = std::move(candidate);
      k = K;
      out.rationalize_distance = dist;
      break;
    }
  }
  if (k == 0)
    throw Error(ErrorKind::Rationalization, "no argument-clearing power up to " + std::to_string(q_max) +
                                                " within the perturbation budget");
  out.k = k;

  // symplectic frames of the planes whose eigenvalues became double
  std::vector<Plane> frames;
  struct FrameAction {
    int frame, partner, cluster;
    bool stretch; // exp(s) on the first basis vector
  };
  std::vector<FrameAction> frame_actions;
  for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
    const int f = static_cast<int>(frames.size()), c = static_cast<int>(ci);
    if (pairs[ci].size() == 1) {
      frames.push_back({symplectic_basis(Subspace(planes[static_cast<std::size_t>(pairs[ci][0].first)].basis)), false});
      frame_actions.push_back({f, f, c, true});
    } else {
      const Matrix u = Subspace(planes[static_cast<std::size_t>(pairs[ci][0].first)].basis).basis();
      const Matrix& inner = planes[static_cast<std::size_t>(pairs[ci][1].first)].basis;
      const Matrix g = u.transpose() * standard_j(dim) * inner;
      frames.push_back({u, true});
      frames.push_back({inner * g.inverse(), false});
      frame_actions.push_back({f, f + 1, c, true});
      frame_actions.push_back({f + 1, f, c, false});
    }
  }
  std::vector<Matrix> base;
  for (int rep = 0; rep < k; ++rep) base.insert(base.end(), b.begin(), b.end());
  const auto total = static_cast<double>(base.size());

  auto actions_for = [&](double delta) {
    std::vector<PlaneAction> actions;
    for (const auto& fa : frame_actions) {
      const double s = delta * (1.0 - 0.15 * fa.cluster) / total;
      Matrix h = Matrix::Zero(2, 2);
      if (fa.stretch) h.diagonal() << std::exp(s), std::exp(-s);
      else h.diagonal() << std::exp(-s), std::exp(s);
      actions.push_back({fa.frame, fa.partner, h});
    }
    return actions;
  };

  std::vector<Matrix> final_letters = base;
  if (!frames.empty()) {
    const auto carried = transport_planes(base, frames);
    double delta = 0.999 * eps * total / 4.0;
    bool ok = false;
    for (int attempt = 0; attempt < 60 && delta > 1e-7; ++attempt) {
      auto candidate = spread_planes(base, carried, actions_for(delta));
      const double dist = max_letter_change(base, candidate);
      if (dist <= eps / 4) {
        final_letters = std::move(candidate);
        out.split_distance = dist;
        ok = true;
        break;
      }
      delta *= std::min(0.9, 0.9 * (eps / 4) / dist);
    }
    if (!ok) throw Error(ErrorKind::Rationalization, "double eigenvalues cannot be split within the budget");
    for (std::size_t c = 0; c < clusters.size(); ++c)
      out.split_parameters.push_back(delta * (1.0 - 0.15 * static_cast<double>(c)));
  }

  const Spectrum s1 = split_spectrum(scaled_product(final_letters));
  for (int i = 0; i < size; ++i) {
    if (std::abs(s1.phase(i).imag()) > 1e-9 || s1.phase(i).real() <= 0)
      throw Error(ErrorKind::Precondition, "realified spectrum is not real positive");
    for (int j = i + 1; j < size; ++j)
      if (s1.same(i, j, 1e-9)) throw Error(ErrorKind::Precondition, "realified spectrum is not simple");
  }
  out.word = to_word(final_letters);
  out.distance = word_distance(out.word, w.power(k)).value();
  return out;
}

Word realify_spectrum(const Word& w, double eps) { return realify(w, eps).word; }

namespace {

double sin_angle(const Vector& a, const Vector& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 1.0;
  const double c = std::min(1.0, std::abs(a.dot(b)) / (na * nb));
  return std::sqrt(std::max(0.0, 1.0 - c * c));
}

// Eigenline frame of the realified monodromy: columns u_0..u_{d-1},
// v_0..v_{d-1} with u_i the i-th smallest line and v_i its omega-partner.
struct Frame {
  Matrix p, p_inv;
  std::vector<double> log_lambda; // log|lambda| of u_0..u_{d-1}, v_0..v_{d-1}
  std::vector<int> sign;
};

// Real eigenvector of `a` for the simple real eigenvalue `mu`, polished by
// inverse iteration.
Vector polished_eigenvector(const Matrix& a, double mu, Vector v) {
  const Eigen::Index n = a.rows();
  const double shift = mu * (1.0 + 1e-13) + (mu == 0.0 ? 1e-300 : 0.0);
  const Eigen::PartialPivLU<Matrix> lu(a - shift * Matrix::Identity(n, n));
  v.normalize();
  for (int it = 0; it < 2; ++it) {
    Vector w = lu.solve(v);
    const double nw = w.norm();
    if (!(nw > 0.0) || !std::isfinite(nw)) break;
    w /= nw;
    if (w.dot(v) < 0) w = -w;
    v = w;
  }
  return v;
}

// Each line is read off the matrix in which it expands: the expanding half
// from m1, the contracting half from its symplectic inverse.
Frame eigen_frame(const Matrix& m1) {
  const Eigen::Index n = m1.rows(), d = n / 2;
  const Matrix inv = sym_inverse(m1);
  Eigen::EigenSolver<Matrix> es(m1), esi(inv);
  const CVector lam = es.eigenvalues(), lami = esi.eigenvalues();
  auto descending = [](const CVector& l) {
    std::vector<int> order(static_cast<std::size_t>(l.size()));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return std::abs(l(a)) > std::abs(l(b)); });
    return order;
  };
  const auto top = descending(lam), topi = descending(lami);
  const Matrix j = standard_j(n);
  Frame f;
  f.p = Matrix(n, n);
  f.log_lambda.assign(static_cast<std::size_t>(n), 0.0);
  f.sign.assign(static_cast<std::size_t>(n), 1);
  for (Eigen::Index i = 0; i < d; ++i) {
    const int lo = topi[static_cast<std::size_t>(i)], hi = top[static_cast<std::size_t>(i)];
    const double mu_lo = lami(lo).real(), mu_hi = lam(hi).real();
    Vector u = polished_eigenvector(inv, mu_lo, esi.eigenvectors().col(lo).real());
    Vector v = polished_eigenvector(m1, mu_hi, es.eigenvectors().col(hi).real());
    v /= u.dot(j * v);
    const double bal = std::sqrt(v.norm() / u.norm());
    f.p.col(i) = u * bal;
    f.p.col(d + i) = v / bal;
    f.log_lambda[static_cast<std::size_t>(i)] = -std::log(std::abs(lami(lo)));
    f.log_lambda[static_cast<std::size_t>(d + i)] = std::log(std::abs(lam(hi)));
    f.sign[static_cast<std::size_t>(i)] = mu_lo < 0 ? -1 : 1;
    f.sign[static_cast<std::size_t>(d + i)] = mu_hi < 0 ? -1 : 1;
  }
  f.p_inv = f.p.inverse();
  return f;
}

struct StageOps {
  Matrix l_out, l_in, l_out_inv, l_in_inv;
  int j_out = 0, j_in = 0;
};

class Pipeline {
public:
  Pipeline(const Matrix& m1, const Frame& frame, const Matrix& t)
      : m1_(m1), m1_inv_(sym_inverse(m1)), t_(t), t_inv_(sym_inverse(t)), f_(frame),
        d_(m1.rows() / 2) {
    for (Eigen::Index s = 0; s < d_; ++s) {
      Vector mask = Vector::Zero(2 * d_);
      for (Eigen::Index r = s; r < d_; ++r) mask(r) = mask(d_ + r) = 1.0;
      proj_.push_back(f_.p * mask.asDiagonal() * f_.p_inv);
    }
  }

  std::vector<StageOps> stages;

  Vector u(Eigen::Index s) const { return f_.p.col(s); }
  Vector v(Eigen::Index s) const { return f_.p.col(d_ + s); }
  const Matrix& projector(Eigen::Index s) const { return proj_[static_cast<std::size_t>(s)]; }
  const Matrix& m1() const { return m1_; }
  const Matrix& m1_inv() const { return m1_inv_; }
  const Frame& frame() const { return f_; }

  // N_depth applied to x, normalized; log of the stretch accumulates in `log`.
  Vector apply(std::size_t depth, Vector x, double& log) const {
    if (depth == 0) return normalize(t_ * x, log);
    const StageOps& op = stages[depth - 1];
    const Matrix& pr = projector(static_cast<Eigen::Index>(depth - 1));
    x = normalize(op.l_in * x, log);
    for (int i = 0; i < op.j_in; ++i) x = normalize(pr * (m1_ * x), log);
    x = normalize(pr * apply(depth - 1, x, log), log);
    for (int i = 0; i < op.j_out; ++i) x = normalize(pr * (m1_ * x), log);
    return normalize(op.l_out * x, log);
  }

  Vector apply_inverse(std::size_t depth, Vector x, double& log) const {
    if (depth == 0) return normalize(t_inv_ * x, log);
    const StageOps& op = stages[depth - 1];
    const Matrix& pr = projector(static_cast<Eigen::Index>(depth - 1));
    x = normalize(op.l_out_inv * x, log);
    for (int i = 0; i < op.j_out; ++i) x = normalize(pr * (m1_inv_ * x), log);
    x = normalize(pr * apply_inverse(depth - 1, x, log), log);
    for (int i = 0; i < op.j_in; ++i) x = normalize(pr * (m1_inv_ * x), log);
    return normalize(op.l_in_inv * x, log);
  }

  Vector coords(const Vector& x) const { return f_.p_inv * x; }

private:
  static Vector normalize(const Vector& x, double& log) {
    const double n = x.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw Error(ErrorKind::Numerical, "vector transport broke down");
    log += std::log(n);
    return x / n;
  }

  Matrix m1_, m1_inv_, t_, t_inv_;
  Frame f_;
  Eigen::Index d_;
  std::vector<Matrix> proj_;
};

// I + X with X z = omega(e, z) s + omega(s, z) e, for s omega-orthogonal to e.
Matrix transvection_pair(const Vector& e, const Vector& s) {
  const Matrix j = standard_j(e.size());
  const Vector je = j.transpose() * e; // omega(e, z) = e^T J z = (J^T e) . z
  const Vector js = j.transpose() * s;
  return Matrix::Identity(e.size(), e.size()) + s * je.transpose() + e * js.transpose();
}

// z -> z + c omega(e, z) e
Matrix shear(const Vector& e, double c) {
  const Matrix j = standard_j(e.size());
  return Matrix::Identity(e.size(), e.size()) + c * e * (j.transpose() * e).transpose();
}

struct GenericityFailure {};

} // namespace

namespace {

// Carries the flag spanned by the leading columns of `basis` through `steps`
// (first entry acts first) by continuous QR. Returns the largest sin-angle
// between matching columns of the starting and final orthonormal frames;
// logs and signs of the diagonal of the accumulated triangular factor
// (relative to the starting frame) go to `log_r` and `sign_r`.
double flag_defect(const std::vector<Matrix>& steps, const Matrix& basis, std::vector<double>& log_r,
                   std::vector<int>& sign_r) {
  const Eigen::Index n = basis.cols();
  auto orthonormal = [n](const Matrix& x, Vector* diag) {
    Eigen::HouseholderQR<Matrix> qr(x);
    Matrix q = qr.householderQ() * Matrix::Identity(x.rows(), n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double r = qr.matrixQR()(i, i);
      if (r < 0) q.col(i) = -q.col(i);
      if (diag) (*diag)(i) = std::abs(r);
    }
    return q;
  };
  const Matrix q0 = orthonormal(basis, nullptr);
  Matrix q = q0;
  log_r.assign(static_cast<std::size_t>(n), 0.0);
  Vector diag(n);
  for (const Matrix& m : steps) {
    q = orthonormal(m * q, &diag);
    for (Eigen::Index i = 0; i < n; ++i) log_r[static_cast<std::size_t>(i)] += std::log(diag(i));
  }
  double worst = 0.0;
  sign_r.assign(static_cast<std::size_t>(n), 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double c = std::clamp(q.col(i).dot(q0.col(i)), -1.0, 1.0);
    worst = std::max(worst, std::sqrt(std::max(0.0, 1.0 - c * c)));
    sign_r[static_cast<std::size_t>(i)] = c < 0 ? -1 : 1;
  }
  return worst;
}

} // namespace

// The lines are invariant exactly when both flags they span (strongest first
// under the product, and strongest first under its inverse) are invariant.
double certify_eigenlines(const Word& w, const Matrix& lines, std::vector<double>& exponents,
                          std::vector<int>& signs) {
  const auto n = static_cast<Eigen::Index>(lines.cols());
  const auto tau = static_cast<double>(w.size());
  std::vector<Matrix> fwd, bwd;
  for (std::size_t i = 0; i < w.size(); ++i) {
    fwd.push_back(w.acting(i).matrix());
    bwd.push_back(sym_inverse(w.acting(w.size() - 1 - i).matrix()));
  }
  const Matrix strongest_first = lines.rowwise().reverse();
  std::vector<double> log_f, log_b;
  std::vector<int> sign_f, sign_b;
  const double df = flag_defect(fwd, strongest_first, log_f, sign_f);
  const double db = flag_defect(bwd, lines, log_b, sign_b);
  exponents.clear();
  signs.clear();
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto r = static_cast<std::size_t>(n - 1 - i);
    exponents.push_back(log_f[r] / tau);
    signs.push_back(sign_f[r]);
  }
  return std::max(df, db);
}

Diagonalization diagonalize_with_transition(const PeriodicLinearSystem& system, const std::string& x,
                                            const Transition& self_transition, double eps, std::uint64_t seed) {
  if (!(eps > 0.0)) throw Error(ErrorKind::InvalidInput, "eps must be positive");
  const Word& w = system.word(x);
  const Eigen::Index n2 = system.dim(), d = n2 / 2;
  const Word& t_orig = self_transition.word;
  if (!t_orig.empty() && t_orig.dim() != n2) throw Error(ErrorKind::InvalidDimension, "transition dimension");

  Diagonalization out;
  DiagonalizationReport& rep = out.report;
  {
    const Spectrum sp = split_spectrum(scaled_product(matrices(w)));
    rep.input_top = *std::max_element(sp.log_mod.begin(), sp.log_mod.end()) / static_cast<double>(w.size());
  }
  const Realification real = realify(w, eps);
  rep.k = real.k;
  rep.realify_distance = real.distance;
  const Word& m1w = real.word;
  const Matrix m1 = monodromy(m1w).matrix();
  const Frame frame = eigen_frame(m1);
  const auto m1len = static_cast<double>(m1w.size());
  rep.realified_top = *std::max_element(frame.log_lambda.begin(), frame.log_lambda.end()) / m1len;
  const Matrix& first = m1w[0].matrix();
  const Matrix& last = m1w[m1w.size() - 1].matrix();

  std::vector<Matrix> t_letters = matrices(t_orig);
  for (int attempt = 0;; ++attempt) {
    if (attempt > 0) {
      if (t_letters.empty() || attempt > 20)
        throw Error(ErrorKind::Precondition, "transition violates genericity after the nudge budget");
      // nudge the first transition letter by a small symplectic map
      const Matrix t0 = t_orig[0].matrix();
      double radius = eps / (8.0 * std::max(1.0, spectral_norm(t0)));
      Matrix nudged;
      for (;;) {
        nudged = random_symplectic(static_cast<int>(d), seed * 1315423911ULL + static_cast<std::uint64_t>(attempt), radius)
                     .matrix() * t0;
        if (max_abs(nudged - t0) <= eps / 4) break;
        radius /= 2;
      }
      t_letters[0] = nudged;
      rep.nudges = attempt;
      rep.nudge_distance = max_abs(nudged - t0);
    }
    const Matrix t = t_letters.empty() ? Matrix::Identity(n2, n2) : product(t_letters);
    Pipeline pipe(m1, frame, t);
    rep.stages.clear();
    try {
      for (Eigen::Index s = 0; s < d; ++s) {
        const std::size_t depth = static_cast<std::size_t>(s);
        const Matrix& pr = pipe.projector(s);
        const Vector ea = pipe.u(s), eb = pipe.v(s);
        AlignmentStage stage;
        stage.pair = static_cast<int>(s);
        StageOps op;

        // outgoing side: M_1^j N e_b -> E_b
        double lg = 0.0;
        Vector g = pipe.apply(depth, eb.normalized(), lg);
        g = pr * g;
        {
          const Vector c = pipe.coords(g);
          if (std::abs(c(d + s)) < 1e-8 * c.norm()) throw GenericityFailure{};
        }
        for (int j = 1;; ++j) {
          if (j > alignment_j_max) throw Error(ErrorKind::DominationTooWeak, "outgoing alignment did not converge");
          g = pr * (m1 * g);
          g /= g.norm();
          const Vector c = pipe.coords(g);
          const double cb = c(d + s);
          const double xa = c(s) / cb;
          Vector r = Vector::Zero(n2);
          for (Eigen::Index q = s + 1; q < d; ++q) r += (c(q) * pipe.u(q) + c(d + q) * pipe.v(q)) / cb;
          const Matrix l = shear(ea, -xa) * transvection_pair(ea, -r);
          const double ang = sin_angle(g, eb);
          const double dist = max_abs((l - Matrix::Identity(n2, n2)) * first);
          if (ang < eps / 10 && dist <= eps / 4) {
            op.j_out = j;
            op.l_out = l;
            stage.angle_out = ang;
            stage.distance_out = dist;
            break;
          }
        }

        // incoming side: M_1^{-j} N^{-1} e_a -> E_a
        lg = 0.0;
        Vector h = pr * pipe.apply_inverse(depth, ea.normalized(), lg);
        {
          const Vector c = pipe.coords(h);
          if (std::abs(c(s)) < 1e-8 * c.norm()) throw GenericityFailure{};
        }
        for (int j = 1;; ++j) {
          if (j > alignment_j_max) throw Error(ErrorKind::DominationTooWeak, "incoming alignment did not converge");
          h = pr * (pipe.m1_inv() * h);
          h /= h.norm();
          const Vector c = pipe.coords(h);
          const double ca = c(s);
          const double yb = c(d + s) / ca;
          Vector r = Vector::Zero(n2);
          for (Eigen::Index q = s + 1; q < d; ++q) r += (c(q) * pipe.u(q) + c(d + q) * pipe.v(q)) / ca;
          // K maps h to E_a and fixes e_b; the incoming map is its inverse
          const Matrix k = shear(eb, yb) * transvection_pair(eb, r);
          const Matrix l = sym_inverse(k);
          const double ang = sin_angle(h, ea);
          const double dist = max_abs(last * (l - Matrix::Identity(n2, n2)));
          if (ang < eps / 10 && dist <= eps / 4) {
            op.j_in = j;
            op.l_in = l;
            stage.angle_in = ang;
            stage.distance_in = dist;
            break;
          }
        }
        op.l_out_inv = sym_inverse(op.l_out);
        op.l_in_inv = sym_inverse(op.l_in);
        stage.j_out = op.j_out;
        stage.j_in = op.j_in;
        pipe.stages.push_back(op);

        // the middle block must now be invariant
        double middle = 0.0;
        const Vector ua = ea.normalized(), ub = eb.normalized();
        const Matrix j2 = standard_j(n2);
        for (Eigen::Index q = s + 1; q < d; ++q) {
          double l1 = 0.0, l2 = 0.0;
          const Vector fw = pipe.apply(depth + 1, pipe.v(q).normalized(), l1);
          const Vector bw = pipe.apply_inverse(depth + 1, pipe.u(q).normalized(), l2);
          for (const Vector* z : {&fw, &bw})
            middle = std::max({middle, std::abs(z->dot(j2 * ua)), std::abs(z->dot(j2 * ub))});
        }
        stage.middle_defect = middle;
        rep.stages.push_back(stage);
      }
    } catch (const GenericityFailure&) {
      continue;
    }

    // eigenvalues of the aligned product on each expanding line
    std::vector<double> log_mu(static_cast<std::size_t>(d));
    std::vector<int> sign_mu(static_cast<std::size_t>(d));
    int total_j = 0;
    for (const auto& op : pipe.stages) total_j += op.j_out + op.j_in;
    for (Eigen::Index s = 0; s < d; ++s) {
      double lg = 0.0;
      const Vector e = pipe.v(s).normalized();
      const Vector r = pipe.apply(static_cast<std::size_t>(s) + 1, e, lg);
      int outer_j = 0;
      for (std::size_t q = static_cast<std::size_t>(s) + 1; q < pipe.stages.size(); ++q)
        outer_j += pipe.stages[q].j_out + pipe.stages[q].j_in;
      const auto idx = static_cast<std::size_t>(d + s);
      log_mu[static_cast<std::size_t>(s)] = lg + outer_j * frame.log_lambda[idx];
      int sg = r.dot(e) < 0 ? -1 : 1;
      if (frame.sign[idx] < 0 && outer_j % 2 == 1) sg = -sg;
      sign_mu[static_cast<std::size_t>(s)] = sg;
    }

    // smallest l with the top exponent close to x's and a simple spectrum
    const double tlen = static_cast<double>(t_letters.size());
    int l = 0;
    for (;; ++l) {
      if (l > 100000) throw Error(ErrorKind::ModelTooWeak, "no power l meets the exponent bound");
      const double tau = (l + total_j) * m1len + tlen;
      std::vector<double> ex;
      for (Eigen::Index s = 0; s < d; ++s)
        ex.push_back(std::abs(l * frame.log_lambda[static_cast<std::size_t>(d + s)] + log_mu[static_cast<std::size_t>(s)]));
      std::sort(ex.begin(), ex.end());
      bool simple = ex.front() > 1e-9 * tau;
      for (std::size_t i = 1; i < ex.size(); ++i) simple = simple && ex[i] - ex[i - 1] > 1e-9 * tau;
      if (simple && std::abs(ex.back() / tau - rep.input_top) < eps / 2) break;
    }
    rep.l = l;

    // assemble [M_1]^l [word of N_d]
    std::function<void(std::size_t, std::vector<Matrix>&)> emit = [&](std::size_t depth, std::vector<Matrix>& acc) {
      if (depth == 0) {
        acc.insert(acc.end(), t_letters.begin(), t_letters.end());
        return;
      }
      const StageOps& op = pipe.stages[depth - 1];
      const std::vector<Matrix> copy = matrices(m1w);
      for (int i = 0; i < op.j_out; ++i) {
        for (std::size_t q = 0; q < copy.size(); ++q)
          acc.push_back(i == 0 && q == 0 ? Matrix(op.l_out * copy[q]) : copy[q]);
      }
      emit(depth - 1, acc);
      for (int i = 0; i < op.j_in; ++i) {
        for (std::size_t q = 0; q < copy.size(); ++q)
          acc.push_back(i == op.j_in - 1 && q + 1 == copy.size() ? Matrix(copy[q] * op.l_in) : copy[q]);
      }
    };
    std::vector<Matrix> letters;
    {
      const std::vector<Matrix> copy = matrices(m1w);
      for (int i = 0; i < l; ++i) letters.insert(letters.end(), copy.begin(), copy.end());
    }
    emit(pipe.stages.size(), letters);
    out.word = to_word(letters);
    rep.length = out.word.size();

    // admissible concatenation [w]^{k(l + sum j_out)} [t] [w]^{k sum j_in}
    int jo = 0, ji = 0;
    for (const auto& op : pipe.stages) jo += op.j_out, ji += op.j_in;
    const Word admissible =
        concat(concat(w.power(real.k * (l + jo)), t_orig), ji > 0 ? w.power(real.k * ji) : Word());
    rep.admissible_distance = word_distance(out.word, admissible).value();

    // eigenline frame sorted by increasing modulus
    out.eigenlines = Matrix(n2, n2);
    for (Eigen::Index s = 0; s < d; ++s) {
      out.eigenlines.col(s) = frame.p.col(s);
      out.eigenlines.col(n2 - 1 - s) = frame.p.col(d + s);
    }
    std::vector<int> signs;
    rep.line_defect = certify_eigenlines(out.word, out.eigenlines, rep.output_exponents, signs);
    std::vector<double> sorted = rep.output_exponents;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    rep.simple_real = true;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (std::abs(sorted[i]) <= 1e-12) rep.simple_real = false;
      if (i > 0 && sorted[i - 1] - sorted[i] <= 1e-12) rep.simple_real = false;
    }
    rep.positive = std::all_of(signs.begin(), signs.end(), [](int s) { return s > 0; });
    rep.output_exponents = sorted;
    rep.output_top = sorted.front();
    return out;
  }
}

} // namespace symplab
