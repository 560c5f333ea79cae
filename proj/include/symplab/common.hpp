#pragma once

#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace symplab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

// Global numeric tolerances. The underlying mathematics is exact; these are
// the cut-offs used to decide the discrete questions numerically.
namespace tol {
inline constexpr double sympl = 1e-9;      // construction-time defect bound
inline constexpr double round_trip = 1e-8; // restriction / round-trip checks
inline constexpr double unit = 1e-6;       // unit-circle membership
inline constexpr double simple = 1e-6;     // eigenvalue separation
inline constexpr double eig = 1e-7;        // spectral symmetry
inline constexpr double orth = 1e-10;      // orthonormal bases
} // namespace tol

enum class ErrorKind {
  InvalidDimension,
  InvalidInput,
  Precondition,
  GraphDegeneracy,
  DegenerateRestriction,
  Numerical,
  NoGap,
  NotHyperbolic,
  NotAPower,
  MissingTransition,
  Rationalization,
  DominationTooWeak,
  Geometry,
  ModelTooWeak,
  Config,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

// Nonnegative real extended by +infinity. Serialized as the string "inf"
// rather than a float infinity.
class Extended {
public:
  constexpr Extended() = default;
  constexpr explicit Extended(double v) : value_(v) {}
  static constexpr Extended infinity() {
    Extended e;
    e.infinite_ = true;
    return e;
  }

  constexpr bool is_infinite() const { return infinite_; }
  constexpr double value() const {
    return infinite_ ? std::numeric_limits<double>::infinity() : value_;
  }
  std::string str() const;

  friend constexpr bool operator==(const Extended& a, const Extended& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }

private:
  double value_ = 0.0;
  bool infinite_ = false;
};

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

} // namespace symplab
