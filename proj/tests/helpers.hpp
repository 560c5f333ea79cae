#pragma once

#include "symplab/common.hpp"

namespace testing_helpers {

inline symplab::Matrix m2(double a, double b, double c, double d) {
  symplab::Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

inline symplab::Matrix diag(std::initializer_list<double> v) {
  symplab::Vector d(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) d(i++) = x;
  return d.asDiagonal();
}

inline bool throws_kind(auto&& fn, symplab::ErrorKind kind) {
  try {
    fn();
  } catch (const symplab::Error& e) {
    return e.kind() == kind;
  }
  return false;
}

} // namespace testing_helpers
