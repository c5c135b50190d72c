#pragma once
// Small dense-vector helpers over flat double buffers. State dimension is a
// runtime parameter (d = 2 or 3 in practice); hot loops work on preallocated
// std::vector<double> and never allocate per step.
#include <cmath>
#include <cstddef>
#include <vector>

namespace skewflow {

using Vec = std::vector<double>;

inline double dot(const double* a, const double* b, size_t d) {
  double s = 0.0;
  for (size_t i = 0; i < d; ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const double* a, size_t d) { return dot(a, a, d); }
inline double norm(const double* a, size_t d) { return std::sqrt(norm2(a, d)); }

inline double dot(const Vec& a, const Vec& b) { return dot(a.data(), b.data(), a.size()); }
inline double norm2(const Vec& a) { return norm2(a.data(), a.size()); }
inline double norm(const Vec& a) { return norm(a.data(), a.size()); }

inline double dist2(const double* a, const double* b, size_t d) {
  double s = 0.0;
  for (size_t i = 0; i < d; ++i) {
    const double t = a[i] - b[i];
    s += t * t;
  }
  return s;
}
inline double dist(const double* a, const double* b, size_t d) {
  return std::sqrt(dist2(a, b, d));
}
inline double dist(const Vec& a, const Vec& b) { return dist(a.data(), b.data(), a.size()); }

inline Vec axpy(double c, const Vec& x, const Vec& y) {  // c*x + y
  Vec r(x.size());
  for (size_t i = 0; i < x.size(); ++i) r[i] = c * x[i] + y[i];
  return r;
}

inline bool all_finite(const double* a, size_t d) {
  for (size_t i = 0; i < d; ++i)
    if (!std::isfinite(a[i])) return false;
  return true;
}

}  // namespace skewflow
