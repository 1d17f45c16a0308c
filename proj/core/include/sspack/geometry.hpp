#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <vector>

namespace sspack {

// Vectors and matrices are dynamically sized but capped, so they never touch
// the heap. This keeps cylinder-tree traversal allocation free.
inline constexpr int kMaxDim = 4;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;

// Relative inflation applied to every certified interval endpoint.
inline constexpr double kCertifiedInflation = 1e-12;

// Geometric rounding allowance, relative to the ambient coordinate scale.
inline constexpr double kGeometricSlack = 5e-14;

inline Vec make_vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

inline Vec scalar_vec(double x) {
  Vec v(1);
  v(0) = x;
  return v;
}

struct Ball {
  Vec center;
  double radius = 0.0;

  int dim() const { return static_cast<int>(center.size()); }
  bool contains(const Vec& x) const { return (x - center).norm() <= radius; }
  // True when this ball lies inside other (closed balls, exact arithmetic).
  bool inside(const Ball& other, double slack = 0.0) const {
    return (center - other.center).norm() + radius <= other.radius + slack;
  }
};

struct Box {
  Vec lo;
  Vec hi;

  int dim() const { return static_cast<int>(lo.size()); }
  double diameter() const { return (hi - lo).norm(); }
  Vec center() const { return 0.5 * (lo + hi); }
  Vec half_extent() const { return 0.5 * (hi - lo); }

  bool contains(const Vec& x, double tol = 0.0) const {
    for (Eigen::Index k = 0; k < lo.size(); ++k) {
      if (x(k) < lo(k) - tol || x(k) > hi(k) + tol) return false;
    }
    return true;
  }

  // All 2^d corners, in binary-counter order.
  std::vector<Vec> corners() const {
    const int d = dim();
    std::vector<Vec> out;
    out.reserve(std::size_t{1} << d);
    for (unsigned mask = 0; mask < (1u << d); ++mask) {
      Vec c(d);
      for (int k = 0; k < d; ++k) c(k) = (mask >> k) & 1u ? hi(k) : lo(k);
      out.push_back(c);
    }
    return out;
  }
};

// Neumaier compensated summation; keeps long sums of cylinder weights honest.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double inflate_down(double x) { return x > 0 ? x * (1.0 - kCertifiedInflation) : x * (1.0 + kCertifiedInflation); }
inline double inflate_up(double x) { return x > 0 ? x * (1.0 + kCertifiedInflation) : x * (1.0 - kCertifiedInflation); }

}  // namespace sspack
