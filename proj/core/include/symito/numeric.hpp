#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace symito {

/// Compensated (Kahan) accumulator. Used for all path-functional sums so
/// that results stay seed-order independent to ~1e-15 and the exactness
/// contracts (bookkeeping identities at <= 1e-12) hold on long grids.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - carry_;
    const double t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  KahanSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_; }
  void reset() { sum_ = 0.0, carry_ = 0.0; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

/// Sample mean / standard error / extremes of a batch of scalars.
struct SummaryStats {
  std::size_t n = 0;
  double mean = 0.0;
  double se = 0.0;       // standard error of the mean
  double sd = 0.0;       // sample standard deviation
  double max_abs = 0.0;
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
};

inline SummaryStats summarize(std::span<const double> xs) {
  SummaryStats s;
  s.n = xs.size();
  if (xs.empty()) return s;
  KahanSum sum;
  for (double x : xs) {
    sum.add(x);
    s.max_abs = std::max(s.max_abs, std::abs(x));
    s.min = std::min(s.min, x);
    s.max = std::max(s.max, x);
  }
  s.mean = sum.value() / static_cast<double>(s.n);
  if (s.n > 1) {
    KahanSum ss;
    for (double x : xs) {
      const double d = x - s.mean;
      ss.add(d * d);
    }
    s.sd = std::sqrt(ss.value() / static_cast<double>(s.n - 1));
    s.se = s.sd / std::sqrt(static_cast<double>(s.n));
  }
  return s;
}

inline double sum_kahan(std::span<const double> xs) {
  KahanSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

constexpr double kPi = 3.14159265358979323846;

}  // namespace symito
