#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace subdiff {

// Neumaier's variant of Kahan summation. Deterministic for a fixed input
// order, which is what the ensemble reductions rely on.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }

  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) noexcept {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

// Mean and standard error of the mean, both accumulated with compensation.
struct SampleMoments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double std_error = 0.0;
  std::size_t count = 0;
};

inline SampleMoments sample_moments(std::span<const double> xs) noexcept {
  SampleMoments m;
  m.count = xs.size();
  if (xs.empty()) return m;
  m.mean = compensated_sum(xs) / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    CompensatedSum sq;
    for (double x : xs) sq.add((x - m.mean) * (x - m.mean));
    m.variance = sq.value() / static_cast<double>(xs.size() - 1);
    m.std_error = std::sqrt(m.variance / static_cast<double>(xs.size()));
  }
  return m;
}

}  // namespace subdiff
