#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace subdiff::fracpde::detail {

// Real periodic transform pair of fixed length with its own buffers. Plan
// creation and destruction are serialized; execution is reentrant per object.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const noexcept { return n_; }
  std::size_t modes() const noexcept { return n_ / 2 + 1; }

  // out = F^{-1}[ multiplier(k) * F[in] ], multiplier indexed by mode k.
  void apply_multiplier(std::span<const double> in, std::span<const double> multiplier,
                        std::span<double> out);

 private:
  std::size_t n_;
  double* real_;
  void* spec_;
  void* forward_;
  void* backward_;
};

// |xi_k|^alpha for modes k = 0..n/2 of a period-2L grid.
std::vector<double> abs_frequency_power(std::size_t n, double half_width, double alpha);

}  // namespace subdiff::fracpde::detail
