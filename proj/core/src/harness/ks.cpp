#include <algorithm>
#include <cmath>
#include <numbers>

#include "subdiff/errors.hpp"
#include "subdiff/harness/ks.hpp"
#include "subdiff/summation.hpp"

namespace subdiff::harness {

double ks_distance(std::span<const double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw PreconditionError("ks_distance: empty sample");
  std::vector<double> xs(sample.begin(), sample.end());
  std::sort(xs.begin(), xs.end());
  const auto n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    const double below = static_cast<double>(i) / n;
    const double above = static_cast<double>(i + 1) / n;
    d = std::max({d, above - f, f - below});
  }
  return std::clamp(d, 0.0, 1.0);
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw PreconditionError("ks_two_sample: empty sample");
  std::vector<double> xa(a.begin(), a.end());
  std::vector<double> xb(b.begin(), b.end());
  std::sort(xa.begin(), xa.end());
  std::sort(xb.begin(), xb.end());
  const auto na = static_cast<double>(xa.size());
  const auto nb = static_cast<double>(xb.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < xa.size() && j < xb.size()) {
    const double x = std::min(xa[i], xb[j]);
    while (i < xa.size() && xa[i] == x) ++i;
    while (j < xb.size() && xb[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

KernelDensity kernel_density(std::span<const double> sample, const fracpde::SpaceGrid& grid,
                             double bandwidth) {
  if (sample.empty()) throw PreconditionError("kernel_density: empty sample");
  const auto stats = sample_moments(sample);
  if (bandwidth <= 0.0)
    bandwidth = std::pow(static_cast<double>(sample.size()), -0.2) * std::sqrt(stats.variance);
  if (!(bandwidth > 0.0)) throw DomainError("kernel_density: degenerate sample");

  const std::size_t m = grid.points;
  std::vector<double> counts(m, 0.0);
  for (double x : sample) counts[grid.nearest(x)] += 1.0;

  const double period = 2.0 * grid.half_width;
  const double norm = 1.0 / (static_cast<double>(sample.size()) * bandwidth *
                             std::sqrt(2.0 * std::numbers::pi));
  // kernel as a function of the periodic index offset
  std::vector<double> kernel(m);
  for (std::size_t k = 0; k < m; ++k) {
    double off = static_cast<double>(k) * grid.dx();
    if (off > 0.5 * period) off -= period;
    kernel[k] = std::exp(-0.5 * (off / bandwidth) * (off / bandwidth));
  }
  KernelDensity out{bandwidth, std::vector<double>(m, 0.0)};
  for (std::size_t i = 0; i < m; ++i) {
    CompensatedSum acc;
    for (std::size_t j = 0; j < m; ++j)
      if (counts[j] != 0.0) acc += counts[j] * kernel[(i + m - j) % m];
    out.density[i] = acc.value() * norm;
  }
  return out;
}

}  // namespace subdiff::harness
