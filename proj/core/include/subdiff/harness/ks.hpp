#pragma once

#include <functional>
#include <span>
#include <vector>

#include "subdiff/fracpde.hpp"

namespace subdiff::harness {

// sup_x |F_n(x) - cdf(x)|, checking both one-sided limits at every sample
// point. Throws PreconditionError on an empty sample.
double ks_distance(std::span<const double> sample, const std::function<double(double)>& cdf);

double ks_two_sample(std::span<const double> a, std::span<const double> b);

// Gaussian kernel density estimate on the grid nodes, computed from a
// histogram on the grid cells. bandwidth <= 0 selects n^{-1/5} * sample std.
struct KernelDensity {
  double bandwidth;
  std::vector<double> density;
};
KernelDensity kernel_density(std::span<const double> sample, const fracpde::SpaceGrid& grid,
                             double bandwidth = 0.0);

}  // namespace subdiff::harness
