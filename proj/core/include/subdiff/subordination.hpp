#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "subdiff/rng.hpp"
#include "subdiff/specfun.hpp"

namespace subdiff::subordination {

using specfun::StableIndex;

struct MixtureAtom {
  double scale;  // c_k > 0
  StableIndex index;

  friend bool operator==(const MixtureAtom&, const MixtureAtom&) = default;
};

// D_t = sum_k c_k D_{k,t} with independent standard stable subordinators
// D_{k,t} of index beta_k. Duplicate indices are kept as separate atoms.
class MixtureSpec {
 public:
  explicit MixtureSpec(std::vector<MixtureAtom> atoms);

  static MixtureSpec single(double beta, double scale = 1.0);

  const std::vector<MixtureAtom>& atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  double min_index() const noexcept;
  double max_index() const noexcept;

  friend bool operator==(const MixtureSpec&, const MixtureSpec&) = default;

 private:
  std::vector<MixtureAtom> atoms_;
};

// Monotone path D_0 = 0, D_delta, D_{2 delta}, ... on a uniform
// operational-time grid.
struct SubordinatorPath {
  double delta = 0.0;
  std::vector<double> values;

  std::size_t steps() const noexcept { return values.empty() ? 0 : values.size() - 1; }
  double back() const { return values.back(); }
};

inline constexpr std::size_t kDefaultMaxPathSteps = 100'000'000;

// delta^{1/beta} * S with S ~ D_1 (Kanter's representation).
double sample_stable_increment(StableIndex beta, double delta, rng::RandomStream& stream);

// Streams for one path: one per mixture component, in atom order.
std::vector<rng::RandomStream> component_streams(const MixtureSpec& spec, std::uint64_t seed,
                                                 std::uint64_t path_index);

// Extends the path until the first grid value strictly exceeding t_max.
SubordinatorPath sample_mixture_path(const MixtureSpec& spec, double delta, double t_max,
                                     std::span<rng::RandomStream> streams,
                                     std::size_t max_steps = kDefaultMaxPathSteps);

// Grid index of the first value strictly exceeding t; E_t = delta * index.
std::size_t first_passage_index(const SubordinatorPath& path, double t);

// E_t = inf{tau : D_tau > t}, resolved to the grid (overestimates by < delta).
double inverse_process(const SubordinatorPath& path, double t);

// ln E[exp(-s D_1)] = -sum_k c_k^{beta_k} s^{beta_k}.
double mixture_laplace_exponent(const MixtureSpec& spec, double s);

// P(D_tau <= t) for N <= 2 components; equals P(E_t > tau).
double mixture_cdf(const MixtureSpec& spec, double tau, double t);

// P(E_t <= tau).
double inverse_cdf(const MixtureSpec& spec, double t, double tau);

// Density of E_t at tau for N <= 2. N = 1 uses the closed-form derivative of
// the one-component distribution; N = 2 differentiates the convolution
// numerically. At tau = 0 both return the Levy tail sum_k (c_k/t)^b_k /
// Gamma(1 - b_k). Throws UnsupportedError for N > 2.
double inverse_density(const MixtureSpec& spec, double t, double tau);

// E[E_t]. One component: (t/c)^beta / Gamma(1 + beta); two components:
// int_0^inf P(D_tau <= t) dtau by adaptive quadrature.
double inverse_mean(const MixtureSpec& spec, double t);

// E[exp(-s E_t)]. One component: E_beta(-s (t/c)^beta); two components:
// 1 - s int_0^inf exp(-s tau) P(D_tau <= t) dtau.
double inverse_laplace(const MixtureSpec& spec, double t, double s);

// Smallest tau on a doubling ladder from tau0 with P(E_t > tau) <= tail.
double inverse_tail_horizon(const MixtureSpec& spec, double t, double tail, double tau0 = 1.0);

}  // namespace subdiff::subordination
