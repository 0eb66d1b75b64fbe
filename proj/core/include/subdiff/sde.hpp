#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "subdiff/levy.hpp"
#include "subdiff/rng.hpp"
#include "subdiff/subordination.hpp"

namespace subdiff::sde {

using ScalarFunction = std::function<double(double)>;

// Autonomous coefficients of dY = b(Y-) dtau + sigma(Y-) dB + g(Y-) dL.
// An empty function means the coefficient is identically zero; the Euler
// step then consumes no random numbers for that term.
struct SDECoefficients {
  ScalarFunction drift;
  ScalarFunction diffusion;
  ScalarFunction jump;
  std::optional<double> lipschitz_bound;

  static SDECoefficients zero() { return {}; }
  static SDECoefficients brownian(double sigma = 1.0);
  static SDECoefficients ornstein_uhlenbeck(double theta, double sigma);
  static SDECoefficients pure_jump(double g = 1.0);

  // Spot-checks |b(y1)-b(y2)|^2 + |sigma(y1)-sigma(y2)|^2 <= L^2 |y1-y2|^2 on
  // random pairs in [-radius, radius]; throws DomainError on violation.
  void check_lipschitz(rng::RandomStream& stream, int pairs = 256, double radius = 10.0) const;
};

struct TauGrid {
  double delta;
  std::size_t steps;
};

// Explicit Euler-Maruyama on the operational-time grid:
//   Y_{j+1} = Y_j + b(Y_j) delta + sigma(Y_j) dB_j + g(Y_j) dL_j.
// Throws SimulationError if a state becomes non-finite.
std::vector<double> euler_maruyama(const SDECoefficients& coeffs,
                                   const levy::LevyTriplet& triplet, double x0, TauGrid grid,
                                   rng::RandomStream& noise);

// X_t = Y_{E_t} sampled on a physical time grid, with the operational path
// that produced it.
struct TimeChangedPath {
  std::vector<double> t;
  std::vector<double> x;
  std::vector<std::size_t> tau_index;  // E_{t_i} = delta * tau_index[i]
  double delta = 0.0;
  std::vector<double> y;
  std::vector<double> d;

  // X at an arbitrary t inside the simulated range.
  double value_at(double time) const;
};

TimeChangedPath time_change_path(std::span<const double> y,
                                 const subordination::SubordinatorPath& d,
                                 std::span<const double> t_grid);

// Random streams for one path. The driver stream feeds Y, the clock streams
// feed the subordinator components; they must all be distinct.
struct PathStreams {
  rng::RandomStream driver;
  std::vector<rng::RandomStream> clock;

  static PathStreams for_path(const subordination::MixtureSpec& spec, std::uint64_t seed,
                              std::uint64_t path_index);
  void validate() const;
};

struct SimulationOptions {
  double delta = 1e-3;
  unsigned workers = 1;
  std::size_t max_steps = subordination::kDefaultMaxPathSteps;
  // Test hook: replaces the sampled subordinator for path p.
  std::function<subordination::SubordinatorPath(std::size_t path, double t_max)> clock_override;
};

TimeChangedPath simulate_time_changed_path(const SDECoefficients& coeffs,
                                           const levy::LevyTriplet& triplet,
                                           const subordination::MixtureSpec& spec, double x0,
                                           std::span<const double> t_grid,
                                           const SimulationOptions& options,
                                           PathStreams& streams);

// Path-major table of X_{t_i} for n_paths independent paths.
struct Ensemble {
  std::vector<double> t_grid;
  std::size_t n_paths = 0;
  std::vector<double> values;

  double at(std::size_t path, std::size_t i) const { return values[path * t_grid.size() + i]; }
  std::vector<double> marginal(std::size_t i) const;
};

Ensemble simulate_time_changed_sde(const SDECoefficients& coeffs,
                                   const levy::LevyTriplet& triplet,
                                   const subordination::MixtureSpec& spec, double x0,
                                   std::span<const double> t_grid, std::size_t n_paths,
                                   std::uint64_t seed, const SimulationOptions& options = {});

struct Estimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t n_paths = 0;
};

// Monte Carlo mean of exp(-delta * sum_{j < J} q(Y_j)) phi(Y_J), J delta = E_t.
Estimate feynman_kac_estimate(const SDECoefficients& coeffs, const levy::LevyTriplet& triplet,
                              const subordination::MixtureSpec& spec, const ScalarFunction& q,
                              const ScalarFunction& phi, double x0, double t,
                              std::size_t n_paths, std::uint64_t seed,
                              const SimulationOptions& options = {});

}  // namespace subdiff::sde
