#include "subdiff/sde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "subdiff/errors.hpp"
#include "subdiff/parallel.hpp"
#include "subdiff/summation.hpp"

namespace subdiff::sde {
namespace {

void check_t_grid(std::span<const double> t_grid) {
  if (t_grid.empty()) throw PreconditionError("time grid must not be empty");
  for (double t : t_grid) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
      throw DomainError("time grid values must be finite and nonnegative");
    }
  }
}

subordination::SubordinatorPath sample_clock(const subordination::MixtureSpec& spec,
                                             double t_max, const SimulationOptions& options,
                                             std::size_t path, PathStreams& streams) {
  if (options.clock_override) return options.clock_override(path, t_max);
  // A zero horizon still needs one step so that E_0 is defined.
  return subordination::sample_mixture_path(spec, options.delta,
                                            std::max(t_max, std::numeric_limits<double>::min()),
                                            streams.clock, options.max_steps);
}

}  // namespace

SDECoefficients SDECoefficients::brownian(double sigma) {
  SDECoefficients c;
  c.diffusion = [sigma](double) { return sigma; };
  c.lipschitz_bound = 0.0;
  return c;
}

SDECoefficients SDECoefficients::ornstein_uhlenbeck(double theta, double sigma) {
  SDECoefficients c;
  c.drift = [theta](double y) { return -theta * y; };
  c.diffusion = [sigma](double) { return sigma; };
  c.lipschitz_bound = std::abs(theta);
  return c;
}

SDECoefficients SDECoefficients::pure_jump(double g) {
  SDECoefficients c;
  c.jump = [g](double) { return g; };
  c.lipschitz_bound = 0.0;
  return c;
}

void SDECoefficients::check_lipschitz(rng::RandomStream& stream, int pairs, double radius) const {
  if (!lipschitz_bound) return;
  const double l2 = *lipschitz_bound * *lipschitz_bound;
  auto eval = [](const ScalarFunction& f, double y) { return f ? f(y) : 0.0; };
  for (int i = 0; i < pairs; ++i) {
    const double y1 = radius * (2.0 * stream.uniform() - 1.0);
    const double y2 = radius * (2.0 * stream.uniform() - 1.0);
    const double db = eval(drift, y1) - eval(drift, y2);
    const double ds = eval(diffusion, y1) - eval(diffusion, y2);
    const double lhs = db * db + ds * ds;
    const double rhs = l2 * (y1 - y2) * (y1 - y2);
    if (lhs > rhs * (1.0 + 1e-12) + 1e-300) {
      throw DomainError("SDECoefficients: Lipschitz bound violated near y = " +
                        std::to_string(y1));
    }
  }
}

std::vector<double> euler_maruyama(const SDECoefficients& coeffs,
                                   const levy::LevyTriplet& triplet, double x0, TauGrid grid,
                                   rng::RandomStream& noise) {
  if (!(grid.delta > 0.0)) throw DomainError("euler_maruyama: delta must be positive");
  const double delta = grid.delta;
  const double sqrt_delta = std::sqrt(delta);
  const bool use_jump = static_cast<bool>(coeffs.jump) && !triplet.is_trivial();

  std::vector<double> y(grid.steps + 1);
  y[0] = x0;
  for (std::size_t j = 0; j < grid.steps; ++j) {
    const double yj = y[j];
    double next = yj;
    if (coeffs.drift) next += coeffs.drift(yj) * delta;
    if (coeffs.diffusion) next += coeffs.diffusion(yj) * sqrt_delta * noise.normal();
    if (use_jump) next += coeffs.jump(yj) * levy::sample_levy_increment(triplet, delta, noise);
    if (!std::isfinite(next)) {
      throw SimulationError("euler_maruyama: non-finite state", j + 1);
    }
    y[j + 1] = next;
  }
  return y;
}

double TimeChangedPath::value_at(double time) const {
  subordination::SubordinatorPath clock{delta, d};
  return y[subordination::first_passage_index(clock, time)];
}

TimeChangedPath time_change_path(std::span<const double> y,
                                 const subordination::SubordinatorPath& d,
                                 std::span<const double> t_grid) {
  check_t_grid(t_grid);
  if (y.size() != d.values.size()) {
    throw PreconditionError("time_change_path: Y and D must share the operational grid");
  }
  TimeChangedPath out;
  out.delta = d.delta;
  out.t.assign(t_grid.begin(), t_grid.end());
  out.x.reserve(t_grid.size());
  out.tau_index.reserve(t_grid.size());
  for (double t : t_grid) {
    const std::size_t j = subordination::first_passage_index(d, t);
    out.tau_index.push_back(j);
    out.x.push_back(y[j]);
  }
  out.y.assign(y.begin(), y.end());
  out.d = d.values;
  return out;
}

PathStreams PathStreams::for_path(const subordination::MixtureSpec& spec, std::uint64_t seed,
                                  std::uint64_t path_index) {
  return PathStreams{
      rng::RandomStream(seed, {static_cast<std::uint64_t>(rng::StreamRole::kDriver), path_index}),
      subordination::component_streams(spec, seed, path_index)};
}

void PathStreams::validate() const {
  for (std::size_t k = 0; k < clock.size(); ++k) {
    if (clock[k] == driver) {
      throw PreconditionError("PathStreams: driver and clock streams must be independent");
    }
    for (std::size_t l = k + 1; l < clock.size(); ++l) {
      if (clock[k] == clock[l]) {
        throw PreconditionError("PathStreams: clock components must use distinct streams");
      }
    }
  }
}

TimeChangedPath simulate_time_changed_path(const SDECoefficients& coeffs,
                                           const levy::LevyTriplet& triplet,
                                           const subordination::MixtureSpec& spec, double x0,
                                           std::span<const double> t_grid,
                                           const SimulationOptions& options,
                                           PathStreams& streams) {
  check_t_grid(t_grid);
  streams.validate();
  const double t_max = *std::max_element(t_grid.begin(), t_grid.end());
  const auto clock = sample_clock(spec, t_max, options, 0, streams);
  const auto y = euler_maruyama(coeffs, triplet, x0, TauGrid{clock.delta, clock.steps()},
                                streams.driver);
  return time_change_path(y, clock, t_grid);
}

std::vector<double> Ensemble::marginal(std::size_t i) const {
  std::vector<double> out(n_paths);
  for (std::size_t p = 0; p < n_paths; ++p) out[p] = at(p, i);
  return out;
}

Ensemble simulate_time_changed_sde(const SDECoefficients& coeffs,
                                   const levy::LevyTriplet& triplet,
                                   const subordination::MixtureSpec& spec, double x0,
                                   std::span<const double> t_grid, std::size_t n_paths,
                                   std::uint64_t seed, const SimulationOptions& options) {
  check_t_grid(t_grid);
  if (n_paths == 0) throw PreconditionError("simulate_time_changed_sde: n_paths must be >= 1");
  const double t_max = *std::max_element(t_grid.begin(), t_grid.end());
  const std::size_t nt = t_grid.size();

  Ensemble ens;
  ens.t_grid.assign(t_grid.begin(), t_grid.end());
  ens.n_paths = n_paths;
  ens.values.assign(n_paths * nt, 0.0);

  parallel_for(n_paths, options.workers, [&](std::size_t p) {
    auto streams = PathStreams::for_path(spec, seed, p);
    streams.validate();
    const auto clock = sample_clock(spec, t_max, options, p, streams);
    const auto y = euler_maruyama(coeffs, triplet, x0, TauGrid{clock.delta, clock.steps()},
                                  streams.driver);
    for (std::size_t i = 0; i < nt; ++i) {
      ens.values[p * nt + i] = y[subordination::first_passage_index(clock, t_grid[i])];
    }
  });
  return ens;
}

Estimate feynman_kac_estimate(const SDECoefficients& coeffs, const levy::LevyTriplet& triplet,
                              const subordination::MixtureSpec& spec, const ScalarFunction& q,
                              const ScalarFunction& phi, double x0, double t,
                              std::size_t n_paths, std::uint64_t seed,
                              const SimulationOptions& options) {
  if (!(t >= 0.0)) throw DomainError("feynman_kac_estimate: t must be nonnegative");
  if (n_paths == 0) throw PreconditionError("feynman_kac_estimate: n_paths must be >= 1");
  if (!phi) throw PreconditionError("feynman_kac_estimate: phi is required");

  std::vector<double> samples(n_paths);
  parallel_for(n_paths, options.workers, [&](std::size_t p) {
    auto streams = PathStreams::for_path(spec, seed, p);
    streams.validate();
    const auto clock = sample_clock(spec, t, options, p, streams);
    const std::size_t j_t = subordination::first_passage_index(clock, t);
    const auto y = euler_maruyama(coeffs, triplet, x0, TauGrid{clock.delta, clock.steps()},
                                  streams.driver);
    double weight = 1.0;
    if (q) {
      CompensatedSum integral;
      for (std::size_t j = 0; j < j_t; ++j) {
        const double rate = q(y[j]);
        if (rate < 0.0) throw DomainError("feynman_kac_estimate: q must be nonnegative");
        integral.add(rate);
      }
      weight = std::exp(-clock.delta * integral.value());
    }
    samples[p] = weight * phi(y[j_t]);
  });
  const auto m = sample_moments(samples);
  return Estimate{m.mean, m.std_error, n_paths};
}

}  // namespace subdiff::sde
