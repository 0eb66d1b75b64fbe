#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "subdiff/subordination.hpp"

namespace subdiff::fracpde {

using ScalarFunction = std::function<double(double)>;

// ---------------------------------------------------------------------------
// Distributed-order operator sum_k C_k D_*^{beta_k}

struct OrderAtom {
  double weight;  // C_k > 0
  double beta;    // in (0, 1)

  friend bool operator==(const OrderAtom&, const OrderAtom&) = default;
};

class DistributedOrder {
 public:
  explicit DistributedOrder(std::vector<OrderAtom> atoms);

  static DistributedOrder single(double beta, double weight = 1.0);
  // C_k = c_k^{beta_k}: the operator whose solutions are driven by the
  // inverse of the mixture.
  static DistributedOrder from_mixture(const subordination::MixtureSpec& spec);
  // Gauss-Legendre discretization of int_lo^hi D^beta (.) density(beta) dbeta.
  static DistributedOrder from_density(const ScalarFunction& density, double lo, double hi,
                                       int nodes = 16);

  const std::vector<OrderAtom>& atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }

  friend bool operator==(const DistributedOrder&, const DistributedOrder&) = default;

 private:
  std::vector<OrderAtom> atoms_;
};

// ---------------------------------------------------------------------------
// Grids and fields

struct TimeGrid {
  double step;
  std::size_t steps;  // nodes t_0 = 0, ..., t_steps

  double t(std::size_t n) const noexcept { return step * static_cast<double>(n); }
  double end() const noexcept { return t(steps); }
  std::size_t nodes() const noexcept { return steps + 1; }
};

// Periodic grid x_m = -L + m dx, m = 0..points-1, dx = 2L / points.
struct SpaceGrid {
  double half_width;
  std::size_t points;

  double dx() const noexcept { return 2.0 * half_width / static_cast<double>(points); }
  double x(std::size_t m) const noexcept { return -half_width + dx() * static_cast<double>(m); }
  std::vector<double> nodes() const;
  // Nearest grid index to x (wrapped into the period).
  std::size_t nearest(double x) const noexcept;
};

SpaceGrid make_space_grid(double half_width, double dx);

// u[n][m] on a time x space tensor grid, stored slice by slice.
class FieldOnGrid {
 public:
  FieldOnGrid(TimeGrid time, SpaceGrid space);

  const TimeGrid& time() const noexcept { return time_; }
  const SpaceGrid& space() const noexcept { return space_; }

  std::span<double> slice(std::size_t n);
  std::span<const double> slice(std::size_t n) const;
  double& at(std::size_t n, std::size_t m) { return values_[n * space_.points + m]; }
  double at(std::size_t n, std::size_t m) const { return values_[n * space_.points + m]; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::vector<double>& values() noexcept { return values_; }

  // sum_m u[n][m] dx.
  double mass(std::size_t n) const;
  // Throws DomainError if any value is below -negativity_tol or any slice's
  // mass is off 1 by more than mass_tol.
  void check_density(double negativity_tol = 1e-8, double mass_tol = 1e-4) const;
  // Slice with undershoots in [-negativity_tol, 0) clamped to zero; for
  // reporting only, the stored field is never modified.
  std::vector<double> reported_slice(std::size_t n, double negativity_tol = 1e-8) const;

 private:
  TimeGrid time_;
  SpaceGrid space_;
  std::vector<double> values_;
};

// Piecewise-linear CDF of a density slice (constant density per cell
// [x_m - dx/2, x_m + dx/2]), normalized by the slice mass.
class SliceCdf {
 public:
  SliceCdf(const SpaceGrid& grid, std::span<const double> density);
  double operator()(double x) const;

 private:
  double left_;
  double dx_;
  std::vector<double> edges_;  // cumulative mass at cell edges
};

// Discrete delta: 1/dx at the node nearest x0.
std::vector<double> discrete_delta(const SpaceGrid& grid, double x0 = 0.0);

// ---------------------------------------------------------------------------
// Fractional calculus on uniform time grids

// J^beta g at every node; product integration, exact for piecewise-linear g.
std::vector<double> fractional_integral(std::span<const double> g, double dt, double beta);

// Caputo D_*^beta g at every node (L1 scheme); beta = 1 gives d/dt by
// second-order finite differences.
std::vector<double> caputo_derivative(std::span<const double> g, double dt, double beta);

std::vector<double> distributed_order_apply(const DistributedOrder& order,
                                            std::span<const double> g, double dt);

// ---------------------------------------------------------------------------
// Generators

enum class OperatorForm { kBackward, kForward };

// Backward: b f' + (1/2) sigma2 f'' - q f.
// Forward (adjoint): -(b h)' + (1/2)(sigma2 h)'' - q h.
// Empty functions are zero.
struct DriftDiffusion {
  ScalarFunction drift;
  ScalarFunction sigma2;
  ScalarFunction killing;
  OperatorForm form = OperatorForm::kForward;
};

// Forward operator -(-Delta)^{alpha/2} [g^alpha u] - q u; empty g means g = 1.
struct FractionalLaplacian {
  double alpha;
  ScalarFunction g;
  ScalarFunction killing;
};

using GeneratorSpec = std::variant<DriftDiffusion, FractionalLaplacian>;

std::vector<double> backward_operator_apply(const DriftDiffusion& gen, const SpaceGrid& grid,
                                            std::span<const double> f);
std::vector<double> forward_operator_apply(const DriftDiffusion& gen, const SpaceGrid& grid,
                                           std::span<const double> h);
std::vector<double> fractional_laplacian_apply(const FractionalLaplacian& gen,
                                               const SpaceGrid& grid,
                                               std::span<const double> u);
// Dispatches on the variant (and on DriftDiffusion::form).
std::vector<double> generator_apply(const GeneratorSpec& gen, const SpaceGrid& grid,
                                    std::span<const double> u);

// ---------------------------------------------------------------------------
// Distributed-order Cauchy problem  sum_k C_k D^{beta_k} u = A u,  u(0) = phi

struct SolveOptions {
  // Starting weights that make the L1 operator exact on t^{beta_k}; restores
  // the O(dt^{2-beta}) rate for solutions with a t^beta singularity.
  bool singularity_correction = true;
  double mass_drift_warning = 1e-3;
};

struct SolverDiagnostics {
  double max_mass_drift = 0.0;
  double min_value = 0.0;
  // Mass of |u| on |x| > 0.9 L at the final time; large values mean the
  // periodic box is too small.
  double boundary_mass = 0.0;
  std::vector<std::string> warnings;
};

struct DodeSolution {
  FieldOnGrid field;
  SolverDiagnostics diagnostics;
};

DodeSolution solve_dode(const DistributedOrder& order, const GeneratorSpec& gen,
                        std::span<const double> phi, const SpaceGrid& space,
                        const TimeGrid& time, const SolveOptions& options = {});

// ---------------------------------------------------------------------------
// Subordination formula  u(t, x) = int f_{E_t}(tau) p(tau, x) dtau

// p sampled on increasing tau nodes; values are tau-major (tau.size() x points).
struct SemigroupField {
  std::vector<double> tau;
  std::size_t points = 0;
  std::vector<double> values;
};

std::vector<double> subordination_solution(const subordination::MixtureSpec& spec,
                                           const SemigroupField& field, double t,
                                           double tail_tolerance = 1e-4);

}  // namespace subdiff::fracpde
