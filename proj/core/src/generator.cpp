#include <cmath>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "spectral.hpp"
#include "subdiff/errors.hpp"
#include "subdiff/fracpde.hpp"

namespace subdiff::fracpde {

namespace detail {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

RealFft::RealFft(std::size_t n) : n_(n) {
  if (n < 2) throw PreconditionError("RealFft: length must be at least 2");
  std::lock_guard lock(planner_mutex());
  real_ = fftw_alloc_real(n);
  auto* spec = fftw_alloc_complex(n / 2 + 1);
  if (real_ == nullptr || spec == nullptr) throw ResourceError("RealFft: allocation failed");
  spec_ = spec;
  const int len = static_cast<int>(n);
  forward_ = fftw_plan_dft_r2c_1d(len, real_, spec, FFTW_ESTIMATE);
  backward_ = fftw_plan_dft_c2r_1d(len, spec, real_, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_));
  fftw_destroy_plan(static_cast<fftw_plan>(backward_));
  fftw_free(real_);
  fftw_free(spec_);
}

void RealFft::apply_multiplier(std::span<const double> in, std::span<const double> multiplier,
                               std::span<double> out) {
  std::copy(in.begin(), in.end(), real_);
  fftw_execute(static_cast<fftw_plan>(forward_));
  auto* spec = static_cast<fftw_complex*>(spec_);
  const double norm = 1.0 / static_cast<double>(n_);
  for (std::size_t k = 0; k < modes(); ++k) {
    spec[k][0] *= multiplier[k] * norm;
    spec[k][1] *= multiplier[k] * norm;
  }
  fftw_execute(static_cast<fftw_plan>(backward_));
  std::copy(real_, real_ + n_, out.begin());
}

std::vector<double> abs_frequency_power(std::size_t n, double half_width, double alpha) {
  std::vector<double> out(n / 2 + 1);
  const double base = std::numbers::pi / half_width;
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = k == 0 ? 0.0 : std::pow(base * static_cast<double>(k), alpha);
  return out;
}

}  // namespace detail

namespace {

std::vector<double> sample(const ScalarFunction& f, const SpaceGrid& grid) {
  std::vector<double> out(grid.points, 0.0);
  if (!f) return out;
  for (std::size_t m = 0; m < grid.points; ++m) out[m] = f(grid.x(m));
  return out;
}

void check_size(const SpaceGrid& grid, std::span<const double> u) {
  if (u.size() != grid.points) throw PreconditionError("generator: sample count does not match grid");
  if (grid.points < 3) throw PreconditionError("generator: need at least three grid points");
}

std::vector<double> sampled_sigma2(const DriftDiffusion& gen, const SpaceGrid& grid) {
  auto s = sample(gen.sigma2, grid);
  for (double v : s)
    if (v < 0.0) throw DomainError("generator: sigma2 is negative on the grid");
  return s;
}

}  // namespace

std::vector<double> backward_operator_apply(const DriftDiffusion& gen, const SpaceGrid& grid,
                                            std::span<const double> f) {
  check_size(grid, f);
  const std::size_t n = grid.points;
  const double dx = grid.dx();
  const auto b = sample(gen.drift, grid);
  const auto s2 = sampled_sigma2(gen, grid);
  const auto q = sample(gen.killing, grid);
  std::vector<double> out(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double fp = f[(m + 1) % n];
    const double fm = f[(m + n - 1) % n];
    out[m] = b[m] * (fp - fm) / (2.0 * dx) + 0.5 * s2[m] * (fp - 2.0 * f[m] + fm) / (dx * dx) -
             q[m] * f[m];
  }
  return out;
}

std::vector<double> forward_operator_apply(const DriftDiffusion& gen, const SpaceGrid& grid,
                                           std::span<const double> h) {
  check_size(grid, h);
  const std::size_t n = grid.points;
  const double dx = grid.dx();
  const auto b = sample(gen.drift, grid);
  const auto s2 = sampled_sigma2(gen, grid);
  const auto q = sample(gen.killing, grid);
  std::vector<double> out(n);
  for (std::size_t m = 0; m < n; ++m) {
    const std::size_t p = (m + 1) % n;
    const std::size_t l = (m + n - 1) % n;
    out[m] = -(b[p] * h[p] - b[l] * h[l]) / (2.0 * dx) +
             0.5 * (s2[p] * h[p] - 2.0 * s2[m] * h[m] + s2[l] * h[l]) / (dx * dx) - q[m] * h[m];
  }
  return out;
}

std::vector<double> fractional_laplacian_apply(const FractionalLaplacian& gen,
                                               const SpaceGrid& grid,
                                               std::span<const double> u) {
  if (!(gen.alpha > 0.0 && gen.alpha < 2.0))
    throw DomainError("fractional Laplacian: alpha must lie in (0, 2)");
  if (u.size() != grid.points) throw PreconditionError("generator: sample count does not match grid");
  const std::size_t n = grid.points;
  std::vector<double> weighted(u.begin(), u.end());
  if (gen.g) {
    for (std::size_t m = 0; m < n; ++m) {
      const double gv = gen.g(grid.x(m));
      if (gv < 0.0) throw DomainError("fractional Laplacian: g is negative on the grid");
      weighted[m] *= std::pow(gv, gen.alpha);
    }
  }
  auto mult = detail::abs_frequency_power(n, grid.half_width, gen.alpha);
  for (double& v : mult) v = -v;
  std::vector<double> out(n);
  detail::RealFft fft(n);
  fft.apply_multiplier(weighted, mult, out);
  if (gen.killing)
    for (std::size_t m = 0; m < n; ++m) out[m] -= gen.killing(grid.x(m)) * u[m];
  return out;
}

std::vector<double> generator_apply(const GeneratorSpec& gen, const SpaceGrid& grid,
                                    std::span<const double> u) {
  if (const auto* dd = std::get_if<DriftDiffusion>(&gen)) {
    return dd->form == OperatorForm::kBackward ? backward_operator_apply(*dd, grid, u)
                                               : forward_operator_apply(*dd, grid, u);
  }
  return fractional_laplacian_apply(std::get<FractionalLaplacian>(gen), grid, u);
}

}  // namespace subdiff::fracpde
