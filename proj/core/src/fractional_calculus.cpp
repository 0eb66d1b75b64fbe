#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "subdiff/errors.hpp"
#include "subdiff/fracpde.hpp"
#include "subdiff/specfun.hpp"
#include "subdiff/summation.hpp"

namespace subdiff::fracpde {

DistributedOrder::DistributedOrder(std::vector<OrderAtom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw PreconditionError("DistributedOrder: no atoms");
  for (const auto& a : atoms_) {
    if (!(a.weight > 0.0) || !std::isfinite(a.weight))
      throw DomainError("DistributedOrder: weight must be positive and finite");
    if (!(a.beta > 0.0 && a.beta < 1.0))
      throw DomainError("DistributedOrder: order must lie in (0, 1)");
  }
}

DistributedOrder DistributedOrder::single(double beta, double weight) {
  return DistributedOrder({{weight, beta}});
}

DistributedOrder DistributedOrder::from_mixture(const subordination::MixtureSpec& spec) {
  std::vector<OrderAtom> atoms;
  atoms.reserve(spec.size());
  for (const auto& a : spec.atoms()) {
    const double beta = a.index.value();
    atoms.push_back({std::pow(a.scale, beta), beta});
  }
  return DistributedOrder(std::move(atoms));
}

DistributedOrder DistributedOrder::from_density(const ScalarFunction& density, double lo,
                                                double hi, int nodes) {
  if (!(lo >= 0.0 && hi <= 1.0 && lo < hi))
    throw DomainError("from_density: support must be a subinterval of [0, 1]");
  if (nodes != 16) throw UnsupportedError("from_density: only the 16-point rule is available");
  using Rule = boost::math::quadrature::gauss<double, 16>;
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  std::vector<OrderAtom> atoms;
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (double sign : {-1.0, 1.0}) {
      if (x[i] == 0.0 && sign < 0.0) continue;
      const double beta = mid + sign * half * x[i];
      const double c = half * w[i] * density(beta);
      if (c > 0.0) atoms.push_back({c, beta});
    }
  }
  std::sort(atoms.begin(), atoms.end(),
            [](const OrderAtom& a, const OrderAtom& b) { return a.beta < b.beta; });
  return DistributedOrder(std::move(atoms));
}

std::vector<double> SpaceGrid::nodes() const {
  std::vector<double> out(points);
  for (std::size_t m = 0; m < points; ++m) out[m] = x(m);
  return out;
}

std::size_t SpaceGrid::nearest(double xv) const noexcept {
  const double period = 2.0 * half_width;
  double shifted = std::fmod(xv + half_width, period);
  if (shifted < 0.0) shifted += period;
  auto m = static_cast<std::size_t>(std::llround(shifted / dx()));
  return m % points;
}

SpaceGrid make_space_grid(double half_width, double dx) {
  if (!(half_width > 0.0) || !(dx > 0.0)) throw DomainError("space grid: spacings must be positive");
  const double n = std::round(2.0 * half_width / dx);
  if (n < 2.0) throw DomainError("space grid: fewer than two points");
  return SpaceGrid{half_width, static_cast<std::size_t>(n)};
}

FieldOnGrid::FieldOnGrid(TimeGrid time, SpaceGrid space) : time_(time), space_(space) {
  if (!(time_.step > 0.0) || !(space_.half_width > 0.0) || space_.points == 0)
    throw DomainError("FieldOnGrid: grid spacings must be positive");
  values_.assign(time_.nodes() * space_.points, 0.0);
}

std::span<double> FieldOnGrid::slice(std::size_t n) {
  if (n >= time_.nodes()) throw PreconditionError("FieldOnGrid: slice index out of range");
  return {values_.data() + n * space_.points, space_.points};
}

std::span<const double> FieldOnGrid::slice(std::size_t n) const {
  if (n >= time_.nodes()) throw PreconditionError("FieldOnGrid: slice index out of range");
  return {values_.data() + n * space_.points, space_.points};
}

double FieldOnGrid::mass(std::size_t n) const {
  return compensated_sum(slice(n)) * space_.dx();
}

void FieldOnGrid::check_density(double negativity_tol, double mass_tol) const {
  for (std::size_t n = 0; n < time_.nodes(); ++n) {
    auto s = slice(n);
    for (double v : s) {
      if (!std::isfinite(v)) throw DomainError("field: non-finite value at slice " + std::to_string(n));
      if (v < -negativity_tol)
        throw DomainError("field: negative density " + std::to_string(v) + " at slice " +
                          std::to_string(n));
    }
    const double mass_n = mass(n);
    if (std::abs(mass_n - 1.0) > mass_tol)
      throw DomainError("field: mass " + std::to_string(mass_n) + " at slice " + std::to_string(n));
  }
}

std::vector<double> FieldOnGrid::reported_slice(std::size_t n, double negativity_tol) const {
  auto s = slice(n);
  std::vector<double> out(s.begin(), s.end());
  for (double& v : out)
    if (v < 0.0 && v >= -negativity_tol) v = 0.0;
  return out;
}

SliceCdf::SliceCdf(const SpaceGrid& grid, std::span<const double> density)
    : left_(grid.x(0) - 0.5 * grid.dx()), dx_(grid.dx()), edges_(density.size() + 1, 0.0) {
  if (density.size() != grid.points) throw PreconditionError("SliceCdf: size mismatch");
  CompensatedSum acc;
  for (std::size_t m = 0; m < density.size(); ++m) {
    acc += std::max(density[m], 0.0) * dx_;
    edges_[m + 1] = acc.value();
  }
  const double total = edges_.back();
  if (!(total > 0.0)) throw DomainError("SliceCdf: zero mass");
  for (double& e : edges_) e /= total;
}

double SliceCdf::operator()(double x) const {
  const double u = (x - left_) / dx_;
  if (u <= 0.0) return 0.0;
  const auto cells = static_cast<double>(edges_.size() - 1);
  if (u >= cells) return 1.0;
  const auto i = static_cast<std::size_t>(u);
  const double frac = u - static_cast<double>(i);
  return edges_[i] + frac * (edges_[i + 1] - edges_[i]);
}

std::vector<double> discrete_delta(const SpaceGrid& grid, double x0) {
  std::vector<double> out(grid.points, 0.0);
  out[grid.nearest(x0)] = 1.0 / grid.dx();
  return out;
}

std::vector<double> fractional_integral(std::span<const double> g, double dt, double beta) {
  if (!(beta > 0.0)) throw DomainError("fractional_integral: order must be positive");
  if (!(dt > 0.0)) throw DomainError("fractional_integral: step must be positive");
  const std::size_t n_nodes = g.size();
  std::vector<double> out(n_nodes, 0.0);
  if (n_nodes == 0) return out;
  if (!std::isfinite(g[0])) throw DomainError("fractional_integral: g(0) is not finite");

  // p[k] = k^{beta+1}
  std::vector<double> p(n_nodes + 1);
  for (std::size_t k = 0; k <= n_nodes; ++k) p[k] = std::pow(static_cast<double>(k), beta + 1.0);
  // interior weight a_{n-j} for 1 <= j <= n-1, depends only on k = n - j
  std::vector<double> a(n_nodes + 1, 0.0);
  for (std::size_t k = 1; k < n_nodes; ++k) a[k] = p[k + 1] - 2.0 * p[k] + p[k - 1];

  const double scale = std::pow(dt, beta) / std::tgamma(beta + 2.0);
  for (std::size_t n = 1; n < n_nodes; ++n) {
    const double nd = static_cast<double>(n);
    CompensatedSum acc;
    acc += (p[n - 1] - (nd - 1.0 - beta) * std::pow(nd, beta)) * g[0];
    for (std::size_t j = 1; j < n; ++j) acc += a[n - j] * g[j];
    acc += g[n];
    out[n] = scale * acc.value();
  }
  return out;
}

namespace {

void check_derivative_args(std::span<const double> g, double dt, double beta) {
  if (!(beta > 0.0 && beta <= 1.0)) throw DomainError("caputo_derivative: order must lie in (0, 1]");
  if (!(dt > 0.0)) throw DomainError("caputo_derivative: step must be positive");
  if (g.size() < 3) throw PreconditionError("caputo_derivative: need at least three nodes");
}

}  // namespace

std::vector<double> caputo_derivative(std::span<const double> g, double dt, double beta) {
  check_derivative_args(g, dt, beta);
  const std::size_t n_nodes = g.size();
  std::vector<double> out(n_nodes, 0.0);

  if (beta == 1.0) {
    out[0] = (-3.0 * g[0] + 4.0 * g[1] - g[2]) / (2.0 * dt);
    for (std::size_t n = 1; n + 1 < n_nodes; ++n) out[n] = (g[n + 1] - g[n - 1]) / (2.0 * dt);
    const std::size_t l = n_nodes - 1;
    out[l] = (3.0 * g[l] - 4.0 * g[l - 1] + g[l - 2]) / (2.0 * dt);
    return out;
  }

  // b_k = (k+1)^{1-beta} - k^{1-beta}
  std::vector<double> b(n_nodes);
  double prev = 0.0;
  for (std::size_t k = 0; k < n_nodes; ++k) {
    const double next = std::pow(static_cast<double>(k + 1), 1.0 - beta);
    b[k] = next - prev;
    prev = next;
  }
  const double scale = std::pow(dt, -beta) / std::tgamma(2.0 - beta);
  for (std::size_t n = 1; n < n_nodes; ++n) {
    CompensatedSum acc;
    for (std::size_t k = 0; k < n; ++k) acc += b[k] * (g[n - k] - g[n - k - 1]);
    out[n] = scale * acc.value();
  }
  return out;
}

std::vector<double> distributed_order_apply(const DistributedOrder& order,
                                            std::span<const double> g, double dt) {
  std::vector<double> out(g.size(), 0.0);
  for (const auto& atom : order.atoms()) {
    const auto d = caputo_derivative(g, dt, atom.beta);
    for (std::size_t n = 0; n < g.size(); ++n) out[n] += atom.weight * d[n];
  }
  return out;
}

}  // namespace subdiff::fracpde
