#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "subdiff/errors.hpp"
#include "subdiff/fracpde.hpp"
#include "subdiff/rng.hpp"
#include "subdiff/specfun.hpp"

using namespace subdiff;
using namespace subdiff::fracpde;

namespace {

std::vector<double> sample(std::size_t nodes, double dt, double (*g)(double)) {
  std::vector<double> out(nodes);
  for (std::size_t n = 0; n < nodes; ++n) out[n] = g(dt * static_cast<double>(n));
  return out;
}

double identity(double t) { return t; }

std::vector<double> on_grid(const SpaceGrid& grid, const std::function<double(double)>& f) {
  std::vector<double> out(grid.points);
  for (std::size_t m = 0; m < grid.points; ++m) out[m] = f(grid.x(m));
  return out;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
  return e;
}

double dot(const std::vector<double>& a, const std::vector<double>& b, double dx) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s * dx;
}

double variance(const SpaceGrid& grid, std::span<const double> u) {
  double m0 = 0, m1 = 0, m2 = 0;
  for (std::size_t m = 0; m < grid.points; ++m) {
    const double x = grid.x(m);
    m0 += u[m];
    m1 += x * u[m];
    m2 += x * x * u[m];
  }
  return m2 / m0 - (m1 / m0) * (m1 / m0);
}

}  // namespace

TEST(DistributedOrder, Construction) {
  EXPECT_THROW(DistributedOrder({}), PreconditionError);
  EXPECT_THROW(DistributedOrder::single(1.0), DomainError);
  EXPECT_THROW(DistributedOrder::single(0.5, 0.0), DomainError);
  const subordination::MixtureSpec spec({{2.0, specfun::StableIndex(0.4)}, {3.0, specfun::StableIndex(0.8)}});
  const auto d = DistributedOrder::from_mixture(spec);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d.atoms()[0].weight, std::pow(2.0, 0.4));
  EXPECT_EQ(d.atoms()[1].weight, std::pow(3.0, 0.8));
  EXPECT_EQ(d.atoms()[1].beta, 0.8);
}

TEST(DistributedOrder, FromDensityIntegratesOverOrders) {
  const auto density = [](double b) { return 1.0 + b; };
  const auto d = DistributedOrder::from_density(density, 0.2, 0.9);
  EXPECT_EQ(d.size(), 16u);
  double total = 0.0;
  for (const auto& a : d.atoms()) total += a.weight;
  EXPECT_NEAR(total, 0.7 + (0.81 - 0.04) / 2.0, 1e-13);
  // applied to g(t) = t the operator is int t^{1-b} / Gamma(2-b) (1+b) db
  const double dt = 1e-3;
  const auto g = sample(1001, dt, identity);
  const auto got = distributed_order_apply(d, g, dt);
  const double want = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      [&](double b) { return density(b) / std::tgamma(2.0 - b); }, 0.2, 0.9);
  EXPECT_NEAR(got.back(), want, 1e-10);
  EXPECT_THROW(DistributedOrder::from_density(density, 0.2, 0.9, 8), UnsupportedError);
  EXPECT_THROW(DistributedOrder::from_density(density, -0.1, 0.9), DomainError);
}

TEST(FractionalIntegral, Examples) {
  const double dt = 1e-3;
  const auto one = std::vector<double>(1001, 1.0);
  const auto j1 = fractional_integral(one, dt, 1.0);
  for (std::size_t n = 0; n < j1.size(); ++n) EXPECT_NEAR(j1[n], dt * n, 1e-13);
  const auto jh = fractional_integral(one, dt, 0.5);
  EXPECT_NEAR(jh.back(), 1.0 / std::tgamma(1.5), 1e-8);
  EXPECT_NEAR(jh.back(), 1.1283791671, 1e-8);
  EXPECT_THROW(fractional_integral(one, dt, 0.0), DomainError);
}

TEST(FractionalIntegral, SeriesOracle) {
  // J^b cos(t) = sum_k (-1)^k t^{2k+b} / Gamma(2k+1+b)
  const double dt = 1e-3, beta = 0.35;
  std::vector<double> g(1001);
  for (std::size_t n = 0; n < g.size(); ++n) g[n] = std::cos(dt * n);
  const auto j = fractional_integral(g, dt, beta);
  for (double t : {0.25, 0.5, 1.0}) {
    double want = 0.0;
    for (int k = 0; k < 30; ++k) want += (k % 2 ? -1.0 : 1.0) * std::pow(t, 2 * k + beta) / std::tgamma(2 * k + 1 + beta);
    EXPECT_NEAR(j[static_cast<std::size_t>(std::lround(t / dt))], want, 1e-6) << t;
  }
}

TEST(FractionalIntegral, Semigroup) {
  const double dt = 1e-3;
  const auto g = sample(1001, dt, identity);
  const auto composed = fractional_integral(fractional_integral(g, dt, 0.4), dt, 0.3);
  const auto direct = fractional_integral(g, dt, 0.7);
  for (std::size_t n = 0; n < g.size(); ++n) {
    const double exact = std::pow(dt * n, 1.7) / std::tgamma(2.7);
    EXPECT_NEAR(direct[n], exact, 1e-12);
    EXPECT_NEAR(composed[n], exact, 1e-6);
  }
}

TEST(Caputo, Examples) {
  const double dt = 1e-3;
  const auto c = caputo_derivative(std::vector<double>(1001, 3.0), dt, 0.5);
  for (double v : c) EXPECT_EQ(v, 0.0);
  const auto g = sample(1001, dt, identity);
  EXPECT_NEAR(caputo_derivative(g, dt, 0.5).back(), 2.0 / std::sqrt(std::numbers::pi), 2e-3);
  const auto sq = sample(1001, dt, [](double t) { return t * t; });
  const auto d1 = caputo_derivative(sq, dt, 1.0);
  for (std::size_t n = 0; n < d1.size(); ++n) EXPECT_NEAR(d1[n], 2.0 * dt * n, 1e-9);
  EXPECT_THROW(caputo_derivative(g, dt, 0.0), DomainError);
  EXPECT_THROW(caputo_derivative(g, dt, 1.1), DomainError);
  EXPECT_THROW(caputo_derivative(std::vector<double>{0.0, 1.0}, dt, 0.5), PreconditionError);
}

TEST(Caputo, SeriesOracle) {
  // D^b sin = J^{1-b} cos = sum_k (-1)^k t^{2k+1-b} / Gamma(2k+2-b)
  const double dt = 1e-3, beta = 0.6;
  std::vector<double> g(1001);
  for (std::size_t n = 0; n < g.size(); ++n) g[n] = std::sin(dt * n);
  const auto d = caputo_derivative(g, dt, beta);
  double want = 0.0;
  for (int k = 0; k < 30; ++k) want += (k % 2 ? -1.0 : 1.0) / std::tgamma(2 * k + 2 - beta);
  EXPECT_NEAR(d.back(), want, 1e-4);
}

TEST(Caputo, LaplaceRule) {
  const double dt = 2e-3;
  const std::size_t nodes = 10001;  // t in [0, 20]
  const auto g = sample(nodes, dt, [](double t) { return std::exp(-t); });
  for (double beta : {0.3, 0.5, 0.8}) {
    const auto d = caputo_derivative(g, dt, beta);
    for (double s : {1.0, 2.0}) {
      double acc = 0.0;
      for (std::size_t n = 0; n < nodes; ++n) {
        const double w = (n == 0 || n + 1 == nodes) ? 0.5 : 1.0;
        acc += w * std::exp(-s * dt * n) * d[n];
      }
      acc *= dt;
      const double want = std::pow(s, beta) / (s + 1.0) - std::pow(s, beta - 1.0);
      EXPECT_NEAR(acc, want, 1e-3) << beta << " " << s;
    }
  }
}

TEST(Caputo, ApproachesDerivativeAsOrderTendsToOne) {
  const double dt = 1e-3;
  std::vector<double> g(2001);
  for (std::size_t n = 0; n < g.size(); ++n) g[n] = std::sin(2.0 * dt * n) + dt * n * dt * n;
  const auto d = caputo_derivative(g, dt, 0.999);
  for (std::size_t n = 100; n < g.size(); ++n) {
    const double t = dt * n;
    EXPECT_NEAR(d[n], 2.0 * std::cos(2.0 * t) + 2.0 * t, 5e-3) << t;
  }
}

TEST(DistributedOrderApply, Examples) {
  const double dt = 1e-3;
  const auto g = sample(1001, dt, identity);
  EXPECT_EQ(distributed_order_apply(DistributedOrder::single(0.5), g, dt), caputo_derivative(g, dt, 0.5));
  const DistributedOrder two({{1.0, 0.4}, {1.0, 0.8}});
  const double want = 1.0 / std::tgamma(1.6) + 1.0 / std::tgamma(1.2);
  EXPECT_NEAR(distributed_order_apply(two, g, dt).back(), want, 1e-10);
  EXPECT_NEAR(distributed_order_apply(two, g, dt).back(), 2.2086, 4e-3);
  const DistributedOrder doubled({{2.0, 0.4}, {2.0, 0.8}});
  const auto a = distributed_order_apply(two, g, dt);
  const auto b = distributed_order_apply(doubled, g, dt);
  for (std::size_t n = 0; n < a.size(); ++n) EXPECT_EQ(b[n], 2.0 * a[n]);
}

TEST(Grids, SpaceGridAndDelta) {
  const auto grid = make_space_grid(8.0, 0.02);
  EXPECT_EQ(grid.points, 800u);
  EXPECT_DOUBLE_EQ(grid.x(0), -8.0);
  EXPECT_EQ(grid.nearest(0.0), 400u);
  EXPECT_EQ(grid.nearest(8.0), 0u);
  EXPECT_EQ(grid.nearest(-8.0 - 0.02), 799u);
  const auto delta = discrete_delta(grid, 0.0);
  EXPECT_NEAR(delta[400] * grid.dx(), 1.0, 1e-14);
  EXPECT_THROW(make_space_grid(0.0, 0.1), DomainError);
}

TEST(Field, DensityChecksAndReporting) {
  const SpaceGrid grid{1.0, 4};
  FieldOnGrid f(TimeGrid{0.1, 1}, grid);
  for (std::size_t n = 0; n < 2; ++n)
    for (std::size_t m = 0; m < 4; ++m) f.at(n, m) = 0.5;
  EXPECT_NEAR(f.mass(1), 1.0, 1e-15);
  EXPECT_NO_THROW(f.check_density());
  f.at(1, 0) = 1.0;
  f.at(1, 1) = 1.0;
  f.at(1, 2) = -1e-9;
  f.at(1, 3) = 1e-9;
  EXPECT_NO_THROW(f.check_density());
  EXPECT_EQ(f.reported_slice(1)[2], 0.0);
  EXPECT_EQ(f.at(1, 2), -1e-9);
  f.at(1, 2) = -1e-6;
  EXPECT_THROW(f.check_density(), DomainError);
  f.at(1, 2) = 0.1;
  EXPECT_THROW(f.check_density(), DomainError);
  EXPECT_THROW(f.slice(2), PreconditionError);
}

TEST(Field, SliceCdfIsPiecewiseLinear) {
  const SpaceGrid grid{1.0, 4};
  const std::vector<double> u{0.0, 1.0, 1.0, 0.0};
  const SliceCdf cdf(grid, u);
  EXPECT_EQ(cdf(-5.0), 0.0);
  EXPECT_EQ(cdf(5.0), 1.0);
  // occupied cells are [-0.75, -0.25] and [-0.25, 0.25]
  EXPECT_NEAR(cdf(-0.5), 0.25, 1e-15);
  EXPECT_NEAR(cdf(-0.25), 0.5, 1e-15);
  EXPECT_NEAR(cdf(0.0), 0.75, 1e-15);
}

TEST(Generator, ForwardExamples) {
  for (double dx : {0.1, 0.05}) {
    const double L = 4.0;
    const auto grid = make_space_grid(L, dx);
    const double k = std::numbers::pi / L;
    DriftDiffusion heat{{}, [](double) { return 1.0; }, {}, OperatorForm::kForward};
    const auto out = forward_operator_apply(heat, grid, on_grid(grid, [&](double x) { return std::sin(k * x); }));
    const auto want = on_grid(grid, [&](double x) { return -0.5 * k * k * std::sin(k * x); });
    EXPECT_LE(max_abs_diff(out, want), 0.02 * dx * dx);

    DriftDiffusion flux{[](double) { return 1.0; }, {}, {}, OperatorForm::kForward};
    const auto zero = forward_operator_apply(flux, grid, std::vector<double>(grid.points, 1.0));
    for (double v : zero) EXPECT_NEAR(v, 0.0, 1e-12);

    DriftDiffusion linear{[](double x) { return x; }, {}, {}, OperatorForm::kForward};
    // -(x h)' = -(1 - x^2) h for h = exp(-x^2 / 2); away from the wrap seam
    const auto g = forward_operator_apply(linear, grid, on_grid(grid, [](double x) { return std::exp(-0.5 * x * x); }));
    double err = 0.0;
    for (std::size_t m = 0; m < grid.points; ++m) {
      const double x = grid.x(m);
      if (std::abs(x) < L - 1.0) err = std::max(err, std::abs(g[m] + (1.0 - x * x) * std::exp(-0.5 * x * x)));
    }
    EXPECT_LE(err, 1.5 * dx * dx);
  }
}

TEST(Generator, AdjointIdentity) {
  const auto grid = make_space_grid(3.0, 0.05);
  rng::RandomStream s(3, {9});
  std::vector<double> f(grid.points), h(grid.points);
  for (auto& v : f) v = s.normal();
  for (auto& v : h) v = s.normal();
  DriftDiffusion gen{[](double x) { return std::sin(x); }, [](double x) { return 1.0 + 0.5 * std::cos(x); },
                     [](double x) { return x * x; }, OperatorForm::kBackward};
  const auto af = backward_operator_apply(gen, grid, f);
  const auto ah = forward_operator_apply(gen, grid, h);
  EXPECT_NEAR(dot(af, h, grid.dx()), dot(f, ah, grid.dx()), 1e-10);
  // generator_apply dispatches on the form
  EXPECT_EQ(generator_apply(gen, grid, f), af);
  gen.form = OperatorForm::kForward;
  EXPECT_EQ(generator_apply(gen, grid, h), ah);
}

TEST(Generator, NegativeDiffusionRejected) {
  const auto grid = make_space_grid(1.0, 0.1);
  DriftDiffusion bad{{}, [](double x) { return x; }, {}, OperatorForm::kForward};
  EXPECT_THROW(forward_operator_apply(bad, grid, std::vector<double>(grid.points, 1.0)), DomainError);
}

TEST(Generator, FractionalLaplacianOnFourierModes) {
  const double L = 2.0 * std::numbers::pi;
  const SpaceGrid grid{L, 256};
  for (double alpha : {0.8, 1.5}) {
    for (int k : {1, 3, 10}) {
      const double xi = std::numbers::pi * k / L;
      const auto u = on_grid(grid, [&](double x) { return std::cos(xi * x); });
      const auto out = fractional_laplacian_apply(FractionalLaplacian{alpha, {}, {}}, grid, u);
      const auto two = fractional_laplacian_apply(FractionalLaplacian{alpha, [](double) { return 2.0; }, {}}, grid, u);
      for (std::size_t m = 0; m < grid.points; ++m) {
        EXPECT_NEAR(out[m], -std::pow(xi, alpha) * u[m], 1e-11);
        EXPECT_NEAR(two[m], -std::pow(2.0, alpha) * std::pow(xi, alpha) * u[m], 1e-11);
      }
    }
  }
  const auto c = fractional_laplacian_apply(FractionalLaplacian{1.5, {}, {}}, grid, std::vector<double>(256, 1.0));
  for (double v : c) EXPECT_NEAR(v, 0.0, 1e-13);
  EXPECT_THROW(fractional_laplacian_apply(FractionalLaplacian{2.0, {}, {}}, grid, std::vector<double>(256, 1.0)),
               DomainError);
}

TEST(Solver, ZeroGeneratorKeepsInitialData) {
  const auto grid = make_space_grid(2.0, 0.1);
  const auto phi = on_grid(grid, [](double x) { return std::exp(-x * x); });
  const auto sol = solve_dode(DistributedOrder({{1.0, 0.3}, {0.5, 0.7}}), DriftDiffusion{}, phi, grid,
                              TimeGrid{0.01, 50});
  for (std::size_t n = 0; n <= 50; ++n) EXPECT_LE(max_abs_diff({sol.field.slice(n).begin(), sol.field.slice(n).end()}, phi), 1e-14);
}

TEST(Solver, RelaxationMatchesMittagLeffler) {
  const SpaceGrid grid{1.0, 4};
  DriftDiffusion reaction{{}, {}, [](double) { return 1.0; }, OperatorForm::kBackward};
  const std::vector<double> phi(4, 1.0);
  const auto sol = solve_dode(DistributedOrder::single(0.5), reaction, phi, grid, TimeGrid{1e-3, 1000});
  for (std::size_t m = 0; m < 4; ++m) EXPECT_NEAR(sol.field.at(1000, m), 0.4275835762, 3e-3);
  // the corrected scheme is far inside the tolerance along the whole path
  for (std::size_t n = 100; n <= 1000; n += 100) {
    const double t = 1e-3 * n;
    EXPECT_NEAR(sol.field.at(n, 0), specfun::mittag_leffler(0.5, -std::sqrt(t)), 1e-4) << t;
  }
  SolveOptions plain;
  plain.singularity_correction = false;
  const auto raw = solve_dode(DistributedOrder::single(0.5), reaction, phi, grid, TimeGrid{1e-3, 1000}, plain);
  EXPECT_NEAR(raw.field.at(1000, 0), 0.4275835762, 3e-3);
}

TEST(Solver, TwoAtomRelaxationMatchesQuadratureOracle) {
  // sum C_k D^b_k u = -u with C_k = c_k^b_k has u(t) = E[exp(-E_t)]
  const subordination::MixtureSpec spec({{1.0, specfun::StableIndex(0.4)}, {1.0, specfun::StableIndex(0.8)}});
  const SpaceGrid grid{1.0, 4};
  DriftDiffusion reaction{{}, {}, [](double) { return 1.0; }, OperatorForm::kBackward};
  const auto sol = solve_dode(DistributedOrder::from_mixture(spec), reaction, std::vector<double>(4, 1.0), grid,
                              TimeGrid{1e-3, 1000});
  EXPECT_NEAR(sol.field.at(1000, 0), subordination::inverse_laplace(spec, 1.0, 1.0), 2e-3);
  EXPECT_NEAR(sol.field.at(500, 0), subordination::inverse_laplace(spec, 0.5, 1.0), 2e-3);
}

TEST(Solver, HeatVarianceAndMassConservation) {
  const auto grid = make_space_grid(8.0, 0.05);
  DriftDiffusion heat{{}, [](double) { return 1.0; }, {}, OperatorForm::kForward};
  const auto sol = solve_dode(DistributedOrder::single(0.5), heat, discrete_delta(grid), grid, TimeGrid{2e-3, 500});
  EXPECT_NEAR(variance(grid, sol.field.slice(500)), 1.0 / std::tgamma(1.5), 2e-2);
  for (std::size_t n = 1; n <= 500; ++n) ASSERT_NEAR(sol.field.mass(n), sol.field.mass(n - 1), 1e-10);
  EXPECT_NO_THROW(sol.field.check_density());
  EXPECT_LE(sol.diagnostics.max_mass_drift, 1e-10);
}

TEST(Solver, VariableCoefficientsConserveMass) {
  const auto grid = make_space_grid(4.0, 0.05);
  DriftDiffusion gen{[](double x) { return std::sin(x); }, [](double x) { return 1.0 + 0.5 * std::cos(x); }, {},
                     OperatorForm::kForward};
  const auto phi = on_grid(grid, [](double x) { return std::exp(-2.0 * x * x) * std::sqrt(2.0 / std::numbers::pi); });
  const auto sol = solve_dode(DistributedOrder({{1.0, 0.4}, {1.0, 0.8}}), gen, phi, grid, TimeGrid{5e-3, 100});
  for (std::size_t n = 1; n <= 100; ++n) ASSERT_NEAR(sol.field.mass(n), sol.field.mass(n - 1), 1e-10);
  EXPECT_GE(sol.diagnostics.min_value, -1e-8);
}

TEST(Solver, SpectralModeDecay) {
  // a Fourier mode of the fractional Laplacian relaxes like E_b(-|xi|^a t^b)
  const double L = 2.0 * std::numbers::pi;
  const SpaceGrid grid{L, 64};
  const double xi = std::numbers::pi * 2.0 / L;
  const auto phi = on_grid(grid, [&](double x) { return 1.0 + std::cos(xi * x); });
  const auto sol = solve_dode(DistributedOrder::single(0.5), FractionalLaplacian{1.5, {}, {}}, phi, grid,
                              TimeGrid{1e-3, 1000});
  const double decay = specfun::mittag_leffler(0.5, -std::pow(xi, 1.5));
  for (std::size_t m = 0; m < grid.points; m += 7)
    EXPECT_NEAR(sol.field.at(1000, m), 1.0 + decay * std::cos(xi * grid.x(m)), 1e-3);
  // variable g takes the dense route and still conserves mass
  const auto dense = solve_dode(DistributedOrder::single(0.5),
                                FractionalLaplacian{1.5, [](double x) { return 1.0 + 0.3 * std::cos(x); }, {}}, phi,
                                grid, TimeGrid{1e-2, 50});
  for (std::size_t n = 1; n <= 50; ++n) ASSERT_NEAR(dense.field.mass(n), dense.field.mass(0), 1e-10);
}

TEST(Solver, Preconditions) {
  const SpaceGrid grid{1.0, 4};
  EXPECT_THROW(solve_dode(DistributedOrder::single(0.5), DriftDiffusion{}, std::vector<double>(3, 1.0), grid,
                          TimeGrid{0.1, 2}),
               PreconditionError);
  EXPECT_THROW(solve_dode(DistributedOrder::single(0.5), DriftDiffusion{}, std::vector<double>(4, NAN), grid,
                          TimeGrid{0.1, 2}),
               DomainError);
}

TEST(Subordination, ConstantFieldIsReproduced) {
  const auto spec = subordination::MixtureSpec::single(0.5);
  SemigroupField p;
  for (int i = 0; i <= 1200; ++i) p.tau.push_back(0.01 * i);
  p.points = 3;
  for (std::size_t i = 0; i < p.tau.size(); ++i)
    for (double v : {1.0, -2.0, 0.25}) p.values.push_back(v);
  const auto u = subordination_solution(spec, p, 1.0);
  EXPECT_NEAR(u[0], 1.0, 1e-14);
  EXPECT_NEAR(u[1], -2.0, 1e-14);
  EXPECT_NEAR(u[2], 0.25, 1e-14);
}

TEST(Subordination, ExponentialFieldGivesMittagLeffler) {
  SemigroupField p;
  for (int i = 0; i <= 1200; ++i) p.tau.push_back(0.01 * i);
  p.points = 1;
  for (double t : p.tau) p.values.push_back(std::exp(-t));
  EXPECT_NEAR(subordination_solution(subordination::MixtureSpec::single(0.5), p, 1.0)[0], 0.4275835762, 1e-3);
  const subordination::MixtureSpec two({{1.0, specfun::StableIndex(0.4)}, {1.0, specfun::StableIndex(0.8)}});
  EXPECT_NEAR(subordination_solution(two, p, 1.0)[0], subordination::inverse_laplace(two, 1.0, 1.0), 1e-3);
}

TEST(Subordination, ShortTauGridQuotesHorizon) {
  SemigroupField p;
  for (int i = 0; i <= 20; ++i) p.tau.push_back(0.1 * i);
  p.points = 1;
  p.values.assign(p.tau.size(), 1.0);
  try {
    subordination_solution(subordination::MixtureSpec::single(0.5), p, 1.0);
    FAIL() << "expected PreconditionError";
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("extend it to at least"), std::string::npos);
  }
}
