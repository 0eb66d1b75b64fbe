#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "subdiff/errors.hpp"
#include "subdiff/harness/ks.hpp"
#include "subdiff/specfun.hpp"
#include "subdiff/subordination.hpp"
#include "subdiff/summation.hpp"

using namespace subdiff;
using namespace subdiff::subordination;
using specfun::StableIndex;

namespace {

MixtureSpec two_atom(double c1, double b1, double c2, double b2) {
  return MixtureSpec({{c1, StableIndex(b1)}, {c2, StableIndex(b2)}});
}

std::vector<double> stable_draws(double beta, double delta, std::size_t n, std::uint64_t seed) {
  std::vector<double> out(n);
  rng::RandomStream s(seed, {1});
  for (auto& v : out) v = sample_stable_increment(StableIndex(beta), delta, s);
  return out;
}

}  // namespace

TEST(MixtureSpec, Invariants) {
  EXPECT_THROW(MixtureSpec({}), DomainError);
  EXPECT_THROW(MixtureSpec({{0.0, StableIndex(0.5)}}), DomainError);
  EXPECT_THROW(MixtureSpec({{-1.0, StableIndex(0.5)}}), DomainError);
  const auto spec = two_atom(1, 0.4, 2, 0.8);
  EXPECT_EQ(spec.size(), 2u);
  EXPECT_DOUBLE_EQ(spec.min_index(), 0.4);
  EXPECT_DOUBLE_EQ(spec.max_index(), 0.8);
  // duplicate indices stay separate atoms
  EXPECT_EQ(two_atom(1, 0.5, 1, 0.5).size(), 2u);
}

TEST(StableIncrement, DeterministicAndPositive) {
  rng::RandomStream a(11, {1, 0, 0}), b(11, {1, 0, 0});
  for (int i = 0; i < 1000; ++i) {
    const double x = sample_stable_increment(StableIndex(0.6), 0.01, a);
    ASSERT_EQ(x, sample_stable_increment(StableIndex(0.6), 0.01, b));
    ASSERT_GT(x, 0.0);
  }
}

TEST(StableIncrement, LaplaceTransformAtUnitStep) {
  const auto d = stable_draws(0.5, 1.0, 100000, 3);
  std::vector<double> w(d.size());
  std::transform(d.begin(), d.end(), w.begin(), [](double x) { return std::exp(-x); });
  const auto m = sample_moments(w);
  EXPECT_NEAR(m.mean, std::exp(-1.0), 3.0 * m.std_error);
}

TEST(StableIncrement, SelfSimilarity) {
  auto d4 = stable_draws(0.5, 4.0, 100000, 5);
  auto d1 = stable_draws(0.5, 1.0, 100000, 6);
  for (auto& v : d1) v *= 16.0;
  EXPECT_LE(harness::ks_two_sample(d4, d1), 0.01);
}

TEST(MixturePath, StrictlyIncreasingAndReachesHorizon) {
  const auto spec = two_atom(1, 0.4, 1, 0.8);
  for (std::uint64_t p = 0; p < 50; ++p) {
    auto streams = component_streams(spec, 9, p);
    const auto path = sample_mixture_path(spec, 1e-2, 2.0, streams);
    EXPECT_EQ(path.values.front(), 0.0);
    EXPECT_GT(path.back(), 2.0);
    EXPECT_LE(path.values[path.steps() - 1], 2.0);
    for (std::size_t j = 1; j < path.values.size(); ++j) ASSERT_GT(path.values[j], path.values[j - 1]);
  }
}

TEST(MixturePath, SingleComponentIncrementsMatchSampler) {
  const auto spec = MixtureSpec::single(0.7);
  auto streams = component_streams(spec, 4, 2);
  auto copy = component_streams(spec, 4, 2);
  const auto path = sample_mixture_path(spec, 0.05, 1.0, streams);
  for (std::size_t j = 1; j < path.values.size(); ++j)
    EXPECT_NEAR(path.values[j] - path.values[j - 1],
                sample_stable_increment(StableIndex(0.7), 0.05, copy[0]), 1e-13 * std::max(1.0, path.values[j]));
}

TEST(MixturePath, FirstIncrementLaplace) {
  // E[exp(-D_delta)] = exp(-delta (1 + 1)) for ((1, 0.4), (1, 0.8))
  const auto spec = two_atom(1, 0.4, 1, 0.8);
  const double delta = 0.5;
  std::vector<double> w(100000);
  for (std::size_t p = 0; p < w.size(); ++p) {
    auto streams = component_streams(spec, 21, p);
    const auto path = sample_mixture_path(spec, delta, 1e-12, streams);
    w[p] = std::exp(-path.values[1]);
  }
  const auto m = sample_moments(w);
  EXPECT_NEAR(m.mean, std::exp(-2.0 * delta), 3.0 * m.std_error);
}

TEST(MixturePath, GuardsAndStreams) {
  const auto spec = MixtureSpec::single(0.9, 1e-9);
  auto streams = component_streams(spec, 1, 0);
  EXPECT_THROW(sample_mixture_path(spec, 1e-3, 1.0, streams, 1000), ResourceError);
  const auto two = two_atom(1, 0.5, 1, 0.5);
  std::vector<rng::RandomStream> shared{rng::RandomStream(1, {1}), rng::RandomStream(1, {1})};
  EXPECT_THROW(sample_mixture_path(two, 1e-2, 1.0, shared), PreconditionError);
  EXPECT_THROW(sample_mixture_path(spec, 0.0, 1.0, streams), DomainError);
}

TEST(InverseProcess, Examples) {
  SubordinatorPath step{1.0, {0.0, 0.5, 3.0, 3.1}};
  EXPECT_DOUBLE_EQ(inverse_process(step, 1.0), 2.0);
  EXPECT_DOUBLE_EQ(inverse_process(step, 0.0), 1.0);
  EXPECT_THROW(inverse_process(step, 3.1), PreconditionError);

  SubordinatorPath identity{0.01, {}};
  for (int j = 0; j <= 200; ++j) identity.values.push_back(0.01 * j);
  for (double t = 0.0; t < 1.9; t += 0.037) {
    const double e = inverse_process(identity, t);
    EXPECT_GE(e - t, 0.0);
    EXPECT_LE(e - t, 0.01 + 1e-12);
  }
}

TEST(InverseProcess, PathwiseInverseRelation) {
  const auto spec = MixtureSpec::single(0.6);
  for (std::uint64_t p = 0; p < 20; ++p) {
    auto streams = component_streams(spec, 2, p);
    const auto path = sample_mixture_path(spec, 1e-2, 1.0, streams);
    double prev = 0.0;
    for (std::size_t j = 1; j + 1 < path.values.size(); ++j) {
      const double tau = path.delta * static_cast<double>(j);
      const double dj = path.values[j];
      EXPECT_GE(inverse_process(path, dj), tau - 1e-12);
      const double jump = dj - path.values[j - 1];
      EXPECT_LE(inverse_process(path, dj - 0.5 * jump), tau + path.delta + 1e-12);
    }
    // nondecreasing step function with steps that are multiples of delta
    for (double t = 0.0; t < 1.0; t += 1e-3) {
      const double e = inverse_process(path, t);
      EXPECT_GE(e, prev);
      const double k = e / path.delta;
      EXPECT_NEAR(k, std::round(k), 1e-9);
      prev = e;
    }
  }
}

TEST(InverseProcess, MeanOfHalfOrder) {
  const auto spec = MixtureSpec::single(0.5);
  const double delta = 1e-3;
  std::vector<double> e(20000);
  for (std::size_t p = 0; p < e.size(); ++p) {
    auto streams = component_streams(spec, 77, p);
    e[p] = inverse_process(sample_mixture_path(spec, delta, 1.0, streams), 1.0);
  }
  const auto m = sample_moments(e);
  EXPECT_NEAR(m.mean, 1.0 / std::tgamma(1.5), 3.0 * m.std_error + delta);
}

TEST(LaplaceExponent, Examples) {
  EXPECT_EQ(mixture_laplace_exponent(MixtureSpec::single(0.5), 0.0), 0.0);
  EXPECT_DOUBLE_EQ(mixture_laplace_exponent(MixtureSpec::single(0.5), 4.0), -2.0);
  EXPECT_NEAR(mixture_laplace_exponent(two_atom(2, 0.5, 1, 0.5), 1.0), -(std::sqrt(2.0) + 1.0), 1e-14);
}

TEST(InverseDensity, HalfOrderClosedForm) {
  const auto spec = MixtureSpec::single(0.5);
  EXPECT_NEAR(inverse_density(spec, 1.0, 0.0), 1.0 / std::sqrt(std::numbers::pi), 1e-12);
  for (double tau = 0.01; tau <= 4.0; tau += 0.01)
    EXPECT_NEAR(inverse_density(spec, 1.0, tau), std::exp(-tau * tau / 4.0) / std::sqrt(std::numbers::pi), 1e-10);
  for (double t : {0.25, 4.0})
    EXPECT_NEAR(inverse_density(spec, t, 0.7), std::exp(-0.49 / (4.0 * t)) / std::sqrt(std::numbers::pi * t), 1e-10);
}

TEST(InverseDensity, Normalization) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  for (double beta : {0.3, 0.6, 0.9}) {
    const auto spec = MixtureSpec::single(beta);
    const double mass = GK::integrate([&](double tau) { return inverse_density(spec, 1.0, tau); }, 0.0, 40.0, 10, 1e-10);
    EXPECT_NEAR(mass, 1.0, 1e-3) << beta;
  }
  const auto two = two_atom(1, 0.4, 1, 0.8);
  const double mass = GK::integrate([&](double tau) { return inverse_density(two, 1.0, tau); }, 0.0, 6.0, 3, 1e-6);
  EXPECT_NEAR(mass, 1.0, 1e-3);
}

TEST(InverseDensity, MixtureOfEqualIndicesReducesToOneAtom) {
  // c1 D + c2 D' with equal index beta has the law of (c1^b + c2^b)^{1/b} D
  const auto two = two_atom(1, 0.5, 1, 0.5);
  const auto one = MixtureSpec::single(0.5, 4.0);
  for (double tau : {0.1, 0.5, 1.0, 2.0})
    EXPECT_NEAR(inverse_density(two, 1.0, tau), inverse_density(one, 1.0, tau), 1e-4) << tau;
}

TEST(InverseDensity, TwoAtomMatchesMonteCarloHistogram) {
  const auto spec = two_atom(1, 0.4, 1, 0.8);
  const double delta = 1e-3;
  const std::size_t n = 100000;
  const double width = 0.1;
  std::vector<double> hist(40, 0.0);
  for (std::size_t p = 0; p < n; ++p) {
    auto streams = component_streams(spec, 13, p);
    const double e = inverse_process(sample_mixture_path(spec, delta, 1.0, streams), 1.0) - 0.5 * delta;
    const auto bin = static_cast<std::size_t>(e / width);
    if (bin < hist.size()) hist[bin] += 1.0;
  }
  double l1 = 0.0;
  for (std::size_t b = 0; b < hist.size(); ++b) {
    const double mid = (static_cast<double>(b) + 0.5) * width;
    l1 += std::abs(hist[b] / (static_cast<double>(n) * width) - inverse_density(spec, 1.0, mid)) * width;
  }
  EXPECT_LE(l1, 0.02);
}

TEST(InverseDensity, OriginIsTheLevyTail) {
  const auto two = two_atom(1, 0.4, 2, 0.8);
  const double want = std::pow(1.0 / 3.0, 0.4) / std::tgamma(0.6) + std::pow(2.0 / 3.0, 0.8) / std::tgamma(0.2);
  EXPECT_NEAR(inverse_density(two, 3.0, 0.0), want, 1e-14);
  // the numerical derivative approaches it from the right
  EXPECT_NEAR(inverse_density(two, 3.0, 1e-3), want, 0.02 * want);
}

TEST(InverseDensity, UnsupportedForThreeAtoms) {
  const MixtureSpec three({{1, StableIndex(0.3)}, {1, StableIndex(0.5)}, {1, StableIndex(0.7)}});
  EXPECT_THROW(inverse_density(three, 1.0, 0.5), UnsupportedError);
}

TEST(InverseDensity, TailBound) {
  // log f(tau) <= log C - k tau^{1/(1-beta_min)} on [4, 6] with fitted C, k > 0
  for (const auto& spec : {MixtureSpec::single(0.5), MixtureSpec::single(0.7), two_atom(1, 0.3, 1, 0.5)}) {
    const double p = 1.0 / (1.0 - spec.min_index());
    std::vector<double> x, y;
    for (double tau = 4.0; tau <= 6.0 + 1e-9; tau += 0.25) {
      const double f = inverse_density(spec, 1.0, tau);
      ASSERT_GT(f, 0.0) << tau;
      x.push_back(std::pow(tau, p));
      y.push_back(std::log(f));
    }
    // least-squares line y = a - k x, then lift a so the line bounds every point
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sx += x[i]; sy += y[i]; sxx += x[i] * x[i]; sxy += x[i] * y[i];
    }
    const double k = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
    EXPECT_GT(k, 0.0);
    double log_c = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x.size(); ++i) log_c = std::max(log_c, y[i] + k * x[i]);
    EXPECT_GT(std::exp(log_c), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_LE(y[i], log_c - k * x[i] + 1e-12);
  }
}

TEST(InverseFunctionals, MeanAndLaplace) {
  const auto one = MixtureSpec::single(0.5);
  EXPECT_NEAR(inverse_mean(one, 1.0), 1.0 / std::tgamma(1.5), 1e-14);
  EXPECT_NEAR(inverse_laplace(one, 1.0, 1.0), 0.4275835762, 1e-9);
  // quadrature branch against the one-atom closed form
  const auto two = two_atom(1, 0.5, 1, 0.5);
  const auto merged = MixtureSpec::single(0.5, 4.0);
  EXPECT_NEAR(inverse_mean(two, 1.0), inverse_mean(merged, 1.0), 1e-8);
  EXPECT_NEAR(inverse_laplace(two, 1.0, 1.0), inverse_laplace(merged, 1.0, 1.0), 1e-8);
}
