#pragma once

namespace subdiff::specfun {

// Index of a one-sided stable law, strictly inside (0, 1).
class StableIndex {
 public:
  explicit StableIndex(double beta);

  double value() const noexcept { return beta_; }
  operator double() const noexcept { return beta_; }  // NOLINT(google-explicit-constructor)

  friend bool operator==(StableIndex a, StableIndex b) noexcept { return a.beta_ == b.beta_; }

 private:
  double beta_;
};

// Euler's gamma function for x > 0.
double gamma_fn(double x);

// One-parameter Mittag-Leffler function E_beta(z) = sum_n z^n / Gamma(beta n + 1)
// for 0 < beta <= 1. Absolute error below 1e-10 on z in [-50, 5]. Throws
// RangeError when the value would overflow.
double mittag_leffler(double beta, double z);

// Density and distribution function of the standardized one-sided stable law
// with Laplace transform E[exp(-s S)] = exp(-s^beta).
double stable_density(StableIndex beta, double tau);
double stable_cdf(StableIndex beta, double t);

// Complementary distribution 1 - stable_cdf, accurate in the upper tail.
double stable_survival(StableIndex beta, double t);

// Kanter's function a(u) = sin((1-b)u) sin(bu)^{b/(1-b)} / sin(u)^{1/(1-b)}
// on (0, pi); (a(U)/W)^{(1-b)/b} with U ~ U(0, pi), W ~ Exp(1) is a standard
// one-sided stable variate.
double kanter_function(double beta, double u) noexcept;

// Crossover above which the convergent large-argument series is used instead
// of the integral representation.
double stable_series_crossover(StableIndex beta) noexcept;

namespace detail {
// Branch evaluators, exposed so tests can check the two agree at the crossover.
double stable_density_integral(double beta, double tau);
double stable_density_series(double beta, double tau);
double stable_cdf_integral(double beta, double t);
double stable_survival_series(double beta, double t);

double mittag_leffler_series(double beta, double z);
double mittag_leffler_integral(double beta, double z);
// Returns false when the asymptotic expansion cannot reach full precision.
bool mittag_leffler_asymptotic(double beta, double z, double& out);
}  // namespace detail

}  // namespace subdiff::specfun
