#include "subdiff/subordination.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "subdiff/errors.hpp"

namespace subdiff::subordination {
namespace {

// Central-difference step for the two-component density: 1/512 of the
// validated tau range [0, 6].
constexpr double kDifferentiationStep = 6.0 / 512.0;
constexpr double kConvolutionTol = 1e-11;

boost::math::quadrature::tanh_sinh<double>& tanh_sinh_rule() {
  thread_local boost::math::quadrature::tanh_sinh<double> rule(12);
  return rule;
}

void require_at_most_two(const MixtureSpec& spec, const char* where) {
  if (spec.size() > 2) {
    throw UnsupportedError(std::string(where) +
                           ": closed-form inverse distributions support at most two "
                           "components; use Monte Carlo for larger mixtures");
  }
}

// P(a S1 + b S2 <= t) = int_0^{t/b} F1((t - b y)/a) f2(y) dy.
double two_component_cdf(StableIndex beta1, double a, StableIndex beta2, double b, double t) {
  const double upper = t / b;
  auto integrand = [&](double y) {
    if (y <= 0.0 || y >= upper) return 0.0;
    const double f2 = specfun::stable_density(beta2, y);
    if (f2 == 0.0) return 0.0;
    return specfun::stable_cdf(beta1, (t - b * y) / a) * f2;
  };
  return tanh_sinh_rule().integrate(integrand, 0.0, upper, kConvolutionTol);
}

}  // namespace

MixtureSpec::MixtureSpec(std::vector<MixtureAtom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw DomainError("MixtureSpec: at least one component is required");
  for (const auto& atom : atoms_) {
    if (!(atom.scale > 0.0) || !std::isfinite(atom.scale)) {
      throw DomainError("MixtureSpec: component scales must be positive and finite");
    }
  }
}

MixtureSpec MixtureSpec::single(double beta, double scale) {
  return MixtureSpec({MixtureAtom{scale, StableIndex(beta)}});
}

double MixtureSpec::min_index() const noexcept {
  double m = 1.0;
  for (const auto& a : atoms_) m = std::min(m, a.index.value());
  return m;
}

double MixtureSpec::max_index() const noexcept {
  double m = 0.0;
  for (const auto& a : atoms_) m = std::max(m, a.index.value());
  return m;
}

double sample_stable_increment(StableIndex beta, double delta, rng::RandomStream& stream) {
  if (!(delta > 0.0)) throw DomainError("sample_stable_increment: delta must be positive");
  const double b = beta.value();
  const double u = std::numbers::pi * stream.uniform();
  const double w = stream.exponential();
  const double s = std::pow(specfun::kanter_function(b, u) / w, (1.0 - b) / b);
  return std::pow(delta, 1.0 / b) * s;
}

std::vector<rng::RandomStream> component_streams(const MixtureSpec& spec, std::uint64_t seed,
                                                 std::uint64_t path_index) {
  std::vector<rng::RandomStream> streams;
  streams.reserve(spec.size());
  for (std::size_t k = 0; k < spec.size(); ++k) {
    streams.emplace_back(seed, std::initializer_list<std::uint64_t>{
                                   static_cast<std::uint64_t>(rng::StreamRole::kSubordinator),
                                   path_index, k});
  }
  return streams;
}

SubordinatorPath sample_mixture_path(const MixtureSpec& spec, double delta, double t_max,
                                     std::span<rng::RandomStream> streams,
                                     std::size_t max_steps) {
  if (!(delta > 0.0)) throw DomainError("sample_mixture_path: delta must be positive");
  if (!(t_max > 0.0)) throw DomainError("sample_mixture_path: t_max must be positive");
  if (streams.size() != spec.size()) {
    throw PreconditionError("sample_mixture_path: need one random stream per component");
  }
  for (std::size_t i = 0; i < streams.size(); ++i) {
    for (std::size_t j = i + 1; j < streams.size(); ++j) {
      if (streams[i] == streams[j]) {
        throw PreconditionError("sample_mixture_path: components must use distinct streams");
      }
    }
  }

  const auto& atoms = spec.atoms();
  std::vector<double> scale(atoms.size());
  std::vector<double> exponent(atoms.size());
  std::vector<double> kanter_power(atoms.size());
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    const double b = atoms[k].index.value();
    scale[k] = atoms[k].scale * std::pow(delta, 1.0 / b);
    exponent[k] = b;
    kanter_power[k] = (1.0 - b) / b;
  }

  SubordinatorPath path;
  path.delta = delta;
  path.values.push_back(0.0);
  double d = 0.0;
  while (d <= t_max) {
    if (path.values.size() > max_steps) {
      throw ResourceError("sample_mixture_path: exceeded " + std::to_string(max_steps) +
                          " steps before passing t_max");
    }
    double inc = 0.0;
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      const double u = std::numbers::pi * streams[k].uniform();
      const double w = streams[k].exponential();
      inc += scale[k] * std::pow(specfun::kanter_function(exponent[k], u) / w, kanter_power[k]);
    }
    const double next = d + inc;
    // Increments below half an ulp of d would stall the path.
    d = next > d ? next : std::nextafter(d, std::numeric_limits<double>::infinity());
    path.values.push_back(d);
  }
  return path;
}

std::size_t first_passage_index(const SubordinatorPath& path, double t) {
  if (!(t >= 0.0)) throw DomainError("inverse_process: t must be nonnegative");
  if (path.values.empty() || !(path.values.back() > t)) {
    throw PreconditionError("inverse_process: path ends at " +
                            std::to_string(path.values.empty() ? 0.0 : path.values.back()) +
                            " and must be extended beyond t = " + std::to_string(t));
  }
  const auto it = std::upper_bound(path.values.begin(), path.values.end(), t);
  return static_cast<std::size_t>(it - path.values.begin());
}

double inverse_process(const SubordinatorPath& path, double t) {
  return path.delta * static_cast<double>(first_passage_index(path, t));
}

double mixture_laplace_exponent(const MixtureSpec& spec, double s) {
  if (!(s >= 0.0)) throw DomainError("mixture_laplace_exponent: s must be nonnegative");
  if (s == 0.0) return 0.0;
  double acc = 0.0;
  for (const auto& atom : spec.atoms()) {
    const double b = atom.index.value();
    acc += std::pow(atom.scale, b) * std::pow(s, b);
  }
  return -acc;
}

double mixture_cdf(const MixtureSpec& spec, double tau, double t) {
  require_at_most_two(spec, "mixture_cdf");
  if (!(tau >= 0.0) || !(t >= 0.0)) throw DomainError("mixture_cdf: arguments must be >= 0");
  if (tau == 0.0) return 1.0;
  if (t == 0.0) return 0.0;
  const auto& atoms = spec.atoms();
  const double a = atoms[0].scale * std::pow(tau, 1.0 / atoms[0].index.value());
  if (atoms.size() == 1) return specfun::stable_cdf(atoms[0].index, t / a);
  const double b = atoms[1].scale * std::pow(tau, 1.0 / atoms[1].index.value());
  return two_component_cdf(atoms[0].index, a, atoms[1].index, b, t);
}

double inverse_cdf(const MixtureSpec& spec, double t, double tau) {
  if (!(t > 0.0)) throw DomainError("inverse_cdf: t must be positive");
  return 1.0 - mixture_cdf(spec, tau, t);
}

double inverse_density(const MixtureSpec& spec, double t, double tau) {
  require_at_most_two(spec, "inverse_density");
  if (!(t > 0.0)) throw DomainError("inverse_density: t must be positive");
  if (!(tau >= 0.0)) throw DomainError("inverse_density: tau must be nonnegative");
  const auto& atoms = spec.atoms();
  if (tau == 0.0) {
    // f_{E_t}(0+) is the tail of the Levy measure of D at t.
    double tail = 0.0;
    for (const auto& a : atoms) {
      const double b = a.index.value();
      tail += std::pow(a.scale / t, b) / std::tgamma(1.0 - b);
    }
    return tail;
  }
  if (atoms.size() == 1) {
    const double b = atoms[0].index.value();
    const double c = atoms[0].scale;
    // P(E_t <= tau) = 1 - F(x), x = t / (c tau^{1/b}); dx/dtau = -x / (b tau).
    const double x = t / (c * std::pow(tau, 1.0 / b));
    return specfun::stable_density(atoms[0].index, x) * x / (b * tau);
  }
  const double h = std::min(kDifferentiationStep, 0.5 * tau);
  // f_E(tau) = d/dtau P(E_t <= tau) = -d/dtau P(D_tau <= t).
  return (mixture_cdf(spec, tau - h, t) - mixture_cdf(spec, tau + h, t)) / (2.0 * h);
}

double inverse_tail_horizon(const MixtureSpec& spec, double t, double tail, double tau0) {
  if (!(tail > 0.0 && tail < 1.0)) throw DomainError("inverse_tail_horizon: tail in (0, 1)");
  double tau = tau0;
  for (int i = 0; i < 60; ++i) {
    if (mixture_cdf(spec, tau, t) <= tail) return tau;
    tau *= 2.0;
  }
  throw SolverError("inverse_tail_horizon: no horizon found");
}

namespace {

// int_0^inf w(tau) P(D_tau <= t) dtau, truncated where the tail is negligible.
template <class Weight>
double integrate_survival(const MixtureSpec& spec, double t, Weight w) {
  const double horizon = inverse_tail_horizon(spec, t, 1e-14);
  auto f = [&](double tau) { return w(tau) * mixture_cdf(spec, tau, t); };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, horizon, 8, 1e-11);
}

}  // namespace

double inverse_mean(const MixtureSpec& spec, double t) {
  require_at_most_two(spec, "inverse_mean");
  if (!(t >= 0.0)) throw DomainError("inverse_mean: t must be >= 0");
  if (t == 0.0) return 0.0;
  if (spec.size() == 1) {
    const auto& a = spec.atoms()[0];
    return std::pow(t / a.scale, a.index.value()) / std::tgamma(1.0 + a.index.value());
  }
  return integrate_survival(spec, t, [](double) { return 1.0; });
}

double inverse_laplace(const MixtureSpec& spec, double t, double s) {
  require_at_most_two(spec, "inverse_laplace");
  if (!(t >= 0.0) || !(s >= 0.0)) throw DomainError("inverse_laplace: arguments must be >= 0");
  if (t == 0.0 || s == 0.0) return 1.0;
  if (spec.size() == 1) {
    const auto& a = spec.atoms()[0];
    const double beta = a.index.value();
    return specfun::mittag_leffler(beta, -s * std::pow(t / a.scale, beta));
  }
  return 1.0 - s * integrate_survival(spec, t, [s](double tau) { return std::exp(-s * tau); });
}

}  // namespace subdiff::subordination
