#include "subdiff/levy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "subdiff/errors.hpp"

namespace subdiff::levy {
namespace {

constexpr double kPoissonChunk = 30.0;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

unsigned long poisson_inversion(double mean, rng::RandomStream& stream) {
  const double u = stream.uniform();
  double p = std::exp(-mean);
  double cdf = p;
  unsigned long k = 0;
  while (u > cdf) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
    if (p == 0.0) break;  // rounding left u above the attainable cdf
  }
  return k;
}

}  // namespace

LevyTriplet::LevyTriplet(double drift, double sigma2, JumpPart jumps)
    : drift_(drift), sigma2_(sigma2), jumps_(std::move(jumps)) {
  if (!std::isfinite(drift_)) throw DomainError("LevyTriplet: drift must be finite");
  if (!(sigma2_ >= 0.0) || !std::isfinite(sigma2_)) {
    throw DomainError("LevyTriplet: sigma2 must be nonnegative");
  }
  std::visit(Overloaded{
                 [](const NoJumps&) {},
                 [](const CompoundPoisson& cp) {
                   if (!(cp.rate > 0.0)) throw DomainError("LevyTriplet: jump rate must be > 0");
                   if (!cp.sample || !cp.characteristic) {
                     throw DomainError("LevyTriplet: compound Poisson needs sampler and "
                                       "characteristic function");
                   }
                 },
                 [](const SymmetricStable& s) {
                   if (!(s.alpha > 0.0 && s.alpha < 2.0)) {
                     throw DomainError("LevyTriplet: stable alpha must lie in (0, 2)");
                   }
                 },
             },
             jumps_);
}

LevyTriplet LevyTriplet::symmetric_stable(double alpha) {
  return LevyTriplet(0.0, 0.0, SymmetricStable{alpha});
}

bool LevyTriplet::is_trivial() const noexcept {
  return drift_ == 0.0 && sigma2_ == 0.0 && std::holds_alternative<NoJumps>(jumps_);
}

CompoundPoisson point_mass_jumps(double rate, double size) {
  CompoundPoisson cp;
  cp.rate = rate;
  cp.sample = [size](rng::RandomStream&) { return size; };
  cp.characteristic = [size](double xi) { return std::polar(1.0, xi * size); };
  cp.small_jump_mean = std::abs(size) <= 1.0 ? size : 0.0;
  return cp;
}

CompoundPoisson uniform_jumps(double rate, double lo, double hi) {
  if (!(hi > lo)) throw DomainError("uniform_jumps: need lo < hi");
  CompoundPoisson cp;
  cp.rate = rate;
  cp.sample = [lo, hi](rng::RandomStream& s) { return lo + (hi - lo) * s.uniform(); };
  cp.characteristic = [lo, hi](double xi) -> std::complex<double> {
    if (xi == 0.0) return 1.0;
    const std::complex<double> i(0.0, 1.0);
    return (std::exp(i * xi * hi) - std::exp(i * xi * lo)) / (i * xi * (hi - lo));
  };
  // E[J; |J| <= 1] for J ~ U[lo, hi].
  const double a = std::max(lo, -1.0);
  const double b = std::min(hi, 1.0);
  cp.small_jump_mean = b > a ? (b * b - a * a) / (2.0 * (hi - lo)) : 0.0;
  return cp;
}

std::complex<double> levy_symbol(const LevyTriplet& triplet, double xi) {
  if (xi == 0.0) return 0.0;
  std::complex<double> psi(-0.5 * triplet.sigma2() * xi * xi, triplet.drift() * xi);
  std::visit(Overloaded{
                 [](const NoJumps&) {},
                 [&](const CompoundPoisson& cp) {
                   psi += cp.rate * (cp.characteristic(xi) - 1.0 -
                                     std::complex<double>(0.0, xi * cp.small_jump_mean));
                 },
                 [&](const SymmetricStable& s) { psi -= std::pow(std::abs(xi), s.alpha); },
             },
             triplet.jumps());
  return psi;
}

double sample_symmetric_stable(double alpha, rng::RandomStream& stream) {
  const double v = std::numbers::pi * (stream.uniform() - 0.5);
  const double w = stream.exponential();
  if (alpha == 1.0) return std::tan(v);
  return std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha) *
         std::pow(std::cos((1.0 - alpha) * v) / w, (1.0 - alpha) / alpha);
}

unsigned long sample_poisson(double mean, rng::RandomStream& stream) {
  if (!(mean >= 0.0)) throw DomainError("sample_poisson: mean must be nonnegative");
  unsigned long n = 0;
  while (mean > kPoissonChunk) {
    n += poisson_inversion(kPoissonChunk, stream);
    mean -= kPoissonChunk;
  }
  if (mean > 0.0) n += poisson_inversion(mean, stream);
  return n;
}

double sample_levy_increment(const LevyTriplet& triplet, double delta, rng::RandomStream& stream) {
  if (!(delta > 0.0)) throw DomainError("sample_levy_increment: delta must be positive");
  double x = triplet.drift() * delta;
  if (triplet.sigma2() > 0.0) x += std::sqrt(triplet.sigma2() * delta) * stream.normal();
  std::visit(Overloaded{
                 [](const NoJumps&) {},
                 [&](const CompoundPoisson& cp) {
                   const unsigned long n = sample_poisson(cp.rate * delta, stream);
                   for (unsigned long i = 0; i < n; ++i) x += cp.sample(stream);
                   x -= cp.rate * delta * cp.small_jump_mean;
                 },
                 [&](const SymmetricStable& s) {
                   x += std::pow(delta, 1.0 / s.alpha) * sample_symmetric_stable(s.alpha, stream);
                 },
             },
             triplet.jumps());
  return x;
}

}  // namespace subdiff::levy
