#pragma once

#include <complex>
#include <functional>
#include <variant>

#include "subdiff/rng.hpp"

namespace subdiff::levy {

struct NoJumps {};

// Finite-activity jumps: Poisson(rate) arrivals with i.i.d. sizes from
// `sample`; `characteristic` is E[exp(i xi J)]. `small_jump_mean` is
// E[J; |J| <= 1], the compensator term of the Levy-Khintchine integral; it is
// zero for laws supported in |w| >= 1.
struct CompoundPoisson {
  double rate = 0.0;
  std::function<double(rng::RandomStream&)> sample;
  std::function<std::complex<double>(double)> characteristic;
  double small_jump_mean = 0.0;
};

// Symmetric alpha-stable with E[exp(i xi L_t)] = exp(-t |xi|^alpha).
struct SymmetricStable {
  double alpha = 0.0;
};

using JumpPart = std::variant<NoJumps, CompoundPoisson, SymmetricStable>;

// One-dimensional Levy triplet (b, sigma^2, nu).
class LevyTriplet {
 public:
  LevyTriplet(double drift, double sigma2, JumpPart jumps = NoJumps{});

  static LevyTriplet none() { return LevyTriplet(0.0, 0.0); }
  static LevyTriplet brownian(double sigma2 = 1.0) { return LevyTriplet(0.0, sigma2); }
  static LevyTriplet symmetric_stable(double alpha);

  double drift() const noexcept { return drift_; }
  double sigma2() const noexcept { return sigma2_; }
  const JumpPart& jumps() const noexcept { return jumps_; }

  // True when every increment is identically zero.
  bool is_trivial() const noexcept;

 private:
  double drift_;
  double sigma2_;
  JumpPart jumps_;
};

// Jumps of fixed size w (|w| >= 1 needs no compensator).
CompoundPoisson point_mass_jumps(double rate, double size);
// Jump sizes uniform on [lo, hi].
CompoundPoisson uniform_jumps(double rate, double lo, double hi);

// Levy-Khintchine exponent Psi(xi); E[exp(i xi L_t)] = exp(t Psi(xi)).
std::complex<double> levy_symbol(const LevyTriplet& triplet, double xi);

// Draw of L_delta.
double sample_levy_increment(const LevyTriplet& triplet, double delta, rng::RandomStream& stream);

// Standard symmetric alpha-stable variate (Chambers-Mallows-Stuck).
double sample_symmetric_stable(double alpha, rng::RandomStream& stream);

// Exact Poisson variate by sequential inversion (large means are split).
unsigned long sample_poisson(double mean, rng::RandomStream& stream);

}  // namespace subdiff::levy
