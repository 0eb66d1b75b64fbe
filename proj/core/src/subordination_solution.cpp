#include <cmath>
#include <sstream>

#include "subdiff/errors.hpp"
#include "subdiff/fracpde.hpp"
#include "subdiff/summation.hpp"

namespace subdiff::fracpde {

std::vector<double> subordination_solution(const subordination::MixtureSpec& spec,
                                           const SemigroupField& field, double t,
                                           double tail_tolerance) {
  const std::size_t nodes = field.tau.size();
  if (nodes < 2) throw PreconditionError("subordination_solution: need at least two tau nodes");
  if (field.points == 0 || field.values.size() != nodes * field.points)
    throw PreconditionError("subordination_solution: values do not match tau nodes x points");
  if (!(t > 0.0)) throw DomainError("subordination_solution: t must be positive");
  if (field.tau.front() < 0.0) throw DomainError("subordination_solution: negative tau node");
  for (std::size_t i = 1; i < nodes; ++i)
    if (!(field.tau[i] > field.tau[i - 1]))
      throw PreconditionError("subordination_solution: tau nodes must increase");

  // P(E_t > tau_max) = P(D_{tau_max} <= t)
  const double tail = subordination::mixture_cdf(spec, field.tau.back(), t);
  if (tail > tail_tolerance) {
    const double need = subordination::inverse_tail_horizon(spec, t, tail_tolerance, field.tau.back());
    std::ostringstream msg;
    msg << "subordination_solution: tau grid ends at " << field.tau.back() << " but the tail mass is "
        << tail << "; extend it to at least " << need;
    throw PreconditionError(msg.str());
  }

  // Trapezoid weights for int f_{E_t}(tau) p(tau) dtau, normalized so that a
  // tau-constant field is reproduced exactly.
  std::vector<double> w(nodes, 0.0);
  for (std::size_t i = 0; i < nodes; ++i) {
    const double f = subordination::inverse_density(spec, t, field.tau[i]);
    const double left = i > 0 ? field.tau[i] - field.tau[i - 1] : 0.0;
    const double right = i + 1 < nodes ? field.tau[i + 1] - field.tau[i] : 0.0;
    w[i] = 0.5 * (left + right) * f;
  }
  const double total = compensated_sum(w);
  if (!(total > 0.0)) throw SolverError("subordination_solution: quadrature weights vanish");
  for (double& v : w) v /= total;

  std::vector<double> out(field.points);
  for (std::size_t x = 0; x < field.points; ++x) {
    CompensatedSum acc;
    for (std::size_t i = 0; i < nodes; ++i) acc += w[i] * field.values[i * field.points + x];
    out[x] = acc.value();
  }
  return out;
}

}  // namespace subdiff::fracpde
