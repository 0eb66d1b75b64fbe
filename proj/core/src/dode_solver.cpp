#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include "spectral.hpp"
#include "subdiff/errors.hpp"
#include "subdiff/fracpde.hpp"
#include "subdiff/summation.hpp"

namespace subdiff::fracpde {

namespace {

// Solves (c I - A_h) u = rhs in place; factorizations are cached per c.
class StepSolver {
 public:
  virtual ~StepSolver() = default;
  virtual void solve(double c, std::span<double> rhs) = 0;
};

class SparseStepSolver final : public StepSolver {
 public:
  SparseStepSolver(const DriftDiffusion& gen, const SpaceGrid& grid) : n_(grid.points) {
    // Columns of A_h are images of unit vectors; the stencil touches three.
    std::vector<Eigen::Triplet<double>> entries;
    std::vector<double> e(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      e[j] = 1.0;
      const auto col = gen.form == OperatorForm::kBackward ? backward_operator_apply(gen, grid, e)
                                                           : forward_operator_apply(gen, grid, e);
      for (std::size_t off : {n_ - 1, std::size_t{0}, std::size_t{1}}) {
        const std::size_t i = (j + off) % n_;
        if (col[i] != 0.0) entries.emplace_back(static_cast<int>(i), static_cast<int>(j), col[i]);
      }
      e[j] = 0.0;
    }
    a_.resize(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
    a_.setFromTriplets(entries.begin(), entries.end());
  }

  void solve(double c, std::span<double> rhs) override {
    auto& lu = factor(c);
    Eigen::Map<Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
    Eigen::VectorXd x = lu.solve(b);
    if (lu.info() != Eigen::Success) throw SolverError("sparse solve failed");
    b = x;
  }

 private:
  using Lu = Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>;

  Lu& factor(double c) {
    for (auto& [key, lu] : cache_)
      if (key == c) return *lu;
    Eigen::SparseMatrix<double> id(a_.rows(), a_.cols());
    id.setIdentity();
    Eigen::SparseMatrix<double> m = c * id - a_;
    m.makeCompressed();
    auto lu = std::make_unique<Lu>();
    lu->compute(m);
    if (lu->info() != Eigen::Success) {
      std::ostringstream msg;
      msg << "sparse LU failed for diagonal shift " << c << ": " << lu->lastErrorMessage();
      throw SolverError(msg.str());
    }
    cache_.emplace_back(c, std::move(lu));
    return *cache_.back().second;
  }

  std::size_t n_;
  Eigen::SparseMatrix<double> a_;
  std::vector<std::pair<double, std::unique_ptr<Lu>>> cache_;
};

// Constant g and constant killing: the system is diagonal in Fourier space.
class SpectralStepSolver final : public StepSolver {
 public:
  SpectralStepSolver(const FractionalLaplacian& gen, const SpaceGrid& grid, double g0, double q0)
      : fft_(grid.points), symbol_(detail::abs_frequency_power(grid.points, grid.half_width, gen.alpha)) {
    const double ga = std::pow(g0, gen.alpha);
    for (double& s : symbol_) s = ga * s + q0;
  }

  void solve(double c, std::span<double> rhs) override {
    if (c != cached_c_) {
      inverse_.resize(symbol_.size());
      for (std::size_t k = 0; k < symbol_.size(); ++k) inverse_[k] = 1.0 / (c + symbol_[k]);
      cached_c_ = c;
    }
    fft_.apply_multiplier(rhs, inverse_, rhs);
  }

 private:
  detail::RealFft fft_;
  std::vector<double> symbol_;  // -A_h in Fourier space
  std::vector<double> inverse_;
  double cached_c_ = std::nan("");
};

class DenseStepSolver final : public StepSolver {
 public:
  DenseStepSolver(const GeneratorSpec& gen, const SpaceGrid& grid) {
    const auto n = static_cast<Eigen::Index>(grid.points);
    a_.resize(n, n);
    std::vector<double> e(grid.points, 0.0);
    for (Eigen::Index j = 0; j < n; ++j) {
      e[static_cast<std::size_t>(j)] = 1.0;
      const auto col = generator_apply(gen, grid, e);
      for (Eigen::Index i = 0; i < n; ++i) a_(i, j) = col[static_cast<std::size_t>(i)];
      e[static_cast<std::size_t>(j)] = 0.0;
    }
  }

  void solve(double c, std::span<double> rhs) override {
    auto& lu = factor(c);
    Eigen::Map<Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
    Eigen::VectorXd x = lu.solve(b);
    if (!x.allFinite()) throw SolverError("dense solve produced non-finite values");
    b = x;
  }

 private:
  Eigen::PartialPivLU<Eigen::MatrixXd>& factor(double c) {
    for (auto& [key, lu] : cache_)
      if (key == c) return *lu;
    Eigen::MatrixXd m = -a_;
    m.diagonal().array() += c;
    cache_.emplace_back(c, std::make_unique<Eigen::PartialPivLU<Eigen::MatrixXd>>(m));
    return *cache_.back().second;
  }

  Eigen::MatrixXd a_;
  std::vector<std::pair<double, std::unique_ptr<Eigen::PartialPivLU<Eigen::MatrixXd>>>> cache_;
};

bool constant_on_grid(const ScalarFunction& f, const SpaceGrid& grid, double& value) {
  value = f ? f(grid.x(0)) : 0.0;
  if (!f) return true;
  for (std::size_t m = 1; m < grid.points; ++m)
    if (f(grid.x(m)) != value) return false;
  return true;
}

std::unique_ptr<StepSolver> make_step_solver(const GeneratorSpec& gen, const SpaceGrid& grid) {
  if (const auto* dd = std::get_if<DriftDiffusion>(&gen))
    return std::make_unique<SparseStepSolver>(*dd, grid);
  const auto& fl = std::get<FractionalLaplacian>(gen);
  if (!(fl.alpha > 0.0 && fl.alpha < 2.0))
    throw DomainError("fractional Laplacian: alpha must lie in (0, 2)");
  double g0 = 1.0;
  double q0 = 0.0;
  const bool const_g = !fl.g || constant_on_grid(fl.g, grid, g0);
  if (!fl.g) g0 = 1.0;
  if (g0 < 0.0) throw DomainError("fractional Laplacian: g is negative on the grid");
  if (const_g && constant_on_grid(fl.killing, grid, q0))
    return std::make_unique<SpectralStepSolver>(fl, grid, g0, q0);
  return std::make_unique<DenseStepSolver>(gen, grid);
}

bool is_forward(const GeneratorSpec& gen) {
  if (const auto* dd = std::get_if<DriftDiffusion>(&gen)) return dd->form == OperatorForm::kForward;
  return true;
}

// Starting weights w[n][r-1], r = 1..min(m, n), such that the corrected L1
// sum reproduces D^beta t^sigma exactly at t_n for each sigma in exps
// (in units of the step: the caller scales by dt^{-beta}).
std::vector<std::vector<double>> correction_weights(double beta, const std::vector<double>& exps,
                                                    const std::vector<double>& bt,
                                                    std::size_t steps) {
  const std::size_t m = exps.size();
  std::vector<std::vector<double>> w(steps + 1);
  if (m == 0) return w;
  // pw[s][j] = j^{sigma_s}
  std::vector<std::vector<double>> pw(m, std::vector<double>(steps + 1));
  for (std::size_t s = 0; s < m; ++s)
    for (std::size_t j = 0; j <= steps; ++j) pw[s][j] = std::pow(static_cast<double>(j), exps[s]);

  for (std::size_t n = 1; n <= steps; ++n) {
    const std::size_t mn = std::min(m, n);
    Eigen::MatrixXd v(static_cast<Eigen::Index>(mn), static_cast<Eigen::Index>(mn));
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(mn));
    for (std::size_t s = 0; s < mn; ++s) {
      const double sigma = exps[s];
      const double exact = std::tgamma(sigma + 1.0) / std::tgamma(sigma + 1.0 - beta) *
                           std::pow(static_cast<double>(n), sigma - beta);
      CompensatedSum l1;
      for (std::size_t i = 0; i < n; ++i) l1 += bt[i] * (pw[s][n - i] - pw[s][n - i - 1]);
      rhs(static_cast<Eigen::Index>(s)) = exact - l1.value();
      for (std::size_t r = 1; r <= mn; ++r)
        v(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(r - 1)) = pw[s][r];
    }
    Eigen::VectorXd sol = v.fullPivLu().solve(rhs);
    w[n].assign(sol.data(), sol.data() + sol.size());
  }
  return w;
}

}  // namespace

DodeSolution solve_dode(const DistributedOrder& order, const GeneratorSpec& gen,
                        std::span<const double> phi, const SpaceGrid& space,
                        const TimeGrid& time, const SolveOptions& options) {
  if (phi.size() != space.points) throw PreconditionError("solve_dode: phi does not match the grid");
  if (!(time.step > 0.0)) throw DomainError("solve_dode: time step must be positive");
  for (double v : phi)
    if (!std::isfinite(v)) throw DomainError("solve_dode: phi has non-finite values");

  const std::size_t nt = time.steps;
  const std::size_t nx = space.points;
  FieldOnGrid field(time, space);
  std::copy(phi.begin(), phi.end(), field.slice(0).begin());

  auto solver = make_step_solver(gen, space);

  std::vector<double> exps;
  if (options.singularity_correction) {
    for (const auto& a : order.atoms()) exps.push_back(a.beta);
    std::sort(exps.begin(), exps.end());
    exps.erase(std::unique(exps.begin(), exps.end()), exps.end());
  }
  const std::size_t m = exps.size();

  // Combined lag weights lag[j] = sum_k coef_k bt_k[j] and corrections.
  std::vector<double> lag(nt + 1, 0.0);
  std::vector<std::vector<double>> corr(nt + 1, std::vector<double>(std::min(m, nt), 0.0));
  for (const auto& atom : order.atoms()) {
    const double coef = atom.weight * std::pow(time.step, -atom.beta);
    std::vector<double> bt(nt + 1);
    const double g2 = std::tgamma(2.0 - atom.beta);
    double prev = 0.0;
    for (std::size_t j = 0; j <= nt; ++j) {
      const double next = std::pow(static_cast<double>(j + 1), 1.0 - atom.beta);
      bt[j] = (next - prev) / g2;
      prev = next;
      lag[j] += coef * bt[j];
    }
    const auto w = correction_weights(atom.beta, exps, bt, nt);
    for (std::size_t n = 1; n <= nt; ++n)
      for (std::size_t r = 0; r < w[n].size(); ++r) corr[n][r] += coef * w[n][r];
  }

  std::vector<double> diffs(nt * nx, 0.0);  // d^i = u^i - u^{i-1}, i = 1..nt
  std::vector<double> sum(nx), comp(nx), rhs(nx);
  const auto u0 = field.slice(0);

  for (std::size_t n = 1; n <= nt; ++n) {
    // history H_m = sum_{j=1}^{n-1} lag[j] d^{n-j}_m, compensated per node
    std::fill(sum.begin(), sum.end(), 0.0);
    std::fill(comp.begin(), comp.end(), 0.0);
    for (std::size_t j = 1; j < n; ++j) {
      const double wj = lag[j];
      const double* d = diffs.data() + (n - j - 1) * nx;
      for (std::size_t x = 0; x < nx; ++x) {
        const double term = wj * d[x];
        const double t = sum[x] + term;
        if (std::abs(sum[x]) >= std::abs(term))
          comp[x] += (sum[x] - t) + term;
        else
          comp[x] += (term - t) + sum[x];
        sum[x] = t;
      }
    }

    const auto prev = field.slice(n - 1);
    double diag = lag[0];
    for (std::size_t x = 0; x < nx; ++x) rhs[x] = lag[0] * prev[x] - (sum[x] + comp[x]);
    const std::size_t mn = std::min(m, n);
    for (std::size_t r = 1; r <= mn; ++r) {
      const double c = corr[n][r - 1];
      if (r == n) {
        diag += c;
        for (std::size_t x = 0; x < nx; ++x) rhs[x] += c * u0[x];
      } else {
        const auto ur = field.slice(r);
        for (std::size_t x = 0; x < nx; ++x) rhs[x] -= c * (ur[x] - u0[x]);
      }
    }

    solver->solve(diag, rhs);
    auto un = field.slice(n);
    double* d = diffs.data() + (n - 1) * nx;
    for (std::size_t x = 0; x < nx; ++x) {
      if (!std::isfinite(rhs[x])) {
        std::ostringstream msg;
        msg << "solve_dode: non-finite value at step " << n << ", node " << x;
        throw SolverError(msg.str());
      }
      un[x] = rhs[x];
      d[x] = un[x] - prev[x];
    }
  }

  SolverDiagnostics diag;
  const double mass0 = field.mass(0);
  for (std::size_t n = 0; n <= nt; ++n)
    diag.max_mass_drift = std::max(diag.max_mass_drift, std::abs(field.mass(n) - mass0));
  diag.min_value = *std::min_element(field.values().begin(), field.values().end());
  const auto last = field.slice(nt);
  for (std::size_t x = 0; x < nx; ++x)
    if (std::abs(space.x(x)) > 0.9 * space.half_width) diag.boundary_mass += std::abs(last[x]) * space.dx();
  if (is_forward(gen) && diag.max_mass_drift > options.mass_drift_warning) {
    std::ostringstream msg;
    msg << "mass drift " << diag.max_mass_drift << " exceeds " << options.mass_drift_warning;
    diag.warnings.push_back(msg.str());
  }
  return DodeSolution{std::move(field), std::move(diag)};
}

}  // namespace subdiff::fracpde
