#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <numbers>
#include <sstream>

#include "subdiff/errors.hpp"
#include "subdiff/field_io.hpp"
#include "subdiff/harness/experiments.hpp"
#include "subdiff/harness/ks.hpp"
#include "subdiff/parallel.hpp"
#include "subdiff/rng.hpp"
#include "subdiff/specfun.hpp"
#include "subdiff/summation.hpp"

#ifndef SUBDIFF_VERSION
#define SUBDIFF_VERSION "unknown"
#endif

namespace subdiff::harness {

namespace {

namespace fs = std::filesystem;
using fracpde::DistributedOrder;
using fracpde::SpaceGrid;
using fracpde::TimeGrid;
using subordination::MixtureSpec;

class Run {
 public:
  Run(const ExperimentConfig& cfg, const RunOptions& opt, ComparisonReport& report)
      : cfg(cfg), opt(opt), report(report),
        dir(opt.out_dir.empty() ? fs::path(cfg.output_dir) : opt.out_dir) {
    if (opt.write_files) fs::create_directories(dir);
  }

  // Seed of one independent stream family: (master seed, experiment, label).
  std::uint64_t seed(std::uint64_t label = 0) const {
    rng::RandomStream s(cfg.seed, {static_cast<std::uint64_t>(rng::StreamRole::kAuxiliary),
                                   static_cast<std::uint64_t>(cfg.kind) + 1, label});
    return s.next_u64();
  }

  void emit(const std::string& name, const CsvTable& table) {
    if (opt.write_files) table.write(dir / name);
    report.files.push_back(name);
  }

  void emit_field(const std::string& name, const fracpde::FieldOnGrid& field) {
    if (opt.write_files) field_io::save(dir / name, field);
    report.files.push_back(name);
  }

  void metric(std::string name, double value) { report.metrics.push_back({std::move(name), value}); }

  sde::SimulationOptions sim_options() const {
    sde::SimulationOptions o;
    o.delta = cfg.grids.delta;
    o.workers = opt.workers;
    return o;
  }

  const ExperimentConfig& cfg;
  const RunOptions& opt;
  ComparisonReport& report;
  fs::path dir;
};

std::string label(const std::string& prefix, double v) {
  std::ostringstream s;
  s << prefix << "=" << v;
  return s.str();
}

// ---------------------------------------------------------------------------

void subordinator_check(Run& run) {
  const auto& cfg = run.cfg;
  const MixtureSpec spec = mixture_spec(cfg);
  const std::size_t n = cfg.n_paths;
  const std::uint64_t seed = run.seed();

  std::vector<double> d1(n);
  parallel_for(n, run.opt.workers, [&](std::size_t i) {
    auto streams = subordination::component_streams(spec, seed, i);
    double sum = 0.0;
    for (std::size_t k = 0; k < spec.size(); ++k) {
      const auto& atom = spec.atoms()[k];
      sum += atom.scale * subordination::sample_stable_increment(atom.index, 1.0, streams[k]);
    }
    d1[i] = sum;
  });

  CsvTable table({"s", "empirical", "std_error", "exact", "abs_error", "log_error", "tolerance",
                  "pass"});
  std::vector<double> weights(n);
  for (double s : cfg.s_values) {
    for (std::size_t i = 0; i < n; ++i) weights[i] = std::exp(-s * d1[i]);
    const auto m = sample_moments(weights);
    const double exponent = subordination::mixture_laplace_exponent(spec, s);
    const double exact = std::exp(exponent);
    const double abs_error = std::abs(m.mean - exact);
    const double log_error = std::abs(std::log(m.mean) - exponent);
    bool pass;
    double tol;
    if (spec.size() == 1) {
      tol = 3.0 * m.std_error;
      pass = run.report
                 .add_check(label("laplace s", s), "abs_error", abs_error, tol, "3*SE", m.std_error)
                 .pass;
    } else {
      // delta method: SE of log(mean) = SE / mean
      tol = 3.0 * m.std_error / m.mean;
      pass = run.report
                 .add_check(label("log-laplace s", s), "abs_error", log_error, tol, "3*SE/mean",
                            m.std_error / m.mean)
                 .pass;
    }
    table.row() << s << m.mean << m.std_error << exact << abs_error << log_error << tol << pass;
  }
  run.emit("laplace.csv", table);

  if (spec.size() == 1) {
    // The CDF costs a quadrature per point, so only a prefix is tested.
    const std::size_t k = std::min<std::size_t>(n, 2000);
    const auto& atom = spec.atoms()[0];
    const double ks = ks_distance(std::span(d1).first(k), [&](double x) {
      return specfun::stable_cdf(atom.index, x / atom.scale);
    });
    run.report.add_check("ks D_1 (first " + std::to_string(k) + " samples)", "ks", ks,
                         1.95 / std::sqrt(static_cast<double>(k)), "0.1% critical value 1.95/sqrt(n)");
  }
}

// ---------------------------------------------------------------------------

void inverse_moments(Run& run) {
  const auto& cfg = run.cfg;
  const MixtureSpec spec = mixture_spec(cfg);
  const std::size_t n = cfg.n_paths;
  const std::uint64_t seed = run.seed();
  const double delta = cfg.grids.delta;
  std::vector<double> times = cfg.times;
  const double t_max = *std::max_element(times.begin(), times.end());
  const std::size_t nt = times.size();

  std::vector<double> e(n * nt);
  parallel_for(n, run.opt.workers, [&](std::size_t i) {
    auto streams = subordination::component_streams(spec, seed, i);
    const auto path = subordination::sample_mixture_path(spec, delta, t_max, streams);
    for (std::size_t j = 0; j < nt; ++j) e[i * nt + j] = subordination::inverse_process(path, times[j]);
  });

  CsvTable table({"t", "quantity", "estimate", "std_error", "reference", "abs_error", "tolerance",
                  "pass"});
  std::vector<double> column(n);
  for (std::size_t j = 0; j < nt; ++j) {
    const double t = times[j];
    for (std::size_t i = 0; i < n; ++i) column[i] = e[i * nt + j];
    const auto mean = sample_moments(column);
    const double ref_mean = subordination::inverse_mean(spec, t);
    const double tol_mean = 3.0 * mean.std_error + delta;
    const bool pass_mean = run.report
                               .add_check(label("E[E_t] t", t), "abs_error",
                                          std::abs(mean.mean - ref_mean), tol_mean,
                                          "3*SE + delta (grid overshoot of E_t)", mean.std_error)
                               .pass;
    table.row() << t << "mean" << mean.mean << mean.std_error << ref_mean
                << std::abs(mean.mean - ref_mean) << tol_mean << pass_mean;

    for (std::size_t i = 0; i < n; ++i) column[i] = std::exp(-e[i * nt + j]);
    const auto lap = sample_moments(column);
    const double ref_lap = subordination::inverse_laplace(spec, t, 1.0);
    const double tol_lap = 3.0 * lap.std_error;
    const bool pass_lap = run.report
                              .add_check(label("E[exp(-E_t)] t", t), "abs_error",
                                         std::abs(lap.mean - ref_lap), tol_lap, "3*SE",
                                         lap.std_error)
                              .pass;
    table.row() << t << "laplace" << lap.mean << lap.std_error << ref_lap
                << std::abs(lap.mean - ref_lap) << tol_lap << pass_lap;
  }
  run.emit("moments.csv", table);
}

// ---------------------------------------------------------------------------

SpaceGrid space_grid(const ExperimentConfig& cfg) {
  return fracpde::make_space_grid(cfg.grids.half_width, cfg.grids.dx);
}

TimeGrid time_grid(const ExperimentConfig& cfg, double dt) {
  const double steps = std::round(cfg.grids.t_max / dt);
  if (steps < 2.0 || std::abs(steps * dt - cfg.grids.t_max) > 1e-9 * cfg.grids.t_max)
    throw ConfigError("grids/dt", "t_max must be a multiple of dt with at least two steps");
  return TimeGrid{dt, static_cast<std::size_t>(steps)};
}

// Density invariants of the final slice reported as checks.
void density_checks(Run& run, const fracpde::DodeSolution& sol) {
  const auto& f = sol.field;
  double worst_mass = 0.0;
  for (std::size_t k = 0; k < f.time().nodes(); ++k)
    worst_mass = std::max(worst_mass, std::abs(f.mass(k) - 1.0));
  run.report.add_check("pde negativity", "max(-u)", std::max(0.0, -sol.diagnostics.min_value), 1e-8,
                       "density invariant eps_neg");
  run.report.add_check("pde mass", "max |mass - 1|", worst_mass, 1e-4, "density invariant");
  run.metric("pde_boundary_mass", sol.diagnostics.boundary_mass);
  if (sol.diagnostics.boundary_mass > 1e-6)
    run.report.warnings.push_back("boundary mass " + format_double(sol.diagnostics.boundary_mass) +
                                  " exceeds 1e-6; consider a wider box");
  for (const auto& w : sol.diagnostics.warnings) run.report.warnings.push_back(w);
}

// Heat kernel with variance v averaged over each grid cell, periodized.
void cell_averaged_gaussian(const SpaceGrid& grid, double x0, double v, double* out) {
  const double dx = grid.dx();
  const double period = 2.0 * grid.half_width;
  for (std::size_t m = 0; m < grid.points; ++m) out[m] = 0.0;
  if (v == 0.0) {
    out[grid.nearest(x0)] = 1.0 / dx;
    return;
  }
  const double s = std::sqrt(2.0 * v);
  for (std::size_t m = 0; m < grid.points; ++m) {
    double acc = 0.0;
    for (int image = -1; image <= 1; ++image) {
      const double c = grid.x(m) - x0 + image * period;
      acc += 0.5 * (std::erf((c + 0.5 * dx) / s) - std::erf((c - 0.5 * dx) / s));
    }
    out[m] = acc / dx;
  }
}

void mc_vs_pde(Run& run) {
  const auto& cfg = run.cfg;
  const MixtureSpec spec = mixture_spec(cfg);
  const DistributedOrder order = distributed_order(cfg);
  const auto coeffs = sde_coefficients(cfg);
  const auto triplet = driver_triplet(cfg);
  const double t = cfg.grids.t_max;

  const std::vector<double> t_grid{t};
  const auto ensemble = sde::simulate_time_changed_sde(coeffs, triplet, spec, cfg.x0, t_grid,
                                                       cfg.n_paths, run.seed(), run.sim_options());
  const auto xt = ensemble.marginal(0);

  // Forward equation for the same dynamics: b = drift, sigma^2 = diffusion^2
  // plus g^2 times the variance rate of a Brownian driver.
  const auto poly = polynomial_coefficients(cfg.coefficients);
  const auto b = polynomial(poly.drift);
  const auto sig = polynomial(poly.diffusion);
  const auto g = polynomial(poly.jump);
  const double driver_var = cfg.driver.type == "brownian" ? cfg.driver.sigma2 : 0.0;
  fracpde::DriftDiffusion gen;
  gen.form = fracpde::OperatorForm::kForward;
  gen.drift = b;
  if (sig || (g && driver_var > 0.0)) {
    gen.sigma2 = [sig, g, driver_var](double x) {
      const double s = sig ? sig(x) : 0.0;
      const double j = g ? g(x) : 0.0;
      return s * s + driver_var * j * j;
    };
  }
  const SpaceGrid space = space_grid(cfg);
  const TimeGrid time = time_grid(cfg, cfg.grids.dt);
  const auto sol = fracpde::solve_dode(order, gen, fracpde::discrete_delta(space, cfg.x0), space, time);
  const auto last = sol.field.slice(time.steps);
  density_checks(run, sol);

  const fracpde::SliceCdf cdf(space, last);
  const double ks = ks_distance(xt, [&](double x) { return cdf(x); });
  run.report.add_check("ks X_t vs forward equation", "ks", ks, cfg.ks_tolerance,
                       "configured KS tolerance");

  const auto kde = kernel_density(xt, space);
  double l1 = 0.0;
  for (std::size_t m = 0; m < space.points; ++m) l1 += std::abs(kde.density[m] - last[m]) * space.dx();
  run.metric("kde_bandwidth", kde.bandwidth);
  run.metric("kde_l1_distance", l1);

  // Second route: subordinate the heat semigroup with the density of E_t.
  std::vector<double> sub;
  const bool heat = spec.size() == 1 && !b && !g && poly.diffusion.size() <= 1 && sig;
  if (heat) {
    const double s2 = sig(0.0) * sig(0.0);
    const double horizon = subordination::inverse_tail_horizon(spec, t, 1e-9);
    const std::size_t nodes = 1500;
    fracpde::SemigroupField p;
    p.points = space.points;
    p.tau.resize(nodes + 1);
    p.values.resize((nodes + 1) * space.points);
    for (std::size_t i = 0; i <= nodes; ++i) {
      const double u = static_cast<double>(i) / static_cast<double>(nodes);
      p.tau[i] = horizon * u * u;
      cell_averaged_gaussian(space, cfg.x0, s2 * p.tau[i], p.values.data() + i * space.points);
    }
    sub = fracpde::subordination_solution(spec, p, t);
    double l2 = 0.0;
    for (std::size_t m = 0; m < space.points; ++m) l2 += (sub[m] - last[m]) * (sub[m] - last[m]);
    l2 = std::sqrt(l2 * space.dx());
    run.report.add_check("forward equation vs subordinated heat semigroup", "l2", l2,
                         cfg.l2_tolerance, "configured L2 grid-norm tolerance");
  }

  CsvTable density(heat ? std::vector<std::string>{"x", "pde", "kde", "subordination"}
                        : std::vector<std::string>{"x", "pde", "kde"});
  const auto reported = sol.field.reported_slice(time.steps);
  for (std::size_t m = 0; m < space.points; ++m) {
    density.row() << space.x(m) << reported[m] << kde.density[m];
    if (heat) density << sub[m];
  }
  run.emit("density.csv", density);

  CsvTable samples({"path", "x"});
  for (std::size_t i = 0; i < xt.size(); ++i) samples.row() << i << xt[i];
  run.emit("ensemble.csv", samples);
  if (cfg.write_field) run.emit_field("field.csv", sol.field);
}

// ---------------------------------------------------------------------------

void stable_driver(Run& run) {
  const auto& cfg = run.cfg;
  const MixtureSpec spec = mixture_spec(cfg);
  const DistributedOrder order = distributed_order(cfg);
  const auto coeffs = sde_coefficients(cfg);
  const auto triplet = driver_triplet(cfg);
  const double t = cfg.grids.t_max;
  const double alpha = cfg.driver.alpha;

  const std::vector<double> t_grid{t};
  const auto ensemble = sde::simulate_time_changed_sde(coeffs, triplet, spec, cfg.x0, t_grid,
                                                       cfg.n_paths, run.seed(), run.sim_options());
  const auto xt = ensemble.marginal(0);

  const auto poly = polynomial_coefficients(cfg.coefficients);
  const auto g = polynomial(poly.jump);
  fracpde::FractionalLaplacian gen{alpha, [g](double x) { return std::abs(g(x)); }, nullptr};
  const SpaceGrid space = space_grid(cfg);
  const TimeGrid time = time_grid(cfg, cfg.grids.dt);
  const auto sol = fracpde::solve_dode(order, gen, fracpde::discrete_delta(space, cfg.x0), space, time);
  const auto last = sol.field.slice(time.steps);
  density_checks(run, sol);

  const bool constant_g = poly.jump.size() <= 1 || std::all_of(poly.jump.begin() + 1, poly.jump.end(),
                                                              [](double v) { return v == 0.0; });
  const double g0 = std::abs(g(0.0));

  CsvTable table({"xi", "empirical", "std_error", "spectral", "oracle", "tolerance", "pass"});
  std::vector<double> c(xt.size());
  for (double xi : cfg.xi) {
    for (std::size_t i = 0; i < xt.size(); ++i) c[i] = std::cos(xi * (xt[i] - cfg.x0));
    const auto m = sample_moments(c);
    CompensatedSum spectral;
    for (std::size_t k = 0; k < space.points; ++k)
      spectral += std::cos(xi * (space.x(k) - space.x(space.nearest(cfg.x0)))) * last[k] * space.dx();
    const double tol = 3.0 * m.std_error + cfg.cf_bias;
    bool pass = run.report
                    .add_check(label("Re cf vs spectral xi", xi), "abs_error",
                               std::abs(m.mean - spectral.value()), tol, "3*SE + cf_bias",
                               m.std_error)
                    .pass;
    double oracle = std::nan("");
    if (constant_g) {
      // E[exp(i xi X_t)] = E[exp(-|g xi|^alpha E_t)]
      oracle = subordination::inverse_laplace(spec, t, std::pow(g0 * std::abs(xi), alpha));
      pass = run.report
                 .add_check(label("Re cf vs oracle xi", xi), "abs_error", std::abs(m.mean - oracle),
                            tol, "3*SE + cf_bias", m.std_error)
                 .pass && pass;
    }
    table.row() << xi << m.mean << m.std_error << spectral.value() << oracle << tol << pass;
  }
  run.emit("charfun.csv", table);

  CsvTable samples({"path", "x"});
  for (std::size_t i = 0; i < xt.size(); ++i) samples.row() << i << xt[i];
  run.emit("ensemble.csv", samples);
  if (cfg.write_field) run.emit_field("field.csv", sol.field);
}

// ---------------------------------------------------------------------------

void feynman_kac(Run& run) {
  const auto& cfg = run.cfg;
  const MixtureSpec spec = mixture_spec(cfg);
  const auto coeffs = sde_coefficients(cfg);
  const auto triplet = driver_triplet(cfg);
  const double q = cfg.killing[0];
  const auto q_fn = polynomial(cfg.killing);
  const auto phi = polynomial(cfg.initial);
  const bool constant_phi = cfg.initial.size() <= 1 || std::all_of(cfg.initial.begin() + 1,
                                                                  cfg.initial.end(),
                                                                  [](double v) { return v == 0.0; });
  if (!constant_phi)
    throw ConfigError("params/initial", "reference values need a constant initial function");
  const double phi0 = cfg.initial.empty() ? 0.0 : cfg.initial[0];

  CsvTable table({"t", "estimate", "std_error", "reference", "bias_budget", "tolerance", "pass"});
  for (std::size_t j = 0; j < cfg.times.size(); ++j) {
    const double t = cfg.times[j];
    const auto est = sde::feynman_kac_estimate(coeffs, triplet, spec, q_fn, phi, cfg.x0, t,
                                               cfg.n_paths, run.seed(j), run.sim_options());
    // With constant q and phi, u(t, x) = phi * E[exp(-q E_t)] for any motion.
    const double ref = phi0 * subordination::inverse_laplace(spec, t, q);
    const double tol = 3.0 * est.std_error + cfg.bias_budget;
    const bool pass = run.report
                          .add_check(label("feynman-kac t", t), "abs_error",
                                     std::abs(est.estimate - ref), tol, "3*SE + bias_budget",
                                     est.std_error)
                          .pass;
    table.row() << t << est.estimate << est.std_error << ref << cfg.bias_budget << tol << pass;
  }
  run.emit("estimates.csv", table);
}

// ---------------------------------------------------------------------------

void solver_convergence(Run& run) {
  const auto& cfg = run.cfg;
  const MixtureSpec spec = mixture_spec(cfg);
  const DistributedOrder order = distributed_order(cfg);
  const double lambda = cfg.killing[0];
  const double t = cfg.grids.t_max;
  const double ref = subordination::inverse_laplace(spec, t, lambda);

  // Scalar relaxation sum_k C_k D^{beta_k} u = -lambda u, u(0) = 1, carried
  // on a small grid with a spatially constant state.
  const SpaceGrid space{1.0, 4};
  fracpde::DriftDiffusion gen;
  gen.form = fracpde::OperatorForm::kBackward;
  gen.killing = [lambda](double) { return lambda; };
  const std::vector<double> phi(space.points, 1.0);

  CsvTable table({"dt", "steps", "corrected", "value", "reference", "error", "order"});
  double worst = std::numeric_limits<double>::infinity();
  for (bool corrected : {true, false}) {
    fracpde::SolveOptions options;
    options.singularity_correction = corrected;
    double prev_error = std::nan("");
    double prev_dt = std::nan("");
    double min_order = std::numeric_limits<double>::infinity();
    for (double dt : cfg.dt_list) {
      const TimeGrid time = time_grid(cfg, dt);
      const auto sol = fracpde::solve_dode(order, gen, phi, space, time, options);
      const double value = sol.field.at(time.steps, 0);
      const double error = std::abs(value - ref);
      double rate = std::nan("");
      if (!std::isnan(prev_error)) {
        rate = std::log(prev_error / error) / std::log(prev_dt / dt);
        min_order = std::min(min_order, rate);
      }
      table.row() << dt << time.steps << corrected << value << ref << error << rate;
      prev_error = error;
      prev_dt = dt;
    }
    if (corrected)
      worst = min_order;
    else
      run.metric("uncorrected_min_order", min_order);
  }
  run.report.add_lower_bound("empirical order", "min_order", worst, cfg.min_order,
                             "smallest order over successive step refinements");
  run.emit("convergence.csv", table);
}

}  // namespace

ComparisonReport run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  validate(config);
  const auto start = std::chrono::steady_clock::now();
  ComparisonReport report;
  report.kind = std::string(to_string(config.kind));
  report.seed = config.seed;
  report.n_paths = is_statistical(config.kind) ? config.n_paths : 0;
  report.workers = std::max(1u, options.workers);
  report.version = SUBDIFF_VERSION;

  RunOptions opt = options;
  opt.workers = report.workers;
  Run run(config, opt, report);
  try {
    switch (config.kind) {
      case ExperimentKind::kSubordinatorCheck: subordinator_check(run); break;
      case ExperimentKind::kInverseMoments: inverse_moments(run); break;
      case ExperimentKind::kMcVsPde:
      case ExperimentKind::kDodeTwoAtom: mc_vs_pde(run); break;
      case ExperimentKind::kStableDriver: stable_driver(run); break;
      case ExperimentKind::kFeynmanKac: feynman_kac(run); break;
      case ExperimentKind::kSolverConvergence: solver_convergence(run); break;
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw std::runtime_error(report.kind + ": " + e.what());
  }
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (opt.write_files) write_report(run.dir, report);
  return report;
}

}  // namespace subdiff::harness
