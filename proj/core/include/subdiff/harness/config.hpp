#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "subdiff/fracpde.hpp"
#include "subdiff/levy.hpp"
#include "subdiff/sde.hpp"
#include "subdiff/subordination.hpp"

namespace subdiff::harness {

inline constexpr int kSchemaVersion = 1;

enum class ExperimentKind {
  kSubordinatorCheck,
  kInverseMoments,
  kMcVsPde,
  kDodeTwoAtom,
  kStableDriver,
  kFeynmanKac,
  kSolverConvergence,
};

std::string_view to_string(ExperimentKind kind) noexcept;
// Throws ConfigError for an unknown name.
ExperimentKind parse_kind(std::string_view name);
std::vector<ExperimentKind> all_kinds();
bool is_statistical(ExperimentKind kind) noexcept;

// Rejected configuration; field() is a JSON-pointer-like path ("grids/dx").
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message);
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct GridConfig {
  double delta = 1e-3;       // operational-time step
  double dt = 1e-3;          // PDE time step
  double dx = 0.02;          // PDE space step
  double half_width = 8.0;   // periodic box [-L, L)
  double t_max = 1.0;        // physical horizon
};

// Lévy driver L of the jump term.
struct DriverConfig {
  std::string type = "none";  // none | brownian | symmetric-stable
  double alpha = 1.5;
  double sigma2 = 1.0;
};

// Coefficients b, sigma, g as polynomials (ascending powers) or a named
// preset: zero | brownian(sigma) | ornstein-uhlenbeck(theta, sigma) |
// pure-jump(g) | polynomial(drift, diffusion, jump).
struct CoefficientConfig {
  std::string preset = "brownian";
  double sigma = 1.0;
  double theta = 1.0;
  double g = 1.0;
  std::vector<double> drift;
  std::vector<double> diffusion;
  std::vector<double> jump;
};

struct AtomConfig {
  double first;   // c_k for a mixture atom, C_k for an order atom
  double beta;

  friend bool operator==(const AtomConfig&, const AtomConfig&) = default;
};

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  ExperimentKind kind = ExperimentKind::kSubordinatorCheck;
  std::uint64_t seed = 1;
  std::size_t n_paths = 100000;
  std::vector<AtomConfig> mixture{{1.0, 0.5}};
  std::optional<std::vector<AtomConfig>> order;
  DriverConfig driver;
  CoefficientConfig coefficients;
  GridConfig grids;
  double x0 = 0.0;

  // kind-specific parameters
  std::vector<double> s_values{0.5, 1.0, 2.0};  // Laplace arguments
  std::vector<double> xi{0.5, 1.0, 2.0};        // characteristic-function arguments
  std::vector<double> times{1.0};               // evaluation times
  std::vector<double> dt_list{1e-2, 5e-3, 2.5e-3};
  std::vector<double> killing{1.0};             // q(x), polynomial
  std::vector<double> initial{1.0};             // phi(x), polynomial
  double ks_tolerance = 0.02;
  double l2_tolerance = 5e-3;
  double cf_bias = 5e-3;
  double bias_budget = 2e-3;
  double min_order = 1.3;
  bool write_field = false;

  std::string output_dir = "out";
};

// Defaults for one experiment kind (the acceptance-scale settings).
ExperimentConfig default_config(ExperimentKind kind);

// Parses and validates; missing keys take the kind's defaults. The kind comes
// from the text or from `kind` (both given: they must agree). Unknown keys
// are rejected. Throws ConfigError naming the offending field (or line for
// syntax errors).
ExperimentConfig parse_config(std::string_view text,
                              std::optional<ExperimentKind> kind = std::nullopt);
ExperimentConfig load_config(const std::filesystem::path& path,
                             std::optional<ExperimentKind> kind = std::nullopt);
// Canonical text: every field present, keys sorted, two-space indent.
std::string serialize_config(const ExperimentConfig& config);
// Throws ConfigError.
void validate(const ExperimentConfig& config);

// Model objects built from a validated config.
subordination::MixtureSpec mixture_spec(const ExperimentConfig& config);
fracpde::DistributedOrder distributed_order(const ExperimentConfig& config);
levy::LevyTriplet driver_triplet(const ExperimentConfig& config);
sde::SDECoefficients sde_coefficients(const ExperimentConfig& config);

// Polynomial coefficient vectors (ascending) for b, sigma and g.
struct PolynomialCoefficients {
  std::vector<double> drift;
  std::vector<double> diffusion;
  std::vector<double> jump;
};
PolynomialCoefficients polynomial_coefficients(const CoefficientConfig& c);
// Horner evaluator; empty function for the zero polynomial.
std::function<double(double)> polynomial(std::vector<double> coefficients);

}  // namespace subdiff::harness
