#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"
#include "subdiff/harness/config.hpp"

namespace subdiff::harness {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<ExperimentKind, std::string_view>, 7> kKindNames{{
    {ExperimentKind::kSubordinatorCheck, "subordinator-check"},
    {ExperimentKind::kInverseMoments, "inverse-moments"},
    {ExperimentKind::kMcVsPde, "mc-vs-pde"},
    {ExperimentKind::kDodeTwoAtom, "dode-two-atom"},
    {ExperimentKind::kStableDriver, "stable-driver"},
    {ExperimentKind::kFeynmanKac, "feynman-kac"},
    {ExperimentKind::kSolverConvergence, "solver-convergence"},
}};

const std::set<std::string> kDriverTypes{"none", "brownian", "symmetric-stable"};
const std::set<std::string> kPresets{"zero", "brownian", "ornstein-uhlenbeck", "pure-jump",
                                     "polynomial"};

// Reads members of one JSON object, tracking which keys were consumed.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "/" : path_, "expected an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "/" + key; }

  const json* find(const std::string& key) {
    auto it = j_.find(key);
    if (it == j_.end()) return nullptr;
    seen_.insert(key);
    return &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = find(key)) out = as_number(*v, field(key));
  }

  template <class Int>
  void unsigned_int(const std::string& key, Int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned()) throw ConfigError(field(key), "expected a non-negative integer");
      out = v->get<Int>();
    }
  }

  void integer(const std::string& key, int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) throw ConfigError(field(key), "expected an integer");
      out = v->get<int>();
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(field(key), "expected true or false");
      out = v->get<bool>();
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(field(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  void numbers(const std::string& key, std::vector<double>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) throw ConfigError(field(key), "expected an array of numbers");
      out.clear();
      for (std::size_t i = 0; i < v->size(); ++i)
        out.push_back(as_number((*v)[i], field(key) + "/" + std::to_string(i)));
    }
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(field(it.key()), "unknown key");
  }

  static double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError(where, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(where, "must be finite");
    return d;
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::vector<AtomConfig> read_atoms(const json& arr, const std::string& path,
                                   const std::string& first_key) {
  if (!arr.is_array()) throw ConfigError(path, "expected an array of atoms");
  std::vector<AtomConfig> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    ObjectReader r(arr[i], path + "/" + std::to_string(i));
    AtomConfig a{std::nan(""), std::nan("")};
    r.number(first_key, a.first);
    r.number("beta", a.beta);
    r.finish();
    if (std::isnan(a.first)) throw ConfigError(r.field(first_key), "missing");
    if (std::isnan(a.beta)) throw ConfigError(r.field("beta"), "missing");
    out.push_back(a);
  }
  return out;
}

json write_atoms(const std::vector<AtomConfig>& atoms, const std::string& first_key) {
  json arr = json::array();
  for (const auto& a : atoms) arr.push_back(json{{first_key, a.first}, {"beta", a.beta}});
  return arr;
}

std::size_t error_line(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
}

void require(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw ConfigError(field, message);
}

std::size_t degree(const std::vector<double>& p) {
  std::size_t n = p.size();
  while (n > 0 && p[n - 1] == 0.0) --n;
  return n == 0 ? 0 : n - 1;
}

bool is_zero(const std::vector<double>& p) {
  return std::all_of(p.begin(), p.end(), [](double v) { return v == 0.0; });
}

}  // namespace

ConfigError::ConfigError(std::string field, const std::string& message)
    : std::invalid_argument("config: " + field + ": " + message), field_(std::move(field)) {}

std::string_view to_string(ExperimentKind kind) noexcept {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  return "unknown";
}

ExperimentKind parse_kind(std::string_view name) {
  for (const auto& [k, n] : kKindNames)
    if (n == name) return k;
  throw ConfigError("kind", "unknown experiment kind '" + std::string(name) + "'");
}

std::vector<ExperimentKind> all_kinds() {
  std::vector<ExperimentKind> out;
  for (const auto& [k, n] : kKindNames) out.push_back(k);
  return out;
}

bool is_statistical(ExperimentKind kind) noexcept {
  return kind != ExperimentKind::kSolverConvergence;
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  c.output_dir = "out/" + std::string(to_string(kind));
  switch (kind) {
    case ExperimentKind::kSubordinatorCheck:
    case ExperimentKind::kInverseMoments:
      c.coefficients.preset = "zero";
      break;
    case ExperimentKind::kMcVsPde:
      break;
    case ExperimentKind::kDodeTwoAtom:
      c.mixture = {{1.0, 0.4}, {1.0, 0.8}};
      c.ks_tolerance = 0.03;
      break;
    case ExperimentKind::kStableDriver:
      c.coefficients.preset = "pure-jump";
      c.driver.type = "symmetric-stable";
      c.driver.alpha = 1.5;
      // xi = k / 4 are exact grid frequencies on a period of 8 pi
      c.grids.half_width = 4.0 * std::numbers::pi;
      c.grids.dx = 2.0 * c.grids.half_width / 512.0;
      break;
    case ExperimentKind::kFeynmanKac:
      c.coefficients.preset = "zero";
      c.n_paths = 20000;
      c.times = {1.0, 4.0};
      c.grids.t_max = 4.0;
      break;
    case ExperimentKind::kSolverConvergence:
      c.coefficients.preset = "zero";
      c.n_paths = 0;
      break;
  }
  return c;
}

std::string serialize_config(const ExperimentConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["kind"] = std::string(to_string(c.kind));
  j["seed"] = c.seed;
  j["n_paths"] = c.n_paths;
  j["mixture"] = write_atoms(c.mixture, "scale");
  if (c.order) j["order"] = write_atoms(*c.order, "weight");
  j["driver"] = json{{"type", c.driver.type}, {"alpha", c.driver.alpha}, {"sigma2", c.driver.sigma2}};
  j["coefficients"] = json{{"preset", c.coefficients.preset},
                           {"sigma", c.coefficients.sigma},
                           {"theta", c.coefficients.theta},
                           {"g", c.coefficients.g},
                           {"drift", c.coefficients.drift},
                           {"diffusion", c.coefficients.diffusion},
                           {"jump", c.coefficients.jump}};
  j["grids"] = json{{"delta", c.grids.delta},
                    {"dt", c.grids.dt},
                    {"dx", c.grids.dx},
                    {"half_width", c.grids.half_width},
                    {"t_max", c.grids.t_max}};
  j["x0"] = c.x0;
  j["params"] = json{{"s_values", c.s_values},       {"xi", c.xi},
                     {"times", c.times},             {"dt_list", c.dt_list},
                     {"killing", c.killing},         {"initial", c.initial},
                     {"ks_tolerance", c.ks_tolerance}, {"l2_tolerance", c.l2_tolerance},
                     {"cf_bias", c.cf_bias},         {"bias_budget", c.bias_budget},
                     {"min_order", c.min_order},     {"write_field", c.write_field}};
  j["output_dir"] = c.output_dir;
  return j.dump(2) + "\n";
}

ExperimentConfig parse_config(std::string_view text, std::optional<ExperimentKind> kind) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError("line " + std::to_string(error_line(text, e.byte == 0 ? 0 : e.byte - 1)),
                      e.what());
  }
  ObjectReader top(j, "");

  std::string kind_name;
  top.string("kind", kind_name);
  if (!kind_name.empty()) {
    const ExperimentKind from_text = parse_kind(kind_name);
    if (kind && *kind != from_text)
      throw ConfigError("kind", "config is for '" + kind_name + "' but '" +
                                    std::string(to_string(*kind)) + "' was requested");
    kind = from_text;
  }
  if (!kind) throw ConfigError("kind", "missing");

  ExperimentConfig c = default_config(*kind);
  top.integer("schema_version", c.schema_version);
  if (!top.find("schema_version")) throw ConfigError("schema_version", "missing");
  require(c.schema_version == kSchemaVersion, "schema_version",
          "unsupported version " + std::to_string(c.schema_version) + " (expected " +
              std::to_string(kSchemaVersion) + ")");
  top.unsigned_int("seed", c.seed);
  top.unsigned_int("n_paths", c.n_paths);
  if (const json* v = top.find("mixture")) c.mixture = read_atoms(*v, "mixture", "scale");
  if (const json* v = top.find("order")) c.order = read_atoms(*v, "order", "weight");
  if (const json* v = top.find("driver")) {
    ObjectReader r(*v, "driver");
    r.string("type", c.driver.type);
    r.number("alpha", c.driver.alpha);
    r.number("sigma2", c.driver.sigma2);
    r.finish();
  }
  if (const json* v = top.find("coefficients")) {
    ObjectReader r(*v, "coefficients");
    r.string("preset", c.coefficients.preset);
    r.number("sigma", c.coefficients.sigma);
    r.number("theta", c.coefficients.theta);
    r.number("g", c.coefficients.g);
    r.numbers("drift", c.coefficients.drift);
    r.numbers("diffusion", c.coefficients.diffusion);
    r.numbers("jump", c.coefficients.jump);
    r.finish();
  }
  if (const json* v = top.find("grids")) {
    ObjectReader r(*v, "grids");
    r.number("delta", c.grids.delta);
    r.number("dt", c.grids.dt);
    r.number("dx", c.grids.dx);
    r.number("half_width", c.grids.half_width);
    r.number("t_max", c.grids.t_max);
    r.finish();
  }
  top.number("x0", c.x0);
  if (const json* v = top.find("params")) {
    ObjectReader r(*v, "params");
    r.numbers("s_values", c.s_values);
    r.numbers("xi", c.xi);
    r.numbers("times", c.times);
    r.numbers("dt_list", c.dt_list);
    r.numbers("killing", c.killing);
    r.numbers("initial", c.initial);
    r.number("ks_tolerance", c.ks_tolerance);
    r.number("l2_tolerance", c.l2_tolerance);
    r.number("cf_bias", c.cf_bias);
    r.number("bias_budget", c.bias_budget);
    r.number("min_order", c.min_order);
    r.boolean("write_field", c.write_field);
    r.finish();
  }
  top.string("output_dir", c.output_dir);
  top.finish();

  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, std::optional<ExperimentKind> kind) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), kind);
}

void validate(const ExperimentConfig& c) {
  require(c.schema_version == kSchemaVersion, "schema_version", "unsupported version");
  const auto& g = c.grids;
  for (const auto& [name, v] : {std::pair{"delta", g.delta}, std::pair{"dt", g.dt},
                                std::pair{"dx", g.dx}, std::pair{"half_width", g.half_width},
                                std::pair{"t_max", g.t_max}})
    require(v > 0.0 && std::isfinite(v), std::string("grids/") + name, "must be positive");
  if (is_statistical(c.kind)) require(c.n_paths >= 100, "n_paths", "must be at least 100");

  require(!c.mixture.empty(), "mixture", "needs at least one atom");
  for (std::size_t k = 0; k < c.mixture.size(); ++k) {
    const std::string at = "mixture/" + std::to_string(k);
    require(c.mixture[k].first > 0.0, at + "/scale", "must be positive");
    require(c.mixture[k].beta > 0.0 && c.mixture[k].beta < 1.0, at + "/beta", "must lie in (0, 1)");
  }
  if (c.order) {
    require(!c.order->empty(), "order", "needs at least one atom");
    for (std::size_t k = 0; k < c.order->size(); ++k) {
      const std::string at = "order/" + std::to_string(k);
      require((*c.order)[k].first > 0.0, at + "/weight", "must be positive");
      require((*c.order)[k].beta > 0.0 && (*c.order)[k].beta < 1.0, at + "/beta",
              "must lie in (0, 1)");
    }
    // The time-fractional operator is fixed by the mixture: C_k = c_k^beta_k.
    bool match = c.order->size() == c.mixture.size();
    for (std::size_t k = 0; match && k < c.mixture.size(); ++k) {
      const double induced = std::pow(c.mixture[k].first, c.mixture[k].beta);
      match = (*c.order)[k].beta == c.mixture[k].beta &&
              std::abs((*c.order)[k].first - induced) <= 1e-12 * induced;
    }
    require(match, "order", "does not match the operator induced by the mixture (C_k = c_k^beta_k)");
  }

  require(kDriverTypes.count(c.driver.type) > 0, "driver/type",
          "must be none, brownian or symmetric-stable");
  if (c.driver.type == "symmetric-stable")
    require(c.driver.alpha > 0.0 && c.driver.alpha < 2.0, "driver/alpha", "must lie in (0, 2)");
  if (c.driver.type == "brownian") require(c.driver.sigma2 >= 0.0, "driver/sigma2", "must be >= 0");

  require(kPresets.count(c.coefficients.preset) > 0, "coefficients/preset", "unknown preset");
  const auto poly = polynomial_coefficients(c.coefficients);
  for (const auto& [name, p] : {std::pair{"drift", &poly.drift}, std::pair{"diffusion", &poly.diffusion},
                                std::pair{"jump", &poly.jump}})
    require(degree(*p) <= 1, std::string("coefficients/") + name,
            "degree above 1 breaks the global Lipschitz condition");

  auto positive_list = [](const std::vector<double>& v, const std::string& field) {
    require(!v.empty(), field, "must not be empty");
    for (double x : v) require(x > 0.0, field, "entries must be positive");
  };
  for (const auto& [name, v] : {std::pair{"ks_tolerance", c.ks_tolerance},
                                std::pair{"l2_tolerance", c.l2_tolerance},
                                std::pair{"min_order", c.min_order}})
    require(v > 0.0, std::string("params/") + name, "must be positive");
  require(c.cf_bias >= 0.0, "params/cf_bias", "must be >= 0");
  require(c.bias_budget >= 0.0, "params/bias_budget", "must be >= 0");

  const bool pde_kind = c.kind == ExperimentKind::kMcVsPde || c.kind == ExperimentKind::kDodeTwoAtom ||
                        c.kind == ExperimentKind::kStableDriver;
  if (pde_kind) {
    require(std::abs(c.x0) < g.half_width, "x0", "must lie inside the periodic box");
    require(2.0 * g.half_width / g.dx >= 8.0, "grids/dx", "too coarse for the box");
  }

  switch (c.kind) {
    case ExperimentKind::kSubordinatorCheck:
      positive_list(c.s_values, "params/s_values");
      break;
    case ExperimentKind::kInverseMoments:
      positive_list(c.times, "params/times");
      require(c.mixture.size() <= 2, "mixture", "reference values need at most two atoms");
      break;
    case ExperimentKind::kDodeTwoAtom:
      require(c.mixture.size() == 2, "mixture", "dode-two-atom needs exactly two atoms");
      [[fallthrough]];
    case ExperimentKind::kMcVsPde:
      require(c.driver.type != "symmetric-stable", "driver/type",
              "stable drivers are handled by stable-driver");
      break;
    case ExperimentKind::kStableDriver:
      require(c.driver.type == "symmetric-stable", "driver/type", "must be symmetric-stable");
      require(is_zero(poly.drift) && is_zero(poly.diffusion), "coefficients",
              "stable-driver takes a pure jump equation dY = g(Y) dL");
      require(!is_zero(poly.jump), "coefficients/jump", "must not be zero");
      require(!c.xi.empty(), "params/xi", "must not be empty");
      require(c.mixture.size() <= 2, "mixture", "at most two atoms");
      break;
    case ExperimentKind::kFeynmanKac:
      positive_list(c.times, "params/times");
      require(c.driver.type != "symmetric-stable", "driver/type",
              "the reference solver covers drift-diffusion equations only");
      require(!c.killing.empty(), "params/killing", "must not be empty");
      require(degree(c.killing) == 0 && c.killing[0] >= 0.0, "params/killing",
              "must be a non-negative constant");
      require(!c.initial.empty(), "params/initial", "must not be empty");
      for (double t : c.times) require(t <= g.t_max, "params/times", "must not exceed grids/t_max");
      break;
    case ExperimentKind::kSolverConvergence:
      require(c.dt_list.size() >= 2, "params/dt_list", "needs at least two steps");
      positive_list(c.dt_list, "params/dt_list");
      for (std::size_t i = 1; i < c.dt_list.size(); ++i)
        require(c.dt_list[i] < c.dt_list[i - 1], "params/dt_list", "must decrease");
      require(degree(c.killing) == 0 && !c.killing.empty() && c.killing[0] > 0.0, "params/killing",
              "must be a positive constant");
      break;
  }
}

subordination::MixtureSpec mixture_spec(const ExperimentConfig& c) {
  std::vector<subordination::MixtureAtom> atoms;
  for (const auto& a : c.mixture) atoms.push_back({a.first, specfun::StableIndex(a.beta)});
  return subordination::MixtureSpec(std::move(atoms));
}

fracpde::DistributedOrder distributed_order(const ExperimentConfig& c) {
  if (c.order) {
    std::vector<fracpde::OrderAtom> atoms;
    for (const auto& a : *c.order) atoms.push_back({a.first, a.beta});
    return fracpde::DistributedOrder(std::move(atoms));
  }
  return fracpde::DistributedOrder::from_mixture(mixture_spec(c));
}

levy::LevyTriplet driver_triplet(const ExperimentConfig& c) {
  if (c.driver.type == "brownian") return levy::LevyTriplet::brownian(c.driver.sigma2);
  if (c.driver.type == "symmetric-stable") return levy::LevyTriplet::symmetric_stable(c.driver.alpha);
  return levy::LevyTriplet::none();
}

PolynomialCoefficients polynomial_coefficients(const CoefficientConfig& c) {
  if (c.preset == "zero") return {};
  if (c.preset == "brownian") return {{}, {c.sigma}, {}};
  if (c.preset == "ornstein-uhlenbeck") return {{0.0, -c.theta}, {c.sigma}, {}};
  if (c.preset == "pure-jump") return {{}, {}, {c.g}};
  return {c.drift, c.diffusion, c.jump};
}

std::function<double(double)> polynomial(std::vector<double> p) {
  while (!p.empty() && p.back() == 0.0) p.pop_back();
  if (p.empty()) return {};
  return [p = std::move(p)](double x) {
    double acc = 0.0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
    return acc;
  };
}

sde::SDECoefficients sde_coefficients(const ExperimentConfig& c) {
  const auto p = polynomial_coefficients(c.coefficients);
  sde::SDECoefficients out;
  out.drift = polynomial(p.drift);
  out.diffusion = polynomial(p.diffusion);
  out.jump = polynomial(p.jump);
  auto slope = [](const std::vector<double>& v) { return v.size() > 1 ? std::abs(v[1]) : 0.0; };
  out.lipschitz_bound = std::max({slope(p.drift), slope(p.diffusion), slope(p.jump)});
  return out;
}

}  // namespace subdiff::harness
