#include "dmnls/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "dmnls/exponents.hpp"
#include "dmnls/io.hpp"

namespace dmnls {

namespace {

const std::vector<std::pair<Preset, const char*>>& preset_names() {
  static const std::vector<std::pair<Preset, const char*>> names = {
      {Preset::free_sanity, "free_sanity"},
      {Preset::small_data_scatter_intercritical, "small_data_scatter_intercritical"},
      {Preset::small_data_scatter_subcritical, "small_data_scatter_subcritical"},
      {Preset::large_data_scatter, "large_data_scatter"},
      {Preset::pce_check, "pce_check"},
      {Preset::decay_rates, "decay_rates"},
      {Preset::nonscattering, "nonscattering"},
      {Preset::time_reversal, "time_reversal"},
      {Preset::blowup_dichotomy, "blowup_dichotomy"},
      {Preset::ground_state, "ground_state"},
      {Preset::exponents_table, "exponents_table"},
  };
  return names;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

}  // namespace

std::string to_string(Preset preset) {
  for (const auto& [p, name] : preset_names())
    if (p == preset) return name;
  return "unknown";
}

Preset preset_from_string(const std::string& name) {
  for (const auto& [p, n] : preset_names())
    if (name == n) return p;
  throw std::invalid_argument("unknown preset '" + name + "'");
}

std::string to_string(InitialData::Kind kind) {
  switch (kind) {
    case InitialData::Kind::gaussian: return "gaussian";
    case InitialData::Kind::sech: return "sech";
    case InitialData::Kind::plane_wave: return "plane_wave";
    case InitialData::Kind::custom_file: return "custom_file";
  }
  return "unknown";
}

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error("invalid config:\n  " + join(errors, "\n  ")), errors_(std::move(errors)) {}

bool operator==(const StepperConfig& a, const StepperConfig& b) {
  return a.dt == b.dt && a.adaptive == b.adaptive && a.tol == b.tol && a.max_dt == b.max_dt &&
         a.min_dt == b.min_dt && a.blowup_gradient_factor == b.blowup_gradient_factor &&
         a.boundary_mass_threshold == b.boundary_mass_threshold && a.monitor_boundary == b.monitor_boundary;
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  return a.preset == b.preset && a.dimension == b.dimension && a.power == b.power && a.sign == b.sign &&
         a.sigma_nodes == b.sigma_nodes && a.nonlinearity_weight == b.nonlinearity_weight && a.points == b.points &&
         a.length == b.length && a.stepper == b.stepper && a.initial == b.initial && a.t_final == b.t_final &&
         a.checkpoints == b.checkpoints && a.checks == b.checks && a.output_dir == b.output_dir &&
         a.rng_seed == b.rng_seed;
}

ModelParams RunConfig::model() const {
  ModelParams m;
  m.dimension = dimension;
  m.power = power;
  m.sign = sign;
  m.sigma = QuadratureRule::gauss_legendre(sigma_nodes);
  m.nonlinearity_weight = nonlinearity_weight;
  return m;
}

GridPtr RunConfig::make_grid() const { return dmnls::make_grid(dimension, points, length); }

std::vector<double> RunConfig::checkpoint_times() const {
  if (checkpoints.times.empty()) return linspace(0.0, t_final, checkpoints.count);
  std::vector<double> t = checkpoints.times;
  if (t_final >= 0.0)
    std::sort(t.begin(), t.end());
  else
    std::sort(t.begin(), t.end(), std::greater<>());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

ComplexField RunConfig::initial_field() const {
  const GridPtr grid = make_grid();
  const InitialData& d = initial;
  switch (d.kind) {
    case InitialData::Kind::custom_file: {
      auto cp = read_checkpoint(d.path);
      if (!(*cp.field.grid == *grid)) throw std::invalid_argument("custom initial data grid does not match config");
      return ComplexField(grid, std::move(cp.field.values));
    }
    case InitialData::Kind::plane_wave: {
      const double k0 = 2.0 * M_PI * d.mode[0] / length, k1 = 2.0 * M_PI * d.mode[1] / length;
      if (dimension == 1) return sample(grid, [&](double x) { return d.amplitude * std::polar(1.0, k0 * x); });
      return sample(grid, [&](double x, double y) { return d.amplitude * std::polar(1.0, k0 * x + k1 * y); });
    }
    case InitialData::Kind::gaussian:
    case InitialData::Kind::sech: {
      const bool gauss = d.kind == InitialData::Kind::gaussian;
      auto profile = [&](double r2) {
        return gauss ? std::exp(-r2 / (d.width * d.width)) : 1.0 / std::cosh(std::sqrt(r2) / d.width);
      };
      if (dimension == 1)
        return sample(grid, [&](double x) {
          const double dx = x - d.center[0];
          return d.amplitude * profile(dx * dx) * std::polar(1.0, d.velocity[0] * x);
        });
      return sample(grid, [&](double x, double y) {
        const double dx = x - d.center[0], dy = y - d.center[1];
        return d.amplitude * profile(dx * dx + dy * dy) * std::polar(1.0, d.velocity[0] * x + d.velocity[1] * y);
      });
    }
  }
  throw std::invalid_argument("unknown initial data kind");
}

std::uint64_t RunConfig::hash() const { return fnv1a64(serialize(*this)); }

namespace {

// Check keys accepted by each preset.
const std::map<Preset, std::vector<std::string>>& preset_check_keys() {
  static const std::map<Preset, std::vector<std::string>> keys = {
      {Preset::free_sanity, {"conservation_mass_tol", "conservation_energy_tol"}},
      {Preset::small_data_scatter_intercritical, {"transient", "relative_threshold"}},
      {Preset::small_data_scatter_subcritical, {"transient", "relative_threshold"}},
      {Preset::large_data_scatter, {"transient", "relative_threshold"}},
      {Preset::pce_check, {"window_lo", "window_hi"}},
      {Preset::decay_rates, {"window_lo", "window_hi", "ju_slope_max", "w_slope_max"}},
      {Preset::nonscattering, {"window_lo", "window_hi", "slope_lo", "slope_hi", "psi_width", "psi_center"}},
      {Preset::time_reversal, {"field_tol", "energy_tol"}},
      {Preset::blowup_dichotomy, {"lambda_small", "lambda_large", "bisection_steps", "growth_factor"}},
      {Preset::ground_state, {"S", "nodes_per_unit", "max_iterations", "optimizer_tol"}},
      {Preset::exponents_table, {"dimensions", "powers"}},
  };
  return keys;
}

// Scalar members of CheckParams by name.
std::map<std::string, double CheckParams::*> check_doubles() {
  return {{"window_lo", &CheckParams::window_lo},
          {"window_hi", &CheckParams::window_hi},
          {"relative_threshold", &CheckParams::relative_threshold},
          {"transient", &CheckParams::transient},
          {"conservation_mass_tol", &CheckParams::conservation_mass_tol},
          {"conservation_energy_tol", &CheckParams::conservation_energy_tol},
          {"field_tol", &CheckParams::field_tol},
          {"energy_tol", &CheckParams::energy_tol},
          {"ju_slope_max", &CheckParams::ju_slope_max},
          {"w_slope_max", &CheckParams::w_slope_max},
          {"slope_lo", &CheckParams::slope_lo},
          {"slope_hi", &CheckParams::slope_hi},
          {"lambda_small", &CheckParams::lambda_small},
          {"lambda_large", &CheckParams::lambda_large},
          {"growth_factor", &CheckParams::growth_factor},
          {"psi_width", &CheckParams::psi_width},
          {"psi_center", &CheckParams::psi_center},
          {"S", &CheckParams::S},
          {"optimizer_tol", &CheckParams::optimizer_tol}};
}

std::map<std::string, int CheckParams::*> check_ints() {
  return {{"bisection_steps", &CheckParams::bisection_steps},
          {"nodes_per_unit", &CheckParams::nodes_per_unit},
          {"max_iterations", &CheckParams::max_iterations}};
}

// Collects errors while pulling typed values out of a TOML table.
class Reader {
 public:
  explicit Reader(std::string origin) : origin_(std::move(origin)) {}

  void error(const toml::node* node, const std::string& what) {
    std::string where = origin_;
    if (node) where += ":" + std::to_string(node->source().begin.line);
    errors_.push_back(where + ": " + what);
  }

  void number(const toml::node& n, const std::string& key, double& out) {
    if (auto v = n.value<double>(); v && (n.is_floating_point() || n.is_integer()))
      out = *v;
    else
      error(&n, key + " must be a number");
  }

  void integer(const toml::node& n, const std::string& key, int& out) {
    if (auto v = n.value<std::int64_t>(); v && n.is_integer())
      out = static_cast<int>(*v);
    else
      error(&n, key + " must be an integer");
  }

  void boolean(const toml::node& n, const std::string& key, bool& out) {
    if (auto v = n.value<bool>(); v && n.is_boolean())
      out = *v;
    else
      error(&n, key + " must be true or false");
  }

  void string(const toml::node& n, const std::string& key, std::string& out) {
    if (auto v = n.value<std::string>(); v && n.is_string())
      out = *v;
    else
      error(&n, key + " must be a string");
  }

  template <class T, class F>
  void list(const toml::node& n, const std::string& key, std::vector<T>& out, F&& item) {
    const auto* arr = n.as_array();
    if (!arr) {
      error(&n, key + " must be an array");
      return;
    }
    out.clear();
    for (const auto& el : *arr) {
      T v{};
      item(el, key + " entry", v);
      out.push_back(v);
    }
  }

  // Accepts a scalar (applied to the first axis) or an array of up to two entries.
  template <class T, class F>
  void axes(const toml::node& n, const std::string& key, std::array<T, 2>& out, F&& item) {
    if (const auto* arr = n.as_array()) {
      if (arr->size() < 1 || arr->size() > 2) {
        error(&n, key + " must have one or two entries");
        return;
      }
      for (std::size_t i = 0; i < arr->size(); ++i) item(*arr->get(i), key + " entry", out[i]);
    } else {
      item(n, key, out[0]);
    }
  }

  std::vector<std::string>& errors() { return errors_; }

 private:
  std::string origin_;
  std::vector<std::string> errors_;
};

void read_section(Reader& rd, const toml::table& tbl, const std::string& section,
                  const std::map<std::string, std::function<void(const toml::node&, const std::string&)>>& handlers) {
  for (const auto& [k, node] : tbl) {
    const std::string key(k.str());
    const auto it = handlers.find(key);
    if (it == handlers.end()) {
      rd.error(&node, "unknown key '" + (section.empty() ? key : section + "." + key) + "'");
      continue;
    }
    it->second(node, key);
  }
}

}  // namespace

RunConfig parse_config_string(const std::string& text, const std::string& origin) {
  toml::table root;
  try {
    root = toml::parse(text, origin);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << origin << ":" << e.source().begin.line << ": " << e.description();
    throw ConfigError({os.str()});
  }

  Reader rd(origin);
  RunConfig cfg;
  using Handler = std::function<void(const toml::node&, const std::string&)>;
  auto num = [&](double& dst) -> Handler { return [&rd, &dst](const toml::node& n, const std::string& k) { rd.number(n, k, dst); }; };
  auto integer = [&](int& dst) -> Handler { return [&rd, &dst](const toml::node& n, const std::string& k) { rd.integer(n, k, dst); }; };
  auto boolean = [&](bool& dst) -> Handler { return [&rd, &dst](const toml::node& n, const std::string& k) { rd.boolean(n, k, dst); }; };
  auto str = [&](std::string& dst) -> Handler { return [&rd, &dst](const toml::node& n, const std::string& k) { rd.string(n, k, dst); }; };
  auto num_item = [&rd](const toml::node& n, const std::string& k, double& v) { rd.number(n, k, v); };
  auto int_item = [&rd](const toml::node& n, const std::string& k, int& v) { rd.integer(n, k, v); };
  auto str_item = [&rd](const toml::node& n, const std::string& k, std::string& v) { rd.string(n, k, v); };

  // The preset decides which check keys are legal, so read it first.
  bool have_preset = false;
  if (const auto* node = root.get("preset")) {
    std::string name;
    rd.string(*node, "preset", name);
    try {
      cfg.preset = preset_from_string(name);
      have_preset = true;
    } catch (const std::invalid_argument& e) {
      rd.error(node, e.what());
    }
  } else {
    rd.error(nullptr, "missing required key 'preset'");
  }

  std::string sign = "defocusing";
  std::string kind = "gaussian";
  bool have_t_final = false;
  const toml::table empty;
  auto section = [&](const char* name) -> const toml::table& {
    const auto* node = root.get(name);
    if (!node) return empty;
    if (const auto* t = node->as_table()) return *t;
    rd.error(node, std::string(name) + " must be a table");
    return empty;
  };

  std::map<std::string, Handler> top = {
      {"preset", [](const toml::node&, const std::string&) {}},
      {"t_final", [&](const toml::node& n, const std::string& k) { rd.number(n, k, cfg.t_final); have_t_final = true; }},
      {"output_dir", str(cfg.output_dir)},
      {"rng_seed",
       [&](const toml::node& n, const std::string& k) {
         if (auto v = n.value<std::int64_t>(); v && n.is_integer() && *v >= 0)
           cfg.rng_seed = static_cast<std::uint64_t>(*v);
         else
           rd.error(&n, k + " must be a non-negative integer");
       }},
      {"model", [](const toml::node&, const std::string&) {}},
      {"grid", [](const toml::node&, const std::string&) {}},
      {"stepper", [](const toml::node&, const std::string&) {}},
      {"initial_data", [](const toml::node&, const std::string&) {}},
      {"checkpoints", [](const toml::node&, const std::string&) {}},
      {"checks", [](const toml::node&, const std::string&) {}},
  };
  read_section(rd, root, "", top);

  read_section(rd, section("model"), "model",
               {{"dimension", integer(cfg.dimension)},
                {"power", num(cfg.power)},
                {"sign", str(sign)},
                {"sigma_nodes", integer(cfg.sigma_nodes)},
                {"nonlinearity_weight", num(cfg.nonlinearity_weight)}});
  if (sign == "defocusing")
    cfg.sign = NonlinearitySign::defocusing;
  else if (sign == "focusing")
    cfg.sign = NonlinearitySign::focusing;
  else
    rd.error(root.get("model"), "model.sign must be \"defocusing\" or \"focusing\"");

  read_section(rd, section("grid"), "grid", {{"points", integer(cfg.points)}, {"length", num(cfg.length)}});

  StepperConfig& st = cfg.stepper;
  read_section(rd, section("stepper"), "stepper",
               {{"dt", num(st.dt)},
                {"adaptive", boolean(st.adaptive)},
                {"tol", num(st.tol)},
                {"max_dt", num(st.max_dt)},
                {"min_dt", num(st.min_dt)},
                {"blowup_gradient_factor", num(st.blowup_gradient_factor)},
                {"boundary_mass_threshold", num(st.boundary_mass_threshold)},
                {"monitor_boundary", boolean(st.monitor_boundary)}});

  InitialData& init = cfg.initial;
  read_section(rd, section("initial_data"), "initial_data",
               {{"kind", str(kind)},
                {"amplitude", num(init.amplitude)},
                {"width", num(init.width)},
                {"center", [&](const toml::node& n, const std::string& k) { rd.axes(n, k, init.center, num_item); }},
                {"velocity", [&](const toml::node& n, const std::string& k) { rd.axes(n, k, init.velocity, num_item); }},
                {"mode", [&](const toml::node& n, const std::string& k) { rd.axes(n, k, init.mode, int_item); }},
                {"path", str(init.path)}});
  if (kind == "gaussian")
    init.kind = InitialData::Kind::gaussian;
  else if (kind == "sech")
    init.kind = InitialData::Kind::sech;
  else if (kind == "plane_wave")
    init.kind = InitialData::Kind::plane_wave;
  else if (kind == "custom_file")
    init.kind = InitialData::Kind::custom_file;
  else
    rd.error(root.get("initial_data"), "initial_data.kind must be gaussian, sech, plane_wave or custom_file");

  read_section(rd, section("checkpoints"), "checkpoints",
               {{"times", [&](const toml::node& n, const std::string& k) { rd.list(n, k, cfg.checkpoints.times, num_item); }},
                {"count", integer(cfg.checkpoints.count)}});

  // Checks: only the preset's own keys plus hard_fail.
  std::map<std::string, Handler> check_handlers = {
      {"hard_fail", [&](const toml::node& n, const std::string& k) { rd.list(n, k, cfg.checks.hard_fail, str_item); }}};
  if (have_preset) {
    const auto doubles = check_doubles();
    const auto ints = check_ints();
    for (const auto& key : preset_check_keys().at(cfg.preset)) {
      if (auto d = doubles.find(key); d != doubles.end())
        check_handlers[key] = num(cfg.checks.*(d->second));
      else if (auto i = ints.find(key); i != ints.end())
        check_handlers[key] = integer(cfg.checks.*(i->second));
      else if (key == "dimensions")
        check_handlers[key] = [&](const toml::node& n, const std::string& k) { rd.list(n, k, cfg.checks.dimensions, int_item); };
      else if (key == "powers")
        check_handlers[key] = [&](const toml::node& n, const std::string& k) { rd.list(n, k, cfg.checks.powers, num_item); };
    }
  }
  read_section(rd, section("checks"), "checks", check_handlers);

  if (have_preset && !have_t_final && cfg.preset != Preset::exponents_table && cfg.preset != Preset::ground_state)
    rd.error(nullptr, "missing required key 't_final' for preset " + to_string(cfg.preset));

  auto errors = std::move(rd.errors());
  if (have_preset)
    for (auto& e : validate(cfg)) errors.push_back(origin + ": " + e);
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({path + ": cannot open file"});
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config_string(os.str(), path);
}

std::vector<std::string> validate(const RunConfig& c) {
  std::vector<std::string> errs;
  const std::string preset = to_string(c.preset);
  auto need = [&](bool ok, const std::string& msg) {
    if (!ok) errs.push_back(msg);
  };

  need(c.dimension == 1 || c.dimension == 2, "model.dimension must be 1 or 2");
  need(c.power > 0.0 && std::isfinite(c.power), "model.power must be positive");
  need(c.sigma_nodes >= 1 && c.sigma_nodes <= 100, "model.sigma_nodes must be in [1, 100]");
  need(std::isfinite(c.nonlinearity_weight) && c.nonlinearity_weight >= 0.0,
       "model.nonlinearity_weight must be non-negative");
  need(c.points >= 16 && (c.points & (c.points - 1)) == 0, "grid.points must be a power of two >= 16");
  need(c.length > 0.0 && std::isfinite(c.length), "grid.length must be positive");
  try {
    c.stepper.validate();
  } catch (const std::invalid_argument& e) {
    errs.push_back(std::string("stepper: ") + e.what());
  }
  need(c.initial.width > 0.0, "initial_data.width must be positive");
  need(std::isfinite(c.initial.amplitude), "initial_data.amplitude must be finite");
  need(c.initial.kind != InitialData::Kind::custom_file || !c.initial.path.empty(),
       "initial_data.path is required for custom_file data");
  need(c.output_dir.size() > 0, "output_dir must not be empty");

  const bool dynamic = c.preset != Preset::exponents_table && c.preset != Preset::ground_state;
  if (dynamic) {
    need(std::isfinite(c.t_final) && c.t_final != 0.0, "t_final must be finite and nonzero");
    if (c.checkpoints.times.empty()) {
      need(c.checkpoints.count >= 2, "checkpoints.count must be >= 2");
    } else {
      const double lo = std::min(0.0, c.t_final), hi = std::max(0.0, c.t_final);
      std::set<double> seen;
      for (double t : c.checkpoints.times) {
        need(t >= lo && t <= hi, "checkpoint time " + format_double(t) + " lies outside [0, t_final]");
        need(seen.insert(t).second, "duplicate checkpoint time " + format_double(t));
      }
    }
  }

  const double d = c.dimension, p = c.power;
  const bool focusing = c.sign == NonlinearitySign::focusing;
  const auto& k = c.checks;
  auto window = [&]() {
    need(k.window_lo > 0.0, preset + ": checks.window_lo must be > 0 (window must exclude t = 0)");
    need(k.window_lo < k.window_hi, preset + ": checks.window_lo must be below checks.window_hi");
    need(k.window_hi <= std::abs(c.t_final), preset + ": checks.window_hi must not exceed |t_final|");
  };

  switch (c.preset) {
    case Preset::free_sanity:
      break;
    case Preset::small_data_scatter_intercritical:
      need(p >= 4.0 / d - kBoundarySnap, preset + " requires p >= 4/d");
      need(c.t_final > 0.0, preset + " requires t_final > 0");
      break;
    case Preset::small_data_scatter_subcritical:
      need(p < 4.0 / d && p >= 4.0 / (d + 2.0) - kBoundarySnap && p > 2.0 / d,
           preset + " requires max(2/d, 4/(d+2)) <= p < 4/d");
      need(c.t_final > 0.0, preset + " requires t_final > 0");
      break;
    case Preset::large_data_scatter:
      need(!focusing, preset + " requires the defocusing sign");
      need(p > 4.0 / d, preset + " requires p > 4/d");
      need(c.dimension != 1 || p > dmnls::p0(), preset + " requires p > 3 + sqrt(5) in d = 1");
      need(c.t_final > 0.0, preset + " requires t_final > 0");
      break;
    case Preset::pce_check: {
      window();
      need(c.t_final > 0.0, preset + " requires t_final > 0");
      auto times = c.checkpoint_times();
      std::sort(times.begin(), times.end());
      for (std::size_t i = 1; i < times.size(); ++i)
        if (times[i] >= k.window_lo && times[i - 1] <= k.window_hi && times[i] - times[i - 1] > 0.05 + 1e-12) {
          errs.push_back(preset + " requires checkpoint spacing <= 0.05 inside the window");
          break;
        }
      break;
    }
    case Preset::decay_rates:
      window();
      need(!focusing, preset + " requires the defocusing sign");
      need(p > 4.0 / d, preset + " requires p > 4/d");
      break;
    case Preset::nonscattering:
      window();
      need(!focusing, preset + " requires the defocusing sign");
      need(k.slope_lo < k.slope_hi, preset + ": checks.slope_lo must be below checks.slope_hi");
      need(k.psi_width > 0.0, preset + ": checks.psi_width must be positive");
      break;
    case Preset::time_reversal:
      need(k.field_tol > 0.0 && k.energy_tol > 0.0, preset + ": tolerances must be positive");
      break;
    case Preset::blowup_dichotomy:
      need(focusing, preset + " requires the focusing sign");
      need(p > 8.0, preset + " requires p > 8");
      need(c.dimension == 1, preset + " requires d = 1");
      need(c.t_final > 0.0, preset + " requires t_final > 0");
      need(k.lambda_small > 0.0 && k.lambda_small < k.lambda_large,
           preset + " requires 0 < checks.lambda_small < checks.lambda_large");
      need(k.bisection_steps >= 0, preset + ": checks.bisection_steps must be >= 0");
      need(k.growth_factor > 1.0, preset + ": checks.growth_factor must exceed 1");
      break;
    case Preset::ground_state:
      need(p > 8.0, preset + " requires p > 8");
      need(c.dimension == 1, preset + " requires d = 1");
      need(k.S > 0.0, preset + ": checks.S must be positive");
      need(k.nodes_per_unit >= 1, preset + ": checks.nodes_per_unit must be >= 1");
      need(k.max_iterations >= 1, preset + ": checks.max_iterations must be >= 1");
      need(k.optimizer_tol > 0.0, preset + ": checks.optimizer_tol must be positive");
      break;
    case Preset::exponents_table:
      need(!k.dimensions.empty() && !k.powers.empty(), preset + " requires non-empty dimensions and powers");
      for (int dim : k.dimensions) need(dim >= 1, preset + ": dimensions must be >= 1");
      for (double pw : k.powers) need(pw > 0.0 && std::isfinite(pw), preset + ": powers must be positive");
      break;
  }
  return errs;
}

namespace {

std::string toml_string(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

// TOML floats need a decimal point or exponent.
std::string toml_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  std::string s = format_double(v);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

template <class T, class F>
std::string toml_list(const std::vector<T>& v, F&& fmt) {
  std::vector<std::string> parts;
  for (const auto& x : v) parts.push_back(fmt(x));
  return "[" + join(parts, ", ") + "]";
}

}  // namespace

std::string serialize(const RunConfig& c) {
  std::ostringstream os;
  auto dbl = [](double v) { return toml_double(v); };
  auto integer = [](int v) { return std::to_string(v); };
  os << "preset = " << toml_string(to_string(c.preset)) << "\n";
  os << "t_final = " << dbl(c.t_final) << "\n";
  os << "output_dir = " << toml_string(c.output_dir) << "\n";
  os << "rng_seed = " << c.rng_seed << "\n\n";

  os << "[model]\n";
  os << "dimension = " << c.dimension << "\n";
  os << "power = " << dbl(c.power) << "\n";
  os << "sign = " << toml_string(c.sign == NonlinearitySign::focusing ? "focusing" : "defocusing") << "\n";
  os << "sigma_nodes = " << c.sigma_nodes << "\n";
  os << "nonlinearity_weight = " << dbl(c.nonlinearity_weight) << "\n\n";

  os << "[grid]\n";
  os << "points = " << c.points << "\n";
  os << "length = " << dbl(c.length) << "\n\n";

  const auto& s = c.stepper;
  os << "[stepper]\n";
  os << "dt = " << dbl(s.dt) << "\n";
  os << "adaptive = " << (s.adaptive ? "true" : "false") << "\n";
  os << "tol = " << dbl(s.tol) << "\n";
  os << "max_dt = " << dbl(s.max_dt) << "\n";
  os << "min_dt = " << dbl(s.min_dt) << "\n";
  os << "blowup_gradient_factor = " << dbl(s.blowup_gradient_factor) << "\n";
  os << "boundary_mass_threshold = " << dbl(s.boundary_mass_threshold) << "\n";
  os << "monitor_boundary = " << (s.monitor_boundary ? "true" : "false") << "\n\n";

  const auto& d = c.initial;
  os << "[initial_data]\n";
  os << "kind = " << toml_string(to_string(d.kind)) << "\n";
  os << "amplitude = " << dbl(d.amplitude) << "\n";
  os << "width = " << dbl(d.width) << "\n";
  os << "center = [" << dbl(d.center[0]) << ", " << dbl(d.center[1]) << "]\n";
  os << "velocity = [" << dbl(d.velocity[0]) << ", " << dbl(d.velocity[1]) << "]\n";
  os << "mode = [" << d.mode[0] << ", " << d.mode[1] << "]\n";
  os << "path = " << toml_string(d.path) << "\n\n";

  os << "[checkpoints]\n";
  os << "times = " << toml_list(c.checkpoints.times, dbl) << "\n";
  os << "count = " << c.checkpoints.count << "\n\n";

  os << "[checks]\n";
  os << "hard_fail = " << toml_list(c.checks.hard_fail, toml_string) << "\n";
  const auto doubles = check_doubles();
  const auto ints = check_ints();
  for (const auto& key : preset_check_keys().at(c.preset)) {
    os << key << " = ";
    if (auto it = doubles.find(key); it != doubles.end())
      os << dbl(c.checks.*(it->second));
    else if (auto jt = ints.find(key); jt != ints.end())
      os << c.checks.*(jt->second);
    else if (key == "dimensions")
      os << toml_list(c.checks.dimensions, integer);
    else if (key == "powers")
      os << toml_list(c.checks.powers, dbl);
    os << "\n";
  }
  return os.str();
}

}  // namespace dmnls
