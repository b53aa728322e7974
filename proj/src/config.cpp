#include "fnls/config.hpp"

#include "fnls/errors.hpp"
#include "fnls/spectral.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>

namespace fnls {

namespace {

enum class Kind { integer, real, boolean, text, list };

struct Param {
  std::string name;
  Kind kind;
  ParamValue fallback;
  /// Allowed values for text parameters; empty means free text.
  std::vector<std::string> choices = {};
};

Param real(std::string n, double v) { return {std::move(n), Kind::real, v}; }
Param integer(std::string n, long long v) { return {std::move(n), Kind::integer, v}; }
Param boolean(std::string n, bool v) { return {std::move(n), Kind::boolean, v}; }
Param list(std::string n, std::vector<double> v) { return {std::move(n), Kind::list, std::move(v)}; }
Param choice(std::string n, std::string v, std::vector<std::string> options) {
  return {std::move(n), Kind::text, std::move(v), std::move(options)};
}

// Keys shared by every run that evolves a field.
std::vector<Param> solver_table(long long n_modes, double horizon, long long stride,
                                double s) {
  return {
      integer("seed", 0),
      real("alpha", 1.0),
      integer("sign", -1),
      integer("n_modes", n_modes),
      real("circumference", kTwoPi),
      real("dt", 1e-3),
      real("horizon", horizon),
      integer("stride", stride),
      choice("dealias", "two_thirds", {"two_thirds", "one_third", "none"}),
      real("c", 1.0),
      real("epsilon", 0.05),
      real("s", s),
      real("delta", 0.05),
  };
}

std::vector<Param> table(Subcommand sub) {
  std::vector<Param> t;
  auto add = [&](std::vector<Param> extra) {
    for (Param& p : extra) t.push_back(std::move(p));
  };
  switch (sub) {
    case Subcommand::simulate:
      t = solver_table(64, 1.0, 10, 1.0);
      add({choice("datum", "random", {"random", "plane_wave", "zero"}),
           real("amplitude", 1.0), integer("mode", 1), boolean("wick", false),
           boolean("nonlinear", true)});
      break;
    case Subcommand::normal_form:
      t = solver_table(32, 0.1, 1, 1.0);
      add({choice("variant", "torus", {"torus", "line"})});
      break;
    case Subcommand::smoothing:
      t = solver_table(256, 1.0, 10, 0.7);
      add({real("a", 0.5), choice("gauge", "wick_rotated", {"wick_rotated", "free"}),
           integer("window_lo", 8), integer("window_hi", -1)});
      break;
    case Subcommand::growth:
      t = solver_table(128, 100.0, 1000, 2.0);
      add({boolean("nonlinear", true)});
      break;
    case Subcommand::sensitivity:
      t = solver_table(32, 0.05, 1, 1.0);
      add({list("c_values", {0.5, 1.0, 2.0})});
      break;
    case Subcommand::convergence:
      t = solver_table(64, 0.2, 1, 1.0);
      add({list("dt_levels", {4e-3, 2e-3, 1e-3}),
           choice("variant", "torus", {"torus", "line"})});
      break;
    case Subcommand::verify:
      t = {choice("check", "phase",
                  {"phase", "lemma_sums", "bestimate", "rmultiplier", "cubic_resonance", "fractional_resonance"}),
           integer("seed", 0),
           real("alpha", 1.0),
           real("s", 1.0),
           real("a", 1.0),
           real("c", 1.0),
           real("epsilon", 0.05),
           integer("k_min", 16),
           integer("k_max", 512),
           integer("K", 128),
           integer("inner_factor", 4),
           real("beta", 2.0),
           real("gamma", 0.0),
           integer("k1", 0),
           integer("k2", 0),
           list("a_grid", {0.0, 7.0, 1e3, 1e6}),
           boolean("enforce_preconditions", true)};
      break;
    case Subcommand::quintic:
      t = {integer("seed", 0),  real("s", 0.4),       real("a", 0.1),
           real("epsilon", 0.05), integer("k_min", 16), integer("k_max", 256),
           integer("direct_check_k", 16)};
      break;
  }
  return t;
}

std::string trim(std::string_view v) {
  std::size_t b = 0, e = v.size();
  while (b < e && std::isspace(static_cast<unsigned char>(v[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(v[e - 1]))) --e;
  return std::string(v.substr(b, e - b));
}

bool parse_double(const std::string& text, double& out) {
  if (text.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(text.c_str(), &end);
  return errno == 0 && end == text.c_str() + text.size() && std::isfinite(out);
}

bool parse_integer(const std::string& text, long long& out) {
  if (text.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtoll(text.c_str(), &end, 10);
  return errno == 0 && end == text.c_str() + text.size();
}

ParamValue convert(const Param& p, const std::string& raw, int line, int column) {
  switch (p.kind) {
    case Kind::integer: {
      long long v;
      if (!parse_integer(raw, v)) throw ParseError("expected an integer for '" + p.name + "'", line, column);
      return v;
    }
    case Kind::real: {
      double v;
      if (!parse_double(raw, v)) throw ParseError("expected a number for '" + p.name + "'", line, column);
      return v;
    }
    case Kind::boolean:
      if (raw == "true") return true;
      if (raw == "false") return false;
      throw ParseError("expected true or false for '" + p.name + "'", line, column);
    case Kind::text:
      if (!p.choices.empty() &&
          std::find(p.choices.begin(), p.choices.end(), raw) == p.choices.end()) {
        std::string options;
        for (const auto& c : p.choices) options += (options.empty() ? "" : ", ") + c;
        throw ValidationError(p.name, "must be one of " + options + ", got '" + raw + "'");
      }
      return raw;
    case Kind::list: {
      std::vector<double> values;
      std::stringstream ss(raw);
      std::string item;
      while (std::getline(ss, item, ',')) {
        double v;
        if (!parse_double(trim(item), v))
          throw ParseError("expected a comma-separated list of numbers for '" + p.name + "'",
                           line, column);
        values.push_back(v);
      }
      return values;
    }
  }
  throw ParseError("unsupported parameter kind", line, column);
}

std::string show(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void require(bool ok, const std::string& key, const std::string& reason) {
  if (!ok) throw ValidationError(key, reason);
}

bool has(const RunConfig& c, const std::string& key) { return c.params.count(key) > 0; }

void validate_solver(const RunConfig& c) {
  const double alpha = c.real("alpha");
  require(alpha > 0.5 && alpha <= 1.0, "alpha", "α ∈ (1/2,1] required, got " + show(alpha));
  const long long sign = c.integer("sign");
  require(sign == 1 || sign == -1, "sign", "must be +1 (focusing) or -1 (defocusing)");
  const long long n = c.integer("n_modes");
  require(n >= 8 && n % 2 == 0 && n <= (1 << 20), "n_modes", "must be an even integer >= 8");
  require(c.real("circumference") > 0.0, "circumference", "must be positive");
  const double dt = c.real("dt");
  const double horizon = c.real("horizon");
  require(dt > 0.0, "dt", "must be positive");
  require(horizon > 0.0, "horizon", "must be positive");
  require(dt <= horizon, "dt", "must not exceed horizon");
  const long long stride = c.integer("stride");
  require(stride >= 1, "stride", "must be a positive integer");
  const double samples = horizon / (dt * static_cast<double>(stride));
  require(std::abs(samples - std::round(samples)) <= 1e-9 * std::max(1.0, samples), "horizon",
          "must be a whole number of dt*stride");
}

}  // namespace

std::string to_string(Subcommand s) {
  switch (s) {
    case Subcommand::simulate: return "simulate";
    case Subcommand::normal_form: return "normal-form";
    case Subcommand::verify: return "verify";
    case Subcommand::smoothing: return "smoothing";
    case Subcommand::growth: return "growth";
    case Subcommand::quintic: return "quintic";
    case Subcommand::sensitivity: return "sensitivity";
    case Subcommand::convergence: return "convergence";
  }
  return "simulate";
}

const std::vector<Subcommand>& all_subcommands() {
  static const std::vector<Subcommand> all{
      Subcommand::simulate, Subcommand::normal_form, Subcommand::verify,
      Subcommand::smoothing, Subcommand::growth,     Subcommand::quintic,
      Subcommand::sensitivity, Subcommand::convergence};
  return all;
}

std::optional<Subcommand> parse_subcommand(std::string_view name) {
  for (Subcommand s : all_subcommands())
    if (to_string(s) == name) return s;
  return std::nullopt;
}

std::vector<std::string> config_keys(Subcommand s) {
  std::vector<std::string> out;
  for (const Param& p : table(s)) out.push_back(p.name);
  return out;
}

namespace {

template <typename T>
const T& get(const RunConfig& c, const std::string& key) {
  const auto it = c.params.find(key);
  if (it == c.params.end()) throw PreconditionViolated("no parameter '" + key + "'");
  if (const T* v = std::get_if<T>(&it->second)) return *v;
  throw PreconditionViolated("parameter '" + key + "' has another type");
}

}  // namespace

double RunConfig::real(const std::string& key) const { return get<double>(*this, key); }
long long RunConfig::integer(const std::string& key) const { return get<long long>(*this, key); }
bool RunConfig::flag(const std::string& key) const { return get<bool>(*this, key); }
const std::string& RunConfig::text(const std::string& key) const {
  return get<std::string>(*this, key);
}
const std::vector<double>& RunConfig::list(const std::string& key) const {
  return get<std::vector<double>>(*this, key);
}
std::uint64_t RunConfig::seed() const { return static_cast<std::uint64_t>(integer("seed")); }

nlohmann::json RunConfig::echo() const {
  nlohmann::json p = nlohmann::json::object();
  for (const auto& [key, value] : params)
    std::visit([&](const auto& v) { p[key] = v; }, value);
  return {{"subcommand", to_string(subcommand)}, {"parameters", p}};
}

void validate_config(const RunConfig& c) {
  switch (c.subcommand) {
    case Subcommand::simulate:
    case Subcommand::normal_form:
    case Subcommand::smoothing:
    case Subcommand::growth:
    case Subcommand::sensitivity:
    case Subcommand::convergence:
      validate_solver(c);
      break;
    case Subcommand::verify:
    case Subcommand::quintic:
      break;
  }
  require(c.integer("seed") >= 0, "seed", "must be nonnegative");
  if (has(c, "c")) require(c.real("c") > 0.0, "c", "mask constant must be positive");
  if (has(c, "epsilon"))
    require(c.real("epsilon") > 0.0 && c.real("epsilon") < 1.0, "epsilon", "ε ∈ (0,1) required");
  if (has(c, "delta")) require(c.real("delta") > 0.0, "delta", "must be positive");
  if (has(c, "amplitude")) require(c.real("amplitude") >= 0.0, "amplitude", "must be nonnegative");
  if (has(c, "mode")) {
    const long long half = c.integer("n_modes") / 2;
    require(std::abs(c.integer("mode")) < half, "mode", "must lie inside the grid");
  }
  if (has(c, "window_lo")) {
    require(c.integer("window_lo") >= 1, "window_lo", "must be positive");
    const long long hi = c.integer("window_hi");
    require(hi < 0 || hi > c.integer("window_lo"), "window_hi", "must exceed window_lo");
  }
  if (has(c, "c_values")) {
    const auto& v = c.list("c_values");
    require(!v.empty(), "c_values", "needs at least one value");
    for (double x : v) require(x > 0.0, "c_values", "values must be positive");
  }
  if (has(c, "dt_levels")) {
    const auto& v = c.list("dt_levels");
    require(v.size() >= 3, "dt_levels", "needs at least 3 levels");
    for (std::size_t i = 0; i < v.size(); ++i) {
      require(v[i] > 0.0, "dt_levels", "values must be positive");
      require(i == 0 || v[i] < v[i - 1], "dt_levels", "must be strictly decreasing");
      const double samples = c.real("horizon") / (v[i] * c.integer("stride"));
      require(std::abs(samples - std::round(samples)) <= 1e-9 * std::max(1.0, samples),
              "dt_levels", "each level must divide horizon/stride");
    }
  }
  if (has(c, "k_min")) {
    const long long lo = c.integer("k_min"), hi = c.integer("k_max");
    require(lo >= 1, "k_min", "must be positive");
    require(hi >= 2 * lo, "k_max", "must be at least 2*k_min");
    long long k = lo;
    while (k < hi) k *= 2;
    require(k == hi, "k_max", "must be k_min times a power of two");
  }
  if (c.subcommand == Subcommand::verify) {
    const double alpha = c.real("alpha");
    require(alpha > 0.5 && alpha <= 1.0, "alpha", "α ∈ (1/2,1] required, got " + show(alpha));
    require(c.integer("K") >= 1, "K", "must be positive");
    require(c.integer("inner_factor") >= 1, "inner_factor", "must be positive");
    require(!c.list("a_grid").empty(), "a_grid", "needs at least one value");
    const std::string& check = c.text("check");
    const double sv = c.real("s");
    if (check == "bestimate" || check == "rmultiplier")
      require(sv > 0.75 - 0.5 * alpha, "s", "s > 3/4 - α/2 required");
    if (check == "lemma_sums") {
      const double beta = c.real("beta"), gamma = c.real("gamma");
      require(beta >= gamma && gamma >= 0.0 && beta + gamma > 1.0, "beta",
              "β ≥ γ ≥ 0 and β + γ > 1 required");
    }
    if (c.flag("enforce_preconditions")) {
      if (check == "cubic_resonance") require(sv > 0.25 && sv <= 0.5, "s", "1/4 < s ≤ 1/2 required");
      if (check == "fractional_resonance") {
        require(alpha < 1.0, "alpha", "α ∈ (1/2,1) required");
        require(sv > 0.75 - 0.5 * alpha && sv <= 0.5, "s", "3/4 - α/2 < s ≤ 1/2 required");
      }
    }
  }
  if (c.subcommand == Subcommand::quintic) {
    require(c.real("s") > 1.0 / 3.0, "s", "s > 1/3 required");
    require(c.integer("direct_check_k") >= 0 && c.integer("direct_check_k") <= 24,
            "direct_check_k", "must lie in [0, 24]");
  }
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::optional<Subcommand> sub;
  std::vector<Param> params;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string raw_line;
  int line_no = 0;
  while (std::getline(in, raw_line)) {
    ++line_no;
    if (!raw_line.empty() && raw_line.back() == '\r') raw_line.pop_back();
    const std::size_t first = raw_line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const int column = static_cast<int>(first) + 1;
    const char lead = raw_line[first];
    if (lead == '#' || lead == ';') continue;
    if (lead == '[') {
      const std::size_t close = raw_line.find(']', first);
      if (close == std::string::npos) throw ParseError("unterminated section header", line_no, column);
      if (!trim(std::string_view(raw_line).substr(close + 1)).empty())
        throw ParseError("trailing text after section header", line_no, static_cast<int>(close) + 2);
      const std::string name = trim(std::string_view(raw_line).substr(first + 1, close - first - 1));
      if (sub) throw ValidationError(name, "only one subcommand section is allowed");
      sub = parse_subcommand(name);
      if (!sub) throw ValidationError(name, "not a subcommand section");
      params = table(*sub);
      continue;
    }
    const std::size_t eq = raw_line.find('=', first);
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", line_no, column);
    const std::string key = trim(std::string_view(raw_line).substr(first, eq - first));
    if (key.empty()) throw ParseError("empty key", line_no, column);
    if (!sub) throw ParseError("key '" + key + "' outside any section", line_no, column);
    const std::size_t value_start = raw_line.find_first_not_of(" \t", eq + 1);
    const int value_column =
        static_cast<int>(value_start == std::string::npos ? raw_line.size() : value_start) + 1;
    std::string_view rest = std::string_view(raw_line).substr(eq + 1);
    for (std::size_t i = 0; i < rest.size(); ++i)
      if ((rest[i] == '#' || rest[i] == ';') && (i == 0 || rest[i - 1] == ' ' || rest[i - 1] == '\t')) {
        rest = rest.substr(0, i);
        break;
      }
    const std::string value = trim(rest);
    const auto it = std::find_if(params.begin(), params.end(),
                                 [&](const Param& p) { return p.name == key; });
    if (it == params.end())
      throw ValidationError(key, "unknown key for [" + to_string(*sub) + "]");
    if (!seen.insert(key).second) throw ParseError("duplicate key '" + key + "'", line_no, column);
    if (value.empty()) throw ParseError("missing value for '" + key + "'", line_no, value_column);
    cfg.params[key] = convert(*it, value, line_no, value_column);
  }
  if (!sub) throw ValidationError("subcommand", "a subcommand section is required");
  cfg.subcommand = *sub;
  for (const Param& p : params)
    if (!cfg.params.count(p.name)) cfg.params[p.name] = p.fallback;
  validate_config(cfg);
  return cfg;
}

}  // namespace fnls
