#include "ks1d/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ks1d {

namespace {

constexpr double kTwoPi = 6.283185307179586;
constexpr double kPi = 3.141592653589793;

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
  throw std::invalid_argument(origin + ": " + what);
}

void check_keys(const nlohmann::json& obj, const std::set<std::string>& allowed,
                const std::string& origin, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key()))
      fail(origin, "unknown key '" + it.key() + "' in " + where);
  }
}

double get_number(const nlohmann::json& obj, const char* key, const std::string& origin) {
  if (!obj.contains(key)) fail(origin, std::string("missing key '") + key + "'");
  if (!obj.at(key).is_number()) fail(origin, std::string("key '") + key + "' must be a number");
  return obj.at(key).get<double>();
}

double get_number_or(const nlohmann::json& obj, const char* key, double dflt,
                     const std::string& origin) {
  if (!obj.contains(key)) return dflt;
  if (!obj.at(key).is_number()) fail(origin, std::string("key '") + key + "' must be a number");
  return obj.at(key).get<double>();
}

std::string get_string(const nlohmann::json& obj, const char* key, const std::string& origin) {
  if (!obj.contains(key)) fail(origin, std::string("missing key '") + key + "'");
  if (!obj.at(key).is_string()) fail(origin, std::string("key '") + key + "' must be a string");
  return obj.at(key).get<std::string>();
}

ProfileSpec parse_profile(const nlohmann::json& obj, const std::string& origin,
                          const std::string& where) {
  if (!obj.is_object()) fail(origin, where + " must be an object");
  check_keys(obj, {"profile", "mass", "amplitude"}, origin, where);
  ProfileSpec ps;
  const std::string name = get_string(obj, "profile", origin);
  if (name == "constant") {
    ps.profile = InitialProfile::Constant;
    ps.amplitude = 0.0;
  } else if (name == "cosine") {
    ps.profile = InitialProfile::Cosine;
    ps.amplitude = 1.0;
  } else if (name == "gaussian") {
    ps.profile = InitialProfile::Gaussian;
    ps.amplitude = 8.0;
  } else {
    fail(origin, where + ": unknown profile '" + name + "'");
  }
  ps.mass = get_number(obj, "mass", origin);
  ps.amplitude = get_number_or(obj, "amplitude", ps.amplitude, origin);
  return ps;
}

Nonlinearity parse_nonlinearity(const nlohmann::json& obj, const std::string& origin) {
  if (!obj.is_object()) fail(origin, "'nonlinearity' must be an object");
  const std::string kind = get_string(obj, "kind", origin);
  if (kind == "power") {
    check_keys(obj, {"kind", "p"}, origin, "'nonlinearity'");
    return Nonlinearity::power(get_number(obj, "p", origin));
  }
  if (kind == "constant") {
    check_keys(obj, {"kind", "c"}, origin, "'nonlinearity'");
    return Nonlinearity::constant(get_number(obj, "c", origin));
  }
  if (kind == "tabulated") {
    check_keys(obj, {"kind", "s", "a"}, origin, "'nonlinearity'");
    if (!obj.contains("s") || !obj.contains("a") || !obj.at("s").is_array() ||
        !obj.at("a").is_array())
      fail(origin, "tabulated nonlinearity needs arrays 's' and 'a'");
    return Nonlinearity::tabulated(obj.at("s").get<std::vector<double>>(),
                                   obj.at("a").get<std::vector<double>>());
  }
  fail(origin, "unknown nonlinearity kind '" + kind + "'");
}

std::string profile_name(InitialProfile p) {
  switch (p) {
    case InitialProfile::Constant: return "constant";
    case InitialProfile::Cosine: return "cosine";
    case InitialProfile::Gaussian: return "gaussian";
  }
  return "?";
}

}  // namespace

double ProfileSpec::value_at(double x) const {
  switch (profile) {
    case InitialProfile::Constant:
      return mass;
    case InitialProfile::Cosine:
      return mass * (1.0 + amplitude * std::cos(kTwoPi * x));
    case InitialProfile::Gaussian: {
      if (amplitude == 0.0) return mass;
      const double c = std::cos(kPi * x);
      // \int_0^1 exp(-k cos^2(pi x)) dx = e^{-k/2} I_0(k/2)
      const double norm = std::exp(-0.5 * amplitude) * std::cyl_bessel_i(0.0, 0.5 * amplitude);
      return mass * std::exp(-amplitude * c * c) / norm;
    }
  }
  return 0.0;
}

double ProfileSpec::derivative_at(double x) const {
  switch (profile) {
    case InitialProfile::Constant:
      return 0.0;
    case InitialProfile::Cosine:
      return -mass * amplitude * kTwoPi * std::sin(kTwoPi * x);
    case InitialProfile::Gaussian: {
      if (amplitude == 0.0) return 0.0;
      const double c = std::cos(kPi * x);
      const double norm = std::exp(-0.5 * amplitude) * std::cyl_bessel_i(0.0, 0.5 * amplitude);
      return mass * std::exp(-amplitude * c * c) * amplitude * kPi * std::sin(kTwoPi * x) / norm;
    }
  }
  return 0.0;
}

void Scenario::validate() const {
  if (cells < 4) throw std::invalid_argument("cells: need at least 4");
  if (!(dt_min > 0.0)) throw std::invalid_argument("dt_min must be positive");
  if (!(dt_min <= dt_initial && dt_initial <= dt_max))
    throw std::invalid_argument("need 0 < dt_min <= dt_initial <= dt_max");
  if (!(t_end >= 0.0)) throw std::invalid_argument("t_end must be nonnegative");
  if (t_end > 0.0 && !(t0_monitor > 0.0 && t0_monitor < t_end))
    throw std::invalid_argument("need 0 < t0_monitor < t_end");
  if (!(blowup_threshold > 0.0)) throw std::invalid_argument("blowup_threshold must be positive");
  if (!(positivity_floor > 0.0)) throw std::invalid_argument("positivity_floor must be positive");
  if (!(initial_u.mass > 0.0)) throw std::invalid_argument("initial_u.mass must be positive");
  if (initial_u.profile == InitialProfile::Cosine && std::abs(initial_u.amplitude) > 1.0)
    throw std::invalid_argument("initial_u: cosine amplitude must lie in [-1, 1]");
  if (initial_u.profile == InitialProfile::Gaussian && initial_u.amplitude < 0.0)
    throw std::invalid_argument("initial_u: gaussian steepness must be nonnegative");
  if (variant == Variant::ParabolicParabolic) {
    if (!(initial_v.mass >= 0.0)) throw std::invalid_argument("initial_v.mass must be nonnegative");
    if (initial_v.profile == InitialProfile::Cosine && std::abs(initial_v.amplitude) > 1.0)
      throw std::invalid_argument("initial_v: cosine amplitude must lie in [-1, 1]");
  }
  if (!(output_interval >= 0.0)) throw std::invalid_argument("output_interval must be nonnegative");
}

double Scenario::effective_output_interval() const {
  if (output_interval > 0.0) return output_interval;
  return std::max(t_end / 500.0, 10.0 * dt_initial);
}

State Scenario::initial_state(const Grid& grid) const {
  State s(grid, 0.0);
  for (int i = 0; i < grid.n; ++i) s.u[static_cast<std::size_t>(i)] = initial_u.value_at(grid.center(i));
  const double mn = *std::min_element(s.u.begin(), s.u.end());
  if (!(mn >= positivity_floor)) {
    std::ostringstream os;
    os << "initial density falls below the positivity floor (min u0 = " << mn
       << ", floor = " << positivity_floor << "); adjust amplitude or cells";
    throw std::invalid_argument(os.str());
  }
  if (variant == Variant::ParabolicElliptic) {
    HelmholtzSolver hs(grid);
    hs.solve(s.u, s.v);
  } else {
    for (int i = 0; i < grid.n; ++i) s.v[static_cast<std::size_t>(i)] = initial_v.value_at(grid.center(i));
    for (double vi : s.v)
      if (!(vi >= 0.0)) throw std::invalid_argument("initial_v must be nonnegative");
  }
  return s;
}

Config parse_config(const std::string& json_text, const std::string& origin) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    // convert byte offset to line:column
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < e.byte && i < json_text.size(); ++i) {
      if (json_text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream os;
    os << origin << ":" << line << ":" << col << ": " << e.what();
    throw std::invalid_argument(os.str());
  }
  if (!doc.is_object()) fail(origin, "top level must be an object");

  static const std::set<std::string> top_keys = {
      "variant",    "nonlinearity",     "initial_u",        "initial_v",
      "cells",      "dt_initial",       "dt_min",           "dt_max",
      "t_end",      "t0_monitor",       "blowup_threshold", "positivity_floor",
      "stepper",    "advection_scheme", "output_interval",  "sweep"};
  check_keys(doc, top_keys, origin, "the top-level object");

  Config cfg;
  Scenario& sc = cfg.scenario;

  const std::string variant = get_string(doc, "variant", origin);
  if (variant == "parabolic_parabolic") {
    sc.variant = Variant::ParabolicParabolic;
  } else if (variant == "parabolic_elliptic") {
    sc.variant = Variant::ParabolicElliptic;
  } else {
    fail(origin, "unknown variant '" + variant + "'");
  }

  if (!doc.contains("nonlinearity")) fail(origin, "missing key 'nonlinearity'");
  sc.nonlinearity = parse_nonlinearity(doc.at("nonlinearity"), origin);

  if (!doc.contains("initial_u")) fail(origin, "missing key 'initial_u'");
  sc.initial_u = parse_profile(doc.at("initial_u"), origin, "'initial_u'");
  sc.initial_v = doc.contains("initial_v")
                     ? parse_profile(doc.at("initial_v"), origin, "'initial_v'")
                     : sc.initial_u;

  const double cells = get_number(doc, "cells", origin);
  if (cells != std::floor(cells)) fail(origin, "'cells' must be an integer");
  sc.cells = static_cast<int>(cells);
  sc.dt_initial = get_number(doc, "dt_initial", origin);
  sc.dt_min = get_number(doc, "dt_min", origin);
  sc.dt_max = get_number(doc, "dt_max", origin);
  sc.t_end = get_number(doc, "t_end", origin);
  sc.t0_monitor = get_number(doc, "t0_monitor", origin);
  sc.blowup_threshold = get_number_or(doc, "blowup_threshold", 1e6, origin);
  sc.positivity_floor = get_number_or(doc, "positivity_floor", 1e-13, origin);
  sc.output_interval = get_number_or(doc, "output_interval", 0.0, origin);

  if (doc.contains("stepper")) {
    const std::string st = get_string(doc, "stepper", origin);
    if (st == "explicit_rk") {
      sc.stepper = StepperKind::ExplicitRK;
    } else if (st == "imex1") {
      sc.stepper = StepperKind::IMEX1;
    } else if (st == "fully_implicit") {
      sc.stepper = StepperKind::FullyImplicit;
    } else {
      fail(origin, "unknown stepper '" + st + "'");
    }
  }
  if (doc.contains("advection_scheme")) {
    const std::string ad = get_string(doc, "advection_scheme", origin);
    if (ad == "upwind") {
      sc.advection_scheme = AdvectionScheme::Upwind;
    } else if (ad == "central") {
      sc.advection_scheme = AdvectionScheme::Central;
    } else {
      fail(origin, "unknown advection_scheme '" + ad + "'");
    }
  }

  if (doc.contains("sweep")) {
    const auto& sw = doc.at("sweep");
    if (!sw.is_object()) fail(origin, "'sweep' must be an object");
    check_keys(sw, {"p", "mass"}, origin, "'sweep'");
    SweepGrid grid;
    if (!sw.contains("p") || !sw.at("p").is_array() || !sw.contains("mass") ||
        !sw.at("mass").is_array())
      fail(origin, "'sweep' needs arrays 'p' and 'mass'");
    grid.p = sw.at("p").get<std::vector<double>>();
    grid.mass = sw.at("mass").get<std::vector<double>>();
    if (grid.p.empty() || grid.mass.empty()) fail(origin, "'sweep' arrays must be nonempty");
    cfg.sweep = std::move(grid);
  }

  try {
    sc.validate();
  } catch (const std::invalid_argument& e) {
    fail(origin, e.what());
  }
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument(path + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

std::string scenario_to_json(const Scenario& sc) {
  nlohmann::json j;
  j["variant"] = (sc.variant == Variant::ParabolicParabolic) ? "parabolic_parabolic"
                                                             : "parabolic_elliptic";
  switch (sc.nonlinearity.kind()) {
    case DiffusionKind::Power:
      j["nonlinearity"] = {{"kind", "power"}, {"p", sc.nonlinearity.power_exponent()}};
      break;
    case DiffusionKind::Constant:
      j["nonlinearity"] = {{"kind", "constant"}, {"c", sc.nonlinearity.constant_value()}};
      break;
    case DiffusionKind::Tabulated:
      j["nonlinearity"] = {{"kind", "tabulated"}};
      break;
  }
  j["initial_u"] = {{"profile", profile_name(sc.initial_u.profile)},
                    {"mass", sc.initial_u.mass},
                    {"amplitude", sc.initial_u.amplitude}};
  if (sc.variant == Variant::ParabolicParabolic)
    j["initial_v"] = {{"profile", profile_name(sc.initial_v.profile)},
                      {"mass", sc.initial_v.mass},
                      {"amplitude", sc.initial_v.amplitude}};
  j["cells"] = sc.cells;
  j["dt_initial"] = sc.dt_initial;
  j["dt_min"] = sc.dt_min;
  j["dt_max"] = sc.dt_max;
  j["t_end"] = sc.t_end;
  j["t0_monitor"] = sc.t0_monitor;
  j["blowup_threshold"] = sc.blowup_threshold;
  j["positivity_floor"] = sc.positivity_floor;
  j["stepper"] = (sc.stepper == StepperKind::ExplicitRK)
                     ? "explicit_rk"
                     : (sc.stepper == StepperKind::IMEX1 ? "imex1" : "fully_implicit");
  j["advection_scheme"] =
      (sc.advection_scheme == AdvectionScheme::Upwind) ? "upwind" : "central";
  if (sc.output_interval > 0.0) j["output_interval"] = sc.output_interval;
  return j.dump(2);
}

}  // namespace ks1d
