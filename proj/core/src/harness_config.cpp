#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "vacflow/errors.hpp"
#include "vacflow/harness.hpp"

namespace vacflow {

const char* to_string(InitialKind kind) {
  switch (kind) {
    case InitialKind::zero:
      return "zero";
    case InitialKind::affine:
      return "affine";
    case InitialKind::gradient:
      return "gradient";
    case InitialKind::rotation:
      return "rotation";
  }
  return "zero";
}

InitialKind initial_kind_from_string(const std::string& name) {
  if (name == "zero") return InitialKind::zero;
  if (name == "affine") return InitialKind::affine;
  if (name == "gradient") return InitialKind::gradient;
  if (name == "rotation") return InitialKind::rotation;
  throw ValidationError("unknown initial velocity kind '" + name + "'");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != t.size()) throw ValidationError(key + ": expected a number, got '" + text + "'");
  return value;
}

long to_long(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::size_t used = 0;
  long value = 0;
  try {
    value = std::stol(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != t.size()) throw ValidationError(key + ": expected an integer, got '" + text + "'");
  return value;
}

int to_int(const std::string& key, const std::string& text) {
  const long v = to_long(key, text);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw ValidationError(key + ": integer out of range");
  }
  return static_cast<int>(v);
}

bool to_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ValidationError(key + ": expected true/false, got '" + text + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!trim(item).empty()) out.push_back(to_double(key, item));
  }
  return out;
}

using Setter = void (*)(RunConfig&, const std::string&, const std::string&);

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"domain.dim", [](RunConfig& c, const std::string& k, const std::string& v) { c.domain.dim = to_int(k, v); }},
      {"domain.n_horizontal",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.domain.n_horizontal = to_int(k, v); }},
      {"domain.n_vertical",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.domain.n_vertical = to_int(k, v); }},
      {"profile.kind",
       [](RunConfig& c, const std::string&, const std::string& v) { c.profile.kind = profile_kind_from_string(trim(v)); }},
      {"profile.c", [](RunConfig& c, const std::string& k, const std::string& v) { c.profile.c = to_double(k, v); }},
      {"profile.width",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.profile.width = to_double(k, v); }},
      {"profile.degeneracy",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.profile.degeneracy = to_double(k, v); }},
      {"eos.gamma", [](RunConfig& c, const std::string& k, const std::string& v) { c.eos.gamma = to_double(k, v); }},
      {"eos.c_gamma",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.eos.c_gamma = to_double(k, v); }},
      {"initial.kind",
       [](RunConfig& c, const std::string&, const std::string& v) { c.initial.kind = initial_kind_from_string(trim(v)); }},
      {"initial.amplitude",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.initial.amplitude = to_double(k, v); }},
      {"initial.mollify_radius",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.initial.mollify_radius = to_double(k, v); }},
      {"solver.kappa",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.solver.kappa = to_double(k, v); }},
      {"solver.dt", [](RunConfig& c, const std::string& k, const std::string& v) { c.solver.dt = to_double(k, v); }},
      {"solver.cfl",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.solver.cfl_number = to_double(k, v); }},
      {"solver.t_end",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.solver.t_end = to_double(k, v); }},
      {"solver.snapshot_stride",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.solver.snapshot_stride = to_int(k, v); }},
      {"solver.force_form",
       [](RunConfig& c, const std::string&, const std::string& v) { c.solver.force_form = force_form_from_string(trim(v)); }},
      {"solver.energy_reports",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.solver.energy_reports = to_bool(k, v); }},
      {"output.directory",
       [](RunConfig& c, const std::string&, const std::string& v) { c.output.directory = trim(v); }},
      {"output.energy_csv",
       [](RunConfig& c, const std::string&, const std::string& v) { c.output.energy_csv = trim(v); }},
      {"output.dump_stride",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.output.dump_stride = to_int(k, v); }},
      {"output.dump_prefix",
       [](RunConfig& c, const std::string&, const std::string& v) { c.output.dump_prefix = trim(v); }},
      {"study.kappas", [](RunConfig& c, const std::string& k, const std::string& v) { c.study.kappas = to_list(k, v); }},
      {"study.levels", [](RunConfig& c, const std::string& k, const std::string& v) { c.study.levels = to_int(k, v); }},
      {"study.seed",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const long s = to_long(k, v);
         if (s < 0) throw ValidationError(k + ": seed must be >= 0");
         c.study.seed = static_cast<std::uint64_t>(s);
       }},
  };
  return table;
}

void set_value(RunConfig& config, const std::string& key, const std::string& value) {
  const auto it = setters().find(key);
  if (it == setters().end()) throw ValidationError("unknown configuration key '" + key + "'");
  it->second(config, key, value);
}

}  // namespace

void validate(const RunConfig& c) {
  // build_domain carries the grid-size checks.
  (void)build_domain(c.domain.dim, c.domain.n_horizontal, c.domain.n_vertical);
  if (!(c.eos.gamma > 1.0)) throw ValidationError("eos.gamma must be > 1");
  if (c.eos.c_gamma != 1.0) {
    throw ValidationError("eos.c_gamma: the solver is normalized to p = rho^gamma; only 1 is supported");
  }
  if (!(c.profile.c > 0.0)) throw ValidationError("profile.c must be > 0");
  if (!(c.initial.mollify_radius >= 0.0)) throw ValidationError("initial.mollify_radius must be >= 0");
  if (!std::isfinite(c.initial.amplitude)) throw ValidationError("initial.amplitude must be finite");
  if (c.initial.kind == InitialKind::rotation && c.domain.dim < 2) {
    throw ValidationError("initial.kind = rotation needs dim >= 2");
  }
  if (c.profile.kind == ProfileKind::custom) {
    throw ValidationError("profile.kind = custom is only available through the library API");
  }
  SolverConfig s = c.solver;
  s.gamma = c.eos.gamma;
  validate(s);
  if (c.output.dump_stride < 0) throw ValidationError("output.dump_stride must be >= 0");
  if (c.study.levels < 1) throw ValidationError("study.levels must be >= 1");
}

RunConfig parse_config(std::istream& in) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  RunConfig config;
  static const std::vector<std::string> sections{"domain", "profile", "eos", "initial",
                                                 "solver", "output", "study"};
  for (const auto& [section, body] : tree) {
    if (std::find(sections.begin(), sections.end(), section) == sections.end()) {
      throw ValidationError("config: unknown section or key outside a section '" + section + "'");
    }
    for (const auto& [key, value] : body) set_value(config, section + "." + key, value.data());
  }
  config.solver.gamma = config.eos.gamma;
  validate(config);
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  return parse_config(in);
}

void apply_override(RunConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ValidationError("override '" + assignment + "' must look like section.key=value");
  set_value(config, trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
  config.solver.gamma = config.eos.gamma;
}

std::string to_ini(const RunConfig& c) {
  std::string kappas;
  for (std::size_t i = 0; i < c.study.kappas.size(); ++i) {
    kappas += fmt::format("{}{:.17g}", i ? ", " : "", c.study.kappas[i]);
  }
  return fmt::format(
      "[domain]\ndim = {}\nn_horizontal = {}\nn_vertical = {}\n\n"
      "[profile]\nkind = {}\nc = {:.17g}\nwidth = {:.17g}\ndegeneracy = {:.17g}\n\n"
      "[eos]\ngamma = {:.17g}\nc_gamma = {:.17g}\n\n"
      "[initial]\nkind = {}\namplitude = {:.17g}\nmollify_radius = {:.17g}\n\n"
      "[solver]\nkappa = {:.17g}\ndt = {:.17g}\ncfl = {:.17g}\nt_end = {:.17g}\nsnapshot_stride = {}\n"
      "force_form = {}\nenergy_reports = {}\n\n"
      "[output]\ndirectory = {}\nenergy_csv = {}\ndump_stride = {}\ndump_prefix = {}\n\n"
      "[study]\nkappas = {}\nlevels = {}\nseed = {}\n",
      c.domain.dim, c.domain.n_horizontal, c.domain.n_vertical, to_string(c.profile.kind), c.profile.c,
      c.profile.width, c.profile.degeneracy, c.eos.gamma, c.eos.c_gamma, to_string(c.initial.kind),
      c.initial.amplitude, c.initial.mollify_radius, c.solver.kappa, c.solver.dt, c.solver.cfl_number,
      c.solver.t_end, c.solver.snapshot_stride, to_string(c.solver.force_form),
      c.solver.energy_reports ? "true" : "false", c.output.directory, c.output.energy_csv, c.output.dump_stride,
      c.output.dump_prefix, kappas, c.study.levels, c.study.seed);
}

DiscreteDomain make_domain(const RunConfig& c) {
  return build_domain(c.domain.dim, c.domain.n_horizontal, c.domain.n_vertical);
}

DensityProfile make_profile(const RunConfig& c, const DiscreteDomain& domain) {
  ProfileParams p;
  p.gamma = c.eos.gamma;
  p.c = c.profile.c;
  p.width = c.profile.width;
  p.degeneracy = c.profile.degeneracy;
  return density_profile(c.profile.kind, p, domain);
}

VectorField make_initial_velocity(const RunConfig& c, const DiscreteDomain& domain) {
  const int dim = domain.dim();
  const int v = domain.vertical_axis();
  const double A = c.initial.amplitude;
  const double pi = std::numbers::pi;
  VectorField u(domain);
  switch (c.initial.kind) {
    case InitialKind::zero:
      break;
    case InitialKind::affine:
      u[v] = ScalarField::from_function(domain, [=](const Point& x) { return A * (x[v] - 0.5); });
      break;
    case InitialKind::gradient:
      // u = D phi, phi = A [ (x_v - 1/2)^2 / 2 + sum_h cos(2 pi x_h) sin(pi x_v) / (4 pi) ].
      for (int h = 0; h < dim - 1; ++h) {
        u[h] = ScalarField::from_function(
            domain, [=](const Point& x) { return -0.5 * A * std::sin(2 * pi * x[h]) * std::sin(pi * x[v]); });
      }
      u[v] = ScalarField::from_function(domain, [=](const Point& x) {
        double s = x[v] - 0.5;
        for (int h = 0; h < dim - 1; ++h) s += 0.25 * std::cos(2 * pi * x[h]) * std::cos(pi * x[v]);
        return A * s;
      });
      break;
    case InitialKind::rotation:
      if (dim < 2) throw ValidationError("rotation initial data needs dim >= 2");
      // Periodic vortex in the (x_0, x_v) plane from psi = A sin(2 pi x_0) sin^2(pi x_v) / (2 pi).
      u[0] = ScalarField::from_function(
          domain, [=](const Point& x) { return 0.5 * A * std::sin(2 * pi * x[0]) * std::sin(2 * pi * x[v]); });
      u[v] = ScalarField::from_function(domain, [=](const Point& x) {
        const double s = std::sin(pi * x[v]);
        return -A * std::cos(2 * pi * x[0]) * s * s;
      });
      break;
  }
  return u;
}

std::pair<DensityProfile, VectorField> make_initial_data(const RunConfig& c) {
  const DiscreteDomain domain = make_domain(c);
  DensityProfile profile = make_profile(c, domain);
  VectorField u0 = make_initial_velocity(c, domain);
  if (c.initial.mollify_radius > 0.0) {
    auto [u, rho] = mollify_initial_data(u0, profile.rho0, c.initial.mollify_radius, c.eos.gamma);
    return {profile_from_field(rho, c.eos.gamma), std::move(u)};
  }
  return {std::move(profile), std::move(u0)};
}

}  // namespace vacflow
