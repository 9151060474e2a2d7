#include "qvs/config.hpp"

#include <cmath>
#include <set>

#include "json.hpp"
#include "qvs/errors.hpp"
#include "qvs/output.hpp"

namespace qvs {

using nlohmann::json;

const char* task_name(Task t) {
  switch (t) {
    case Task::Mode: return "mode";
    case Task::Sweep: return "sweep";
    case Task::Scan: return "scan";
    case Task::Semiclassical: return "semiclassical";
    case Task::Validate: return "validate";
  }
  return "?";
}

Task task_from_string(const std::string& s) {
  if (s == "mode") return Task::Mode;
  if (s == "sweep") return Task::Sweep;
  if (s == "scan") return Task::Scan;
  if (s == "semiclassical") return Task::Semiclassical;
  if (s == "validate") return Task::Validate;
  throw ConfigError("unknown task '" + s + "'");
}

namespace {

void reject_unknown(const json& obj, const char* where,
                    std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) {
        ok = true;
        break;
      }
    if (!ok)
      throw ConfigError(std::string("unknown key '") + key + "' in " + where);
  }
}

double num(const json& obj, const char* where, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number())
    throw ConfigError(std::string(where) + "." + key + " must be a number");
  return v.get<double>();
}

double num_req(const json& obj, const char* where, const char* key) {
  if (!obj.contains(key))
    throw ConfigError(std::string(where) + " requires key '" + key + "'");
  return num(obj, where, key, 0.0);
}

bool boolean(const json& obj, const char* where, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean())
    throw ConfigError(std::string(where) + "." + key + " must be a boolean");
  return v.get<bool>();
}

std::string str(const json& obj, const char* where, const char* key,
                const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string())
    throw ConfigError(std::string(where) + "." + key + " must be a string");
  return v.get<std::string>();
}

/// [min, max, n] triple for one grid axis.
void axis(const json& obj, const char* where, const char* key, double& lo,
          double& hi, int& n) {
  if (!obj.contains(key))
    throw ConfigError(std::string(where) + " requires axis '" + key + "'");
  const json& v = obj.at(key);
  if (!v.is_array() || v.size() != 3 || !v[0].is_number() ||
      !v[1].is_number() || !v[2].is_number_integer())
    throw ConfigError(std::string(where) + "." + key +
                      " must be [min, max, n] with integer n");
  lo = v[0].get<double>();
  hi = v[1].get<double>();
  n = v[2].get<int>();
}

Vec3 vec3(const json& obj, const char* where, const char* key) {
  if (!obj.contains(key))
    throw ConfigError(std::string(where) + " requires key '" + key + "'");
  const json& v = obj.at(key);
  if (!v.is_array() || v.size() != 3)
    throw ConfigError(std::string(where) + "." + key + " must be [x, y, z]");
  for (int i = 0; i < 3; ++i)
    if (!v[i].is_number())
      throw ConfigError(std::string(where) + "." + key + " must be numeric");
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

FieldConfig parse_field(const json& j, double& charge) {
  reject_unknown(j, "field", {"charge", "pulses"});
  charge = num(j, "field", "charge", -1.0);
  if (charge == 0.0) throw ConfigError("field.charge must be nonzero");
  if (!j.contains("pulses") || !j.at("pulses").is_array())
    throw ConfigError("field requires a 'pulses' array");
  FieldConfig f;
  for (const json& p : j.at("pulses")) {
    if (!p.is_object()) throw ConfigError("field.pulses entries must be objects");
    reject_unknown(p, "field.pulses[]",
                   {"E01", "delta", "omega", "tau", "delay", "phase"});
    EllipticPulse pulse;
    pulse.E01 = num_req(p, "field.pulses[]", "E01");
    pulse.delta = num(p, "field.pulses[]", "delta", 0.0);
    pulse.omega = num(p, "field.pulses[]", "omega", 0.0);
    pulse.tau = num_req(p, "field.pulses[]", "tau");
    pulse.delay = num(p, "field.pulses[]", "delay", 0.0);
    pulse.phase = num(p, "field.pulses[]", "phase", 0.0);
    f.pulses.push_back(pulse);
  }
  f.validate();
  return f;
}

SolverSettings parse_solver(const json& j) {
  reject_unknown(j, "solver",
                 {"rel_tol", "abs_tol", "max_steps", "envelope_cut",
                  "formulation", "t_start", "t_end"});
  SolverSettings s;
  s.rel_tol = num(j, "solver", "rel_tol", s.rel_tol);
  s.abs_tol = num(j, "solver", "abs_tol", s.abs_tol);
  s.max_steps = long(num(j, "solver", "max_steps", double(s.max_steps)));
  s.envelope_cut = num(j, "solver", "envelope_cut", s.envelope_cut);
  s.formulation =
      formulation_from_string(str(j, "solver", "formulation", "fgh"));
  s.t_start_override = num(j, "solver", "t_start", s.t_start_override);
  s.t_end_override = num(j, "solver", "t_end", s.t_end_override);
  s.validate();
  return s;
}

MomentumGrid parse_grid(const json& j) {
  reject_unknown(j, "grid", {"kx", "ky", "kz"});
  MomentumGrid g;
  axis(j, "grid", "kx", g.kx_min, g.kx_max, g.nx);
  axis(j, "grid", "ky", g.ky_min, g.ky_max, g.ny);
  g.kz = num(j, "grid", "kz", 0.0);
  try {
    g.validate();
  } catch (const GridError& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
  return g;
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be an object");

  reject_unknown(j, "config root",
                 {"task", "output_dir", "strict", "field", "solver", "grid",
                  "mode", "scan", "semiclassical", "sweep", "validate"});

  RunConfig c;
  if (!j.contains("task")) throw ConfigError("config requires 'task'");
  c.task = task_from_string(str(j, "config", "task", ""));
  c.output_dir = str(j, "config", "output_dir", "out");
  c.strict = boolean(j, "config", "strict", false);

  if (!j.contains("field")) throw ConfigError("config requires 'field'");
  c.field = parse_field(j.at("field"), c.charge);
  c.solver = j.contains("solver") ? parse_solver(j.at("solver")) : SolverSettings{};

  const bool needs_grid = c.task == Task::Sweep || c.task == Task::Scan;
  if (j.contains("grid")) {
    c.grid = parse_grid(j.at("grid"));
    c.has_grid = true;
  } else if (needs_grid) {
    throw ConfigError(std::string(task_name(c.task)) + " task requires 'grid'");
  }

  if (c.task == Task::Mode) {
    if (!j.contains("mode")) throw ConfigError("mode task requires 'mode'");
    const json& m = j.at("mode");
    reject_unknown(m, "mode", {"k", "all_formulations", "samples"});
    c.mode.k = vec3(m, "mode", "k");
    c.mode.all_formulations = boolean(m, "mode", "all_formulations", false);
    c.mode.samples = int(num(m, "mode", "samples", 0.0));
    if (c.mode.samples < 0) throw ConfigError("mode.samples must be >= 0");
  }
  if (c.task == Task::Scan) {
    if (!j.contains("scan")) throw ConfigError("scan task requires 'scan'");
    const json& m = j.at("scan");
    reject_unknown(m, "scan", {"parameter", "values"});
    c.scan.parameter = str(m, "scan", "parameter", "");
    if (c.scan.parameter.empty())
      throw ConfigError("scan.parameter must be a nonempty string");
    if (!m.contains("values") || !m.at("values").is_array() ||
        m.at("values").empty())
      throw ConfigError("scan.values must be a nonempty array");
    for (const json& v : m.at("values")) {
      if (!v.is_number()) throw ConfigError("scan.values must be numeric");
      c.scan.values.push_back(v.get<double>());
    }
  }
  if (c.task == Task::Semiclassical) {
    if (!j.contains("semiclassical"))
      throw ConfigError("semiclassical task requires 'semiclassical'");
    const json& m = j.at("semiclassical");
    reject_unknown(m, "semiclassical",
                   {"kx", "ky", "kz", "seeds", "with_exact"});
    axis(m, "semiclassical", "kx", c.semiclassical.kx_min,
         c.semiclassical.kx_max, c.semiclassical.n);
    if (c.semiclassical.n < 1)
      throw ConfigError("semiclassical.kx needs n >= 1");
    c.semiclassical.ky = num(m, "semiclassical", "ky", 0.0);
    c.semiclassical.kz = num(m, "semiclassical", "kz", 0.0);
    c.semiclassical.seeds = int(num(m, "semiclassical", "seeds", 10.0));
    if (c.semiclassical.seeds < 1)
      throw ConfigError("semiclassical.seeds must be >= 1");
    c.semiclassical.with_exact = boolean(m, "semiclassical", "with_exact", true);
  }
  if (j.contains("sweep")) {
    const json& m = j.at("sweep");
    reject_unknown(m, "sweep", {"raster", "binary", "density"});
    c.sweep_out.raster = str(m, "sweep", "raster", "none");
    if (c.sweep_out.raster != "none" && c.sweep_out.raster != "linear" &&
        c.sweep_out.raster != "log" && c.sweep_out.raster != "both")
      throw ConfigError("sweep.raster must be none|linear|log|both");
    c.sweep_out.binary = boolean(m, "sweep", "binary", false);
    c.sweep_out.density = boolean(m, "sweep", "density", true);
  }
  if (j.contains("validate")) {
    const json& m = j.at("validate");
    reject_unknown(m, "validate", {"cases", "seed"});
    c.validate_spec.cases = int(num(m, "validate", "cases", 20.0));
    if (c.validate_spec.cases < 1)
      throw ConfigError("validate.cases must be >= 1");
    const double seed = num(m, "validate", "seed", 1.0);
    if (seed < 0) throw ConfigError("validate.seed must be >= 0");
    c.validate_spec.seed = std::uint64_t(seed);
  }

  c.canonical = j.dump();  // nlohmann::json orders object keys, so this is
                           // independent of input formatting
  c.hash = hex64(fnv1a(c.canonical));
  return c;
}

RunConfig load_config(const std::string& path) {
  return parse_config(read_file(path));
}

}  // namespace qvs
