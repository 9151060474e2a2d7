#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qvs/solve.hpp"
#include "qvs/sweep.hpp"

namespace qvs {

enum class Task { Mode, Sweep, Scan, Semiclassical, Validate };

const char* task_name(Task t);
Task task_from_string(const std::string& s);  // throws ConfigError

struct ModeSpec {
  Vec3 k{};
  bool all_formulations = false;
  int samples = 0;  // trajectory samples to record (0 = none)
};

struct ScanSpec {
  std::string parameter;  // "pulses[i].<field>"
  std::vector<double> values;
};

struct SemiclassicalSpec {
  double kx_min = 0.0, kx_max = 0.0;
  int n = 1;
  double ky = 0.0, kz = 0.0;
  int seeds = 10;
  bool with_exact = true;  // also solve the ODE at each k for comparison
};

struct SweepOutputSpec {
  std::string raster = "none";  // none | linear | log | both
  bool binary = false;
  bool density = true;
};

struct ValidateSpec {
  int cases = 20;
  std::uint64_t seed = 1;
};

/// Fully resolved run request.  `canonical` is the key-sorted JSON echo the
/// config hash is computed over, so hashes are independent of formatting.
struct RunConfig {
  Task task = Task::Validate;
  std::string output_dir = "out";
  bool strict = false;
  FieldConfig field;
  double charge = -1.0;
  SolverSettings solver;
  MomentumGrid grid;
  bool has_grid = false;
  ModeSpec mode;
  ScanSpec scan;
  SemiclassicalSpec semiclassical;
  SweepOutputSpec sweep_out;
  ValidateSpec validate_spec;

  std::string canonical;
  std::string hash;
};

/// Parse + validate a JSON config.  Unknown keys anywhere are rejected;
/// sections referenced by the task must be present.  Throws ConfigError.
RunConfig parse_config(const std::string& json_text);

/// read_file + parse_config.
RunConfig load_config(const std::string& path);

}  // namespace qvs
