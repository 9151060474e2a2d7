#include "qvs/output.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "qvs/errors.hpp"

namespace qvs {

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string iso_timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + tmp);
    out.write(content.data(), std::streamsize(content.size()));
    out.flush();
    if (!out) throw IoError("write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("rename failed: " + path + ": " + ec.message());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path);
  return buf.str();
}

// --- spectrum CSV ----------------------------------------------------------

namespace {

void meta(std::string& out, const char* key, const std::string& value) {
  out += "# ";
  out += key;
  out += " = ";
  out += value;
  out += '\n';
}

void meta(std::string& out, const char* key, double value) {
  meta(out, key, format_g17(value));
}

}  // namespace

std::string spectrum_csv(const Spectrum& spec) {
  std::string out;
  out.reserve(64 * spec.values.size() + 1024);
  meta(out, "format", "qvs-spectrum-1");
  meta(out, "config_hash", spec.config_hash.empty() ? "none" : spec.config_hash);
  meta(out, "kx_min", spec.grid.kx_min);
  meta(out, "kx_max", spec.grid.kx_max);
  meta(out, "nx", double(spec.grid.nx));
  meta(out, "ky_min", spec.grid.ky_min);
  meta(out, "ky_max", spec.grid.ky_max);
  meta(out, "ny", double(spec.grid.ny));
  meta(out, "kz", spec.grid.kz);
  meta(out, "charge", spec.charge);
  meta(out, "a_end_x", spec.A_end.x);
  meta(out, "a_end_y", spec.A_end.y);
  meta(out, "rel_tol", spec.settings.rel_tol);
  meta(out, "abs_tol", spec.settings.abs_tol);
  meta(out, "envelope_cut", spec.settings.envelope_cut);
  meta(out, "formulation", to_string(spec.settings.formulation));
  meta(out, "max_drift", spec.diag.max_drift);
  meta(out, "max_asymptotic_residual", spec.diag.max_asymptotic_residual);
  meta(out, "total_steps", double(spec.diag.total_steps));
  meta(out, "failures", double(spec.diag.failures.size()));
  out += "kx,ky,F\n";
  for (int i = 0; i < spec.grid.nx; ++i)
    for (int j = 0; j < spec.grid.ny; ++j) {
      out += format_g17(spec.grid.kx(i));
      out += ',';
      out += format_g17(spec.grid.ky(j));
      out += ',';
      out += format_g17(spec.values[spec.grid.index(i, j)]);
      out += '\n';
    }
  return out;
}

void write_spectrum_csv(const std::string& path, const Spectrum& spec) {
  write_file_atomic(path, spectrum_csv(spec));
}

Spectrum read_spectrum_csv(const std::string& path) {
  const std::string text = read_file(path);
  std::map<std::string, std::string> kv;
  Spectrum spec;
  std::istringstream in(text);
  std::string line;
  bool header_done = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find(" = ");
      if (eq != std::string::npos && line.size() > 2)
        kv[line.substr(2, eq - 2)] = line.substr(eq + 3);
      continue;
    }
    if (!header_done) {  // column header row
      header_done = true;
      continue;
    }
    const char* s = line.c_str();
    char* end = nullptr;
    std::strtod(s, &end);  // kx (recomputed from grid)
    if (*end != ',') throw IoError(path + ": malformed row: " + line);
    std::strtod(end + 1, &end);  // ky
    if (*end != ',') throw IoError(path + ": malformed row: " + line);
    spec.values.push_back(std::strtod(end + 1, &end));
  }
  auto want = [&](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw IoError(path + ": missing header key " + key);
    return it->second;
  };
  auto wantd = [&](const char* key) { return std::strtod(want(key).c_str(), nullptr); };
  spec.grid.kx_min = wantd("kx_min");
  spec.grid.kx_max = wantd("kx_max");
  spec.grid.nx = int(wantd("nx"));
  spec.grid.ky_min = wantd("ky_min");
  spec.grid.ky_max = wantd("ky_max");
  spec.grid.ny = int(wantd("ny"));
  spec.grid.kz = wantd("kz");
  spec.charge = wantd("charge");
  spec.A_end = {wantd("a_end_x"), wantd("a_end_y"), 0.0};
  spec.settings.rel_tol = wantd("rel_tol");
  spec.settings.abs_tol = wantd("abs_tol");
  spec.settings.envelope_cut = wantd("envelope_cut");
  spec.settings.formulation = formulation_from_string(want("formulation"));
  spec.diag.max_drift = wantd("max_drift");
  spec.diag.max_asymptotic_residual = wantd("max_asymptotic_residual");
  spec.diag.total_steps = long(wantd("total_steps"));
  spec.config_hash = want("config_hash");
  if (spec.config_hash == "none") spec.config_hash.clear();
  if (spec.values.size() != spec.grid.size())
    throw IoError(path + ": row count does not match grid dimensions");
  return spec;
}

// --- raw binary raster -----------------------------------------------------

namespace {

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T take(const std::string& in, std::size_t& pos, const std::string& path) {
  if (pos + sizeof(T) > in.size()) throw IoError(path + ": truncated raster");
  T v;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

}  // namespace

std::string spectrum_binary(const Spectrum& spec) {
  std::string out;
  out.reserve(40 + 8 * spec.values.size());
  out.append("QVSRASTR", 8);
  put<std::uint32_t>(out, 1);
  put<std::uint32_t>(out, std::uint32_t(spec.grid.nx));
  put<std::uint32_t>(out, std::uint32_t(spec.grid.ny));
  put<std::uint32_t>(out, 0);  // pad to 8-byte alignment
  put<double>(out, spec.grid.kx_min);
  put<double>(out, spec.grid.kx_max);
  put<double>(out, spec.grid.ky_min);
  put<double>(out, spec.grid.ky_max);
  put<double>(out, spec.grid.kz);
  put<double>(out, spec.charge);
  for (double v : spec.values) put<double>(out, v);
  return out;
}

void write_spectrum_binary(const std::string& path, const Spectrum& spec) {
  write_file_atomic(path, spectrum_binary(spec));
}

Spectrum read_spectrum_binary(const std::string& path) {
  const std::string in = read_file(path);
  if (in.size() < 8 || in.compare(0, 8, "QVSRASTR") != 0)
    throw IoError(path + ": not a qvs raster file");
  std::size_t pos = 8;
  const auto version = take<std::uint32_t>(in, pos, path);
  if (version != 1) throw IoError(path + ": unsupported raster version");
  Spectrum spec;
  spec.grid.nx = int(take<std::uint32_t>(in, pos, path));
  spec.grid.ny = int(take<std::uint32_t>(in, pos, path));
  take<std::uint32_t>(in, pos, path);  // pad
  spec.grid.kx_min = take<double>(in, pos, path);
  spec.grid.kx_max = take<double>(in, pos, path);
  spec.grid.ky_min = take<double>(in, pos, path);
  spec.grid.ky_max = take<double>(in, pos, path);
  spec.grid.kz = take<double>(in, pos, path);
  spec.charge = take<double>(in, pos, path);
  spec.values.resize(spec.grid.size());
  for (double& v : spec.values) v = take<double>(in, pos, path);
  return spec;
}

// --- raster heatmap --------------------------------------------------------

void export_raster(const Spectrum& spec, const std::string& path,
                   RasterScale scale) {
  const int nx = spec.grid.nx, ny = spec.grid.ny;
  if (spec.values.empty()) throw IoError("export_raster: empty spectrum");

  double vmin = spec.values[0], vmax = spec.values[0];
  for (double v : spec.values) {
    if (std::isnan(v)) continue;
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }

  double lo = vmin, hi = vmax;  // mapped linearly onto [0, 65535]
  double clip = 0.0;
  if (scale == RasterScale::Log) {
    clip = vmax > 0.0 ? 1e-12 * vmax : 0.0;
    if (vmax > 0.0) {
      lo = std::log10(clip);
      hi = std::log10(vmax);
    } else {
      lo = hi = 0.0;
    }
  }

  std::string out;
  char head[64];
  std::snprintf(head, sizeof head, "P5\n%d %d\n65535\n", nx, ny);
  out += head;
  out.reserve(out.size() + std::size_t(2) * nx * ny);
  const double span = hi - lo;
  for (int row = 0; row < ny; ++row) {
    const int j = ny - 1 - row;  // top row = ky_max
    for (int i = 0; i < nx; ++i) {
      double v = spec.values[spec.grid.index(i, j)];
      unsigned pix = 0;
      if (!std::isnan(v) && span > 0.0) {
        if (scale == RasterScale::Log) v = std::log10(std::max(v, clip));
        const double t = (v - lo) / span;
        pix = unsigned(std::lround(65535.0 * std::clamp(t, 0.0, 1.0)));
      }
      out += char(pix >> 8);  // PGM stores the most significant byte first
      out += char(pix & 0xff);
    }
  }
  write_file_atomic(path, out);

  nlohmann::ordered_json side;
  side["format"] = "PGM16";
  side["scale"] = scale == RasterScale::Log ? "log" : "linear";
  side["width"] = nx;
  side["height"] = ny;
  side["pixel_mapping"] =
      "pixel (row, col) holds F(kx(col), ky(height-1-row)); row 0 is ky_max";
  side["kx"] = {spec.grid.kx_min, spec.grid.kx_max};
  side["ky"] = {spec.grid.ky_min, spec.grid.ky_max};
  side["kz"] = spec.grid.kz;
  side["value_min"] = vmin;
  side["value_max"] = vmax;
  if (scale == RasterScale::Log) side["log_clip"] = clip;
  side["config_hash"] = spec.config_hash.empty() ? "none" : spec.config_hash;
  write_file_atomic(path + ".json", side.dump(2) + "\n");
}

// --- scan CSV --------------------------------------------------------------

std::string scan_csv(const ScanTable& table) {
  std::string out;
  meta(out, "format", "qvs-scan-1");
  meta(out, "parameter", table.parameter);
  out += "value,gamma,density,peak_F,status\n";
  for (const ScanRow& r : table.rows) {
    out += format_g17(r.value);
    out += ',';
    out += format_g17(r.gamma);
    out += ',';
    out += format_g17(r.density);
    out += ',';
    out += format_g17(r.peak_F);
    out += ',';
    out += r.failed ? "failed" : "ok";
    out += '\n';
  }
  return out;
}

void write_scan_csv(const std::string& path, const ScanTable& table) {
  write_file_atomic(path, scan_csv(table));
}

// --- semiclassical CSV -----------------------------------------------------

std::string semiclassical_csv(const std::vector<SemiclassicalRow>& rows) {
  std::string out;
  meta(out, "format", "qvs-semiclassical-1");
  out += "kx,ky,kz,pairs,K1,K2,alpha,F_boson,F_fermion,F_exact,status\n";
  for (const SemiclassicalRow& r : rows) {
    out += format_g17(r.k.x);
    out += ',';
    out += format_g17(r.k.y);
    out += ',';
    out += format_g17(r.k.z);
    out += ',';
    if (r.error.empty()) {
      char buf[16];
      std::snprintf(buf, sizeof buf, "%zu", r.report.pairs.size());
      out += buf;
      out += ',';
      out += r.report.K.empty() ? "nan" : format_g17(r.report.K[0]);
      out += ',';
      out += r.report.K.size() < 2 ? "nan" : format_g17(r.report.K[1]);
      out += ',';
      out += format_g17(r.report.alpha);
      out += ',';
      out += format_g17(r.report.F_boson);
      out += ',';
      out += format_g17(r.report.F_fermion);
      out += ',';
      out += format_g17(r.F_exact);
      out += ",ok\n";
    } else {
      std::string msg = r.error;
      for (char& c : msg)
        if (c == ',' || c == '\n') c = ';';
      out += "0,nan,nan,nan,nan,nan,";
      out += format_g17(r.F_exact);
      out += ',';
      out += msg;
      out += '\n';
    }
  }
  return out;
}

void write_semiclassical_csv(const std::string& path,
                             const std::vector<SemiclassicalRow>& rows) {
  write_file_atomic(path, semiclassical_csv(rows));
}

}  // namespace qvs
