#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qvs/semiclassical.hpp"
#include "qvs/sweep.hpp"

namespace qvs {

/// 64-bit FNV-1a over a byte string; used to fingerprint resolved configs.
std::uint64_t fnv1a(std::string_view bytes);

/// Lower-case fixed-width hex of a 64-bit value.
std::string hex64(std::uint64_t v);

/// "2026-08-15T12:34:56Z"
std::string iso_timestamp_utc();

/// Shortest decimal that round-trips a double (printf %.17g).
std::string format_g17(double v);

/// Write via temp file + rename so readers never observe partial content.
/// Throws IoError.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);  // throws IoError

// --- spectrum CSV ----------------------------------------------------------
// Header lines start with "# key = value" and carry grid, solver, charge,
// residual-potential and diagnostic metadata; then "kx,ky,F" rows in grid
// order (kx outer).  Values use 17-significant-digit decimals, so a
// write/read round trip is bit-exact.  Content is deterministic: no
// timestamps, no thread counts.
std::string spectrum_csv(const Spectrum& spec);
void write_spectrum_csv(const std::string& path, const Spectrum& spec);
Spectrum read_spectrum_csv(const std::string& path);  // throws IoError

// --- raw binary raster -----------------------------------------------------
// Little-endian layout: magic "QVSRASTR", u32 version, u32 nx, u32 ny,
// f64 kx_min, kx_max, ky_min, ky_max, kz, charge, then nx*ny f64 values
// row-major with kx as the row index.
std::string spectrum_binary(const Spectrum& spec);
void write_spectrum_binary(const std::string& path, const Spectrum& spec);
Spectrum read_spectrum_binary(const std::string& path);  // throws IoError

// --- raster heatmap --------------------------------------------------------
enum class RasterScale { Linear, Log };

/// 16-bit PGM heatmap (width = nx, height = ny, top row = ky_max) plus a
/// "<path>.json" sidecar documenting the pixel-to-momentum mapping and the
/// value scale.  Log scale clips at 1e-12 of the peak.  Deterministic.
void export_raster(const Spectrum& spec, const std::string& path,
                   RasterScale scale);

// --- scan CSV --------------------------------------------------------------
std::string scan_csv(const ScanTable& table);
void write_scan_csv(const std::string& path, const ScanTable& table);

// --- semiclassical CSV -----------------------------------------------------
struct SemiclassicalRow {
  Vec3 k;
  PhaseIntegralReport report;
  double F_exact = 0.0;  // NaN when not computed
  std::string error;     // nonempty when analysis failed for this k
};

std::string semiclassical_csv(const std::vector<SemiclassicalRow>& rows);
void write_semiclassical_csv(const std::string& path,
                             const std::vector<SemiclassicalRow>& rows);

}  // namespace qvs
