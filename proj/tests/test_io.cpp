#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <set>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "qvs/config.hpp"
#include "qvs/output.hpp"
#include "qvs/run.hpp"

using namespace qvs;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() /
           ("qvs_io_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

Spectrum sample_spectrum() {
  Spectrum s;
  s.grid = {-1.0, 1.0, 4, -0.5, 0.5, 3, 0.25};
  s.values = {1.2345678901234567e-9, 0.0,    3.0839e-09, 7.0 / 3.0,
              1e-300,                -0.125, 6.02214e23, 2.2250738585072014e-308,
              0.1,                   M_PI,   1.0,        42.0};
  s.A_end = {-0.12345678901234567, 1e-5, 0.0};
  s.charge = 1.0;
  s.settings.rel_tol = 1e-10;
  s.settings.abs_tol = 1e-9;
  s.settings.envelope_cut = 6.5;
  s.settings.formulation = Formulation::Chi;
  s.diag.max_drift = 1.5e-9;
  s.diag.max_asymptotic_residual = 2.5e-10;
  s.diag.total_steps = 12345;
  s.config_hash = "00dead00beef0000";
  return s;
}

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(QVS_CLI_BIN) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  return WEXITSTATUS(rc);
}

std::string write_json(const TempDir& dir, const std::string& name,
                       const nlohmann::json& j) {
  const std::string path = dir.file(name);
  write_file_atomic(path, j.dump(2));
  return path;
}

nlohmann::json zero_field_json() {
  const nlohmann::json pulse = {{"E01", 0.0}, {"tau", 1.0}, {"omega", 1.0}};
  nlohmann::json field;
  field["pulses"] = nlohmann::json::array({pulse});
  return field;
}

}  // namespace

TEST_CASE("io: hashing and formatting primitives") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ull);   // FNV-1a offset basis
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);  // published test vector
  CHECK(hex64(0) == "0000000000000000");
  CHECK(hex64(0xdeadbeefull) == "00000000deadbeef");
  CHECK(format_g17(0.1) == "0.10000000000000001");
  for (double x : {M_PI, 1e-300, 6.02214076e23, -0.125, 0.0}) {
    const double back = std::strtod(format_g17(x).c_str(), nullptr);
    CHECK(back == x);
  }
  const std::string ts = iso_timestamp_utc();
  REQUIRE(ts.size() == 20);
  CHECK(ts[4] == '-');
  CHECK(ts[10] == 'T');
  CHECK(ts[19] == 'Z');
}

TEST_CASE("io: atomic writes leave no temporaries and fail loudly") {
  TempDir dir("atomic");
  const std::string path = dir.file("payload.txt");
  write_file_atomic(path, "first");
  write_file_atomic(path, "second");  // overwrite in place
  CHECK(read_file(path) == "second");
  CHECK_FALSE(fs::exists(path + ".tmp"));
  CHECK_THROWS_AS(write_file_atomic("/nonexistent-dir/x.txt", "y"), IoError);
  CHECK_THROWS_AS((void)read_file(dir.file("missing.txt")), IoError);
}

TEST_CASE("io: spectrum CSV round trip is bit exact") {
  TempDir dir("csv");
  const Spectrum s = sample_spectrum();
  const std::string path = dir.file("spectrum.csv");
  write_spectrum_csv(path, s);
  const Spectrum r = read_spectrum_csv(path);

  REQUIRE(r.values.size() == s.values.size());
  CHECK(std::memcmp(r.values.data(), s.values.data(),
                    s.values.size() * sizeof(double)) == 0);
  CHECK(r.grid.kx_min == s.grid.kx_min);
  CHECK(r.grid.kx_max == s.grid.kx_max);
  CHECK(r.grid.nx == s.grid.nx);
  CHECK(r.grid.ky_min == s.grid.ky_min);
  CHECK(r.grid.ky_max == s.grid.ky_max);
  CHECK(r.grid.ny == s.grid.ny);
  CHECK(r.grid.kz == s.grid.kz);
  CHECK(r.charge == s.charge);
  CHECK(r.A_end.x == s.A_end.x);
  CHECK(r.A_end.y == s.A_end.y);
  CHECK(r.settings.rel_tol == s.settings.rel_tol);
  CHECK(r.settings.abs_tol == s.settings.abs_tol);
  CHECK(r.settings.envelope_cut == s.settings.envelope_cut);
  CHECK(r.settings.formulation == Formulation::Chi);
  CHECK(r.diag.max_drift == s.diag.max_drift);
  CHECK(r.diag.total_steps == s.diag.total_steps);
  CHECK(r.config_hash == s.config_hash);

  // Deterministic content: a rewrite produces identical bytes.
  const std::string again = spectrum_csv(s);
  CHECK(read_file(path) == again);
}

TEST_CASE("io: binary spectrum round trip and corruption detection") {
  TempDir dir("bin");
  const Spectrum s = sample_spectrum();
  const std::string path = dir.file("spectrum.f64");
  write_spectrum_binary(path, s);
  const Spectrum r = read_spectrum_binary(path);
  CHECK(std::memcmp(r.values.data(), s.values.data(),
                    s.values.size() * sizeof(double)) == 0);
  CHECK(r.grid.nx == s.grid.nx);
  CHECK(r.grid.kz == s.grid.kz);
  CHECK(r.charge == s.charge);

  const std::string blob = spectrum_binary(s);
  write_file_atomic(dir.file("short.f64"), blob.substr(0, blob.size() - 9));
  CHECK_THROWS_AS((void)read_spectrum_binary(dir.file("short.f64")), IoError);
  write_file_atomic(dir.file("magic.f64"), "NOTQVSRA" + blob.substr(8));
  CHECK_THROWS_AS((void)read_spectrum_binary(dir.file("magic.f64")), IoError);
}

TEST_CASE("io: raster export layout, determinism, and sidecar") {
  TempDir dir("pgm");
  Spectrum s;
  s.grid = {-1.0, 1.0, 6, -0.5, 0.5, 4, 0.0};
  s.values.resize(s.grid.size());
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 4; ++j) s.values[s.grid.index(i, j)] = double(i + j);
  s.values[s.grid.index(2, 1)] = std::nan("");

  const std::string path = dir.file("heat.pgm");
  export_raster(s, path, RasterScale::Linear);
  const std::string pgm = read_file(path);
  const std::string head = "P5\n6 4\n65535\n";
  REQUIRE(pgm.size() == head.size() + 2u * 6u * 4u);
  CHECK(pgm.compare(0, head.size(), head) == 0);

  auto pixel = [&](int row, int col) {
    const std::size_t at = head.size() + 2 * (std::size_t(row) * 6 + col);
    const unsigned hi = static_cast<unsigned char>(pgm[at]);
    const unsigned lo = static_cast<unsigned char>(pgm[at + 1]);
    return (hi << 8) | lo;
  };
  CHECK(pixel(0, 5) == 65535u);  // peak: (i=5, j=3) lands in the top row
  CHECK(pixel(3, 0) == 0u);      // minimum: (i=0, j=0) in the bottom row
  CHECK(pixel(2, 2) == 0u);      // the NaN node renders black
  CHECK(pixel(0, 0) == unsigned(std::lround(65535.0 * 3.0 / 8.0)));

  export_raster(s, dir.file("again.pgm"), RasterScale::Linear);
  CHECK(read_file(dir.file("again.pgm")) == pgm);  // byte-deterministic

  const nlohmann::json side =
      nlohmann::json::parse(read_file(path + ".json"));
  CHECK(side.at("format") == "PGM16");
  CHECK(side.at("scale") == "linear");
  CHECK(side.at("width") == 6);
  CHECK(side.at("height") == 4);
  CHECK(side.at("value_max").get<double>() == 8.0);
  CHECK_FALSE(side.contains("log_clip"));

  export_raster(s, dir.file("log.pgm"), RasterScale::Log);
  const nlohmann::json lside =
      nlohmann::json::parse(read_file(dir.file("log.pgm.json")));
  CHECK(lside.at("scale") == "log");
  CHECK(lside.at("log_clip").get<double>() == Approx(8e-12));

  Spectrum flat = s;
  for (double& v : flat.values) v = 0.0;
  export_raster(flat, dir.file("flat.pgm"), RasterScale::Linear);
  const std::string fpgm = read_file(dir.file("flat.pgm"));
  for (std::size_t i = head.size(); i < fpgm.size(); ++i)
    CHECK(fpgm[i] == '\0');  // zero span renders uniformly black
}

TEST_CASE("io: scan and semiclassical CSV shapes") {
  ScanTable t;
  t.parameter = "pulses[0].omega";
  t.rows.push_back({/*value=*/0.1, /*density=*/2.5e-9, /*peak_F=*/1e-7,
                    /*gamma=*/0.7071, false, ""});
  t.rows.push_back({0.2, std::nan(""), std::nan(""), std::nan(""), true,
                    "nodes, failed\nbadly"});
  const std::string csv = scan_csv(t);
  CHECK(csv.find("# parameter = pulses[0].omega\n") != std::string::npos);
  CHECK(csv.find("value,gamma,density,peak_F,status\n") != std::string::npos);
  CHECK(csv.find(",ok\n") != std::string::npos);
  CHECK(csv.find(",failed\n") != std::string::npos);

  SemiclassicalRow ok;
  ok.k = {0.2, 0.0, 0.0};
  ok.report.pairs.resize(2);
  ok.report.K = {10.5, 11.0};
  ok.report.alpha = 1.25;
  ok.report.F_boson = 1e-9;
  ok.report.F_fermion = 2e-9;
  ok.F_exact = 3e-9;
  SemiclassicalRow bad;
  bad.k = {0.9, 0.0, 0.0};
  bad.F_exact = std::nan("");
  bad.error = "no complex turning points, in the search region";
  const std::string sc = semiclassical_csv({ok, bad});
  CHECK(sc.find("kx,ky,kz,pairs,K1,K2,alpha,F_boson,F_fermion,F_exact,status\n") !=
        std::string::npos);
  CHECK(sc.find(",2,10.5,11,") != std::string::npos);
  CHECK(sc.find(",ok\n") != std::string::npos);
  CHECK(sc.find("no complex turning points; in the search region\n") !=
        std::string::npos);  // commas sanitized so the row stays parseable
}

TEST_CASE("config: canonical hash ignores formatting, tracks content") {
  const std::string a = R"({"task":"sweep",
      "field":{"pulses":[{"E01":0.2,"tau":10.0}]},
      "grid":{"kx":[-1,1,8],"ky":[-1,1,8]}})";
  const std::string b = R"({"grid":{"ky":[-1,1,8],"kx":[-1,1,8]},
      "field":{"pulses":[{"tau":10.0,"E01":0.2}]},"task":"sweep"})";
  const RunConfig ca = parse_config(a);
  const RunConfig cb = parse_config(b);
  CHECK(ca.hash == cb.hash);
  CHECK(ca.canonical == cb.canonical);
  CHECK(ca.hash.size() == 16);

  const std::string c = R"({"task":"sweep",
      "field":{"pulses":[{"E01":0.25,"tau":10.0}]},
      "grid":{"kx":[-1,1,8],"ky":[-1,1,8]}})";
  CHECK(parse_config(c).hash != ca.hash);
}

TEST_CASE("config: defaults and task plumbing") {
  const RunConfig c = parse_config(
      R"({"task":"mode","field":{"pulses":[{"E01":0.1,"tau":5}]},
          "mode":{"k":[0.1,-0.2,0.3],"all_formulations":true,"samples":40}})");
  CHECK(c.task == Task::Mode);
  CHECK(c.output_dir == "out");
  CHECK(c.charge == -1.0);
  CHECK_FALSE(c.strict);
  CHECK(c.solver.rel_tol == 1e-10);  // oracle-tolerance default
  CHECK(c.solver.abs_tol == 1e-10);
  CHECK(c.solver.formulation == Formulation::Fgh);
  CHECK(c.mode.k.y == -0.2);
  CHECK(c.mode.all_formulations);
  CHECK(c.mode.samples == 40);
  CHECK_FALSE(c.has_grid);
  CHECK(c.field.pulses.size() == 1);
  CHECK(c.field.pulses[0].delta == 0.0);  // pulse defaults fill in

  CHECK(task_from_string("semiclassical") == Task::Semiclassical);
  CHECK_THROWS_AS(task_from_string("sweeep"), ConfigError);
  CHECK(std::string(task_name(Task::Scan)) == "scan");
}

TEST_CASE("config: unknown keys are rejected at every level") {
  auto bad = [](const std::string& text) {
    CHECK_THROWS_AS((void)parse_config(text), ConfigError);
  };
  bad(R"({"task":"validate","field":{"pulses":[{"E01":0,"tau":1}]},"typo":1})");
  bad(R"({"task":"validate","field":{"pulses":[{"E01":0,"tau":1}],"w":2}})");
  bad(R"({"task":"validate","field":{"pulses":[{"E01":0,"tau":1,"amp":3}]}})");
  bad(R"({"task":"validate","field":{"pulses":[{"E01":0,"tau":1}]},
          "solver":{"reltol":1e-8}})");
  bad(R"({"task":"sweep","field":{"pulses":[{"E01":0,"tau":1}]},
          "grid":{"kx":[-1,1,4],"ky":[-1,1,4],"k":[0,0,0]}})");
  bad("not json at all");
  bad("[1,2,3]");
}

TEST_CASE("config: structural requirements") {
  auto bad = [](const std::string& text) {
    CHECK_THROWS_AS((void)parse_config(text), ConfigError);
  };
  bad(R"({"field":{"pulses":[{"E01":0,"tau":1}]}})");            // no task
  bad(R"({"task":"validate"})");                                 // no field
  bad(R"({"task":"sweep","field":{"pulses":[{"E01":0,"tau":1}]}})");  // no grid
  bad(R"({"task":"mode","field":{"pulses":[{"E01":0,"tau":1}]}})");   // no mode
  bad(R"({"task":"scan","field":{"pulses":[{"E01":0,"tau":1}]},
          "grid":{"kx":[-1,1,4],"ky":[-1,1,4]},
          "scan":{"parameter":"pulses[0].omega","values":[]}})");
  bad(R"({"task":"sweep","field":{"pulses":[{"E01":0,"tau":1}]},
          "grid":{"kx":[-1,1,4.5],"ky":[-1,1,4]}})");  // non-integer n
  bad(R"({"task":"sweep","field":{"pulses":[{"E01":0,"tau":1}]},
          "grid":{"kx":[1,-1,4],"ky":[-1,1,4]}})");    // reversed range
  bad(R"({"task":"sweep","field":{"charge":0,"pulses":[{"E01":0,"tau":1}]},
          "grid":{"kx":[-1,1,4],"ky":[-1,1,4]}})");    // zero charge
  bad(R"({"task":"validate","field":{"pulses":[{"E01":0,"tau":1}]},
          "solver":{"formulation":"spinor"}})");
}

TEST_CASE("run: sweep manifest accounts for every artifact") {
  TempDir dir("run_sweep");
  nlohmann::json j = {
      {"task", "sweep"},
      {"output_dir", dir.file("out")},
      {"field", zero_field_json()},
      {"grid", {{"kx", {-1.0, 1.0, 5}}, {"ky", {-1.0, 1.0, 4}}}},
      {"sweep", {{"raster", "both"}, {"binary", true}}},
  };
  const RunConfig cfg = parse_config(j.dump());
  REQUIRE(run_task(cfg, {}) == kExitOk);

  const nlohmann::json m =
      nlohmann::json::parse(read_file(dir.file("out") + "/manifest.json"));
  CHECK(m.at("tool") == "qvs");
  CHECK(m.at("task") == "sweep");
  CHECK(m.at("exit_code") == 0);
  CHECK(m.at("config_hash") == cfg.hash);
  CHECK(m.at("config").at("task") == "sweep");
  CHECK(m.at("failures").empty());
  CHECK(m.at("summary").at("peak_F").get<double>() == 0.0);
  CHECK(m.at("summary").at("density").get<double>() == 0.0);
  CHECK(m.at("summary").at("kx_mirror").get<double>() == 0.0);

  std::set<std::string> listed;
  for (const auto& a : m.at("artifacts")) listed.insert(a.get<std::string>());
  std::set<std::string> present;
  for (const auto& e : fs::directory_iterator(dir.file("out")))
    present.insert(e.path().filename().string());
  REQUIRE(present.count("manifest.json") == 1);
  present.erase("manifest.json");
  CHECK(listed == present);  // nothing unlisted, nothing missing
  CHECK(listed.count("spectrum.csv") == 1);
  CHECK(listed.count("spectrum.f64") == 1);
  CHECK(listed.count("spectrum_linear.pgm") == 1);
  CHECK(listed.count("spectrum_log.pgm.json") == 1);
}

TEST_CASE("cli: validate runs clean end to end") {
  TempDir dir("cli_validate");
  nlohmann::json j = {{"task", "validate"},
                      {"field", zero_field_json()},
                      {"validate", {{"cases", 3}, {"seed", 7}}}};
  const std::string cfg = write_json(dir, "cfg.json", j);
  CHECK(run_cli("validate --config " + cfg + " --out " + dir.file("out")) == 0);
  const nlohmann::json m =
      nlohmann::json::parse(read_file(dir.file("out") + "/manifest.json"));
  CHECK(m.at("task") == "validate");
  CHECK(m.at("exit_code") == 0);
  CHECK(m.at("summary").at("all_pass") == true);
  CHECK(m.at("summary").at("cases") == 3);
  CHECK(m.at("config_hash") == parse_config(j.dump()).hash);
}

TEST_CASE("cli: configuration mistakes exit 2 and write nothing") {
  TempDir dir("cli_bad");
  nlohmann::json j = {{"task", "validate"},
                      {"field", zero_field_json()},
                      {"surprise", 1}};
  const std::string cfg = write_json(dir, "bad.json", j);
  CHECK(run_cli("validate --config " + cfg + " --out " + dir.file("out")) == 2);
  CHECK_FALSE(fs::exists(dir.file("out") + "/manifest.json"));

  nlohmann::json good = {{"task", "validate"}, {"field", zero_field_json()}};
  const std::string goodcfg = write_json(dir, "good.json", good);
  // task/subcommand mismatch
  CHECK(run_cli("sweep --config " + goodcfg + " --out " + dir.file("out2")) == 2);
  CHECK_FALSE(fs::exists(dir.file("out2") + "/manifest.json"));
  // missing required option and missing file
  CHECK(run_cli("sweep") == 2);
  CHECK(run_cli("validate --config " + dir.file("absent.json")) == 2);
}

TEST_CASE("cli: sweep output is byte-identical across thread counts") {
  TempDir dir("cli_threads");
  const nlohmann::json pulse = {
      {"E01", 0.1414213562373095}, {"tau", 25.0}, {"omega", 0.4}};
  nlohmann::json field;
  field["pulses"] = nlohmann::json::array({pulse});
  nlohmann::json j = {
      {"task", "sweep"},
      {"field", field},
      {"grid", {{"kx", {-0.8, 0.8, 6}}, {"ky", {-0.8, 0.8, 6}}}},
      {"solver", {{"rel_tol", 1e-6}, {"abs_tol", 1e-6}}},
  };
  const std::string cfg = write_json(dir, "cfg.json", j);
  CHECK(run_cli("sweep --config " + cfg + " --threads 1 --out " +
                dir.file("t1")) == 0);
  CHECK(run_cli("sweep --config " + cfg + " --threads 4 --out " +
                dir.file("t4")) == 0);
  const std::string csv1 = read_file(dir.file("t1") + "/spectrum.csv");
  const std::string csv4 = read_file(dir.file("t4") + "/spectrum.csv");
  REQUIRE_FALSE(csv1.empty());
  CHECK(csv1 == csv4);
}
