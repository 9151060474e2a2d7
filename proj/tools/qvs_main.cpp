#include <cstdio>
#include <cstdlib>
#include <string>

#include "CLI11.hpp"
#include "qvs/errors.hpp"
#include "qvs/run.hpp"
#include "qvs/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"scalar pair-creation momentum spectra from time-dependent "
               "electric fields"};
  app.set_version_flag("--version", qvs::kVersion);
  app.require_subcommand(1);

  std::string config_path, out_override;
  int threads = 0;
  bool strict = false;

  const struct {
    const char* name;
    const char* help;
  } subs[] = {
      {"mode", "solve a single momentum mode"},
      {"sweep", "compute a spectrum over a momentum grid"},
      {"scan", "density/peak table over a swept pulse parameter"},
      {"semiclassical", "turning-point / phase-integral report"},
      {"validate", "run the invariant suite on the configured field"},
  };
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--config", config_path, "JSON run configuration")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", out_override,
                    "output directory (overrides the config)");
    sub->add_option("--threads", threads, "worker threads (0 = auto)");
    sub->add_flag("--strict", strict, "treat partial failures as fatal");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);  // prints help or the usage error
    return rc == 0 ? 0 : qvs::kExitConfig;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    const qvs::RunConfig cfg = qvs::load_config(config_path);
    if (std::string(qvs::task_name(cfg.task)) != sub->get_name()) {
      std::fprintf(stderr,
                   "config error: config task '%s' does not match subcommand "
                   "'%s'\n",
                   qvs::task_name(cfg.task), sub->get_name().c_str());
      return qvs::kExitConfig;
    }
    qvs::RunOptions opt;
    opt.threads = threads;
    if (sub->count("--threads") == 0) {
      if (const char* env = std::getenv("QVS_THREADS"))
        opt.threads = std::atoi(env);
    }
    opt.strict = strict;
    opt.out_override = out_override;
    return qvs::run_task(cfg, opt);
  } catch (const qvs::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return qvs::kExitConfig;
  } catch (const qvs::IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return qvs::kExitIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return qvs::kExitNumerical;
  }
}
