#include <CLI11.hpp>
#include <cstdio>
#include <string>

#include "porohom/porohom.h"

namespace {

struct Options {
  std::string config;
  std::string out = "out";
  bool poisson_every_step = false;
  bool explicit_time = false;
};

int run(const std::string& subcommand, const Options& opt) {
  phm_session* session = nullptr;
  if (phm_session_from_file(opt.config.c_str(), &session) != PHM_OK) {
    std::fprintf(stderr, "porohom: %s\n", phm_last_error());
    return 2;
  }
  phm_session_set_flag(session, PHM_FLAG_POISSON_EVERY_STEP, opt.poisson_every_step);
  phm_session_set_flag(session, PHM_FLAG_EXPLICIT_TIME, opt.explicit_time);

  int exit_code = 3;
  const phm_status status = phm_run(session, subcommand.c_str(), opt.out.c_str(), &exit_code);
  if (status != PHM_OK)
    std::fprintf(stderr, "porohom %s: %s\n", subcommand.c_str(), phm_last_error());
  else
    std::printf("porohom %s: ok (config %.12s, output %s)\n", subcommand.c_str(),
                phm_session_hash(session), opt.out.c_str());
  phm_session_free(session);
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Micro/macro drift-diffusion in periodically perforated domains"};
  app.set_version_flag("--version", std::string(phm_version()));
  app.require_subcommand(1);

  Options opt;
  const std::pair<const char*, const char*> commands[] = {
      {"cell", "Solve the cell problems and report the effective tensor"},
      {"micro", "Integrate the perforated-domain model"},
      {"macro", "Integrate the homogenized model"},
      {"converge", "Micro-vs-macro study over study.m_list"},
      {"mms", "Manufactured-solution order checks"},
      {"eta-sweep", "Homogenized runs over study.eta_list"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "Run configuration (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "Output directory")->capture_default_str();
    sub->add_flag("--poisson-every-step", opt.poisson_every_step,
                  "Solve the potential every step in decoupled mode");
    sub->add_flag("--explicit-time", opt.explicit_time, "Fully explicit time stepping");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 64;
  }
  return run(app.get_subcommands().front()->get_name(), opt);
}
