#include <iostream>

#include "CLI11.hpp"
#include "pipeline.hpp"
#include "toda/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Toda lattice with steplike data: direct solver, scattering transform and reconstruction"};
  std::string config_path, mode, out;
  bool quiet = false;
  app.add_option("config", config_path, "JSON run configuration")->required();
  app.add_option("--mode", mode, "override the configured mode")
      ->check(CLI::IsMember({"simulate", "scatter", "evolve", "reconstruct", "roundtrip", "compare"}));
  app.add_option("--out", out, "override the output directory");
  app.add_flag("--quiet", quiet, "no progress lines");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    auto cfg = toda::pipeline::load_config(config_path);
    if (!mode.empty()) cfg.mode = mode;
    if (!out.empty()) cfg.output = out;
    toda::pipeline::run(cfg, [quiet](const std::string& s) {
      if (!quiet) std::cerr << "toda: " << s << "\n";
    });
  } catch (const toda::Error& e) {
    std::cerr << "toda: error " << e.what() << "\n";
    return toda::exit_code(e.stage());
  } catch (const std::exception& e) {
    std::cerr << "toda: error [assemble] unexpected failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
