#include "toda/error.hpp"

namespace toda {

const char* stage_name(Stage s) noexcept {
  switch (s) {
    case Stage::config: return "config";
    case Stage::profile: return "profile";
    case Stage::integrate: return "integrate";
    case Stage::picard: return "picard";
    case Stage::forward: return "forward";
    case Stage::flow: return "flow";
    case Stage::kernel: return "kernel";
    case Stage::marchenko: return "marchenko";
    case Stage::measure: return "measure";
    case Stage::stieltjes: return "stieltjes";
    case Stage::assemble: return "assemble";
    case Stage::io: return "io";
  }
  return "unknown";
}

int exit_code(Stage s) noexcept {
  switch (s) {
    case Stage::config:
    case Stage::profile: return 2;
    case Stage::io: return 4;
    default: return 3;
  }
}

Error::Error(Stage stage, const std::string& what)
    : std::runtime_error(std::string("[") + stage_name(stage) + "] " + what), stage_(stage) {}

}  // namespace toda
