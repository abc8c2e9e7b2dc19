#pragma once

#include <stdexcept>
#include <string>

namespace toda {

// Pipeline stage that raised a failure. Every failure carries exactly one.
enum class Stage {
  config,
  profile,
  integrate,
  picard,
  forward,
  flow,
  kernel,
  marchenko,
  measure,
  stieltjes,
  assemble,
  io
};

const char* stage_name(Stage s) noexcept;

// 2 for configuration problems, 4 for I/O, 3 for anything numerical.
int exit_code(Stage s) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Stage stage, const std::string& what);
  Stage stage() const noexcept { return stage_; }

 private:
  Stage stage_;
};

}  // namespace toda
