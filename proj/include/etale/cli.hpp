#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace etale::cli {

enum ExitCode : int {
  kSuccess = 0,
  kVerdictFailure = 1,
  kInputError = 2,
  kNumericFailure = 3,
};

struct RunConfig {
  std::string command;  // check invert track fiber degree escape stratify gen verify
  std::string map_path;
  std::vector<std::pair<std::string, std::string>> overrides;  // --set key=value
  std::uint64_t seed = 0;
  std::string output_path;  // empty: standard output
  int workers = 1;

  std::optional<std::string> x;       // re:im,re:im,...
  std::optional<std::string> y0;
  std::optional<double> t;
  double t0 = 0.0;
  int loops = 200;
  int trials = 3;
  int grid = 3;
  std::optional<std::string> region;  // re_lo:re_hi:im_lo:im_hi,... per coordinate
  std::optional<int> den_max;
  bool real_only = false;
  std::string recipe_path;
  std::string name;
  bool random_recipe = false;
  std::string manifest_path;
};

/// Every key accepted by --set.
const std::vector<std::string>& override_keys();

int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv and runs; returns the process exit code.
int main_entry(int argc, char** argv);

}  // namespace etale::cli
