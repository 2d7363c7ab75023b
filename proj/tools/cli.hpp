#pragma once

#include <string>
#include <vector>

namespace prefdiff::cli {

// Exit codes: 0 success, 1 runtime failure, 2 invalid arguments or config.
int run(const std::vector<std::string>& args);

// Renders SVG plots from the CSVs in a run directory. Missing CSVs are
// listed and skipped; only all-missing is an error.
int emit_plots(const std::string& run_dir, std::string* message = nullptr);

}  // namespace prefdiff::cli
