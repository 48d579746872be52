#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "critlab/config.hpp"

namespace critlab {

// Outcome of one front-end command: the report payload, whether the verdict
// is definitive, and named fields over the outer domain.
struct CommandOutput {
  nlohmann::json result;
  bool definitive = true;
  std::vector<std::pair<std::string, GridFunction>> fields;
  std::string table_name;  // optional CSV table
  std::string table;
  nlohmann::json timings = nlohmann::json::object();
};

// classify, groundstate, nullseq, gap, poincare, refine
const std::vector<std::string>& command_names();

CommandOutput run_command(const std::string& command, const Problem& pb, bool dump_fields = false);

// Full report as written to report.json.
nlohmann::json make_report(const std::string& command, const ProblemConfig& cfg,
                           const CommandOutput& out);

}  // namespace critlab
