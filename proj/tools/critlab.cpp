// critlab: configuration-driven front end.  Writes report.json (byte-stable),
// timings.json and CSV fields into the output directory.
// Exit codes: 0 definitive verdict, 2 inconclusive, 1 error.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "critlab/commands.hpp"
#include "critlab/config.hpp"
#include "critlab/error.hpp"
#include "critlab/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace critlab;

namespace {

struct Args {
  std::string config;
  std::string out = "critlab_out";
  int levels = 0;
  std::string tol_overrides;
  bool dump_fields = false;
};

json read_json_arg(const std::string& arg) {
  try {
    if (!arg.empty() && arg.front() == '{') return json::parse(arg);
    std::ifstream in(arg);
    if (!in) throw Error(ErrorCode::io, "cannot open " + arg);
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::schema, "tolerance overrides are not valid JSON: " +
                                       std::string(e.what()));
  }
}

ProblemConfig resolve_config(const Args& a) {
  std::ifstream in(a.config);
  if (!in) throw Error(ErrorCode::io, "cannot open config " + a.config);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::schema, "config is not valid JSON: " + std::string(e.what()));
  }
  if (a.levels > 0) {
    if (!j.contains("exhaustion") || !j["exhaustion"].is_object())
      throw Error(ErrorCode::schema, "config: missing key 'exhaustion'");
    j["exhaustion"]["K"] = a.levels;
  }
  ProblemConfig cfg = parse_config(j, fs::path(a.config).parent_path());
  if (!a.tol_overrides.empty()) apply_tolerance_overrides(cfg, read_json_arg(a.tol_overrides));
  return cfg;
}

int run(const std::string& command, const Args& a) {
  const auto t0 = std::chrono::steady_clock::now();
  const ProblemConfig cfg = resolve_config(a);
  const fs::path out = a.out;
  fs::create_directories(out);
  const Problem pb = build_problem(cfg);
  const double setup = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  CommandOutput res = run_command(command, pb, a.dump_fields);
  for (const auto& [name, f] : res.fields)
    write_field_csv(out / (name + ".csv"), pb.ex.outer(), f);
  if (!res.table_name.empty()) write_text(out / (res.table_name + ".csv"), res.table);
  res.timings["setup"] = setup;

  write_text(out / "report.json", make_report(command, cfg, res).dump(2) + "\n");
  write_text(out / "timings.json", res.timings.dump(2) + "\n");
  std::cout << command << ": " << (res.definitive ? "definitive" : "inconclusive")
            << ", report in " << (out / "report.json").string() << "\n";
  return res.definitive ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Criticality analysis of discrete Schroedinger-type operators"};
  app.require_subcommand(1, 1);
  Args a;
  const char* commands[][2] = {
      {"classify", "nonnegativity check and criticality verdict"},
      {"groundstate", "Green-ratio ground state, dumps phi.csv"},
      {"nullseq", "null sequence and energy table"},
      {"gap", "gap certificate for a weight or a constructed weight"},
      {"poincare", "augmented Poincare certificate and pairing table"},
      {"refine", "constrained minimization and critical refinement"},
  };
  for (auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c[0], c[1]);
    sub->add_option("--config", a.config, "problem config (JSON)")->required();
    sub->add_option("--out", a.out, "output directory");
    sub->add_option("--levels", a.levels, "number of exhaustion levels K")
        ->check(CLI::PositiveNumber);
    sub->add_option("--tol-overrides", a.tol_overrides, "tolerances as inline JSON or a file");
    sub->add_flag("--dump-fields", a.dump_fields, "also write intermediate fields as CSV");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  std::string code, message;
  try {
    return run(command, a);
  } catch (const Error& e) {
    code = to_string(e.code());
    message = e.what();
  } catch (const std::exception& e) {
    code = "internal";
    message = e.what();
  }
  const json err = error_json(code, message);
  std::cerr << err.dump() << "\n";
  try {
    fs::create_directories(a.out);
    write_text(fs::path(a.out) / "error.json", err.dump(2) + "\n");
  } catch (const std::exception&) {
    // stderr already carries the error
  }
  return 1;
}
