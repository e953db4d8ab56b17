#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "rcpor/rcpor.h"

namespace {

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

bool write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  out << data;
  return static_cast<bool>(out);
}

int cmd_run(const std::string& spec_path, const uint64_t* seed, const std::string& variant,
            const std::string& report_path, const std::string& trace_path) {
  std::string spec;
  if (!read_file(spec_path, spec)) {
    std::cerr << "error: cannot read " << spec_path << "\n";
    return 2;
  }
  rcpor_run_options opts{};
  if (seed) {
    opts.has_seed = 1;
    opts.seed = *seed;
  }
  if (!variant.empty()) opts.variant = variant.c_str();

  rcpor_report* report = nullptr;
  rcpor_status st = rcpor_scenario_run(spec.c_str(), &opts, &report);
  if (st != RCPOR_OK) {
    std::cerr << "error: " << rcpor_status_str(st) << ": " << rcpor_last_error() << "\n";
    return 2;
  }
  std::string json = rcpor_report_json(report);
  json += "\n";
  if (report_path.empty()) {
    std::cout << json;
  } else if (!write_file(report_path, json)) {
    std::cerr << "error: cannot write " << report_path << "\n";
    rcpor_report_free(report);
    return 2;
  }
  if (!trace_path.empty() && !write_file(trace_path, rcpor_report_trace(report))) {
    std::cerr << "error: cannot write " << trace_path << "\n";
    rcpor_report_free(report);
    return 2;
  }
  int valid = rcpor_report_valid(report);
  rcpor_report_free(report);
  std::cerr << (valid ? "VALID" : "INVALID") << "\n";
  return valid ? 0 : 1;
}

int cmd_verify(const std::string& path) {
  std::string text;
  if (!read_file(path, text)) {
    std::cerr << "error: cannot read " << path << "\n";
    return 2;
  }
  int valid = 0;
  const char* problems = nullptr;
  rcpor_status st = rcpor_report_verify(text.c_str(), &valid, &problems);
  if (st != RCPOR_OK) {
    std::cerr << "error: " << rcpor_status_str(st) << ": " << rcpor_last_error() << "\n";
    return 2;
  }
  if (problems && *problems) std::cerr << problems;
  std::cout << (valid ? "VALID" : "INVALID") << "\n";
  return valid ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RC-PoR-P scenario runner"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a scenario and emit a JSON report");
  std::string spec_path, report_path, trace_path, variant;
  uint64_t seed = 0;
  run->add_option("spec-file", spec_path, "Scenario spec (JSON)")->required()->check(CLI::ExistingFile);
  auto* seed_opt = run->add_option("--seed", seed, "Override the spec seed");
  run->add_option("--report", report_path, "Write the report here instead of stdout");
  run->add_option("--variant", variant, "Override the variant")->check(CLI::IsMember({"arbiter", "arbiterless"}));
  run->add_option("--trace", trace_path, "Write the ledger trace as JSON lines");

  auto* verify = app.add_subcommand("verify-report", "Re-check conservation and payouts of a report");
  std::string verify_path;
  verify->add_option("report", verify_path, "Report file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  if (*run) return cmd_run(spec_path, *seed_opt ? &seed : nullptr, variant, report_path, trace_path);
  return cmd_verify(verify_path);
}
