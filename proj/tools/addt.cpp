// addt: scenario checking, campaigns and reports.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "addt/campaign.hpp"

namespace {

using namespace addt;

constexpr int kExitOk = 0;
constexpr int kExitErrors = 1;
constexpr int kExitIo = 2;

struct IoFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

/// Parse and print diagnostics. Empty result on errors.
std::optional<dsl::ScenarioSpec> load(const std::string& path) {
  const auto result = dsl::parse_scenario(read_text(path));
  for (const auto& d : result.diagnostics) std::cerr << dsl::format_diagnostic(d, path) << '\n';
  return result.spec;
}

struct RunOptions {
  int trials = 240;
  std::uint64_t seed = 0;
  std::string out = "addt-out";
  bool trace = false;
  std::string faults;
  std::string coupling = "record";
  long max_trials = -1;
};

void add_run_options(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("--trials", o.trials, "Trials per configuration")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "Master seed");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_flag("--trace", o.trace, "Write per-tick traces and latency samples");
  cmd->add_option("--faults", o.faults, "Fault schedule JSON replacing scenario bit flips");
  cmd->add_option("--latency-coupling", o.coupling, "record | delay")
      ->check(CLI::IsMember({"record", "delay"}));
  cmd->add_option("--max-trials", o.max_trials, "Stop after this many new trials (resume later)");
}

int run_plan(std::vector<campaign::ConfigEntry> configs, const RunOptions& o) {
  campaign::CampaignPlan plan;
  plan.configs = std::move(configs);
  plan.trials_per_config = o.trials;
  plan.master_seed = o.seed;
  plan.out_dir = o.out;
  plan.options.trace = o.trace;
  plan.options.latency.coupling =
      o.coupling == "delay" ? latency::Coupling::delay_command : latency::Coupling::record_only;
  if (!o.faults.empty()) {
    try {
      plan.options.fault_schedule = fault::schedule_from_json(read_text(o.faults));
    } catch (const IoFailure&) {
      throw;
    } catch (const std::runtime_error& e) {
      std::cerr << o.faults << ": " << e.what() << '\n';
      return kExitErrors;
    }
  }
  if (o.max_trials >= 0) plan.max_new_trials = o.max_trials;

  const auto result = campaign::run_campaign(plan);
  std::cerr << "addt: " << result.rows.size() << " trials recorded ("
            << result.executed.size() << " run now, " << result.resumed << " resumed)"
            << (result.complete ? "" : ", campaign incomplete") << '\n';
  if (!result.rows.empty()) std::cout << campaign::markdown_table(campaign::aggregate_rows(result.rows));
  return kExitOk;
}

int cmd_check(const std::string& path) {
  const auto spec = load(path);
  if (!spec) return kExitErrors;
  const auto configs = dsl::expand_sweeps(*spec);
  std::cout << path << ": ok, " << configs.size() << " configuration"
            << (configs.size() == 1 ? "" : "s") << '\n';
  return kExitOk;
}

int cmd_run(const std::string& path, const RunOptions& o) {
  const auto spec = load(path);
  if (!spec) return kExitErrors;
  if (!spec->sweeps.empty()) {
    std::cerr << path << ": declares sweep axes; use `addt sweep`\n";
    return kExitErrors;
  }
  return run_plan({{spec->name, dsl::expand_sweeps(*spec).front()}}, o);
}

int cmd_sweep(const std::vector<std::string>& paths, const RunOptions& o) {
  std::vector<campaign::ConfigEntry> configs;
  bool failed = false;
  for (const auto& path : paths) {
    const auto spec = load(path);
    if (!spec) {
      failed = true;
      continue;
    }
    for (auto& rc : dsl::expand_sweeps(*spec)) configs.push_back({spec->name, std::move(rc)});
  }
  if (failed) return kExitErrors;
  return run_plan(std::move(configs), o);
}

int cmd_report(const std::string& dir, const std::string& format) {
  const auto f = campaign::report_format_from_string(format);
  if (!f) {
    std::cerr << "unknown report format '" << format << "' (csv, json, markdown)\n";
    return kExitErrors;
  }
  std::cout << campaign::emit_report(dir, *f);
  return kExitOk;
}

int cmd_manifest(const std::string& path) {
  const auto spec = load(path);
  if (!spec) return kExitErrors;
  std::cout << campaign::scenario_manifest(dsl::expand_sweeps(*spec).front().scenario).to_json();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-loop driving simulation with sensor and compute fault injection"};
  app.require_subcommand(1);

  std::string check_file;
  auto* check = app.add_subcommand("check", "Parse and validate a scenario");
  check->add_option("file", check_file)->required();

  std::string run_file;
  RunOptions run_opts;
  auto* run = app.add_subcommand("run", "Run one scenario without sweep axes");
  run->add_option("file", run_file)->required();
  add_run_options(run, run_opts);

  std::vector<std::string> sweep_files;
  RunOptions sweep_opts;
  auto* sweep = app.add_subcommand("sweep", "Expand sweep axes and run every configuration");
  sweep->add_option("files", sweep_files)->required();
  add_run_options(sweep, sweep_opts);

  std::string report_dir, report_format = "markdown";
  auto* report = app.add_subcommand("report", "Summarise a results directory");
  report->add_option("dir", report_dir)->required();
  report->add_option("--format", report_format, "csv | json | markdown");

  std::string manifest_file;
  auto* manifest = app.add_subcommand("manifest", "Print the fault-injectable state manifest");
  manifest->add_option("file", manifest_file)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitErrors;
  }

  try {
    if (*check) return cmd_check(check_file);
    if (*run) return cmd_run(run_file, run_opts);
    if (*sweep) return cmd_sweep(sweep_files, sweep_opts);
    if (*report) return cmd_report(report_dir, report_format);
    if (*manifest) return cmd_manifest(manifest_file);
  } catch (const IoFailure& e) {
    std::cerr << "addt: " << e.what() << '\n';
    return kExitIo;
  } catch (const campaign::CampaignIoError& e) {
    std::cerr << "addt: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "addt: " << e.what() << '\n';
    return kExitErrors;
  }
  return kExitErrors;
}
