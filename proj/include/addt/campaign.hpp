#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "addt/dsl.hpp"
#include "addt/fault.hpp"
#include "addt/latency.hpp"
#include "addt/metrics.hpp"
#include "addt/pipeline.hpp"
#include "addt/sensor.hpp"

namespace addt::campaign {

// ---------------------------------------------------------------- seeding

std::uint64_t fnv1a64(std::string_view bytes);

/// FNV-1a over the canonical serialization.
std::uint64_t config_hash(const dsl::ScenarioSpec& scenario);

/// splitmix64(master ^ config_hash ^ trial_index * golden gamma).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t config_hash,
                          std::uint64_t trial_index);

// ------------------------------------------------------------------ trials

struct TrialOptions {
  latency::LatencyModel latency = latency::LatencyModel::shipped_default();
  double deadline_ms = latency::kDefaultDeadlineMs;
  /// Replaces every compute.bitflip block of the scenario when set.
  std::optional<std::vector<fault::FaultSpec>> fault_schedule;
  bool trace = false;
  pipeline::PipelineConfig pipeline;  // v_cruise / d_mission come from the scenario
  sensor::SensorConfig sensor;
};

struct TrialRecord {
  std::size_t config_id = 0;
  std::string scenario;
  std::string binding;
  std::size_t trial_index = 0;
  std::uint64_t seed = 0;
  metrics::MissionOutcome outcome;
  std::string abort_reason;
  std::optional<double> e_p;
  std::optional<double> e_theta;
  std::optional<double> e_theta_raw;
  std::optional<latency::LatencyStats> latency;
  fault::FaultLog fault_log;
  long ticks = 0;
  int frames = 0;
  int dropped_frames = 0;
  int clamps = 0;
  double wall_ms = 0.0;  // not part of the deterministic results

  // Only with TrialOptions::trace.
  std::vector<latency::LatencySample> latency_samples;
  std::string trace_csv;
};

/// One closed-loop run at dt = 0.01 s until a terminal event or the timeout.
TrialRecord run_trial(const dsl::ResolvedConfig& config, std::uint64_t seed,
                      const TrialOptions& options = {});

/// Registered-state manifest of the pipeline built for a scenario.
pipeline::Manifest scenario_manifest(const dsl::ScenarioSpec& scenario);

// ----------------------------------------------------------------- records

/// One row of results.csv. Text fields are kept verbatim so rows round-trip.
struct ResultRow {
  std::size_t config_id = 0;
  std::string scenario;
  std::string binding;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  metrics::OutcomeKind outcome = metrics::OutcomeKind::aborted;
  double time_of_event = 0.0;
  long ticks = 0;
  std::optional<double> e_p, e_theta, e_theta_raw;
  std::optional<double> lat_best, lat_mean, lat_p99, lat_violation_rate;
  long lat_count = 0;
  int frames = 0;
  int dropped_frames = 0;
  int faults_injected = 0;
  int clamps = 0;
};

ResultRow to_row(const TrialRecord& r);
std::string csv_header();
std::string format_row(const ResultRow& row);
/// Throws std::runtime_error on malformed rows.
ResultRow parse_row(std::string_view line);
std::vector<ResultRow> read_results_csv(const std::filesystem::path& path);

/// faults.jsonl line for one trial.
std::string fault_log_json(const TrialRecord& r);

// ---------------------------------------------------------------- reports

struct ConfigAggregate {
  std::size_t config_id = 0;
  std::string scenario;
  std::string binding;
  metrics::SuccessAggregate success;
  std::array<int, 5> outcome_counts{};  // indexed by OutcomeKind
  std::optional<latency::LatencyStats> latency;  // best of best, mean of means, max p99
};

std::vector<ConfigAggregate> aggregate_rows(const std::vector<ResultRow>& rows);

enum class ReportFormat { csv, json, markdown };
std::optional<ReportFormat> report_format_from_string(std::string_view s);

std::string aggregate_json(const std::vector<ConfigAggregate>& aggs);
/// Scenarios as rows, swept bindings as columns, success rates to two decimals.
std::string markdown_table(const std::vector<ConfigAggregate>& aggs);
std::string aggregate_csv(const std::vector<ConfigAggregate>& aggs);

/// "%.2f%%" of k / n.
std::string format_percent(int successes, int trials);

// --------------------------------------------------------------- campaigns

struct ConfigEntry {
  std::string scenario;  // scenario name
  dsl::ResolvedConfig config;
};

struct CampaignPlan {
  std::vector<ConfigEntry> configs;
  int trials_per_config = 240;
  std::uint64_t master_seed = 0;
  std::filesystem::path out_dir;
  TrialOptions options;
  unsigned workers = 0;  // 0: ADDT_THREADS, else hardware concurrency
  /// Stop after this many newly executed trials (simulated interruption).
  std::optional<long> max_new_trials;
};

struct CampaignResult {
  std::vector<TrialRecord> executed;  // trials run by this invocation, sorted
  std::vector<ResultRow> rows;        // all completed rows, sorted
  bool complete = false;
  long resumed = 0;                   // rows recovered from an earlier run
};

class CampaignIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Run every (config, trial) pair not already recorded in the output
/// directory's journal and write results.csv, timing.csv, faults.jsonl,
/// aggregate.json, report.md and manifest.json. Throws CampaignIoError.
CampaignResult run_campaign(const CampaignPlan& plan);

/// Worker count from ADDT_THREADS or the hardware.
unsigned default_workers();

/// Regenerate the requested report from DIR/results.csv.
std::string emit_report(const std::filesystem::path& dir, ReportFormat format);

}  // namespace addt::campaign
