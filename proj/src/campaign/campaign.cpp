#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "addt/campaign.hpp"
#include "json.hpp"

namespace addt::campaign {

namespace fs = std::filesystem;

namespace {

using Key = std::pair<std::size_t, std::size_t>;  // (config_id, trial)

struct Completed {
  std::string row;
  std::string faults;
  double wall_ms = 0.0;
};

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  out.flush();
  if (!out) throw CampaignIoError("cannot write " + path.string());
}

std::string plan_fingerprint(const CampaignPlan& plan) {
  std::ostringstream os;
  os << "trials=" << plan.trials_per_config << ";seed=" << plan.master_seed
     << ";coupling=" << static_cast<int>(plan.options.latency.coupling)
     << ";deadline=" << dsl::format_number(plan.options.deadline_ms) << ';';
  for (const auto& n : plan.options.latency.nodes) {
    os << dsl::format_number(n.alpha_ms) << '/' << dsl::format_number(n.beta_ms) << '/'
       << dsl::format_number(n.sigma) << ';';
  }
  if (plan.options.fault_schedule) os << fault::schedule_to_json(*plan.options.fault_schedule);
  for (const auto& c : plan.configs) {
    os << hex64(config_hash(c.config.scenario)) << ':' << dsl::binding_label(c.config.binding) << ';';
  }
  return hex64(fnv1a64(os.str()));
}

std::map<Key, Completed> load_journal(const fs::path& dir, const std::string& fingerprint) {
  std::map<Key, Completed> done;
  std::ifstream mf(dir / "manifest.json");
  if (!mf) return done;
  try {
    const auto manifest = nlohmann::json::parse(mf);
    if (manifest.value("plan", std::string()) != fingerprint) return done;
  } catch (const nlohmann::json::exception&) {
    return done;
  }
  std::ifstream in(dir / "records.jsonl");
  std::string line;
  while (std::getline(in, line)) {
    try {
      const auto j = nlohmann::json::parse(line);
      Completed c{j.at("row").get<std::string>(), j.at("faults").get<std::string>(),
                  j.at("wall_ms").get<double>()};
      parse_row(c.row);  // reject torn lines
      done[{j.at("config_id").get<std::size_t>(), j.at("trial").get<std::size_t>()}] = std::move(c);
    } catch (const std::exception&) {
      // A line cut short by an interruption; that trial is simply rerun.
    }
  }
  return done;
}

void write_outputs(const CampaignPlan& plan, const std::string& fingerprint,
                   const std::map<Key, Completed>& done, bool complete,
                   std::vector<ResultRow>& rows_out) {
  const fs::path& dir = plan.out_dir;
  std::string results = csv_header() + "\n";
  std::string timing = "config_id,trial,wall_ms\n";
  std::string faults;
  rows_out.clear();
  for (const auto& [key, c] : done) {
    results += c.row + "\n";
    timing += std::to_string(key.first) + "," + std::to_string(key.second) + "," +
              dsl::format_number(c.wall_ms) + "\n";
    faults += c.faults + "\n";
    rows_out.push_back(parse_row(c.row));
  }
  write_file(dir / "results.csv", results);
  write_file(dir / "timing.csv", timing);
  write_file(dir / "faults.jsonl", faults);
  if (!rows_out.empty()) {
    const auto aggs = aggregate_rows(rows_out);
    write_file(dir / "aggregate.json", aggregate_json(aggs));
    write_file(dir / "report.md", markdown_table(aggs));
  }

  nlohmann::ordered_json configs = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < plan.configs.size(); ++i) {
    configs.push_back({{"config_id", i},
                       {"scenario", plan.configs[i].scenario},
                       {"binding", dsl::binding_label(plan.configs[i].config.binding)},
                       {"hash", hex64(config_hash(plan.configs[i].config.scenario))}});
  }
  nlohmann::ordered_json completed = nlohmann::ordered_json::array();
  for (const auto& [key, c] : done) completed.push_back({key.first, key.second});
  const std::size_t total = plan.configs.size() * static_cast<std::size_t>(plan.trials_per_config);
  nlohmann::ordered_json m{{"complete", complete},
                           {"plan", fingerprint},
                           {"master_seed", plan.master_seed},
                           {"trials_per_config", plan.trials_per_config},
                           {"total_trials", total},
                           {"completed_trials", done.size()},
                           {"configs", configs},
                           {"completed", completed}};
  write_file(dir / "manifest.json", m.dump(1) + "\n");
}

}  // namespace

unsigned default_workers() {
  if (const char* env = std::getenv("ADDT_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

CampaignResult run_campaign(const CampaignPlan& plan) {
  if (plan.configs.empty()) throw std::invalid_argument("campaign: no configurations");
  if (plan.trials_per_config < 1) throw std::invalid_argument("campaign: trials must be >= 1");

  std::error_code ec;
  fs::create_directories(plan.out_dir, ec);
  if (ec) throw CampaignIoError("cannot create " + plan.out_dir.string() + ": " + ec.message());
  if (plan.options.trace) {
    fs::create_directories(plan.out_dir / "traces", ec);
    if (ec) throw CampaignIoError("cannot create traces directory: " + ec.message());
  }

  const std::string fingerprint = plan_fingerprint(plan);
  std::map<Key, Completed> done = load_journal(plan.out_dir, fingerprint);
  CampaignResult result;
  result.resumed = static_cast<long>(done.size());

  // A fresh plan starts a fresh journal; a matching one is appended to.
  std::ofstream journal(plan.out_dir / "records.jsonl",
                        done.empty() ? std::ios::trunc : std::ios::app);
  if (!journal) throw CampaignIoError("cannot open journal in " + plan.out_dir.string());
  {
    // Record the plan before any trial so an interrupted run can resume.
    std::vector<ResultRow> ignored;
    write_outputs(plan, fingerprint, done, false, ignored);
  }

  std::vector<Key> todo;
  std::vector<std::uint64_t> hashes;
  for (const auto& c : plan.configs) hashes.push_back(config_hash(c.config.scenario));
  for (std::size_t c = 0; c < plan.configs.size(); ++c) {
    for (std::size_t t = 0; t < static_cast<std::size_t>(plan.trials_per_config); ++t) {
      if (!done.count({c, t})) todo.push_back({c, t});
    }
  }

  std::atomic<std::size_t> next{0};
  std::atomic<long> budget{plan.max_new_trials.value_or(-1)};
  std::atomic<bool> io_failed{false};
  std::mutex mu;
  std::string io_error;
  std::vector<TrialRecord> executed;

  auto worker = [&] {
    for (;;) {
      if (io_failed) return;
      if (plan.max_new_trials && budget.fetch_sub(1) <= 0) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= todo.size()) return;
      const auto [c, t] = todo[i];
      const ConfigEntry& entry = plan.configs[c];
      TrialRecord rec = run_trial(entry.config, derive_seed(plan.master_seed, hashes[c], t),
                                  plan.options);
      rec.config_id = c;
      rec.trial_index = t;
      rec.scenario = entry.scenario;

      Completed done_entry{format_row(to_row(rec)), fault_log_json(rec), rec.wall_ms};
      const nlohmann::ordered_json line{{"config_id", c},
                                        {"trial", t},
                                        {"row", done_entry.row},
                                        {"faults", done_entry.faults},
                                        {"wall_ms", done_entry.wall_ms}};
      if (plan.options.trace) {
        const std::string stem = "c" + std::to_string(c) + "_t" + std::to_string(t);
        std::string lat = "tick,perception_ms,planning_ms,control_ms,e2e_ms,n_obj,violated\n";
        for (const auto& s : rec.latency_samples) {
          lat += std::to_string(s.tick) + "," + dsl::format_number(s.node_ms[0]) + "," +
                 dsl::format_number(s.node_ms[1]) + "," + dsl::format_number(s.node_ms[2]) + "," +
                 dsl::format_number(s.e2e_ms) + "," + std::to_string(s.n_obj) + "," +
                 (s.violated ? "1" : "0") + "\n";
        }
        try {
          write_file(plan.out_dir / "traces" / (stem + "_trace.csv"), rec.trace_csv);
          write_file(plan.out_dir / "traces" / (stem + "_latency.csv"), lat);
        } catch (const CampaignIoError& e) {
          std::lock_guard lock(mu);
          io_error = e.what();
          io_failed = true;
          return;
        }
      }

      std::lock_guard lock(mu);
      journal << line.dump() << '\n';
      journal.flush();
      if (!journal) {
        io_error = "cannot append to journal";
        io_failed = true;
        return;
      }
      done[{c, t}] = std::move(done_entry);
      rec.trace_csv.clear();
      executed.push_back(std::move(rec));
    }
  };

  const unsigned n_workers = std::max(1u, plan.workers ? plan.workers : default_workers());
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  result.complete = done.size() == plan.configs.size() * static_cast<std::size_t>(plan.trials_per_config);
  write_outputs(plan, fingerprint, done, result.complete && !io_failed, result.rows);
  if (io_failed) throw CampaignIoError(io_error);

  std::sort(executed.begin(), executed.end(), [](const TrialRecord& a, const TrialRecord& b) {
    return std::tie(a.config_id, a.trial_index) < std::tie(b.config_id, b.trial_index);
  });
  result.executed = std::move(executed);
  return result;
}

}  // namespace addt::campaign
