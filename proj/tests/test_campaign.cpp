#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

#include "addt/campaign.hpp"

using namespace addt;
using namespace addt::campaign;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

dsl::ScenarioSpec load_spec(const std::string& name) {
  const auto r = dsl::parse_scenario(read_file(fs::path(ADDT_SCENARIO_DIR) / name));
  REQUIRE(r.ok());
  return *r.spec;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("addt_test_" + name);
  fs::remove_all(p);
  return p;
}

CampaignPlan small_plan(const fs::path& out) {
  CampaignPlan plan;
  for (const auto& file : {"table1/overtake_drop.adt", "follow_brake.adt"}) {
    const auto spec = load_spec(file);
    for (auto& c : dsl::expand_sweeps(spec)) plan.configs.push_back({spec.name, std::move(c)});
  }
  plan.trials_per_config = 6;
  plan.master_seed = 0xC0FFEE;
  plan.out_dir = out;
  plan.workers = 1;
  return plan;
}

// splitmix64 reference: state += gamma, then the two xor-shift-multiply rounds.
std::uint64_t reference_splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

TEST_CASE("seeding") {
  CHECK(derive_seed(0, 0, 0) == 0xE220A8397B1DCDAFULL);
  CHECK(derive_seed(0, 0, 0) == reference_splitmix(0));
  CHECK(derive_seed(7, 99, 3) == derive_seed(7, 99, 3));
  CHECK(derive_seed(7, 99, 0) != derive_seed(7, 99, 1));
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);

  // Hash follows the canonical text, not the source formatting.
  const auto a = dsl::parse_scenario(
      R"(scenario "s" road{lanes:1,lane_width:3.5} ego{lane:0,s:0,speed:10} mission follow{target_s:100,timeout:60})");
  const auto b = dsl::parse_scenario(
      "scenario \"s\"\nmission follow { timeout: 60, target_s: 100 }\nego { speed: 10m/s, s: 0, lane: 0 }\n"
      "road { lane_width: 3.5m, lanes: 1 }\n");
  REQUIRE(a.ok());
  REQUIRE(b.ok());
  CHECK(config_hash(*a.spec) == config_hash(*b.spec));
}

TEST_CASE("trial determinism") {
  const auto spec = load_spec("table1/overtake_drop.adt");
  const auto cfg = dsl::expand_sweeps(spec).back();
  TrialOptions opt;
  opt.trace = true;
  const auto a = run_trial(cfg, 42, opt);
  const auto b = run_trial(cfg, 42, opt);
  CHECK(format_row(to_row(a)) == format_row(to_row(b)));
  CHECK(fault_log_json(a) == fault_log_json(b));
  CHECK(a.trace_csv == b.trace_csv);
  REQUIRE(a.latency_samples.size() == b.latency_samples.size());
  for (std::size_t i = 0; i < a.latency_samples.size(); ++i) {
    CHECK(a.latency_samples[i].e2e_ms == b.latency_samples[i].e2e_ms);
  }
  CHECK(a.frames > 0);
}

TEST_CASE("shipped following scenario succeeds without faults") {
  auto spec = load_spec("follow_brake.adt");
  const auto rec = run_trial(dsl::expand_sweeps(spec).front(), 1);
  CHECK(rec.outcome.kind == metrics::OutcomeKind::success);
  CHECK(rec.e_p.has_value());
  CHECK(*rec.e_p < 1e-9);
}

TEST_CASE("result rows round-trip through CSV") {
  const auto spec = load_spec("sensitivity/turn_control.adt");
  const auto cfg = dsl::expand_sweeps(spec).back();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto rec = run_trial(cfg, seed);
    rec.binding = "count=5";
    const std::string line = format_row(to_row(rec));
    CHECK(format_row(parse_row(line)) == line);
  }
  CHECK_THROWS_AS(parse_row("1,2,3"), std::runtime_error);
}

TEST_CASE("campaign writes every record and reports consistently") {
  const auto out = scratch("report");
  auto plan = small_plan(out);
  const auto res = run_campaign(plan);
  CHECK(res.complete);
  CHECK(res.rows.size() == plan.configs.size() * 6);
  CHECK(res.executed.size() == res.rows.size());

  const auto rows = read_results_csv(out / "results.csv");
  REQUIRE(rows.size() == res.rows.size());

  // Recompute per-config counts straight from the rows.
  std::map<std::size_t, std::pair<int, int>> kn;
  for (const auto& r : rows) {
    auto& [k, n] = kn[r.config_id];
    k += r.outcome == metrics::OutcomeKind::success;
    ++n;
  }
  const auto j = nlohmann::json::parse(read_file(out / "aggregate.json"));
  REQUIRE(j["configs"].size() == kn.size());
  for (const auto& c : j["configs"]) {
    const auto [k, n] = kn.at(c["config_id"].get<std::size_t>());
    CHECK(c["successes"].get<int>() == k);
    CHECK(c["trials"].get<int>() == n);
    const auto w = metrics::wilson(k, n);
    CHECK(c["rate"].get<double>() == w.rate);
    CHECK(c["ci_low"].get<double>() == w.ci_low);
    CHECK(c["ci_high"].get<double>() == w.ci_high);
  }
  CHECK(emit_report(out, ReportFormat::json) == read_file(out / "aggregate.json"));
  CHECK(emit_report(out, ReportFormat::markdown) == read_file(out / "report.md"));

  const auto manifest = nlohmann::json::parse(read_file(out / "manifest.json"));
  CHECK(manifest["complete"] == true);
  CHECK(manifest["completed"].size() == rows.size());
  fs::remove_all(out);
}

TEST_CASE("parallel and sequential campaigns are byte-identical") {
  const auto seq_dir = scratch("seq"), par_dir = scratch("par");
  auto seq = small_plan(seq_dir);
  auto par = small_plan(par_dir);
  par.workers = 4;
  run_campaign(seq);
  run_campaign(par);
  CHECK(read_file(seq_dir / "results.csv") == read_file(par_dir / "results.csv"));
  CHECK(read_file(seq_dir / "faults.jsonl") == read_file(par_dir / "faults.jsonl"));
  CHECK(read_file(seq_dir / "aggregate.json") == read_file(par_dir / "aggregate.json"));
  fs::remove_all(seq_dir);
  fs::remove_all(par_dir);
}

TEST_CASE("an interrupted campaign resumes only the missing trials") {
  const auto full_dir = scratch("full"), cut_dir = scratch("cut");
  run_campaign(small_plan(full_dir));

  auto cut = small_plan(cut_dir);
  cut.max_new_trials = 11;
  const auto first = run_campaign(cut);
  CHECK_FALSE(first.complete);
  CHECK(first.executed.size() == 11);
  const auto m = nlohmann::json::parse(read_file(cut_dir / "manifest.json"));
  CHECK(m["complete"] == false);
  CHECK(m["completed"].size() == 11);

  cut.max_new_trials.reset();
  cut.workers = 3;
  const auto second = run_campaign(cut);
  CHECK(second.complete);
  CHECK(second.resumed == 11);
  CHECK(second.executed.size() == cut.configs.size() * 6 - 11);
  for (const auto& r : second.executed) {
    bool seen = false;
    for (const auto& e : m["completed"]) {
      seen = seen || (e[0].get<std::size_t>() == r.config_id && e[1].get<std::size_t>() == r.trial_index);
    }
    CHECK_FALSE(seen);
  }
  CHECK(read_file(full_dir / "results.csv") == read_file(cut_dir / "results.csv"));
  CHECK(read_file(full_dir / "faults.jsonl") == read_file(cut_dir / "faults.jsonl"));
  fs::remove_all(full_dir);
  fs::remove_all(cut_dir);
}

TEST_CASE("report formatting") {
  CHECK(format_percent(239, 240) == "99.58%");
  CHECK(format_percent(233, 240) == "97.08%");
  CHECK(format_percent(0, 240) == "0.00%");
  CHECK(format_percent(240, 240) == "100.00%");

  std::vector<ResultRow> rows;
  for (int t = 0; t < 240; ++t) {
    ResultRow r;
    r.config_id = 0;
    r.scenario = "overtake";
    r.binding = "drop_rate=0.01";
    r.trial = t;
    r.outcome = t == 17 ? metrics::OutcomeKind::collision : metrics::OutcomeKind::success;
    rows.push_back(r);
  }
  const auto md = markdown_table(aggregate_rows(rows));
  CHECK(md.find("| overtake | 99.58% |") != std::string::npos);
  CHECK(md.find("drop_rate=0.01") != std::string::npos);
}

TEST_CASE("unwritable output directory is an I/O error") {
  auto plan = small_plan("/proc/addt_cannot_write_here");
  CHECK_THROWS_AS(run_campaign(plan), CampaignIoError);
}
