#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "addt/campaign.hpp"
#include "json.hpp"

namespace addt::campaign {

namespace {

using dsl::format_number;

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string column_label(const std::string& binding) { return binding.empty() ? "nominal" : binding; }

}  // namespace

std::string format_percent(int successes, int trials) {
  if (trials <= 0) return "n/a";
  return fixed(100.0 * successes / trials, 2) + "%";
}

std::optional<ReportFormat> report_format_from_string(std::string_view s) {
  if (s == "csv") return ReportFormat::csv;
  if (s == "json") return ReportFormat::json;
  if (s == "markdown" || s == "md") return ReportFormat::markdown;
  return std::nullopt;
}

std::vector<ConfigAggregate> aggregate_rows(const std::vector<ResultRow>& rows) {
  struct Acc {
    ConfigAggregate agg;
    int n = 0, k = 0;
    long lat_count = 0;
    double lat_best = 0, lat_mean_sum = 0, lat_p99 = 0, lat_viol_sum = 0;
  };
  std::map<std::size_t, Acc> by_config;
  for (const auto& r : rows) {
    Acc& a = by_config[r.config_id];
    if (a.n == 0) {
      a.agg.config_id = r.config_id;
      a.agg.scenario = r.scenario;
      a.agg.binding = r.binding;
    }
    ++a.n;
    a.k += r.outcome == metrics::OutcomeKind::success;
    ++a.agg.outcome_counts[static_cast<std::size_t>(r.outcome)];
    if (r.lat_count > 0 && r.lat_best && r.lat_mean && r.lat_p99 && r.lat_violation_rate) {
      a.lat_best = a.lat_count == 0 ? *r.lat_best : std::min(a.lat_best, *r.lat_best);
      a.lat_p99 = a.lat_count == 0 ? *r.lat_p99 : std::max(a.lat_p99, *r.lat_p99);
      a.lat_mean_sum += *r.lat_mean * static_cast<double>(r.lat_count);
      a.lat_viol_sum += *r.lat_violation_rate * static_cast<double>(r.lat_count);
      a.lat_count += r.lat_count;
    }
  }
  std::vector<ConfigAggregate> out;
  for (auto& [id, a] : by_config) {
    a.agg.success = metrics::wilson(a.k, a.n);
    if (a.lat_count > 0) {
      latency::LatencyStats s;
      s.best = a.lat_best;
      s.mean = a.lat_mean_sum / static_cast<double>(a.lat_count);
      s.p99 = a.lat_p99;
      s.violation_rate = a.lat_viol_sum / static_cast<double>(a.lat_count);
      s.count = static_cast<std::size_t>(a.lat_count);
      a.agg.latency = s;
    }
    out.push_back(std::move(a.agg));
  }
  return out;
}

std::string aggregate_json(const std::vector<ConfigAggregate>& aggs) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& a : aggs) {
    nlohmann::ordered_json outcomes;
    for (std::size_t i = 0; i < a.outcome_counts.size(); ++i) {
      outcomes[std::string(metrics::to_string(static_cast<metrics::OutcomeKind>(i)))] =
          a.outcome_counts[i];
    }
    nlohmann::ordered_json j{{"config_id", a.config_id},
                             {"scenario", a.scenario},
                             {"binding", a.binding},
                             {"trials", a.success.trials},
                             {"successes", a.success.successes},
                             {"rate", a.success.rate},
                             {"ci_low", a.success.ci_low},
                             {"ci_high", a.success.ci_high},
                             {"outcomes", outcomes}};
    if (a.latency) {
      j["latency"] = {{"best_ms", a.latency->best},
                      {"mean_ms", a.latency->mean},
                      {"p99_max_ms", a.latency->p99},
                      {"violation_rate", a.latency->violation_rate},
                      {"samples", a.latency->count}};
    }
    arr.push_back(j);
  }
  return nlohmann::ordered_json{{"configs", arr}}.dump(2) + "\n";
}

std::string aggregate_csv(const std::vector<ConfigAggregate>& aggs) {
  std::ostringstream os;
  os << "config_id,scenario,binding,trials,successes,rate,ci_low,ci_high,collision,off_lane,"
        "timeout,aborted,lat_best_ms,lat_mean_ms,lat_p99_max_ms,lat_violation_rate\n";
  for (const auto& a : aggs) {
    os << a.config_id << ',' << a.scenario << ",\"" << a.binding << "\"," << a.success.trials
       << ',' << a.success.successes << ',' << format_number(a.success.rate) << ','
       << format_number(a.success.ci_low) << ',' << format_number(a.success.ci_high);
    for (std::size_t i = 1; i < a.outcome_counts.size(); ++i) os << ',' << a.outcome_counts[i];
    if (a.latency) {
      os << ',' << format_number(a.latency->best) << ',' << format_number(a.latency->mean) << ','
         << format_number(a.latency->p99) << ',' << format_number(a.latency->violation_rate);
    } else {
      os << ",,,,";
    }
    os << '\n';
  }
  return os.str();
}

std::string markdown_table(const std::vector<ConfigAggregate>& aggs) {
  std::vector<std::string> scenarios, columns;
  std::map<std::pair<std::string, std::string>, const ConfigAggregate*> cells;
  for (const auto& a : aggs) {
    const std::string col = column_label(a.binding);
    if (std::find(scenarios.begin(), scenarios.end(), a.scenario) == scenarios.end()) {
      scenarios.push_back(a.scenario);
    }
    if (std::find(columns.begin(), columns.end(), col) == columns.end()) columns.push_back(col);
    cells[{a.scenario, col}] = &a;
  }

  std::ostringstream os;
  os << "## Mission success rate\n\n| Scenario |";
  for (const auto& c : columns) os << ' ' << c << " |";
  os << "\n|---|";
  for (std::size_t i = 0; i < columns.size(); ++i) os << "---|";
  os << '\n';
  for (const auto& s : scenarios) {
    os << "| " << s << " |";
    for (const auto& c : columns) {
      const auto it = cells.find({s, c});
      os << ' '
         << (it == cells.end() ? std::string("-")
                               : format_percent(it->second->success.successes,
                                                it->second->success.trials))
         << " |";
    }
    os << '\n';
  }

  os << "\n## Per configuration\n\n"
        "| Config | Scenario | Binding | n | Success | 95% CI | Collision | Off-lane | Timeout | "
        "Aborted | Latency mean ms | Latency p99 ms | Deadline violations |\n"
        "|---|---|---|---|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& a : aggs) {
    os << "| " << a.config_id << " | " << a.scenario << " | " << column_label(a.binding) << " | "
       << a.success.trials << " | " << format_percent(a.success.successes, a.success.trials)
       << " | " << fixed(100.0 * a.success.ci_low, 2) << "-" << fixed(100.0 * a.success.ci_high, 2)
       << "% | " << a.outcome_counts[1] << " | " << a.outcome_counts[2] << " | "
       << a.outcome_counts[3] << " | " << a.outcome_counts[4] << " | ";
    if (a.latency) {
      os << fixed(a.latency->mean, 2) << " | " << fixed(a.latency->p99, 2) << " | "
         << fixed(100.0 * a.latency->violation_rate, 2) << "% |\n";
    } else {
      os << "- | - | - |\n";
    }
  }
  return os.str();
}

std::string emit_report(const std::filesystem::path& dir, ReportFormat format) {
  const auto rows = read_results_csv(dir / "results.csv");
  if (rows.empty()) throw CampaignIoError("no results in " + (dir / "results.csv").string());
  const auto aggs = aggregate_rows(rows);
  switch (format) {
    case ReportFormat::csv: return aggregate_csv(aggs);
    case ReportFormat::json: return aggregate_json(aggs);
    case ReportFormat::markdown: break;
  }
  return markdown_table(aggs);
}

}  // namespace addt::campaign
