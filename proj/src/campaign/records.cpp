#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "addt/campaign.hpp"
#include "json.hpp"

namespace addt::campaign {

namespace {

using dsl::format_number;

std::string opt(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

std::string quote_csv(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

double to_double(const std::string& s) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw std::runtime_error("bad number: " + s);
  return v;
}

std::optional<double> to_opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return to_double(s);
}

template <typename T>
T to_int(const std::string& s, int base = 10) {
  T v{};
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
  if (ec != std::errc() || p != s.data() + s.size()) throw std::runtime_error("bad integer: " + s);
  return v;
}

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

constexpr const char* kColumns[] = {
    "config_id", "scenario", "binding", "trial", "seed", "outcome", "time_of_event", "ticks",
    "e_p", "e_theta", "e_theta_raw", "lat_best_ms", "lat_mean_ms", "lat_p99_ms",
    "lat_violation_rate", "lat_count", "frames", "dropped_frames", "faults_injected", "clamps"};
constexpr std::size_t kColumnCount = std::size(kColumns);

}  // namespace

ResultRow to_row(const TrialRecord& r) {
  ResultRow row;
  row.config_id = r.config_id;
  row.scenario = r.scenario;
  row.binding = r.binding;
  row.trial = r.trial_index;
  row.seed = r.seed;
  row.outcome = r.outcome.kind;
  row.time_of_event = r.outcome.time_of_event;
  row.ticks = r.ticks;
  row.e_p = r.e_p;
  row.e_theta = r.e_theta;
  row.e_theta_raw = r.e_theta_raw;
  if (r.latency) {
    row.lat_best = r.latency->best;
    row.lat_mean = r.latency->mean;
    row.lat_p99 = r.latency->p99;
    row.lat_violation_rate = r.latency->violation_rate;
    row.lat_count = static_cast<long>(r.latency->count);
  }
  row.frames = r.frames;
  row.dropped_frames = r.dropped_frames;
  row.faults_injected = static_cast<int>(r.fault_log.size());
  row.clamps = r.clamps;
  return row;
}

std::string csv_header() {
  std::string h;
  for (std::size_t i = 0; i < kColumnCount; ++i) {
    if (i) h += ',';
    h += kColumns[i];
  }
  return h;
}

std::string format_row(const ResultRow& r) {
  std::ostringstream os;
  os << r.config_id << ',' << quote_csv(r.scenario) << ',' << quote_csv(r.binding) << ','
     << r.trial << ',' << hex64(r.seed) << ',' << metrics::to_string(r.outcome) << ','
     << format_number(r.time_of_event) << ',' << r.ticks << ',' << opt(r.e_p) << ','
     << opt(r.e_theta) << ',' << opt(r.e_theta_raw) << ',' << opt(r.lat_best) << ','
     << opt(r.lat_mean) << ',' << opt(r.lat_p99) << ',' << opt(r.lat_violation_rate) << ','
     << r.lat_count << ',' << r.frames << ',' << r.dropped_frames << ',' << r.faults_injected
     << ',' << r.clamps;
  return os.str();
}

ResultRow parse_row(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const auto f = split_csv(line);
  if (f.size() != kColumnCount) {
    throw std::runtime_error("results row has " + std::to_string(f.size()) + " fields, expected " +
                             std::to_string(kColumnCount));
  }
  ResultRow r;
  r.config_id = to_int<std::size_t>(f[0]);
  r.scenario = f[1];
  r.binding = f[2];
  r.trial = to_int<std::size_t>(f[3]);
  r.seed = to_int<std::uint64_t>(f[4], 16);
  const auto outcome = metrics::outcome_from_string(f[5]);
  if (!outcome) throw std::runtime_error("unknown outcome: " + f[5]);
  r.outcome = *outcome;
  r.time_of_event = to_double(f[6]);
  r.ticks = to_int<long>(f[7]);
  r.e_p = to_opt(f[8]);
  r.e_theta = to_opt(f[9]);
  r.e_theta_raw = to_opt(f[10]);
  r.lat_best = to_opt(f[11]);
  r.lat_mean = to_opt(f[12]);
  r.lat_p99 = to_opt(f[13]);
  r.lat_violation_rate = to_opt(f[14]);
  r.lat_count = to_int<long>(f[15]);
  r.frames = to_int<int>(f[16]);
  r.dropped_frames = to_int<int>(f[17]);
  r.faults_injected = to_int<int>(f[18]);
  r.clamps = to_int<int>(f[19]);
  return r;
}

std::vector<ResultRow> read_results_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CampaignIoError("cannot read " + path.string());
  std::string line;
  std::vector<ResultRow> rows;
  if (!std::getline(in, line)) return rows;
  while (std::getline(in, line)) {
    if (!line.empty()) rows.push_back(parse_row(line));
  }
  return rows;
}

std::string fault_log_json(const TrialRecord& r) {
  nlohmann::ordered_json entries = nlohmann::ordered_json::array();
  for (const auto& e : r.fault_log) {
    entries.push_back({{"tick", e.tick},
                       {"node", pipeline::to_string(e.node)},
                       {"state_index", e.state_index},
                       {"bit", e.bit},
                       {"mode", fault::to_string(e.mode)},
                       {"before", format_number(e.value_before)},
                       {"after", format_number(e.value_after)}});
  }
  nlohmann::ordered_json j{{"config_id", r.config_id},
                           {"trial", r.trial_index},
                           {"outcome", metrics::to_string(r.outcome.kind)},
                           {"faults", entries}};
  if (!r.abort_reason.empty()) j["abort_reason"] = r.abort_reason;
  return j.dump();
}

}  // namespace addt::campaign
