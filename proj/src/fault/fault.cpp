#include <algorithm>
#include <bit>
#include <cstdint>
#include <stdexcept>

#include "addt/fault.hpp"
#include "json.hpp"

namespace addt::fault {

using pipeline::NodeId;

double flip_bit(double value, int bit) {
  if (bit < 0 || bit > 63) throw std::out_of_range("flip_bit: bit must be in [0, 63]");
  return std::bit_cast<double>(std::bit_cast<std::uint64_t>(value) ^ (std::uint64_t{1} << bit));
}

std::string_view to_string(Mode m) { return m == Mode::flip ? "flip" : "stuck"; }

FaultLogEntry inject(pipeline::NodeState& state, const FaultSpec& spec, long tick) {
  FaultLogEntry e;
  e.tick = tick;
  e.node = spec.node;
  e.state_index = spec.state_index;
  e.bit = spec.bit;
  e.mode = spec.mode;
  double& slot = state[spec.state_index];
  e.value_before = slot;
  slot = spec.mode == Mode::flip ? flip_bit(slot, spec.bit) : spec.value;
  e.value_after = slot;
  return e;
}

std::optional<std::string> check_addresses(const std::vector<FaultSpec>& schedule,
                                           const pipeline::Manifest& manifest) {
  for (const auto& f : schedule) {
    if (!manifest.contains(f.node, f.state_index)) {
      return "no registered state " + std::string(pipeline::to_string(f.node)) + "[" +
             std::to_string(f.state_index) + "]";
    }
    if (f.bit < 0 || f.bit > 63) return "bit " + std::to_string(f.bit) + " outside [0, 63]";
    if (f.trigger_tick < 0) return "negative trigger tick";
  }
  return std::nullopt;
}

Injector::Injector(std::vector<FaultSpec> schedule) : schedule_(std::move(schedule)) {
  std::stable_sort(schedule_.begin(), schedule_.end(),
                   [](const FaultSpec& a, const FaultSpec& b) { return a.trigger_tick < b.trigger_tick; });
}

void Injector::apply(long tick, pipeline::Pipeline& p, FaultLog& log) {
  for (const auto& f : schedule_) {
    if (f.trigger_tick > tick) break;
    if (f.mode == Mode::flip) {
      if (f.trigger_tick == tick) log.push_back(inject(p.node(f.node), f, tick));
      continue;
    }
    const double current = p.node(f.node)[f.state_index];
    const bool changes = std::bit_cast<std::uint64_t>(current) != std::bit_cast<std::uint64_t>(f.value);
    if (f.trigger_tick == tick || changes) {
      log.push_back(inject(p.node(f.node), f, tick));
    }
  }
}

std::vector<FaultSpec> schedule_faults(NodeId node, int count, long tick_min, long tick_max,
                                       Rng& rng, const pipeline::Manifest& manifest) {
  const std::size_t n = manifest.count(node);
  if (n == 0) {
    throw std::invalid_argument("schedule_faults: no registered state for " +
                                std::string(pipeline::to_string(node)));
  }
  if (tick_max < tick_min || tick_min < 0) {
    throw std::invalid_argument("schedule_faults: empty tick range");
  }
  std::vector<FaultSpec> out;
  for (int i = 0; i < count; ++i) {
    FaultSpec f;
    f.node = node;
    f.state_index = rng.uniform_index(n);
    f.bit = static_cast<int>(rng.uniform_index(64));
    f.trigger_tick = tick_min + static_cast<long>(rng.uniform_index(
                                    static_cast<std::uint64_t>(tick_max - tick_min) + 1));
    out.push_back(f);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const FaultSpec& a, const FaultSpec& b) { return a.trigger_tick < b.trigger_tick; });
  return out;
}

std::string schedule_to_json(const std::vector<FaultSpec>& schedule) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& f : schedule) {
    nlohmann::ordered_json j{{"node", pipeline::to_string(f.node)},
                             {"state_index", f.state_index},
                             {"bit", f.bit},
                             {"trigger_tick", f.trigger_tick},
                             {"mode", to_string(f.mode)}};
    if (f.mode == Mode::stuck) j["value"] = f.value;
    arr.push_back(j);
  }
  return nlohmann::ordered_json{{"faults", arr}}.dump(2) + "\n";
}

std::vector<FaultSpec> schedule_from_json(const std::string& text) {
  std::vector<FaultSpec> out;
  try {
    const auto doc = nlohmann::json::parse(text);
    for (const auto& j : doc.at("faults")) {
      FaultSpec f;
      const auto node = pipeline::node_from_string(j.at("node").get<std::string>());
      if (!node) throw std::runtime_error("unknown node " + j.at("node").dump());
      f.node = *node;
      f.state_index = j.at("state_index").get<std::size_t>();
      f.bit = j.value("bit", 0);
      f.trigger_tick = j.at("trigger_tick").get<long>();
      const std::string mode = j.value("mode", "flip");
      if (mode == "flip") {
        f.mode = Mode::flip;
      } else if (mode == "stuck") {
        f.mode = Mode::stuck;
        f.value = j.at("value").get<double>();
      } else {
        throw std::runtime_error("unknown mode " + mode);
      }
      out.push_back(f);
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("fault schedule: ") + e.what());
  }
  return out;
}

}  // namespace addt::fault
