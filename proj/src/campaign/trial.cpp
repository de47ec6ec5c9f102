#include <chrono>
#include <cmath>
#include <sstream>

#include "addt/campaign.hpp"
#include "addt/rng.hpp"

namespace addt::campaign {

namespace {

using dsl::FaultKind;

double value_or(const std::optional<dsl::Param>& p, double fallback) {
  return p ? p->value : fallback;
}

sim::RoadModel build_road(const dsl::ScenarioSpec& sc) {
  std::vector<sim::Segment> segs;
  for (const auto& s : sc.road.segments) segs.push_back({s.length.value, s.curvature.value});
  if (segs.empty()) segs.push_back({dsl::kDefaultRoadLength, 0.0});
  return sim::RoadModel(static_cast<int>(sc.road.lanes.value), sc.road.lane_width.value,
                        std::move(segs));
}

sim::VehicleState build_vehicle(const sim::RoadModel& road, const dsl::VehicleDecl& v) {
  return sim::place_on_road(road, v.s.value, road.lane_center(static_cast<int>(v.lane.value)),
                            v.speed.value, value_or(v.length, sim::kDefaultLength),
                            value_or(v.width, sim::kDefaultWidth),
                            value_or(v.wheelbase, sim::kDefaultWheelbase));
}

sim::Behavior behavior_of(dsl::BehaviorKind k) {
  switch (k) {
    case dsl::BehaviorKind::emergency_brake: return sim::Behavior::emergency_brake;
    case dsl::BehaviorKind::cut_in: return sim::Behavior::cut_in;
    case dsl::BehaviorKind::stop: return sim::Behavior::stop;
    case dsl::BehaviorKind::cruise: break;
  }
  return sim::Behavior::cruise;
}

sim::WorldState build_world(const sim::RoadModel& road, const dsl::ScenarioSpec& sc) {
  sim::WorldState w;
  w.ego = build_vehicle(road, sc.ego);
  int id = 1;
  for (const auto& a : sc.agents) {
    sim::Agent ag;
    ag.id = id++;
    ag.name = a.name;
    ag.state = build_vehicle(road, a);
    ag.lane = static_cast<int>(a.lane.value);
    ag.set_speed = a.speed.value;
    ag.script.kind = behavior_of(a.behavior);
    ag.script.at = value_or(a.at, 0.0);
    ag.script.decel = value_or(a.decel, 0.0);
    ag.script.target_lane = static_cast<int>(value_or(a.target_lane, a.lane.value));
    ag.script.duration = value_or(a.duration, 0.0);
    w.agents.push_back(std::move(ag));
  }
  return w;
}

pipeline::PipelineConfig pipeline_config(const sim::RoadModel& road, const dsl::ScenarioSpec& sc,
                                         pipeline::PipelineConfig cfg) {
  cfg.planning.v_cruise = value_or(sc.mission.speed, sc.ego.speed.value);
  cfg.planning.d_mission = road.lane_center(static_cast<int>(value_or(sc.mission.lane, sc.ego.lane.value)));
  cfg.planning.ego_length = value_or(sc.ego.length, sim::kDefaultLength);
  cfg.planning.ego_width = value_or(sc.ego.width, sim::kDefaultWidth);
  cfg.control.wheelbase = value_or(sc.ego.wheelbase, sim::kDefaultWheelbase);
  return cfg;
}

struct SensorFaults {
  sensor::TemporalFaultSpec temporal;
  sensor::SpatialFaultSpec spatial;
  bool has_spatial = false;
};

SensorFaults sensor_faults(const dsl::ScenarioSpec& sc, sensor::SensorConfig& cfg) {
  SensorFaults f;
  for (const auto& d : sc.faults) {
    switch (d.kind) {
      case FaultKind::sensor_drop:
        f.temporal.drop_rate = d.number_or("rate", 0.0);
        f.temporal.delay_sigma = d.number_or("delay_sigma", 0.0);
        break;
      case FaultKind::sensor_shift:
        f.has_spatial = true;
        f.spatial.offset.translation = {d.number_or("x", 0.0), d.number_or("y", 0.0),
                                        d.number_or("z", 0.0)};
        f.spatial.offset.yaw = d.number_or("yaw", 0.0);
        f.spatial.offset.pitch = d.number_or("pitch", 0.0);
        f.spatial.offset.roll = d.number_or("roll", 0.0);
        f.spatial.translation_sigma = d.number_or("translation_sigma", 0.0);
        f.spatial.rotation_sigma = d.number_or("rotation_sigma", 0.0);
        break;
      case FaultKind::sensor_noise:
        cfg.position_noise_sigma = d.number_or("position_sigma", 0.0);
        cfg.yaw_noise_sigma = d.number_or("yaw_sigma", 0.0);
        break;
      case FaultKind::compute_bitflip:
        break;
    }
  }
  return f;
}

// Compute faults declared in the scenario. Unspecified address parts are
// drawn; specified ones override the draw.
std::vector<fault::FaultSpec> compute_faults(const dsl::ScenarioSpec& sc,
                                             const pipeline::Manifest& manifest, long max_ticks,
                                             Rng& rng, std::string& error) {
  std::vector<fault::FaultSpec> out;
  for (const auto& d : sc.faults) {
    if (d.kind != FaultKind::compute_bitflip) continue;
    const auto node = pipeline::node_from_string(d.ident("node").value_or(""));
    if (!node) {
      error = "unknown node";
      return {};
    }
    const int count = static_cast<int>(d.number_or("count", 1.0));
    const long tick_min = static_cast<long>(d.number_or("tick_min", 0.0));
    const long tick_max = static_cast<long>(d.number_or("tick_max", static_cast<double>(max_ticks - 1)));
    std::vector<fault::FaultSpec> specs;
    try {
      specs = fault::schedule_faults(*node, count, tick_min, std::max(tick_min, tick_max), rng, manifest);
    } catch (const std::invalid_argument& e) {
      error = e.what();
      return {};
    }
    std::optional<std::size_t> index;
    if (const auto it = d.fields.find("state"); it != d.fields.end()) {
      if (const auto* id = std::get_if<dsl::Ident>(&it->second)) {
        index = manifest.index_of(*node, id->name);
        if (!index) {
          error = "no registered state " + std::string(pipeline::to_string(*node)) + "." + id->name;
          return {};
        }
      } else {
        const double v = std::get<dsl::Param>(it->second).value;
        index = v >= 0.0 ? static_cast<std::size_t>(v) : static_cast<std::size_t>(-1);
      }
    }
    const auto mode = d.ident("mode").value_or("flip") == "stuck" ? fault::Mode::stuck : fault::Mode::flip;
    for (auto& f : specs) {
      if (index) f.state_index = *index;
      if (const auto b = d.param("bit")) f.bit = static_cast<int>(b->value);
      if (const auto t = d.param("tick")) f.trigger_tick = static_cast<long>(t->value);
      f.mode = mode;
      f.value = d.number_or("value", 0.0);
      out.push_back(f);
    }
  }
  return out;
}

void trace_header(std::ostringstream& os, const sim::WorldState& w) {
  os << "tick,time,ego_x,ego_y,ego_yaw,ego_speed,cmd_steer,cmd_accel,frame,n_tracks,faults";
  for (const auto& a : w.agents) {
    os << ',' << a.name << "_x," << a.name << "_y," << a.name << "_yaw," << a.name << "_speed";
  }
  os << '\n';
}

void trace_row(std::ostringstream& os, const sim::WorldState& w, const pipeline::ControlCommand& c,
               const char* frame, std::size_t n_tracks, std::size_t n_faults) {
  using dsl::format_number;
  os << w.tick << ',' << format_number(w.time) << ',' << format_number(w.ego.x) << ','
     << format_number(w.ego.y) << ',' << format_number(w.ego.yaw) << ','
     << format_number(w.ego.speed) << ',' << format_number(c.steer) << ','
     << format_number(c.accel) << ',' << frame << ',' << n_tracks << ',' << n_faults;
  for (const auto& a : w.agents) {
    os << ',' << format_number(a.state.x) << ',' << format_number(a.state.y) << ','
       << format_number(a.state.yaw) << ',' << format_number(a.state.speed);
  }
  os << '\n';
}

}  // namespace

pipeline::Manifest scenario_manifest(const dsl::ScenarioSpec& scenario) {
  const sim::RoadModel road = build_road(scenario);
  const pipeline::Pipeline p(road, pipeline_config(road, scenario, {}));
  return p.manifest();
}

TrialRecord run_trial(const dsl::ResolvedConfig& config, std::uint64_t seed,
                      const TrialOptions& options) {
  const auto wall_start = std::chrono::steady_clock::now();
  const dsl::ScenarioSpec& sc = config.scenario;

  TrialRecord rec;
  rec.scenario = sc.name;
  rec.binding = dsl::binding_label(config.binding);
  rec.seed = seed;

  const sim::RoadModel road = build_road(sc);
  sim::WorldState world = build_world(road, sc);
  pipeline::Pipeline pipe(road, pipeline_config(road, sc, options.pipeline));
  const pipeline::Manifest manifest = pipe.manifest();

  const double timeout = sc.mission.timeout.value;
  const long max_ticks = std::lround(std::ceil(timeout / sim::kDt - 1e-9));
  const metrics::MissionGoal goal{sc.mission.target_s.value, timeout};

  sensor::SensorConfig scfg = options.sensor;
  const SensorFaults sf = sensor_faults(sc, scfg);
  const sensor::Extrinsics nominal{};
  Rng extr_rng = Rng::stream(seed, stream_tag::kExtrinsics);
  const sensor::Extrinsics actual =
      sf.has_spatial ? sensor::perturb_extrinsics(nominal, sf.spatial, extr_rng) : nominal;
  const std::uint64_t frame_seed = splitmix64(seed ^ stream_tag::kFrames);
  Rng lat_rng = Rng::stream(seed, stream_tag::kLatency);
  Rng fault_rng = Rng::stream(seed, stream_tag::kFaults);

  std::string error;
  std::vector<fault::FaultSpec> schedule =
      options.fault_schedule ? *options.fault_schedule
                             : compute_faults(sc, manifest, max_ticks, fault_rng, error);
  if (error.empty()) {
    if (auto bad = fault::check_addresses(schedule, manifest)) error = *bad;
  }
  if (!error.empty()) {
    rec.outcome = {metrics::OutcomeKind::aborted, 0.0};
    rec.abort_reason = error;
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - wall_start).count();
    return rec;
  }
  fault::Injector injector(std::move(schedule));

  metrics::MissionTrace trace;
  std::vector<metrics::DetectionPair> pairs;
  std::vector<latency::LatencySample> samples;
  sim::StepClamps clamps;
  std::ostringstream tos;
  if (options.trace) trace_header(tos, world);

  pipeline::ControlCommand applied{0.0, 0.0, 0};
  bool terminal = false;
  std::vector<sensor::EgoDetection> dets;
  for (long k = 0; k < max_ticks && !terminal; ++k) {
    const char* frame_mark = "";
    dets.clear();
    if (pipeline::Pipeline::perception_due(k)) {
      const long seq = k / pipeline::kTicksPerPerception;
      Rng noise_rng = Rng::stream(frame_seed, 2 * static_cast<std::uint64_t>(seq));
      Rng drop_rng = Rng::stream(frame_seed, 2 * static_cast<std::uint64_t>(seq) + 1);
      sensor::SensorFrame frame = sensor::sample_frame(world, actual, scfg, seq, noise_rng);
      frame = sensor::apply_temporal_fault(frame, sf.temporal, scfg, drop_rng);
      ++rec.frames;
      if (auto ego_dets = sensor::to_ego_frame(frame, nominal)) {
        dets = std::move(*ego_dets);
        frame_mark = "ok";
        // Perception error against ground truth in the ego frame.
        const double c = std::cos(world.ego.yaw), s = std::sin(world.ego.yaw);
        for (const auto& d : dets) {
          for (const auto& a : world.agents) {
            if (a.id != d.object_id) continue;
            const double dx = a.state.x - world.ego.x, dy = a.state.y - world.ego.y;
            pairs.push_back({{d.x, d.y, d.yaw},
                             {c * dx + s * dy, -s * dx + c * dy, wrap_angle(a.state.yaw - world.ego.yaw)}});
          }
        }
      } else {
        ++rec.dropped_frames;
        frame_mark = "dropped";
      }
    }

    const auto report = pipe.tick(k, dets, world.ego);
    injector.apply(k, pipe, rec.fault_log);
    pipeline::ControlCommand cmd = pipe.command(k);

    bool defer = false;
    if (report.perception_ran) {
      const int n_obj = static_cast<int>(pipe.perception().tracks().size());
      const auto sample = latency::sample_cycle(options.latency, k, n_obj, lat_rng, options.deadline_ms);
      defer = sample.violated && options.latency.coupling == latency::Coupling::delay_command;
      samples.push_back(sample);
    }
    if (!defer) applied = cmd;
    applied.tick = k;

    world = sim::step_behaviors(world, road, sim::kDt);
    world.ego = sim::step_vehicle(world.ego, applied.steer, applied.accel, sim::kDt, &clamps);

    const sim::FrenetPoint ef = road.project(world.ego.x, world.ego.y);
    trace.progress.push_back({world.time, ef.s});
    if (const auto hit = sim::check_collision(world)) {
      world.events.push_back(*hit);
      trace.events.push_back({world.time, metrics::EventKind::collision});
      terminal = true;
    } else if (sim::check_off_lane(world, road)) {
      world.events.push_back({world.time, sim::WorldEventKind::off_lane, -1});
      trace.events.push_back({world.time, metrics::EventKind::off_lane});
      terminal = true;
    } else if (ef.s >= goal.target_s || !std::isfinite(ef.s)) {
      terminal = true;
    }
    if (options.trace) {
      trace_row(tos, world, applied, frame_mark, pipe.perception().tracks().size(),
                rec.fault_log.size());
    }
    rec.ticks = k + 1;
  }

  rec.outcome = metrics::classify_mission(trace, goal);
  if (!pairs.empty()) {
    rec.e_p = metrics::position_error(pairs);
    rec.e_theta = metrics::orientation_error(pairs);
    rec.e_theta_raw = metrics::orientation_error_raw(pairs);
  }
  if (!samples.empty()) rec.latency = latency::stats(std::span<const latency::LatencySample>(samples), options.deadline_ms);
  rec.clamps = clamps.total();
  if (options.trace) {
    rec.trace_csv = tos.str();
    rec.latency_samples = std::move(samples);
  }
  rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - wall_start).count();
  return rec;
}

}  // namespace addt::campaign
