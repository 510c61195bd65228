#include "evobed/results_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace evobed {

namespace {

using nlohmann::json;

json gains_to_json(const GainSet& g) {
  json arr = json::array();
  for (double v : g.to_array()) arr.push_back(v);
  return arr;
}

GainSet gains_from_json(const json& arr) {
  if (!arr.is_array() || arr.size() != 18)
    throw std::invalid_argument("gain list must have 18 elements");
  std::array<double, 18> a{};
  for (int i = 0; i < 18; ++i) a[i] = arr[i].get<double>();
  return GainSet::from_array(a);
}

json schedule_to_json(const WaypointSchedule& s) {
  json rows = json::array();
  for (const auto& tw : s.entries)
    rows.push_back({tw.t_start, tw.waypoint.north, tw.waypoint.east, tw.waypoint.height,
                    tw.waypoint.yaw_deg});
  return json{{"name", s.name}, {"duration", s.duration}, {"rows", rows}};
}

WaypointSchedule schedule_from_json(const json& j) {
  WaypointSchedule s;
  s.name = j.at("name").get<std::string>();
  s.duration = j.at("duration").get<double>();
  for (const json& row : j.at("rows"))
    s.entries.push_back({row[0].get<double>(),
                         {row[1].get<double>(), row[2].get<double>(), row[3].get<double>(),
                          row[4].get<double>()}});
  s.validate();
  return s;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

std::string generations_csv(const RepeatResult& result) {
  std::ostringstream out;
  out << "generation,stage,best,mean,worst,successes,mean_cr,mean_f\n";
  for (const auto& g : result.generations) {
    out << g.generation << ',' << g.stage << ',' << format_double(g.best) << ','
        << format_double(g.mean) << ',' << format_double(g.worst) << ',' << g.successes
        << ',' << format_double(g.mean_cr) << ',' << format_double(g.mean_f) << '\n';
  }
  return out.str();
}

std::string population_json(const Population& pop) {
  json members = json::array();
  for (const auto& m : pop.members) {
    members.push_back({{"gains", gains_to_json(m.gains)},
                       {"cr", m.cr},
                       {"f", m.f},
                       {"fitness", m.fitness},
                       {"success", m.success},
                       {"stagnation", m.stagnation}});
  }
  json root{{"generation", pop.generation}, {"members", members}};
  return root.dump(2) + "\n";
}

std::string individual_json(const Individual& ind, const std::string& schedule_tag) {
  json root{{"gains", gains_to_json(ind.gains)},
            {"cr", ind.cr},
            {"f", ind.f},
            {"fitness", ind.fitness},
            {"success", ind.success},
            {"fitness_schedule", schedule_tag}};
  return root.dump(2) + "\n";
}

Individual individual_from_json(const std::string& text) {
  json root = json::parse(text);
  Individual ind;
  ind.gains = gains_from_json(root.at("gains"));
  ind.cr = root.at("cr").get<double>();
  ind.f = root.at("f").get<double>();
  ind.fitness = root.at("fitness").get<double>();
  ind.success = root.at("success").get<bool>();
  return ind;
}

std::string sweep_csv(const SweepGrid& grid) {
  std::ostringstream out;
  out << "# pair=" << grid.pair << " rows=" << grid.row_gain
      << " cols=" << grid.col_gain << "\n";
  out << grid.row_gain << '\\' << grid.col_gain;
  for (double v : grid.col_values) out << ',' << format_double(v);
  out << '\n';
  for (int r = 0; r < 10; ++r) {
    out << format_double(grid.row_values[r]);
    for (int c = 0; c < 10; ++c) out << ',' << format_double(grid.mean_fitness[r][c]);
    out << '\n';
  }
  out << "# no_takeoff counts\n";
  for (int r = 0; r < 10; ++r) {
    out << format_double(grid.row_values[r]);
    for (int c = 0; c < 10; ++c) out << ',' << grid.no_takeoff[r][c];
    out << '\n';
  }
  return out.str();
}

std::string compare_stats_json(const CompareResult& result, int generation_cap) {
  auto gen_stats = [&](const std::vector<double>& gens) {
    return json{{"generations", gens}, {"median", median(gens)}};
  };
  auto mw = [&](const MannWhitneyResult& m) {
    return json{{"u", m.u},
                {"p_one_sided", m.p_one_sided},
                {"exact", m.exact},
                {"degenerate", m.degenerate}};
  };
  auto mean_of = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
  };
  json root{
      {"generation_cap", generation_cap},
      {"convergence",
       {{"ose", gen_stats(result.ose_convergence)},
        {"tse", gen_stats(result.tse_convergence)},
        {"mann_whitney_tse_lt_ose", mw(result.convergence_test)}}},
      {"generalisation",
       {{"repeats", result.generalisation_repeats},
        {"ose_means", result.ose_generalisation.mean_fitness},
        {"tse_means", result.tse_generalisation.mean_fitness},
        {"ose_grand_mean", mean_of(result.ose_generalisation.mean_fitness)},
        {"tse_grand_mean", mean_of(result.tse_generalisation.mean_fitness)},
        {"mann_whitney_ose_lt_tse", mw(result.generalisation_test)}}},
  };
  return root.dump(2) + "\n";
}

std::string trial_record_json(const TrialRecord& r) {
  json root{
      {"vehicle",
       {{"mass", r.vehicle.mass},
        {"inertia", {r.vehicle.inertia_xx, r.vehicle.inertia_yy, r.vehicle.inertia_zz}},
        {"arm_length", r.vehicle.arm_length},
        {"rotor_radius", r.vehicle.rotor_radius},
        {"max_thrust_per_motor", r.vehicle.max_thrust_per_motor},
        {"motor_time_constant", r.vehicle.motor_time_constant},
        {"drag_horizontal", r.vehicle.drag_horizontal},
        {"drag_vertical", r.vehicle.drag_vertical},
        {"angular_drag", r.vehicle.angular_drag},
        {"yaw_torque_ratio", r.vehicle.yaw_torque_ratio},
        {"rotor_plane_offset", r.vehicle.rotor_plane_offset}}},
      {"wind",
       {{"mean_speed", r.wind.mean_speed},
        {"traversal_deg", r.wind.traversal_deg},
        {"period_s", r.wind.period_s},
        {"turbulence", r.wind.turbulence},
        {"fan_position", {r.wind.fan_n, r.wind.fan_e}}}},
      {"sensors",
       {{"attitude_noise_deg", r.noise.attitude_deg},
        {"rate_noise_dps", r.noise.rate_dps},
        {"position_noise_m", r.noise.position_m},
        {"height_noise_m", r.noise.height_m}}},
      {"tether",
       {{"radius", r.tether.radius},
        {"tilt_limit_deg", r.tether.tilt_limit_deg},
        {"yaw_excursion_deg", r.tether.yaw_excursion_deg},
        {"pull_rule", r.tether_pull_enabled}}},
      {"schedule", schedule_to_json(r.schedule)},
      {"gains", gains_to_json(r.gains)},
      {"seed", r.seed},
      {"fitness", format_double(r.fitness)},
      {"reason", r.reason},
      {"duration", r.duration},
  };
  return root.dump(2) + "\n";
}

TrialRecord trial_record_from_json(const std::string& text) {
  json root = json::parse(text);
  TrialRecord r;
  const json& v = root.at("vehicle");
  r.vehicle.mass = v.at("mass").get<double>();
  r.vehicle.inertia_xx = v.at("inertia")[0].get<double>();
  r.vehicle.inertia_yy = v.at("inertia")[1].get<double>();
  r.vehicle.inertia_zz = v.at("inertia")[2].get<double>();
  r.vehicle.arm_length = v.at("arm_length").get<double>();
  r.vehicle.rotor_radius = v.at("rotor_radius").get<double>();
  r.vehicle.max_thrust_per_motor = v.at("max_thrust_per_motor").get<double>();
  r.vehicle.motor_time_constant = v.at("motor_time_constant").get<double>();
  r.vehicle.drag_horizontal = v.at("drag_horizontal").get<double>();
  r.vehicle.drag_vertical = v.at("drag_vertical").get<double>();
  r.vehicle.angular_drag = v.at("angular_drag").get<double>();
  r.vehicle.yaw_torque_ratio = v.at("yaw_torque_ratio").get<double>();
  r.vehicle.rotor_plane_offset = v.at("rotor_plane_offset").get<double>();
  const json& w = root.at("wind");
  r.wind.mean_speed = w.at("mean_speed").get<double>();
  r.wind.traversal_deg = w.at("traversal_deg").get<double>();
  r.wind.period_s = w.at("period_s").get<double>();
  r.wind.turbulence = w.at("turbulence").get<double>();
  r.wind.fan_n = w.at("fan_position")[0].get<double>();
  r.wind.fan_e = w.at("fan_position")[1].get<double>();
  const json& s = root.at("sensors");
  r.noise.attitude_deg = s.at("attitude_noise_deg").get<double>();
  r.noise.rate_dps = s.at("rate_noise_dps").get<double>();
  r.noise.position_m = s.at("position_noise_m").get<double>();
  r.noise.height_m = s.at("height_noise_m").get<double>();
  const json& t = root.at("tether");
  r.tether.radius = t.at("radius").get<double>();
  r.tether.tilt_limit_deg = t.at("tilt_limit_deg").get<double>();
  r.tether.yaw_excursion_deg = t.at("yaw_excursion_deg").get<double>();
  r.tether_pull_enabled = t.at("pull_rule").get<bool>();
  r.schedule = schedule_from_json(root.at("schedule"));
  r.gains = gains_from_json(root.at("gains"));
  r.seed = root.at("seed").get<std::uint64_t>();
  {
    std::string f = root.at("fitness").get<std::string>();
    double parsed = 0.0;
    auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), parsed);
    if (ec != std::errc{}) throw std::invalid_argument("bad fitness in trial record");
    (void)ptr;
    r.fitness = parsed;
  }
  r.reason = root.at("reason").get<std::string>();
  r.duration = root.at("duration").get<double>();
  return r;
}

TrialOutcome replay_trial(const TrialRecord& record) {
  TrialContext ctx;
  ctx.vehicle = record.vehicle;
  ctx.wind = record.wind;
  ctx.noise = record.noise;
  ctx.tether = record.tether;
  ctx.rules.tether_pull_enabled = record.tether_pull_enabled;
  ctx.schedule = record.schedule;
  return run_trial(record.gains, ctx, Seed{record.seed});
}

TrialRecord record_trial(const GainSet& gains, const TrialContext& ctx, Seed seed) {
  TrialOutcome o = run_trial(gains, ctx, seed);
  TrialRecord r;
  r.vehicle = ctx.vehicle;
  r.wind = ctx.wind;
  r.noise = ctx.noise;
  r.tether = ctx.tether;
  r.tether_pull_enabled = ctx.rules.tether_pull_enabled;
  r.schedule = ctx.schedule;
  r.gains = gains;
  r.seed = seed.value;
  r.fitness = o.fitness;
  r.reason = to_string(o.reason);
  r.duration = o.duration;
  return r;
}

std::string trial_series_csv(const TrialOutcome& outcome) {
  std::ostringstream out;
  out << "t,f_p,f_h,f_psi,f_a,f_vh,f_vv,f_omega,f_l,cumulative\n";
  for (const auto& row : outcome.series) {
    const FitnessBreakdown& b = row.breakdown;
    out << format_double(row.t) << ',' << format_double(b.f_p) << ','
        << format_double(b.f_h) << ',' << format_double(b.f_psi) << ','
        << format_double(b.f_a) << ',' << format_double(b.f_vh) << ','
        << format_double(b.f_vv) << ',' << format_double(b.f_omega) << ','
        << format_double(b.f_l) << ',' << format_double(row.cumulative) << '\n';
  }
  return out.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_repeat(const std::filesystem::path& dir, const RepeatResult& result,
                  const ExperimentSetup& setup, int verbosity) {
  write_file(dir / "generations.csv", generations_csv(result));
  write_file(dir / "best.json", individual_json(result.best, result.fitness_schedule));
  if (verbosity >= 1)
    write_file(dir / ("population_g" + std::to_string(result.final_population.generation) +
                      ".json"),
               population_json(result.final_population));
  // A replayable record of the best controller on its method context.
  TrialContext ctx = result.method == "ose" ? setup.ose_context() : setup.tse_context();
  TrialRecord record = record_trial(result.best.gains, ctx, Seed{result.seed}.child(777));
  write_file(dir / "best_trial.json", trial_record_json(record));
  json meta{{"method", result.method},
            {"repeat", result.repeat_index},
            {"seed", result.seed},
            {"convergence_generation", result.convergence_generation},
            {"stage_boundary", result.stage_boundary},
            {"bootstrap_attempts", result.bootstrap_attempts},
            {"fitness_schedule", result.fitness_schedule}};
  write_file(dir / "repeat.json", meta.dump(2) + "\n");
}

}  // namespace evobed
