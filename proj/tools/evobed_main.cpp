// Command-line front end for the controller-evolution testbed: runs the
// one-stage and two-stage protocols, the generalisation evaluation, the
// height-gain sweep, statistical comparisons, deterministic replay of
// recorded trials, and plot-data extraction from result directories.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>

#include "evobed/config.hpp"
#include "evobed/experiment.hpp"
#include "evobed/results_io.hpp"

namespace fs = std::filesystem;
using namespace evobed;
using nlohmann::json;

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int workers = -1;
  int repeats = -1;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--config", opt.config_path, "Configuration file (JSON)")
      ->envname("EVOBED_CONFIG");
  cmd->add_option("--out", opt.out_dir, "Output directory")->envname("EVOBED_OUT");
  auto* seed_opt = cmd->add_option("--seed", opt.seed, "Master seed")
                       ->envname("EVOBED_SEED");
  cmd->callback([&opt, seed_opt] { opt.seed_set = seed_opt->count() > 0; });
  cmd->add_option("--workers", opt.workers, "Worker threads (0 = all cores)")
      ->envname("EVOBED_WORKERS");
  cmd->add_option("--repeats", opt.repeats, "Experimental repeats")
      ->envname("EVOBED_REPEATS");
  cmd->add_flag("--quiet", opt.quiet, "Suppress progress output")
      ->envname("EVOBED_QUIET");
}

ExperimentConfig load_config(const CommonOptions& opt) {
  ExperimentConfig config;
  if (!opt.config_path.empty())
    config = parse_config(read_file(opt.config_path));
  else
    config = parse_config("");
  if (opt.seed_set) config.seed = opt.seed;
  if (!opt.out_dir.empty()) config.out_dir = opt.out_dir;
  if (opt.workers >= 0) config.workers = opt.workers;
  if (opt.repeats > 0) config.repeats = opt.repeats;
  return config;
}

ProgressLog make_log(const CommonOptions& opt) {
  if (opt.quiet) return nullptr;
  return [](const std::string& line) { std::cerr << line << "\n"; };
}

void snapshot(const ExperimentConfig& config) {
  write_file(fs::path(config.out_dir) / "config.snapshot", serialize_config(config));
}

int run_method(const CommonOptions& opt, const std::string& method) {
  ExperimentConfig config = load_config(opt);
  ExperimentSetup setup = config.make_setup();
  snapshot(config);
  ProgressLog log = make_log(opt);
  Seed master{config.seed};
  std::uint64_t method_tag = method == "ose" ? 21 : 22;
  for (int r = 0; r < config.repeats; ++r) {
    RepeatResult result = method == "ose"
                              ? run_ose(setup, master.child(method_tag).child(r), log)
                              : run_tse(setup, master.child(method_tag).child(r), log);
    result.repeat_index = r;
    char name[32];
    std::snprintf(name, sizeof(name), "repeat_%02d", r);
    write_repeat(fs::path(config.out_dir) / method / name, result, setup,
                 config.log_verbosity);
    std::cout << method << " repeat " << r << ": "
              << (result.converged()
                      ? "converged at generation " +
                            std::to_string(result.convergence_generation)
                      : "did not converge within the cap")
              << ", best fitness " << format_double(result.best.fitness) << "\n";
  }
  return 0;
}

int run_compare(const CommonOptions& opt) {
  ExperimentConfig config = load_config(opt);
  ExperimentSetup setup = config.make_setup();
  snapshot(config);
  CompareResult result = run_comparison(setup, config.repeats,
                                        config.generalisation_repeats,
                                        Seed{config.seed}, make_log(opt));
  fs::path out(config.out_dir);
  for (const auto& r : result.ose) {
    char name[32];
    std::snprintf(name, sizeof(name), "repeat_%02d", r.repeat_index);
    write_repeat(out / "ose" / name, r, setup, config.log_verbosity);
  }
  for (const auto& r : result.tse) {
    char name[32];
    std::snprintf(name, sizeof(name), "repeat_%02d", r.repeat_index);
    write_repeat(out / "tse" / name, r, setup, config.log_verbosity);
  }
  write_file(out / "stats.json", compare_stats_json(result, setup.generation_cap));
  std::cout << "convergence medians: ose=" << median(result.ose_convergence)
            << " tse=" << median(result.tse_convergence)
            << " (one-sided p=" << result.convergence_test.p_one_sided << ")\n"
            << "generalisation means: ose="
            << median(result.ose_generalisation.mean_fitness)
            << " tse=" << median(result.tse_generalisation.mean_fitness)
            << " (one-sided p=" << result.generalisation_test.p_one_sided << ")\n"
            << "stats written to " << (out / "stats.json").string() << "\n";
  return 0;
}

std::vector<GainSet> load_best_controllers(const std::string& in_dir) {
  std::vector<GainSet> controllers;
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(in_dir))
    if (entry.is_regular_file() && entry.path().filename() == "best.json")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files)
    controllers.push_back(individual_from_json(read_file(f)).gains);
  if (controllers.empty())
    throw std::runtime_error("no best.json files found under " + in_dir);
  return controllers;
}

int run_generalise(const CommonOptions& opt, const std::string& in_dir) {
  ExperimentConfig config = load_config(opt);
  ExperimentSetup setup = config.make_setup();
  std::vector<GainSet> controllers = load_best_controllers(in_dir);
  GeneralisationResult result = evaluate_generalisation(
      controllers, setup, config.generalisation_repeats, Seed{config.seed}.child(23));
  fs::path out(config.out_dir);
  std::ostringstream csv;
  csv << "controller,mean_fitness";
  for (int k = 0; k < config.generalisation_repeats; ++k) csv << ",trial" << k;
  csv << "\n";
  for (std::size_t c = 0; c < controllers.size(); ++c) {
    csv << c << ',' << format_double(result.mean_fitness[c]);
    for (double f : result.trial_fitness[c]) csv << ',' << format_double(f);
    csv << "\n";
  }
  write_file(out / "generalisation.csv", csv.str());
  for (std::size_t c = 0; c < controllers.size(); ++c)
    std::cout << "controller " << c << ": mean "
              << format_double(result.mean_fitness[c]) << "\n";
  return 0;
}

int run_sweep(const CommonOptions& opt, const std::string& best_path) {
  ExperimentConfig config = load_config(opt);
  ExperimentSetup setup = config.make_setup();
  GainSet base = individual_from_json(read_file(best_path)).gains;
  SweepResult result = gain_sweep(base, setup, config.sweep_repeats,
                                  Seed{config.seed}.child(24), make_log(opt));
  fs::path out(config.out_dir);
  for (const auto& grid : result.grids)
    write_file(out / ("sweep_" + grid.pair + ".csv"), sweep_csv(grid));
  double grid_max = 0.0;
  int no_takeoff_min_i = 0;
  for (const auto& grid : result.grids) {
    for (int r = 0; r < 10; ++r)
      for (int c = 0; c < 10; ++c) grid_max = std::max(grid_max, grid.mean_fitness[r][c]);
    // Tally no-takeoff trials in the lowest-I row/column of each grid.
    for (int k = 0; k < 10; ++k) {
      if (grid.row_gain == "I") no_takeoff_min_i += grid.no_takeoff[0][k];
      if (grid.col_gain == "I") no_takeoff_min_i += grid.no_takeoff[k][0];
    }
  }
  json summary{{"reference_mean", result.reference_mean},
               {"grid_max", grid_max},
               {"grid_max_over_reference", grid_max / result.reference_mean},
               {"no_takeoff_trials_min_i", no_takeoff_min_i},
               {"repeats", result.repeats}};
  write_file(out / "sweep_summary.json", summary.dump(2) + "\n");
  std::cout << "sweep grids written; reference mean "
            << format_double(result.reference_mean) << ", grid max "
            << format_double(grid_max) << ", min-I no-takeoff trials "
            << no_takeoff_min_i << "\n";
  return 0;
}

int run_replay(const std::string& trial_path) {
  TrialRecord record = trial_record_from_json(read_file(trial_path));
  TrialOutcome outcome = replay_trial(record);
  bool identical = outcome.fitness == record.fitness &&
                   to_string(outcome.reason) == record.reason;
  std::cout << "recorded fitness " << format_double(record.fitness) << " ("
            << record.reason << "), replayed " << format_double(outcome.fitness)
            << " (" << to_string(outcome.reason) << "): "
            << (identical ? "bit-identical" : "MISMATCH") << "\n";
  return identical ? 0 : 1;
}

int run_plot_data(const CommonOptions& opt, const std::string& in_dir) {
  ExperimentConfig config = load_config(opt);
  fs::path in(in_dir);
  fs::path out(config.out_dir.empty() ? in_dir : config.out_dir);

  // Fitness progressions and convergence lists per method.
  for (const std::string method : {"ose", "tse"}) {
    if (!fs::exists(in / method)) continue;
    std::ostringstream progress;
    progress << "repeat,generation,stage,best,mean,worst,successes,mean_cr,mean_f\n";
    std::ostringstream convergence;
    convergence << "repeat,convergence_generation\n";
    for (int r = 0;; ++r) {
      char name[32];
      std::snprintf(name, sizeof(name), "repeat_%02d", r);
      fs::path dir = in / method / name;
      if (!fs::exists(dir)) break;
      std::string csv = read_file(dir / "generations.csv");
      std::istringstream lines(csv);
      std::string line;
      std::getline(lines, line);  // header
      while (std::getline(lines, line))
        if (!line.empty()) progress << r << ',' << line << "\n";
      json meta = json::parse(read_file(dir / "repeat.json"));
      convergence << r << ',' << meta.at("convergence_generation").get<int>() << "\n";
    }
    write_file(out / ("plot_progression_" + method + ".csv"), progress.str());
    write_file(out / ("plot_convergence_" + method + ".csv"), convergence.str());
  }

  // Sweep heat maps in long columnar form.
  for (const std::string pair : {"ID", "PI", "PD"}) {
    fs::path f = in / ("sweep_" + pair + ".csv");
    if (!fs::exists(f)) continue;
    std::string csv = read_file(f);
    std::istringstream lines(csv);
    std::string line;
    std::vector<double> cols;
    std::ostringstream long_form;
    long_form << "pair,row_gain,col_gain,mean_fitness\n";
    std::string row_label;
    while (std::getline(lines, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream cells(line);
      std::string cell;
      std::vector<std::string> row;
      while (std::getline(cells, cell, ',')) row.push_back(cell);
      if (cols.empty()) {
        for (std::size_t i = 1; i < row.size(); ++i) cols.push_back(std::stod(row[i]));
        continue;
      }
      if (row.size() != cols.size() + 1) break;  // reached the tally section
      for (std::size_t i = 1; i < row.size(); ++i)
        long_form << pair << ',' << row[0] << ',' << format_double(cols[i - 1]) << ','
                  << row[i] << "\n";
    }
    write_file(out / ("plot_sweep_" + pair + ".csv"), long_form.str());
  }
  std::cout << "plot data written under " << out.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tethered UAV controller-evolution testbed"};
  app.require_subcommand(1);

  CommonOptions opt;
  std::string in_dir = "results";
  std::string best_path;
  std::string trial_path;

  auto* ose = app.add_subcommand("run-ose", "Run the one-stage protocol");
  add_common(ose, opt);
  auto* tse = app.add_subcommand("run-tse", "Run the two-stage protocol");
  add_common(tse, opt);
  auto* compare = app.add_subcommand(
      "compare", "Run both protocols and emit Mann-Whitney statistics");
  add_common(compare, opt);
  auto* generalise = app.add_subcommand(
      "generalise", "Evaluate stored best controllers on the unseen schedule");
  add_common(generalise, opt);
  generalise->add_option("--in", in_dir, "Results directory with best.json files");
  auto* sweep = app.add_subcommand("sweep", "Height-gain sensitivity sweep");
  add_common(sweep, opt);
  sweep->add_option("--best", best_path, "best.json of the evolved base controller")
      ->required();
  auto* replay = app.add_subcommand("replay", "Re-execute a recorded trial");
  replay->add_option("--trial", trial_path, "Trial record (JSON)")->required();
  auto* plot = app.add_subcommand("plot-data", "Convert result logs to plot tables");
  add_common(plot, opt);
  plot->add_option("--in", in_dir, "Results directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (ose->parsed()) return run_method(opt, "ose");
    if (tse->parsed()) return run_method(opt, "tse");
    if (compare->parsed()) return run_compare(opt);
    if (generalise->parsed()) return run_generalise(opt, in_dir);
    if (sweep->parsed()) return run_sweep(opt, best_path);
    if (replay->parsed()) return run_replay(trial_path);
    if (plot->parsed()) return run_plot_data(opt, in_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
