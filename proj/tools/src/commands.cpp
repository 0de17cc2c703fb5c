#include "commands.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hetsched/baselines.hpp"
#include "hetsched/catalog.hpp"
#include "hetsched/error.hpp"
#include "hetsched/io.hpp"
#include "hetsched/metrics.hpp"
#include "hetsched/optimizer.hpp"
#include "hetsched/simulator.hpp"

namespace hetsched::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct Inputs {
  std::string catalog;
  std::string profile;
  std::string scenario;
};

struct Loaded {
  Catalog catalog;
  std::shared_ptr<const DeviceProfile> profile;
  std::unique_ptr<Workload> workload;
  std::unique_ptr<CostModel> cost;
};

void add_inputs(CLI::App* cmd, Inputs& in, bool need_scenario) {
  cmd->add_option("--catalog", in.catalog, "Catalog JSON (default: built-in catalog)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--profile", in.profile,
                  "Device profile JSON (default: derived from the catalog seed costs)")
      ->check(CLI::ExistingFile);
  if (need_scenario)
    cmd->add_option("--scenario", in.scenario, "Scenario JSON")
        ->required()
        ->check(CLI::ExistingFile);
}

Loaded load_inputs(const Inputs& in) {
  Loaded l;
  l.catalog = in.catalog.empty() ? builtin_catalog() : load_catalog(in.catalog);
  l.profile = std::make_shared<const DeviceProfile>(
      in.profile.empty() ? derive_profile(l.catalog, default_device()) : load_profile(in.profile));
  if (!in.scenario.empty()) {
    l.workload = std::make_unique<Workload>(resolve(load_scenario(in.scenario), l.catalog));
    for (std::size_t m = 0; m < l.workload->network_count(); ++m)
      l.profile->validate_network(l.workload->network(m));
  }
  l.cost = std::make_unique<CostModel>(l.profile);
  return l;
}

std::string timestamp() {
  std::time_t t = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    try {
      t = static_cast<std::time_t>(std::stoll(epoch));
    } catch (const std::exception&) {
      throw ValidationError("SOURCE_DATE_EPOCH must be an integer");
    }
  }
  std::tm utc{};
  gmtime_r(&t, &utc);
  std::ostringstream out;
  out << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

void write_manifest(const fs::path& dir, const std::string& command, const Inputs& in,
                    json parameters) {
  json inputs{{"catalog", in.catalog.empty() ? "builtin" : in.catalog},
              {"profile", in.profile.empty() ? "derived" : in.profile}};
  if (!in.scenario.empty()) inputs["scenario"] = in.scenario;
  json manifest{{"tool", "hetsched"},
                {"version", HETSCHED_VERSION},
                {"command", command},
                {"inputs", std::move(inputs)},
                {"parameters", std::move(parameters)},
                {"created", timestamp()}};
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

std::vector<Candidate> with_objectives(std::vector<Candidate> members, const Evaluator& eval) {
  for (auto& c : members) c.objectives = eval.evaluate(c.solution, 0);
  return members;
}

SimConfig sim_config(const Loaded& l, double alpha, std::size_t requests) {
  SimConfig sim;
  sim.requests = requests;
  sim.period_us = periods(alpha, base_periods(*l.workload, *l.cost));
  return sim;
}

std::string format_alpha(double a) {
  std::ostringstream s;
  s << a;
  return s.str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Partition, map and order periodic DNN workloads on heterogeneous processors",
               "hetsched"};
  app.require_subcommand(1);
  app.set_version_flag("--version", HETSCHED_VERSION);

  // init
  std::string init_out;
  auto* init = app.add_subcommand("init", "Write the built-in catalog and derived device profile");
  init->add_option("--out", init_out, "Output directory")->required();

  // scenario
  Inputs scen_in;
  std::size_t n_groups = 1, per_group = 6;
  std::uint64_t scen_seed = 0;
  std::string scen_out;
  auto* scenario = app.add_subcommand("scenario", "Sample a random scenario from a catalog");
  scenario->add_option("--catalog", scen_in.catalog, "Catalog JSON (default: built-in)")
      ->check(CLI::ExistingFile);
  scenario->add_option("--groups", n_groups, "Number of model groups")->check(CLI::PositiveNumber);
  scenario->add_option("--models", per_group, "Models per group")->check(CLI::PositiveNumber);
  scenario->add_option("--seed", scen_seed, "Sampling seed");
  scenario->add_option("--out", scen_out, "Output scenario JSON")->required();

  // search
  Inputs search_in;
  GAConfig ga;
  double search_alpha = 1.0;
  std::size_t search_requests = 20;
  bool search_noiseless = false;
  std::string search_out;
  auto* search = app.add_subcommand("search", "Run the genetic search and write its Pareto archive");
  add_inputs(search, search_in, true);
  search->add_option("--alpha", search_alpha, "Period multiplier used while searching")
      ->check(CLI::PositiveNumber);
  search->add_option("--seed", ga.seed, "Search seed");
  search->add_option("--population", ga.population, "Population size (even)");
  search->add_option("--generations", ga.max_generations, "Generation cap");
  search->add_option("--patience", ga.patience, "Generations without improvement before stopping");
  search->add_option("--crossover", ga.crossover, "Crossover probability");
  search->add_option("--priority-swap", ga.priority_swap, "Priority swap probability");
  search->add_option("--local-search", ga.local_search, "Local search probability");
  search->add_option("--requests", search_requests, "Requests per group per simulation")
      ->check(CLI::PositiveNumber);
  search->add_flag("--noiseless", search_noiseless, "Measure candidates without jitter");
  search->add_option("--jobs", ga.jobs, "Parallel evaluations")->check(CLI::PositiveNumber);
  search->add_option("--out", search_out, "Archive directory")->required();

  // baseline
  Inputs base_in;
  std::string kind_text;
  double base_alpha = 1.0;
  std::size_t base_requests = 20;
  std::string base_out;
  auto* baseline = app.add_subcommand("baseline", "Build an NPU Only or Best Mapping baseline");
  add_inputs(baseline, base_in, true);
  baseline->add_option("--kind", kind_text, "npu-only or best-mapping")
      ->required()
      ->check(CLI::IsMember({"npu-only", "best-mapping"}));
  baseline->add_option("--alpha", base_alpha, "Period multiplier for evaluation")
      ->check(CLI::PositiveNumber);
  baseline->add_option("--requests", base_requests, "Requests per group per simulation")
      ->check(CLI::PositiveNumber);
  baseline->add_option("--out", base_out, "Output directory")->required();

  // sweep
  Inputs sweep_in;
  std::vector<std::string> sweep_sets;
  std::string grid_text = "0.5:3.0:0.1";
  std::size_t sweep_requests = 20;
  std::uint64_t sweep_seed = 1;
  bool sweep_noiseless = false;
  std::size_t sweep_jobs = 1;
  std::string sweep_out;
  auto* sweep_cmd = app.add_subcommand("sweep", "Score solution sets across period multipliers");
  add_inputs(sweep_cmd, sweep_in, true);
  sweep_cmd->add_option("--solutions", sweep_sets,
                        "label=path of a solution file or archive directory (repeatable)")
      ->required();
  sweep_cmd->add_option("--grid", grid_text, "Multiplier grid min:max:step");
  sweep_cmd->add_option("--requests", sweep_requests, "Requests per group per simulation")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--seed", sweep_seed, "Noise seed");
  sweep_cmd->add_flag("--noiseless", sweep_noiseless, "Simulate without jitter");
  sweep_cmd->add_option("--jobs", sweep_jobs, "Parallel simulations")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--out", sweep_out, "Output directory")->required();

  // trace
  Inputs trace_in;
  std::string trace_solution, trace_out;
  double trace_alpha = 1.0;
  std::size_t trace_requests = 20;
  std::optional<std::uint64_t> trace_seed;
  auto* trace_cmd = app.add_subcommand("trace", "Simulate one solution and export its task trace");
  add_inputs(trace_cmd, trace_in, true);
  trace_cmd->add_option("--solution", trace_solution, "Solution JSON")
      ->required()
      ->check(CLI::ExistingFile);
  trace_cmd->add_option("--alpha", trace_alpha, "Period multiplier")->check(CLI::PositiveNumber);
  trace_cmd->add_option("--requests", trace_requests, "Requests per group")
      ->check(CLI::PositiveNumber);
  trace_cmd->add_option("--noise-seed", trace_seed, "Enable jitter with this seed");
  trace_cmd->add_option("--out", trace_out, "Trace CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : usage;
  }

  try {
    if (*init) {
      const fs::path dir = init_out;
      auto catalog = builtin_catalog();
      write_file(dir / "catalog.json", catalog_to_json(catalog));
      write_file(dir / "profile.json", profile_to_json(derive_profile(catalog, default_device())));
      out << "wrote " << (dir / "catalog.json").string() << " and "
          << (dir / "profile.json").string() << "\n";
    } else if (*scenario) {
      auto catalog = scen_in.catalog.empty() ? builtin_catalog() : load_catalog(scen_in.catalog);
      auto s = generate_scenario(catalog, n_groups, per_group, scen_seed);
      write_file(scen_out, scenario_to_json(s));
      out << "wrote " << scen_out << "\n";
    } else if (*search) {
      auto l = load_inputs(search_in);
      SearchTiers tiers;
      tiers.requests = search_requests;
      if (search_noiseless) tiers.measurement_noise.reset();
      auto result = run_ga(*l.workload, *l.cost, search_alpha, ga, tiers);
      auto members = result.archive.sorted();
      write_archive(search_out, members, *l.workload, *l.profile);
      write_manifest(search_out, "search", search_in,
                     {{"alpha", search_alpha},
                      {"seed", ga.seed},
                      {"population", ga.population},
                      {"max_generations", ga.max_generations},
                      {"patience", ga.patience},
                      {"crossover", ga.crossover},
                      {"priority_swap", ga.priority_swap},
                      {"local_search", ga.local_search},
                      {"requests", search_requests},
                      {"noise", !search_noiseless},
                      {"generations_run", result.generations},
                      {"archive_size", members.size()}});
      out << "archive of " << members.size() << " solutions after " << result.generations
          << " generations in " << search_out << "\n";
    } else if (*baseline) {
      const auto kind = parse_baseline(kind_text);
      auto l = load_inputs(base_in);
      SimulationEvaluator eval(*l.workload, *l.profile, sim_config(l, base_alpha, base_requests));
      std::vector<Candidate> members;
      if (kind == BaselineKind::npu_only) {
        Candidate c;
        c.solution = npu_only(*l.workload, *l.cost);
        c.chromosome = encode(c.solution, *l.workload);
        members = with_objectives({c}, eval);
      } else {
        members = best_mapping(*l.workload, *l.cost, eval);
      }
      write_archive(base_out, members, *l.workload, *l.profile);
      write_manifest(base_out, "baseline", base_in,
                     {{"kind", std::string(to_string(kind))},
                      {"alpha", base_alpha},
                      {"requests", base_requests},
                      {"solutions", members.size()}});
      out << to_string(kind) << ": " << members.size() << " solution(s) in " << base_out << "\n";
    } else if (*sweep_cmd) {
      SweepConfig config;
      config.grid = AlphaGrid::parse(grid_text);
      config.requests = sweep_requests;
      config.jobs = sweep_jobs;
      if (!sweep_noiseless) config.noise = NoiseConfig{sweep_seed};
      auto l = load_inputs(sweep_in);
      const fs::path dir = sweep_out;
      std::ostringstream summary;
      summary << "method,alpha_star\n";
      json sets = json::object();
      for (const auto& spec : sweep_sets) {
        const auto eq = spec.find('=');
        const std::string path = eq == std::string::npos ? spec : spec.substr(eq + 1);
        const std::string label =
            eq == std::string::npos ? fs::path(path).filename().string() : spec.substr(0, eq);
        if (label.empty() || path.empty())
          throw ValidationError("--solutions expects label=path, got '" + spec + "'");
        if (sets.contains(label)) throw ValidationError("duplicate label '" + label + "'");
        sets[label] = path;
        std::vector<Solution> solutions;
        for (auto& c : load_solutions(path, *l.workload, *l.cost))
          solutions.push_back(std::move(c.solution));
        auto rows = sweep(solutions, *l.workload, *l.cost, config);
        std::ostringstream csv;
        write_sweep_csv(csv, rows, *l.workload);
        write_file(dir / ("sweep_" + label + ".csv"), csv.str());
        const auto star = saturation_multiplier(rows);
        const auto text = star ? format_alpha(*star) : ">" + format_alpha(rows.back().alpha);
        summary << label << ',' << text << '\n';
        out << label << ": alpha* = " << text << "\n";
      }
      write_file(dir / "saturation.csv", summary.str());
      write_manifest(dir, "sweep", sweep_in,
                     {{"solutions", std::move(sets)},
                      {"grid", grid_text},
                      {"requests", sweep_requests},
                      {"noise", !sweep_noiseless},
                      {"seed", sweep_seed}});
    } else if (*trace_cmd) {
      auto l = load_inputs(trace_in);
      auto c = load_solutions(trace_solution, *l.workload, *l.cost).front();
      auto sim = sim_config(l, trace_alpha, trace_requests);
      if (trace_seed) sim.noise = NoiseConfig{*trace_seed};
      auto trace = simulate(c.solution, *l.workload, *l.profile, sim);
      std::ostringstream csv;
      write_trace_csv(csv, trace, *l.workload, *l.profile);
      write_file(trace_out, csv.str());
      auto report = score_trace(trace, *l.workload, sim.period_us);
      out << "score " << report.score << " over " << trace.tasks.size() << " tasks; wrote "
          << trace_out << "\n";
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return invalid_input;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return internal;
  }
  return ok;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"hetsched"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace hetsched::cli
