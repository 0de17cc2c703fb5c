#include "hetsched/io.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hetsched/error.hpp"
#include "text.hpp"

namespace hetsched {

using json = nlohmann::ordered_json;
using detail::format_double;

namespace {

template <class Fn>
auto parse_with(const std::string& text, const char* what, Fn fn) {
  try {
    return fn(json::parse(text));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed ") + what + ": " + e.what());
  }
}

json network_json(const NetworkDescription& d) {
  json layers = json::array();
  for (const auto& l : d.layers)
    layers.push_back({{"id", l.id},
                      {"op_kind", l.op_kind},
                      {"param_bytes", l.param_bytes},
                      {"mac_count", l.mac_count}});
  json edges = json::array();
  for (const auto& e : d.edges)
    edges.push_back({{"src", e.src_layer}, {"dst", e.dst_layer}, {"tensor_bytes", e.tensor_bytes}});
  return {{"name", d.name},
          {"input_bytes", d.input_bytes},
          {"output_bytes", d.output_bytes},
          {"layers", std::move(layers)},
          {"edges", std::move(edges)}};
}

NetworkDescription network_of(const json& j) {
  NetworkDescription d;
  d.name = j.at("name").get<std::string>();
  d.input_bytes = j.value("input_bytes", std::uint64_t{0});
  d.output_bytes = j.value("output_bytes", std::uint64_t{0});
  for (const auto& l : j.at("layers"))
    d.layers.push_back({l.at("id").get<std::int64_t>(), l.value("op_kind", std::string{}),
                        l.value("param_bytes", std::uint64_t{0}),
                        l.value("mac_count", std::uint64_t{0})});
  for (const auto& e : j.at("edges"))
    d.edges.push_back({e.at("src").get<std::int64_t>(), e.at("dst").get<std::int64_t>(),
                       e.at("tensor_bytes").get<std::uint64_t>()});
  return d;
}

json scenario_json(const Scenario& s) {
  json groups = json::array();
  for (const auto& g : s.groups) groups.push_back({{"id", g.id}, {"networks", g.networks}});
  return {{"catalog", s.catalog_ref}, {"seed", s.seed}, {"groups", std::move(groups)}};
}

}  // namespace

std::string network_to_json(const NetworkDescription& network) {
  return network_json(network).dump(2) + "\n";
}

NetworkDescription network_from_json(const std::string& text) {
  return parse_with(text, "network", network_of);
}

std::string catalog_to_json(const Catalog& catalog) {
  json networks = json::array();
  for (const auto& e : catalog.entries) {
    auto n = network_json(e.graph->description());
    json seeds = json::object();
    for (const auto& [key, t] : e.seed_costs_us) seeds[key] = t;
    n["seed_costs_us"] = std::move(seeds);
    networks.push_back(std::move(n));
  }
  return json{{"id", catalog.id}, {"networks", std::move(networks)}}.dump(2) + "\n";
}

Catalog catalog_from_json(const std::string& text) {
  return parse_with(text, "catalog", [](const json& j) {
    Catalog c;
    c.id = j.value("id", std::string{"catalog"});
    for (const auto& n : j.at("networks")) {
      CatalogEntry e;
      e.graph = std::make_shared<const NetworkGraph>(network_of(n));
      if (n.contains("seed_costs_us"))
        for (const auto& [key, t] : n.at("seed_costs_us").items())
          e.seed_costs_us[key] = t.get<double>();
      c.entries.push_back(std::move(e));
    }
    if (c.entries.empty()) throw ValidationError("catalog lists no networks");
    return c;
  });
}

std::string profile_to_json(const DeviceProfile& p) {
  json configs = json::array();
  for (const auto& c : p.configs)
    configs.push_back({{"processor", p.processors.at(c.processor)},
                       {"backend", c.backend},
                       {"dtype", std::string(to_string(c.dtype))}});
  json nonlin = json::object();
  for (std::size_t i = 0; i < p.processors.size(); ++i)
    nonlin[p.processors[i]] = {{"launch_us", p.nonlin.at(i).launch_us},
                               {"dispatch_us", p.nonlin.at(i).dispatch_us},
                               {"rho_inf", p.nonlin.at(i).rho_inf}};
  auto line = [](const RpcLine& l) {
    return json{{"slope_us_per_mib", l.slope_us_per_mib}, {"intercept_us", l.intercept_us}};
  };
  json costs = json::object();
  for (const auto& [network, per_config] : p.layer_costs) {
    json entry = json::object();
    for (std::size_t c = 0; c < per_config.size(); ++c)
      if (!per_config[c].empty()) entry[p.config_key(c)] = per_config[c];
    costs[network] = std::move(entry);
  }
  json j{{"processors", p.processors},
         {"host", p.processors.at(p.host)},
         {"configs", std::move(configs)},
         {"nonlinearity", std::move(nonlin)},
         {"comm",
          {{"bandwidth_bytes_per_s", p.comm.bandwidth_bytes_per_s},
           {"rpc_small", line(p.comm.rpc_small)},
           {"rpc_large", line(p.comm.rpc_large)}}},
         {"quant_throughput_bytes_per_us", p.quant_throughput_bytes_per_us},
         {"layer_costs", std::move(costs)}};
  return j.dump(2) + "\n";
}

DeviceProfile profile_from_json(const std::string& text) {
  return parse_with(text, "device profile", [](const json& j) {
    DeviceProfile p;
    p.processors = j.at("processors").get<std::vector<std::string>>();
    p.host = p.processor_index(j.value("host", p.processors.empty() ? "" : p.processors.front()));
    for (const auto& c : j.at("configs"))
      p.configs.push_back({p.processor_index(c.at("processor").get<std::string>()),
                           c.at("backend").get<std::string>(),
                           parse_dtype(c.at("dtype").get<std::string>())});
    for (const auto& name : p.processors) {
      auto params = default_nonlinearity(name);
      if (j.contains("nonlinearity") && j.at("nonlinearity").contains(name)) {
        const auto& n = j.at("nonlinearity").at(name);
        params.launch_us = n.value("launch_us", params.launch_us);
        params.dispatch_us = n.value("dispatch_us", params.dispatch_us);
        params.rho_inf = n.value("rho_inf", params.rho_inf);
      }
      p.nonlin.push_back(params);
    }
    if (j.contains("comm")) {
      const auto& c = j.at("comm");
      p.comm.bandwidth_bytes_per_s = c.value("bandwidth_bytes_per_s", p.comm.bandwidth_bytes_per_s);
      auto line = [&](const char* key, RpcLine& l) {
        if (!c.contains(key)) return;
        l.slope_us_per_mib = c.at(key).value("slope_us_per_mib", l.slope_us_per_mib);
        l.intercept_us = c.at(key).value("intercept_us", l.intercept_us);
      };
      line("rpc_small", p.comm.rpc_small);
      line("rpc_large", p.comm.rpc_large);
    }
    p.quant_throughput_bytes_per_us =
        j.value("quant_throughput_bytes_per_us", p.quant_throughput_bytes_per_us);
    if (j.contains("layer_costs")) {
      for (const auto& [network, entry] : j.at("layer_costs").items()) {
        std::vector<std::vector<double>> per_config(p.configs.size());
        for (const auto& [key, times] : entry.items()) {
          std::size_t c = 0;
          while (c < p.configs.size() && p.config_key(c) != key) ++c;
          if (c == p.configs.size())
            throw ValidationError("layer costs of '" + network + "' name unknown config " + key);
          per_config[c] = times.get<std::vector<double>>();
        }
        p.layer_costs[network] = std::move(per_config);
      }
    }
    p.validate();
    return p;
  });
}

std::string scenario_to_json(const Scenario& scenario) {
  return scenario_json(scenario).dump(2) + "\n";
}

Scenario scenario_from_json(const std::string& text) {
  return parse_with(text, "scenario", [](const json& j) {
    Scenario s;
    s.catalog_ref = j.value("catalog", std::string{});
    s.seed = j.value("seed", std::uint64_t{0});
    for (const auto& g : j.at("groups"))
      s.groups.push_back({g.at("id").get<int>(), g.at("networks").get<std::vector<std::string>>()});
    s.validate();
    return s;
  });
}

std::string solution_to_json(const Candidate& candidate, const Workload& workload,
                             const DeviceProfile& profile) {
  const auto& c = candidate.chromosome;
  json networks = json::array();
  for (std::size_t m = 0; m < workload.network_count(); ++m) {
    const auto& graph = workload.network(m);
    const auto& plan = candidate.solution.networks.at(m);
    json subgraphs = json::array();
    for (std::size_t s = 0; s < plan.partition.subgraphs.size(); ++s) {
      std::vector<std::int64_t> ids;
      for (auto l : plan.partition.subgraphs[s].layers) ids.push_back(graph.layers()[l].id);
      subgraphs.push_back({{"layers", ids},
                           {"processor", profile.processors.at(plan.processor[s])},
                           {"config", profile.config_key(plan.config[s])},
                           {"time_us", plan.time_us[s]}});
    }
    networks.push_back({{"name", graph.name()},
                        {"partition", c.partition.at(m)},
                        {"mapping", c.mapping.at(m)},
                        {"subgraphs", std::move(subgraphs)}});
  }
  std::vector<std::string> priority;
  for (auto m : c.priority) priority.push_back(workload.network(m).name());
  json j{{"networks", std::move(networks)}, {"priority", priority}};
  if (!candidate.objectives.empty()) j["objectives"] = candidate.objectives;
  return j.dump(2) + "\n";
}

Candidate solution_from_json(const std::string& text, const Workload& workload,
                             const CostModel& cost) {
  return parse_with(text, "solution", [&](const json& j) {
    Candidate cand;
    auto& c = cand.chromosome;
    const auto n = workload.network_count();
    c.partition.resize(n);
    c.mapping.resize(n);
    std::vector<bool> seen(n, false);
    for (const auto& net : j.at("networks")) {
      const auto m = workload.index_of(net.at("name").get<std::string>());
      if (seen[m]) throw ValidationError("network listed twice in solution");
      seen[m] = true;
      c.partition[m] = net.at("partition").get<std::vector<std::uint8_t>>();
      c.mapping[m] = net.at("mapping").get<std::vector<std::uint16_t>>();
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end())
      throw ValidationError("solution does not cover every network of the scenario");
    for (const auto& name : j.at("priority")) c.priority.push_back(workload.index_of(name));
    cand.solution = decode(c, workload, cost);
    if (j.contains("objectives")) cand.objectives = j.at("objectives").get<std::vector<double>>();
    return cand;
  });
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << content;
    if (!out.flush()) throw ValidationError("cannot write " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

namespace {

template <class T, class Fn>
T load(const std::filesystem::path& path, Fn fn) {
  auto text = read_file(path);
  try {
    return fn(text);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

}  // namespace

Catalog load_catalog(const std::filesystem::path& path) {
  return load<Catalog>(path, catalog_from_json);
}

DeviceProfile load_profile(const std::filesystem::path& path) {
  return load<DeviceProfile>(path, profile_from_json);
}

Scenario load_scenario(const std::filesystem::path& path) {
  return load<Scenario>(path, scenario_from_json);
}

void write_archive(const std::filesystem::path& dir, std::span<const Candidate> members,
                   const Workload& workload, const DeviceProfile& profile) {
  std::filesystem::create_directories(dir);
  std::ostringstream index;
  index << "file,subgraphs";
  for (const auto& g : workload.scenario().groups)
    index << ",avg_makespan_g" << g.id << ",p90_makespan_g" << g.id;
  index << '\n';
  for (std::size_t i = 0; i < members.size(); ++i) {
    auto digits = std::to_string(i);
    const auto name = "solution_" + std::string(digits.size() < 3 ? 3 - digits.size() : 0, '0') +
                      digits + ".json";
    write_file(dir / name, solution_to_json(members[i], workload, profile));
    std::size_t subgraphs = 0;
    for (const auto& plan : members[i].solution.networks) subgraphs += plan.partition.subgraphs.size();
    index << name << ',' << subgraphs;
    for (double v : members[i].objectives) index << ',' << format_double(v);
    index << '\n';
  }
  write_file(dir / "index.csv", index.str());
}

std::vector<Candidate> load_solutions(const std::filesystem::path& path,
                                      const Workload& workload, const CostModel& cost) {
  std::vector<std::filesystem::path> files;
  if (std::filesystem::is_directory(path)) {
    for (const auto& entry : std::filesystem::directory_iterator(path)) {
      const auto name = entry.path().filename().string();
      if (name.rfind("solution_", 0) == 0 && entry.path().extension() == ".json")
        files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ValidationError("no solution_*.json files in " + path.string());
  } else {
    files.push_back(path);
  }
  std::vector<Candidate> out;
  for (const auto& f : files)
    out.push_back(load<Candidate>(f, [&](const std::string& text) {
      return solution_from_json(text, workload, cost);
    }));
  return out;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows, const Workload& workload) {
  out << "alpha,score_median,score_min,score_max";
  for (const auto& g : workload.scenario().groups)
    out << ",avg_makespan_median_g" << g.id << ",p90_makespan_median_g" << g.id;
  out << '\n';
  for (const auto& r : rows) {
    out << format_double(r.alpha) << ',' << format_double(r.score_median) << ','
        << format_double(r.score_min) << ',' << format_double(r.score_max);
    for (std::size_t g = 0; g < r.avg_makespan_median.size(); ++g)
      out << ',' << format_double(r.avg_makespan_median[g]) << ','
          << format_double(r.p90_makespan_median[g]);
    out << '\n';
  }
}

}  // namespace hetsched
