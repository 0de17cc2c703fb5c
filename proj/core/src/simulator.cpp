#include "hetsched/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <ostream>
#include <queue>
#include <tuple>

#include "hetsched/error.hpp"
#include "hetsched/merkle.hpp"
#include "hetsched/metrics.hpp"
#include "random.hpp"
#include "text.hpp"

namespace hetsched {

namespace {

void check_priority(const std::vector<std::size_t>& priority, std::size_t n) {
  if (priority.size() != n)
    throw ValidationError("priority lists " + std::to_string(priority.size()) +
                          " networks, expected " + std::to_string(n));
  std::vector<bool> seen(n, false);
  for (auto m : priority) {
    if (m >= n || seen[m]) throw ValidationError("priority is not a permutation");
    seen[m] = true;
  }
}

}  // namespace

Solution build_solution(const Workload& workload, const CostModel& cost,
                        std::vector<PartitionedNetwork> partitions,
                        const std::vector<std::vector<std::size_t>>& processors,
                        std::vector<std::size_t> priority) {
  const auto n = workload.network_count();
  if (partitions.size() != n || processors.size() != n)
    throw ValidationError("solution must cover every network of the workload");
  check_priority(priority, n);
  Solution solution;
  solution.priority = std::move(priority);
  solution.networks.reserve(n);
  for (std::size_t m = 0; m < n; ++m) {
    const auto& graph = workload.network(m);
    NetworkPlan plan;
    plan.partition = std::move(partitions[m]);
    if (plan.partition.network != graph.name())
      throw ValidationError("partition of '" + plan.partition.network + "' given for '" +
                            graph.name() + "'");
    const auto count = plan.partition.subgraphs.size();
    if (processors[m].size() != count)
      throw ValidationError("mapping of '" + graph.name() + "' does not cover every subgraph");
    plan.processor = processors[m];
    for (std::size_t s = 0; s < count; ++s) {
      if (plan.processor[s] >= cost.profile().processors.size())
        throw ValidationError("processor index out of range");
      const auto& sg = plan.partition.subgraphs[s];
      auto choice = cost.best_config(graph, sg, subgraph_hash(sg, graph), plan.processor[s]);
      plan.config.push_back(choice.config);
      plan.time_us.push_back(choice.time_us);
    }
    solution.networks.push_back(std::move(plan));
  }
  return solution;
}

void check_solution(const Solution& solution, const Workload& workload,
                    const DeviceProfile& profile) {
  const auto n = workload.network_count();
  if (solution.networks.size() != n)
    throw ValidationError("solution has " + std::to_string(solution.networks.size()) +
                          " networks, workload has " + std::to_string(n));
  check_priority(solution.priority, n);
  for (std::size_t m = 0; m < n; ++m) {
    const auto& plan = solution.networks[m];
    const auto& graph = workload.network(m);
    if (plan.partition.network != graph.name())
      throw ValidationError("network " + std::to_string(m) + " of the solution is '" +
                            plan.partition.network + "', expected '" + graph.name() + "'");
    const auto count = plan.partition.subgraphs.size();
    if (count == 0 || plan.partition.subgraph_of.size() != graph.layer_count())
      throw ValidationError("partition of '" + graph.name() + "' does not cover its layers");
    if (plan.processor.size() != count || plan.config.size() != count ||
        plan.time_us.size() != count)
      throw ValidationError("plan of '" + graph.name() + "' is incomplete");
    for (std::size_t s = 0; s < count; ++s) {
      if (plan.processor[s] >= profile.processors.size() ||
          plan.config[s] >= profile.configs.size() ||
          profile.configs[plan.config[s]].processor != plan.processor[s])
        throw ValidationError("subgraph " + std::to_string(s) + " of '" + graph.name() +
                              "' has an inconsistent processor/config");
      if (!(plan.time_us[s] > 0.0))
        throw ValidationError("subgraph " + std::to_string(s) + " of '" + graph.name() +
                              "' is unpriced");
    }
  }
}

using detail::splitmix64;
using detail::unit_open;

double noise_factor(const NoiseConfig& noise, double sigma, std::size_t group,
                    std::size_t request, std::size_t network, std::size_t subgraph) {
  if (sigma == 0.0) return 1.0;
  std::uint64_t h = splitmix64(noise.seed);
  for (std::uint64_t v : {group, request, network, subgraph}) h = splitmix64(h ^ splitmix64(v));
  const double u1 = unit_open(h);
  const double u2 = unit_open(splitmix64(h));
  const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  return std::exp(sigma * z - 0.5 * sigma * sigma);
}

namespace {

enum class Lane : std::size_t { exec = 0, quant = 1 };

struct Delivery {
  std::size_t job;
  double delay;
};

struct Job {
  std::size_t processor = 0;
  Lane lane = Lane::exec;
  std::array<std::size_t, 4> key{};  // priority rank, request, subgraph, producer
  double duration = 0.0;
  std::size_t pending = 0;
  std::vector<Delivery> outputs;
  double host_output_delay = -1.0;  // >= 0 on subgraphs returning output
  std::size_t record = 0;           // index into trace.tasks (exec) or unused
  std::size_t request_record = 0;
  double ready = 0.0;
};

enum class EventKind { input, finish };

struct Event {
  double time;
  std::uint64_t seq;
  EventKind kind;
  std::size_t job;
  bool operator>(const Event& o) const { return std::tie(time, seq) > std::tie(o.time, o.seq); }
};

struct Queued {
  std::array<std::size_t, 4> key;
  std::size_t job;
  bool operator>(const Queued& o) const { return std::tie(key, job) > std::tie(o.key, o.job); }
};

using ReadyQueue = std::priority_queue<Queued, std::vector<Queued>, std::greater<>>;

}  // namespace

Trace simulate(const Solution& solution, const Workload& workload, const DeviceProfile& profile,
               const SimConfig& config) {
  check_solution(solution, workload, profile);
  if (config.requests == 0) throw ValidationError("simulation needs at least one request");
  if (config.period_us.size() != workload.group_count())
    throw ValidationError("simulation needs one period per group");
  for (double p : config.period_us)
    if (!(p > 0.0)) throw ValidationError("periods must be positive");
  if (config.noise && (config.noise->sigma_cpu < 0.0 || config.noise->sigma_other < 0.0))
    throw ValidationError("noise sigma must be non-negative");

  const auto n = workload.network_count();
  const auto host = profile.host;
  std::vector<std::size_t> rank(n);
  for (std::size_t r = 0; r < n; ++r) rank[solution.priority[r]] = r;

  std::vector<std::vector<std::vector<QuotientInput>>> inputs(n);
  for (std::size_t m = 0; m < n; ++m) {
    const auto& pn = solution.networks[m].partition;
    for (std::size_t s = 0; s < pn.subgraphs.size(); ++s)
      inputs[m].push_back(pn.inputs_of(s, workload.network(m)));
  }

  Trace trace;
  std::vector<Job> jobs;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events;
  std::uint64_t seq = 0;
  auto push = [&](double time, EventKind kind, std::size_t job) {
    events.push({time, seq++, kind, job});
  };

  for (std::size_t g = 0; g < workload.group_count(); ++g) {
    for (std::size_t j = 0; j < config.requests; ++j) {
      const double arrival = static_cast<double>(j) * config.period_us[g];
      for (auto m : workload.members(g)) {
        const auto& graph = workload.network(m);
        const auto& plan = solution.networks[m];
        const auto& pn = plan.partition;
        const auto first = jobs.size();
        const auto request_record = trace.requests.size();
        trace.requests.push_back({g, j, m, arrival, arrival});
        for (std::size_t s = 0; s < pn.subgraphs.size(); ++s) {
          const auto p = plan.processor[s];
          Job job;
          job.processor = p;
          job.key = {rank[m], j, s, 0};
          std::uint64_t in_bytes = 0;
          if (pn.takes_host_input(s)) {
            in_bytes += graph.input_bytes();
            ++job.pending;
          }
          for (const auto& in : inputs[m][s]) in_bytes += in.bytes;
          job.pending += inputs[m][s].size();
          double factor = 1.0;
          if (config.noise) {
            const double sigma =
                profile.processors[p] == "CPU" ? config.noise->sigma_cpu : config.noise->sigma_other;
            factor = noise_factor(*config.noise, sigma, g, j, m, s);
          }
          job.duration = plan.time_us[s] * factor + config.alloc_overhead_us +
                         config.copy_overhead_us_per_mib * (static_cast<double>(in_bytes) / kMiB);
          if (pn.sends_host_output(s))
            job.host_output_delay = comm_cost(graph.output_bytes(), p, host, profile.comm);
          job.record = trace.tasks.size();
          job.request_record = request_record;
          trace.tasks.push_back({g, j, m, s, p, 0.0, 0.0, 0.0, arrival});
          jobs.push_back(std::move(job));
          if (pn.takes_host_input(s))
            push(arrival + comm_cost(graph.input_bytes(), host, p, profile.comm), EventKind::input,
                 jobs.size() - 1);
        }
        for (std::size_t s = 0; s < pn.subgraphs.size(); ++s) {
          const auto consumer = first + s;
          const auto p = plan.processor[s];
          const auto dtype = profile.configs[plan.config[s]].dtype;
          for (const auto& in : inputs[m][s]) {
            const auto producer = first + in.producer;
            const auto q = plan.processor[in.producer];
            const double delay = comm_cost(in.bytes, q, p, profile.comm);
            if (profile.configs[plan.config[in.producer]].dtype == dtype) {
              jobs[producer].outputs.push_back({consumer, delay});
              continue;
            }
            Job convert;
            convert.processor = p;
            convert.lane = Lane::quant;
            convert.key = {rank[m], j, s, in.producer};
            convert.duration = static_cast<double>(in.bytes) / profile.quant_throughput_bytes_per_us;
            convert.pending = 1;
            convert.outputs.push_back({consumer, 0.0});
            convert.record = kHost;
            jobs[producer].outputs.push_back({jobs.size(), delay});
            jobs.push_back(std::move(convert));
          }
        }
      }
    }
  }

  const auto lanes = profile.processors.size() * 2;
  std::vector<ReadyQueue> ready(lanes);
  std::vector<bool> busy(lanes, false);
  auto lane_of = [](const Job& job) {
    return job.processor * 2 + static_cast<std::size_t>(job.lane);
  };

  while (!events.empty()) {
    const double now = events.top().time;
    while (!events.empty() && events.top().time == now) {
      const Event ev = events.top();
      events.pop();
      auto& job = jobs[ev.job];
      if (ev.kind == EventKind::input) {
        if (--job.pending == 0) {
          job.ready = now;
          ready[lane_of(job)].push({job.key, ev.job});
        }
        continue;
      }
      busy[lane_of(job)] = false;
      for (const auto& out : job.outputs) push(now + out.delay, EventKind::input, out.job);
      if (job.host_output_delay >= 0.0) {
        auto& req = trace.requests[job.request_record];
        req.finish = std::max(req.finish, now + job.host_output_delay);
      }
    }
    for (std::size_t lane = 0; lane < lanes; ++lane) {
      if (busy[lane] || ready[lane].empty()) continue;
      const auto id = ready[lane].top().job;
      ready[lane].pop();
      busy[lane] = true;
      auto& job = jobs[id];
      const double finish = now + job.duration;
      if (job.record != kHost) {
        auto& rec = trace.tasks[job.record];
        rec.ready = job.ready;
        rec.start = now;
        rec.finish = finish;
      }
      push(finish, EventKind::finish, id);
    }
  }

  for (const auto& job : jobs)
    if (job.pending != 0) throw std::logic_error("simulation ended with unresolved inputs");
  return trace;
}

ObjectiveVector evaluate_objectives(const Trace& trace, const Workload& workload) {
  if (trace.requests.empty()) throw ValidationError("cannot evaluate an empty trace");
  ObjectiveVector out;
  out.reserve(2 * workload.group_count());
  for (std::size_t g = 0; g < workload.group_count(); ++g) {
    auto theta = makespans(trace, workload, g);
    out.push_back(mean(theta));
    out.push_back(nearest_rank(theta, 0.9));
  }
  return out;
}

void write_trace_csv(std::ostream& out, const Trace& trace, const Workload& workload,
                     const DeviceProfile& profile) {
  using detail::format_double;
  out << "group,request,network,subgraph,processor,ready,start,finish,arrival\n";
  for (const auto& t : trace.tasks) {
    out << workload.scenario().groups[t.group].id << ',' << t.request << ','
        << workload.network(t.network).name() << ',' << t.subgraph << ','
        << profile.processors[t.processor] << ',' << format_double(t.ready) << ','
        << format_double(t.start) << ',' << format_double(t.finish) << ','
        << format_double(t.arrival) << '\n';
  }
}

}  // namespace hetsched
