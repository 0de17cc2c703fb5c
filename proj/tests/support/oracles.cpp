#include "oracles.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>

namespace hetsched::testing {

namespace {

struct OJob {
  std::size_t lane = 0;
  std::array<std::size_t, 4> key{};
  double duration = 0.0;
  std::optional<double> host_ready;      // arrival + host transfer
  std::vector<std::pair<std::size_t, double>> deps;  // (job, transfer delay)
  std::size_t group = 0, request = 0;
  std::optional<double> output_delay;    // set on subgraphs returning output
  double arrival = 0.0;
};

bool dominated_by(const ObjectiveVector& a, const ObjectiveVector& b) {
  bool strict = false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (b[k] > a[k]) return false;
    if (b[k] < a[k]) strict = true;
  }
  return strict;
}

}  // namespace

ScheduleOracle exhaustive_schedule(const Solution& solution, const Workload& workload,
                                   const DeviceProfile& profile, std::size_t requests,
                                   const std::vector<double>& periods_us) {
  const auto n = workload.network_count();
  std::vector<std::size_t> rank(n);
  for (std::size_t r = 0; r < n; ++r) rank[solution.priority[r]] = r;

  std::vector<OJob> jobs;
  for (std::size_t g = 0; g < workload.group_count(); ++g) {
    for (std::size_t j = 0; j < requests; ++j) {
      const double arrival = static_cast<double>(j) * periods_us[g];
      for (auto m : workload.members(g)) {
        const auto& graph = workload.network(m);
        const auto& plan = solution.networks[m];
        const auto& sub = plan.partition.subgraph_of;
        const auto count = plan.partition.subgraphs.size();
        const auto first = jobs.size();
        for (std::size_t s = 0; s < count; ++s) {
          OJob job;
          job.lane = plan.processor[s] * 2;
          job.key = {rank[m], j, s, 0};
          job.duration = plan.time_us[s];
          job.group = g;
          job.request = j;
          job.arrival = arrival;
          bool source = false, sink = false;
          for (std::size_t l = 0; l < graph.layer_count(); ++l) {
            if (sub[l] != s) continue;
            source = source || graph.in_edges(l).empty();
            sink = sink || graph.out_edges(l).empty();
          }
          if (source)
            job.host_ready =
                arrival + comm_cost(graph.input_bytes(), profile.host, plan.processor[s], profile.comm);
          if (sink)
            job.output_delay = comm_cost(graph.output_bytes(), plan.processor[s], profile.host, profile.comm);
          jobs.push_back(job);
        }
        for (std::size_t s = 0; s < count; ++s) {
          std::map<std::size_t, std::uint64_t> bytes;
          for (const auto& e : graph.edges())
            if (sub[e.dst] == s && sub[e.src] != s) bytes[sub[e.src]] += e.tensor_bytes;
          for (auto [q, b] : bytes) {
            const double delay = comm_cost(b, plan.processor[q], plan.processor[s], profile.comm);
            const bool convert =
                profile.configs[plan.config[q]].dtype != profile.configs[plan.config[s]].dtype;
            if (!convert) {
              jobs[first + s].deps.push_back({first + q, delay});
              continue;
            }
            OJob quant;
            quant.lane = plan.processor[s] * 2 + 1;
            quant.key = {rank[m], j, s, q};
            quant.duration = static_cast<double>(b) / profile.quant_throughput_bytes_per_us;
            quant.deps.push_back({first + q, delay});
            quant.group = g;
            quant.request = j;
            quant.arrival = arrival;
            jobs.push_back(quant);
            jobs[first + s].deps.push_back({jobs.size() - 1, 0.0});
          }
        }
      }
    }
  }

  std::map<std::size_t, std::vector<std::size_t>> lanes;
  for (std::size_t i = 0; i < jobs.size(); ++i) lanes[jobs[i].lane].push_back(i);
  std::vector<std::vector<std::size_t>> orders;
  for (auto& [lane, members] : lanes) {
    std::sort(members.begin(), members.end());
    orders.push_back(members);
  }

  ScheduleOracle result;
  std::optional<std::vector<std::vector<double>>> answer;
  const double inf = std::numeric_limits<double>::infinity();

  auto evaluate = [&]() {
    ++result.orderings;
    std::vector<std::size_t> lane_pred(jobs.size(), jobs.size());
    for (const auto& order : orders)
      for (std::size_t k = 1; k < order.size(); ++k) lane_pred[order[k]] = order[k - 1];
    std::vector<double> ready(jobs.size(), inf), start(jobs.size(), inf), finish(jobs.size(), inf);
    std::vector<bool> done(jobs.size(), false);
    for (bool progress = true; progress;) {
      progress = false;
      for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (done[i]) continue;
        const auto& job = jobs[i];
        bool blocked = lane_pred[i] != jobs.size() && !done[lane_pred[i]];
        for (auto [d, delay] : job.deps) blocked = blocked || !done[d];
        if (blocked) continue;
        double r = job.host_ready.value_or(-inf);
        for (auto [d, delay] : job.deps) r = std::max(r, finish[d] + delay);
        ready[i] = r;
        start[i] = lane_pred[i] == jobs.size() ? r : std::max(r, finish[lane_pred[i]]);
        finish[i] = start[i] + job.duration;
        done[i] = true;
        progress = true;
      }
    }
    if (std::find(done.begin(), done.end(), false) != done.end()) return;  // ordering deadlocks

    for (const auto& order : orders) {
      double free_at = 0.0;
      for (std::size_t k = 0; k < order.size(); ++k) {
        double earliest = inf;
        for (std::size_t r = k; r < order.size(); ++r) earliest = std::min(earliest, ready[order[r]]);
        const double decision = std::max(free_at, earliest);
        const auto chosen = order[k];
        if (start[chosen] != decision) return;
        for (std::size_t r = k + 1; r < order.size(); ++r)
          if (ready[order[r]] <= decision && jobs[order[r]].key < jobs[chosen].key) return;
        free_at = finish[chosen];
      }
    }

    ++result.consistent;
    std::vector<std::vector<double>> theta(workload.group_count(),
                                           std::vector<double>(requests, -inf));
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      const auto& job = jobs[i];
      if (!job.output_delay) continue;
      auto& t = theta[job.group][job.request];
      t = std::max(t, finish[i] + *job.output_delay - job.arrival);
    }
    answer = theta;
  };

  auto recurse = [&](auto&& self, std::size_t lane) -> void {
    if (lane == orders.size()) {
      evaluate();
      return;
    }
    auto& order = orders[lane];
    std::sort(order.begin(), order.end());
    do {
      self(self, lane + 1);
    } while (std::next_permutation(order.begin(), order.end()));
  };
  recurse(recurse, 0);

  if (!answer) throw std::logic_error("no dispatcher-consistent ordering exists");
  result.makespans = std::move(*answer);
  return result;
}

std::vector<ObjectiveVector> pareto_filter(std::vector<ObjectiveVector> points) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  std::vector<ObjectiveVector> front;
  for (const auto& p : points) {
    bool beaten = false;
    for (const auto& q : points) beaten = beaten || dominated_by(p, q);
    if (!beaten) front.push_back(p);
  }
  return front;
}

BruteForceFront brute_force_front(const Workload& workload, const CostModel& cost,
                                  const SimConfig& sim) {
  if (workload.network_count() != 1) throw std::invalid_argument("single network expected");
  const auto& graph = workload.network(0);
  const auto edges = graph.edge_count();
  const auto layers = graph.layer_count();
  const auto processors = cost.profile().processors.size();
  std::size_t mappings = 1;
  for (std::size_t l = 0; l < layers; ++l) mappings *= processors;

  BruteForceFront out;
  for (std::size_t cut = 0; cut < (std::size_t{1} << edges); ++cut) {
    for (std::size_t code = 0; code < mappings; ++code) {
      Chromosome c;
      c.priority = {0};
      c.partition.emplace_back(edges);
      for (std::size_t e = 0; e < edges; ++e) c.partition[0][e] = (cut >> e) & 1;
      c.mapping.emplace_back(layers);
      auto rest = code;
      for (std::size_t l = 0; l < layers; ++l) {
        c.mapping[0][l] = static_cast<std::uint16_t>(rest % processors);
        rest /= processors;
      }
      auto solution = decode(c, workload, cost);
      out.all.push_back(evaluate_objectives(simulate(solution, workload, cost.profile(), sim), workload));
    }
  }
  out.front = pareto_filter(out.all);
  return out;
}

}  // namespace hetsched::testing
