#include "hetsched/optimizer.hpp"

#include <algorithm>
#include <exception>
#include <numeric>
#include <thread>

#include "hetsched/error.hpp"
#include "hetsched/metrics.hpp"
#include "random.hpp"

namespace hetsched {

using detail::uniform01;
using detail::uniform_index;

SimulationEvaluator::SimulationEvaluator(const Workload& workload, const DeviceProfile& profile,
                                         SimConfig config)
    : workload_(workload), profile_(profile), config_(std::move(config)) {}

ObjectiveVector SimulationEvaluator::evaluate(const Solution& solution,
                                              std::uint64_t stream) const {
  if (!config_.noise) return evaluate_objectives(simulate(solution, workload_, profile_, config_), workload_);
  SimConfig c = config_;
  c.noise->seed = detail::mix_seed(config_.noise->seed, stream);
  return evaluate_objectives(simulate(solution, workload_, profile_, c), workload_);
}

bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
  bool strict = false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] > b[k]) return false;
    if (a[k] < b[k]) strict = true;
  }
  return strict;
}

bool ParetoArchive::insert(const Candidate& candidate) {
  for (const auto& m : members_)
    if (m.objectives == candidate.objectives || dominates(m.objectives, candidate.objectives))
      return false;
  std::erase_if(members_, [&](const Candidate& m) {
    return dominates(candidate.objectives, m.objectives);
  });
  members_.push_back(candidate);
  return true;
}

std::vector<Candidate> ParetoArchive::sorted() const {
  auto out = members_;
  std::sort(out.begin(), out.end(),
            [](const Candidate& a, const Candidate& b) { return a.objectives < b.objectives; });
  return out;
}

void GAConfig::validate() const {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (population < 2 || population % 2) throw ValidationError("population must be even and >= 2");
  if (!prob(crossover) || !prob(priority_swap) || !prob(local_search) || !prob(upmx_indpb) ||
      (partition_flip && !prob(*partition_flip)) || (mapping_reset && !prob(*mapping_reset)))
    throw ValidationError("probabilities must lie in [0, 1]");
  if (patience == 0) throw ValidationError("patience must be at least 1");
  if (min_improvement < 0.0) throw ValidationError("minimum improvement must be non-negative");
}

std::vector<Chromosome> init_population(const Workload& workload, const CostModel& cost,
                                        const GAConfig& config, std::mt19937_64& rng) {
  config.validate();
  const auto& profile = cost.profile();
  const auto processors = profile.processors.size();
  std::vector<Chromosome> population;
  if (config.inject_seeds) {
    population.push_back(
        unpartitioned(workload, fastest_processors(workload, cost), workload.catalog_order()));
    if (profile.has_processor("NPU")) {
      std::vector<std::size_t> npu(workload.network_count(), profile.processor_index("NPU"));
      population.push_back(unpartitioned(workload, npu, workload.catalog_order()));
    }
  }
  while (population.size() < config.population) {
    Chromosome c;
    for (std::size_t m = 0; m < workload.network_count(); ++m) {
      const auto& graph = workload.network(m);
      std::vector<std::uint8_t> bits(graph.edge_count());
      for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1);
      std::vector<std::uint16_t> genes(graph.layer_count());
      for (auto& g : genes) g = static_cast<std::uint16_t>(uniform_index(rng, processors));
      c.partition.push_back(std::move(bits));
      c.mapping.push_back(std::move(genes));
    }
    c.priority.resize(workload.network_count());
    std::iota(c.priority.begin(), c.priority.end(), 0);
    detail::shuffle(c.priority, rng);
    population.push_back(std::move(c));
  }
  population.resize(config.population);
  return population;
}

void upmx(std::vector<std::size_t>& a, std::vector<std::size_t>& b, double indpb,
          std::mt19937_64& rng) {
  const auto n = std::min(a.size(), b.size());
  std::vector<std::size_t> pa(n), pb(n);
  for (std::size_t i = 0; i < n; ++i) {
    pa[a[i]] = i;
    pb[b[i]] = i;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (uniform01(rng) >= indpb) continue;
    const auto x = a[i], y = b[i];
    a[i] = y;
    a[pa[y]] = x;
    b[i] = x;
    b[pb[x]] = y;
    std::swap(pa[x], pa[y]);
    std::swap(pb[x], pb[y]);
  }
}

namespace {

template <class T>
void cross(std::vector<T>& a, std::vector<T>& b, std::mt19937_64& rng) {
  if (a.size() < 2) return;
  one_point(a, b, 1 + uniform_index(rng, a.size() - 1));
}

}  // namespace

std::pair<Chromosome, Chromosome> crossover(const Chromosome& a, const Chromosome& b,
                                            const GAConfig& config, std::mt19937_64& rng) {
  if (a.partition.size() != b.partition.size() || a.priority.size() != b.priority.size())
    throw ValidationError("crossover parents have different shapes");
  Chromosome x = a, y = b;
  for (std::size_t m = 0; m < x.partition.size(); ++m) {
    if (x.partition[m].size() != y.partition[m].size() ||
        x.mapping[m].size() != y.mapping[m].size())
      throw ValidationError("crossover parents have different shapes");
    cross(x.partition[m], y.partition[m], rng);
    cross(x.mapping[m], y.mapping[m], rng);
  }
  upmx(x.priority, y.priority, config.upmx_indpb, rng);
  return {std::move(x), std::move(y)};
}

void mutate(Chromosome& c, const GAConfig& config, std::size_t processor_count,
            std::mt19937_64& rng) {
  for (std::size_t m = 0; m < c.partition.size(); ++m) {
    auto& bits = c.partition[m];
    if (!bits.empty()) {
      const double p = config.partition_flip.value_or(1.0 / static_cast<double>(bits.size()));
      for (auto& b : bits)
        if (uniform01(rng) < p) b ^= 1;
    }
    auto& genes = c.mapping[m];
    if (!genes.empty()) {
      const double p = config.mapping_reset.value_or(1.0 / static_cast<double>(genes.size()));
      for (auto& g : genes)
        if (uniform01(rng) < p) g = static_cast<std::uint16_t>(uniform_index(rng, processor_count));
    }
  }
  if (c.priority.size() >= 2 && uniform01(rng) < config.priority_swap) {
    const auto i = uniform_index(rng, c.priority.size());
    auto j = uniform_index(rng, c.priority.size() - 1);
    if (j >= i) ++j;
    std::swap(c.priority[i], c.priority[j]);
  }
}

namespace {

// Runs fn(0..count-1) on up to `jobs` threads; exceptions are rethrown.
template <class Fn>
void parallel_for(std::size_t count, std::size_t jobs, Fn fn) {
  const auto workers = std::max<std::size_t>(1, std::min(jobs, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::uint64_t stream_id(std::size_t generation, std::size_t index) {
  return (static_cast<std::uint64_t>(generation) << 32) | static_cast<std::uint64_t>(index);
}

// Mean over members of the mean per-objective normalized value.
double population_fitness(const std::vector<Candidate>& population, const ObjectiveVector& lo,
                          const ObjectiveVector& hi) {
  double total = 0.0;
  for (const auto& c : population) {
    double s = 0.0;
    for (std::size_t k = 0; k < lo.size(); ++k) {
      const double range = hi[k] - lo[k];
      s += range > 0.0 ? (c.objectives[k] - lo[k]) / range : 0.0;
    }
    total += s / static_cast<double>(lo.size());
  }
  return total / static_cast<double>(population.size());
}

}  // namespace

GAResult run_ga(const Workload& workload, const CostModel& cost, const Evaluator& measure,
                const Evaluator& fast, const GAConfig& config) {
  config.validate();
  const auto processors = cost.profile().processors.size();
  const auto objectives = 2 * workload.group_count();
  const auto divisions =
      config.divisions ? config.divisions : default_divisions(objectives, config.population);
  const auto references = reference_directions(objectives, divisions);
  std::mt19937_64 rng(config.seed);

  GAResult result;
  auto genomes = init_population(workload, cost, config, rng);
  std::vector<Candidate> population(genomes.size());
  parallel_for(genomes.size(), config.jobs, [&](std::size_t i) {
    auto& c = population[i];
    c.chromosome = std::move(genomes[i]);
    c.solution = decode(c.chromosome, workload, cost);
    c.objectives = measure.evaluate(c.solution, stream_id(0, i));
  });
  for (const auto& c : population) result.archive.insert(c);

  ObjectiveVector lo = population.front().objectives, hi = lo;
  for (const auto& c : population)
    for (std::size_t k = 0; k < objectives; ++k) {
      lo[k] = std::min(lo[k], c.objectives[k]);
      hi[k] = std::max(hi[k], c.objectives[k]);
    }
  double best = population_fitness(population, lo, hi);
  result.fitness_history.push_back(best);
  std::size_t stale = 0;

  for (std::size_t gen = 1; gen <= config.max_generations; ++gen) {
    std::vector<std::size_t> order(population.size());
    std::iota(order.begin(), order.end(), 0);
    detail::shuffle(order, rng);

    std::vector<Candidate> offspring(population.size());
    std::vector<bool> polish(population.size(), false);
    for (std::size_t i = 0; i + 1 < order.size(); i += 2) {
      const auto& a = population[order[i]].chromosome;
      const auto& b = population[order[i + 1]].chromosome;
      if (uniform01(rng) < config.crossover) {
        auto [x, y] = crossover(a, b, config, rng);
        offspring[i].chromosome = std::move(x);
        offspring[i + 1].chromosome = std::move(y);
      } else {
        offspring[i].chromosome = a;
        offspring[i + 1].chromosome = b;
      }
    }
    for (std::size_t i = 0; i < offspring.size(); ++i) {
      mutate(offspring[i].chromosome, config, processors, rng);
      polish[i] = uniform01(rng) < config.local_search;
    }

    parallel_for(offspring.size(), config.jobs, [&](std::size_t i) {
      auto& c = offspring[i];
      c.solution = decode(c.chromosome, workload, cost);
      if (polish[i]) {
        c.objectives = fast.evaluate(c.solution, 0);
        c = local_search_merge(std::move(c), workload, cost, fast);
        c = local_search_reposition(std::move(c), workload, cost, fast);
      }
      c.objectives = measure.evaluate(c.solution, stream_id(gen, i));
    });

    std::vector<Candidate> pool = std::move(population);
    pool.insert(pool.end(), offspring.begin(), offspring.end());
    std::vector<ObjectiveVector> scores;
    scores.reserve(pool.size());
    for (const auto& c : pool) scores.push_back(c.objectives);
    auto survivors = nsga3_select(scores, config.population, references, rng);
    std::sort(survivors.begin(), survivors.end());
    population.clear();
    for (auto i : survivors) population.push_back(pool[i]);
    for (const auto& c : offspring) result.archive.insert(c);

    result.generations = gen;
    const double fitness = population_fitness(population, lo, hi);
    result.fitness_history.push_back(fitness);
    if (best - fitness >= config.min_improvement) {
      best = fitness;
      stale = 0;
    } else if (++stale >= config.patience) {
      break;
    }
  }
  result.population = std::move(population);
  return result;
}

GAResult run_ga(const Workload& workload, const CostModel& cost, double alpha_search,
                const GAConfig& config, const SearchTiers& tiers) {
  SimConfig sim;
  sim.requests = tiers.requests;
  sim.period_us = periods(alpha_search, base_periods(workload, cost));
  SimulationEvaluator fast(workload, cost.profile(), sim);
  sim.noise = tiers.measurement_noise;
  if (sim.noise) sim.noise->seed = detail::mix_seed(sim.noise->seed, config.seed);
  SimulationEvaluator measure(workload, cost.profile(), sim);
  return run_ga(workload, cost, measure, fast, config);
}

}  // namespace hetsched
