#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "hetsched/chromosome.hpp"
#include "hetsched/cost.hpp"
#include "hetsched/simulator.hpp"
#include "hetsched/workload.hpp"

namespace hetsched {

// Scores a decoded solution. `stream` identifies the evaluation so noisy
// evaluators can derive an independent, reproducible noise seed.
class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual ObjectiveVector evaluate(const Solution& solution, std::uint64_t stream) const = 0;
};

// Simulator-backed evaluator. Holds references; `workload` and `profile` must
// outlive it.
class SimulationEvaluator final : public Evaluator {
 public:
  SimulationEvaluator(const Workload& workload, const DeviceProfile& profile, SimConfig config);
  ObjectiveVector evaluate(const Solution& solution, std::uint64_t stream) const override;
  const SimConfig& config() const { return config_; }

 private:
  const Workload& workload_;
  const DeviceProfile& profile_;
  SimConfig config_;
};

// a ≤ b component-wise with at least one strict <.
bool dominates(const ObjectiveVector& a, const ObjectiveVector& b);

struct Candidate {
  Chromosome chromosome;
  Solution solution;
  ObjectiveVector objectives;
};

// Mutually non-dominated candidates with distinct objective vectors; the
// first candidate to reach a vector keeps it.
class ParetoArchive {
 public:
  // True when `candidate` entered the archive.
  bool insert(const Candidate& candidate);
  const std::vector<Candidate>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  // Members ordered by objective vector.
  std::vector<Candidate> sorted() const;

 private:
  std::vector<Candidate> members_;
};

struct GAConfig {
  std::size_t population = 64;
  double crossover = 0.9;
  std::optional<double> partition_flip;  // default 1/|edges| per network
  std::optional<double> mapping_reset;   // default 1/|layers| per network
  double priority_swap = 0.2;
  double local_search = 0.3;
  double upmx_indpb = 0.5;
  std::size_t patience = 3;
  double min_improvement = 0.001;
  std::size_t max_generations = 100;
  std::size_t divisions = 0;  // 0 picks the smallest count covering the population
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
  bool inject_seeds = true;

  void validate() const;  // throws ValidationError
};

// Random genomes plus, when enabled, two heuristic seeds placed first: every
// network whole on its fastest processor, and every network whole on the NPU
// (when the device has one). Seeds use catalog-order priority.
std::vector<Chromosome> init_population(const Workload& workload, const CostModel& cost,
                                        const GAConfig& config, std::mt19937_64& rng);

// Swaps the tails of `a` and `b` from position `cut` on.
template <class T>
void one_point(std::vector<T>& a, std::vector<T>& b, std::size_t cut) {
  for (std::size_t i = cut; i < a.size() && i < b.size(); ++i) std::swap(a[i], b[i]);
}

// Uniform partially matched crossover on two permutations of 0..n-1.
void upmx(std::vector<std::size_t>& a, std::vector<std::size_t>& b, double indpb,
          std::mt19937_64& rng);

// One-point crossover per network on partition and on mapping genes with
// independent cuts; UPMX on priority.
std::pair<Chromosome, Chromosome> crossover(const Chromosome& a, const Chromosome& b,
                                            const GAConfig& config, std::mt19937_64& rng);

void mutate(Chromosome& chromosome, const GAConfig& config, std::size_t processor_count,
            std::mt19937_64& rng);

// Das–Dennis simplex lattice: all points with coordinates k/divisions summing to 1.
std::vector<std::vector<double>> reference_directions(std::size_t objectives,
                                                      std::size_t divisions);
// Smallest division count yielding at least `population` directions.
std::size_t default_divisions(std::size_t objectives, std::size_t population);

// Fronts of pool indices, best first.
std::vector<std::vector<std::size_t>> non_dominated_fronts(const std::vector<ObjectiveVector>& pool);

// Indices of the `capacity` survivors: whole fronts first, the last front
// filled by reference-direction niching on ideal/nadir-normalized objectives.
std::vector<std::size_t> nsga3_select(const std::vector<ObjectiveVector>& pool,
                                      std::size_t capacity,
                                      const std::vector<std::vector<double>>& references,
                                      std::mt19937_64& rng);

// Local searches expect `candidate.objectives` to hold fast-tier values.
// Merges adjacent subgraphs while doing so Pareto-improves the objectives;
// scans to a fixpoint.
Candidate local_search_merge(Candidate candidate, const Workload& workload, const CostModel& cost,
                             const Evaluator& fast);
// Moves single layers across subgraph boundaries (taking the destination's
// processor) while doing so Pareto-improves the objectives; scans to a fixpoint.
Candidate local_search_reposition(Candidate candidate, const Workload& workload,
                                  const CostModel& cost, const Evaluator& fast);

struct GAResult {
  ParetoArchive archive;
  std::vector<Candidate> population;
  std::size_t generations = 0;          // after the initial population
  std::vector<double> fitness_history;  // generation 0 first
};

// `measure` scores every candidate entering selection and the archive;
// `fast` drives local search.
GAResult run_ga(const Workload& workload, const CostModel& cost, const Evaluator& measure,
                const Evaluator& fast, const GAConfig& config);

struct SearchTiers {
  std::size_t requests = 20;
  std::optional<NoiseConfig> measurement_noise = NoiseConfig{};
};

// Periods α_search·Φ̄; the measurement tier is noisy unless disabled, the fast
// tier never is.
GAResult run_ga(const Workload& workload, const CostModel& cost, double alpha_search,
                const GAConfig& config, const SearchTiers& tiers = {});

}  // namespace hetsched
