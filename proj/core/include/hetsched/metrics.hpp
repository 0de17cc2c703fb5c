#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "hetsched/cost.hpp"
#include "hetsched/simulator.hpp"
#include "hetsched/workload.hpp"

namespace hetsched {

inline constexpr double kDefaultEpsilon = 0.1;
inline constexpr double kDefaultSensitivity = 15.0;
inline constexpr double kSaturationThreshold = 0.995;

// Φ̄ = Σ min_p τ_p(m) · N · (1 + ε) over a group's whole-model best times.
double base_period(std::span<const double> min_model_times_us, std::size_t n_groups,
                   double epsilon = kDefaultEpsilon);
// Per group of `workload`, each model priced on the best config of its
// fastest processor.
std::vector<double> base_periods(const Workload& workload, const CostModel& cost,
                                 double epsilon = kDefaultEpsilon);
inline double period(double alpha, double base_period_us) { return alpha * base_period_us; }
std::vector<double> periods(double alpha, std::span<const double> base_periods_us);

// Θ per request of a group: last output delivered minus arrival.
// Throws ValidationError if a request has no record for some member.
std::vector<double> makespans(const Trace& trace, const Workload& workload, std::size_t group);

double mean(std::span<const double> values);
// Nearest-rank: the ceil(q·n)-th smallest value. Requires a non-empty input.
double nearest_rank(std::span<const double> values, double q);
// Average of the two middle values for even counts.
double median(std::span<const double> values);

// Share of requests with Θ ≤ deadline.
double qoe_score(std::span<const double> makespans, double deadline_us);
// 1 / (1 + exp(k·(Θ − Φ)/Φ)).
double rt_score(double makespan_us, double period_us, double k = kDefaultSensitivity);

struct GroupScore {
  std::vector<double> makespans;
  double deadline_us = 0.0;
  double qoe = 0.0;
  double mean_rt = 0.0;
};

struct ScoreReport {
  std::vector<GroupScore> groups;
  double k = kDefaultSensitivity;
  double score = 0.0;
};

ScoreReport score_groups(std::vector<std::vector<double>> group_makespans,
                         std::span<const double> deadlines_us, double k = kDefaultSensitivity);
ScoreReport score_trace(const Trace& trace, const Workload& workload,
                        std::span<const double> deadlines_us, double k = kDefaultSensitivity);
// (1/N) Σ_i mean RtScore_i · QoE_i.
double scenario_score(const ScoreReport& report);

// α_min + i·step for i = 0 .. round((α_max − α_min)/step).
struct AlphaGrid {
  double min = 0.5;
  double max = 3.0;
  double step = 0.1;

  std::vector<double> points() const;
  // "min:max:step"; throws ValidationError unless min < max and step > 0.
  static AlphaGrid parse(std::string_view text);
};

struct SweepConfig {
  AlphaGrid grid;
  std::size_t requests = 20;
  std::optional<NoiseConfig> noise;  // seed is mixed with the solution index
  double epsilon = kDefaultEpsilon;
  double k = kDefaultSensitivity;
  std::size_t jobs = 1;
};

struct SweepRow {
  double alpha = 0.0;
  std::vector<double> scores;  // per solution
  double score_median = 0.0;
  double score_min = 0.0;
  double score_max = 0.0;
  std::vector<double> avg_makespan_median;  // per group, across solutions
  std::vector<double> p90_makespan_median;  // per group, across solutions
};

// Scores every solution at every grid point, with periods α·Φ̄ and the same
// α-scaled period as deadline.
std::vector<SweepRow> sweep(std::span<const Solution> solutions, const Workload& workload,
                            const CostModel& cost, const SweepConfig& config);

// Smallest α whose median score reaches `threshold`; nullopt when none does.
std::optional<double> saturation_multiplier(std::span<const SweepRow> rows,
                                            double threshold = kSaturationThreshold);
std::optional<double> saturation_multiplier(std::span<const Solution> solutions,
                                            const Workload& workload, const CostModel& cost,
                                            const SweepConfig& config,
                                            double threshold = kSaturationThreshold);

}  // namespace hetsched
