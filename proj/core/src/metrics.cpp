#include "hetsched/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "hetsched/error.hpp"
#include "random.hpp"

namespace hetsched {

double base_period(std::span<const double> min_model_times_us, std::size_t n_groups,
                   double epsilon) {
  if (min_model_times_us.empty() || n_groups == 0)
    throw ValidationError("base period needs at least one model and one group");
  double sum = 0.0;
  for (double t : min_model_times_us) sum += t;
  return sum * static_cast<double>(n_groups) * (1.0 + epsilon);
}

std::vector<double> base_periods(const Workload& workload, const CostModel& cost,
                                 double epsilon) {
  std::vector<double> out;
  const auto processors = cost.profile().processors.size();
  for (std::size_t g = 0; g < workload.group_count(); ++g) {
    std::vector<double> best;
    for (auto m : workload.members(g)) {
      double t = std::numeric_limits<double>::infinity();
      for (std::size_t p = 0; p < processors; ++p)
        t = std::min(t, cost.model_time(workload.network(m), p));
      best.push_back(t);
    }
    out.push_back(base_period(best, workload.group_count(), epsilon));
  }
  return out;
}

std::vector<double> periods(double alpha, std::span<const double> base_periods_us) {
  if (!(alpha > 0.0)) throw ValidationError("period multiplier must be positive");
  std::vector<double> out;
  out.reserve(base_periods_us.size());
  for (double b : base_periods_us) out.push_back(period(alpha, b));
  return out;
}

std::vector<double> makespans(const Trace& trace, const Workload& workload, std::size_t group) {
  const auto& members = workload.members(group);
  std::vector<double> finish;
  std::vector<double> arrival;
  std::vector<std::size_t> seen;
  for (const auto& r : trace.requests) {
    if (r.group != group) continue;
    if (r.request >= finish.size()) {
      finish.resize(r.request + 1, -std::numeric_limits<double>::infinity());
      arrival.resize(r.request + 1, 0.0);
      seen.resize(r.request + 1, 0);
    }
    finish[r.request] = std::max(finish[r.request], r.finish);
    arrival[r.request] = r.arrival;
    ++seen[r.request];
  }
  std::vector<double> out;
  out.reserve(finish.size());
  for (std::size_t j = 0; j < finish.size(); ++j) {
    if (seen[j] != members.size())
      throw ValidationError("request " + std::to_string(j) + " of group " +
                            std::to_string(group) + " is incomplete");
    out.push_back(finish[j] - arrival[j]);
  }
  return out;
}

double mean(std::span<const double> values) {
  if (values.empty()) throw ValidationError("mean of an empty set");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double nearest_rank(std::span<const double> values, double q) {
  if (values.empty()) throw ValidationError("percentile of an empty set");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size()) - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

double median(std::span<const double> values) {
  if (values.empty()) throw ValidationError("median of an empty set");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = sorted.size();
  return n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

double qoe_score(std::span<const double> theta, double deadline_us) {
  if (theta.empty()) throw ValidationError("QoE needs at least one request");
  if (!(deadline_us > 0.0)) throw ValidationError("deadline must be positive");
  auto met = std::count_if(theta.begin(), theta.end(), [&](double t) { return t <= deadline_us; });
  return static_cast<double>(met) / static_cast<double>(theta.size());
}

double rt_score(double makespan_us, double period_us, double k) {
  if (!(period_us > 0.0)) throw ValidationError("period must be positive");
  return 1.0 / (1.0 + std::exp(k * (makespan_us - period_us) / period_us));
}

ScoreReport score_groups(std::vector<std::vector<double>> group_makespans,
                         std::span<const double> deadlines_us, double k) {
  if (group_makespans.size() != deadlines_us.size())
    throw ValidationError("one deadline per group is required");
  if (group_makespans.empty()) throw ValidationError("nothing to score");
  ScoreReport report;
  report.k = k;
  for (std::size_t g = 0; g < group_makespans.size(); ++g) {
    GroupScore gs;
    gs.deadline_us = deadlines_us[g];
    gs.qoe = qoe_score(group_makespans[g], deadlines_us[g]);
    double rt = 0.0;
    for (double t : group_makespans[g]) rt += rt_score(t, deadlines_us[g], k);
    gs.mean_rt = rt / static_cast<double>(group_makespans[g].size());
    gs.makespans = std::move(group_makespans[g]);
    report.groups.push_back(std::move(gs));
  }
  report.score = scenario_score(report);
  return report;
}

ScoreReport score_trace(const Trace& trace, const Workload& workload,
                        std::span<const double> deadlines_us, double k) {
  std::vector<std::vector<double>> theta;
  for (std::size_t g = 0; g < workload.group_count(); ++g)
    theta.push_back(makespans(trace, workload, g));
  return score_groups(std::move(theta), deadlines_us, k);
}

double scenario_score(const ScoreReport& report) {
  if (report.groups.empty()) throw ValidationError("nothing to score");
  double sum = 0.0;
  for (const auto& g : report.groups) sum += g.mean_rt * g.qoe;
  return sum / static_cast<double>(report.groups.size());
}

std::vector<double> AlphaGrid::points() const {
  if (!(step > 0.0) || !(min < max) || !(min > 0.0))
    throw ValidationError("alpha grid needs 0 < min < max and step > 0");
  const auto count = static_cast<std::size_t>(std::llround((max - min) / step)) + 1;
  std::vector<double> out;
  out.reserve(count);
  // Rounded to 1e-9 so 0.5 + 3 * 0.1 prints as 0.8.
  for (std::size_t i = 0; i < count; ++i)
    out.push_back(std::round((min + static_cast<double>(i) * step) * 1e9) / 1e9);
  return out;
}

AlphaGrid AlphaGrid::parse(std::string_view text) {
  double parts[3];
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    auto end = i < 2 ? text.find(':', pos) : text.size();
    if (end == std::string_view::npos)
      throw ValidationError("alpha grid must look like min:max:step");
    auto field = text.substr(pos, end - pos);
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), parts[i]);
    if (ec != std::errc() || ptr != field.data() + field.size())
      throw ValidationError("bad number '" + std::string(field) + "' in alpha grid");
    pos = end + 1;
  }
  AlphaGrid grid{parts[0], parts[1], parts[2]};
  grid.points();
  return grid;
}

std::vector<SweepRow> sweep(std::span<const Solution> solutions, const Workload& workload,
                            const CostModel& cost, const SweepConfig& config) {
  if (solutions.empty()) throw ValidationError("sweep needs at least one solution");
  for (const auto& s : solutions) check_solution(s, workload, cost.profile());
  const auto alphas = config.grid.points();
  const auto base = base_periods(workload, cost, config.epsilon);
  const auto groups = workload.group_count();
  const auto n_sol = solutions.size();

  struct Cell {
    double score = 0.0;
    ObjectiveVector objectives;
  };
  std::vector<Cell> cells(alphas.size() * n_sol);
  auto run = [&](std::size_t index) {
    const auto a = index / n_sol, s = index % n_sol;
    SimConfig sim;
    sim.requests = config.requests;
    sim.period_us = periods(alphas[a], base);
    if (config.noise) {
      sim.noise = config.noise;
      sim.noise->seed = detail::mix_seed(config.noise->seed, s);
    }
    auto trace = simulate(solutions[s], workload, cost.profile(), sim);
    cells[index].score = score_trace(trace, workload, sim.period_us, config.k).score;
    cells[index].objectives = evaluate_objectives(trace, workload);
  };

  const auto workers = std::max<std::size_t>(1, std::min(config.jobs, cells.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) run(i);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < cells.size(); i += workers) run(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  std::vector<SweepRow> rows;
  rows.reserve(alphas.size());
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    SweepRow row;
    row.alpha = alphas[a];
    for (std::size_t s = 0; s < n_sol; ++s) row.scores.push_back(cells[a * n_sol + s].score);
    row.score_median = median(row.scores);
    row.score_min = *std::min_element(row.scores.begin(), row.scores.end());
    row.score_max = *std::max_element(row.scores.begin(), row.scores.end());
    for (std::size_t g = 0; g < groups; ++g) {
      std::vector<double> avg, p90;
      for (std::size_t s = 0; s < n_sol; ++s) {
        avg.push_back(cells[a * n_sol + s].objectives[2 * g]);
        p90.push_back(cells[a * n_sol + s].objectives[2 * g + 1]);
      }
      row.avg_makespan_median.push_back(median(avg));
      row.p90_makespan_median.push_back(median(p90));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::optional<double> saturation_multiplier(std::span<const SweepRow> rows, double threshold) {
  for (const auto& row : rows)
    if (row.score_median >= threshold) return row.alpha;
  return std::nullopt;
}

std::optional<double> saturation_multiplier(std::span<const Solution> solutions,
                                            const Workload& workload, const CostModel& cost,
                                            const SweepConfig& config, double threshold) {
  auto rows = sweep(solutions, workload, cost, config);
  return saturation_multiplier(rows, threshold);
}

}  // namespace hetsched
