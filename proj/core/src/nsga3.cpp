#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "hetsched/error.hpp"
#include "hetsched/optimizer.hpp"
#include "random.hpp"

namespace hetsched {

namespace {

void lattice(std::size_t objectives, std::size_t left, std::size_t divisions,
             std::vector<double>& point, std::vector<std::vector<double>>& out) {
  if (point.size() + 1 == objectives) {
    point.push_back(static_cast<double>(left) / static_cast<double>(divisions));
    out.push_back(point);
    point.pop_back();
    return;
  }
  for (std::size_t k = 0; k <= left; ++k) {
    point.push_back(static_cast<double>(k) / static_cast<double>(divisions));
    lattice(objectives, left - k, divisions, point, out);
    point.pop_back();
  }
}

// C(divisions + objectives - 1, objectives - 1), saturating.
std::size_t lattice_size(std::size_t objectives, std::size_t divisions) {
  double count = 1.0;
  for (std::size_t i = 1; i < objectives; ++i)
    count = count * static_cast<double>(divisions + i) / static_cast<double>(i);
  return static_cast<std::size_t>(std::llround(std::min(count, 1e18)));
}

}  // namespace

std::vector<std::vector<double>> reference_directions(std::size_t objectives,
                                                      std::size_t divisions) {
  if (objectives == 0 || divisions == 0)
    throw ValidationError("reference directions need objectives and divisions");
  std::vector<std::vector<double>> out;
  std::vector<double> point;
  lattice(objectives, divisions, divisions, point, out);
  return out;
}

std::size_t default_divisions(std::size_t objectives, std::size_t population) {
  if (objectives == 0) throw ValidationError("no objectives");
  if (objectives == 1) return 1;
  std::size_t h = 1;
  while (lattice_size(objectives, h) < population) ++h;
  return h;
}

std::vector<std::vector<std::size_t>> non_dominated_fronts(
    const std::vector<ObjectiveVector>& pool) {
  const auto n = pool.size();
  std::vector<std::vector<std::size_t>> dominated(n);
  std::vector<std::size_t> count(n, 0);
  std::vector<std::vector<std::size_t>> fronts(1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (dominates(pool[i], pool[j])) {
        dominated[i].push_back(j);
        ++count[j];
      } else if (dominates(pool[j], pool[i])) {
        dominated[j].push_back(i);
        ++count[i];
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (count[i] == 0) fronts[0].push_back(i);
  while (!fronts.back().empty()) {
    std::vector<std::size_t> next;
    for (auto i : fronts.back())
      for (auto j : dominated[i])
        if (--count[j] == 0) next.push_back(j);
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(next));
  }
  fronts.pop_back();
  return fronts;
}

std::vector<std::size_t> nsga3_select(const std::vector<ObjectiveVector>& pool,
                                      std::size_t capacity,
                                      const std::vector<std::vector<double>>& references,
                                      std::mt19937_64& rng) {
  if (capacity >= pool.size()) {
    std::vector<std::size_t> all(pool.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return all;
  }
  if (references.empty()) throw ValidationError("NSGA-III selection needs reference directions");

  std::vector<std::size_t> chosen;
  std::vector<std::size_t> last;
  for (auto& front : non_dominated_fronts(pool)) {
    if (chosen.size() + front.size() <= capacity) {
      chosen.insert(chosen.end(), front.begin(), front.end());
      if (chosen.size() == capacity) return chosen;
      continue;
    }
    last = std::move(front);
    break;
  }

  const auto dims = pool.front().size();
  std::vector<double> ideal(dims, std::numeric_limits<double>::infinity());
  std::vector<double> nadir(dims, -std::numeric_limits<double>::infinity());
  for (const auto& f : pool)
    for (std::size_t k = 0; k < dims; ++k) {
      ideal[k] = std::min(ideal[k], f[k]);
      nadir[k] = std::max(nadir[k], f[k]);
    }

  struct Niche {
    std::size_t reference = 0;
    double distance = 0.0;
  };
  auto associate = [&](std::size_t i) {
    std::vector<double> x(dims);
    for (std::size_t k = 0; k < dims; ++k) {
      const double range = nadir[k] - ideal[k];
      x[k] = range > 0.0 ? (pool[i][k] - ideal[k]) / range : 0.0;
    }
    Niche best{0, std::numeric_limits<double>::infinity()};
    for (std::size_t r = 0; r < references.size(); ++r) {
      const auto& w = references[r];
      double dot = 0.0, norm = 0.0;
      for (std::size_t k = 0; k < dims; ++k) {
        dot += x[k] * w[k];
        norm += w[k] * w[k];
      }
      const double t = dot / norm;
      double d2 = 0.0;
      for (std::size_t k = 0; k < dims; ++k) {
        const double diff = x[k] - t * w[k];
        d2 += diff * diff;
      }
      const double d = std::sqrt(d2);
      if (d < best.distance) best = {r, d};
    }
    return best;
  };

  std::vector<std::size_t> niche_count(references.size(), 0);
  for (auto i : chosen) ++niche_count[associate(i).reference];

  std::vector<std::vector<std::pair<double, std::size_t>>> waiting(references.size());
  for (auto i : last) {
    auto a = associate(i);
    waiting[a.reference].push_back({a.distance, i});
  }
  for (auto& w : waiting) std::sort(w.begin(), w.end(), std::greater<>());  // closest at back

  while (chosen.size() < capacity) {
    std::size_t low = std::numeric_limits<std::size_t>::max();
    for (std::size_t r = 0; r < references.size(); ++r)
      if (!waiting[r].empty()) low = std::min(low, niche_count[r]);
    std::vector<std::size_t> candidates;
    for (std::size_t r = 0; r < references.size(); ++r)
      if (!waiting[r].empty() && niche_count[r] == low) candidates.push_back(r);
    const auto r = candidates[detail::uniform_index(rng, candidates.size())];
    chosen.push_back(waiting[r].back().second);
    waiting[r].pop_back();
    ++niche_count[r];
  }
  return chosen;
}

}  // namespace hetsched
