#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hetsched/catalog.hpp"
#include "hetsched/cost.hpp"
#include "hetsched/metrics.hpp"
#include "hetsched/optimizer.hpp"
#include "hetsched/workload.hpp"

// JSON and CSV formats. Sizes are bytes and times microseconds throughout.
// Loaders throw ValidationError with the offending path on malformed input.
namespace hetsched {

std::string network_to_json(const NetworkDescription& network);
NetworkDescription network_from_json(const std::string& text);

std::string catalog_to_json(const Catalog& catalog);
Catalog catalog_from_json(const std::string& text);

std::string profile_to_json(const DeviceProfile& profile);
DeviceProfile profile_from_json(const std::string& text);

std::string scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const std::string& text);

// Partition bits, mapping genes, priority by name, decoded subgraphs with
// processor, config and time, plus the objectives when non-empty.
std::string solution_to_json(const Candidate& candidate, const Workload& workload,
                             const DeviceProfile& profile);
// Rebuilt from the genes; decoded subgraphs in the file are informational.
Candidate solution_from_json(const std::string& text, const Workload& workload,
                             const CostModel& cost);

std::string read_file(const std::filesystem::path& path);
// Writes through a temporary file and renames it into place.
void write_file(const std::filesystem::path& path, const std::string& content);

Catalog load_catalog(const std::filesystem::path& path);
DeviceProfile load_profile(const std::filesystem::path& path);
Scenario load_scenario(const std::filesystem::path& path);

// solution_NNN.json per member plus index.csv
// (file, subgraphs, then avg/p90 per group).
void write_archive(const std::filesystem::path& dir, std::span<const Candidate> members,
                   const Workload& workload, const DeviceProfile& profile);
// A solution file, or a directory whose solution_*.json files are read in
// name order.
std::vector<Candidate> load_solutions(const std::filesystem::path& path,
                                      const Workload& workload, const CostModel& cost);

// alpha, score_median, score_min, score_max, then avg/p90 makespan medians
// per group.
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows,
                     const Workload& workload);

}  // namespace hetsched
