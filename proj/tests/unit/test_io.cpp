#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "fixtures.hpp"
#include "hetsched/baselines.hpp"
#include "hetsched/catalog.hpp"
#include "hetsched/chromosome.hpp"
#include "hetsched/error.hpp"
#include "hetsched/io.hpp"
#include "hetsched/metrics.hpp"

using namespace hetsched;
namespace fs = std::filesystem;

namespace {

struct Catalog9 {
  Catalog catalog = builtin_catalog();
  std::shared_ptr<const DeviceProfile> profile =
      std::make_shared<const DeviceProfile>(derive_profile(catalog, default_device()));
  CostModel cost{profile};
};

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("hetsched_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(NetworkJson, RoundTrip) {
  auto d = hetsched::testing::chain("n", 3, 77, 11, 22);
  auto back = network_from_json(network_to_json(d));
  EXPECT_EQ(back.name, "n");
  EXPECT_EQ(back.input_bytes, 11u);
  EXPECT_EQ(back.output_bytes, 22u);
  ASSERT_EQ(back.edges.size(), 2u);
  EXPECT_EQ(back.edges[1].tensor_bytes, 77u);
  EXPECT_EQ(network_to_json(back), network_to_json(d));
}

TEST(NetworkJson, MalformedInputIsValidationError) {
  try {
    network_from_json(R"({"name":"n","layers":[{"id":"x"}],"edges":[]})");
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("malformed network"), std::string::npos) << e.what();
  }
  EXPECT_THROW(network_from_json("{not json"), ValidationError);
}

TEST(Loaders, ErrorsNameTheFile) {
  auto dir = scratch("loaders");
  write_file(dir / "bad.json", R"({"groups": 3})");
  try {
    load_scenario(dir / "bad.json");
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.json"), std::string::npos) << e.what();
  }
  fs::remove_all(dir);
}

TEST(CatalogJson, RoundTripKeepsSeedCosts) {
  auto c = builtin_catalog();
  auto back = catalog_from_json(catalog_to_json(c));
  ASSERT_EQ(back.entries.size(), c.entries.size());
  EXPECT_EQ(back.id, c.id);
  EXPECT_EQ(back.entries[4].seed_costs_us, c.entries[4].seed_costs_us);
  EXPECT_EQ(catalog_to_json(back), catalog_to_json(c));
}

TEST(ProfileJson, RoundTrip) {
  Catalog9 c;
  auto text = profile_to_json(*c.profile);
  auto back = profile_from_json(text);
  EXPECT_EQ(back.processors, c.profile->processors);
  EXPECT_EQ(back.layer_costs, c.profile->layer_costs);
  EXPECT_EQ(profile_to_json(back), text);
}

TEST(ProfileJson, RejectsInvalidProfile) {
  Catalog9 c;
  auto p = *c.profile;
  p.nonlin[2].rho_inf = 2.0;
  EXPECT_THROW(profile_from_json(profile_to_json(p)), ValidationError);
}

TEST(ScenarioJson, RoundTrip) {
  auto s = generate_scenario(builtin_catalog(), 2, 3, 3);
  auto back = scenario_from_json(scenario_to_json(s));
  EXPECT_EQ(scenario_to_json(back), scenario_to_json(s));
  EXPECT_THROW(scenario_from_json(R"({"groups":[]})"), ValidationError);
}

TEST(SolutionJson, RoundTripThroughGenes) {
  Catalog9 c;
  auto w = resolve(generate_scenario(c.catalog, 2, 3, 3), c.catalog);
  std::mt19937_64 rng(4);
  GAConfig cfg;
  cfg.population = 8;
  auto pop = init_population(w, c.cost, cfg, rng);
  Candidate cand{pop[5], decode(pop[5], w, c.cost), {1.5, 2.5, 3.5, 4.5}};
  auto text = solution_to_json(cand, w, *c.profile);
  auto back = solution_from_json(text, w, c.cost);
  EXPECT_EQ(back.chromosome, cand.chromosome);
  EXPECT_EQ(back.objectives, cand.objectives);
  EXPECT_EQ(solution_to_json(back, w, *c.profile), text);
}

TEST(Archive, IndexRowsMatchMembers) {
  Catalog9 c;
  auto w = resolve(generate_scenario(c.catalog, 2, 3, 3), c.catalog);
  auto members = best_mapping(w, c.cost, 1.0, 5);
  auto dir = scratch("archive");
  write_archive(dir, members, w, *c.profile);
  std::istringstream index(read_file(dir / "index.csv"));
  std::string line;
  std::getline(index, line);
  EXPECT_EQ(line, "file,subgraphs,avg_makespan_g" + std::to_string(w.scenario().groups[0].id) +
                      ",p90_makespan_g" + std::to_string(w.scenario().groups[0].id) +
                      ",avg_makespan_g" + std::to_string(w.scenario().groups[1].id) +
                      ",p90_makespan_g" + std::to_string(w.scenario().groups[1].id));
  std::size_t rows = 0;
  while (std::getline(index, line)) ++rows;
  EXPECT_EQ(rows, members.size());
  auto loaded = load_solutions(dir, w, c.cost);
  ASSERT_EQ(loaded.size(), members.size());
  for (std::size_t i = 0; i < members.size(); ++i)
    EXPECT_EQ(loaded[i].chromosome, members[i].chromosome);
  fs::remove_all(dir);
}

TEST(SweepCsv, Columns) {
  Catalog9 c;
  auto w = resolve(generate_scenario(c.catalog, 1, 3, 3), c.catalog);
  std::vector<Solution> sols{npu_only(w, c.cost)};
  SweepConfig cfg;
  cfg.grid = AlphaGrid{1.0, 1.2, 0.1};
  cfg.requests = 3;
  std::ostringstream out;
  write_sweep_csv(out, sweep(sols, w, c.cost, cfg), w);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "alpha,score_median,score_min,score_max,avg_makespan_median_g0,p90_makespan_median_g0");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 3u);
}

TEST(Files, AtomicWriteAndMissingRead) {
  auto dir = scratch("files");
  write_file(dir / "a.txt", "one");
  write_file(dir / "a.txt", "two");
  EXPECT_EQ(read_file(dir / "a.txt"), "two");
  EXPECT_THROW(read_file(dir / "missing.txt"), ValidationError);
  fs::remove_all(dir);
}
