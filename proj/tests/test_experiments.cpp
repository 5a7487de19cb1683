#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "bombieri/experiments.hpp"
#include "bombieri/io.hpp"
#include "doctest.h"
#include "json.hpp"
#include "test_util.hpp"

using namespace bombieri;
using testutil::strip_csv_column;

namespace {

ExperimentConfig base_config() {
  ExperimentConfig cfg;
  cfg.generator = ArrayGenerator::kFibonacci;
  cfg.k_list = {16};
  cfg.density = 1.3;
  cfg.rule = MultiplicityRule::kUniform;
  cfg.m_uniform = 1;
  cfg.mesh_n = 2000;
  cfg.seed = 5;
  return cfg;
}

int count_csv_fields(const std::string& line) {
  int fields = 1;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    else if (line[i] == ',' && !quoted) ++fields;
  }
  return fields;
}

}  // namespace

TEST_CASE("enum names round-trip") {
  for (auto g : {ArrayGenerator::kFibonacci, ArrayGenerator::kPerturbed,
                 ArrayGenerator::kClustered, ArrayGenerator::kFromFile})
    CHECK(generator_from_string(to_string(g)) == g);
  for (auto r : {MultiplicityRule::kUniform, MultiplicityRule::kRandomBounded,
                 MultiplicityRule::kSqrtK})
    CHECK(rule_from_string(to_string(r)) == r);
  CHECK_THROWS(generator_from_string("NOPE"));
  CHECK_THROWS(rule_from_string("NOPE"));
}

TEST_CASE("config validation") {
  ExperimentConfig cfg = base_config();
  validate_config(cfg);

  ExperimentConfig bad = cfg;
  bad.k_list = {};
  CHECK_THROWS(validate_config(bad));
  bad = cfg;
  bad.k_list = {16, 16};
  CHECK_THROWS(validate_config(bad));
  bad = cfg;
  bad.density = 0.0;
  CHECK_THROWS(validate_config(bad));
  bad = cfg;
  bad.mesh_n = 100;
  CHECK_THROWS(validate_config(bad));
  bad = cfg;
  bad.generator = ArrayGenerator::kFromFile;
  CHECK_THROWS(validate_config(bad));
}

TEST_CASE("fibonacci generator covers the density with unit nodes") {
  ExperimentConfig cfg = base_config();
  MultiplicityArray x = generate_array(cfg, 64);
  CHECK(x.k == 64);
  CHECK(x.total_multiplicity() == 84);  // ceil(1.3 * 64)
  for (const auto& nd : x.nodes) CHECK(nd.multiplicity == 1);

  MultiplicityArray again = generate_array(cfg, 64);
  REQUIRE(again.nodes.size() == x.nodes.size());
  for (size_t i = 0; i < x.nodes.size(); ++i)
    CHECK(again.nodes[i].point == x.nodes[i].point);
}

TEST_CASE("uniform multiplicities respect the sqrt(k) cap") {
  ExperimentConfig cfg = base_config();
  cfg.m_uniform = 3;
  MultiplicityArray x = generate_array(cfg, 100);
  CHECK(x.total_multiplicity() >= 130);
  for (const auto& nd : x.nodes) CHECK(nd.multiplicity == 3);
  CHECK_THROWS_AS(generate_array(cfg, 4), std::invalid_argument);  // cap is 2
}

TEST_CASE("sqrt-k rule pins multiplicity to the cap") {
  ExperimentConfig cfg = base_config();
  cfg.rule = MultiplicityRule::kSqrtK;
  MultiplicityArray x = generate_array(cfg, 100);
  for (const auto& nd : x.nodes) CHECK(nd.multiplicity == 10);
}

TEST_CASE("random bounded multiplicities stay in range and reach the target") {
  ExperimentConfig cfg = base_config();
  cfg.rule = MultiplicityRule::kRandomBounded;
  cfg.m_max = 3;
  MultiplicityArray x = generate_array(cfg, 64);
  CHECK(x.total_multiplicity() >= 84);
  std::set<int> seen;
  for (const auto& nd : x.nodes) {
    CHECK(nd.multiplicity >= 1);
    CHECK(nd.multiplicity <= 3);
    seen.insert(nd.multiplicity);
  }
  CHECK(seen.size() > 1);
}

TEST_CASE("perturbed nodes stay chordally close to the lattice") {
  ExperimentConfig cfg = base_config();
  MultiplicityArray lattice = generate_array(cfg, 100);
  cfg.generator = ArrayGenerator::kPerturbed;
  MultiplicityArray moved = generate_array(cfg, 100);
  REQUIRE(moved.nodes.size() == lattice.nodes.size());
  int displaced = 0;
  for (size_t i = 0; i < moved.nodes.size(); ++i) {
    double d = chordal_distance(moved.nodes[i].point, lattice.nodes[i].point);
    CHECK(d <= 0.3 / 10.0 + 1e-9);
    if (d > 1e-12) ++displaced;
  }
  CHECK(displaced == int(moved.nodes.size()));
}

TEST_CASE("clustered generator groups nearby lattice points") {
  ExperimentConfig cfg = base_config();
  cfg.generator = ArrayGenerator::kClustered;
  cfg.m_uniform = 4;
  MultiplicityArray x = generate_array(cfg, 64);
  // ceil(1.3 * 64 / 4) = 21 clusters of multiplicity 4
  CHECK(int(x.nodes.size()) == 21);
  CHECK(x.total_multiplicity() == 84);
  for (const auto& nd : x.nodes) CHECK(nd.multiplicity == 4);
  validate_array(x, true);

  cfg.rule = MultiplicityRule::kRandomBounded;
  CHECK_THROWS_AS(generate_array(cfg, 64), std::invalid_argument);
}

TEST_CASE("file-backed arrays are retagged and capped") {
  MultiplicityArray stored;
  stored.k = 50;
  stored.nodes = {{PlanePoint(0.1, 0.2), 3}, {PlanePoint(-1, 0.5), 2}};
  std::string path = "array_from_file_tmp.json";
  save_array(stored, path);

  ExperimentConfig cfg = base_config();
  cfg.generator = ArrayGenerator::kFromFile;
  cfg.array_path = path;
  MultiplicityArray x = generate_array(cfg, 100);
  CHECK(x.k == 100);
  REQUIRE(x.nodes.size() == 2);
  CHECK(x.nodes[0].point == stored.nodes[0].point);
  CHECK(x.nodes[1].multiplicity == 2);
  // multiplicity 3 exceeds sqrt(4) = 2
  CHECK_THROWS_AS(generate_array(cfg, 4), std::invalid_argument);
  std::remove(path.c_str());
}

TEST_CASE("sweep rows follow the requested degrees") {
  ExperimentConfig cfg = base_config();
  cfg.k_list = {8, 16, 32};
  auto rows = run_sweep(cfg);
  REQUIRE(rows.size() == 3);
  for (size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].k == cfg.k_list[i]);
    CHECK(rows[i].error.empty());
    CHECK(rows[i].lower_frame_bound > 0.0);
    CHECK(rows[i].upper_frame_bound >= rows[i].lower_frame_bound);
    CHECK(rows[i].wall_time_ms >= 0.0);
    // density 1.3 oversamples, so no interpolation constant
    CHECK_FALSE(rows[i].interpolation_constant.has_value());
  }
}

TEST_CASE("undersampled sweeps carry the interpolation constant") {
  ExperimentConfig cfg = base_config();
  cfg.density = 0.5;
  cfg.k_list = {16};
  auto rows = run_sweep(cfg);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].total_multiplicity == 8);
  REQUIRE(rows[0].interpolation_constant.has_value());
  CHECK(*rows[0].interpolation_constant >= 1.0);
}

TEST_CASE("per-degree failures land in the error column") {
  MultiplicityArray stored;
  stored.k = 50;
  stored.nodes = {{PlanePoint(0.3, 0.0), 3}};
  std::string path = "array_error_tmp.json";
  save_array(stored, path);
  ExperimentConfig cfg = base_config();
  cfg.generator = ArrayGenerator::kFromFile;
  cfg.array_path = path;
  cfg.k_list = {4, 100};  // cap 2 at k=4 rejects multiplicity 3
  auto rows = run_sweep(cfg);
  REQUIRE(rows.size() == 2);
  CHECK_FALSE(rows[0].error.empty());
  CHECK(rows[1].error.empty());
  std::remove(path.c_str());

  std::string csv = sweep_csv(rows);
  std::istringstream lines(csv);
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) {
    CHECK(count_csv_fields(line) == 14);
    ++n;
  }
  CHECK(n == 3);
}

TEST_CASE("sweep output is deterministic apart from timings") {
  ExperimentConfig cfg = base_config();
  cfg.k_list = {8, 16};
  std::string a = strip_csv_column(sweep_csv(run_sweep(cfg)), 12);
  std::string b = strip_csv_column(sweep_csv(run_sweep(cfg)), 12);
  CHECK(a == b);
  CHECK(a.find("wall_time_ms") == std::string::npos);
}

TEST_CASE("sweep json carries nulls for absent values") {
  ExperimentConfig cfg = base_config();
  cfg.k_list = {8};
  auto rows = run_sweep(cfg);
  auto parsed = nlohmann::json::parse(sweep_json(rows));
  REQUIRE(parsed.is_array());
  CHECK(parsed[0]["k"] == 8);
  CHECK(parsed[0]["interpolation_constant"].is_null());
  CHECK(parsed[0]["lower_frame_bound"].is_number());
}

TEST_CASE("array files round-trip bit for bit") {
  MultiplicityArray x;
  x.k = 17;
  x.nodes = {{PlanePoint(0.123456789012345, -2.5), 1},
             {PlanePoint(1e-17, 3.0), 5}};
  std::string path = "array_roundtrip_tmp.json";
  save_array(x, path);
  MultiplicityArray back = load_array(path);
  CHECK(back.k == 17);
  REQUIRE(back.nodes.size() == 2);
  for (size_t i = 0; i < 2; ++i) {
    CHECK(back.nodes[i].point == x.nodes[i].point);
    CHECK(back.nodes[i].multiplicity == x.nodes[i].multiplicity);
  }
  std::remove(path.c_str());
}

TEST_CASE("malformed array files are rejected") {
  std::string path = "array_bad_tmp.json";
  {
    std::ofstream out(path);
    out << "{\"nodes\": []}";  // k missing
  }
  CHECK_THROWS(load_array(path));
  std::remove(path.c_str());
  CHECK_THROWS(load_array("definitely_not_here.json"));
}

TEST_CASE("report serializers emit parseable json") {
  ExperimentConfig cfg = base_config();
  MultiplicityArray x = generate_array(cfg, 16);
  FrameReport fr = frame_bounds(x);
  auto fj = nlohmann::json::parse(frame_report_json(fr));
  CHECK(fj["k"] == 16);
  CHECK(fj["lower_frame_bound"].get<double>() == doctest::Approx(fr.lower));
  CHECK(fj["rank"] == fr.rank);
  CHECK(int(fj["singular_values"].size()) == 17);

  GeometryReport gr = geometry_report(x, 1.0, 2000);
  auto gj = nlohmann::json::parse(geometry_report_json(gr));
  CHECK(gj["overlap_count"] == gr.overlap);
  CHECK(gj["k_times_uncovered_mass"].get<double>() ==
        doctest::Approx(gr.k_uncovered_zero));
}

TEST_CASE("annex suite bookkeeping on a small grid") {
  BaselineTable table =
      BaselineTable::load(testutil::repo_path("data/annex_baseline.json"));
  AnnexGrid grid;
  grid.k_values = {100};
  grid.a_values = {1.0};
  AnnexSuiteResult res = run_annex_suite(grid, table);
  CHECK(res.checked + res.skipped == int(res.cells.size()));
  CHECK(res.checked == res.held + res.failed);
  CHECK(res.failed == 0);
  CHECK(res.all_hold);
  CHECK(res.min_margin > 0.0);

  std::string csv = annex_suite_csv(res);
  std::istringstream lines(csv);
  std::string line;
  while (std::getline(lines, line)) CHECK(count_csv_fields(line) == 13);

  auto js = nlohmann::json::parse(annex_suite_json(res));
  CHECK(js["checked"] == res.checked);
  CHECK(js["all_hold"] == true);
  CHECK(js["cells"].is_array());
  CHECK(int(js["cells"].size()) == int(res.cells.size()));
}

TEST_CASE("baseline recompute reproduces the committed floors") {
  BaselineTable fresh = recompute_baseline(default_regime_windows());
  BaselineTable committed =
      BaselineTable::load(testutil::repo_path("data/annex_baseline.json"));
  for (const char* name : {"TIP_BETA", "INC_BETA_A", "BINOMIAL_FLOOR"}) {
    REQUIRE(fresh.entries.at(name).floor.has_value());
    CHECK(*fresh.entries.at(name).floor ==
          doctest::Approx(*committed.entries.at(name).floor).epsilon(1e-12));
  }
  CHECK_FALSE(fresh.entries.at("LEMMA0").floor.has_value());
  CHECK_FALSE(fresh.entries.at("EST_A_LOWER").floor.has_value());
}

TEST_CASE("atomic text writes replace the destination") {
  std::string path = "atomic_tmp.txt";
  atomic_write_text(path, "first\n");
  atomic_write_text(path, "second\n");
  std::ifstream in(path);
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  CHECK(content == "second\n");
  std::remove(path.c_str());
}
