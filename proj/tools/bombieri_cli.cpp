#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "bombieri/annex.hpp"
#include "bombieri/array_analysis.hpp"
#include "bombieri/experiments.hpp"
#include "bombieri/io.hpp"

namespace {

using namespace bombieri;

OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::kCsv;
  if (s == "json") return OutputFormat::kJson;
  throw CLI::ValidationError("--format", "expected csv or json");
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty())
    std::cout << text;
  else
    atomic_write_text(out_path, text);
}

struct GenOptions {
  ExperimentConfig cfg;
  std::string generator = "FIBONACCI";
  std::string rule = "UNIFORM";

  void resolve() {
    cfg.generator = generator_from_string(generator);
    cfg.rule = rule_from_string(rule);
  }

  void add_common(CLI::App* sub) {
    sub->add_option("--density", cfg.density,
                    "target total multiplicity over k");
    sub->add_option("--generator", generator,
                    "FIBONACCI, PERTURBED, CLUSTERED or FROM_FILE");
    sub->add_option("--rule", rule, "UNIFORM, RANDOM_BOUNDED or SQRT_K");
    sub->add_option("--m", cfg.m_uniform, "multiplicity for UNIFORM/CLUSTERED");
    sub->add_option("--m-max", cfg.m_max, "cap for RANDOM_BOUNDED");
    sub->add_option("--seed", cfg.seed, "seed for the random draws");
    sub->add_option("--array", cfg.array_path, "node file for FROM_FILE");
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "frame bounds, interpolation constants and condition checks for "
      "multiplicity arrays in Bombieri-normed polynomial spaces"};
  app.require_subcommand(1);
  int rc = 0;

  // gen-array
  auto gen = app.add_subcommand("gen-array", "build a node file for one k");
  auto gen_opt = std::make_shared<GenOptions>();
  int gen_k = 0;
  std::string gen_out;
  gen->add_option("--k", gen_k, "polynomial degree")->required();
  gen_opt->add_common(gen);
  gen->add_option("--out", gen_out, "output node file")->required();
  gen->callback([gen_opt, &gen_k, &gen_out] {
    gen_opt->resolve();
    MultiplicityArray arr = generate_array(gen_opt->cfg, gen_k);
    save_array(arr, gen_out);
    std::cout << "wrote " << gen_out << " (" << arr.nodes.size()
              << " nodes, total multiplicity " << arr.total_multiplicity()
              << ")\n";
  });

  // frame-bounds
  auto frame = app.add_subcommand("frame-bounds",
                                  "frame bounds of an array from a node file");
  std::string frame_array, frame_out;
  frame->add_option("--array", frame_array, "node file")->required();
  frame->add_option("--out", frame_out, "output file (stdout if omitted)");
  frame->callback([&frame_array, &frame_out] {
    emit(frame_report_json(frame_bounds(load_array(frame_array))), frame_out);
  });

  // interp-constant
  auto interp = app.add_subcommand(
      "interp-constant", "interpolation constant of an array from a node file");
  std::string interp_array;
  interp->add_option("--array", interp_array, "node file")->required();
  interp->callback([&interp_array] {
    double m_x = interpolation_constant(load_array(interp_array));
    std::printf("%.17g\n", m_x);
  });

  // geometry
  auto geo = app.add_subcommand("geometry",
                                "overlap, separation and coverage checks");
  std::string geo_array, geo_out;
  double geo_c = 1.0;
  int geo_mesh = 20000;
  geo->add_option("--array", geo_array, "node file")->required();
  geo->add_option("--c", geo_c, "separation parameter");
  geo->add_option("--mesh", geo_mesh, "sphere mesh size");
  geo->add_option("--out", geo_out, "output file (stdout if omitted)");
  geo->callback([&geo_array, &geo_c, &geo_mesh, &geo_out] {
    emit(geometry_report_json(
             geometry_report(load_array(geo_array), geo_c, geo_mesh)),
         geo_out);
  });

  // sweep
  auto sweep = app.add_subcommand("sweep", "run the metrics over a k ladder");
  auto sweep_opt = std::make_shared<GenOptions>();
  std::string sweep_out, sweep_fmt = "csv";
  sweep->add_option("--k", sweep_opt->cfg.k_list, "degrees, comma separated")
      ->required()
      ->delimiter(',');
  sweep_opt->add_common(sweep);
  sweep->add_option("--c", sweep_opt->cfg.c, "separation parameter");
  sweep->add_option("--mesh", sweep_opt->cfg.mesh_n, "sphere mesh size");
  sweep->add_option("--out", sweep_out, "output file")->required();
  sweep->add_option("--format", sweep_fmt, "csv or json");
  sweep->callback([sweep_opt, &sweep_out, &sweep_fmt] {
    sweep_opt->resolve();
    std::vector<SweepRow> rows = run_sweep(sweep_opt->cfg);
    save_sweep(rows, sweep_out, parse_format(sweep_fmt));
    int failed = 0;
    for (const auto& r : rows)
      if (!r.error.empty()) ++failed;
    std::cout << "wrote " << sweep_out << " (" << rows.size() << " rows, "
              << failed << " with errors)\n";
  });

  // verify-annex
  auto annex = app.add_subcommand("verify-annex",
                                  "check the inequality suite over the grid");
  std::string annex_baseline = "data/annex_baseline.json";
  std::string annex_out, annex_fmt = "csv";
  AnnexGrid annex_grid;
  annex->add_option("--baseline", annex_baseline, "baseline table file");
  annex->add_option("--k", annex_grid.k_values, "degrees, comma separated")
      ->delimiter(',');
  annex->add_option("--a", annex_grid.a_values, "a values, comma separated")
      ->delimiter(',');
  annex->add_option("--out", annex_out, "cell report file");
  annex->add_option("--format", annex_fmt, "csv or json");
  annex->callback([&annex_baseline, &annex_out, &annex_fmt, &annex_grid, &rc] {
    BaselineTable table = BaselineTable::load(annex_baseline);
    AnnexSuiteResult res = run_annex_suite(annex_grid, table);
    if (!annex_out.empty())
      atomic_write_text(annex_out, annex_fmt == "json" ? annex_suite_json(res)
                                                       : annex_suite_csv(res));
    std::printf("checked %d held %d failed %d skipped %d min_margin %.6g\n",
                res.checked, res.held, res.failed, res.skipped, res.min_margin);
    for (const auto& c : res.cells) {
      if (c.skipped || c.report.holds) continue;
      std::printf("FAIL %s k=%d m=%d j=%d a=%g s=%g margin=%.6g\n",
                  to_string(c.id), c.params.k, c.params.m, c.params.j,
                  c.params.a, c.params.s, c.report.margin);
    }
    if (!res.all_hold) rc = 1;
  });

  // baseline-regen
  auto regen = app.add_subcommand("baseline-regen",
                                  "recompute the committed floors");
  std::string regen_out = "data/annex_baseline.json";
  regen->add_option("--out", regen_out, "baseline table file to write");
  regen->callback([&regen_out] {
    BaselineTable table = recompute_baseline(default_regime_windows());
    table.save(regen_out);
    std::cout << "wrote " << regen_out << '\n';
    for (const auto& [name, r] : table.entries)
      if (r.floor)
        std::printf("  %s floor %.12g\n", name.c_str(), *r.floor);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return rc;
}
