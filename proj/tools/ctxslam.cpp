#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ctxslam/error.hpp"
#include "ctxslam/export.hpp"
#include "ctxslam/io.hpp"
#include "ctxslam/metrics.hpp"
#include "ctxslam/ontology.hpp"
#include "ctxslam/render.hpp"
#include "ctxslam/scenario.hpp"
#include "ctxslam/trial.hpp"

namespace fs = std::filesystem;
using namespace ctxslam;

namespace {

constexpr int kRuntimeError = 1;
constexpr int kUsageError = 2;

struct GlobalOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool no_render = false;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void apply_seed(TrialConfig& cfg, std::optional<std::uint64_t> seed) {
  if (!seed) return;
  if (cfg.generator && cfg.generator->seed == cfg.seed) cfg.generator->seed = *seed;
  cfg.seed = *seed;
}

TrialConfig load_config(const GlobalOptions& g) {
  if (g.config.empty()) throw UsageError("--config is required");
  TrialConfig cfg = load_trial_config(g.config);
  apply_seed(cfg, g.seed);
  return cfg;
}

fs::path require_out(const GlobalOptions& g) {
  if (g.out.empty()) throw UsageError("--out is required");
  return g.out;
}

Palette palette_for(const std::string& palette_path, const std::string& ontology_path,
                    const std::vector<const LabelGrid*>& grids) {
  if (!palette_path.empty()) return parse_palette(read_text_file(palette_path));
  if (!ontology_path.empty()) {
    const Ontology o = load_ontology(ontology_path);
    return default_palette(o.environments());
  }
  std::set<std::string> labels;
  for (const auto* g : grids)
    for (const auto& l : g->labels())
      if (l != kUnknown) labels.insert(l);
  const std::vector<std::string> ordered(labels.begin(), labels.end());
  return default_palette(ordered);
}

int cmd_gen_scenario(const GlobalOptions& g, const std::string& preset,
                     const std::vector<double>& densities, const std::string& ontology_path,
                     int agents) {
  const fs::path out = require_out(g);
  const Ontology ontology = load_ontology(ontology_path);
  GeneratorParams p;
  p.preset = preset;
  p.densities = densities;
  p.seed = g.seed.value_or(0);
  p.agent_count = agents;
  const ScenarioSpec spec = generate_scenario(p, ontology);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  write_text_file(out, scenario_to_json(spec));
  std::cout << "scenario " << spec.name << ": " << spec.features.size() << " features, area "
            << format_double(spec.area()) << " km^2\n";
  return 0;
}

int cmd_run(const GlobalOptions& g) {
  const TrialConfig cfg = load_config(g);
  const fs::path out = require_out(g);
  const Ontology ontology = load_ontology(cfg.ontology_path);
  const ScenarioSpec scenario = resolve_scenario(cfg, ontology);
  const TrialResult r = run_trial(cfg, ontology, scenario);

  fs::create_directories(out);
  write_text_file(out / "report.csv", report_csv_header() + "\n" + report_csv_row(r.report) + "\n");
  write_text_file(out / "report.json", report_to_json(r.report));
  write_text_file(out / "collective_map.json", landmarks_to_json(r.collective));
  write_text_file(out / "grid.json", grid_segmentation_to_json(r.grid));
  write_text_file(out / "fragments.json", fragments_to_json(r.branch));
  write_text_file(out / "pred_grid_grid.csv", grid_to_csv(r.pred_grid));
  write_text_file(out / "pred_grid_branch.csv", grid_to_csv(r.pred_branch));
  write_text_file(out / "truth_grid.csv", grid_to_csv(r.truth));

  if (!g.no_render) {
    RenderSpec spec;
    spec.palette = default_palette(ontology.environments());
    const std::vector<LabelGrid> panels{r.truth, r.pred_grid, r.pred_branch};
    write_text_file(out / "render_grids.pgm", render_pgm(panels, spec));
    VectorScene scene;
    scene.bounds = scenario.bounds();
    scene.zones = scenario.zones;
    scene.landmarks = r.collective;
    for (const GridSegment* leaf : r.grid.leaves())
      scene.leaves.push_back({leaf->rect, leaf->distribution.label, leaf->distribution.max_probability});
    for (const auto& f : r.branch.fragments)
      scene.fragments.push_back({f.hull, f.label(), f.distribution.max_probability, f.members});
    spec.format = ImageFormat::Svg;
    spec.layers.fragments = false;
    write_text_file(out / "render_grid_method.svg", render_svg(scene, spec));
    spec.layers.fragments = true;
    spec.layers.grid_leaves = false;
    write_text_file(out / "render_branch_method.svg", render_svg(scene, spec));
  }

  const TrialReport& rep = r.report;
  std::cout << "steps " << rep.steps << (rep.all_discovered ? " (all features discovered)" : " (step cap)")
            << ", landmarks " << rep.landmark_count << "\n"
            << "grid:   macro IoU " << format_double(rep.grid.macro_iou) << ", mAP "
            << format_double(rep.grid.mean_ap) << "\n"
            << "branch: macro IoU " << format_double(rep.branch.macro_iou) << ", mAP "
            << format_double(rep.branch.mean_ap) << "\n";
  return 0;
}

int cmd_render(const GlobalOptions& g, const std::vector<std::string>& grid_paths,
               const std::string& format, const std::string& palette_path,
               const std::string& ontology_path, const std::string& scenario_path,
               const std::string& map_path, const std::string& leaves_path,
               const std::string& fragments_path, int cell_pixels, double scale) {
  const fs::path out = require_out(g);
  RenderSpec spec;
  spec.cell_pixels = cell_pixels;
  spec.scale = scale;
  if (format == "pgm") {
    if (grid_paths.empty()) throw UsageError("pgm output needs at least one --grid");
    std::vector<LabelGrid> grids;
    for (const auto& p : grid_paths) grids.push_back(load_grid_csv(p));
    std::vector<const LabelGrid*> ptrs;
    for (const auto& gr : grids) ptrs.push_back(&gr);
    spec.palette = palette_for(palette_path, ontology_path, ptrs);
    write_text_file(out, render_pgm(grids, spec));
    return 0;
  }
  if (scenario_path.empty() || ontology_path.empty())
    throw UsageError("svg output needs --scenario and --ontology");
  const Ontology ontology = load_ontology(ontology_path);
  const ScenarioSpec scenario = load_scenario(scenario_path, ontology);
  spec.format = ImageFormat::Svg;
  spec.palette = palette_path.empty() ? default_palette(ontology.environments())
                                      : parse_palette(read_text_file(palette_path));
  VectorScene scene;
  scene.bounds = scenario.bounds();
  scene.zones = scenario.zones;
  if (!map_path.empty()) scene.landmarks = landmarks_from_json(read_text_file(map_path));
  if (!leaves_path.empty()) scene.leaves = grid_leaves_from_json(read_text_file(leaves_path));
  if (!fragments_path.empty()) scene.fragments = fragments_from_json(read_text_file(fragments_path));
  write_text_file(out, render_svg(scene, spec));
  return 0;
}

int cmd_metrics(const GlobalOptions& g, const std::string& pred_path, const std::string& truth_path) {
  const LabelGrid pred = load_grid_csv(pred_path);
  const LabelGrid truth = load_grid_csv(truth_path);
  const auto per = iou_per_label(pred, truth);
  const ApSummary ap = precision_recall_ap(pred, truth);

  std::string csv = "metric,label,value\n";
  std::cout << "label,iou,ap,positives,predictions\n";
  for (const auto& c : ap.per_class) {
    const double i = per.at(c.label);
    std::cout << c.label << ',' << format_double(i) << ',' << format_double(c.ap) << ','
              << c.positives << ',' << c.predictions << '\n';
    csv += "iou," + c.label + "," + format_double(i) + "\n";
    csv += "ap," + c.label + "," + format_double(c.ap) + "\n";
  }
  const double macro = macro_iou(pred, truth);
  std::cout << "macro_iou," << format_double(macro) << "\nmap," << format_double(ap.mean_ap)
            << "\nmicro_ap," << format_double(ap.micro_ap) << '\n';
  csv += "macro_iou,," + format_double(macro) + "\n";
  csv += "map,," + format_double(ap.mean_ap) + "\n";
  csv += "micro_ap,," + format_double(ap.micro_ap) + "\n";
  if (!g.out.empty()) write_text_file(g.out, csv);
  return 0;
}

int cmd_batch(const GlobalOptions& g, const std::string& sweep_path, int threads) {
  const TrialConfig base = load_config(g);
  const fs::path out = require_out(g);
  const std::vector<TrialConfig> configs =
      sweep_path.empty() ? std::vector<TrialConfig>{base}
                         : expand_sweep(base, read_text_file(sweep_path));
  const auto rows = run_batch(configs, threads);
  fs::create_directories(out);
  std::string csv = "trial,ok,error," + report_csv_header() + "\n";
  std::size_t failed = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::string error = rows[i].error;
    for (char& c : error)
      if (c == ',' || c == '\n') c = ';';
    csv += std::to_string(i) + "," + (rows[i].ok ? "1" : "0") + "," + error + ",";
    csv += rows[i].ok ? report_csv_row(rows[i].report) : std::string();
    csv += "\n";
    if (!rows[i].ok) ++failed;
  }
  write_text_file(out / "batch.csv", csv);
  std::cout << rows.size() << " trials, " << failed << " failed\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent semantic mapping simulator and environment classifier"};
  app.require_subcommand(1);
  GlobalOptions g;
  std::uint64_t seed = 0;
  app.add_option("--config", g.config, "Trial config (JSON)");
  auto* seed_opt = app.add_option("--seed", seed, "Master seed");
  app.add_option("--out", g.out, "Output file or directory");
  app.add_flag("--no-render", g.no_render, "Skip image output");

  auto* gen = app.add_subcommand("gen-scenario", "Generate a scenario file from a preset");
  std::string preset;
  std::vector<double> densities;
  std::string ontology_path = std::string(CTXSLAM_DEFAULT_ONTOLOGY);
  int agents = 3;
  gen->add_option("--preset", preset, "Scenario preset")
      ->required()
      ->check(CLI::IsMember(scenario_presets()));
  gen->add_option("--density", densities, "Features per km^2 (one value, or one per zone)")
      ->check(CLI::NonNegativeNumber);
  gen->add_option("--ontology", ontology_path, "Ontology (JSON)");
  gen->add_option("--agents", agents, "Agent start poses to emit")->check(CLI::PositiveNumber);

  auto* run = app.add_subcommand("run", "Run one trial");

  auto* render = app.add_subcommand("render", "Render grids (PGM) or maps (SVG)");
  std::vector<std::string> grid_paths;
  std::string format = "pgm";
  std::string palette_path;
  std::string render_ontology;
  std::string scenario_path;
  std::string map_path;
  std::string leaves_path;
  std::string fragments_path;
  int cell_pixels = 10;
  double scale = 200.0;
  render->add_option("--grid", grid_paths, "Label grid CSV; repeat for side-by-side panels");
  render->add_option("--format", format, "pgm or svg")->check(CLI::IsMember({"pgm", "svg"}));
  render->add_option("--palette", palette_path, "Palette JSON {label: \"#rrggbb\"}");
  render->add_option("--ontology", render_ontology, "Ontology for the default palette");
  render->add_option("--scenario", scenario_path, "Scenario JSON (svg)");
  render->add_option("--map", map_path, "collective_map.json (svg)");
  render->add_option("--leaves", leaves_path, "grid.json (svg)");
  render->add_option("--fragments", fragments_path, "fragments.json (svg)");
  render->add_option("--cell-px", cell_pixels, "Pixels per grid cell (pgm)")->check(CLI::PositiveNumber);
  render->add_option("--scale", scale, "Pixels per km (svg)")->check(CLI::PositiveNumber);

  auto* metrics = app.add_subcommand("metrics", "IoU and AP of a predicted grid against truth");
  std::string pred_path;
  std::string truth_path;
  metrics->add_option("--pred", pred_path, "Predicted grid CSV")->required();
  metrics->add_option("--truth", truth_path, "Truth grid CSV")->required();

  auto* batch = app.add_subcommand("batch", "Run a parameter sweep");
  std::string sweep_path;
  int threads = 1;
  batch->add_option("--sweep", sweep_path, "Sweep JSON {key: [values]}");
  batch->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  for (auto* sub : {gen, run, render, metrics, batch}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }
  if (*seed_opt) g.seed = seed;

  try {
    if (*gen) return cmd_gen_scenario(g, preset, densities, ontology_path, agents);
    if (*run) return cmd_run(g);
    if (*render)
      return cmd_render(g, grid_paths, format, palette_path, render_ontology, scenario_path,
                        map_path, leaves_path, fragments_path, cell_pixels, scale);
    if (*metrics) return cmd_metrics(g, pred_path, truth_path);
    if (*batch) return cmd_batch(g, sweep_path, threads);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kUsageError;
}
